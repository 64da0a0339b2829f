"""Command-line front end: value | extremal | verify | sweep.

All numbers are printed with 17 significant digits so every value
round-trips bit-exactly through float parsing. Exit codes: 0 success,
1 usage error (bad or infeasible flags), 2 consistency or verification
failure. Output given fixed flags and seed is byte-identical across runs.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys

import numpy as np

from .bellman import BellmanReport, Params, bellman_value
from .errors import (
    AccuracyError,
    BracketError,
    ConsistencyError,
    ConvergenceError,
    DomainError,
    InfeasibleError,
    SamplingError,
)
from .extremizer import (
    build_extremizer,
    g_eval,
    hardy_average,
    hardy_functional_closed,
    moments,
    to_record,
)
from .verification import (
    StepFunction,
    best_k_set_integral,
    check_weak_type,
    dyadic_maximal,
    probe_supremum,
    quadrature_hardy,
)

CSV_COLUMNS = ("p", "f", "F", "k", "value", "B0", "Z0", "a", "A1", "c", "p0", "p1")


def _fmt(x) -> str:
    return "none" if x is None else f"{float(x):.17g}"


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse exits with code 2 on usage problems; the contract here is 1
    def error(self, message):
        raise _UsageError(message)


def _add_param_flags(sub, required=True):
    sub.add_argument("--p", type=float, required=required, help="exponent p > 1")
    sub.add_argument("--f", type=float, required=required, help="L1 average f > 0")
    sub.add_argument("--F", type=float, required=required, help="Lp average F >= f^p")
    sub.add_argument("--k", type=float, required=required, help="measure k in (0,1]")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="treebellman", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p_val = sub.add_parser("value", help="Bellman value with diagnostics")
    _add_param_flags(p_val)
    p_val.add_argument("--n", type=int, default=1000, help="cross-check grid size")
    p_val.add_argument("--tol", type=float, default=1e-6,
                       help="grid cross-check relative tolerance")
    p_val.add_argument("--json", action="store_true")
    p_val.add_argument("--csv", action="store_true")

    p_ext = sub.add_parser("extremal", help="extremal function record")
    _add_param_flags(p_ext)
    p_ext.add_argument("--samples", type=int, default=0,
                       help="rows of a log-spaced (t, g, avg) table")
    p_ext.add_argument("--json", action="store_true")
    p_ext.add_argument("--csv", action="store_true")

    p_ver = sub.add_parser("verify", help="numerical verification suite")
    _add_param_flags(p_ver)
    p_ver.add_argument("--trials", type=int, default=1000,
                       help="random admissible probes (0 = skip probing)")
    p_ver.add_argument("--n", type=int, default=64, help="probe discretization")
    p_ver.add_argument("--seed", type=int, default=0)
    p_ver.add_argument("--tol", type=float, default=1e-6,
                       help="quadrature/grid relative tolerance")
    p_ver.add_argument("--json", action="store_true")
    p_ver.add_argument("--out", type=str, default=None,
                       help="CSV dump of per-trial probe values")

    p_swp = sub.add_parser("sweep", help="CSV sweep over one parameter")
    p_swp.add_argument("--param", choices=("p", "f", "F", "k"), required=True)
    p_swp.add_argument("--start", type=float, required=True)
    p_swp.add_argument("--stop", type=float, required=True)
    p_swp.add_argument("--steps", type=int, default=10)
    _add_param_flags(p_swp, required=False)
    p_swp.add_argument("--out", type=str, default=None)
    return parser


def _csv_row(report: BellmanReport) -> list[str]:
    g = build_extremizer(report.params)
    d = report.as_dict()
    d["A1"] = g.A1
    d["c"] = g.c
    return [_fmt(d[col]) for col in CSV_COLUMNS]


def cmd_value(args) -> int:
    params = Params(args.p, args.f, args.F, args.k)
    report = bellman_value(params, grid_n=args.n)
    if report.grid_max_value is None:
        grid_gap = None
        ok = True  # k=1 has no R_k grid to check against
    else:
        grid_gap = abs(report.grid_max_value - report.value) / report.value
        ok = grid_gap <= args.tol
    if args.json:
        payload = report.as_dict()
        payload["grid_rel_gap"] = grid_gap
        payload["consistent"] = ok
        print(json.dumps(payload, indent=2))
    elif args.csv:
        w = csv.writer(sys.stdout)
        w.writerow(CSV_COLUMNS)
        w.writerow(_csv_row(report))
    else:
        print(f"value        = {_fmt(report.value)}")
        print(f"B0           = {_fmt(report.B0)}")
        print(f"Z0           = {_fmt(report.Z0)}")
        print(f"omega_pk     = {_fmt(report.omega_pk_val)}")
        print(f"a            = {_fmt(report.a)}")
        print(f"interval     = [{_fmt(report.interval.p0)}, {_fmt(report.interval.p1)}]")
        print(f"grid_max     = {_fmt(report.grid_max_value)}"
              f" at {_fmt(report.grid_max_location)}")
        print(f"consistency  = {'PASS' if ok else 'FAIL'}"
              + ("" if grid_gap is None else f" (grid rel gap {grid_gap:.3e})"))
    return 0 if ok else 2


def cmd_extremal(args) -> int:
    params = Params(args.p, args.f, args.F, args.k)
    g = build_extremizer(params)
    record = to_record(g)
    m = max(int(args.samples), 0)
    ts = np.geomspace(1e-4, 1.0, m) if m else np.array([])
    if args.json:
        payload = dict(record)
        if m:
            payload["table"] = [
                {"t": float(t), "g": float(g_eval(g, t)),
                 "hardy_average": float(hardy_average(g, t))}
                for t in ts
            ]
        print(json.dumps(payload, indent=2))
    elif args.csv:
        w = csv.writer(sys.stdout)
        w.writerow(record.keys())
        w.writerow(_fmt(v) for v in record.values())
    else:
        for key, val in record.items():
            print(f"{key:<3} = {_fmt(val)}")
        if m:
            print(f"{'t':>24} {'g(t)':>24} {'avg(t)':>24}")
            for t in ts:
                print(f"{_fmt(t):>24} {_fmt(g_eval(g, t)):>24} "
                      f"{_fmt(hardy_average(g, t)):>24}")
    return 0


def _dyadic_suite(params: Params, seed: int, count: int = 20, grid: int = 256):
    """Weak-type, L^p and Bellman-bound checks on random dyadic data.

    Returns (ok, worst) where worst is the most adverse margin seen
    (positive = violation).
    """
    rng = np.random.default_rng((seed, 97))
    p = params.p
    worst = -np.inf
    for _ in range(count):
        phi = StepFunction(rng.random(grid) ** 2 * 2.0)
        mphi = dyadic_maximal(phi)
        mx = float(mphi.values.max())
        for lam in np.geomspace(0.05 * mx, 1.05 * mx, 20):
            lhs, rhs = check_weak_type(phi, float(lam))
            worst = max(worst, lhs - rhs)
        lp_bound = (p / (p - 1.0)) ** p * phi.lp(p)
        worst = max(worst, mphi.lp(p) - lp_bound)
        for k in (0.25, 0.5, 1.0):
            cap = bellman_value(Params(p, phi.l1, phi.lp(p), k), grid_n=0).value
            worst = max(worst, best_k_set_integral(mphi, k, p) - cap)
    return worst <= 1e-9, worst


def cmd_verify(args) -> int:
    params = Params(args.p, args.f, args.F, args.k)
    checks = []

    report = bellman_value(params, grid_n=512)
    if report.grid_max_value is None:
        checks.append(("closed-form consistency", True,
                       "two closed forms agree; no R_k grid at k=1"))
    else:
        gap = abs(report.grid_max_value - report.value) / report.value
        checks.append(("closed-form consistency", gap <= args.tol,
                       f"grid rel gap {gap:.3e} (tol {args.tol:g})"))

    g = build_extremizer(params)
    L1, Lp = moments(g)
    closed = hardy_functional_closed(g)
    att_gap = abs(closed - report.value) / report.value
    mom_gap = max(abs(L1 - params.f) / params.f, abs(Lp - params.F) / params.F)
    checks.append(("attainment and moments",
                   att_gap <= 1e-9 and mom_gap <= 1e-9,
                   f"value rel gap {att_gap:.3e}, moment rel gap {mom_gap:.3e}"))

    try:
        quad = quadrature_hardy(g, params.k, args.tol)
        quad_gap = abs(quad - closed) / closed
        checks.append(("quadrature oracle", quad_gap <= args.tol,
                       f"rel gap {quad_gap:.3e} (tol {args.tol:g})"))
    except AccuracyError as exc:
        checks.append(("quadrature oracle", False, str(exc)))

    probe = None
    if args.trials > 0:
        probe = probe_supremum(params, args.n, args.trials, args.seed,
                               collect_values=args.out is not None)
        checks.append(("supremum probe", probe.max_violation <= 1e-9,
                       f"max violation {probe.max_violation:.3e} over "
                       f"{probe.trials} trials (best {_fmt(probe.best_value)})"))
    else:
        checks.append(("supremum probe", True, "skipped (--trials 0)"))

    dy_ok, dy_worst = _dyadic_suite(params, args.seed)
    checks.append(("dyadic model", dy_ok, f"worst margin {dy_worst:.3e}"))

    ok = all(passed for _, passed, _ in checks)
    if args.json:
        payload = {
            "params": {"p": params.p, "f": params.f, "F": params.F, "k": params.k},
            "checks": [
                {"name": name, "status": "PASS" if passed else "FAIL",
                 "detail": detail}
                for name, passed, detail in checks
            ],
            "probe": probe.as_dict() if probe else None,
            "value": report.value,
        }
        print(json.dumps(payload, indent=2))
    else:
        print(f"value = {_fmt(report.value)}")
        for name, passed, detail in checks:
            print(f"{'PASS' if passed else 'FAIL'} {name}: {detail}")
    if args.out and probe is not None and probe.trial_values is not None:
        with open(args.out, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(("trial", "value"))
            for i, val in enumerate(probe.trial_values):
                w.writerow((i, _fmt(val)))
    return 0 if ok else 2


def cmd_sweep(args) -> int:
    fixed = {"p": args.p, "f": args.f, "F": args.F, "k": args.k}
    missing = [name for name, val in fixed.items()
               if name != args.param and val is None]
    if missing:
        raise _UsageError(
            f"sweep over {args.param!r} needs fixed values for {missing}"
        )
    if args.steps < 1:
        raise _UsageError(f"--steps must be >= 1, got {args.steps}")
    grid = np.linspace(args.start, args.stop, args.steps)
    rows = []
    for x in grid:
        point = dict(fixed)
        point[args.param] = float(x)
        try:
            params = Params(**point)
        except InfeasibleError as exc:
            print(f"warning: skipped infeasible {args.param}={x:.17g}: {exc}",
                  file=sys.stderr)
            continue
        rows.append(_csv_row(bellman_value(params, grid_n=0)))
    out = open(args.out, "w", newline="") if args.out else sys.stdout
    try:
        w = csv.writer(out)
        w.writerow(CSV_COLUMNS)
        w.writerows(rows)
    finally:
        if args.out:
            out.close()
    return 0


_COMMANDS = {
    "value": cmd_value,
    "extremal": cmd_extremal,
    "verify": cmd_verify,
    "sweep": cmd_sweep,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except _UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 1
    try:
        return _COMMANDS[args.command](args)
    except _UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 1
    except (InfeasibleError, DomainError) as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 1
    except (ConsistencyError, AccuracyError, SamplingError,
            BracketError, ConvergenceError) as exc:
        print(f"consistency failure: {exc}", file=sys.stderr)
        return 2


def entry():
    sys.exit(main())


if __name__ == "__main__":
    entry()
