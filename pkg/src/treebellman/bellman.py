"""Closed-form Bellman value of the tree maximal operator.

For averages f = ∫φ, F = ∫φ^p over the root and a measurable K with
μ(K) = k, the quantity computed here is

    value(p, f, F, k) = sup { ∫_K (Mφ)^p : φ >= 0, ∫φ = f, ∫φ^p = F }.

The supremum reduces to a one-variable problem over the head mass
B = ∫_0^k g of the nonincreasing rearrangement:

    h_k(B) = (f-B)^p/(1-k)^(p-1) + B^p/k^(p-1)      (feasibility boundary)
    R_k(B) = D(B) * omega_p(Z(B))^p,
    D(B)   = F - (f-B)^p/(1-k)^(p-1),
    Z(B)   = B^p / (k^(p-1) D(B)),

h_k is strictly convex with minimum h_k(kf) = f^p, so {h_k <= F} is an
interval [p0, p1] around kf. R_k attains its maximum at the interior point
B0 with f(1-k)/(f-B0) = omega_pk(f^p/F), and the value in closed form is

    value = [F*w^p - (1-k) f^p] * [(1 - (1-k)/w) / k]^p,   w = omega_pk(f^p/F),

which bellman_value cross-checks against R_k(B0) at 1e-9 relative (the two
expressions are algebraically equal via omega_p(Z(B0)) = (w-(1-k))/k) and,
by default, against a grid + golden-section maximization of R_k at 1e-6.

Degenerate branches: f^p = F forces the constant function (value = k f^p);
k = 1 uses the two-variable formula value = F * omega_p(f^p/F)^p and never
evaluates h_k or R_k.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import NamedTuple, Optional

import numpy as np

from .errors import ConsistencyError, DomainError, InfeasibleError
from .scalar_kernels import (
    DOMAIN_DUST,
    MIN_P_EXCESS,
    _as_array,
    _maybe_scalar,
    omega_p,
    omega_pk,
)

# closed-form identities must agree this tightly; grid cross-checks are looser
REL_TOL_CLOSED = 1e-9
REL_TOL_GRID = 1e-6


@dataclass(frozen=True)
class Params:
    """A feasible problem instance (p, f, F, k).

    f and F are the L^1 and L^p averages of the competitor over the root;
    k is the measure of the set the maximal function is integrated over.
    Feasibility (Hölder): f^p <= F, with equality exactly for the constant
    function.
    """

    p: float
    f: float
    F: float
    k: float

    def __post_init__(self):
        for name in ("p", "f", "F", "k"):
            v = float(getattr(self, name))
            if not math.isfinite(v):
                raise InfeasibleError(f"{name} must be finite, got {v}")
            object.__setattr__(self, name, v)
        if self.p - 1.0 < MIN_P_EXCESS:
            raise InfeasibleError(
                f"p must satisfy p >= 1 + {MIN_P_EXCESS:g}, got {self.p}"
            )
        if self.f <= 0.0:
            raise InfeasibleError(f"f must be positive, got {self.f}")
        if self.F <= 0.0:
            raise InfeasibleError(f"F must be positive, got {self.F}")
        if self.k <= 0.0 or self.k > 1.0 + DOMAIN_DUST:
            raise InfeasibleError(f"k must lie in (0, 1], got {self.k}")
        if self.k > 1.0:
            object.__setattr__(self, "k", 1.0)
        if self.f**self.p > self.F * (1.0 + DOMAIN_DUST):
            raise InfeasibleError(
                f"Hoelder feasibility f^p <= F violated: "
                f"f^p = {self.f ** self.p!r} > F = {self.F!r}"
            )

    @property
    def U(self) -> float:
        """The kernel argument f^p/F in [0, 1]."""
        return min(self.f**self.p / self.F, 1.0)

    @property
    def is_constant(self) -> bool:
        """True when f^p = F up to dust: only the constant function fits."""
        return self.f**self.p >= self.F * (1.0 - DOMAIN_DUST)


@dataclass(frozen=True)
class FeasibleInterval:
    """The interval [p0, p1] = {B in [0, f] : h_k(B) <= F}."""

    p0: float
    p1: float

    @property
    def width(self) -> float:
        return self.p1 - self.p0


class GridMax(NamedTuple):
    location: float
    value: float


@dataclass(frozen=True)
class BellmanReport:
    """Value plus every intermediate of the closed-form chain.

    grid_max_* are None when the grid cross-check was skipped (grid_n=0)
    or is unavailable (k = 1, where R_k is not defined).
    """

    params: Params
    value: float
    B0: float
    Z0: float
    omega_pk_val: float
    a: float
    interval: FeasibleInterval
    grid_max_location: Optional[float] = None
    grid_max_value: Optional[float] = None

    def as_dict(self) -> dict:
        return {
            "p": self.params.p,
            "f": self.params.f,
            "F": self.params.F,
            "k": self.params.k,
            "value": self.value,
            "B0": self.B0,
            "Z0": self.Z0,
            "omega_pk_val": self.omega_pk_val,
            "a": self.a,
            "p0": self.interval.p0,
            "p1": self.interval.p1,
            "grid_max_location": self.grid_max_location,
            "grid_max_value": self.grid_max_value,
        }


def _require_k_lt_1(params: Params, what: str):
    if params.k >= 1.0:
        raise DomainError(f"{what} is undefined at k = 1 (degenerate branch)")


def hk_eval(params: Params, B):
    """h_k(B) = (f-B)^p/(1-k)^(p-1) + B^p/k^(p-1) for B in [0, f], k < 1.

    Strictly convex with minimum h_k(kf) = f^p.
    """
    _require_k_lt_1(params, "h_k")
    p, f, k = params.p, params.f, params.k
    B, was_scalar = _as_array(B)
    slack = DOMAIN_DUST * max(1.0, f)
    if np.any(B < -slack) or np.any(B > f + slack):
        bad = B[(B < -slack) | (B > f + slack)]
        raise DomainError(f"B must lie in [0, f] = [0, {f!r}], got {bad.ravel()[0]!r}")
    B = np.clip(B, 0.0, f)
    val = (f - B) ** p / (1.0 - k) ** (p - 1.0) + B**p / k ** (p - 1.0)
    return _maybe_scalar(val, was_scalar)


def _bisect_hk(params: Params, target: float, lo: float, hi: float,
               increasing: bool, keep_feasible_side: bool) -> float:
    """Root of h_k = target on a monotone half, returned on the h <= target side."""
    f = params.f
    tol = 1e-13 * max(1.0, f)
    flo = hk_eval(params, lo) - target
    fhi = hk_eval(params, hi) - target
    # caller guarantees a sign change; equalities just collapse the bracket
    for _ in range(200):
        if hi - lo <= tol:
            break
        mid = 0.5 * (lo + hi)
        fmid = hk_eval(params, mid) - target
        if (fmid > 0.0) == increasing:
            hi = mid
            fhi = fmid
        else:
            lo = mid
            flo = fmid
    if keep_feasible_side:
        # feasible side is where h <= target
        if increasing:
            return lo if flo <= 0.0 else hi if fhi <= 0.0 else lo
        return hi if fhi <= 0.0 else lo if flo <= 0.0 else hi
    return 0.5 * (lo + hi)


def feasible_interval(params: Params) -> FeasibleInterval:
    """Roots of h_k(B) = F around the minimizer B = kf, clamped to [0, f].

    p0 = 0 if h_k(0) <= F, else the unique root in [0, kf]; symmetrically
    p1 = f if h_k(f) <= F. Never infeasible: h_k(kf) = f^p <= F. The
    returned endpoints sit on the feasible side of the bisection bracket,
    so h_k(p0) <= F and h_k(p1) <= F up to evaluation dust.
    """
    _require_k_lt_1(params, "feasible_interval")
    f, F, k = params.f, params.F, params.k
    kf = k * f
    if params.is_constant:
        return FeasibleInterval(kf, kf)
    p0 = 0.0 if hk_eval(params, 0.0) <= F else _bisect_hk(
        params, F, 0.0, kf, increasing=False, keep_feasible_side=True
    )
    p1 = f if hk_eval(params, f) <= F else _bisect_hk(
        params, F, kf, f, increasing=True, keep_feasible_side=True
    )
    return FeasibleInterval(float(p0), float(p1))


def rk_eval(params: Params, B):
    """R_k(B) = D(B) * omega_p(Z(B))^p on the feasible interval, k < 1.

    D(B) = F - (f-B)^p/(1-k)^(p-1) and Z(B) = B^p/(k^(p-1) D(B)); Z lies in
    [0, 1] exactly when h_k(B) <= F, so after the feasibility gate any
    overshoot of Z past 1 is amplified float dust and is clamped. At the
    boundary corner D = 0 (only reachable with B = 0) the limit value is 0.
    """
    _require_k_lt_1(params, "R_k")
    p, f, F, k = params.p, params.f, params.F, params.k
    B, was_scalar = _as_array(B)
    h = np.asarray(hk_eval(params, B))
    gate = F * (1.0 + REL_TOL_CLOSED) + REL_TOL_CLOSED
    if np.any(h > gate):
        bad = np.asarray(B)[h > gate]
        raise DomainError(
            f"B = {bad.ravel()[0]!r} is outside the feasible interval "
            f"(h_k(B) = {np.asarray(h)[h > gate].ravel()[0]!r} > F = {F!r})"
        )
    B = np.clip(B, 0.0, f)
    D = F - (f - B) ** p / (1.0 - k) ** (p - 1.0)
    pos = D > 0.0
    with np.errstate(divide="ignore", invalid="ignore"):
        Z = np.where(pos, B**p / (k ** (p - 1.0) * np.where(pos, D, 1.0)), 0.0)
    Z = np.clip(Z, 0.0, 1.0)
    val = np.where(pos, D * omega_p(p, Z) ** p, 0.0)
    return _maybe_scalar(val, was_scalar)


def solve_b0(params: Params) -> float:
    """The interior maximizer B0 of R_k, from f(1-k)/(f-B0) = omega_pk(f^p/F).

    Requires k < 1 and f^p < F strictly. Asserts the bracket
    kf < B0 < min(p*k*f/(p-1+k), p1) up to 1e-9*f slack.
    """
    _require_k_lt_1(params, "solve_b0")
    if params.is_constant:
        raise DomainError(
            "solve_b0 requires f^p < F strictly; the constant case has B0 = k*f"
        )
    p, f, k = params.p, params.f, params.k
    w = omega_pk(p, k, params.U)
    B0 = f - f * (1.0 - k) / w
    iv = feasible_interval(params)
    ub = min(p * k * f / (p - 1.0 + k), iv.p1)
    slack = REL_TOL_CLOSED * max(1.0, f)
    if not (k * f - slack < B0 < ub + slack):
        raise ConsistencyError(
            f"maximizer B0 = {B0!r} escaped its bracket "
            f"({k * f!r}, {ub!r}) for params {params}"
        )
    return float(B0)


def _golden_max(fn, lo: float, hi: float, tol: float):
    """Golden-section maximization on [lo, hi]; returns (x, fn(x))."""
    invphi = (math.sqrt(5.0) - 1.0) / 2.0
    best_x, best_v = lo, fn(lo)
    v_hi = fn(hi)
    if v_hi > best_v:
        best_x, best_v = hi, v_hi
    a, b = lo, hi
    x1 = b - invphi * (b - a)
    x2 = a + invphi * (b - a)
    f1, f2 = fn(x1), fn(x2)
    while b - a > tol:
        if f1 >= f2:
            b, x2, f2 = x2, x1, f1
            x1 = b - invphi * (b - a)
            f1 = fn(x1)
            if f1 > best_v:
                best_x, best_v = x1, f1
        else:
            a, x1, f1 = x1, x2, f2
            x2 = a + invphi * (b - a)
            f2 = fn(x2)
            if f2 > best_v:
                best_x, best_v = x2, f2
    return best_x, best_v


def rk_grid_max(params: Params, n: int) -> GridMax:
    """Max of R_k over n uniform points of the feasible interval, refined
    by golden-section search around the best grid point."""
    if n < 3:
        raise DomainError(f"grid size must be >= 3, got {n}")
    _require_k_lt_1(params, "rk_grid_max")
    iv = feasible_interval(params)
    grid = np.linspace(iv.p0, iv.p1, int(n))
    vals = np.asarray(rk_eval(params, grid))
    i = int(np.argmax(vals))
    best_x, best_v = float(grid[i]), float(vals[i])
    lo = float(grid[max(i - 1, 0)])
    hi = float(grid[min(i + 1, n - 1)])
    if hi > lo:
        x, v = _golden_max(
            lambda b: float(rk_eval(params, float(b))),
            lo,
            hi,
            tol=1e-10 * max(1.0, params.f),
        )
        if v > best_v:
            best_x, best_v = float(x), float(v)
    return GridMax(location=best_x, value=best_v)


def _check_bounds(params: Params, value: float):
    lower = params.k * params.f**params.p
    upper = params.F * (params.p / (params.p - 1.0)) ** params.p
    slack = REL_TOL_CLOSED * max(1.0, abs(lower), abs(upper))
    if not (lower - slack <= value <= upper + slack):
        raise ConsistencyError(
            f"value {value!r} violates bounds [k f^p, F (p/(p-1))^p] = "
            f"[{lower!r}, {upper!r}] for params {params}"
        )


def bellman_value(params: Params, grid_n: int = 512) -> BellmanReport:
    """The Bellman value with its full diagnostic chain.

    Three branches: constant (f^p = F), k = 1, and the general interior
    maximization. The general branch evaluates the product closed form and
    asserts agreement with R_k(B0) at 1e-9 relative (ConsistencyError
    otherwise). grid_n >= 3 additionally runs the grid + golden-section
    cross-check (skip with grid_n=0); it is never run at k = 1 where R_k is
    undefined.
    """
    p, f, F, k = params.p, params.f, params.F, params.k
    if k >= 1.0:
        a = omega_p(p, params.U)
        value = F * a**p
        if params.is_constant:
            value = F  # a = omega_p(1) = 1 exactly
        _check_bounds(params, value)
        return BellmanReport(
            params=params,
            value=float(value),
            B0=f,
            Z0=params.U,
            omega_pk_val=float(a),
            a=float(a),
            interval=FeasibleInterval(f, f),
        )

    if params.is_constant:
        value = k * f**p
        report = BellmanReport(
            params=params,
            value=float(value),
            B0=k * f,
            Z0=1.0,
            omega_pk_val=1.0,
            a=1.0,
            interval=FeasibleInterval(k * f, k * f),
        )
        if grid_n >= 3:
            gm = rk_grid_max(params, grid_n)
            report = replace(
                report, grid_max_location=gm.location, grid_max_value=gm.value
            )
        _check_bounds(params, report.value)
        return report

    B0 = solve_b0(params)
    w = f * (1.0 - k) / (f - B0)  # = omega_pk(f^p/F), inverted exactly
    value = (F * w**p - (1.0 - k) * f**p) * ((1.0 - (1.0 - k) / w) / k) ** p
    value_rk = rk_eval(params, B0)
    denom = max(abs(value), abs(value_rk), 1e-300)
    if abs(value - value_rk) / denom > REL_TOL_CLOSED:
        raise ConsistencyError(
            f"closed forms disagree: product form {value!r} vs R_k(B0) "
            f"{value_rk!r} (rel {abs(value - value_rk) / denom:.3e}) "
            f"for params {params}"
        )
    D = F - (f - B0) ** p / (1.0 - k) ** (p - 1.0)
    Z0 = min(max(B0**p / (k ** (p - 1.0) * D), 0.0), 1.0)
    a = omega_p(p, Z0)
    iv = feasible_interval(params)
    gm = rk_grid_max(params, grid_n) if grid_n >= 3 else None
    _check_bounds(params, value)
    return BellmanReport(
        params=params,
        value=float(value),
        B0=B0,
        Z0=float(Z0),
        omega_pk_val=float(w),
        a=float(a),
        interval=iv,
        grid_max_location=None if gm is None else gm.location,
        grid_max_value=None if gm is None else gm.value,
    )
