"""Independent numerical oracles for the closed forms.

Three unrelated check families, sharing no code path with the formulas
they test:

* quadrature_hardy: graded-mesh Gauss-Legendre evaluation of the Hardy
  functional ∫_0^k ((1/t)∫_0^t g)^p dt. The integrand behaves like
  t^(e-1) near 0 (e = 1-p+p/a > 0 can be small), so the mesh is
  geometrically graded toward 0 with ratio 1/2 and the remainder below the
  last panel is summed by geometric extrapolation of the measured
  panel-to-panel ratio, exact for a pure power law, which is exactly what
  the head of an extremizer is. The error estimate (embedded lower-order
  rule per panel, plus extrapolation-ratio drift) never consults the
  closed form being verified.

* the probe machinery: seeded random admissible step functions
  (nonincreasing, exact discrete moments) whose Hardy values must stay
  below the analytic supremum, plus the cell-averaged extremizer as the
  attainment candidate. Deterministic given (inputs, seed): per-trial RNGs
  are derived seed sequences (seed, trial, attempt) and the reduction is
  an order-independent max.

* a concrete dyadic model on [0,1]: the exact maximal function over dyadic
  ancestors of each cell, weak-type and L^p inequalities, and the Bellman
  upper bound over best sets of prescribed measure.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Optional

import numpy as np

from .bellman import Params, bellman_value
from .errors import (
    AccuracyError,
    ConsistencyError,
    DomainError,
    SamplingError,
)
from .extremizer import ExtremalFunction, build_extremizer, hardy_average
from .scalar_kernels import DOMAIN_DUST, MIN_P_EXCESS

_MONOTONE_DUST = 1e-12


@dataclass(frozen=True)
class StepFunction:
    """Nonnegative step function on uniform cells ((i-1)/n, i/n].

    Monotonicity is *not* a constructor requirement: maximal functions of
    step functions live on the same grid but need not be nonincreasing.
    Use is_nonincreasing where the admissible class requires it.
    """

    values: np.ndarray

    def __post_init__(self):
        vals = np.array(self.values, dtype=float)
        if vals.ndim != 1 or vals.size == 0:
            raise DomainError("values must be a nonempty 1-d sequence")
        if not np.all(np.isfinite(vals)):
            raise DomainError("values must be finite")
        if np.any(vals < 0.0):
            raise DomainError(f"values must be nonnegative, got {vals.min()!r}")
        vals.flags.writeable = False
        object.__setattr__(self, "values", vals)

    @property
    def n(self) -> int:
        return int(self.values.size)

    @property
    def l1(self) -> float:
        """∫_0^1 = mean of the cell values."""
        return float(self.values.mean())

    def lp(self, p: float) -> float:
        """∫_0^1 (.)^p = mean of the p-th powers."""
        return float(np.mean(self.values**p))

    @property
    def is_nonincreasing(self) -> bool:
        scale = max(1.0, float(self.values[0]))
        return bool(np.all(np.diff(self.values) <= _MONOTONE_DUST * scale))


@dataclass(frozen=True)
class ProbeReport:
    """Outcome of randomized supremum probing for one instance."""

    trials: int
    n: int
    seed: int
    best_value: float
    analytic_value: float
    max_violation: float
    extremizer_discrete_value: float
    trial_values: Optional[tuple] = None

    def as_dict(self) -> dict:
        return {
            "trials": self.trials,
            "n": self.n,
            "seed": self.seed,
            "best_value": self.best_value,
            "analytic_value": self.analytic_value,
            "max_violation": self.max_violation,
            "extremizer_discrete_value": self.extremizer_discrete_value,
        }


@lru_cache(maxsize=None)
def _gl_nodes(order: int):
    x, w = np.polynomial.legendre.leggauss(order)
    return x, w


def _panels_gauss(fn, lo, hi, order: int):
    """Gauss-Legendre integral of fn on each [lo_i, hi_i], vectorized."""
    x, w = _gl_nodes(order)
    mid = 0.5 * (lo + hi)
    half = 0.5 * (hi - lo)
    t = mid[:, None] + half[:, None] * x[None, :]
    return (fn(t) * w).sum(axis=1) * half


def graded_quadrature(fn, upper: float, levels: int = 60, order: int = 16):
    """∫_0^upper fn for a nonnegative integrand with a possible power
    singularity at 0. Returns (value, error_estimate).

    Panels [upper 2^-(j+1), upper 2^-j] for j < levels, each integrated by
    GL(order) with a GL(order/2) embedded error estimate; the tail below
    the last panel is the geometric extrapolation I_last * r/(1-r) of the
    measured ratio r = I_last/I_prev, with the drift between the last two
    ratios taken as its error.
    """
    if upper <= 0.0:
        raise DomainError(f"upper limit must be positive, got {upper}")
    edges = upper * 2.0 ** (-np.arange(levels + 1, dtype=float))
    hi = edges[:-1]
    lo = edges[1:]
    I = _panels_gauss(fn, lo, hi, order)
    err = float(np.abs(I - _panels_gauss(fn, lo, hi, order // 2)).sum())
    if I[-1] <= 0.0 or I[-2] <= 0.0 or I[-3] <= 0.0:
        # integrand died out before the last panels; nothing left below
        return float(I.sum()), err + abs(float(I[-1]))
    r = float(I[-1] / I[-2])
    if not 0.0 < r < 1.0 - 1e-9:
        raise AccuracyError(
            f"panel ratio {r!r} not in (0, 1): integrand near 0 is not "
            f"summable by geometric extrapolation"
        )
    tail = float(I[-1]) * r / (1.0 - r)
    r2 = float(I[-2] / I[-3])
    if 0.0 < r2 < 1.0 - 1e-9:
        err += abs(tail - float(I[-1]) * r2 / (1.0 - r2))
    else:
        err += abs(tail)
    return float(I.sum()) + tail, err


def quadrature_hardy(g: ExtremalFunction, k: float, tol: float) -> float:
    """Numeric ∫_0^k ((1/t)∫_0^t g)^p dt with an honest error estimate.

    Raises AccuracyError if the estimate exceeds tol relative. The
    integrand is the p-th power of hardy_average, evaluated directly; the
    closed form never enters.
    """
    if not 0.0 < k <= 1.0 + DOMAIN_DUST:
        raise DomainError(f"k must lie in (0, 1], got {k}")
    k = min(float(k), 1.0)
    if tol <= 0.0:
        raise DomainError(f"tol must be positive, got {tol}")
    p = g.p

    def fn(t):
        return hardy_average(g, t) ** p

    total, err = graded_quadrature(fn, min(k, g.k))
    if k > g.k + 1e-15:
        # flat-tail region [g.k, k]: smooth, no grading needed
        edges = np.linspace(g.k, k, 17)
        I = _panels_gauss(fn, edges[:-1], edges[1:], 16)
        total += float(I.sum())
        err += float(np.abs(I - _panels_gauss(fn, edges[:-1], edges[1:], 8)).sum())
    if err > tol * max(abs(total), np.finfo(float).tiny):
        raise AccuracyError(
            f"quadrature error estimate {err:.3e} exceeds "
            f"tol * |integral| = {tol * abs(total):.3e}"
        )
    return float(total)


def discretize_extremizer(g: ExtremalFunction, n: int) -> StepFunction:
    """Cell averages of g on the uniform n-grid (exact, via the mass
    function of g, which is closed-form on both pieces)."""
    if n < 1:
        raise DomainError(f"n must be >= 1, got {n}")
    edges = np.arange(n + 1, dtype=float) / n
    mass = np.where(
        edges <= g.k,
        g.A1 * g.a * edges ** (1.0 / g.a),
        g.B0 + g.c * (edges - g.k),
    )
    vals = np.maximum(np.diff(mass) * n, 0.0)
    return StepFunction(vals)


def _avg_power_integrals(v, C, t0, t1, p, panels: int, order: int = 16):
    """∫_{t0_i}^{t1_i} (v_i + C_i/t)^p dt per cell, composite GL."""
    x, w = _gl_nodes(order)
    j = np.arange(panels, dtype=float)
    width = (t1 - t0) / panels
    a = t0[:, None] + width[:, None] * j[None, :]
    mid = a + 0.5 * width[:, None]
    half = 0.5 * width
    t = mid[:, :, None] + half[:, None, None] * x[None, None, :]
    # cancellation in v + C/t can leave a -1e-16 sliver; clamp before **p
    vals = np.maximum(v[:, None, None] + C[:, None, None] / t, 0.0) ** p
    return (vals * w).sum(axis=2).sum(axis=1) * half


def _cells_quadrature(v, C, t0, t1, p) -> float:
    """Per-cell integrals refined until successive panel doublings agree
    to 1e-10 relative. One panel of GL16 is already near-exact here (the
    pole at t=0 is at least one cell width away), so this converges on the
    first comparison in practice."""
    if v.size == 0:
        return 0.0
    I_prev = _avg_power_integrals(v, C, t0, t1, p, panels=1)
    panels = 2
    while panels <= 64:
        I_cur = _avg_power_integrals(v, C, t0, t1, p, panels)
        atol = 1e-14 * max(1.0, float(np.abs(I_cur).sum()))
        if np.all(np.abs(I_cur - I_prev) <= np.maximum(1e-10 * np.abs(I_cur), atol)):
            return float(I_cur.sum())
        I_prev = I_cur
        panels *= 2
    return float(I_prev.sum())


def discrete_hardy(sf: StepFunction, k: float, p: float) -> float:
    """∫_0^k ((1/t)∫_0^t sf)^p dt, exactly (to quadrature tolerance).

    On cell i the average is v_i + C_i/t with C_i = S_{i-1} - v_i t_{i-1}
    (S = prefix mass), an analytic integrand one cell width away from its
    pole; the first cell is exactly constant. A partial last cell (when
    k*n is not an integer) is integrated with upper limit k.
    """
    if not 0.0 < k <= 1.0 + DOMAIN_DUST:
        raise DomainError(f"k must lie in (0, 1], got {k}")
    if p - 1.0 < MIN_P_EXCESS:
        raise DomainError(f"p must satisfy p >= 1 + {MIN_P_EXCESS:g}, got {p}")
    k = min(float(k), 1.0)
    v = sf.values
    n = sf.n
    kn = k * n
    full = min(int(np.floor(kn + 1e-9)), n)
    part_width = max(k - full / n, 0.0)
    if full == 0:
        # k inside the first cell, where the average is exactly v[0]
        return float(v[0] ** p * k)
    total = float(v[0] ** p) / n
    prefix = np.cumsum(v) / n
    if full >= 2:
        i = np.arange(2, full + 1)
        vi = v[i - 1]
        t0 = (i - 1) / n
        C = prefix[i - 2] - vi * t0
        total += _cells_quadrature(vi, C, t0, i / n, p)
    if part_width > 1e-12 / n and full < n:
        vi = np.array([v[full]])
        t0 = np.array([full / n])
        C = np.array([prefix[full - 1] - vi[0] * t0[0]])
        total += _cells_quadrature(vi, C, t0, np.array([k]), p)
    return float(total)


def _seed_entries(seed):
    if isinstance(seed, (int, np.integer)):
        entries = (int(seed),)
    else:
        entries = tuple(int(s) for s in seed)
    if any(s < 0 for s in entries):
        raise DomainError(f"seed entries must be nonnegative, got {entries}")
    return entries


def _theta_bisect(w, f: float, F: float, p: float) -> float:
    """θ in [0,1] with mean((θw + (1-θ)f)^p) = F.

    The moment is convex in θ with derivative 0 at θ=0, hence monotone on
    [0,1]; plain bisection suffices."""
    lo, hi = 0.0, 1.0
    for _ in range(90):
        mid = 0.5 * (lo + hi)
        if np.mean((mid * w + (1.0 - mid) * f) ** p) >= F:
            hi = mid
        else:
            lo = mid
    return 0.5 * (lo + hi)


def sample_admissible(params: Params, n: int, seed, max_attempts: int = 8) -> StepFunction:
    """A seeded random member of the admissible class: nonincreasing,
    nonnegative, discrete moments L1 = f and Lp = F to 1e-10 relative.

    Draw: sorted inverse-power transforms of uniforms (tail weight doubles
    per attempt), rescaled to L1 = f exactly, then mixed with the constant
    f; the mix preserves L1 and monotonicity, leaving one scalar equation
    for the Lp moment, solved by bisection. A draw whose full-strength
    (θ=1) Lp moment cannot reach F is rejected and redrawn heavier; after
    max_attempts rejections SamplingError is raised (F too close to the
    single-spike ceiling n^(p-1) f^p for this n).

    seed: nonnegative int, or a sequence of them (derived-seed use).
    """
    if n < 2:
        raise DomainError(f"n must be >= 2, got {n}")
    p, f, F = params.p, params.f, params.F
    entries = _seed_entries(seed)
    lp_tol = 1e-10 * max(1.0, F)
    for attempt in range(max_attempts):
        rng = np.random.default_rng((*entries, attempt))
        beta = 2.0**attempt
        w = np.sort((1.0 - rng.random(n)) ** (-beta))[::-1]
        w *= f / w.mean()
        if params.is_constant:
            theta = 0.0  # the constraint set is the single constant function
        else:
            if np.mean(w**p) < F:
                continue
            theta = _theta_bisect(w, f, F, p)
        g = theta * w + (1.0 - theta) * f
        sf = StepFunction(g)
        if abs(sf.l1 - f) > 1e-10 * max(1.0, f) or abs(sf.lp(p) - F) > lp_tol:
            raise ConsistencyError(
                f"sampler moments drifted: L1 = {sf.l1!r} (target {f!r}), "
                f"Lp = {sf.lp(p)!r} (target {F!r})"
            )
        if not sf.is_nonincreasing:
            raise ConsistencyError("sampler produced a non-monotone vector")
        return sf
    raise SamplingError(
        f"no draw reached Lp = {F!r} after {max_attempts} attempts "
        f"(n = {n}, ceiling n^(p-1) f^p = {n ** (p - 1.0) * f ** p!r})"
    )


def probe_supremum(params: Params, n: int, trials: int, seed: int,
                   collect_values: bool = False) -> ProbeReport:
    """Hardy values of `trials` seeded admissible samples plus the
    cell-averaged extremizer, against the analytic supremum.

    max_violation = best_value - analytic_value; anything above
    discretization slack (~1e-9) means the closed form is not an upper
    bound and something is badly wrong.
    """
    if trials < 1:
        raise DomainError(f"trials must be >= 1, got {trials}")
    entries = _seed_entries(seed)
    analytic = bellman_value(params, grid_n=0).value
    ext_sf = discretize_extremizer(build_extremizer(params), n)
    ext_val = discrete_hardy(ext_sf, params.k, params.p)
    best = -np.inf
    vals = []
    for trial in range(trials):
        sf = sample_admissible(params, n, (*entries, trial))
        val = discrete_hardy(sf, params.k, params.p)
        if collect_values:
            vals.append(val)
        if val > best:
            best = val
    best_value = max(best, ext_val)
    return ProbeReport(
        trials=trials,
        n=n,
        seed=int(seed),
        best_value=float(best_value),
        analytic_value=float(analytic),
        max_violation=float(best_value - analytic),
        extremizer_discrete_value=float(ext_val),
        trial_values=tuple(vals) if collect_values else None,
    )


def dyadic_maximal(phi: StepFunction) -> StepFunction:
    """M'φ on the dyadic grid: per cell, the max of φ's averages over the
    cell itself and all its dyadic ancestors up to [0,1]. Exact."""
    n = phi.n
    if n & (n - 1):
        raise DomainError(f"dyadic grid needs a power-of-two length, got {n}")
    m = phi.values.copy()
    level = phi.values
    while level.size > 1:
        level = 0.5 * (level[0::2] + level[1::2])
        m = np.maximum(m, np.repeat(level, n // level.size))
    return StepFunction(m)


def best_k_set_integral(m: StepFunction, k: float, p: float) -> float:
    """sup over |K| = k of ∫_K m^p: sort cell values of m^p descending and
    take the top k of measure, the last cell fractionally."""
    if not 0.0 < k <= 1.0 + DOMAIN_DUST:
        raise DomainError(f"k must lie in (0, 1], got {k}")
    k = min(float(k), 1.0)
    vals = np.sort(m.values**p)[::-1]
    n = m.n
    kn = k * n
    full = min(int(np.floor(kn + 1e-9)), n)
    frac = max(kn - full, 0.0)
    total = float(vals[:full].sum())
    if full < n and frac > 1e-12:
        total += frac * float(vals[full])
    return total / n


def check_weak_type(phi: StepFunction, lam: float) -> tuple[float, float]:
    """(|{M'φ > λ}|, (1/λ)∫_{M'φ>λ} φ); weak type (1,1) says lhs <= rhs."""
    if lam <= 0.0:
        raise DomainError(f"lambda must be positive, got {lam}")
    m = dyadic_maximal(phi).values
    mask = m > lam
    lhs = float(mask.sum()) / phi.n
    rhs = float(phi.values[mask].sum()) / phi.n / lam
    return lhs, rhs
