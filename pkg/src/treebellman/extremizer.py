"""The explicit extremal function attaining the Bellman value.

The optimizer of the Hardy-functional form of the problem is

    g(t) = A1 * t^(-1+1/a)   on (0, k],
    g(t) = c                 on [k, 1],

with a = omega_p(Z0), Z0 = B0^p / (k^(p-1) (F - (f-B0)^p/(1-k)^(p-1))),
A1 = B0 * k^(-1/a) / a and c = (f-B0)/(1-k). Continuity at t = k and the
head-mass identity ∫_0^k g = B0 hold by construction; the moments come out
exactly (f, F) and the Hardy functional of g equals the Bellman value.

The load-bearing identity is (1/t) ∫_0^t g = a * g(t) on (0, k], which
turns the Hardy functional into a^p ∫_0^k g^p = a^p A1^p k^e / e with
e = 1 - p + p/a > 0 (integrability margin, positive exactly when
a < p/(p-1), i.e. Z0 > 0).

k = 1 convention: the tail interval [k, 1] is a single point, so B0 = f,
a = omega_p(f^p/F), A1 = f/a, and c is *defined* as A1; this keeps g
continuous at t = 1 and the continuity gap identically zero. Evaluation at
t = k returns the tail constant c (either branch is valid by continuity);
pinned for bit-reproducibility.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .bellman import REL_TOL_CLOSED, Params, solve_b0
from .errors import ConsistencyError, DomainError
from .scalar_kernels import DOMAIN_DUST, _as_array, _maybe_scalar, omega_p

_RECORD_KEYS = ("p", "f", "F", "k", "a", "A1", "c", "B0")


@dataclass(frozen=True)
class ExtremalFunction:
    """A two-piece power-law/constant extremizer with its defining data."""

    p: float
    f: float
    F: float
    k: float
    a: float
    A1: float
    c: float
    B0: float

    def __post_init__(self):
        for name in _RECORD_KEYS:
            object.__setattr__(self, name, float(getattr(self, name)))
        zmax = self.p / (self.p - 1.0)
        if not (1.0 - DOMAIN_DUST <= self.a <= zmax * (1.0 + DOMAIN_DUST)):
            raise ConsistencyError(
                f"power index a = {self.a!r} outside [1, p/(p-1)] = [1, {zmax!r}]"
            )
        if self.A1 <= 0.0 or self.c <= 0.0 or self.B0 <= 0.0:
            raise ConsistencyError(
                f"extremizer pieces must be positive: A1={self.A1!r}, "
                f"c={self.c!r}, B0={self.B0!r}"
            )
        if self.head_exponent_margin <= 0.0:
            raise ConsistencyError(
                f"integrability margin e = 1-p+p/a = "
                f"{self.head_exponent_margin!r} must be positive (a={self.a!r})"
            )
        gap = continuity_gap(self)
        if gap > REL_TOL_CLOSED * self.c:
            raise ConsistencyError(
                f"discontinuity at t=k: |A1 k^(-1+1/a) - c| = {gap!r} "
                f"exceeds {REL_TOL_CLOSED} * c"
            )
        head_mass = self.A1 * self.a * self.k ** (1.0 / self.a)
        if abs(head_mass - self.B0) > REL_TOL_CLOSED * self.B0:
            raise ConsistencyError(
                f"head mass A1*a*k^(1/a) = {head_mass!r} does not match "
                f"B0 = {self.B0!r}"
            )

    @property
    def head_exponent_margin(self) -> float:
        """e = 1 - p + p/a, the exponent of the head's L^p mass k^e/e."""
        return 1.0 - self.p + self.p / self.a


def build_extremizer(params: Params) -> ExtremalFunction:
    """Construct the extremizer for a feasible instance.

    Constant branch for f^p = F (g ≡ f); k = 1 branch per the module
    convention; otherwise the general two-piece construction from B0.
    """
    p, f, F, k = params.p, params.f, params.F, params.k
    if params.is_constant:
        return ExtremalFunction(p=p, f=f, F=F, k=k, a=1.0, A1=f, c=f, B0=k * f)
    if k >= 1.0:
        a = omega_p(p, params.U)
        A1 = f / a
        return ExtremalFunction(p=p, f=f, F=F, k=1.0, a=a, A1=A1, c=A1, B0=f)
    B0 = solve_b0(params)
    D = F - (f - B0) ** p / (1.0 - k) ** (p - 1.0)
    if D <= 0.0:
        raise ConsistencyError(f"nonpositive L^p headroom D = {D!r} at B0 = {B0!r}")
    Z0 = min(B0**p / (k ** (p - 1.0) * D), 1.0)
    if Z0 <= 0.0:
        raise ConsistencyError(f"Z0 = {Z0!r} must be positive (B0 = {B0!r})")
    a = omega_p(p, Z0)
    A1 = B0 * k ** (-1.0 / a) / a
    c = (f - B0) / (1.0 - k)
    return ExtremalFunction(p=p, f=f, F=F, k=k, a=a, A1=A1, c=c, B0=B0)


def _check_t(t):
    t, was_scalar = _as_array(t)
    if np.any(t <= 0.0) or np.any(t > 1.0 + DOMAIN_DUST):
        bad = t[(t <= 0.0) | (t > 1.0 + DOMAIN_DUST)]
        raise DomainError(f"t must lie in (0, 1], got {bad.ravel()[0]!r}")
    return np.minimum(t, 1.0), was_scalar


def g_eval(g: ExtremalFunction, t):
    """g(t), piecewise; t = k lands on the tail branch (equal by continuity)."""
    t, was_scalar = _check_t(t)
    head = g.A1 * t ** (-1.0 + 1.0 / g.a)
    return _maybe_scalar(np.where(t < g.k, head, g.c), was_scalar)


def moments(g: ExtremalFunction) -> tuple[float, float]:
    """(∫_0^1 g, ∫_0^1 g^p) in closed form; equals (f, F) for a built g."""
    e = g.head_exponent_margin
    L1 = g.A1 * g.a * g.k ** (1.0 / g.a) + g.c * (1.0 - g.k)
    Lp = g.A1**g.p * g.k**e / e + g.c**g.p * (1.0 - g.k)
    return float(L1), float(Lp)


def hardy_average(g: ExtremalFunction, t):
    """(1/t) ∫_0^t g. Equals a*g(t) on (0, k] and (B0 + c(t-k))/t beyond."""
    t, was_scalar = _check_t(t)
    head = g.a * g.A1 * t ** (-1.0 + 1.0 / g.a)
    tail = (g.B0 + g.c * (t - g.k)) / t
    return _maybe_scalar(np.where(t <= g.k, head, tail), was_scalar)


def hardy_functional_closed(g: ExtremalFunction) -> float:
    """∫_0^k ((1/t)∫_0^t g)^p dt = a^p A1^p k^e / e, the attained value."""
    e = g.head_exponent_margin
    return float(g.a**g.p * g.A1**g.p * g.k**e / e)


def continuity_gap(g: ExtremalFunction) -> float:
    """|A1 k^(-1+1/a) - c|; zero up to float error by construction."""
    return float(abs(g.A1 * g.k ** (-1.0 + 1.0 / g.a) - g.c))


def to_record(g: ExtremalFunction) -> dict:
    """Plain dict of the eight defining floats, for JSON/CSV round-trips."""
    return {key: getattr(g, key) for key in _RECORD_KEYS}


def from_record(record: dict) -> ExtremalFunction:
    """Inverse of to_record; validates invariants on reconstruction."""
    missing = [key for key in _RECORD_KEYS if key not in record]
    if missing:
        raise DomainError(f"extremizer record missing keys {missing}")
    return ExtremalFunction(**{key: float(record[key]) for key in _RECORD_KEYS})
