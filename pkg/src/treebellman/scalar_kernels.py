"""Scalar kernels: two monotone maps and their bisection inverses.

Everything downstream rests on inverting, to near machine precision,

    H_p(z) = -(p-1) z^p + p z^(p-1)          on  [1, p/(p-1)],

which decreases strictly from H_p(1) = 1 to H_p(p/(p-1)) = 0, and

    sigma(z) = -(p-1) z^p + (p-1+k) z^(p-1)
               - U * (1 + (1-k)*((p-1)/z - p))   on  [1, 1 + k/(p-1)],

which for U in [0,1], k in (0,1] has exactly one root in that bracket.
``omega_p`` inverts H_p; ``omega_pk`` returns sigma's root. At k = 1,
sigma(z) = H_p(z) - U, so the two inverses coincide there.

Roots come from bracketed bisection only: the finder assumes nothing but a
sign change across the bracket and fails loudly (BracketError) if the
endpoints do not straddle one. An element is converged when the bracket
width is at most abs_tol + rel_tol*|z| AND the residual at the midpoint is
at most abs_tol. Endpoint short-circuits return the exact bracket endpoint
when the residual there is already below abs_tol; this is what makes
omega_p(0) = p/(p-1) and omega_p(1) = 1 exact.

Numeric caveat: H_p'(1) = 0, so near U = 1 the root is located in z only to
about sqrt(abs_tol). The residual |H_p(z) - U| is still driven to abs_tol,
and the residual is what every downstream formula consumes.

All evaluators are pure and accept scalars or numpy arrays (returning a
float for scalar input).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import BracketError, ConvergenceError, DomainError

# conditioning floor: z^(p-1) degenerates and brackets blow up as p -> 1
MIN_P_EXCESS = 1e-6

# slack for clamping arguments that are outside their domain by float dust
DOMAIN_DUST = 1e-12


@dataclass(frozen=True)
class RootConfig:
    """Tolerances for the bracketed bisection root finders."""

    abs_tol: float = 1e-12
    rel_tol: float = 4 * np.finfo(float).eps
    max_iter: int = 200

    def __post_init__(self):
        if not (self.abs_tol > 0 and np.isfinite(self.abs_tol)):
            raise DomainError(f"abs_tol must be positive, got {self.abs_tol}")
        if not (self.rel_tol >= 0 and np.isfinite(self.rel_tol)):
            raise DomainError(f"rel_tol must be nonnegative, got {self.rel_tol}")
        if self.max_iter < 1:
            raise DomainError(f"max_iter must be >= 1, got {self.max_iter}")


DEFAULT_ROOT_CONFIG = RootConfig()


def _check_p(p: float) -> float:
    p = float(p)
    if not np.isfinite(p) or p - 1.0 < MIN_P_EXCESS:
        raise DomainError(f"p must satisfy p >= 1 + {MIN_P_EXCESS:g}, got {p}")
    return p


def _as_array(x):
    """Return (float64 array, was_scalar)."""
    arr = np.asarray(x, dtype=float)
    return arr, arr.ndim == 0


def _maybe_scalar(arr, was_scalar):
    return float(arr) if was_scalar else arr


def _clamp_unit(U, label: str):
    """Clamp U into [0, 1], tolerating only DOMAIN_DUST of overshoot."""
    U, was_scalar = _as_array(U)
    if not np.all(np.isfinite(U)):
        raise DomainError(f"{label} must be finite")
    if np.any(U < -DOMAIN_DUST) or np.any(U > 1.0 + DOMAIN_DUST):
        bad = U[(U < -DOMAIN_DUST) | (U > 1.0 + DOMAIN_DUST)]
        raise DomainError(f"{label} must lie in [0, 1], got {bad.ravel()[0]!r}")
    return np.clip(U, 0.0, 1.0), was_scalar


def _hp_raw(p: float, z):
    # no domain checks; used inside bisection where z stays bracketed
    return -(p - 1.0) * z**p + p * z ** (p - 1.0)


def hp_eval(p: float, z):
    """H_p(z) = -(p-1) z^p + p z^(p-1) for z in [1, p/(p-1)].

    Strictly decreasing on the bracket with H_p(1) = 1, H_p(p/(p-1)) = 0.
    """
    p = _check_p(p)
    zmax = p / (p - 1.0)
    z, was_scalar = _as_array(z)
    if not np.all(np.isfinite(z)):
        raise DomainError("z must be finite")
    if np.any(z < 1.0 - DOMAIN_DUST) or np.any(z > zmax * (1.0 + DOMAIN_DUST)):
        bad = z[(z < 1.0 - DOMAIN_DUST) | (z > zmax * (1.0 + DOMAIN_DUST))]
        raise DomainError(
            f"z must lie in [1, p/(p-1)] = [1, {zmax!r}], got {bad.ravel()[0]!r}"
        )
    z = np.clip(z, 1.0, zmax)
    return _maybe_scalar(_hp_raw(p, z), was_scalar)


def sigma_eval(p: float, k: float, U, z):
    """sigma(z) = -(p-1) z^p + (p-1+k) z^(p-1) - U*(1 + (1-k)*((p-1)/z - p)).

    Defined for z > 0. sigma(1) = k*(1-U); at k = 1 it reduces to
    H_p(z) - U.
    """
    p = _check_p(p)
    k = _check_k(k)
    z, z_scalar = _as_array(z)
    U, u_scalar = _as_array(U)
    if not np.all(np.isfinite(z)) or np.any(z <= 0.0):
        raise DomainError("z must be positive and finite")
    val = (
        -(p - 1.0) * z**p
        + (p - 1.0 + k) * z ** (p - 1.0)
        - U * (1.0 + (1.0 - k) * ((p - 1.0) / z - p))
    )
    return _maybe_scalar(val, z_scalar and u_scalar)


def _check_k(k: float) -> float:
    k = float(k)
    if not np.isfinite(k) or k <= 0.0 or k > 1.0 + DOMAIN_DUST:
        raise DomainError(f"k must lie in (0, 1], got {k}")
    return min(k, 1.0)


def _bisect_bracketed(fn, lo, hi, config: RootConfig, label: str):
    """Vectorized bisection for fn with fn(lo) >= 0 >= fn(hi) elementwise.

    Returns the midpoint once every element satisfies both the width and
    the residual tolerance. Elements whose endpoint residual is already
    below abs_tol are short-circuited to that exact endpoint.
    """
    lo = np.array(lo, dtype=float)
    hi = np.array(hi, dtype=float)
    tol = config.abs_tol

    flo = fn(lo)
    fhi = fn(hi)
    bad = (flo < -tol) | (fhi > tol)
    if np.any(bad):
        i = np.argmax(bad)
        raise BracketError(
            f"{label}: bracket does not straddle a sign change "
            f"(f(lo)={np.ravel(flo)[i]!r}, f(hi)={np.ravel(fhi)[i]!r})"
        )

    hit_lo = np.abs(flo) <= tol
    hit_hi = np.abs(fhi) <= tol
    frozen = hit_lo | hit_hi
    frozen_val = np.where(hit_lo, lo, hi)

    mid = 0.5 * (lo + hi)
    for _ in range(config.max_iter):
        mid = 0.5 * (lo + hi)
        fmid = fn(mid)
        width_ok = (hi - lo) <= tol + config.rel_tol * np.abs(mid)
        done = frozen | (width_ok & (np.abs(fmid) <= tol))
        if np.all(done):
            break
        go_up = fmid > 0.0
        lo = np.where(go_up, mid, lo)
        hi = np.where(go_up, hi, mid)
    else:
        raise ConvergenceError(
            f"{label}: bisection did not converge in {config.max_iter} iterations"
        )
    return np.where(frozen, frozen_val, mid)


def omega_p(p: float, U, config: RootConfig = DEFAULT_ROOT_CONFIG):
    """Inverse of H_p on [1, p/(p-1)]: z with H_p(z) = U, for U in [0, 1].

    omega_p(1) = 1 and omega_p(0) = p/(p-1) exactly (endpoint
    short-circuit). Strictly decreasing in U.
    """
    p = _check_p(p)
    U, was_scalar = _clamp_unit(U, "U")
    zmax = p / (p - 1.0)
    shape = U.shape
    lo = np.full(shape, 1.0)
    hi = np.full(shape, zmax)
    # H_p - U is decreasing with (H_p - U)(1) = 1 - U >= 0 >= -U
    root = _bisect_bracketed(
        lambda z: _hp_raw(p, z) - U, lo, hi, config, "omega_p"
    )
    return _maybe_scalar(root, was_scalar)


def omega_pk(p: float, k: float, U, config: RootConfig = DEFAULT_ROOT_CONFIG):
    """Root of sigma(.; p, k, U) in [1, 1 + k/(p-1)] for U in [0, 1].

    sigma(1) = k*(1-U) >= 0 and sigma at the right endpoint is <= 0, so the
    bracket always straddles the (unique) sign change. omega_pk(p, k, 1) = 1
    and, at k = 1, omega_pk(p, 1, U) = omega_p(p, U) up to tolerance.
    """
    p = _check_p(p)
    k = _check_k(k)
    U, was_scalar = _clamp_unit(U, "U")
    zmax = 1.0 + k / (p - 1.0)
    shape = U.shape
    lo = np.full(shape, 1.0)
    hi = np.full(shape, zmax)
    root = _bisect_bracketed(
        lambda z: sigma_eval(p, k, U, z), lo, hi, config, "omega_pk"
    )
    return _maybe_scalar(root, was_scalar)
