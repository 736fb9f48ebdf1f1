"""Special-function kernel: Gamma, Beta, Bessel J_nu (real order nu >= 0) and its zeros.

Bessel values on [0, 12] come from the ascending power series with an explicit
alternating-tail truncation bound; beyond that the Cephes evaluator in scipy
takes over (the series loses digits to cancellation for large arguments).
Zeros are found by walking the axis for sign changes, so the k-th zero index
is guaranteed, then polishing with Brent's method.
"""

from __future__ import annotations

import math

import numpy as np
from scipy import special as _sp
from scipy.optimize import brentq

# series is accurate to ~1e-13 absolute below this; scipy.jv above
_SERIES_CUTOFF = 12.0
_MAX_SERIES_TERMS = 80


def gamma(x):
    """Gamma function for x > 0."""
    xa = np.asarray(x, dtype=float)
    if np.any(xa <= 0):
        raise ValueError("gamma requires x > 0")
    if xa.ndim == 0:
        return math.gamma(float(xa))
    return _sp.gamma(xa)


def beta(a: float, b: float) -> float:
    """Beta function B(a, b) = Gamma(a)Gamma(b)/Gamma(a+b) for a, b > 0."""
    if a <= 0 or b <= 0:
        raise ValueError("beta requires positive arguments")
    return math.exp(math.lgamma(a) + math.lgamma(b) - math.lgamma(a + b))


def _bessel_series(nu: float, x):
    """Ascending series for J_nu, valid in double precision for x <= ~12.

    The series alternates with eventually decreasing terms; truncation stops
    once the next term is below 1e-18 in magnitude and past the growth hump,
    which bounds the omitted tail by that term.
    """
    x = np.asarray(x, dtype=float)
    half = x / 2.0
    q = half * half
    # leading coefficient (x/2)^nu / Gamma(nu+1), safe since nu >= 0, x >= 0
    with np.errstate(divide="ignore"):
        term = np.where(x > 0, np.exp(nu * np.log(np.where(x > 0, half, 1.0)) - math.lgamma(nu + 1.0)), 0.0)
    if nu == 0.0:
        term = np.where(x > 0, term, 1.0)
    total = term.copy()
    for k in range(_MAX_SERIES_TERMS):
        term = term * (-q) / ((k + 1.0) * (nu + k + 1.0))
        total += term
        if np.all(np.abs(term) < 1e-18) and k + 1 > np.max(q) ** 0.5:
            break
    return total


def bessel_j(nu: float, x):
    """Bessel function of the first kind J_nu(x) for nu >= 0, x >= 0."""
    if nu < 0:
        raise ValueError("order nu must be >= 0")
    xa = np.asarray(x, dtype=float)
    if np.any(xa < 0):
        raise ValueError("bessel_j requires x >= 0")
    scalar = xa.ndim == 0
    xa = np.atleast_1d(xa)
    out = np.empty_like(xa)
    small = xa <= _SERIES_CUTOFF
    if np.any(small):
        out[small] = _bessel_series(nu, xa[small])
    if np.any(~small):
        out[~small] = _sp.jv(nu, xa[~small])
    return float(out[0]) if scalar else out


def bessel_j_deriv(nu: float, x):
    """d/dx J_nu(x) via the recurrence J_nu' = -J_{nu+1} + (nu/x) J_nu, x > 0."""
    xa = np.asarray(x, dtype=float)
    if np.any(xa <= 0):
        raise ValueError("bessel_j_deriv requires x > 0")
    return -bessel_j(nu + 1.0, xa) + (nu / xa) * bessel_j(nu, xa)


def bessel_zero(nu: float, k: int) -> float:
    """k-th positive zero j_{nu,k} of J_nu, absolute accuracy ~1e-13.

    Walks outward from the origin in steps well below the minimal spacing of
    consecutive zeros (> 3 for all nu >= 0), so brackets cannot skip a zero,
    then refines by Brent.  Raises RuntimeError if the walk stalls.
    """
    if nu < 0:
        raise ValueError("order nu must be >= 0")
    if k < 1:
        raise ValueError("zero index k must be >= 1")
    # J_nu > 0 on (0, j_{nu,1}); start past the origin but before the first zero
    t0 = max(1e-8, 0.5 * nu)
    f0 = bessel_j(nu, t0)
    step = 1.0
    found = 0
    # first zero is below nu + 2.5*nu^(1/3) + 3 for all nu; cap the walk generously
    t_max = nu + 3.0 * (nu + 2.0) ** (1.0 / 3.0) + 4.0 + (k + 1) * math.pi + 10.0
    t = t0
    while t < t_max:
        t1 = t + step
        f1 = bessel_j(nu, t1)
        if f0 == 0.0:
            found += 1
            if found == k:
                return t
        elif f0 * f1 < 0.0:
            found += 1
            root = brentq(lambda s: bessel_j(nu, s), t, t1, xtol=1e-14, rtol=8.9e-16)
            if found == k:
                return float(root)
        t, f0 = t1, f1
    raise RuntimeError(f"bessel_zero failed to bracket zero {k} of J_{nu}; last bracket ended at {t:.6g}")


def bessel_inequality_check(nu: float, samples: int, tol: float = 1e-12):
    """Check J_nu(j_{nu+1} t)/J_nu(j_{nu+1}) <= t^nu on a uniform grid of [0, 1].

    Returns (ok, worst_margin) where worst_margin = min over the grid of
    t^nu - J_nu(j_{nu+1} t)/J_nu(j_{nu+1}); ok means worst_margin >= -tol.
    """
    if samples < 2:
        raise ValueError("need at least 2 samples")
    j1 = bessel_zero(nu + 1.0, 1)
    denom = bessel_j(nu, j1)
    t = np.linspace(0.0, 1.0, samples)
    lhs = bessel_j(nu, j1 * t) / denom
    with np.errstate(divide="ignore"):
        rhs = np.where(t > 0, t**nu, 1.0 if nu == 0 else 0.0)
    margin = rhs - lhs
    worst = float(np.min(margin))
    return worst >= -tol, worst
