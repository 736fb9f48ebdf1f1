"""Adaptive integration against the cone weight, with declared tail handling.

The adaptive kernel is QUADPACK (scipy.integrate.quad), driven behind the
settings surface below.  Improper integrals over [0, inf) must declare a decay
class: power-decay integrands are mapped onto (0, 1) by t = s/(1-s), while
exponential/Gaussian-class integrands are truncated at an analytically safe
tail point.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

from scipy import integrate as _si


@dataclass(frozen=True)
class QuadratureSettings:
    rel_tol: float = 1e-10
    abs_tol: float = 1e-12
    max_subdivisions: int = 5000
    tail_cut_strategy: str = "substitution"  # or "exponential_tail_bound"

    def __post_init__(self):
        if self.rel_tol <= 0 or self.abs_tol <= 0:
            raise ValueError("tolerances must be positive")
        if self.max_subdivisions < 1:
            raise ValueError("max_subdivisions must be >= 1")


DEFAULT_SETTINGS = QuadratureSettings()


@dataclass(frozen=True)
class Decay:
    """Declared tail behavior of an integrand on [a, inf).

    kind 'power' needs no parameters (handled by substitution); 'exponential'
    and 'gaussian' mean |f| <~ exp(-rate * t^kappa) up to polynomial factors.
    """

    kind: str
    rate: float = 1.0
    kappa: float = 2.0

    def __post_init__(self):
        if self.kind not in ("compact", "power", "exponential", "gaussian"):
            raise ValueError(f"unknown decay kind {self.kind!r}")
        if self.kind in ("exponential", "gaussian") and self.rate <= 0:
            raise ValueError("decay rate must be positive")


@dataclass
class IntegralResult:
    value: float
    error: float
    ok: bool
    detail: str = ""

    def __float__(self):
        return self.value


def _tail_cutoff(decay: Decay, tol: float) -> float:
    """T with exp(-rate*T^kappa) * T^60 below tol; 60 covers the polynomial
    weights (t^(N-1) and profile powers) appearing in this package."""
    kappa = decay.kappa if decay.kind == "gaussian" or decay.kind == "exponential" else 1.0
    target = -math.log(max(tol, 1e-290))
    T = max(2.0, (target / decay.rate) ** (1.0 / kappa))
    for _ in range(5):
        T = ((target + 60.0 * math.log(max(T, math.e))) / decay.rate) ** (1.0 / kappa)
    return 1.2 * T


def _quad_finite(f, a, b, settings, points):
    pts = [p for p in points if a < p < b] or None
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        val, err = _si.quad(f, a, b, epsabs=settings.abs_tol, epsrel=settings.rel_tol,
                            limit=settings.max_subdivisions, points=pts)
    notes = "; ".join(str(w.message).split("\n")[0] for w in caught)
    return val, err, notes


def integrate(
    f: Callable[[float], float],
    a: float,
    b: float,
    settings: Optional[QuadratureSettings] = None,
    decay: Optional[Decay] = None,
    breakpoints: Sequence[float] = (),
) -> IntegralResult:
    """Integral of f over (a, b) with error estimate.

    b may be inf, in which case decay must be declared so the tail transform
    is chosen soundly.  Known kinks/jumps of f can be passed as breakpoints.
    """
    settings = settings or DEFAULT_SETTINGS
    if not a >= 0 and not math.isfinite(a):
        raise ValueError("lower endpoint must be finite")
    if math.isinf(b):
        if decay is None or decay.kind == "compact":
            raise ValueError("improper integral needs a declared decay class")
        if decay.kind == "power":
            # t = a + s/(1-s) maps (0,1) onto (a, inf)
            def g(s):
                t = a + s / (1.0 - s)
                return f(t) / (1.0 - s) ** 2

            pts = [(p - a) / (1.0 + p - a) for p in breakpoints if p > a]
            val, err, notes = _quad_finite(g, 0.0, 1.0, settings, pts)
        else:
            T = _tail_cutoff(decay, min(settings.abs_tol, 1e-12) / 10.0)
            val, err, notes = _quad_finite(f, a, max(T, a + 1.0), settings, breakpoints)
    else:
        val, err, notes = _quad_finite(f, a, b, settings, breakpoints)
    if not math.isfinite(val):
        return IntegralResult(val, math.inf, False, "non-finite integral estimate")
    ok = err <= max(settings.abs_tol, settings.rel_tol * abs(val)) * 10.0 and "maximum number" not in notes
    return IntegralResult(float(val), float(err), bool(ok), notes)


def _profile_decay(profile, power: float) -> Optional[Decay]:
    """Decay class of |u|^power for a profile carrying tail metadata."""
    if profile.decay_class == "compact":
        return Decay("compact")
    if profile.decay_class == "power":
        return Decay("power")
    return Decay("gaussian", rate=power * (profile.tail_rate or 1.0), kappa=profile.tail_kappa or 2.0)


def lp_norm(profile, p_exp: float, cone, support: Optional[float] = None,
            settings: Optional[QuadratureSettings] = None) -> float:
    """Weighted norm (int |u|^p_exp dm_N)^(1/p_exp) over [0, support).

    profile is an ExtremalProfile-like object; support defaults to its
    support radius.  Raises ValueError when the declared power tail makes the
    norm divergent.
    """
    if p_exp <= 0:
        raise ValueError("p_exp must be positive")
    settings = settings or DEFAULT_SETTINGS
    R0 = profile.support_radius if support is None else support
    if math.isinf(R0) and profile.decay_class == "power" and profile.tail_power is not None:
        if p_exp * profile.tail_power - (cone.N - 1.0) <= 1.0 + 1e-12:
            raise ValueError(
                f"non-finite norm: tail exponent {p_exp * profile.tail_power:.3g} <= N={cone.N:g}")

    def f(t):
        return abs(float(profile.value(t))) ** p_exp * cone.N * cone.omega_N * t ** (cone.N - 1.0)

    res = integrate(f, 0.0, R0, settings=settings,
                    decay=_profile_decay(profile, p_exp) if math.isinf(R0) else None,
                    breakpoints=profile.breakpoints())
    if not math.isfinite(res.value) or res.value < 0:
        raise ValueError(f"non-finite norm for profile {getattr(profile, 'label', '?')}")
    return res.value ** (1.0 / p_exp)


def weighted_integral(g: Callable[[float], float], cone, R0: float,
                      decay: Optional[Decay] = None, breakpoints: Sequence[float] = (),
                      settings: Optional[QuadratureSettings] = None) -> IntegralResult:
    """int_0^R0 g(t) dm_N(t)."""
    settings = settings or DEFAULT_SETTINGS

    def f(t):
        return float(g(t)) * cone.N * cone.omega_N * t ** (cone.N - 1.0)

    return integrate(f, 0.0, R0, settings=settings, decay=decay, breakpoints=breakpoints)
