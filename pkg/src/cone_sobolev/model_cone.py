"""The weighted half-line reference cone and extremal profile machinery.

The reference space is (R_+, |.|, m_N) with m_N = N*omega_N*r^(N-1) dr and
omega_N = pi^(N/2)/Gamma(N/2+1).  Profiles are radial functions on it, carried
with analytic derivatives and tail metadata so that norms and blow-down
integrands never need numerical differentiation unless a profile genuinely
lacks a closed-form second derivative.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Callable, Optional

import numpy as np

from .specfun import gamma


def omega_ball(N: float) -> float:
    """Volume constant omega_N = pi^(N/2)/Gamma(N/2+1), N > 1."""
    return math.pi ** (N / 2.0) / gamma(N / 2.0 + 1.0)


@dataclass(frozen=True)
class ModelCone:
    """Dimension parameter N > 1 with its derived volume constant."""

    N: float
    omega_N: float = field(default=None)  # type: ignore[assignment]

    def __post_init__(self):
        if not self.N > 1.0:
            raise ValueError("model cone requires N > 1")
        if self.omega_N is None:
            object.__setattr__(self, "omega_N", omega_ball(self.N))
        else:
            if abs(self.omega_N - omega_ball(self.N)) > 1e-12 * omega_ball(self.N):
                raise ValueError("omega_N inconsistent with Gamma-function value")

    def weight(self, t):
        """Density of m_N: N*omega_N*t^(N-1)."""
        return self.N * self.omega_N * np.asarray(t, dtype=float) ** (self.N - 1.0)

    def ball_volume(self, r):
        return self.omega_N * np.asarray(r, dtype=float) ** self.N


def cone_volume(cone: ModelCone, r) -> float:
    """m_N([0, r)) = omega_N * r^N."""
    ra = np.asarray(r, dtype=float)
    if np.any(ra < 0):
        raise ValueError("radius must be >= 0")
    out = cone.omega_N * ra**cone.N
    return float(out) if ra.ndim == 0 else out


@dataclass(frozen=True)
class ExtremalProfile:
    """A radial profile with analytic derivatives and decay metadata.

    value/derivative are callables accepting floats or numpy arrays; they must
    return 0 beyond support_radius.  decay_class is one of 'compact', 'power',
    'gaussian'; tail_power gives the exponent s in u ~ t^(-s) for power decay,
    tail_rate/tail_kappa give c, kappa in u ~ exp(-c t^kappa) otherwise.
    """

    value: Callable
    derivative: Callable
    support_radius: float
    decay_class: str
    convexity_onset: Optional[float] = None
    normalization: str = ""
    second_derivative: Optional[Callable] = None
    tail_power: Optional[float] = None
    tail_rate: Optional[float] = None
    tail_kappa: Optional[float] = None
    derivative_jumps: tuple = ()
    derivative_unbounded_origin: bool = False
    label: str = "profile"

    def second_deriv(self, t):
        """Analytic second derivative, or a central difference of derivative."""
        if self.second_derivative is not None:
            return self.second_derivative(t)
        ta = np.asarray(t, dtype=float)
        h = 1e-6 * np.maximum(1.0, np.abs(ta))
        return (self.derivative(ta + h) - self.derivative(ta - h)) / (2.0 * h)

    def breakpoints(self):
        pts = set(self.derivative_jumps)
        if math.isfinite(self.support_radius):
            pts.add(self.support_radius)
        return tuple(sorted(pts))


def scale_profile(profile: ExtremalProfile, lam: float) -> ExtremalProfile:
    """u(t) -> u(t/lam); support and tail rates rescale accordingly."""
    if lam <= 0:
        raise ValueError("scale factor must be positive")
    u, du = profile.value, profile.derivative
    d2 = profile.second_derivative
    rate = None if profile.tail_rate is None else profile.tail_rate / lam ** (profile.tail_kappa or 1.0)
    return replace(
        profile,
        value=lambda t, u=u, lam=lam: u(np.asarray(t, dtype=float) / lam),
        derivative=lambda t, du=du, lam=lam: du(np.asarray(t, dtype=float) / lam) / lam,
        second_derivative=None if d2 is None else (lambda t, d2=d2, lam=lam: d2(np.asarray(t, dtype=float) / lam) / lam**2),
        support_radius=profile.support_radius * lam,
        convexity_onset=None if profile.convexity_onset is None else profile.convexity_onset * lam,
        tail_rate=rate,
        derivative_jumps=tuple(b * lam for b in profile.derivative_jumps),
        label=f"{profile.label}|scale={lam:g}",
    )


def bump(center: float, width: float):
    """C^1 compactly supported bump phi(t) = (1 - ((t-c)/w)^2)^2 on |t-c| < w."""

    def phi(t):
        x = (np.asarray(t, dtype=float) - center) / width
        inside = np.abs(x) < 1.0
        return np.where(inside, (1.0 - x**2) ** 2, 0.0)

    def dphi(t):
        x = (np.asarray(t, dtype=float) - center) / width
        inside = np.abs(x) < 1.0
        return np.where(inside, -4.0 * x * (1.0 - x**2) / width, 0.0)

    return phi, dphi


def perturb_profile(profile: ExtremalProfile, eps: float, center: float, width: float) -> ExtremalProfile:
    """Multiplicative bump perturbation u * (1 + eps*phi)."""
    u, du = profile.value, profile.derivative
    phi, dphi = bump(center, width)
    return replace(
        profile,
        value=lambda t: u(t) * (1.0 + eps * phi(t)),
        derivative=lambda t: du(t) * (1.0 + eps * phi(t)) + u(t) * eps * dphi(t),
        second_derivative=None,
        derivative_jumps=tuple(sorted(set(profile.derivative_jumps) | {center - width, center + width})),
        label=f"{profile.label}|bump(c={center:g},eps={eps:g})",
    )


@dataclass
class ClauseResult:
    name: str
    passed: bool
    applicable: bool
    detail: str = ""
    witness: Optional[float] = None


@dataclass
class AsymptoticsReport:
    passed: bool
    clauses: list

    def failed_clauses(self):
        return [c for c in self.clauses if c.applicable and not c.passed]


# evaluation radii for the vanishing-limit proxy; the first entry anchors the
# relative thresholds
_LIMIT_RADII = (10.0, 1e2, 1e3, 1e4)
_LIMIT_TOL_NORM = 1e-8   # for u^q rho^N and u^r rho^N
_LIMIT_TOL_GRAD = 1e-2   # |u'|^p rho^N decays like rho^-1 at the Sobolev endpoint


def _vanishing_clause(name, f, N):
    vals = np.array([f(r) * r**N for r in _LIMIT_RADII], dtype=float)
    mono = bool(np.all(np.diff(vals) <= 1e-15 + 1e-12 * np.abs(vals[:-1])))
    tol = _LIMIT_TOL_GRAD if name == "vanishing_grad" else _LIMIT_TOL_NORM
    small = vals[-1] <= tol * max(vals[0], 1e-300)
    witness = None
    if not mono:
        witness = _LIMIT_RADII[int(np.argmax(np.diff(vals) > 0)) + 1]
    elif not small:
        witness = _LIMIT_RADII[-1]
    return ClauseResult(name, mono and small, True,
                        f"values={list(map(float, vals))}", witness)


def _total_variation(h, lo, hi, m):
    t = np.linspace(lo, hi, m)
    vals = np.asarray(h(t), dtype=float)
    return float(np.sum(np.abs(np.diff(vals))))


def check_extremal_asymptotics(profile: ExtremalProfile, spec) -> AsymptoticsReport:
    """Numerical proxy for the extremizer integrability conditions.

    spec is any object with exponents q, p and optionally r, theta.  Checks:
    local bounded variation of |u'|^p (grid-refinement stabilization of the
    discrete total variation), convexity of u beyond the onset radius when the
    support is infinite, and the vanishing of u^q rho^N, |u'|^p rho^N and
    u^r rho^N along rho in {10, 1e2, 1e3, 1e4} (monotone decay below a relative
    threshold; 1e-8 for the norm clauses, 1e-2 for the gradient clause whose
    decay is only rho^-1 at the critical exponent).
    """
    q = float(spec.q)
    p = float(spec.p)
    theta = float(getattr(spec, "theta", 1.0) or 1.0)
    r = getattr(spec, "r", None)
    clauses = []

    R0 = profile.support_radius
    compact = math.isfinite(R0)

    # sanity: nonnegative, non-increasing, vanishing at a finite support edge
    ts = np.linspace(0.0, R0 if compact else 10.0, 2001)
    vals = np.asarray(profile.value(ts), dtype=float)
    nonneg = bool(np.all(vals >= -1e-12 * max(1.0, vals[0])))
    noninc = bool(np.all(np.diff(vals) <= 1e-10 * max(1.0, vals[0])))
    clauses.append(ClauseResult("shape", nonneg and noninc, True,
                                "nonnegative and non-increasing on sample grid"))
    if compact:
        edge = abs(float(profile.value(R0)))
        clauses.append(ClauseResult("support_edge", edge <= 1e-9 * max(1.0, vals[0]), True,
                                    f"|u(R0)|={edge:.2e}"))

    # local BV of |u'|^p via stabilization of the discrete total variation
    lo = 1e-6 if profile.derivative_unbounded_origin else 0.0
    hi = (R0 * (1.0 - 1e-9)) if compact else 20.0
    habs = lambda t: np.abs(profile.derivative(t)) ** p
    tv = [_total_variation(habs, lo, hi, m) for m in (2000, 4000, 8000)]
    stable = abs(tv[2] / tv[1] - 1.0) <= 0.01 if tv[1] > 0 else True
    clauses.append(ClauseResult("bv", stable, True, f"TV estimates={tv}"))

    if not compact:
        # convexity past the onset radius
        i0 = profile.convexity_onset
        if i0 is not None:
            pts = np.geomspace(i0 * (1.0 + 1e-6), max(10.0 * i0, i0 + 10.0), 64)
            dd = np.asarray(profile.second_deriv(pts), dtype=float)
            scale = float(np.max(np.abs(dd))) + 1e-300
            ok = bool(np.all(dd >= -1e-8 * scale))
            wit = None if ok else float(pts[int(np.argmin(dd))])
            clauses.append(ClauseResult("convexity", ok, True, f"min u''={float(np.min(dd)):.3e}", wit))
        else:
            clauses.append(ClauseResult("convexity", True, False, "no onset declared"))

        uq = lambda rho: float(np.abs(profile.value(rho))) ** q
        gp = lambda rho: float(np.abs(profile.derivative(rho))) ** p
        clauses.append(_vanishing_clause("vanishing_q", uq, spec.N))
        clauses.append(_vanishing_clause("vanishing_grad", gp, spec.N))
        if r is not None and theta < 1.0:
            ur = lambda rho: float(np.abs(profile.value(rho))) ** float(r)
            clauses.append(_vanishing_clause("vanishing_r", ur, spec.N))

    passed = all(c.passed for c in clauses if c.applicable)
    return AsymptoticsReport(passed, clauses)
