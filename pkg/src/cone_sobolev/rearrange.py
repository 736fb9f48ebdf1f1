"""Non-increasing rearrangement onto the model cone, with energy comparison.

A radial function u(x) = g(d(x0, x)) on a ball-volume space is rearranged to
u* on (R_+, m_N) by level-set inversion: the superlevel measure mu(t) of
{g o d > t} is computed from the ball volume V, and u*(s) is the generalized
inverse satisfying omega_N s^N = mu(t).  Flat spots of g resolve through the
left-continuous inverse, matching the strict superlevel convention {u > t}.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np
from scipy.interpolate import PchipInterpolator
from scipy.optimize import brentq

from .model_cone import ModelCone
from .quadrature import Decay, QuadratureSettings, integrate

_DEFAULT_LEVELS = 2048


def _sample_radius_cap(space, g, r_hint: Optional[float]) -> float:
    if r_hint is not None and math.isfinite(r_hint):
        return r_hint
    return 50.0


def _superlevel_measure(g, level: float, space, r_cap: float, monotone: bool) -> float:
    """m({g o d > level}) from crossings of g - level on [0, r_cap]."""
    if monotone:
        if g(0.0) <= level:
            return 0.0
        if g(r_cap) > level:
            raise ValueError(f"superlevel set at level {level:g} is not contained in the sampled range")
        root = brentq(lambda t: float(g(t)) - level, 0.0, r_cap, xtol=1e-14, rtol=8.9e-16)
        return float(space.volume(root))
    grid = np.linspace(0.0, r_cap, 4097)
    vals = np.asarray(g(grid), dtype=float) - level
    total = 0.0
    open_at = None
    if vals[0] > 0:
        open_at = 0.0
    for i in range(grid.size - 1):
        if vals[i] == 0.0:
            continue
        if vals[i] * vals[i + 1] < 0:
            root = brentq(lambda t: float(g(t)) - level, grid[i], grid[i + 1], xtol=1e-14)
            if vals[i] > 0:  # closing an interval
                total += float(space.volume(root)) - float(space.volume(open_at))
                open_at = None
            else:
                open_at = root
    if open_at is not None:
        if vals[-1] > 0:
            raise ValueError("superlevel set leaves the sampled range; measure may be non-finite")
        total += float(space.volume(r_cap)) - float(space.volume(open_at))
    return total


@dataclass
class SampledProfile:
    """Carrier of a rearranged profile: exact pairs on an increasing grid.

    For monotone inputs the constructor attaches exact evaluation closures
    (through Brent inversion of the level-set identity), so values and
    superlevel radii are root-find accurate; otherwise evaluation falls back
    to monotone interpolation of the sample pairs.
    """

    grid: np.ndarray
    values: np.ndarray
    monotone_flag: bool
    tail_start: float = math.inf     # beyond this, the exact transported tail applies
    exact_value: Optional[Callable] = None
    exact_level_radius: Optional[Callable] = None
    _interp: Optional[Callable] = None

    def __post_init__(self):
        if np.any(np.diff(self.grid) <= 0):
            keep = np.concatenate([[True], np.diff(self.grid) > 1e-15])
            object.__setattr__(self, "grid", self.grid[keep])
            object.__setattr__(self, "values", self.values[keep])
        if not np.all(np.isfinite(self.values)):
            raise ValueError("non-finite rearranged values")

    def __call__(self, s):
        sa = np.asarray(s, dtype=float)
        if self.exact_value is not None:
            if sa.ndim == 0:
                return float(self.exact_value(float(sa)))
            return np.array([float(self.exact_value(float(x))) for x in sa])
        if self._interp is None:
            object.__setattr__(self, "_interp", PchipInterpolator(self.grid, self.values, extrapolate=False))
        out = np.nan_to_num(self._interp(np.clip(sa, self.grid[0], self.grid[-1])), nan=0.0)
        out = np.where(sa > self.grid[-1], 0.0, out)
        return float(out) if sa.ndim == 0 else out

    def superlevel_radius(self, level: float) -> float:
        """s with m_N({u* > level}) = omega_N s^N (left-continuous inverse)."""
        if self.exact_level_radius is not None:
            return float(self.exact_level_radius(float(level)))
        if level >= self.values[0]:
            return 0.0
        if level < self.values[-1]:
            return float(self.grid[-1])
        idx = int(np.searchsorted(-self.values, -level, side="right")) - 1
        idx = max(0, min(idx, self.grid.size - 2))
        v0, v1 = self.values[idx], self.values[idx + 1]
        if v1 == v0:
            return float(self.grid[idx + 1])
        w = (level - v0) / (v1 - v0)
        return float(self.grid[idx] + w * (self.grid[idx + 1] - self.grid[idx]))


def rearrangement(g, space, cone: Optional[ModelCone] = None, levels: int = _DEFAULT_LEVELS,
                  r_cap: Optional[float] = None, assume_monotone: Optional[bool] = None) -> SampledProfile:
    """Rearranged profile u* of the radial function g on the given space.

    g must have superlevel sets of finite measure within the sampled range
    (default [0, 50]); pass r_cap for wider profiles.  The level grid is
    logarithmic between the essential sup and a 1e-10 relative floor.
    """
    cone = cone or ModelCone(space.N)
    cap = _sample_radius_cap(space, g, r_cap)
    probe = np.linspace(0.0, cap, 2049)
    pv = np.asarray(g(probe), dtype=float)
    if np.any(pv < -1e-12):
        raise ValueError("rearrangement expects nonnegative profiles")
    monotone = bool(np.all(np.diff(pv) <= 1e-12 * max(1.0, float(pv[0])))) \
        if assume_monotone is None else assume_monotone
    sup = float(np.max(pv))
    if sup <= 0:
        raise ValueError("profile vanishes identically")
    tail_value = float(pv[-1])
    floor = max(tail_value * (1.0 + 1e-6), sup * 1e-10)
    if floor >= sup * 0.999:
        raise ValueError("profile barely varies within the sampled range; raise r_cap")
    # two-sided level grid: geometric in the gap below the essential sup
    # (resolves the flat top, where s moves fastest) and geometric in the
    # level itself (resolves the tail)
    half = max(levels // 2, 8)
    top = sup * (1.0 - np.geomspace(1e-12, 1.0 - floor / sup, half))
    bottom = np.geomspace(sup * 0.9, floor, half)
    lev = np.unique(np.concatenate([top, bottom]))[::-1]
    lev = lev[(lev < sup) & (lev >= floor)]
    ss, vs = [0.0], [sup]
    for t in lev:
        mu = _superlevel_measure(g, float(t), space, cap, monotone)
        s = (mu / cone.omega_N) ** (1.0 / cone.N)
        if s > ss[-1] + 1e-15:
            ss.append(s)
            vs.append(float(t))
    grid = np.asarray(ss)
    vals = np.asarray(vs)
    # values below the floor live past grid[-1]; callers with monotone g can
    # recover them exactly through the volume transport
    tail_start = grid[-1] if tail_value > sup * 1e-10 else math.inf
    exact_value = None
    if monotone:

        def exact_value(s, g=g, space=space, cone=cone):
            try:
                rho = transported_radius(space, cone, s)
            except ValueError:
                return 0.0
            return float(g(rho))

    def exact_radius(level, g=g, space=space, cone=cone, cap=cap, sup=sup, monotone=monotone):
        if level >= sup:
            return 0.0
        mu = _superlevel_measure(g, level, space, cap, monotone)
        return (mu / cone.omega_N) ** (1.0 / cone.N)

    return SampledProfile(grid, vals, True, tail_start=tail_start,
                          exact_value=exact_value, exact_level_radius=exact_radius)


def transported_radius(space, cone: ModelCone, s: float) -> float:
    """rho with V(rho) = omega_N s^N (inverse volume transport), s >= 0."""
    target = cone.omega_N * s**cone.N
    if target <= 0:
        return 0.0
    hi = max(1.0, s)
    while float(space.volume(hi)) < target:
        hi *= 2.0
        if hi > 1e12:
            raise ValueError("volume never reaches the target: avr may vanish")
    return brentq(lambda r: float(space.volume(r)) - target, 0.0, hi, xtol=1e-15, rtol=8.9e-16)


@dataclass
class CavalieriReport:
    lhs: float
    rhs: float
    residual: float  # relative to the larger magnitude


def cavalieri_check(g, space, F, cone: Optional[ModelCone] = None,
                    support: float = math.inf, decay: Optional[Decay] = None,
                    levels: int = _DEFAULT_LEVELS,
                    settings: Optional[QuadratureSettings] = None) -> CavalieriReport:
    """Compare int F(u) dm with int F(u*) dm_N through the sampled u*.

    g must be non-increasing.  The left side integrates F(g) against the
    space density over the full support; the right side uses the
    independently sampled rearrangement on its core range plus the exact
    volume transport on the tail, so the residual measures the fidelity of
    the level-set machinery.  F(0) must vanish when the support is infinite.
    """
    cone = cone or ModelCone(space.N)
    lhs = integrate(lambda t: float(F(float(g(t)))) * float(space.density(t)), 0.0, support,
                    settings=settings, decay=None if math.isfinite(support) else decay).value
    star = rearrangement(g, space, cone, levels=levels,
                         r_cap=support if math.isfinite(support) else None,
                         assume_monotone=True)
    smax = float(star.grid[-1])
    rhs = integrate(lambda s: float(F(star(s))) * cone.N * cone.omega_N * s ** (cone.N - 1.0),
                    0.0, smax, settings=settings).value
    if math.isfinite(star.tail_start):
        # exact transport beyond the sampled levels: u*(s) = g(rho(s)) there
        rho_tail = transported_radius(space, cone, smax)
        rhs += integrate(lambda t: float(F(float(g(t)))) * float(space.density(t)), rho_tail, support,
                         settings=settings, decay=None if math.isfinite(support) else decay).value
    scale = max(abs(lhs), abs(rhs), 1e-300)
    return CavalieriReport(lhs, rhs, abs(lhs - rhs) / scale)


@dataclass
class PolyaSzegoReport:
    lhs: float
    rhs: float
    margin: float          # lhs - rhs
    rel_margin: float      # margin / max(lhs, rhs)


def polya_szego_check(g, dg, space, p_exp: float, cone: Optional[ModelCone] = None,
                      support: float = math.inf, decay: Optional[Decay] = None,
                      settings: Optional[QuadratureSettings] = None) -> PolyaSzegoReport:
    """Rearrangement energy comparison for a non-increasing radial profile.

    lhs = int |g'|^p v(rho) drho (the radial p-energy through the unit-speed
    distance); rhs = avr^(p/N) int |(u*)'|^p dm_N, with (u*)' evaluated by the
    exact volume transport s(rho) = (V(rho)/omega_N)^(1/N):

        int |(u*)'|^p dm_N = int |g'(rho)|^p (N omega_N s(rho)^(N-1))^p
                                  v(rho)^(1-p) drho.

    margin = lhs - rhs must be nonnegative up to quadrature error; it vanishes
    on exact cones.
    """
    if p_exp <= 1.0:
        raise ValueError("p_exp must exceed 1")
    if space.avr is None or space.avr <= 0:
        raise ValueError("needs a space with positive declared avr")
    cone = cone or ModelCone(space.N)
    N = cone.N
    w = cone.omega_N

    lhs = integrate(lambda t: abs(float(dg(t))) ** p_exp * float(space.density(t)),
                    0.0, support, settings=settings, decay=decay).value

    def star_energy_density(t):
        v = float(space.density(t))
        if v <= 0.0:
            return 0.0
        s_pow = (float(space.volume(t)) / w) ** ((N - 1.0) / N)
        return abs(float(dg(t))) ** p_exp * (N * w * s_pow) ** p_exp * v ** (1.0 - p_exp)

    rhs = space.avr ** (p_exp / N) * integrate(star_energy_density, 0.0, support,
                                               settings=settings, decay=decay).value
    margin = lhs - rhs
    return PolyaSzegoReport(lhs, rhs, margin, margin / max(lhs, rhs, 1e-300))


def random_monotone_profiles(seed: int, count: int):
    """Deterministic pool of smooth non-increasing profiles with derivatives.

    Mixtures of Gaussians, inverse powers and compact parabolic caps; returns
    (label, g, dg, decay) tuples suitable for the rearrangement suites.
    """
    rng = np.random.default_rng(seed)
    out = []
    for i in range(count):
        A, B, C = rng.uniform(0.2, 2.0, size=3)
        a = rng.uniform(0.3, 3.0)
        b = rng.uniform(0.3, 3.0)
        s = rng.uniform(2.2, 5.0)
        R = rng.uniform(0.5, 3.0)

        def g(t, A=A, B=B, C=C, a=a, b=b, s=s, R=R):
            ta = np.asarray(t, dtype=float)
            cap = np.where(ta < R, (1.0 - (ta / R) ** 2) ** 3, 0.0)
            return A * np.exp(-a * ta**2) + B * (1.0 + b * ta**2) ** (-s) + C * cap

        def dg(t, A=A, B=B, C=C, a=a, b=b, s=s, R=R):
            ta = np.asarray(t, dtype=float)
            dcap = np.where(ta < R, -6.0 * ta / R**2 * (1.0 - (ta / R) ** 2) ** 2, 0.0)
            return (-2.0 * A * a * ta * np.exp(-a * ta**2)
                    - 2.0 * B * b * s * ta * (1.0 + b * ta**2) ** (-s - 1.0) + C * dcap)

        out.append((f"mix{i}", g, dg, Decay("power")))
    return out
