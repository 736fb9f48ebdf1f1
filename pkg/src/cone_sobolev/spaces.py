"""Synthetic radially symmetric metric measure spaces given by ball volumes.

A space is reduced to its ball-volume function V(r) around one basepoint:
every integral of a radial function the package needs is computed from V and
its density v = V'.  The curvature flag is a declared claim checked on a
finite grid (ratio monotonicity), not a certificate.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
from scipy.interpolate import PchipInterpolator

from .extrapolation import sequence_limit
from .model_cone import omega_ball

_AVR_SCHEDULE = (1e2, 1e3, 1e4, 1e5)


@dataclass(frozen=True)
class RadialSpace:
    N: float
    volume: Callable          # V(r), vectorized
    density: Callable         # v(r) = V'(r), vectorized
    avr: Optional[float]      # declared asymptotic volume ratio, None if undefined
    label: str = "space"
    cd_flag: bool = False
    omega_N: float = field(default=None)  # type: ignore[assignment]

    def __post_init__(self):
        if not self.N > 1.0:
            raise ValueError("space requires N > 1")
        if self.omega_N is None:
            object.__setattr__(self, "omega_N", omega_ball(self.N))

    def vol_ratio(self, r):
        """V(r) / (omega_N r^N), clamped away from r = 0."""
        ra = np.maximum(np.asarray(r, dtype=float), 1e-12)
        return self.volume(ra) / (self.omega_N * ra**self.N)

    def validate(self):
        """Construction-time invariants: V(0)=0, monotone V, declared flags."""
        r = np.geomspace(1e-3, 1e6, 400)
        V = np.asarray(self.volume(r), dtype=float)
        if abs(float(self.volume(1e-14))) > 1e-10:
            raise ValueError(f"{self.label}: V(0) != 0")
        if np.any(np.diff(V) < -1e-12 * np.maximum(V[:-1], 1e-300)):
            raise ValueError(f"{self.label}: ball volume must be non-decreasing")
        if np.any(np.asarray(self.density(r), dtype=float) < -1e-12):
            raise ValueError(f"{self.label}: density must be nonnegative")
        if self.cd_flag:
            ratio = V / r**self.N
            if np.any(np.diff(ratio) > 1e-10 * np.maximum(ratio[:-1], 1e-300)):
                raise ValueError(f"{self.label}: cd_flag claimed but V(r)/r^N is not non-increasing")
        if self.avr is not None and self.avr > 0:
            resid = [abs(self.vol_ratio(r) - self.avr) for r in _AVR_SCHEDULE]
            if not all(b <= a * 1.001 + 1e-13 for a, b in zip(resid, resid[1:])):
                raise ValueError(f"{self.label}: declared avr not approached monotonically")
        return self


def builtin_space(kind: str, **params) -> RadialSpace:
    """Construct a named space family.

    kinds: euclidean(n), cone(N, a), interpolated(N, a, b), capped(N, r0),
    oscillating(N, mid, amp).  CSV-backed tables go through from_volume_table.
    """
    if kind == "euclidean":
        n = float(params.pop("n", params.pop("N", 0)))
        _no_extra(params)
        w = omega_ball(n)
        return RadialSpace(n, lambda r: w * np.asarray(r, float) ** n,
                           lambda r: n * w * np.asarray(r, float) ** (n - 1.0),
                           avr=1.0, label=f"euclidean(n={n:g})", cd_flag=True).validate()
    if kind == "cone":
        N = float(params.pop("N"))
        a = float(params.pop("a"))
        _no_extra(params)
        if not 0 < a <= 1:
            raise ValueError("cone opening a must be in (0, 1]")
        w = omega_ball(N)
        return RadialSpace(N, lambda r: a * w * np.asarray(r, float) ** N,
                           lambda r: a * N * w * np.asarray(r, float) ** (N - 1.0),
                           avr=a, label=f"cone(N={N:g},a={a:g})", cd_flag=True).validate()
    if kind == "interpolated":
        N = float(params.pop("N"))
        a = float(params.pop("a"))
        b = float(params.pop("b"))
        _no_extra(params)
        w = omega_ball(N)

        def V(r, w=w, N=N, a=a, b=b):
            r = np.asarray(r, float)
            return w * r**N * (a + (b - a) / (1.0 + r))

        def v(r, w=w, N=N, a=a, b=b):
            r = np.asarray(r, float)
            return w * (N * r ** (N - 1.0) * (a + (b - a) / (1.0 + r)) - r**N * (b - a) / (1.0 + r) ** 2)

        return RadialSpace(N, V, v, avr=a, label=f"interpolated(N={N:g},a={a:g},b={b:g})",
                           cd_flag=bool(b >= a)).validate()
    if kind == "capped":
        N = float(params.pop("N"))
        r0 = float(params.pop("r0", 1.0))
        _no_extra(params)
        w = omega_ball(N)

        def V(r, w=w, N=N, r0=r0):
            return w * np.minimum(np.asarray(r, float), r0) ** N

        def v(r, w=w, N=N, r0=r0):
            r = np.asarray(r, float)
            return np.where(r < r0, N * w * r ** (N - 1.0), 0.0)

        return RadialSpace(N, V, v, avr=0.0, label=f"capped(N={N:g},r0={r0:g})", cd_flag=True).validate()
    if kind == "oscillating":
        N = float(params.pop("N"))
        mid = float(params.pop("mid", 0.5))
        amp = float(params.pop("amp", 0.2))
        _no_extra(params)
        w = omega_ball(N)

        def V(r, w=w, N=N):
            r = np.asarray(r, float)
            return w * r**N * (mid + amp * np.sin(np.log(np.maximum(r, 1e-300))))

        def v(r, w=w, N=N):
            r = np.asarray(r, float)
            lg = np.log(np.maximum(r, 1e-300))
            return w * r ** (N - 1.0) * (N * (mid + amp * np.sin(lg)) + amp * np.cos(lg))

        if amp * math.sqrt(1.0 + N * N) > mid * N:
            raise ValueError("oscillation too strong: volume would decrease")
        return RadialSpace(N, V, v, avr=None, label=f"oscillating(N={N:g},mid={mid:g},amp={amp:g})",
                           cd_flag=False).validate()
    raise ValueError(f"unknown space kind {kind!r}")


def _no_extra(params):
    if params:
        raise ValueError(f"unknown space parameters: {sorted(params)}")


def from_volume_table(r_samples, V_samples, N: float, avr: Optional[float] = None,
                      label: str = "user") -> RadialSpace:
    """Space backed by monotone (shape-preserving) interpolation of (r, V).

    Beyond the last sample the volume continues as an exact cone at the final
    volume ratio, so blow-downs on user data extrapolate conservatively.
    """
    r = np.asarray(r_samples, dtype=float)
    V = np.asarray(V_samples, dtype=float)
    if r.ndim != 1 or r.size < 3:
        raise ValueError("need at least 3 samples")
    if np.any(np.diff(r) <= 0):
        raise ValueError("radii must be strictly increasing")
    if np.any(np.diff(V) < 0) or V[0] < 0:
        raise ValueError("volumes must be non-decreasing and nonnegative")
    if r[0] > 1e-9:
        r = np.concatenate([[0.0], r])
        V = np.concatenate([[0.0], V])
    interp = PchipInterpolator(r, V, extrapolate=False)
    dinterp = interp.derivative()
    w = omega_ball(N)
    rmax = float(r[-1])
    tail_ratio = float(V[-1] / (w * rmax**N))

    def Vfun(x):
        x = np.asarray(x, dtype=float)
        inside = np.nan_to_num(interp(np.minimum(x, rmax)), nan=0.0)
        return np.where(x <= rmax, inside, tail_ratio * w * x**N)

    def vfun(x):
        x = np.asarray(x, dtype=float)
        inside = np.nan_to_num(dinterp(np.minimum(x, rmax)), nan=0.0)
        return np.where(x <= rmax, inside, tail_ratio * N * w * x ** (N - 1.0))

    return RadialSpace(N, Vfun, vfun, avr=avr if avr is not None else tail_ratio,
                       label=label, cd_flag=False)


def load_volume_csv(path, N: float, avr: Optional[float] = None) -> RadialSpace:
    """Two-column CSV 'r,V' with a header row."""
    rs, Vs = [], []
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        if len(header) < 2:
            raise ValueError("volume CSV needs two columns 'r,V'")
        for row in reader:
            if not row:
                continue
            rs.append(float(row[0]))
            Vs.append(float(row[1]))
    return from_volume_table(rs, Vs, N, avr=avr, label=f"csv:{path}")


@dataclass
class AvrEstimate:
    value: float
    converged: bool
    residuals: list
    ratios: list
    liminf_est: Optional[float] = None
    limsup_est: Optional[float] = None
    detail: str = ""


def estimate_avr(space: RadialSpace, radii=None) -> AvrEstimate:
    """Extrapolated volume ratio at infinity with a convergence report.

    Non-convergence (residuals failing to decay) is a report state: the
    estimate then degrades to a [liminf, limsup] bracket measured over the
    last decades of the schedule.
    """
    radii = np.asarray(radii if radii is not None else _AVR_SCHEDULE, dtype=float)
    if radii.size < 4 or np.any(np.diff(radii) <= 0):
        raise ValueError("schedule must be increasing with >= 4 points")
    ratios = [float(space.vol_ratio(r)) for r in radii]
    step = float(radii[1] / radii[0])
    lim = sequence_limit(ratios, ratio=step)
    if lim.converged:
        return AvrEstimate(lim.value, True, lim.residuals, ratios)
    dense = np.geomspace(radii[-1] / 1e3, radii[-1], 4000)
    vals = np.asarray(space.vol_ratio(dense), dtype=float)
    return AvrEstimate(lim.value, False, lim.residuals, ratios,
                       liminf_est=float(np.min(vals)), limsup_est=float(np.max(vals)),
                       detail="ratio does not converge along the schedule")


@dataclass
class IsoperimetricReport:
    worst_margin: float          # min of lhs - rhs
    worst_rel_margin: float      # min of (lhs - rhs)/lhs
    radius_at_worst: float


def isoperimetric_check(space: RadialSpace, radii=None) -> IsoperimetricReport:
    """Check v(r) >= N omega^(1/N) avr^(1/N) V(r)^((N-1)/N) at each radius.

    The left side is the Minkowski content of the metric ball boundary in the
    ball-volume model.
    """
    if space.avr is None:
        raise ValueError("isoperimetric check needs a declared avr")
    radii = np.asarray(radii if radii is not None else np.geomspace(1e-3, 1e5, 200), dtype=float)
    N = space.N
    lhs = np.asarray(space.density(radii), dtype=float)
    rhs = N * space.omega_N ** (1.0 / N) * space.avr ** (1.0 / N) \
        * np.asarray(space.volume(radii), dtype=float) ** ((N - 1.0) / N)
    margin = lhs - rhs
    rel = margin / np.maximum(lhs, 1e-300)
    i = int(np.argmin(rel))
    return IsoperimetricReport(float(np.min(margin)), float(rel[i]), float(radii[i]))
