"""Inequality catalog: parameter specs, optimal constants, extremal profiles.

Families on the weighted half-line cone (R_+, m_N):

  GNS1           |u|_q <= K |u'|_p^theta |u|_r^(1-theta),  q = alpha*p, r = alpha(p-1)+1, alpha in (1, N/(N-p)]
  GNS2           same shape with q = alpha(p-1)+1, r = alpha*p, 0 < alpha < 1
  SOBOLEV        GNS1 at the boundary alpha = N/(N-p) (theta = 1)
  NASH           |u|_2 <= K |u'|_2^(N/(N+2)) |u|_1^(2/(N+2))
  LOG_SOBOLEV    entropy form: int u^p log u^p dm <= (N/p) log(K |u'|_p^p), |u|_p = 1
  MORREY         sup|u| <= K |u'|_p m(supp u)^(1/N - 1/p),  p > N
  FABER_KRAHN_1  |u|_1 <= K |u'|_p m(supp u)^(1 - 1/p*)
  FABER_KRAHN_2  |u|_p <= K |u'|_p m(supp u)^(1/N)
  MOSER_TRUDINGER critical exponential integrability, integer n >= 2
  CKN            singular-weight interpolation with weights (alpha, beta, gamma)
  HPW            uncertainty principle |u|_2 <= K |u'|_2^(1/2) |t u|_2^(1/2)
  HARDY          |u/t|_p <= K |u'|_p, 1 < p < N (supremum not attained)
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from enum import Enum
from typing import Optional, Sequence

import numpy as np

from . import specfun
from .model_cone import (ModelCone, ExtremalProfile, omega_ball,
                         perturb_profile, scale_profile)
from .quadrature import (Decay, QuadratureSettings, integrate, lp_norm,
                         weighted_integral)

TIGHT = QuadratureSettings(rel_tol=1e-12, abs_tol=1e-14)


class Family(str, Enum):
    GNS1 = "GNS1"
    GNS2 = "GNS2"
    SOBOLEV = "SOBOLEV"
    NASH = "NASH"
    LOG_SOBOLEV = "LOG_SOBOLEV"
    MORREY = "MORREY"
    FABER_KRAHN_1 = "FABER_KRAHN_1"
    FABER_KRAHN_2 = "FABER_KRAHN_2"
    MOSER_TRUDINGER = "MOSER_TRUDINGER"
    CKN = "CKN"
    HPW = "HPW"
    HARDY = "HARDY"


SUPPORT_MEASURE_FAMILIES = {Family.MORREY, Family.FABER_KRAHN_1, Family.FABER_KRAHN_2}
GNS_LIKE_FAMILIES = {Family.GNS1, Family.GNS2, Family.SOBOLEV, Family.NASH}


@dataclass(frozen=True)
class InequalitySpec:
    family: Family
    N: float
    p: float
    q: Optional[float] = None
    r: Optional[float] = None
    theta: Optional[float] = None
    alpha_gns: Optional[float] = None
    ckn_alpha: float = 0.0
    ckn_beta: float = 0.0
    ckn_gamma: float = 0.0
    support_exponent: Optional[float] = None
    notes: str = ""
    balance_residual: float = 0.0

    @property
    def cone(self) -> ModelCone:
        return ModelCone(self.N)

    @property
    def n(self) -> int:
        return int(round(self.N))

    @property
    def bound_exponent(self) -> Optional[float]:
        """Exponent E in the volume-growth bound avr >= (K/C)^E, None if degenerate.

        For MOSER_TRUDINGER the bound direction is inverted (avr >= (C/K)^(n-1));
        callers treat the family separately.
        """
        if self.family == Family.LOG_SOBOLEV:
            return self.N / self.p
        if self.family == Family.MOSER_TRUDINGER:
            return float(self.n - 1)
        if self.family in (Family.CKN, Family.HPW, Family.HARDY):
            D = (1.0 - (self.theta or 1.0)) * self.ckn_gamma \
                + (self.theta or 1.0) * (1.0 + self.ckn_beta) - self.ckn_alpha
            return None if abs(D) <= 1e-12 else self.N / D
        return self.N / self.theta


def _balance_residual_gns(q, p, r, theta, N):
    return 1.0 / q - theta * (1.0 / p - 1.0 / N) - (1.0 - theta) / r


def _balance_residual_ckn(q, p, r, theta, N, a, b, g):
    return (1.0 / q - a / N) - theta * (1.0 / p - (1.0 + b) / N) - (1.0 - theta) * (1.0 / r - g / N)


def make_spec(family, **params) -> InequalitySpec:
    """Build a validated spec with all derived exponents filled.

    Raises ValueError naming the violated constraint; the balance residual of
    the constructed spec is guaranteed <= 1e-12.
    """
    family = Family(family)
    N = float(params.pop("N", params.pop("n", 0.0)))
    notes = str(params.pop("notes", ""))

    if family in (Family.GNS1, Family.SOBOLEV):
        p = float(params.pop("p"))
        alpha = float(params_alpha(params, family)) if family == Family.GNS1 else None
        _done(params, family)
        if not (1.0 < p < N):
            raise ValueError("GNS1/SOBOLEV require 1 < p < N")
        pstar = p * N / (N - p)
        if family == Family.SOBOLEV:
            alpha = N / (N - p)
        elif not (1.0 < alpha <= N / (N - p) + 1e-12):
            raise ValueError("GNS1 requires alpha in (1, N/(N-p)]")
        q = alpha * p
        r = alpha * (p - 1.0) + 1.0
        theta = pstar * (alpha - 1.0) / (alpha * p * (pstar - alpha * p + alpha - 1.0))
        resid = _balance_residual_gns(q, p, r, theta, N)
        _check_balance(resid)
        return InequalitySpec(family, N, p, q, r, theta, alpha_gns=alpha,
                              notes=notes, balance_residual=resid)

    if family == Family.GNS2:
        alpha = float(params_alpha(params, family))
        p = float(params.pop("p"))
        _done(params, family)
        if not (1.0 < p < N):
            raise ValueError("GNS2 requires 1 < p < N")
        if not (0.0 < alpha < 1.0):
            raise ValueError("GNS2 requires 0 < alpha < 1")
        pstar = p * N / (N - p)
        q = alpha * (p - 1.0) + 1.0
        r = alpha * p
        theta = pstar * (1.0 - alpha) / ((pstar - alpha * p) * (alpha * p + 1.0 - alpha))
        resid = _balance_residual_gns(q, p, r, theta, N)
        _check_balance(resid)
        return InequalitySpec(family, N, p, q, r, theta, alpha_gns=alpha,
                              notes=notes, balance_residual=resid)

    if family == Family.NASH:
        _done(params, family)
        if not N > 1.0:
            raise ValueError("NASH requires N > 1")
        theta = N / (N + 2.0)
        resid = _balance_residual_gns(2.0, 2.0, 1.0, theta, N)
        _check_balance(resid)
        return InequalitySpec(family, N, 2.0, 2.0, 1.0, theta, notes=notes, balance_residual=resid)

    if family == Family.LOG_SOBOLEV:
        p = float(params.pop("p"))
        _done(params, family)
        if not (p > 1.0 and N > 1.0):
            raise ValueError("LOG_SOBOLEV requires p, N > 1")
        return InequalitySpec(family, N, p, q=p, r=None, theta=None, notes=notes)

    if family == Family.MORREY:
        p = float(params.pop("p"))
        _done(params, family)
        if not p > N:
            raise ValueError("MORREY requires p > N")
        return InequalitySpec(family, N, p, q=math.inf, r=None, theta=1.0,
                              support_exponent=1.0 / N - 1.0 / p, notes=notes)

    if family == Family.FABER_KRAHN_1:
        p = float(params.pop("p"))
        _done(params, family)
        if not (1.0 < p < N):
            raise ValueError("FABER_KRAHN_1 requires 1 < p < N")
        pstar = p * N / (N - p)
        return InequalitySpec(family, N, p, q=1.0, r=None, theta=1.0,
                              support_exponent=1.0 - 1.0 / pstar, notes=notes)

    if family == Family.FABER_KRAHN_2:
        p = float(params.pop("p"))
        _done(params, family)
        if not (1.0 < p < N):
            raise ValueError("FABER_KRAHN_2 requires 1 < p < N")
        return InequalitySpec(family, N, p, q=p, r=None, theta=1.0,
                              support_exponent=1.0 / N, notes=notes)

    if family == Family.MOSER_TRUDINGER:
        _done(params, family)
        n = int(round(N))
        if n < 2 or abs(N - n) > 1e-12:
            raise ValueError("MOSER_TRUDINGER requires integer n >= 2")
        return InequalitySpec(family, float(n), float(n), q=None, r=None, theta=None, notes=notes)

    if family == Family.HPW:
        _done(params, family)
        if not N > 1.0:
            raise ValueError("HPW requires N > 1")
        resid = _balance_residual_ckn(2.0, 2.0, 2.0, 0.5, N, 0.0, 0.0, -1.0)
        _check_balance(resid)
        return InequalitySpec(family, N, 2.0, 2.0, 2.0, 0.5, ckn_gamma=-1.0,
                              notes=notes, balance_residual=resid)

    if family == Family.HARDY:
        p = float(params.pop("p"))
        _done(params, family)
        if not (1.0 < p < N):
            raise ValueError("HARDY requires 1 < p < N")
        resid = _balance_residual_ckn(p, p, p, 1.0, N, 1.0, 0.0, 0.0)
        _check_balance(resid)
        return InequalitySpec(family, N, p, q=p, r=p, theta=1.0, ckn_alpha=1.0,
                              notes=notes, balance_residual=resid)

    if family == Family.CKN:
        p = float(params.pop("p"))
        q = float(params.pop("q"))
        r = float(params.pop("r"))
        theta = float(params.pop("theta"))
        a = float(params.pop("alpha", params.pop("ckn_alpha", 0.0)))
        b = float(params.pop("beta", params.pop("ckn_beta", 0.0)))
        g = float(params.pop("gamma", params.pop("ckn_gamma", 0.0)))
        _done(params, family)
        if not (p > 1.0 and N > 1.0 and q > 0 and r > 0 and 0.0 < theta <= 1.0):
            raise ValueError("CKN requires p, N > 1, q, r > 0, theta in (0, 1]")
        resid = _balance_residual_ckn(q, p, r, theta, N, a, b, g)
        _check_balance(resid)
        return InequalitySpec(family, N, p, q, r, theta, ckn_alpha=a, ckn_beta=b,
                              ckn_gamma=g, notes=notes, balance_residual=resid)

    raise ValueError(f"unhandled family {family}")


def params_alpha(params, family):
    if "alpha" not in params:
        raise ValueError(f"{family.value} requires an interpolation parameter alpha")
    return params.pop("alpha")


def _done(params, family):
    if params:
        raise ValueError(f"unknown parameters for {family.value}: {sorted(params)}")


def _check_balance(resid):
    if abs(resid) > 1e-12:
        raise ValueError(f"balance condition violated, residual {resid:.3e}")


@dataclass
class ConstantResult:
    value: float
    provenance: str  # closed_form | quadrature_of_extremizer | shooting | critical_exponent
    components: dict = field(default_factory=dict)


def _gns1_constant(alpha, p, N):
    pp = p / (p - 1.0)
    pstar = p * N / (N - p)
    theta = pstar * (alpha - 1.0) / (alpha * p * (pstar - alpha * p + alpha - 1.0))
    A = (alpha * (p - 1.0) + 1.0) / (alpha - 1.0)
    w = omega_ball(N)
    value = ((alpha - 1.0) / pp) ** theta \
        * ((pp / N) ** (theta / p + theta / N)
           * (A - N / pp) ** (1.0 / (alpha * p))
           * A ** (theta / p - 1.0 / (alpha * p))) \
        / (w * specfun.beta(A - N / pp, N / pp)) ** (theta / N)
    return value, {"theta": theta, "beta_a": A - N / pp, "beta_b": N / pp}


def nash_constant(N: float) -> float:
    j = specfun.bessel_zero(N / 2.0, 1)
    return ((N + 2.0) / 2.0) ** 0.5 * omega_ball(N) ** (-1.0 / (N + 2.0)) \
        * ((N / 2.0) * j * j) ** (-N / (2.0 * (N + 2.0)))


def log_sobolev_constant(p: float, N: float) -> float:
    pp = p / (p - 1.0)
    return (p / N) * ((p - 1.0) / math.e) ** (p - 1.0) \
        * (omega_ball(N) * specfun.gamma(N / pp + 1.0)) ** (-p / N)


def mt_critical_exponent(n: int) -> float:
    sigma = n * omega_ball(n)  # surface area of the unit ball boundary
    return n * sigma ** (1.0 / (n - 1.0))


def optimal_constant(spec: InequalitySpec, shooting_tol: float = 1e-10) -> ConstantResult:
    """Optimal constant of the family on the model cone."""
    N, p = spec.N, spec.p
    w = omega_ball(N)
    fam = spec.family
    if fam in (Family.GNS1, Family.SOBOLEV):
        value, comps = _gns1_constant(spec.alpha_gns, p, N)
        return ConstantResult(value, "closed_form", comps)
    if fam == Family.GNS2:
        prof = extremizer(spec)
        value, comps = _gns_quotient(spec, prof, settings=TIGHT)
        return ConstantResult(value, "quadrature_of_extremizer", comps)
    if fam == Family.NASH:
        j = specfun.bessel_zero(N / 2.0, 1)
        return ConstantResult(nash_constant(N), "closed_form", {"first_zero": j})
    if fam == Family.LOG_SOBOLEV:
        return ConstantResult(log_sobolev_constant(p, N), "closed_form", {})
    if fam == Family.MORREY:
        pp = p / (p - 1.0)
        value = N ** (-1.0 / p) * w ** (-1.0 / N) * ((p - 1.0) / (p - N)) ** (1.0 / pp)
        return ConstantResult(value, "closed_form", {})
    if fam == Family.FABER_KRAHN_1:
        pp = p / (p - 1.0)
        value = N ** (-1.0 / p) * w ** (-1.0 / N) * (pp + N) ** (-1.0 / pp)
        return ConstantResult(value, "closed_form", {})
    if fam == Family.FABER_KRAHN_2:
        if abs(p - 2.0) < 1e-14:
            nu = N / 2.0 - 1.0
            jnu = specfun.bessel_zero(nu, 1)
            return ConstantResult((jnu * w ** (1.0 / N)) ** (-1.0), "closed_form", {"first_zero": jnu})
        res = faber_krahn_shooting(p, N, tolerance=shooting_tol)
        return ConstantResult(res.k_opt, "shooting", {"eigenvalue": res.eigenvalue})
    if fam == Family.MOSER_TRUDINGER:
        return ConstantResult(mt_critical_exponent(spec.n), "critical_exponent", {})
    if fam == Family.HPW:
        return ConstantResult(math.sqrt(2.0 / N), "closed_form", {})
    if fam == Family.HARDY:
        return ConstantResult(p / (N - p), "closed_form", {})
    raise ValueError(f"no optimal constant available for {fam.value}")


def cd_constant(spec: InequalitySpec, avr: float) -> float:
    """Sharp constant on a space of asymptotic volume ratio avr in (0, 1]."""
    if not 0.0 < avr <= 1.0:
        raise ValueError("avr must lie in (0, 1]")
    k = optimal_constant(spec).value
    if spec.family == Family.MOSER_TRUDINGER:
        return avr ** (1.0 / (spec.n - 1.0)) * k
    if spec.family == Family.LOG_SOBOLEV:
        return avr ** (-spec.p / spec.N) * k
    theta = spec.theta if spec.theta is not None else 1.0
    return avr ** (-theta / spec.N) * k


# ---------------------------------------------------------------------------
# extremal profiles


def _bessel_scaled(mu: float, x):
    """x^(-mu) J_mu(x), stable at x = 0 via the ascending series."""
    xa = np.atleast_1d(np.asarray(x, dtype=float))
    out = np.empty_like(xa)
    small = xa < 0.5
    if np.any(small):
        xs = xa[small]
        acc = np.zeros_like(xs)
        for kk in range(8):
            acc += (-1.0) ** kk * xs ** (2 * kk) / (2.0 ** (mu + 2 * kk)
                                                    * math.factorial(kk) * specfun.gamma(mu + kk + 1.0))
        out[small] = acc
    if np.any(~small):
        xl = xa[~small]
        out[~small] = xl ** (-mu) * specfun.bessel_j(mu, xl)
    return out if np.asarray(x).ndim else float(out[0])


def _supported(fn, R0):
    """Clamp a profile formula to zero outside [0, R0]."""

    def wrapped(t):
        ta = np.asarray(t, dtype=float)
        inside = ta < R0
        safe = np.where(inside, ta, 0.0)
        return np.where(inside, fn(safe), 0.0) if ta.ndim else (float(fn(ta)) if ta < R0 else 0.0)

    return wrapped


def barenblatt_profile(alpha: float, p: float, N: float) -> ExtremalProfile:
    """(1 + t^(p'))^(1/(1-alpha)) with analytic first and second derivatives."""
    pp = p / (p - 1.0)
    m = 1.0 / (1.0 - alpha)

    def u(t):
        return (1.0 + np.asarray(t, float) ** pp) ** m

    def du(t):
        ta = np.asarray(t, float)
        return m * pp * ta ** (pp - 1.0) * (1.0 + ta**pp) ** (m - 1.0)

    def d2u(t):
        ta = np.asarray(t, float)
        s = ta**pp
        return m * pp * (1.0 + s) ** (m - 2.0) * (
            (pp - 1.0) * ta ** (pp - 2.0) * (1.0 + s) + pp * (m - 1.0) * ta ** (2.0 * pp - 2.0))

    i0 = ((alpha - 1.0) / (alpha * (p - 1.0) + 1.0)) ** (1.0 / pp)
    return ExtremalProfile(u, du, math.inf, "power", convexity_onset=i0,
                           second_derivative=d2u, tail_power=pp / (alpha - 1.0),
                           label=f"barenblatt(alpha={alpha:g},p={p:g})",
                           normalization="unit value at origin")


def compact_barenblatt_profile(alpha: float, p: float) -> ExtremalProfile:
    """(1 - t^(p'))_+^(1/(1-alpha)) on [0, 1], 0 < alpha < 1."""
    pp = p / (p - 1.0)
    m = 1.0 / (1.0 - alpha)

    u = _supported(lambda t: (1.0 - np.asarray(t, float) ** pp) ** m, 1.0)
    du = _supported(lambda t: -m * pp * np.asarray(t, float) ** (pp - 1.0)
                    * (1.0 - np.asarray(t, float) ** pp) ** (m - 1.0), 1.0)

    def _d2(t):
        ta = np.asarray(t, float)
        s = ta**pp
        return -m * pp * (1.0 - s) ** (m - 2.0) * (
            (pp - 1.0) * ta ** (pp - 2.0) * (1.0 - s) - pp * (m - 1.0) * ta ** (2.0 * pp - 2.0))

    return ExtremalProfile(u, du, 1.0, "compact", second_derivative=_supported(_d2, 1.0),
                           label=f"compact_barenblatt(alpha={alpha:g},p={p:g})")


def faber_krahn_1_profile(p: float) -> ExtremalProfile:
    pp = p / (p - 1.0)
    u = _supported(lambda t: 1.0 - np.asarray(t, float) ** pp, 1.0)
    du = _supported(lambda t: -pp * np.asarray(t, float) ** (pp - 1.0), 1.0)
    d2 = _supported(lambda t: -pp * (pp - 1.0) * np.asarray(t, float) ** (pp - 2.0), 1.0)
    return ExtremalProfile(u, du, 1.0, "compact", second_derivative=d2,
                           label=f"faber_krahn_1(p={p:g})")


def morrey_profile(p: float, N: float) -> ExtremalProfile:
    kappa = (p - N) / (p - 1.0)
    u = _supported(lambda t: 1.0 - np.asarray(t, float) ** kappa, 1.0)
    du = _supported(lambda t: -kappa * np.asarray(t, float) ** (kappa - 1.0), 1.0)
    d2 = _supported(lambda t: -kappa * (kappa - 1.0) * np.asarray(t, float) ** (kappa - 2.0), 1.0)
    return ExtremalProfile(u, du, 1.0, "compact", second_derivative=d2,
                           derivative_unbounded_origin=kappa < 1.0,
                           label=f"morrey(p={p:g},N={N:g})")


def nash_profile(N: float) -> ExtremalProfile:
    """1 - t^(-nu) J_nu(j_(nu+1) t)/J_nu(j_(nu+1)) on [0, 1], nu = N/2 - 1.

    Evaluated through x^(-mu) J_mu(x), which is smooth at the origin; the
    derivatives use d/dx [x^(-mu) J_mu(x)] = -x^(-mu) J_(mu+1)(x).
    """
    nu = N / 2.0 - 1.0
    j = specfun.bessel_zero(nu + 1.0, 1)
    D = specfun.bessel_j(nu, j)  # negative by interlacing

    u = _supported(lambda t: 1.0 - (j**nu / D) * _bessel_scaled(nu, j * np.asarray(t, float)), 1.0)
    du = _supported(lambda t: (j ** (nu + 2.0) / D) * np.asarray(t, float)
                    * _bessel_scaled(nu + 1.0, j * np.asarray(t, float)), 1.0)

    def d2u(t):
        x = j * np.asarray(t, float)
        # d/dx [x^(-nu) J_(nu+1)(x)] = x^-(nu+1) J_(nu+1)(x) - x^(-nu) J_(nu+2)(x)
        inner = _bessel_scaled(nu + 1.0, x) - x * x * _bessel_scaled(nu + 2.0, x)
        return (j ** (nu + 2.0) / D) * inner

    return ExtremalProfile(u, du, 1.0, "compact", second_derivative=_supported(d2u, 1.0),
                           label=f"nash(N={N:g})", normalization="value 1 at origin")


def gaussian_profile(p: float, N: float) -> ExtremalProfile:
    """Normalized Gaussian-type profile c_N exp(-t^(p')/p) with |u|_p = 1."""
    pp = p / (p - 1.0)
    c = (omega_ball(N) * specfun.gamma(N / pp + 1.0)) ** (-1.0 / p)

    def u(t):
        return c * np.exp(-np.asarray(t, float) ** pp / p)

    def du(t):
        ta = np.asarray(t, float)
        return -c * (pp / p) * ta ** (pp - 1.0) * np.exp(-ta**pp / p)

    def d2u(t):
        ta = np.asarray(t, float)
        return -c * (pp / p) * np.exp(-ta**pp / p) * (
            (pp - 1.0) * ta ** (pp - 2.0) - (pp / p) * ta ** (2.0 * pp - 2.0))

    return ExtremalProfile(u, du, math.inf, "gaussian", convexity_onset=1.0,
                           second_derivative=d2u, tail_rate=1.0 / p, tail_kappa=pp,
                           label=f"gaussian(p={p:g},N={N:g})", normalization="unit p-norm")


def hpw_profile() -> ExtremalProfile:
    u = lambda t: np.exp(-np.asarray(t, float) ** 2)
    du = lambda t: -2.0 * np.asarray(t, float) * np.exp(-np.asarray(t, float) ** 2)
    d2u = lambda t: (4.0 * np.asarray(t, float) ** 2 - 2.0) * np.exp(-np.asarray(t, float) ** 2)
    return ExtremalProfile(u, du, math.inf, "gaussian", convexity_onset=2.0 ** -0.5,
                           second_derivative=d2u, tail_rate=1.0, tail_kappa=2.0, label="hpw_gaussian")


def faber_krahn_2_profile(p: float, N: float, tolerance: float = 1e-10) -> ExtremalProfile:
    nu = N / 2.0 - 1.0
    if abs(p - 2.0) < 1e-14:
        jnu = specfun.bessel_zero(nu, 1)
        c = specfun.gamma(nu + 1.0) * 2.0**nu

        u = _supported(lambda t: c * _bessel_scaled(nu, jnu * np.asarray(t, float)), 1.0)
        du = _supported(lambda t: -c * jnu * jnu * np.asarray(t, float)
                        * _bessel_scaled(nu + 1.0, jnu * np.asarray(t, float)), 1.0)

        def d2u(t):
            x = jnu * np.asarray(t, float)
            return -c * jnu * jnu * (_bessel_scaled(nu + 1.0, x) - x * x * _bessel_scaled(nu + 2.0, x)) * 1.0

        return ExtremalProfile(u, du, 1.0, "compact", second_derivative=_supported(d2u, 1.0),
                               label=f"faber_krahn_2(p=2,N={N:g})", normalization="value 1 at origin")
    res = faber_krahn_shooting(p, N, tolerance=tolerance)
    return res.profile


def extremizer(spec: InequalitySpec, k: int = 2) -> ExtremalProfile:
    """Extremal profile of the family (the Moser function w_k for MOSER_TRUDINGER)."""
    fam = spec.family
    if fam in (Family.GNS1, Family.SOBOLEV):
        return barenblatt_profile(spec.alpha_gns, spec.p, spec.N)
    if fam == Family.GNS2:
        return compact_barenblatt_profile(spec.alpha_gns, spec.p)
    if fam == Family.FABER_KRAHN_1:
        return faber_krahn_1_profile(spec.p)
    if fam == Family.MORREY:
        return morrey_profile(spec.p, spec.N)
    if fam == Family.NASH:
        return nash_profile(spec.N)
    if fam == Family.LOG_SOBOLEV:
        return gaussian_profile(spec.p, spec.N)
    if fam == Family.HPW:
        return hpw_profile()
    if fam == Family.FABER_KRAHN_2:
        return faber_krahn_2_profile(spec.p, spec.N)
    if fam == Family.MOSER_TRUDINGER:
        return moser_function(spec.n, k)
    if fam == Family.HARDY:
        raise ValueError("HARDY admits no extremal function; use hardy_sweep")
    raise ValueError(f"no extremizer constructor for {fam.value}")


# ---------------------------------------------------------------------------
# functionals


def _gns_quotient(spec, profile, settings=None):
    cone = spec.cone
    nq = lp_norm(profile, spec.q, cone, settings=settings)
    gp = _grad_norm(profile, spec.p, cone, settings=settings)
    if gp == 0.0:
        raise ValueError("zero denominator: derivative vanishes identically")
    comps = {"num": nq, "grad": gp}
    if spec.theta is not None and spec.theta < 1.0:
        nr = lp_norm(profile, spec.r, cone, settings=settings)
        comps["low"] = nr
        return nq / (gp**spec.theta * nr ** (1.0 - spec.theta)), comps
    return nq / gp ** (spec.theta or 1.0), comps


class _DerivView:
    """Adapter exposing |u'| as the profile value for norm evaluation."""

    def __init__(self, profile, power_hint=1.0):
        self._p = profile
        self.support_radius = profile.support_radius
        self.decay_class = profile.decay_class
        self.tail_power = None if profile.tail_power is None else profile.tail_power + 1.0
        self.tail_rate = profile.tail_rate
        self.tail_kappa = profile.tail_kappa
        self.label = profile.label + "|deriv"

    def value(self, t):
        return np.abs(self._p.derivative(t))

    def breakpoints(self):
        return self._p.breakpoints()


def _grad_norm(profile, p, cone, settings=None):
    return lp_norm(_DerivView(profile), p, cone, settings=settings)


def _sup_norm(profile):
    ts = np.linspace(0.0, min(profile.support_radius, 50.0), 20001)
    return float(np.max(np.abs(np.asarray(profile.value(ts), dtype=float))))


def _support_measure(profile, cone):
    R0 = profile.support_radius
    if not math.isfinite(R0):
        raise ValueError("support-measure families need compactly supported candidates")
    return cone.omega_N * R0**cone.N


def entropy_defect(spec: InequalitySpec, profile, settings=None) -> float:
    """Log-Sobolev defect (N/p) log(K |u'|_p^p) - int u^p log u^p dm, |u|_p = 1.

    Nonnegative iff the entropy inequality holds for the profile; zero at the
    Gaussian extremizer.
    """
    cone, p, N = spec.cone, spec.p, spec.N
    L = log_sobolev_constant(p, N)
    npn = lp_norm(profile, p, cone, settings=settings)
    scale = npn**p

    def xlogx(t):
        x = abs(float(profile.value(t))) ** p / scale
        return x * math.log(x) if x > 0.0 else 0.0

    decay = None
    if math.isinf(profile.support_radius):
        decay = Decay("gaussian", rate=(profile.tail_rate or 1.0), kappa=profile.tail_kappa or 2.0) \
            if profile.decay_class == "gaussian" else Decay("power")
    ent = weighted_integral(xlogx, cone, profile.support_radius, decay=decay,
                            breakpoints=profile.breakpoints(), settings=settings).value
    gp = _grad_norm(profile, p, cone, settings=settings) / npn
    return (N / p) * math.log(L * gp**p) - ent


def quotient(spec: InequalitySpec, profile, settings=None) -> float:
    """Family-appropriate dimensionless functional of a profile.

    For GNS-like families this is the norm quotient whose supremum is the
    optimal constant; for LOG_SOBOLEV it is the entropy defect (>= 0 iff the
    inequality holds); support-measure families weigh in m_N([0, R0)).
    """
    fam = spec.family
    cone = spec.cone
    if fam in GNS_LIKE_FAMILIES:
        return _gns_quotient(spec, profile, settings=settings)[0]
    if fam == Family.LOG_SOBOLEV:
        return entropy_defect(spec, profile, settings=settings)
    if fam == Family.FABER_KRAHN_1:
        n1 = lp_norm(profile, 1.0, cone, settings=settings)
        gp = _grad_norm(profile, spec.p, cone, settings=settings)
        return n1 / (gp * _support_measure(profile, cone) ** spec.support_exponent)
    if fam == Family.FABER_KRAHN_2:
        npn = lp_norm(profile, spec.p, cone, settings=settings)
        gp = _grad_norm(profile, spec.p, cone, settings=settings)
        return npn / (gp * _support_measure(profile, cone) ** spec.support_exponent)
    if fam == Family.MORREY:
        gp = _grad_norm(profile, spec.p, cone, settings=settings)
        return _sup_norm(profile) / (gp * _support_measure(profile, cone) ** spec.support_exponent)
    if fam == Family.HPW:
        n2 = lp_norm(profile, 2.0, cone, settings=settings)
        g2 = _grad_norm(profile, 2.0, cone, settings=settings)
        decay = Decay("gaussian", rate=2.0 * (profile.tail_rate or 1.0), kappa=profile.tail_kappa or 2.0) \
            if math.isinf(profile.support_radius) else None
        m2 = weighted_integral(lambda t: t * t * float(profile.value(t)) ** 2, cone,
                               profile.support_radius, decay=decay, settings=settings).value ** 0.5
        if g2 == 0.0 or m2 == 0.0:
            raise ValueError("zero denominator in uncertainty quotient")
        return n2 / (g2**0.5 * m2**0.5)
    if fam == Family.HARDY:
        return hardy_quotient(spec.p, spec.N, profile, settings=settings)
    raise ValueError(f"no pointwise quotient for {fam.value}; "
                     "use mt_functional for MOSER_TRUDINGER")


def hardy_quotient(p: float, N: float, profile, settings=None) -> float:
    cone = ModelCone(N)
    num = weighted_integral(lambda t: (abs(float(profile.value(t))) / t) ** p if t > 0 else 0.0,
                            cone, profile.support_radius,
                            breakpoints=profile.breakpoints(), settings=settings).value ** (1.0 / p)
    gp = _grad_norm(profile, p, cone, settings=settings)
    if gp == 0.0:
        raise ValueError("zero denominator in Hardy quotient")
    return num / gp


# ---------------------------------------------------------------------------
# sweeps


@dataclass
class SweepEntry:
    label: str
    value: float


@dataclass
class SweepReport:
    family: str
    k_opt: float
    entries: list
    best_label: str
    best_value: float
    ok: bool
    detail: str = ""


def default_candidates(spec: InequalitySpec, profile=None):
    """Extremizer, its rescalings, and deterministic bump perturbations."""
    base = profile if profile is not None else extremizer(spec)
    S = min(base.support_radius, 5.0)
    cands = [base]
    for lam in (0.5, 2.0):
        cands.append(scale_profile(base, lam))
    width = 0.15 * S
    for frac in (0.25, 0.5, 0.75):
        for eps in (0.1, -0.1, 0.01, -0.01):
            cands.append(perturb_profile(base, eps, frac * S, width))
    return cands


def _max_workers():
    raw = os.environ.get("CONE_SOBOLEV_THREADS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def sharpness_sweep(spec: InequalitySpec, candidates: Optional[Sequence] = None,
                    tol: float = 1e-6) -> SweepReport:
    """Evaluate the quotient over a candidate family and compare with K_opt.

    For LOG_SOBOLEV the quotient is a defect minimized (at zero) by the
    extremizer, so the sweep checks min >= -tol and the extremizer attains it;
    for the other families it checks max <= K_opt*(1 + tol).
    """
    cands = list(candidates) if candidates is not None else default_candidates(spec)
    k_opt = optimal_constant(spec).value

    def one(c):
        return SweepEntry(getattr(c, "label", "candidate"), quotient(spec, c))

    workers = _max_workers()
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            entries = list(pool.map(one, cands))
    else:
        entries = [one(c) for c in cands]

    if spec.family == Family.LOG_SOBOLEV:
        i = int(np.argmin([e.value for e in entries]))
        ok = entries[i].value >= -tol
        return SweepReport(spec.family.value, k_opt, entries, entries[i].label,
                           entries[i].value, ok,
                           "" if ok else "defect went negative: constants or quadrature are wrong")
    i = int(np.argmax([e.value for e in entries]))
    ok = entries[i].value <= k_opt * (1.0 + tol)
    return SweepReport(spec.family.value, k_opt, entries, entries[i].label,
                       entries[i].value, ok,
                       "" if ok else "quotient exceeded the optimal constant beyond tolerance")


def hardy_sweep(p: float, N: float, eps_grid: Sequence[float] = (0.4, 0.2, 0.1, 0.05)):
    """Hardy quotients of truncated power profiles approaching the supremum.

    Candidates t^(-(N-p)/p + eps), cut off outside [delta, 1/delta] with
    piecewise-linear ramps and delta tied to eps.  The supremum p/(N-p) is
    approached from below but never attained.
    """
    if not (1.0 < p < N):
        raise ValueError("HARDY requires 1 < p < N")
    sigma = -(N - p) / p
    target = p / (N - p)
    rows = []
    for eps in eps_grid:
        delta = eps * eps

        def u(t, e=eps, d=delta):
            ta = np.asarray(t, dtype=float)
            core = np.where((ta >= d) & (ta <= 1.0 / d), np.maximum(ta, d) ** (sigma + e), 0.0)
            ramp_in = np.where((ta > 0) & (ta < d), d ** (sigma + e) * ta / d, 0.0)
            ramp_out = np.where((ta > 1.0 / d) & (ta < 2.0 / d),
                                (1.0 / d) ** (sigma + e) * (2.0 / d - ta) * d, 0.0)
            return core + ramp_in + ramp_out

        def du(t, e=eps, d=delta):
            ta = np.asarray(t, dtype=float)
            core = np.where((ta >= d) & (ta <= 1.0 / d),
                            (sigma + e) * np.maximum(ta, d) ** (sigma + e - 1.0), 0.0)
            ramp_in = np.where((ta > 0) & (ta < d), d ** (sigma + e) / d, 0.0)
            ramp_out = np.where((ta > 1.0 / d) & (ta < 2.0 / d), -(1.0 / d) ** (sigma + e) * d, 0.0)
            return core + ramp_in + ramp_out

        prof = ExtremalProfile(u, du, 2.0 / delta, "compact",
                               derivative_jumps=(delta, 1.0 / delta),
                               label=f"hardy(eps={eps:g})")
        rows.append({"eps": eps, "delta": delta, "quotient": hardy_quotient(p, N, prof)})
    quots = [row["quotient"] for row in rows]
    below = all(q < target for q in quots)
    # eps_grid is decreasing, so the quotients should climb towards the target
    increases = all(quots[i + 1] > quots[i] for i in range(len(quots) - 1))
    return {
        "target": target,
        "rows": rows,
        "sup_estimate": max(quots),
        "below_target": below,
        "monotone_increase": increases,
        "note": "supremum approached, not attained",
    }


# ---------------------------------------------------------------------------
# borderline machinery


def moser_function(n: int, k: int) -> ExtremalProfile:
    """Unit-energy logarithmic spike: constant on [0, 1/k), log on [1/k, 1]."""
    if n < 2 or int(n) != n:
        raise ValueError("needs integer n >= 2")
    if k < 2:
        raise ValueError("needs k >= 2")
    sigma = n * omega_ball(n)
    lk = math.log(k)
    top = lk ** ((n - 1.0) / n) / sigma ** (1.0 / n)
    slope_scale = 1.0 / (lk ** (1.0 / n) * sigma ** (1.0 / n))

    def w(t):
        ta = np.asarray(t, dtype=float)
        mid = np.where((ta > 0), np.log(1.0 / np.maximum(ta, 1e-300)) * slope_scale, top)
        out = np.where(ta < 1.0 / k, top, np.where(ta <= 1.0, mid, 0.0))
        return out if ta.ndim else float(out)

    def dw(t):
        ta = np.asarray(t, dtype=float)
        mid = -slope_scale / np.maximum(ta, 1e-300)
        out = np.where((ta >= 1.0 / k) & (ta <= 1.0), mid, 0.0)
        return out if ta.ndim else float(out)

    def d2w(t):
        ta = np.asarray(t, dtype=float)
        mid = slope_scale / np.maximum(ta, 1e-300) ** 2
        out = np.where((ta >= 1.0 / k) & (ta <= 1.0), mid, 0.0)
        return out if ta.ndim else float(out)

    return ExtremalProfile(w, dw, 1.0, "compact", second_derivative=d2w,
                           derivative_jumps=(1.0 / k,), label=f"moser(n={n},k={k})",
                           normalization="unit n-energy")


def mt_functional(n: int, alpha: float, profile, domain_radius: float,
                  settings: Optional[QuadratureSettings] = None) -> float:
    """Normalized exponential integral (1/(omega_n R^n)) int_0^R exp(alpha u^(n/(n-1))) dm_n.

    Evaluated in shifted log form once the exponent exceeds 500 to avoid
    overflow inside the quadrature.
    """
    if alpha <= 0:
        raise ValueError("alpha must be positive")
    R = float(domain_radius)
    expo = n / (n - 1.0)
    ts = np.linspace(0.0, R, 2001)
    gmax = float(alpha * np.max(np.abs(np.asarray(profile.value(ts), dtype=float))) ** expo)
    shift = gmax - 500.0 if gmax > 500.0 else 0.0

    def f(t):
        g = alpha * abs(float(profile.value(t))) ** expo - shift
        return math.exp(g) * n * t ** (n - 1.0) / R**n

    res = integrate(f, 0.0, R, settings=settings or QuadratureSettings(rel_tol=1e-11, abs_tol=1e-13),
                    breakpoints=[b for b in profile.breakpoints() if b < R])
    value = res.value * math.exp(shift) if shift else res.value
    return float(value)


# ---------------------------------------------------------------------------
# Dirichlet eigenvalue shooting


@dataclass
class ShootingResult:
    k_opt: float
    eigenvalue: float
    rho: np.ndarray
    u: np.ndarray
    profile: ExtremalProfile
    iterations: int


def _shoot(p: float, N: float, lam: float, nodes: np.ndarray):
    """Integrate the radial p-Laplacian system from the series start; returns u samples.

    State is (u, w) with w = |u'|^(p-2) u' rho^(N-1); the start uses the
    leading series u = 1 - c rho^(p'), w = -(lam/N) rho^N, valid since the
    equation is singular at the origin.
    """
    pp = p / (p - 1.0)
    eps = nodes[0]
    c = (lam / N) ** (1.0 / (p - 1.0)) / pp
    u = 1.0 - c * eps**pp
    w = -(lam / N) * eps**N
    us = np.empty(nodes.size)
    us[0] = u

    def rhs(rho, u, w):
        du = math.copysign(abs(w) ** (1.0 / (p - 1.0)), w) / rho ** ((N - 1.0) / (p - 1.0))
        dw = -lam * math.copysign(abs(u) ** (p - 1.0), u) * rho ** (N - 1.0)
        return du, dw

    for i in range(nodes.size - 1):
        rho, h = nodes[i], nodes[i + 1] - nodes[i]
        k1u, k1w = rhs(rho, u, w)
        k2u, k2w = rhs(rho + h / 2, u + h / 2 * k1u, w + h / 2 * k1w)
        k3u, k3w = rhs(rho + h / 2, u + h / 2 * k2u, w + h / 2 * k2w)
        k4u, k4w = rhs(rho + h, u + h * k3u, w + h * k3w)
        u += h / 6.0 * (k1u + 2 * k2u + 2 * k3u + k4u)
        w += h / 6.0 * (k1w + 2 * k2w + 2 * k3w + k4w)
        us[i + 1] = u
    return us


def _shooting_nodes(mesh):
    m1, m2 = mesh
    return np.concatenate([np.geomspace(1e-8, 1e-2, m1), np.linspace(1e-2, 1.0, m2)[1:]])


def faber_krahn_shooting(p: float, N: float, tolerance: float = 1e-10,
                         mesh=(400, 4000)) -> ShootingResult:
    """First Dirichlet eigen-pair of the radial p-Laplacian on [0, 1].

    Bisects the spectral parameter on the sign of u(1); returns the constant
    through K = lambda^(-1/p) omega_N^(-1/N) together with the profile.
    """
    if p <= 1.0 or N <= 1.0:
        raise ValueError("requires p > 1 and N > 1")
    nodes = _shooting_nodes(mesh)

    def endpoint(lam):
        return _shoot(p, N, lam, nodes)[-1]

    lo, hi = 1.0, 2.0
    flo = endpoint(lo)
    while flo <= 0.0:
        lo /= 4.0
        flo = endpoint(lo)
        if lo < 1e-8:
            raise RuntimeError("failed to bracket the eigenvalue from below")
    fhi = endpoint(hi)
    grow = 0
    while fhi > 0.0:
        hi *= 2.0
        fhi = endpoint(hi)
        grow += 1
        if grow > 60:
            raise RuntimeError("failed to bracket the eigenvalue from above")
    iters = 0
    while hi - lo > tolerance * hi:
        mid = 0.5 * (lo + hi)
        if endpoint(mid) > 0.0:
            lo = mid
        else:
            hi = mid
        iters += 1
        if iters > 200:
            break
    lam = 0.5 * (lo + hi)
    us = _shoot(p, N, lam, nodes)
    k_opt = lam ** (-1.0 / p) * omega_ball(N) ** (-1.0 / N)

    from scipy.interpolate import PchipInterpolator

    rho_full = np.concatenate([[0.0], nodes])
    u_full = np.concatenate([[1.0], np.maximum(us, 0.0)])
    u_full[-1] = 0.0
    interp = PchipInterpolator(rho_full, u_full, extrapolate=False)
    dinterp = interp.derivative()
    val = _supported(lambda t: np.nan_to_num(interp(np.asarray(t, float)), nan=0.0), 1.0)
    der = _supported(lambda t: np.nan_to_num(dinterp(np.asarray(t, float)), nan=0.0), 1.0)
    prof = ExtremalProfile(val, der, 1.0, "compact", label=f"faber_krahn_2(p={p:g},N={N:g})|shooting",
                           normalization="value 1 at origin")
    return ShootingResult(k_opt, lam, rho_full, u_full, prof, iters)
