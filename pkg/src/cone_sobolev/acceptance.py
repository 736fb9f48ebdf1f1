"""Acceptance suite: every exit criterion, runnable as a library or via report.

Each criterion returns a structured result with per-case details, the worst
measured quantity, and a margin ratio (measured/tolerance, <= 1 passes) so the
report can rank how much headroom each check has.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq
from scipy.special import jv as _scipy_jv

from . import blowdown as bd
from . import catalog, specfun
from .catalog import make_spec, optimal_constant, extremizer, quotient, cd_constant
from .model_cone import ModelCone, perturb_profile, omega_ball
from .quadrature import Decay
from .rearrange import polya_szego_check, random_monotone_profiles
from .spaces import builtin_space, estimate_avr, isoperimetric_check


@dataclass
class CriterionResult:
    name: str
    passed: bool
    tolerance: float
    measured: float
    margin_ratio: float
    details: list = field(default_factory=list)
    note: str = ""

    def row(self) -> dict:
        return {
            "name": self.name,
            "passed": bool(self.passed),
            "tolerance": self.tolerance,
            "measured": self.measured,
            "margin_ratio": self.margin_ratio,
            "note": self.note,
            "details": self.details,
        }


def _result(name, tol, cases, key, note=""):
    worst = max(abs(c[key]) for c in cases)
    passed = all(c["ok"] for c in cases)
    return CriterionResult(name, passed, tol, worst, worst / tol, cases, note)


def criterion_gns1_constants() -> CriterionResult:
    """Quadrature quotient at the explicit power-law extremizer vs closed form."""
    cases = []
    for (p, N, alpha) in [(2, 3, 2), (2, 4, 1.5), (3, 5, 1.2), (2, 3, 3)]:
        spec = make_spec("GNS1", N=N, p=p, alpha=alpha)
        k = optimal_constant(spec).value
        q = quotient(spec, extremizer(spec))
        rel = q / k - 1.0
        cases.append({"p": p, "N": N, "alpha": alpha, "k_opt": k, "quotient": q,
                      "rel_err": rel, "ok": abs(rel) <= 1e-8})
    return _result("gns1_constant_reproduction", 1e-8, cases, "rel_err")


def criterion_nash_constants() -> CriterionResult:
    """Bessel extremizer quotient vs the closed-form constant; zero accuracy."""
    cases = []
    for N in (2.0, 3.0, 4.0, 5.5):
        spec = make_spec("NASH", N=N)
        k = optimal_constant(spec).value
        q = quotient(spec, extremizer(spec))
        rel = q / k - 1.0
        # independent zero oracle: sign-change bisection on the scipy evaluator
        nu = N / 2.0
        ours = specfun.bessel_zero(nu, 1)
        oracle = brentq(lambda x: _scipy_jv(nu, x), ours - 0.5, ours + 0.5, xtol=1e-13)
        zero_err = abs(ours - oracle)
        cases.append({"N": N, "k_opt": k, "quotient": q, "rel_err": rel,
                      "zero_abs_err": zero_err,
                      "ok": abs(rel) <= 1e-6 and zero_err <= 1e-10})
    return _result("nash_constant_reproduction", 1e-6, cases, "rel_err")


def criterion_bessel_inequality() -> CriterionResult:
    """Grid margin of the scaled-value bound plus exact zero interlacing."""
    cases = []
    for nu in (0.0, 0.5, 1.0, 2.5, 5.0):
        ok, worst = specfun.bessel_inequality_check(nu, 10000)
        j1 = specfun.bessel_zero(nu, 1)
        j1_up = specfun.bessel_zero(nu + 1.0, 1)
        j2 = specfun.bessel_zero(nu, 2)
        interlace = j1 < j1_up < j2
        sign = specfun.bessel_j(nu, j1_up) < 0.0
        cases.append({"nu": nu, "worst_margin": worst, "interlacing": interlace,
                      "negative_at_next_zero": sign,
                      "ok": ok and interlace and sign})
    worst = min(c["worst_margin"] for c in cases)
    passed = all(c["ok"] for c in cases)
    return CriterionResult("bessel_inequality_and_interlacing", passed, 1e-12,
                           worst, abs(min(worst, 0.0)) / 1e-12, cases)


def log_sobolev_perturbations(spec):
    """Six deterministic non-scaling perturbations of the Gaussian extremizer."""
    base = extremizer(spec)
    out = []
    for center in (0.5, 1.0, 1.5):
        for eps in (0.1, -0.1):
            out.append(perturb_profile(base, eps, center, 0.4))
    return out


def criterion_log_sobolev() -> CriterionResult:
    cases = []
    for (p, N) in [(2, 3), (2, 4), (3, 3)]:
        spec = make_spec("LOG_SOBOLEV", N=N, p=p)
        d0 = quotient(spec, extremizer(spec))
        perts = [quotient(spec, u) for u in log_sobolev_perturbations(spec)]
        ok = abs(d0) <= 1e-6 and all(d >= 1e-4 for d in perts)
        cases.append({"p": p, "N": N, "defect_at_extremizer": d0,
                      "min_perturbed_defect": min(perts), "ok": ok})
    worst = max(abs(c["defect_at_extremizer"]) for c in cases)
    passed = all(c["ok"] for c in cases)
    return CriterionResult("log_sobolev_equality", passed, 1e-6, worst, worst / 1e-6, cases)


def criterion_faber_krahn_2() -> CriterionResult:
    cases = []
    for N in (2, 3, 4):
        res = catalog.faber_krahn_shooting(2.0, float(N))
        nu = N / 2.0 - 1.0
        exact = (specfun.bessel_zero(nu, 1) * omega_ball(float(N)) ** (1.0 / N)) ** -1.0
        rel = res.k_opt / exact - 1.0
        cases.append({"p": 2, "N": N, "k_shoot": res.k_opt, "k_exact": exact,
                      "rel_err": rel, "ok": abs(rel) <= 1e-6})
    r1 = catalog.faber_krahn_shooting(3.0, 5.0, mesh=(400, 4000))
    r2 = catalog.faber_krahn_shooting(3.0, 5.0, mesh=(800, 8000))
    rel = r2.k_opt / r1.k_opt - 1.0
    cases.append({"p": 3, "N": 5, "k_coarse": r1.k_opt, "k_fine": r2.k_opt,
                  "rel_err": rel, "ok": abs(rel) <= 1e-6})
    return _result("faber_krahn_2_eigenvalue", 1e-6, cases, "rel_err")


_PS_SPACES = (("euclidean", {"n": 3}), ("cone", {"N": 3, "a": 0.5}),
              ("cone", {"N": 2.5, "a": 0.3}), ("interpolated", {"N": 3, "a": 0.4, "b": 1.0}))


def criterion_polya_szego(seed: int = 20240405, count: int = 50) -> CriterionResult:
    profiles = random_monotone_profiles(seed, count)
    p_cycle = (1.5, 2.0, 3.0)
    cases = []
    worst_rel = 0.0
    worst_cone = 0.0
    for kind, params in _PS_SPACES:
        space = builtin_space(kind, **params)
        exact_cone = kind in ("euclidean", "cone")
        for i, (label, g, dg, decay) in enumerate(profiles):
            p_exp = p_cycle[i % len(p_cycle)]
            rep = polya_szego_check(g, dg, space, p_exp, decay=decay)
            ok = rep.rel_margin >= -1e-5
            if exact_cone:
                ok = ok and abs(rep.rel_margin) <= 1e-5
                worst_cone = max(worst_cone, abs(rep.rel_margin))
            worst_rel = min(worst_rel, rep.rel_margin)
            if not ok or i < 2:
                cases.append({"space": space.label, "profile": label, "p": p_exp,
                              "rel_margin": rep.rel_margin, "ok": ok})
    passed = worst_rel >= -1e-5 and worst_cone <= 1e-5 and all(c["ok"] for c in cases)
    measured = max(abs(worst_rel), worst_cone)
    return CriterionResult("polya_szego_suite", passed, 1e-5, measured, measured / 1e-5,
                           cases, f"worst signed margin {worst_rel:.2e}; worst |cone margin| {worst_cone:.2e}")


def _closed_form_specs(N3_only=False):
    """Families with determinable constants for the self-consistency loop."""
    specs = [
        make_spec("GNS1", N=3, p=2, alpha=2),
        make_spec("GNS2", N=3, p=2, alpha=0.5),
        make_spec("SOBOLEV", N=3 if N3_only else 4, p=2),
        make_spec("NASH", N=3),
        make_spec("MORREY", N=3 if N3_only else 2, p=4),
        make_spec("FABER_KRAHN_1", N=3, p=2),
        make_spec("FABER_KRAHN_2", N=3, p=2),
    ]
    return specs


def criterion_blowdown_self_consistency() -> CriterionResult:
    cases = []
    for spec in _closed_form_specs():
        for avr in (0.1, 0.25, 0.5, 1.0):
            space = builtin_space("cone", N=spec.N, a=avr)
            res = bd.end_to_end_blowdown(space, spec, c=cd_constant(spec, avr))
            err = max(abs(res.bound - avr), abs(res.attained_avr - avr))
            cases.append({"family": spec.family.value, "space": space.label, "avr": avr,
                          "bound": res.bound, "attained": res.attained_avr,
                          "err": err, "ok": err <= 1e-3 and res.verdict == "holds"})
    for (p, N) in [(2, 3)]:
        for avr in (0.1, 0.25, 0.5, 1.0):
            space = builtin_space("cone", N=N, a=avr)
            rep = bd.log_sobolev_blowdown(space, p, N, cd_constant(make_spec("LOG_SOBOLEV", N=N, p=p), avr))
            err = max(abs(rep["avr_bound"] - avr), abs(rep["avr_bound_measured"] - avr))
            cases.append({"family": "LOG_SOBOLEV", "space": space.label, "avr": avr,
                          "bound": rep["avr_bound"], "attained": rep["avr_bound_measured"],
                          "err": err, "ok": err <= 1e-3 and rep["verdict"] == "holds"})
    ip = builtin_space("interpolated", N=3, a=0.4, b=1.0)
    for spec in _closed_form_specs(N3_only=True):
        res = bd.end_to_end_blowdown(ip, spec, c=cd_constant(spec, 0.4))
        err = max(abs(res.bound - 0.4), abs(res.attained_avr - 0.4))
        cases.append({"family": spec.family.value, "space": ip.label, "avr": 0.4,
                      "bound": res.bound, "attained": res.attained_avr,
                      "err": err, "ok": err <= 5e-3 and res.verdict == "holds"})
    ls3 = make_spec("LOG_SOBOLEV", N=3, p=2)
    rep = bd.log_sobolev_blowdown(ip, 2, 3, cd_constant(ls3, 0.4))
    err = max(abs(rep["avr_bound"] - 0.4), abs(rep["avr_bound_measured"] - 0.4))
    cases.append({"family": "LOG_SOBOLEV", "space": ip.label, "avr": 0.4,
                  "bound": rep["avr_bound"], "attained": rep["avr_bound_measured"],
                  "err": err, "ok": err <= 5e-3 and rep["verdict"] == "holds"})
    return _result("blowdown_self_consistency", 1e-3, cases, "err")


def criterion_mt_threshold() -> CriterionResult:
    """Spike-family growth against the critical coefficient.

    As stated, divergence is demanded at 0.9x the sharp threshold; the
    constructive mechanism diverges only for coefficients above the threshold
    (the 0.9x functional values decrease along the spike schedule), so that
    sub-check fails and is flagged with a note rather than weakened.
    """
    cases = []
    cone2 = ModelCone(2.0)
    for k in (2, 8, 64):
        w = catalog.moser_function(2, k)
        norm = catalog._grad_norm(w, 2.0, cone2)
        cases.append({"check": f"moser_norm_k={k}", "value": norm,
                      "err": norm - 1.0, "ok": abs(norm - 1.0) <= 1e-10})
    for a in (0.5, 1.0):
        space = builtin_space("cone", N=2, a=a)
        threshold = a ** (1.0 / (2 - 1)) * catalog.mt_critical_exponent(2)
        low = bd.mt_blowdown(space, 2, 0.9 * threshold)
        cases.append({"check": f"divergence_at_0.9x(a={a})", "value": low["I_values"][-1] / low["I_values"][0],
                      "err": 0.0 if low["divergent"] else 1.0, "ok": low["divergent"],
                      "note": "mechanism diverges only above the threshold; see README"})
        crit = bd.mt_blowdown(space, 2, 1.0 * threshold)
        last4 = crit["I_values"][-4:]
        ratio = max(last4) / min(last4)
        cases.append({"check": f"bounded_at_1.0x(a={a})", "value": ratio,
                      "err": max(0.0, ratio - 1.5), "ok": crit["bounded"]})
    passed = all(c["ok"] for c in cases)
    worst = max(abs(c["err"]) for c in cases)
    return CriterionResult("mt_divergence_threshold", passed, 1e-10, worst,
                           worst / 1e-10 if worst else 0.0, cases,
                           "0.9x-divergence clause is unattainable as stated; "
                           "the growth mechanism activates above the threshold")


def _h_catalog():
    """30 smooth profiles with closed-form derivatives across the decay classes."""
    hs = []
    for b in (2.0, 3.0):
        for Rc in (0.8, 1.5, 3.0):
            hs.append((f"compact(b={b},Rc={Rc})", Rc,
                       lambda t, b=b, Rc=Rc: max(0.0, 1.0 - (t / Rc) ** 2) ** b,
                       lambda t, b=b, Rc=Rc: -2.0 * b * t / Rc**2 * max(0.0, 1.0 - (t / Rc) ** 2) ** (b - 1.0),
                       None))
    for Rc in (1.0, 2.0):
        hs.append((f"plateau(Rc={Rc})", Rc, lambda t: 1.0, lambda t: 0.0, None))
    for s in (2.5, 3.0, 3.5, 4.0, 5.0):
        hs.append((f"power(s={s})", math.inf,
                   lambda t, s=s: (1.0 + t * t) ** -s,
                   lambda t, s=s: -2.0 * s * t * (1.0 + t * t) ** (-s - 1.0),
                   Decay("power")))
    for s in (3.0, 4.0, 5.0):
        hs.append((f"power_hump(s={s})", math.inf,
                   lambda t, s=s: t * t * (1.0 + t * t) ** -s,
                   lambda t, s=s: 2.0 * t * (1.0 + t * t) ** (-s - 1.0) * (1.0 + t * t - s * t * t),
                   Decay("power")))
    for a in (0.5, 1.0, 2.0, 3.0):
        hs.append((f"gauss(a={a})", math.inf,
                   lambda t, a=a: math.exp(-a * t * t),
                   lambda t, a=a: -2.0 * a * t * math.exp(-a * t * t),
                   Decay("gaussian", rate=a, kappa=2.0)))
    for a in (1.0, 2.0):
        hs.append((f"gauss_hump(a={a})", math.inf,
                   lambda t, a=a: t * t * math.exp(-a * t * t),
                   lambda t, a=a: (2.0 * t - 2.0 * a * t**3) * math.exp(-a * t * t),
                   Decay("gaussian", rate=a, kappa=2.0)))
    for a in (1.0, 1.5, 2.0):
        hs.append((f"exp(a={a})", math.inf,
                   lambda t, a=a: math.exp(-a * t),
                   lambda t, a=a: -a * math.exp(-a * t),
                   Decay("exponential", rate=a, kappa=1.0)))
    for a in (1.0, 2.0):
        hs.append((f"exp_poly(a={a})", math.inf,
                   lambda t, a=a: (1.0 + t) * math.exp(-a * t),
                   lambda t, a=a: (1.0 - a * (1.0 + t)) * math.exp(-a * t),
                   Decay("exponential", rate=a, kappa=1.0)))
    for s in (4.5, 6.0):
        hs.append((f"power_shift(s={s})", math.inf,
                   lambda t, s=s: (1.0 + t) ** -s,
                   lambda t, s=s: -s * (1.0 + t) ** (-s - 1.0),
                   Decay("power")))
    def _sech2(x):
        # overflow-safe: sech^2(x) = 4 e^(-2x) / (1 + e^(-2x))^2 for x >= 0
        e = math.exp(-2.0 * x)
        return 4.0 * e / (1.0 + e) ** 2

    for a in (0.75, 1.25):
        hs.append((f"sech2(a={a})", math.inf,
                   lambda t, a=a: _sech2(a * t),
                   lambda t, a=a: -2.0 * a * math.tanh(a * t) * _sech2(a * t),
                   Decay("exponential", rate=2.0 * a, kappa=1.0)))
    return hs[:30] if len(hs) >= 30 else hs


def criterion_change_of_variables() -> CriterionResult:
    spaces = [builtin_space(kind, **params) for kind, params in _PS_SPACES]
    cases = []
    worst = 0.0
    hs = _h_catalog()
    assert len(hs) == 30
    for space in spaces:
        for (label, R0, h, dh, decay) in hs:
            via = bd.radial_integral(space, h, dh, R0, decay=decay)
            direct = bd.direct_radial_integral(space, h, R0, decay=decay)
            rel = abs(via - direct) / max(abs(direct), 1e-300)
            worst = max(worst, rel)
            if rel > 1e-9 or len(cases) < 3:
                cases.append({"space": space.label, "h": label, "via_parts": via,
                              "direct": direct, "rel": rel, "ok": rel <= 1e-9})
    passed = worst <= 1e-9
    return CriterionResult("change_of_variables_equivalence", passed, 1e-9, worst,
                           worst / 1e-9, cases, f"{len(hs)} integrands x {len(spaces)} spaces")


def criterion_degenerate_arithmetic(seed: int = 7) -> CriterionResult:
    rng = np.random.default_rng(seed)
    cases = []
    worst = 0.0
    for _ in range(20):
        k = float(rng.uniform(0.1, 3.0))
        c = float(rng.uniform(0.5, 4.0)) * k
        theta = float(rng.uniform(0.05, 1.0))
        N = float(rng.uniform(1.5, 9.0))
        got = bd.ckn_avr_bound(k, c, theta, N, 0.0, 0.0, 0.0)
        want = bd.avr_lower_bound(k, c, theta, N)
        diff = abs(got["value"] - want)
        worst = max(worst, diff)
        # oscillation bound reduces to the plain bound when L = l (theta = 1)
        L = float(rng.uniform(0.2, 1.0))
        p = float(rng.uniform(1.2, 4.0))
        q = float(rng.uniform(1.0, 6.0))
        resid = bd.liminf_limsup_bound(L, L, p, q, N, k, c)
        plain = L - (k / c) ** N
        worst = max(worst, abs(resid - plain))
    cases.append({"check": "ckn_reduction_and_Ll_reduction", "worst": worst, "ok": worst <= 1e-12})
    hpw = bd.ckn_avr_bound(1.0, 1.0, 0.5, 3.0, 0.0, 0.0, -1.0)
    hardy = bd.ckn_avr_bound(1.0, 1.0, 1.0, 4.0, 1.0, 0.0, 0.0)
    cases.append({"check": "hpw_degenerate", "ok": hpw["degenerate"], "worst": 0.0})
    cases.append({"check": "hardy_degenerate", "ok": hardy["degenerate"], "worst": 0.0})
    passed = all(c["ok"] for c in cases)
    return CriterionResult("ckn_degenerate_arithmetic", passed, 1e-12, worst, worst / 1e-12, cases)


def criterion_space_sanity(seed: int = 11) -> CriterionResult:
    rng = np.random.default_rng(seed)
    spaces = [builtin_space("euclidean", n=3), builtin_space("cone", N=3, a=0.5),
              builtin_space("cone", N=2.5, a=0.3), builtin_space("interpolated", N=3, a=0.4, b=1.0),
              builtin_space("capped", N=3, r0=1.0)]
    cases = []
    for space in spaces:
        pairs = np.sort(rng.uniform(1e-3, 1e5, size=(100, 2)), axis=1)
        ratios1 = np.asarray(space.vol_ratio(pairs[:, 0]))
        ratios2 = np.asarray(space.vol_ratio(pairs[:, 1]))
        bg = bool(np.all(ratios2 <= ratios1 * (1.0 + 1e-12) + 1e-15))
        iso = isoperimetric_check(space)
        ok = bg and iso.worst_rel_margin >= -1e-8
        cases.append({"space": space.label, "bishop_gromov": bg,
                      "iso_rel_margin": iso.worst_rel_margin, "err": min(0.0, iso.worst_rel_margin),
                      "ok": ok})
    for kind, params, tol in [("cone", {"N": 3, "a": 0.7}, 1e-4), ("cone", {"N": 2.5, "a": 0.3}, 1e-4),
                              ("interpolated", {"N": 3, "a": 0.4, "b": 1.0}, 1e-3)]:
        space = builtin_space(kind, **params)
        est = estimate_avr(space)
        err = abs(est.value - space.avr)
        cases.append({"space": space.label, "avr_est": est.value, "declared": space.avr,
                      "err": err, "ok": est.converged and err <= tol})
    passed = all(c["ok"] for c in cases)
    worst = max(abs(c.get("err", 0.0)) for c in cases)
    return CriterionResult("space_sanity", passed, 1e-3, worst, worst / 1e-3, cases)


ALL_CRITERIA = [
    criterion_gns1_constants,
    criterion_nash_constants,
    criterion_bessel_inequality,
    criterion_log_sobolev,
    criterion_faber_krahn_2,
    criterion_polya_szego,
    criterion_blowdown_self_consistency,
    criterion_mt_threshold,
    criterion_change_of_variables,
    criterion_degenerate_arithmetic,
    criterion_space_sanity,
]


def run_all(verbose: bool = False):
    results = []
    for fn in ALL_CRITERIA:
        res = fn()
        results.append(res)
        if verbose:
            state = "PASS" if res.passed else "FAIL"
            print(f"[{state}] {res.name}: measured {res.measured:.3e} vs tol {res.tolerance:.0e}"
                  + (f"  ({res.note})" if res.note else ""))
    return results
