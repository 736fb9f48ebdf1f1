import math

import numpy as np
import pytest

from cone_sobolev import catalog, specfun
from cone_sobolev.catalog import (cd_constant, extremizer, faber_krahn_shooting,
                                  hardy_sweep, make_spec, moser_function, mt_critical_exponent,
                                  mt_functional, optimal_constant, quotient, sharpness_sweep)
from cone_sobolev.model_cone import ModelCone, omega_ball, scale_profile


# --- spec construction -------------------------------------------------------

def test_sobolev_spec_fills_derived_exponents():
    spec = make_spec("SOBOLEV", N=4, p=2)
    assert spec.q == pytest.approx(4.0)
    assert spec.theta == pytest.approx(1.0)


def test_nash_spec_exponents():
    spec = make_spec("NASH", N=3)
    assert (spec.p, spec.q, spec.r) == (2.0, 2.0, 1.0)
    assert spec.theta == pytest.approx(3.0 / 5.0)


def test_gns1_boundary_reduces_to_sobolev():
    spec = make_spec("GNS1", N=3, p=2, alpha=3)
    assert spec.q == pytest.approx(6.0)
    assert spec.r == pytest.approx(3.0 * (2.0 - 1.0) + 1.0)  # alpha(p-1)+1; immaterial at theta=1
    assert spec.theta == pytest.approx(1.0)


@pytest.mark.parametrize("family,kwargs", [
    ("GNS1", dict(N=3, p=2, alpha=2)),
    ("GNS2", dict(N=3, p=2, alpha=0.5)),
    ("SOBOLEV", dict(N=4, p=2)),
    ("NASH", dict(N=5.5)),
    ("HPW", dict(N=3)),
    ("HARDY", dict(N=4, p=2)),
])
def test_balance_residual_below_contract(family, kwargs):
    spec = make_spec(family, **kwargs)
    assert abs(spec.balance_residual) <= 1e-12


def test_ckn_spec_with_solved_main_exponent():
    N, p, r, theta, a, b, g = 4.0, 2.0, 3.0, 0.75, 0.1, 0.2, -0.3
    inv_q = a / N + theta * (1.0 / p - (1.0 + b) / N) + (1.0 - theta) * (1.0 / r - g / N)
    spec = make_spec("CKN", N=N, p=p, q=1.0 / inv_q, r=r, theta=theta, alpha=a, beta=b, gamma=g)
    assert abs(spec.balance_residual) <= 1e-12
    assert spec.bound_exponent is not None


@pytest.mark.parametrize("family,kwargs", [
    ("GNS1", dict(N=3, p=2, alpha=1.0)),        # alpha must exceed 1
    ("GNS1", dict(N=3, p=2, alpha=3.5)),        # beyond the boundary
    ("GNS2", dict(N=3, p=2, alpha=1.2)),        # needs alpha < 1
    ("MORREY", dict(N=3, p=2)),                 # needs p > N
    ("FABER_KRAHN_2", dict(N=3, p=4)),          # needs p < N
    ("HARDY", dict(N=2, p=2)),                  # needs p < N
    ("MOSER_TRUDINGER", dict(N=2.5)),           # integer n only
    ("NASH", dict(N=3, p=4)),                   # unknown parameter for the family
])
def test_inadmissible_parameters_rejected(family, kwargs):
    with pytest.raises(ValueError):
        make_spec(family, **kwargs)


def test_ckn_balance_violation_rejected():
    with pytest.raises(ValueError):
        make_spec("CKN", N=4, p=2, q=4, r=3, theta=0.75, alpha=0.3, beta=0.0, gamma=0.0)


# --- optimal constants -------------------------------------------------------

def test_nash_constant_closed_form_n2():
    j1 = specfun.bessel_zero(1.0, 1)
    expect = math.sqrt(2.0) * math.pi ** -0.25 * (j1 * j1) ** -0.25
    assert optimal_constant(make_spec("NASH", N=2)).value == pytest.approx(expect, rel=1e-13)


def test_faber_krahn_2_constant_p2_n3():
    expect = 1.0 / (math.pi * (4.0 * math.pi / 3.0) ** (1.0 / 3.0))
    assert optimal_constant(make_spec("FABER_KRAHN_2", N=3, p=2)).value == pytest.approx(expect, rel=1e-12)


def test_mt_critical_exponent_n2():
    assert mt_critical_exponent(2) == pytest.approx(4.0 * math.pi, rel=1e-14)


def test_hpw_and_hardy_constants():
    assert optimal_constant(make_spec("HPW", N=3)).value == pytest.approx(math.sqrt(2.0 / 3.0), rel=1e-14)
    assert optimal_constant(make_spec("HARDY", N=4, p=2)).value == pytest.approx(1.0, rel=1e-14)


@pytest.mark.parametrize("p,N", [(2, 3), (2, 4), (3, 5)])
def test_sobolev_matches_classical_value(p, N):
    # classical sharp constant: quotient at the power-law bubble, known in
    # closed Beta form; p=2, N=3 also pins the frozen number below
    spec = make_spec("SOBOLEV", N=N, p=p)
    k = optimal_constant(spec).value
    q = quotient(spec, extremizer(spec))
    assert q == pytest.approx(k, rel=1e-9)
    if (p, N) == (2, 3):
        assert k == pytest.approx((3.0 * (math.pi / 2.0) ** (4.0 / 3.0)) ** -0.5, rel=1e-12)


def test_gns2_limit_towards_faber_krahn_1():
    # as alpha -> 0 the interpolation constant drifts towards the L1 constant
    fk = optimal_constant(make_spec("FABER_KRAHN_1", N=3, p=2)).value
    gaps = []
    for alpha in (0.1, 0.05, 0.01):
        val = optimal_constant(make_spec("GNS2", N=3, p=2, alpha=alpha)).value
        gaps.append(abs(val - fk))
    assert gaps[0] > gaps[1] > gaps[2]


# --- extremizers and quotients ----------------------------------------------

def test_gns1_extremizer_shape():
    prof = extremizer(make_spec("GNS1", N=3, p=2, alpha=2))
    ts = np.linspace(0.0, 5.0, 11)
    assert np.allclose(prof.value(ts), (1.0 + ts**2) ** -1.0, rtol=1e-13)
    assert math.isinf(prof.support_radius)


def test_nash_extremizer_boundary_behavior():
    prof = extremizer(make_spec("NASH", N=2))
    assert prof.value(1.0) == pytest.approx(0.0, abs=1e-12)
    assert prof.derivative(1.0 - 1e-9) == pytest.approx(0.0, abs=1e-7)
    # closed form at nu=0: 1 - J_0(j_1 t)/J_0(j_1)
    j1 = specfun.bessel_zero(1.0, 1)
    t = 0.37
    expect = 1.0 - specfun.bessel_j(0.0, j1 * t) / specfun.bessel_j(0.0, j1)
    assert prof.value(t) == pytest.approx(expect, rel=1e-12)


def test_morrey_extremizer_exponent():
    prof = extremizer(make_spec("MORREY", N=2, p=4))
    t = 0.5
    assert prof.value(t) == pytest.approx(1.0 - t ** (2.0 / 3.0), rel=1e-13)
    assert prof.support_radius == 1.0


def test_hardy_has_no_extremizer():
    with pytest.raises(ValueError):
        extremizer(make_spec("HARDY", N=4, p=2))


@pytest.mark.parametrize("family,kwargs", [
    ("GNS1", dict(N=3, p=2, alpha=2)),
    ("NASH", dict(N=4)),
    ("MORREY", dict(N=2, p=4)),
    ("FABER_KRAHN_1", dict(N=3, p=2)),
    ("FABER_KRAHN_2", dict(N=3, p=2)),
    ("HPW", dict(N=3)),
])
def test_quotient_attains_constant_at_extremizer(family, kwargs):
    spec = make_spec(family, **kwargs)
    k = optimal_constant(spec).value
    assert quotient(spec, extremizer(spec)) == pytest.approx(k, rel=1e-6)


@pytest.mark.parametrize("lam", [0.5, 2.0])
def test_quotient_scale_invariance(lam):
    spec = make_spec("GNS1", N=3, p=2, alpha=2)
    prof = extremizer(spec)
    assert quotient(spec, scale_profile(prof, lam)) == pytest.approx(quotient(spec, prof), rel=1e-8)


def test_gaussian_below_nash_constant():
    from cone_sobolev.catalog import gaussian_profile

    spec = make_spec("NASH", N=3)
    g = gaussian_profile(2.0, 3.0)
    assert quotient(spec, g) < optimal_constant(spec).value


def test_log_sobolev_defect_signs():
    spec = make_spec("LOG_SOBOLEV", N=3, p=2)
    assert abs(quotient(spec, extremizer(spec))) <= 1e-9
    from cone_sobolev.model_cone import perturb_profile

    pert = perturb_profile(extremizer(spec), 0.1, 1.0, 0.4)
    assert quotient(spec, pert) > 1e-4


# --- sweeps -------------------------------------------------------------------

@pytest.mark.parametrize("family,kwargs", [
    ("GNS1", dict(N=3, p=2, alpha=2)),
    ("NASH", dict(N=4)),
])
def test_sharpness_sweep_argmax_is_extremizer(family, kwargs):
    spec = make_spec(family, **kwargs)
    rep = sharpness_sweep(spec)
    assert rep.ok
    assert rep.best_value <= rep.k_opt * (1.0 + 1e-6)
    assert rep.best_value / rep.k_opt >= 1.0 - 1e-8
    assert "bump" not in rep.best_label  # extremizer or a rescaling wins


def test_log_sobolev_sweep_minimum_at_extremizer():
    rep = sharpness_sweep(make_spec("LOG_SOBOLEV", N=3, p=2))
    assert rep.ok
    assert abs(rep.best_value) <= 1e-6
    assert "bump" not in rep.best_label


def test_sweep_thread_cap_does_not_change_results(monkeypatch):
    spec = make_spec("NASH", N=3)
    serial = sharpness_sweep(spec)
    monkeypatch.setenv("CONE_SOBOLEV_THREADS", "4")
    threaded = sharpness_sweep(spec)
    assert [e.label for e in serial.entries] == [e.label for e in threaded.entries]
    assert all(a.value == pytest.approx(b.value, rel=1e-12)
               for a, b in zip(serial.entries, threaded.entries))


def test_hardy_sweep_monotone_approach():
    rep = hardy_sweep(2.0, 4.0, eps_grid=(0.4, 0.2, 0.1, 0.05))
    assert rep["target"] == pytest.approx(1.0)
    assert rep["monotone_increase"]
    assert rep["below_target"]


# --- borderline machinery -----------------------------------------------------

@pytest.mark.parametrize("k", [2, 8, 64])
def test_moser_function_unit_energy(k):
    w = moser_function(2, k)
    assert catalog._grad_norm(w, 2.0, ModelCone(2.0)) == pytest.approx(1.0, abs=1e-10)


def test_moser_function_endpoint_values():
    k = 8
    w = moser_function(2, k)
    sigma = 2.0 * omega_ball(2.0)
    assert w.value(1.0 + 1e-12) == 0.0
    assert w.value(0.0) == pytest.approx(math.log(k) ** 0.5 / sigma**0.5, rel=1e-13)


def test_mt_functional_of_zero_profile():
    from cone_sobolev.model_cone import ExtremalProfile

    zero = ExtremalProfile(lambda t: 0.0 * np.asarray(t, dtype=float),
                           lambda t: 0.0 * np.asarray(t, dtype=float), 1.0, "compact")
    assert mt_functional(2, 4.0 * math.pi, zero, 1.0) == pytest.approx(1.0, rel=1e-10)


def test_mt_functional_grows_above_critical_exponent():
    alpha = 1.1 * mt_critical_exponent(2)
    vals = [mt_functional(2, alpha, moser_function(2, 2**j), 1.0) for j in range(1, 13)]
    assert all(b > a for a, b in zip(vals, vals[1:]))


def test_mt_functional_bounded_at_critical_exponent():
    alpha = mt_critical_exponent(2)
    vals = [mt_functional(2, alpha, moser_function(2, 2**j), 1.0) for j in range(1, 13)]
    last4 = vals[-4:]
    assert max(last4) / min(last4) < 1.5


# --- shooting ------------------------------------------------------------------

def test_shooting_matches_bessel_closed_form_n2():
    res = faber_krahn_shooting(2.0, 2.0)
    expect = 1.0 / (specfun.bessel_zero(0.0, 1) * math.sqrt(math.pi))
    assert res.k_opt == pytest.approx(expect, rel=1e-8)


def test_shooting_profile_matches_sinc_for_p2_n3():
    res = faber_krahn_shooting(2.0, 3.0)
    ts = np.linspace(0.05, 0.95, 10)
    sinc = np.sin(math.pi * ts) / (math.pi * ts)
    vals = np.asarray([float(res.profile.value(t)) for t in ts])
    assert np.max(np.abs(vals - sinc)) < 1e-6


# --- cd constants ---------------------------------------------------------------

def test_cd_constant_euclidean_case():
    spec = make_spec("NASH", N=3)
    assert cd_constant(spec, 1.0) == pytest.approx(optimal_constant(spec).value, rel=1e-14)


def test_cd_constant_sobolev_arithmetic():
    spec = make_spec("SOBOLEV", N=4, p=2)
    k = optimal_constant(spec).value
    assert cd_constant(spec, 1.0 / 16.0) == pytest.approx(2.0 * k, rel=1e-13)


def test_cd_constant_nash_exponent():
    spec = make_spec("NASH", N=3)
    k = optimal_constant(spec).value
    assert cd_constant(spec, 0.5) == pytest.approx(2.0 ** (1.0 / 5.0) * k, rel=1e-13)


def test_cd_constant_mt_direction():
    spec = make_spec("MOSER_TRUDINGER", N=2)
    assert cd_constant(spec, 0.25) == pytest.approx(0.25 * 4.0 * math.pi, rel=1e-13)


def test_cd_constant_rejects_bad_avr():
    with pytest.raises(ValueError):
        cd_constant(make_spec("NASH", N=3), 1.5)
