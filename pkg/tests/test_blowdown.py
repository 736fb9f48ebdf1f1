import math

import numpy as np
import pytest

from cone_sobolev import blowdown as bd
from cone_sobolev import catalog
from cone_sobolev.catalog import cd_constant, extremizer, make_spec, optimal_constant
from cone_sobolev.quadrature import Decay
from cone_sobolev.spaces import builtin_space


def test_radial_integral_boundary_only():
    ip = builtin_space("interpolated", N=3, a=0.4, b=1.0)
    val = bd.radial_integral(ip, lambda t: 1.0, lambda t: 0.0, 1.0)
    assert val == pytest.approx(float(ip.volume(1.0)), rel=1e-12)


def test_radial_integral_exponential_euclidean():
    eu = builtin_space("euclidean", n=3)
    val = bd.radial_integral(eu, lambda t: math.exp(-t), lambda t: -math.exp(-t), math.inf,
                             decay=Decay("exponential", rate=1.0, kappa=1.0))
    assert val == pytest.approx(8.0 * math.pi, rel=1e-10)


def test_radial_integral_two_routes_match():
    co = builtin_space("cone", N=2, a=0.5)
    h = lambda t: max(0.0, 1.0 - t) ** 2
    dh = lambda t: -2.0 * max(0.0, 1.0 - t)
    via = bd.radial_integral(co, h, dh, 1.0)
    direct = bd.direct_radial_integral(co, h, 1.0)
    assert via == pytest.approx(math.pi / 12.0, rel=1e-10)
    assert via == pytest.approx(direct, rel=1e-10)


def test_radial_integral_rejects_growing_boundary_product():
    eu = builtin_space("euclidean", n=3)
    with pytest.raises(ValueError):
        bd.radial_integral(eu, lambda t: 1.0 / (1.0 + t), lambda t: -((1.0 + t) ** -2.0),
                           math.inf, decay=Decay("power"))


def test_exact_cone_ratios_are_constant_sequences():
    spec = make_spec("SOBOLEV", N=3, p=2)
    co = builtin_space("cone", N=3, a=0.6)
    rep = bd.scaled_family_ratios(co, spec, extremizer(spec))
    for series in (rep.ratio_q, rep.ratio_p):
        arr = np.asarray(series)
        assert np.max(np.abs(arr / arr[0] - 1.0)) <= 1e-12
    assert rep.limit_q == pytest.approx(0.6 * rep.extras["model_main"], rel=1e-4)


def test_euclidean_limits_match_model_norms():
    spec = make_spec("NASH", N=2)
    eu = builtin_space("euclidean", n=2)
    rep = bd.scaled_family_ratios(eu, spec, extremizer(spec))
    assert rep.limit_q == pytest.approx(rep.extras["model_main"], rel=1e-8)
    assert rep.limit_r == pytest.approx(rep.extras["model_low"], rel=1e-8)
    assert rep.limit_p == pytest.approx(rep.extras["model_grad"], rel=1e-8)


def test_interpolated_limits_scale_by_avr():
    spec = make_spec("GNS1", N=3, p=2, alpha=2)
    ip = builtin_space("interpolated", N=3, a=0.4, b=1.0)
    rep = bd.scaled_family_ratios(ip, spec, extremizer(spec))
    assert rep.limit_q == pytest.approx(0.4 * rep.extras["model_main"], rel=1e-3)
    assert rep.limit_r == pytest.approx(0.4 * rep.extras["model_low"], rel=1e-3)
    assert rep.converged


def test_gradient_limit_is_upper_bounded_by_avr_times_model():
    spec = make_spec("GNS1", N=3, p=2, alpha=2)
    for space in (builtin_space("cone", N=3, a=0.5),
                  builtin_space("interpolated", N=3, a=0.4, b=1.0)):
        rep = bd.scaled_family_ratios(space, spec, extremizer(spec))
        assert rep.limit_p <= space.avr * rep.extras["model_grad"] * (1.0 + 1e-6)


def test_gate_violation_blocks_ratios():
    spec = make_spec("NASH", N=3)
    from cone_sobolev.model_cone import ExtremalProfile

    bad = ExtremalProfile(lambda t: 1.0 / (1.0 + np.asarray(t, dtype=float)),
                          lambda t: -((1.0 + np.asarray(t, dtype=float)) ** -2.0),
                          math.inf, "power", tail_power=1.0, convexity_onset=0.1)
    with pytest.raises(ValueError):
        bd.scaled_family_ratios(builtin_space("cone", N=3, a=0.5), spec, bad)


def test_avr_lower_bound_arithmetic():
    assert bd.avr_lower_bound(1.0, 1.0, 1.0, 4.0) == 1.0
    assert bd.avr_lower_bound(1.0, 2.0, 1.0, 4.0) == pytest.approx(1.0 / 16.0, rel=1e-14)
    k = optimal_constant(make_spec("NASH", N=3)).value
    c = 2.0 ** (1.0 / 5.0) * k
    assert bd.avr_lower_bound(k, c, 3.0 / 5.0, 3.0) == pytest.approx(0.5, rel=1e-12)


def test_liminf_limsup_bound_values():
    # L = l reduces to the plain bound
    assert bd.liminf_limsup_bound(0.3, 0.3, 2.0, 4.0, 4.0, 1.0, 2.0) == pytest.approx(
        0.3 - 2.0**-4.0, abs=1e-15)
    val = bd.liminf_limsup_bound(0.3, 0.7, 2.0, 4.0, 4.0, 1.0, 1.0)
    assert val == pytest.approx(0.7 * (7.0 / 3.0) ** 1.25 - 1.0, rel=1e-12)
    # huge assumed constant: bound trivially satisfied
    assert bd.liminf_limsup_bound(0.3, 0.7, 2.0, 4.0, 4.0, 1.0, 1e9) > 0.0


def test_liminf_limsup_bound_with_measured_oscillation():
    from cone_sobolev.spaces import builtin_space, estimate_avr

    osc = builtin_space("oscillating", N=3)
    est = estimate_avr(osc)
    assert not est.converged
    spec = make_spec("SOBOLEV", N=3, p=2)
    k = optimal_constant(spec).value
    # at the sharp constant for the liminf, the measured (l, L) pair must
    # satisfy the oscillating-volume bound with margin
    c = est.liminf_est ** (-1.0 / 3.0) * k
    res = bd.liminf_limsup_bound(est.liminf_est, est.limsup_est, spec.p, spec.q, spec.N, k, c)
    assert res > 0.0


def test_end_to_end_self_consistency_on_cone():
    spec = make_spec("SOBOLEV", N=4, p=2)
    co = builtin_space("cone", N=4, a=0.25)
    res = bd.end_to_end_blowdown(co, spec, c=cd_constant(spec, 0.25))
    assert res.bound == pytest.approx(0.25, abs=1e-9)
    assert res.attained_avr == pytest.approx(0.25, abs=1e-6)
    assert res.verdict == "holds"


def test_end_to_end_euclidean_nash_rigidity_point():
    spec = make_spec("NASH", N=3)
    eu = builtin_space("euclidean", n=3)
    res = bd.end_to_end_blowdown(eu, spec, c=optimal_constant(spec).value)
    assert res.bound == pytest.approx(1.0, abs=1e-9)
    assert res.verdict == "holds"


def test_end_to_end_flags_impossible_constant():
    spec = make_spec("GNS1", N=3, p=2, alpha=2)
    co = builtin_space("cone", N=3, a=0.5)
    res = bd.end_to_end_blowdown(co, spec, c=0.9 * cd_constant(spec, 0.5))
    assert res.verdict == "violated"
    assert res.bound > 0.5


def test_local_density_values():
    spec = make_spec("SOBOLEV", N=3, p=2)
    eu = builtin_space("euclidean", n=3)
    res = bd.local_density_bound(eu, spec, c=optimal_constant(spec).value)
    assert res.density == pytest.approx(1.0, abs=1e-10)
    assert res.ok
    co = builtin_space("cone", N=3, a=0.3)
    assert bd.local_density_bound(co, spec).density == pytest.approx(0.3, abs=1e-10)
    ip = builtin_space("interpolated", N=3, a=0.4, b=1.0)
    res_ip = bd.local_density_bound(ip, spec)
    assert res_ip.density == pytest.approx(1.0, abs=1e-4)  # the inner branch dominates at 0


def test_log_sobolev_blowdown_cone():
    spec = make_spec("LOG_SOBOLEV", N=3, p=2)
    co = builtin_space("cone", N=3, a=0.5)
    rep = bd.log_sobolev_blowdown(co, 2.0, 3.0, cd_constant(spec, 0.5))
    assert rep["avr_bound"] == pytest.approx(0.5, abs=1e-9)
    assert rep["avr_bound_measured"] == pytest.approx(0.5, abs=1e-6)
    assert rep["verdict"] == "holds"


def test_log_sobolev_entropy_limit_matches_model():
    from cone_sobolev.catalog import gaussian_profile, log_sobolev_constant
    from cone_sobolev.quadrature import weighted_integral
    from cone_sobolev.model_cone import ModelCone

    eu = builtin_space("euclidean", n=3)
    rep = bd.log_sobolev_blowdown(eu, 2.0, 3.0, log_sobolev_constant(2.0, 3.0))
    prof = gaussian_profile(2.0, 3.0)
    cone = ModelCone(3.0)

    def ent_integrand(t):
        u2 = float(prof.value(t)) ** 2
        return u2 * math.log(u2) if u2 > 0 else 0.0

    ent = weighted_integral(ent_integrand, cone, math.inf,
                            decay=Decay("gaussian", rate=1.0, kappa=2.0)).value
    assert rep["limit_entropy"] == pytest.approx(ent, abs=1e-4)


def test_mt_blowdown_divergence_above_threshold():
    space = builtin_space("cone", N=2, a=0.5)
    threshold = 0.5 * catalog.mt_critical_exponent(2)
    hot = bd.mt_blowdown(space, 2, 1.5 * threshold)
    assert hot["divergent"] and hot["verdict"] == "violated"
    assert hot["I_values"][-1] >= 10.0 * hot["I_values"][0]
    assert hot["grad_ok"]


@pytest.mark.parametrize("factor", [0.9, 1.0])
def test_mt_blowdown_bounded_at_or_below_threshold(factor):
    space = builtin_space("cone", N=2, a=1.0)
    threshold = catalog.mt_critical_exponent(2)
    rep = bd.mt_blowdown(space, 2, factor * threshold)
    assert rep["bounded"] and rep["verdict"] == "consistent"


def test_mt_blowdown_fixed_k_R_limit_matches_cone_value():
    from cone_sobolev.catalog import moser_function, mt_functional

    a = 0.5
    space = builtin_space("cone", N=2, a=a)
    c = 0.8 * a * catalog.mt_critical_exponent(2)
    rep = bd.mt_blowdown(space, 2, c, k_schedule=[2])
    eps = rep["eps"]
    alpha = c / (a + eps)
    expect = mt_functional(2, alpha, moser_function(2, 2), 1.0)
    assert rep["I_values"][0] == pytest.approx(expect, rel=1e-8)


def test_ckn_bound_reduction_and_degenerate_flags():
    got = bd.ckn_avr_bound(1.3, 2.0, 0.7, 4.0, 0.0, 0.0, 0.0)
    assert not got["degenerate"]
    assert got["value"] == pytest.approx(bd.avr_lower_bound(1.3, 2.0, 0.7, 4.0), abs=1e-15)
    hpw = bd.ckn_avr_bound(1.0, 1.0, 0.5, 3.0, 0.0, 0.0, -1.0)
    hardy = bd.ckn_avr_bound(1.0, 1.0, 1.0, 4.0, 1.0, 0.0, 0.0)
    assert hpw["degenerate"] and hardy["degenerate"]


def test_report_json_and_csv_shape():
    spec = make_spec("NASH", N=3)
    co = builtin_space("cone", N=3, a=0.5)
    res = bd.end_to_end_blowdown(co, spec)
    doc = res.report.to_json_dict()
    for key in ("schema", "radii", "ratio_q", "ratio_r", "ratio_p",
                "limit_q", "limit_r", "limit_p", "avr_bound", "verdict"):
        assert key in doc
    assert doc["schema"] == "cone-sobolev/1"
    lines = res.report.to_csv().strip().split("\n")
    assert lines[0] == "radius,ratio_q,ratio_r,ratio_p"
    assert len(lines) == len(res.report.radii) + 1
