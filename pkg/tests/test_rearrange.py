import math

import numpy as np
import pytest

from cone_sobolev.catalog import nash_profile
from cone_sobolev.model_cone import ModelCone
from cone_sobolev.quadrature import Decay
from cone_sobolev.rearrange import (cavalieri_check, polya_szego_check,
                                    random_monotone_profiles, rearrangement)
from cone_sobolev.spaces import builtin_space


def gauss(t):
    return np.exp(-np.asarray(t, dtype=float) ** 2)


def dgauss(t):
    ta = np.asarray(t, dtype=float)
    return -2.0 * ta * np.exp(-ta**2)


def test_cone_rearrangement_is_dilation():
    co = builtin_space("cone", N=3, a=0.5)
    star = rearrangement(gauss, co)
    s = np.linspace(0.05, 2.0, 21)
    expect = gauss(0.5 ** (-1.0 / 3.0) * s)
    assert np.max(np.abs(star(s) - expect)) < 1e-8


def test_euclidean_rearrangement_is_identity():
    eu = builtin_space("euclidean", n=3)
    star = rearrangement(gauss, eu)
    s = np.linspace(0.05, 2.0, 21)
    assert np.max(np.abs(star(s) - gauss(s))) < 1e-8


def test_indicator_rearranges_to_scaled_indicator():
    co = builtin_space("cone", N=2, a=0.25)
    rho0 = 1.3
    g = lambda t: np.where(np.asarray(t, dtype=float) < rho0, 1.0, 0.0)
    star = rearrangement(g, co, r_cap=4.0, assume_monotone=True)
    edge = 0.25**0.5 * rho0
    assert star(edge * 0.99) == pytest.approx(1.0, abs=1e-9)
    assert star(edge * 1.01) == pytest.approx(0.0, abs=1e-9)


def test_equimeasurability_random_levels():
    co = builtin_space("cone", N=3, a=0.5)
    cone = ModelCone(3.0)
    star = rearrangement(gauss, co)
    rng = np.random.default_rng(2)
    for t in rng.uniform(0.01, 0.95, 20):
        mu_space = float(co.volume(math.sqrt(-math.log(t))))
        s = star.superlevel_radius(float(t))
        assert cone.omega_N * s**3 == pytest.approx(mu_space, rel=1e-6)


def test_monotonicity_of_samples():
    co = builtin_space("interpolated", N=3, a=0.4, b=1.0)
    star = rearrangement(gauss, co)
    assert np.all(np.diff(star.values) <= 0.0)
    assert np.all(np.diff(star.grid) > 0.0)


def test_nonmonotone_profile_equimeasurability():
    co = builtin_space("cone", N=3, a=0.5)
    cone = ModelCone(3.0)
    ridge = lambda t: np.exp(-((np.asarray(t, dtype=float) - 1.0) ** 2))
    star = rearrangement(ridge, co)
    rng = np.random.default_rng(4)
    for t in rng.uniform(0.05, 0.9, 10):
        w = math.sqrt(-math.log(t))
        mu = float(co.volume(1.0 + w) - co.volume(max(0.0, 1.0 - w)))
        s = star.superlevel_radius(float(t))
        assert cone.omega_N * s**3 == pytest.approx(mu, rel=1e-6)


def test_cavalieri_gaussian_square():
    eu = builtin_space("euclidean", n=3)
    rep = cavalieri_check(lambda t: np.exp(-np.asarray(t, dtype=float)), eu, lambda s: s * s,
                          decay=Decay("exponential", rate=2.0, kappa=1.0))
    assert rep.residual <= 1e-6


def test_cavalieri_linear_closed_form():
    co = builtin_space("cone", N=2, a=0.5)
    g = lambda t: np.maximum(0.0, 1.0 - np.asarray(t, dtype=float))
    rep = cavalieri_check(g, co, lambda s: s, support=1.0)
    expect = 0.5 * 2.0 * math.pi * (1.0 / 6.0)  # 0.5 * 2pi * int_0^1 (1-t) t dt
    assert rep.lhs == pytest.approx(expect, rel=1e-10)
    assert rep.rhs == pytest.approx(expect, rel=1e-6)
    assert rep.residual <= 1e-6


def test_cavalieri_nash_profile_cube():
    co = builtin_space("cone", N=2, a=0.25)
    prof = nash_profile(2.0)
    rep = cavalieri_check(lambda t: prof.value(t), co, lambda s: s**3, support=1.0)
    assert rep.residual <= 1e-6


def test_polya_szego_equality_on_exact_cone():
    co = builtin_space("cone", N=3, a=0.5)
    rep = polya_szego_check(gauss, dgauss, co, 2.0, decay=Decay("gaussian", rate=2.0, kappa=2.0))
    assert abs(rep.rel_margin) <= 1e-5


def test_polya_szego_strict_on_non_cone():
    ip = builtin_space("interpolated", N=3, a=0.4, b=1.0)
    g = lambda t: np.maximum(0.0, 1.0 - np.asarray(t, dtype=float)) ** 2
    dg = lambda t: -2.0 * np.maximum(0.0, 1.0 - np.asarray(t, dtype=float))
    rep = polya_szego_check(g, dg, ip, 2.0, support=1.0)
    assert rep.margin > 0.0


def test_polya_szego_smoothed_plateau_small_energy():
    co = builtin_space("cone", N=3, a=0.5)
    g = lambda t: 1.0 / (1.0 + np.exp(40.0 * (np.asarray(t, dtype=float) - 1.0)))
    dg = lambda t: -40.0 * np.exp(40.0 * (np.asarray(t, dtype=float) - 1.0)) \
        / (1.0 + np.exp(40.0 * (np.asarray(t, dtype=float) - 1.0))) ** 2
    rep = polya_szego_check(g, dg, co, 2.0, support=3.0)
    assert rep.rel_margin >= -1e-5


def test_polya_szego_randomized_margins():
    spaces = [builtin_space("euclidean", n=3), builtin_space("cone", N=3, a=0.5),
              builtin_space("interpolated", N=3, a=0.4, b=1.0)]
    for (label, g, dg, decay) in random_monotone_profiles(99, 6):
        for space in spaces:
            rep = polya_szego_check(g, dg, space, 2.0, decay=decay)
            assert rep.rel_margin >= -1e-5, (label, space.label)


def test_rearrangement_rejects_negative_profiles():
    co = builtin_space("cone", N=3, a=0.5)
    with pytest.raises(ValueError):
        rearrangement(lambda t: np.cos(np.asarray(t, dtype=float) * 3.0), co)
