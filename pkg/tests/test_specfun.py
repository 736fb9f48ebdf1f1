import math

import numpy as np
import pytest
from scipy.optimize import brentq
from scipy.special import jv as scipy_jv

from cone_sobolev import specfun


def test_gamma_values():
    assert specfun.gamma(1.0) == pytest.approx(1.0, rel=1e-13)
    assert specfun.gamma(0.5) == pytest.approx(math.sqrt(math.pi), rel=1e-13)
    assert specfun.gamma(5.0) == pytest.approx(24.0, rel=1e-13)


def test_gamma_domain_error():
    with pytest.raises(ValueError):
        specfun.gamma(0.0)
    with pytest.raises(ValueError):
        specfun.gamma(-1.5)


def test_gamma_functional_equation():
    rng = np.random.default_rng(3)
    for x in rng.uniform(0.1, 20.0, 100):
        assert specfun.gamma(x + 1.0) == pytest.approx(x * specfun.gamma(x), rel=1e-12)


def test_beta_values():
    assert specfun.beta(1.0, 1.0) == pytest.approx(1.0, rel=1e-12)
    assert specfun.beta(2.0, 3.0) == pytest.approx(1.0 / 12.0, rel=1e-12)
    assert specfun.beta(0.5, 0.5) == pytest.approx(math.pi, rel=1e-12)


def test_beta_domain_error():
    with pytest.raises(ValueError):
        specfun.beta(0.0, 1.0)


def test_bessel_small_argument_leading_terms():
    assert specfun.bessel_j(0.0, 0.0) == pytest.approx(1.0, abs=1e-15)
    assert specfun.bessel_j(1.0, 0.0) == 0.0


def test_bessel_half_order_closed_form():
    # J_{1/2}(x) = sqrt(2/(pi x)) sin(x)
    for x in (0.3, 1.0, math.pi, 7.7, 30.0, 49.0):
        expect = math.sqrt(2.0 / (math.pi * x)) * math.sin(x)
        assert specfun.bessel_j(0.5, x) == pytest.approx(expect, abs=1e-12)
    assert abs(specfun.bessel_j(0.5, math.pi)) < 1e-12


@pytest.mark.parametrize("nu", [0.0, 0.5, 1.0, 2.5, 5.0, 10.0])
def test_bessel_matches_independent_evaluator(nu):
    xs = np.linspace(0.0, 50.0, 501)
    ours = specfun.bessel_j(nu, xs)
    assert np.max(np.abs(ours - scipy_jv(nu, xs))) < 1e-12


def test_bessel_derivative_recurrence_vs_finite_differences():
    # step large enough that the ~1e-12 series/asymptotic seam at x = 12 does
    # not dominate the difference quotient
    rng = np.random.default_rng(11)
    for _ in range(100):
        nu = rng.uniform(0.0, 6.0)
        x = rng.uniform(0.2, 30.0)
        h = 1e-5 * max(1.0, x)
        fd = (specfun.bessel_j(nu, x + h) - specfun.bessel_j(nu, x - h)) / (2 * h)
        assert specfun.bessel_j_deriv(nu, x) == pytest.approx(fd, abs=1e-8)


def test_bessel_zero_sine_series():
    assert specfun.bessel_zero(0.5, 1) == pytest.approx(math.pi, abs=1e-10)
    assert specfun.bessel_zero(0.5, 2) == pytest.approx(2 * math.pi, abs=1e-10)


def test_bessel_zero_j0_frozen_value():
    # frozen from a sign-change bisection of the validated series on [2, 3]
    assert specfun.bessel_zero(0.0, 1) == pytest.approx(2.404825557695773, abs=1e-10)


@pytest.mark.parametrize("nu", [0.0, 0.5, 1.0, 2.5, 5.0])
def test_zero_indexing_against_independent_bisection(nu):
    for k in (1, 2, 3):
        ours = specfun.bessel_zero(nu, k)
        oracle = brentq(lambda x: scipy_jv(nu, x), ours - 0.4, ours + 0.4, xtol=1e-13)
        assert ours == pytest.approx(oracle, abs=1e-10)


@pytest.mark.parametrize("nu", [0.0, 0.5, 1.0, 2.5, 5.0])
def test_interlacing_and_sign(nu):
    j1 = specfun.bessel_zero(nu, 1)
    j1_up = specfun.bessel_zero(nu + 1.0, 1)
    j2 = specfun.bessel_zero(nu, 2)
    assert j1 < j1_up < j2
    assert specfun.bessel_j(nu, j1_up) < 0.0


@pytest.mark.parametrize("nu", [0.0, 0.5, 2.5])
def test_bessel_inequality(nu):
    ok, worst = specfun.bessel_inequality_check(nu, 1000)
    assert ok
    assert worst >= -1e-12


def test_bessel_inequality_zero_margin_at_endpoint():
    j1 = specfun.bessel_zero(1.5, 1)
    lhs = specfun.bessel_j(0.5, j1) / specfun.bessel_j(0.5, j1)
    assert lhs == pytest.approx(1.0)


def test_inequality_check_rejects_tiny_sample_count():
    with pytest.raises(ValueError):
        specfun.bessel_inequality_check(1.0, 1)
