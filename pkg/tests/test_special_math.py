import math

import mpmath
import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy import integrate

from practical_ego.special_math import (
    DomainError,
    ei_tradeoff,
    std_normal_cdf,
    std_normal_pdf,
    tau,
)

# mpmath at 40 digits
TAU_ORACLE = {
    -5.0: 5.346165533832815e-8,
    -1.0: 0.083315470587686298,
    0.0: 0.39894228040143268,
    0.5: 0.69779655740130603,
    2.0: 2.0084907026168296,
    8.0: 8.0000000000000001,
}
PHI_ORACLE = {
    -8.0: 6.2209605742717841e-16,
    -1.0: 0.15865525393145705,
    0.0: 0.5,
    1.5: 0.93319279873114193,
}

finite_z = st.floats(-30, 30, allow_nan=False)


def test_pdf_values():
    assert std_normal_pdf(0.0) == pytest.approx(0.3989422804014327, abs=1e-16)
    assert std_normal_pdf(1.0) == pytest.approx(0.24197072451914337, abs=1e-16)


@given(finite_z)
def test_pdf_symmetric(z):
    assert std_normal_pdf(z) == std_normal_pdf(-z)


def test_cdf_against_quadrature():
    val, _ = integrate.quad(std_normal_pdf, -np.inf, 1.96, epsabs=1e-14)
    assert std_normal_cdf(1.96) == pytest.approx(val, abs=1e-12)
    assert std_normal_cdf(1.96) == pytest.approx(0.9750021048517795, abs=1e-12)


@pytest.mark.parametrize("z,expected", PHI_ORACLE.items())
def test_cdf_against_mpmath(z, expected):
    assert std_normal_cdf(z) == pytest.approx(expected, rel=1e-13, abs=1e-15)


def test_cdf_lower_tail_relative_accuracy():
    for z in (-10.0, -20.0, -35.0):
        exact = float(mpmath.ncdf(z))
        assert std_normal_cdf(z) == pytest.approx(exact, rel=1e-12)


@given(finite_z)
def test_cdf_symmetry(z):
    assert std_normal_cdf(z) + std_normal_cdf(-z) == pytest.approx(1.0, abs=1e-15)


@pytest.mark.parametrize("z,expected", TAU_ORACLE.items())
def test_tau_against_mpmath(z, expected):
    assert tau(z) == pytest.approx(expected, rel=1e-12)


def test_tau_one():
    assert tau(1.0) == pytest.approx(1.0833154705876864, abs=1e-15)


@given(st.floats(-12, 12), st.floats(1e-6, 5))
def test_tau_positive_and_increasing(z, dz):
    assert tau(z) > 0
    assert tau(z + dz) > tau(z)


@given(st.floats(-12, 12))
def test_tau_derivative_is_cdf(z):
    h = 1e-5
    fd = (tau(z + h) - tau(z - h)) / (2 * h)
    assert abs(fd - std_normal_cdf(z)) <= 1e-6


@given(st.floats(1e-3, 10))
def test_cdf_dominates_tau_on_left(z):
    assert std_normal_cdf(-z) > tau(-z)


def test_ei_tradeoff_oracle_values():
    # b * tau(a / b) at 40 digits
    assert ei_tradeoff(0.3, 0.2) == pytest.approx(0.30586135875252092, rel=1e-13)
    assert ei_tradeoff(-1.0, 0.5) == pytest.approx(0.0042453513084148188, rel=1e-12)
    assert ei_tradeoff(1.0, 1e-3) == 1.0  # asymptotic branch


@given(st.floats(1e-6, 1.0))
def test_ei_tradeoff_at_zero_exploitation(b):
    assert ei_tradeoff(0.0, b) == pytest.approx(b * std_normal_pdf(0.0), rel=1e-15)


@given(st.floats(-5, 5), st.floats(1e-3, 1.0))
def test_ei_tradeoff_is_b_tau(a, b):
    if abs(a / b) > 40:
        return
    assert ei_tradeoff(a, b) == pytest.approx(b * tau(a / b), abs=1e-12)


@given(st.floats(-3, 3), st.floats(1e-2, 1.0), st.floats(1e-4, 1e-2))
def test_ei_tradeoff_monotone_in_both_arguments(a, b, d):
    assert ei_tradeoff(a + d, b) >= ei_tradeoff(a, b)
    assert ei_tradeoff(a, min(b + d, 1.0)) >= ei_tradeoff(a, b) - 1e-15


@given(st.floats(-5, 5), st.floats(1e-3, 1.0))
def test_ei_tradeoff_sandwich(a, b):
    v = ei_tradeoff(a, b)
    z = a / b
    phi_term = b * std_normal_pdf(z) if abs(z) <= 40 else 0.0
    assert v >= max(a, 0.0) - 1e-12
    if a < 0:
        assert v <= phi_term + 1e-15
    else:
        assert v <= a + phi_term + 1e-12


def test_ei_tradeoff_asymptote():
    assert ei_tradeoff(-5.0, 0.1) == 0.0
    assert ei_tradeoff(5.0, 0.1) == 5.0


@pytest.mark.parametrize("b", [0.0, -1.0])
def test_ei_tradeoff_rejects_nonpositive_b(b):
    with pytest.raises(DomainError):
        ei_tradeoff(0.1, b)


@pytest.mark.parametrize("fn", [std_normal_pdf, std_normal_cdf, tau])
def test_nan_rejected(fn):
    with pytest.raises(DomainError):
        fn(math.nan)
    with pytest.raises(DomainError):
        fn(math.inf)
