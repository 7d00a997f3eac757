#!/usr/bin/env python3
# -*- coding: utf-8 -*-

"""
Tests for the special function module.
"""

import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from faberlab.core.exceptions import DomainError
from faberlab.core.special_fn import (
    AlphaParams,
    alpha,
    alpha_asymptotic,
    alpha_quadrature_oracle,
    binomial_gamma,
    gen_binomial,
    log_gamma,
)


def test_log_gamma_matches_factorial() -> None:
    """log Gamma(n) is log((n-1)!)."""
    assert log_gamma(5.0) == pytest.approx(math.log(24.0), rel=1e-14)
    assert log_gamma(0.5) == pytest.approx(0.5 * math.log(math.pi), rel=1e-14)


@pytest.mark.parametrize("x", [0.0, -1.0, -2.5])
def test_log_gamma_rejects_non_positive(x: float) -> None:
    with pytest.raises(DomainError):
        log_gamma(x)


def test_gen_binomial_values() -> None:
    """Generalized binomials for fractional upper arguments."""
    assert gen_binomial(0.5, 0) == 1.0
    assert gen_binomial(0.5, 1) == pytest.approx(0.5)
    assert gen_binomial(0.5, 2) == pytest.approx(-0.125)
    assert gen_binomial(5, 2) == pytest.approx(10.0)
    with pytest.raises(DomainError):
        gen_binomial(1.0, -1)


def test_binomial_gamma_integer_and_poles() -> None:
    """Gamma-ratio binomial agrees with integers and vanishes at denominator poles."""
    assert binomial_gamma(5, 2) == pytest.approx(10.0, rel=1e-12)
    assert binomial_gamma(2, 3) == 0.0
    with pytest.raises(DomainError):
        binomial_gamma(-1.0, 0.5)


def test_binomial_gamma_negative_lower_argument() -> None:
    """binom(a, -2/3) = Gamma(a+1) / (Gamma(1/3) Gamma(a+5/3)) keeps its sign."""
    a = 7.0
    expected = math.exp(math.lgamma(a + 1) - math.lgamma(1.0 / 3.0) - math.lgamma(a + 5.0 / 3.0))
    assert binomial_gamma(a, -2.0 / 3.0) == pytest.approx(expected, rel=1e-12)


def test_alpha_params_validation() -> None:
    """Parameters outside the supported ranges are rejected."""
    with pytest.raises(DomainError):
        AlphaParams(-1.0, 0, 3)
    with pytest.raises(DomainError):
        AlphaParams(0.5, 9, 3)
    with pytest.raises(DomainError):
        AlphaParams(0.5, 0, -1)


def test_alpha_closed_forms() -> None:
    """
    Known values: alpha_{0,0}(n) = 1/(n+1), alpha_{0,1}(0) = -1 and
    alpha_{0,1}(n) = -H_{n+1}/(n+1).
    """
    assert alpha(AlphaParams(0.0, 0, 3)) == pytest.approx(0.25, rel=1e-14)
    assert alpha(AlphaParams(0.0, 1, 0)) == pytest.approx(-1.0, rel=1e-14)
    assert alpha(AlphaParams(0.0, 1, 1)) == pytest.approx(-0.75, rel=1e-14)
    harmonic = sum(1.0 / j for j in range(1, 12))
    assert alpha(AlphaParams(0.0, 1, 10)) == pytest.approx(-harmonic / 11.0, rel=1e-13)


@pytest.mark.parametrize("beta,m,n", [(-0.5, 0, 7), (0.5, 1, 20), (1.5, 2, 50), (1.0, 2, 0)])
def test_alpha_matches_quadrature(beta: float, m: int, n: int) -> None:
    """The recurrence agrees with the quadrature oracle."""
    params = AlphaParams(beta, m, n)
    assert alpha(params) == pytest.approx(alpha_quadrature_oracle(params), rel=1e-8)


def test_alpha_asymptotic_exact_without_log() -> None:
    """For m = 0 the leading form is the exact Beta function."""
    for n in (2, 10, 1000):
        params = AlphaParams(0.5, 0, n)
        assert alpha(params) / alpha_asymptotic(params) == pytest.approx(1.0, abs=1e-12)


def test_alpha_asymptotic_log_regime() -> None:
    """For m = 1 the ratio approaches 1 slowly."""
    params = AlphaParams(0.5, 1, 10_000)
    assert 0.6 <= alpha(params) / alpha_asymptotic(params) <= 1.4


def test_alpha_asymptotic_degree_limits() -> None:
    with pytest.raises(DomainError):
        alpha_asymptotic(AlphaParams(0.5, 0, 1))
    with pytest.raises(DomainError):
        alpha(AlphaParams(0.5, 0, 100_001))


def test_quadrature_oracle_node_budget() -> None:
    with pytest.raises(DomainError):
        alpha_quadrature_oracle(AlphaParams(0.5, 0, 3), nodes=10)


@settings(max_examples=60, deadline=None)
@given(
    beta=st.floats(min_value=-0.9, max_value=3.0),
    m=st.integers(min_value=0, max_value=3),
    n=st.integers(min_value=0, max_value=300),
)
def test_alpha_sign_property(beta: float, m: int, n: int) -> None:
    """alpha_{beta,m}(n) has sign (-1)^m."""
    value = alpha(AlphaParams(beta, m, n))
    assert value != 0.0
    assert math.copysign(1.0, value) == (-1.0) ** m


@settings(max_examples=40, deadline=None)
@given(beta=st.floats(min_value=-0.9, max_value=3.0), n=st.integers(min_value=0, max_value=300))
def test_alpha_decreasing_in_n(beta: float, n: int) -> None:
    """Without the logarithm the moments decrease with n."""
    assert alpha(AlphaParams(beta, 0, n + 1)) < alpha(AlphaParams(beta, 0, n))


@settings(max_examples=60, deadline=None)
@given(a=st.floats(min_value=-3.0, max_value=6.0), b=st.integers(min_value=0, max_value=12))
def test_gen_binomial_pascal_rule(a: float, b: int) -> None:
    """binom(a, b) + binom(a, b+1) = binom(a+1, b+1)."""
    lhs = gen_binomial(a, b) + gen_binomial(a, b + 1)
    assert lhs == pytest.approx(gen_binomial(a + 1.0, b + 1), rel=1e-9, abs=1e-9)
