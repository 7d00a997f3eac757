#!/usr/bin/env python3
# -*- coding: utf-8 -*-

"""
Tests for Faber polynomial generation and evaluation.
"""

from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from faberlab.core.conformal import MapBundle, lemniscate_map, two_corner_map
from faberlab.core.exceptions import DomainError, PrecisionError
from faberlab.core.faber import (
    FaberPolynomial,
    contour_oracle,
    eval_faber,
    faber_lemniscate_closed,
    faber_sequence,
    faber_values,
)

LEMNISCATES = {s: lemniscate_map(s) for s in (2, 3)}


@pytest.fixture(scope="module")
def lemniscate3() -> MapBundle:
    return LEMNISCATES[3]


@pytest.fixture(scope="module")
def two_corner() -> MapBundle:
    """
    Two-corner bundle with theta1 = 3pi/4.

    Returns:
        MapBundle with an extracted Laurent tail
    """
    return two_corner_map(0.0, theta1_over_pi=Fraction(3, 4))


def test_first_polynomials_of_two_petal_lemniscate() -> None:
    """F_0 = 1, F_1 = z, F_2 = z^2 - 1, F_3 = z^3 - 3z/2."""
    sequence = faber_sequence(LEMNISCATES[2], 3)
    np.testing.assert_allclose(sequence[0].coeffs, [1.0])
    np.testing.assert_allclose(sequence[1].coeffs, [0.0, 1.0], atol=1e-15)
    np.testing.assert_allclose(sequence[2].coeffs, [-1.0, 0.0, 1.0], atol=1e-15)
    np.testing.assert_allclose(sequence[3].coeffs, [0.0, -1.5, 0.0, 1.0], atol=1e-15)


@pytest.mark.parametrize("s", [2, 3])
def test_sequence_matches_closed_form(s: int) -> None:
    """The recurrence reproduces the lemniscate closed form."""
    sequence = faber_sequence(LEMNISCATES[s], 60)
    for n in (0, 1, 7, 30, 60):
        closed = faber_lemniscate_closed(s, n)
        scale = np.max(np.abs(closed.coeffs))
        np.testing.assert_allclose(sequence[n].coeffs, closed.coeffs, atol=1e-9 * scale)


def test_closed_form_pure_power() -> None:
    """For n = s*m the three-petal closed form is (z^3 - 1)^m."""
    poly = faber_lemniscate_closed(3, 6)
    np.testing.assert_allclose(poly.coeffs, [1, 0, 0, -2, 0, 0, 1])


def test_closed_form_rejects_bad_arguments() -> None:
    with pytest.raises(DomainError):
        faber_lemniscate_closed(1, 4)
    with pytest.raises(DomainError):
        faber_lemniscate_closed(3, -1)


def test_truncation_too_short() -> None:
    """Degrees beyond K + 1 need a longer Laurent tail."""
    bundle = lemniscate_map(2, K=5)
    faber_sequence(bundle, 6)
    with pytest.raises(PrecisionError) as excinfo:
        faber_sequence(bundle, 10)
    assert excinfo.value.required_K == 9


def test_negative_degree() -> None:
    with pytest.raises(DomainError):
        faber_sequence(LEMNISCATES[2], -1)


def test_polynomial_validation() -> None:
    """Coefficient count must match the degree and the leading term must not vanish."""
    with pytest.raises(DomainError):
        FaberPolynomial(2, [1.0, 0.0])
    with pytest.raises(DomainError):
        FaberPolynomial(1, [1.0, 0.0])


def test_to_dict() -> None:
    poly = FaberPolynomial(1, [0.5j, 1.0])
    assert poly.to_dict() == {"n": 1, "coeffs": [[0.0, 0.5], [1.0, 0.0]]}
    assert poly.leading == 1.0


def test_values_match_horner(lemniscate3: MapBundle) -> None:
    """Pointwise recurrence and Horner agree at moderate degree."""
    z = np.array([0.3 + 0.2j, -0.8 + 0.1j, 1.1j, 1.5])
    values, _ = faber_values(lemniscate3.map, 25, z)
    sequence = faber_sequence(lemniscate3, 25)
    for n in (5, 17, 25):
        np.testing.assert_allclose(values[n], eval_faber(sequence[n], z), rtol=1e-9, atol=1e-9)


def test_values_shape(lemniscate3: MapBundle) -> None:
    z = np.zeros((2, 3), dtype=complex)
    values, slopes = faber_values(lemniscate3.map, 4, z, derivative=True)
    assert values.shape == (5, 2, 3)
    assert slopes is not None and slopes.shape == (5, 2, 3)
    values, slopes = faber_values(lemniscate3.map, 4, 0.5)
    assert values.shape == (5,)
    assert slopes is None


def test_derivative_matches_polyder(two_corner: MapBundle) -> None:
    """Recurrence derivatives equal those of the monomial form."""
    sequence = faber_sequence(two_corner, 12)
    z = np.array([0.2 + 0.1j, -0.4j, 1.3])
    value, slope = sequence[12].value_and_derivative(z)
    bare = FaberPolynomial(12, sequence[12].coeffs)
    bare_value, bare_slope = bare.value_and_derivative(z)
    np.testing.assert_allclose(value, bare_value, rtol=1e-9, atol=1e-12)
    np.testing.assert_allclose(slope, bare_slope, rtol=1e-9, atol=1e-12)


def test_callable_uses_source(two_corner: MapBundle) -> None:
    poly = faber_sequence(two_corner, 8)[8]
    z = 0.3 - 0.2j
    assert complex(poly(z)) == pytest.approx(complex(eval_faber(poly, z)), rel=1e-10, abs=1e-12)


def test_contour_oracle_interior(lemniscate3: MapBundle) -> None:
    """The Cauchy integral agrees with the recurrence inside the domain."""
    z = 0.5 + 0j
    values, _ = faber_values(lemniscate3.map, 10, z)
    assert contour_oracle(lemniscate3, 10, z) == pytest.approx(complex(values[10]), abs=1e-8)


def test_contour_oracle_exterior(two_corner: MapBundle) -> None:
    """Outside the level curve the oracle adds phi(z)^n."""
    z = 2.5 + 0.5j
    values, _ = faber_values(two_corner.map, 15, z)
    expected = complex(values[15])
    assert contour_oracle(two_corner, 15, z) == pytest.approx(expected, rel=1e-8)


def test_contour_oracle_negative_degree(lemniscate3: MapBundle) -> None:
    with pytest.raises(DomainError):
        contour_oracle(lemniscate3, -1, 0.5)


@settings(max_examples=30, deadline=None)
@given(
    s=st.sampled_from([2, 3]),
    n=st.integers(min_value=0, max_value=20),
    radius=st.floats(min_value=0.0, max_value=1.5),
    angle=st.floats(min_value=0.0, max_value=6.28),
)
def test_horner_matches_recurrence_property(s: int, n: int, radius: float, angle: float) -> None:
    """Horner on the closed form agrees with the pointwise recurrence in the disk |z| <= 1.5."""
    z = radius * np.exp(1j * angle)
    values, _ = faber_values(LEMNISCATES[s].map, n, z)
    expected = complex(eval_faber(faber_lemniscate_closed(s, n), z))
    assert complex(values[n]) == pytest.approx(expected, rel=1e-9, abs=1e-9)
