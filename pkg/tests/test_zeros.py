#!/usr/bin/env python3
# -*- coding: utf-8 -*-

"""
Tests for zero finding, counting measures and accumulation predictions.
"""

import math
import logging
import warnings
from fractions import Fraction

import numpy as np
import pytest

from faberlab.core.asymptotics import InteriorModel, build_interior_model
from faberlab.core.conformal import MapBundle, lemniscate_map, two_corner_map
from faberlab.core.exceptions import ConditionA3Warning, DomainError, UnsupportedCaseError
from faberlab.core.faber import FaberPolynomial, faber_sequence
from faberlab.core.zeros import (
    AccumulationProblem,
    CountingMeasure,
    accumulation_candidates,
    accumulation_locus_u2_irrational,
    accumulation_points_rational,
    accumulation_report,
    equilibrium_mixed_moments,
    equilibrium_moments,
    find_zeros,
    interior_zero_count,
    lemniscate_equilibrium_density,
    measure_distance,
    measure_distance_mixed,
    refine_clusters,
    zero_free_check,
)


@pytest.fixture(scope="module")
def lemniscate2() -> MapBundle:
    return lemniscate_map(2)


@pytest.fixture(scope="module")
def lemniscate3() -> MapBundle:
    return lemniscate_map(3)


@pytest.fixture(scope="module")
def two_corner() -> MapBundle:
    """
    Two-corner bundle with theta1 = 3pi/4.

    Returns:
        MapBundle whose accumulation points come in four residue classes
    """
    return two_corner_map(0.0, theta1_over_pi=Fraction(3, 4))


def _sorted(points: np.ndarray) -> np.ndarray:
    return np.array(sorted(points, key=lambda z: (round(z.real, 8), round(z.imag, 8))))


def test_find_zeros_integer_roots() -> None:
    """(z-1)(z-2)(z-3) has the obvious zeros."""
    measure = find_zeros(FaberPolynomial(3, [-6.0, 11.0, -6.0, 1.0]))
    assert measure.converged
    np.testing.assert_allclose(_sorted(measure.points), [1.0, 2.0, 3.0], atol=1e-10)
    assert np.max(measure.residuals) < 1e-12


def test_find_zeros_of_faber_polynomial(lemniscate2: MapBundle) -> None:
    """F_2 = z^2 - 1 and F_3 = z^3 - 3z/2 on the two-petal lemniscate."""
    sequence = faber_sequence(lemniscate2, 3)
    np.testing.assert_allclose(_sorted(find_zeros(sequence[2]).points), [-1.0, 1.0], atol=1e-10)
    root = math.sqrt(1.5)
    np.testing.assert_allclose(_sorted(find_zeros(sequence[3]).points), [-root, 0.0, root], atol=1e-10)


def test_find_zeros_rejects_constant() -> None:
    with pytest.raises(DomainError):
        find_zeros(FaberPolynomial(0, [1.0]))


def test_refine_clusters_collapses_double_roots() -> None:
    """(z^2 - 1)^2 has two double roots."""
    poly = FaberPolynomial(4, [1.0, 0.0, -2.0, 0.0, 1.0])
    refined = refine_clusters(find_zeros(poly), poly)
    np.testing.assert_allclose(_sorted(refined.points), [-1.0, -1.0, 1.0, 1.0], atol=1e-12)
    assert refined.n == 4
    assert np.max(refined.residuals) < 1e-14


def test_refine_clusters_keeps_simple_roots() -> None:
    poly = FaberPolynomial(3, [-6.0, 11.0, -6.0, 1.0])
    measure = find_zeros(poly)
    refined = refine_clusters(measure, poly)
    np.testing.assert_allclose(_sorted(refined.points), _sorted(measure.points))


def test_counting_measure_validation() -> None:
    with pytest.raises(DomainError):
        CountingMeasure(np.array([1.0, 2.0]), 3)


def test_counting_measure_moments() -> None:
    """Zeros +-1: m_0 = 1, m_1 = 0, m_2 = 1."""
    measure = CountingMeasure(np.array([1.0, -1.0]), 2)
    np.testing.assert_allclose(measure.moments(2), [1.0, 0.0, 1.0])
    mixed = measure.mixed_moments(2)
    assert mixed[1, 1] == pytest.approx(1.0)
    assert mixed[2, 1] == 0


def test_suspect_zeros_are_dropped(caplog: pytest.LogCaptureFixture) -> None:
    caplog.set_level(logging.WARNING)
    measure = CountingMeasure(np.array([1.0, 1e6]), 2)
    assert measure.kept_points().size == 1
    assert "suspect" in caplog.text


def test_counting_measure_to_dict() -> None:
    measure = CountingMeasure(np.array([1j]), 1, np.array([1e-16]))
    assert measure.to_dict() == {"n": 1, "zeros": [[0.0, 1.0]], "residuals": [1e-16]}


def test_equilibrium_moments_lemniscate(lemniscate2: MapBundle) -> None:
    """psi^2 = w^2 + 1, so m_2 = 1 and odd moments vanish."""
    moments = equilibrium_moments(lemniscate2, 4)
    np.testing.assert_allclose(moments, [1.0, 0.0, 1.0, 0.0, 1.0], atol=1e-12)
    with pytest.raises(DomainError):
        equilibrium_moments(lemniscate2, 4, nodes=100)


def test_equilibrium_mixed_moments_lemniscate(lemniscate2: MapBundle) -> None:
    """int |z|^2 = 4/pi and int |z|^4 = 2 against the equilibrium measure."""
    mixed = equilibrium_mixed_moments(lemniscate2, 4)
    assert mixed[0, 0] == pytest.approx(1.0, abs=1e-10)
    assert mixed[1, 1] == pytest.approx(4.0 / math.pi, abs=1e-4)
    assert mixed[2, 2] == pytest.approx(2.0, abs=1e-8)


def test_holomorphic_moment_identity(two_corner: MapBundle) -> None:
    """For simple zeros the first moments of the zero measure equal those of the equilibrium measure."""
    poly = faber_sequence(two_corner, 20)[20]
    measure = find_zeros(poly)
    distance = measure_distance(measure, equilibrium_moments(two_corner, 6), 6)
    assert distance < 1e-8


def test_mixed_distance_separates_measures(lemniscate2: MapBundle) -> None:
    """Zeros +-1 of z^2 - 1 match the holomorphic moments but not the mixed ones."""
    measure = CountingMeasure(np.array([1.0, -1.0]), 2)
    assert measure_distance(measure, equilibrium_moments(lemniscate2, 2), 2) < 1e-10
    mixed = measure_distance_mixed(measure, equilibrium_mixed_moments(lemniscate2, 4), 4)
    assert mixed == pytest.approx(1.0, abs=1e-6)


def test_lemniscate_density() -> None:
    np.testing.assert_allclose(lemniscate_equilibrium_density(3, np.array([0.0, 2.0])), [0.0, 2.0 / math.pi])


def test_zero_free_exterior(lemniscate3: MapBundle) -> None:
    """Zeros of F_10 stay out of |phi| >= 1.1."""
    poly = faber_sequence(lemniscate3, 10)[10]
    report = zero_free_check(find_zeros(poly), lemniscate3)
    assert report.empty
    assert report.checked == 10
    assert report.to_dict()["empty"] is True


def test_zero_free_flags_far_zero(lemniscate3: MapBundle) -> None:
    measure = CountingMeasure(np.array([0.5, 3.0]), 2)
    report = zero_free_check(measure, lemniscate3)
    assert not report.empty
    assert report.offending == [3.0 + 0j]
    assert report.moduli[0] > 1.1


def test_interior_zero_count(lemniscate3: MapBundle) -> None:
    measure = CountingMeasure(np.array([1.0, 3.0, 0.0]), 3)
    summary = interior_zero_count(measure, lemniscate3)
    assert summary["interior_zeros"] == 1
    assert summary["corner_bound"] == 2
    assert summary["clustered_corners"] is True


def test_rational_accumulation_two_corner(two_corner: MapBundle) -> None:
    """Four residue classes, each contributing at most one candidate."""
    problem = AccumulationProblem.from_model(build_interior_model(two_corner))
    assert problem.q == 4
    candidates, degenerate = accumulation_candidates(problem)
    assert degenerate == []
    assert len(candidates) <= 4
    assert {c.residue_class for c in candidates} <= {0, 1, 2, 3}
    points = accumulation_points_rational(problem)
    assert len(points) == sum(1 for c in candidates if c.interior)


def test_rational_accumulation_lemniscate(lemniscate3: MapBundle) -> None:
    """Two of three classes degenerate; the third has a single merged pole and no roots."""
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        model = build_interior_model(lemniscate3)
    problem = AccumulationProblem.from_model(model)
    with pytest.warns(ConditionA3Warning):
        points = accumulation_points_rational(problem)
    assert points == []
    report = accumulation_report(model)
    assert report["kind"] == "points"
    assert report["degenerate_classes"] == [0, 1]
    assert report["q"] == 3


def test_irrational_locus_is_line() -> None:
    """Equal |Ahat| moduli give the perpendicular bisector of the corners."""
    model: InteriorModel = build_interior_model(two_corner_map(math.pi / math.sqrt(2.0)))
    problem = AccumulationProblem.from_model(model)
    with pytest.raises(UnsupportedCaseError):
        accumulation_candidates(problem)
    locus = accumulation_locus_u2_irrational(problem)
    assert locus.kind == "line"
    z1, z2 = problem.poles
    assert locus.distance(np.array([(z1 + z2) / 2.0]))[0] == pytest.approx(0.0, abs=1e-12)
    assert locus.segments
    assert accumulation_report(model)["kind"] == "line"
