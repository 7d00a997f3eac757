#!/usr/bin/env python3
# -*- coding: utf-8 -*-

"""
Zeros of Faber polynomials and their distribution.

Roots come from a Jacobi-style Aberth-Ehrlich iteration. Counting measures are
compared with the equilibrium measure of the boundary through moments, and
interior accumulation points are predicted from the rational model H_n.
"""

import math
import logging
import warnings
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Dict, List, Optional, Tuple

import numpy as np
from numpy.polynomial import polynomial as P

from faberlab.core.asymptotics import InteriorModel, RationalModel
from faberlab.core.conformal import (
    MapBundle,
    boundary_distance,
    classify_points,
    exterior_inverse,
)
from faberlab.core.exceptions import (
    ConditionA3Error,
    ConditionA3Warning,
    DomainError,
    UnsupportedCaseError,
)
from faberlab.core.faber import FaberPolynomial

logger = logging.getLogger(__name__)

GOLDEN_ANGLE = math.pi * (3.0 - math.sqrt(5.0))
SUSPECT_MODULUS = 1e3
DEFAULT_MOMENT_ORDER = 6


@dataclass(frozen=True, eq=False)
class CountingMeasure:
    """
    Normalized counting measure of the n zeros of a polynomial.

    Attributes:
        points: Zeros listed with multiplicity
        n: Degree
        residuals: |F_n(root)| / ||coeffs||_1 per root
        converged: Whether every root met the update tolerance
        iterations: Aberth sweeps used
    """

    points: np.ndarray
    n: int
    residuals: np.ndarray = field(default_factory=lambda: np.zeros(0))
    converged: bool = True
    iterations: int = 0

    def __post_init__(self) -> None:
        points = np.asarray(self.points, dtype=complex).ravel()
        if points.size != self.n:
            raise DomainError(f"counting measure of degree {self.n} needs {self.n} points")
        object.__setattr__(self, "points", points)
        object.__setattr__(self, "residuals", np.asarray(self.residuals, dtype=float).ravel())

    def kept_points(self) -> np.ndarray:
        """Zeros with |z| <= 1e3; the rest are reported as suspect."""
        keep = np.abs(self.points) <= SUSPECT_MODULUS
        dropped = int(self.points.size - np.count_nonzero(keep))
        if dropped:
            logger.warning(f"Discarding {dropped} suspect zero(s) of modulus > {SUSPECT_MODULUS:g}")
        return self.points[keep]

    def moments(self, k_max: int) -> np.ndarray:
        pts = self.kept_points()
        return np.array([np.sum(pts ** k) / self.n for k in range(k_max + 1)])

    def mixed_moments(self, k_max: int) -> np.ndarray:
        """Matrix of (1/n) sum z^j conj(z)^k for j + k <= k_max (zero elsewhere)."""
        pts = self.kept_points()
        out = np.zeros((k_max + 1, k_max + 1), dtype=complex)
        for j in range(k_max + 1):
            for k in range(k_max + 1 - j):
                out[j, k] = np.sum(pts ** j * np.conj(pts) ** k) / self.n
        return out

    def to_dict(self) -> Dict[str, Any]:
        return {
            "n": int(self.n),
            "zeros": [[float(z.real), float(z.imag)] for z in self.points],
            "residuals": [float(r) for r in self.residuals],
        }


def _monomial_ratio(coeffs: np.ndarray, z: np.ndarray) -> np.ndarray:
    """p(z)/p'(z) via the reversed polynomial, safe for large |z|."""
    n = coeffs.size - 1
    u = 1.0 / z
    rev = coeffs[::-1]
    q = P.polyval(u, rev)
    dq = P.polyval(u, P.polyder(rev))
    return z * q / (n * q - u * dq)


def find_zeros(poly: FaberPolynomial, tol: float = 1e-12, max_iter: int = 500) -> CountingMeasure:
    """
    All zeros of a polynomial by simultaneous Aberth-Ehrlich iteration.

    Initial guesses lie on the circle of radius 1 + max |c_j/c_n|^{1/(n-j)}
    at golden-angle spacing. Each sweep updates all unconverged roots at once.
    A root is converged when its update drops below tol (relative for |z| > 1).

    Args:
        poly: Polynomial of degree >= 1
        tol: Update tolerance
        max_iter: Sweep budget

    Returns:
        CountingMeasure; on non-convergence a partial result with
        converged=False and per-root residuals
    """
    n = poly.n
    if n < 1:
        raise DomainError("find_zeros needs degree >= 1")
    coeffs = poly.coeffs
    lead = coeffs[-1]
    j = np.arange(n)
    with np.errstate(divide="ignore"):
        bound = np.max(np.abs(coeffs[:-1] / lead) ** (1.0 / (n - j)))
    radius = 1.0 + float(bound)
    roots = radius * np.exp(1j * np.mod(np.arange(n) * GOLDEN_ANGLE, 2.0 * np.pi))

    active = np.ones(n, dtype=bool)
    iterations = 0
    for iterations in range(1, max_iter + 1):
        idx = np.flatnonzero(active)
        x = roots[idx]
        with np.errstate(all="ignore"):
            value, slope = poly.value_and_derivative(x)
            ratio = value / slope
            bad = ~np.isfinite(ratio)
            if np.any(bad):
                ratio[bad] = _monomial_ratio(coeffs, x[bad])
            diff = x[:, None] - roots[None, :]
            diff[np.arange(idx.size), idx] = np.inf
            repulsion = np.sum(1.0 / diff, axis=1)
            delta = ratio / (1.0 - ratio * repulsion)
        delta[~np.isfinite(delta)] = 0.0
        roots[idx] = x - delta
        done = np.abs(delta) <= tol * np.maximum(1.0, np.abs(x))
        active[idx[done]] = False
        if not np.any(active):
            break

    norm = float(np.sum(np.abs(coeffs)))
    residuals = np.abs(poly(roots)) / norm
    converged = not np.any(active)
    if not converged:
        logger.warning(
            f"Aberth iteration for degree {n} left {int(np.count_nonzero(active))} root(s) "
            f"unconverged after {max_iter} sweeps"
        )
    logger.debug(f"find_zeros degree {n}: {iterations} sweeps, max residual {np.max(residuals):.2e}")
    return CountingMeasure(roots, n, residuals, converged, iterations)


def refine_clusters(measure: CountingMeasure, poly: FaberPolynomial, radius: float = 1e-2) -> CountingMeasure:
    """
    Collapse root clusters onto multiple roots.

    Roots within radius of each other (single linkage) form a cluster of size
    k; Newton on p^(k-1) from the cluster centroid locates the k-fold root.
    Clusters whose refined centre leaves the radius are kept as they are.
    """
    points = measure.points.copy()
    n = points.size
    parent = list(range(n))

    def find(i: int) -> int:
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    close = np.abs(points[:, None] - points[None, :]) <= radius
    for i, j in zip(*np.nonzero(np.triu(close, 1))):
        parent[find(int(i))] = find(int(j))
    groups: Dict[int, List[int]] = {}
    for i in range(n):
        groups.setdefault(find(i), []).append(i)

    for members in groups.values():
        k = len(members)
        if k < 2:
            continue
        centroid = complex(np.mean(points[members]))
        target = P.polyder(poly.coeffs, k - 1)
        slope = P.polyder(target)
        c = centroid
        for _ in range(50):
            d = complex(P.polyval(c, slope))
            if d == 0:
                break
            step = complex(P.polyval(c, target)) / d
            c -= step
            if abs(step) <= 1e-15 * max(1.0, abs(c)):
                break
        if abs(c - centroid) <= radius:
            points[members] = c
            logger.debug(f"Collapsed {k} roots near {centroid:.6g} onto a {k}-fold root")

    norm = float(np.sum(np.abs(poly.coeffs)))
    residuals = np.abs(P.polyval(points, poly.coeffs)) / norm
    return CountingMeasure(points, measure.n, residuals, measure.converged, measure.iterations)


def equilibrium_moments(bundle: MapBundle, k_max: int = DEFAULT_MOMENT_ORDER, nodes: int = 512) -> np.ndarray:
    """
    Holomorphic moments (1/2pi) int psi(e^{i theta})^k d theta, k = 0..k_max.

    psi^k is analytic outside the unit disk, so the trapezoidal rule is
    applied on |w| = 1.25 where it converges geometrically.
    """
    if nodes < 512:
        raise DomainError(f"equilibrium moments need nodes >= 512, got {nodes}")
    w = 1.25 * np.exp(2j * np.pi * np.arange(nodes) / nodes)
    values = bundle.map.value(w)
    return np.array([np.mean(values ** k) for k in range(k_max + 1)])


def _power_coefficients(bundle: MapBundle, k_max: int, depth: int) -> np.ndarray:
    """Laurent coefficients of psi^j, rows j = 0..k_max, columns powers k_max .. -depth."""
    R = 1.0 + 4.0 / depth
    M = 8 * depth
    w = R * np.exp(2j * np.pi * np.arange(M) / M)
    values = bundle.map.value(w)
    powers = np.arange(k_max, -depth - 1, -1)
    out = np.empty((k_max + 1, powers.size), dtype=complex)
    sample = np.ones(M, dtype=complex)
    for j in range(k_max + 1):
        spectrum = np.fft.fft(sample) / M
        out[j] = spectrum[powers % M] * R ** (-powers.astype(float))
        sample = sample * values
    return out


def equilibrium_mixed_moments(
    bundle: MapBundle, k_max: int = DEFAULT_MOMENT_ORDER, depth: int = 2048
) -> np.ndarray:
    """
    Mixed moments int z^j conj(z)^k d mu_L for j + k <= k_max.

    On |w| = 1, conj(psi) has the conjugated Laurent coefficients in reversed
    powers, so each moment is a Parseval sum over the coefficients of psi^j
    and psi^k.
    """
    coeffs = _power_coefficients(bundle, k_max, depth)
    out = np.zeros((k_max + 1, k_max + 1), dtype=complex)
    for j in range(k_max + 1):
        for k in range(k_max + 1 - j):
            out[j, k] = np.sum(coeffs[j] * np.conj(coeffs[k]))
    return out


def measure_distance(nu: CountingMeasure, mu_moments: np.ndarray, k_max: int = DEFAULT_MOMENT_ORDER) -> float:
    """max_k |m_k(nu) - m_k(mu)| over holomorphic moments k <= k_max."""
    mine = nu.moments(k_max)
    return float(np.max(np.abs(mine - np.asarray(mu_moments)[: k_max + 1])))


def measure_distance_mixed(nu: CountingMeasure, mu_mixed: np.ndarray, k_max: int = DEFAULT_MOMENT_ORDER) -> float:
    """max over j + k <= k_max of |m_{j,k}(nu) - m_{j,k}(mu)|."""
    mine = nu.mixed_moments(k_max)
    return float(np.max(np.abs(mine - np.asarray(mu_mixed)[: k_max + 1, : k_max + 1])))


def lemniscate_equilibrium_density(s: int, z: Any) -> np.ndarray:
    """Density |z|^{s-1}/(2pi) of the equilibrium measure against arc length on |z^s-1| = 1."""
    return np.abs(np.asarray(z, dtype=complex)) ** (s - 1) / (2.0 * np.pi)


@dataclass(frozen=True, eq=False)
class AccumulationProblem:
    """
    Data of the accumulation equation sum_k Ahat_k e^{2 pi i s_k/q_k}/(t - z_k) = 0.

    Attributes:
        bundle: Map bundle (for membership tests)
        hats: Ahat_k of the minimal corners
        poles: z_k of the minimal corners
        fractions: theta_k = p_k/q_k where declared rational, else None
        thetas: theta_k as floats
    """

    bundle: MapBundle
    hats: np.ndarray
    poles: np.ndarray
    fractions: Tuple[Optional[Fraction], ...]
    thetas: np.ndarray

    @classmethod
    def from_model(cls, model: InteriorModel) -> "AccumulationProblem":
        return cls(model.bundle, model.hats, model.poles, model.fractions, model.thetas)

    @property
    def u(self) -> int:
        return int(self.hats.size)

    @property
    def rational(self) -> bool:
        return all(frac is not None for frac in self.fractions)

    @property
    def q(self) -> Optional[int]:
        if not self.rational:
            return None
        q = 1
        for frac in self.fractions:
            assert frac is not None
            q = q * frac.denominator // math.gcd(q, frac.denominator)
        return q

    def residues(self, ell: int) -> np.ndarray:
        phases = []
        for frac in self.fractions:
            assert frac is not None
            phases.append(np.exp(2j * np.pi * ((ell * frac.numerator) % frac.denominator) / frac.denominator))
        return self.hats * np.array(phases)


@dataclass(frozen=True)
class AccumulationCandidate:
    """A root of the accumulation equation for the residue class n = ell mod q."""

    point: complex
    residue_class: int
    location: str

    @property
    def interior(self) -> bool:
        return self.location == "interior"

    def to_dict(self) -> Dict[str, Any]:
        return {
            "point": [float(self.point.real), float(self.point.imag)],
            "residue_class": self.residue_class,
            "location": self.location,
        }


def _numerator_roots(model: RationalModel) -> np.ndarray:
    """Roots of sum_k r_k prod_{j != k}(t - z_j)."""
    numerator = np.zeros(1, dtype=complex)
    for k, res in enumerate(model.residues):
        others = np.delete(model.poles, k)
        term = res * (P.polyfromroots(others) if others.size else np.ones(1, dtype=complex))
        numerator = P.polyadd(numerator, term)
    scale = float(np.max(np.abs(numerator))) or 1.0
    while numerator.size > 1 and abs(numerator[-1]) <= 1e-12 * scale:
        numerator = numerator[:-1]
    if numerator.size <= 1:
        return np.zeros(0, dtype=complex)
    return P.polyroots(numerator)


def accumulation_candidates(problem: AccumulationProblem) -> Tuple[List[AccumulationCandidate], List[int]]:
    """
    Candidates of every residue class, with their location relative to G.

    Returns:
        (candidates, degenerate residue classes)
    """
    q = problem.q
    if q is None:
        raise UnsupportedCaseError("rational accumulation points need all theta_k rational")
    candidates: List[AccumulationCandidate] = []
    degenerate: List[int] = []
    for ell in range(q):
        model = RationalModel.merged(problem.poles, problem.residues(ell), ell)
        if model.is_zero:
            degenerate.append(ell)
            continue
        roots = _numerator_roots(model)
        if roots.size == 0:
            continue
        labels = classify_points(problem.bundle, roots)
        candidates.extend(AccumulationCandidate(complex(t), ell, lab) for t, lab in zip(roots, labels))
    return candidates, degenerate


def accumulation_points_rational(problem: AccumulationProblem, dedup_tol: float = 1e-9) -> List[complex]:
    """
    Interior accumulation points when every theta_k is rational.

    For each class ell = 0..q-1 the equation is cleared to a polynomial of
    degree <= u-1; roots strictly inside G are kept and deduplicated.

    Raises:
        ConditionA3Error: If every class degenerates to 0 = 0
    """
    candidates, degenerate = accumulation_candidates(problem)
    q = problem.q or 1
    if len(degenerate) == q:
        raise ConditionA3Error("every accumulation equation degenerates; condition A.3 fails")
    if degenerate:
        warnings.warn(
            f"accumulation equations vanish for residue classes {degenerate}", ConditionA3Warning
        )
        logger.warning(f"Residue classes {degenerate} give identically zero H_n")
    points: List[complex] = []
    for cand in candidates:
        if cand.interior and all(abs(cand.point - p) > dedup_tol for p in points):
            points.append(cand.point)
    return points


@dataclass
class LocusDescriptor:
    """Line or circle carrying the interior accumulation set, clipped to G."""

    kind: str
    data: Dict[str, Any]
    segments: List[Tuple[complex, complex]] = field(default_factory=list)

    def distance(self, z: Any) -> np.ndarray:
        """Distance from points to the full (unclipped) line or circle."""
        z = np.asarray(z, dtype=complex)
        if self.kind == "line":
            anchor = complex(*self.data["point"])
            direction = complex(*self.data["direction"])
            return np.abs(((z - anchor) * np.conj(direction)).imag)
        center = complex(*self.data["center"])
        return np.abs(np.abs(z - center) - self.data["radius"])

    def to_dict(self) -> Dict[str, Any]:
        return {
            "kind": self.kind,
            "data": self.data,
            "segments": [[[a.real, a.imag], [b.real, b.imag]] for a, b in self.segments],
        }


def _clip_runs(bundle: MapBundle, samples: np.ndarray) -> List[Tuple[complex, complex]]:
    labels = classify_points(bundle, samples)
    runs: List[Tuple[complex, complex]] = []
    start: Optional[int] = None
    for i, lab in enumerate(labels + ["exterior"]):
        if lab == "interior" and start is None:
            start = i
        elif lab != "interior" and start is not None:
            runs.append((complex(samples[start]), complex(samples[i - 1])))
            start = None
    return runs


def accumulation_locus_u2_irrational(problem: AccumulationProblem, samples: int = 2048) -> LocusDescriptor:
    """
    Locus |Ahat_1 (t - z_2)| = |Ahat_2 (t - z_1)| for two minimal corners with
    irrational theta_2: a line when the moduli agree, otherwise an Apollonius
    circle. The trace in G is returned as sampled segments.
    """
    if problem.u != 2:
        raise UnsupportedCaseError(f"line/circle locus needs exactly two minimal corners, got {problem.u}")
    a1, a2 = (abs(h) for h in problem.hats)
    z1, z2 = (complex(p) for p in problem.poles)
    _, boundary = problem.bundle.boundary_samples
    span = float(np.max(np.abs(boundary - np.mean(boundary)))) * 1.5
    center_of_mass = complex(np.mean(boundary))

    if abs(a1 - a2) <= 1e-9 * max(a1, a2):
        mid = (z1 + z2) / 2.0
        direction = 1j * (z2 - z1) / abs(z2 - z1)
        # project the boundary's centre onto the line to centre the sampling window
        offset = ((center_of_mass - mid) * np.conj(direction)).real
        s = np.linspace(offset - span, offset + span, samples)
        pts = mid + s * direction
        locus = LocusDescriptor(
            "line",
            {"point": [mid.real, mid.imag], "direction": [direction.real, direction.imag]},
        )
    else:
        k = a2 / a1
        center = (z2 - k * k * z1) / (1.0 - k * k)
        radius = k * abs(z2 - z1) / abs(1.0 - k * k)
        angles = np.linspace(0.0, 2.0 * np.pi, samples, endpoint=False)
        pts = center + radius * np.exp(1j * angles)
        locus = LocusDescriptor("circle", {"center": [center.real, center.imag], "radius": radius})
    locus.segments = _clip_runs(problem.bundle, pts)
    return locus


@dataclass
class ZeroFreeReport:
    """Zeros found in the exterior region |phi(z)| >= 1 + margin."""

    checked: int
    offending: List[complex] = field(default_factory=list)
    moduli: List[float] = field(default_factory=list)

    @property
    def empty(self) -> bool:
        return not self.offending

    def to_dict(self) -> Dict[str, Any]:
        return {
            "checked": self.checked,
            "offending": [[z.real, z.imag] for z in self.offending],
            "phi_moduli": self.moduli,
            "empty": self.empty,
        }


def zero_free_check(measure: CountingMeasure, bundle: MapBundle, margin: float = 0.1) -> ZeroFreeReport:
    """Report zeros lying where |phi(z)| >= 1 + margin."""
    report = ZeroFreeReport(checked=int(measure.points.size))
    labels = classify_points(bundle, measure.points)
    for z, label in zip(measure.points, labels):
        if label != "exterior":
            continue
        modulus = abs(exterior_inverse(bundle, complex(z)))
        if modulus >= 1.0 + margin:
            report.offending.append(complex(z))
            report.moduli.append(float(modulus))
    if not report.empty:
        logger.info(f"{len(report.offending)} zero(s) of degree {measure.n} lie in the exterior region")
    return report


def interior_zeros(measure: CountingMeasure, bundle: MapBundle, margin: float = 0.1) -> np.ndarray:
    """Zeros inside G at distance >= margin from the boundary curve."""
    pts = measure.kept_points()
    if pts.size == 0:
        return pts
    labels = np.array(classify_points(bundle, pts))
    dist = boundary_distance(bundle, pts)
    return pts[(labels == "interior") & (dist >= margin)]


def interior_zero_count(measure: CountingMeasure, bundle: MapBundle, margin: float = 0.1) -> Dict[str, Any]:
    """Observed interior-zero count next to the J-1 corner bound (informational)."""
    found = interior_zeros(measure, bundle, margin)
    poles = {complex(round(c.z.real, 9), round(c.z.imag, 9)) for c in bundle.corners}
    return {
        "n": measure.n,
        "interior_zeros": int(found.size),
        "corner_bound": len(bundle.corners) - 1,
        "clustered_corners": len(poles) < len(bundle.corners),
    }


def accumulation_report(model: InteriorModel) -> Dict[str, Any]:
    """Accumulation prediction in the {"kind", "data"} report shape."""
    problem = AccumulationProblem.from_model(model)
    if problem.rational:
        candidates, degenerate = accumulation_candidates(problem)
        return {
            "kind": "points",
            "data": [c.to_dict() for c in candidates],
            "degenerate_classes": degenerate,
            "q": problem.q,
        }
    if problem.u == 2:
        return accumulation_locus_u2_irrational(problem).to_dict()
    raise UnsupportedCaseError(f"no accumulation predictor for u={problem.u} with irrational phases")
