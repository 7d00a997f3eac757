#!/usr/bin/env python3
# -*- coding: utf-8 -*-

"""
Exterior conformal maps psi: {|w| > 1} -> Omega.

A map is held as a truncated Laurent series at infinity, optionally backed by
a closed-form evaluator. Maps travel together with their corner metadata in a
MapBundle. The module also solves psi(w) = z on and outside the unit circle.
"""

import math
import logging
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Callable, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from faberlab.core.exceptions import (
    DomainError,
    ExtractionError,
    MapSpecError,
    NotOnBoundaryError,
    NumericError,
)

logger = logging.getLogger(__name__)

ArrayLike = Union[complex, float, np.ndarray]

DEFAULT_TRUNCATION = 256
BOUNDARY_SAMPLES = 8192
BOUNDARY_BAND = 1e-6
_PAIR_TOL = 1e-12


@dataclass(frozen=True)
class ClosedFormMap:
    """Vectorized evaluator for psi and psi' on |w| >= 1."""

    value: Callable[[np.ndarray], np.ndarray]
    derivative: Callable[[np.ndarray], np.ndarray]
    description: str = ""


@dataclass(frozen=True, eq=False)
class LaurentMap:
    """
    psi(w) = leading*w + constant + sum_{j=1}^{K} tail[j-1] * w^{-j}.

    Attributes:
        leading: Coefficient of w (capacity up to a unimodular factor)
        constant: Coefficient of w^0
        tail: Coefficients of w^-1 .. w^-K
        closed_form: Optional exact evaluator used in place of the series
    """

    leading: complex
    constant: complex
    tail: np.ndarray
    closed_form: Optional[ClosedFormMap] = None

    def __post_init__(self) -> None:
        if self.leading == 0:
            raise DomainError("Laurent map needs a non-zero leading coefficient")
        object.__setattr__(self, "leading", complex(self.leading))
        object.__setattr__(self, "constant", complex(self.constant))
        object.__setattr__(self, "tail", np.asarray(self.tail, dtype=complex).ravel())

    @property
    def K(self) -> int:
        return int(self.tail.size)

    def series_value(self, w: ArrayLike) -> np.ndarray:
        w = np.asarray(w, dtype=complex)
        u = 1.0 / w
        return self.leading * w + self.constant + u * np.polyval(self.tail[::-1], u)

    def series_derivative(self, w: ArrayLike) -> np.ndarray:
        w = np.asarray(w, dtype=complex)
        u = 1.0 / w
        weighted = self.tail * np.arange(1, self.K + 1)
        return self.leading - u * u * np.polyval(weighted[::-1], u)

    def value(self, w: ArrayLike) -> np.ndarray:
        if self.closed_form is not None:
            return self.closed_form.value(np.asarray(w, dtype=complex))
        return self.series_value(w)

    def derivative(self, w: ArrayLike) -> np.ndarray:
        if self.closed_form is not None:
            return self.closed_form.derivative(np.asarray(w, dtype=complex))
        return self.series_derivative(w)

    def as_closed_form(self) -> ClosedFormMap:
        """Wrap the truncated series itself as an evaluator."""
        return ClosedFormMap(self.series_value, self.series_derivative, "laurent series")

    def padded_tail(self, length: int) -> np.ndarray:
        """Tail coefficients c_1..c_length, zero-padded past K."""
        out = np.zeros(length, dtype=complex)
        out[: min(length, self.K)] = self.tail[:length]
        return out


@dataclass(frozen=True)
class CornerData:
    """
    Metadata of one boundary corner z_k = psi(omega_k).

    Attributes:
        omega: Unimodular preimage e^{i theta}
        theta: Argument of omega in [0, 2pi)
        lam: Exterior angle divided by pi, in (0, 2]
        z: Corner point psi(omega)
        A: Leading constant of psi(w) - z ~ A (w - omega)^lam
        r: Integer exponent of the logarithmic term (only for lam in {1, 2})
        m: Power of the logarithm (only for lam in {1, 2})
        theta_over_pi: Exact theta/pi when declared rational
    """

    omega: complex
    theta: float
    lam: float
    z: complex
    A: complex
    r: Optional[int] = None
    m: Optional[int] = None
    theta_over_pi: Optional[Fraction] = None

    def __post_init__(self) -> None:
        if not 0.0 < self.lam <= 2.0:
            raise DomainError(f"corner exterior angle lambda={self.lam} outside (0, 2]")
        if abs(abs(self.omega) - 1.0) > 1e-12 or abs(self.omega - np.exp(1j * self.theta)) > 1e-10:
            raise DomainError(f"corner omega={self.omega} is not exp(i*{self.theta})")
        if (self.r is None) != (self.m is None):
            raise DomainError("corner log data needs both r and m")
        if self.r is not None and not self.integer_angle:
            raise DomainError(f"log terms declared at a corner with lambda={self.lam}")
        if self.m is not None and self.m < 1:
            raise DomainError(f"log power m={self.m} must be positive")

    @property
    def integer_angle(self) -> bool:
        return abs(self.lam - 1.0) < _PAIR_TOL or abs(self.lam - 2.0) < _PAIR_TOL

    @property
    def relevant(self) -> bool:
        return not self.integer_angle or self.r is not None

    @property
    def pair(self) -> Tuple[float, int]:
        """(Lambda_k, M_k) decay pair; irrelevant corners sort last."""
        if not self.integer_angle:
            return (self.lam, 0)
        if self.r is None or self.m is None:
            return (math.inf, 0)
        return (self.r + self.lam, self.m - 1)


def _pair_key(corner: CornerData) -> Tuple[float, int]:
    big_lambda, big_m = corner.pair
    return (big_lambda, -big_m)


def _same_pair(a: Tuple[float, int], b: Tuple[float, int]) -> bool:
    return abs(a[0] - b[0]) <= _PAIR_TOL and a[1] == b[1]


@dataclass(frozen=True, eq=False)
class MapBundle:
    """
    A Laurent map with its corners ordered by decay pair.

    Corners 1..u share the minimal (Lambda, M); ordering is
    (Lambda_k, M_k) < (Lambda_j, M_j) iff Lambda_k < Lambda_j, or equal Lambda
    with M_k > M_j.
    """

    map: LaurentMap
    corners: Tuple[CornerData, ...]
    kind: str = "laurent"
    name: str = ""
    params: Dict[str, object] = field(default_factory=dict)

    def __post_init__(self) -> None:
        ordered = tuple(sorted(self.corners, key=_pair_key))
        if not ordered or not ordered[0].relevant:
            raise MapSpecError("map declares no relevant corner")
        object.__setattr__(self, "corners", ordered)

    @property
    def leading_pair(self) -> Tuple[float, int]:
        return self.corners[0].pair

    @property
    def u(self) -> int:
        lead = self.leading_pair
        return sum(1 for corner in self.corners if corner.relevant and _same_pair(corner.pair, lead))

    @property
    def minimal_corners(self) -> Tuple[CornerData, ...]:
        return self.corners[: self.u]

    @cached_property
    def boundary_samples(self) -> Tuple[np.ndarray, np.ndarray]:
        """Angles and points of the closed boundary polyline psi(e^{i theta})."""
        uniform = np.linspace(0.0, 2.0 * np.pi, BOUNDARY_SAMPLES, endpoint=False)
        refine = np.geomspace(1e-8, 0.05, 160)
        extra = [uniform]
        for corner in self.corners:
            extra.append(np.array([corner.theta]))
            extra.append(corner.theta + refine)
            extra.append(corner.theta - refine)
        theta = np.unique(np.mod(np.concatenate(extra), 2.0 * np.pi))
        points = self.map.value(np.exp(1j * theta))
        for corner in self.corners:
            points[np.argmin(np.abs(theta - corner.theta))] = corner.z
        return theta, points


def _binomial_series(exponent: float, count: int) -> np.ndarray:
    """Coefficients binom(exponent, j) for j = 0..count-1."""
    out = np.ones(count)
    for j in range(1, count):
        out[j] = out[j - 1] * (exponent - j + 1) / j
    return out


def lemniscate_map(s: int, K: int = DEFAULT_TRUNCATION) -> MapBundle:
    """
    Exterior map psi(w) = (w^s + 1)^{1/s} of the lemniscate |z^s - 1| = 1.

    Evaluated as w (1 + w^{-s})^{1/s} with the principal power, which is
    analytic for |w| > 1. The tail is the binomial series of (1 + w^{-s})^{1/s}.

    Args:
        s: Number of petals, s >= 2
        K: Laurent truncation

    Returns:
        MapBundle with s corners at omega_k = e^{i(2k-1)pi/s}, all with z_k = 0
    """
    if int(s) != s or s < 2:
        raise DomainError(f"lemniscate needs an integer s >= 2, got {s}")
    if K < 1:
        raise DomainError(f"truncation K={K} must be positive")
    s = int(s)
    inv = 1.0 / s

    def value(w: np.ndarray) -> np.ndarray:
        return w * np.power(1.0 + w ** (-s), inv)

    def derivative(w: np.ndarray) -> np.ndarray:
        with np.errstate(divide="ignore", invalid="ignore"):
            return np.power(1.0 + w ** (-s), (1.0 - s) / s)

    tail = np.zeros(K, dtype=complex)
    series = _binomial_series(inv, K // s + 2)
    for j in range(1, series.size):
        index = s * j - 1
        if index <= K:
            tail[index - 1] = series[j]

    corners = []
    for k in range(1, s + 1):
        frac = Fraction(2 * k - 1, s)
        theta = float(frac) * math.pi
        corners.append(
            CornerData(
                omega=complex(np.exp(1j * theta)),
                theta=theta,
                lam=inv,
                z=0j,
                A=complex(s ** inv * np.exp(1j * theta * (1.0 - inv))),
                theta_over_pi=frac,
            )
        )

    lmap = LaurentMap(1.0, 0.0, tail, ClosedFormMap(value, derivative, f"(w^{s}+1)^(1/{s})"))
    return MapBundle(lmap, tuple(corners), kind="lemniscate", name=f"lemniscate-{s}", params={"s": s})


def two_corner_map(
    theta1: float,
    K: int = DEFAULT_TRUNCATION,
    theta1_over_pi: Optional[Fraction] = None,
) -> MapBundle:
    """
    Two-corner map psi(w) = 1/B(1/w) with

        B(u) = (u - omega)^{1/2} + (u - conj(omega))^{1/2} + i omega^{1/2} - i conj(omega)^{1/2},

    omega = e^{i theta1}, principal square roots. B(0) = 0 and B'(0) = sin(theta1/2),
    so the capacity is 1/sin(theta1/2). Both corners have exterior angle pi/2.

    Args:
        theta1: Angle of the first corner preimage, pi/2 <= theta1 < pi
        K: Laurent truncation for the numerically extracted tail
        theta1_over_pi: Exact theta1/pi if rational

    Returns:
        MapBundle with corners at omega and conj(omega)
    """
    if theta1_over_pi is not None:
        theta1 = float(theta1_over_pi) * math.pi
    if not math.pi / 2 <= theta1 < math.pi:
        raise DomainError(f"two-corner map needs pi/2 <= theta1 < pi, got {theta1}")

    omega = complex(np.exp(1j * theta1))
    omega_bar = omega.conjugate()
    # i sqrt(omega) = -sqrt(-omega) and -i sqrt(conj omega) = -sqrt(-conj omega)
    root = np.sqrt(-omega)
    root_bar = np.sqrt(-omega_bar)

    def quotient(w: np.ndarray) -> np.ndarray:
        # B(u) / u, free of cancellation for small u
        u = 1.0 / w
        return 1.0 / (np.sqrt(u - omega) + root) + 1.0 / (np.sqrt(u - omega_bar) + root_bar)

    def value(w: np.ndarray) -> np.ndarray:
        return w / quotient(w)

    def derivative(w: np.ndarray) -> np.ndarray:
        u = 1.0 / w
        with np.errstate(divide="ignore", invalid="ignore"):
            slope = 0.5 * (1.0 / np.sqrt(u - omega) + 1.0 / np.sqrt(u - omega_bar))
            return slope / quotient(w) ** 2

    closed = ClosedFormMap(value, derivative, f"two-corner theta1={theta1:.12g}")
    lmap = extract_laurent(closed, K)

    z1 = complex(value(np.asarray(omega)))
    z2 = complex(value(np.asarray(omega_bar)))
    theta2_over_pi = 2 - theta1_over_pi if theta1_over_pi is not None else None
    corners = (
        CornerData(omega, theta1, 0.5, z1, -1j * omega_bar * z1 * z1, theta_over_pi=theta1_over_pi),
        CornerData(
            omega_bar,
            2.0 * math.pi - theta1,
            0.5,
            z2,
            -1j * omega * z2 * z2,
            theta_over_pi=theta2_over_pi,
        ),
    )
    params: Dict[str, object] = {"theta1": theta1}
    if theta1_over_pi is not None:
        params["theta1_over_pi"] = str(theta1_over_pi)
    return MapBundle(lmap, corners, kind="two_corner", name=f"two-corner-{theta1:.6f}", params=params)


def extract_laurent(
    evaluator: ClosedFormMap,
    K: int = DEFAULT_TRUNCATION,
    R: Optional[float] = None,
    M: Optional[int] = None,
) -> LaurentMap:
    """
    Laurent coefficients of psi at infinity by FFT on |w| = R.

    The coefficient of w^{-t} is recovered as fft[-t]/M * R^t. The default
    radius min(1.5, 1 + 4/K) keeps R^K near e^4 so roundoff is not amplified.

    Args:
        evaluator: Closed-form map analytic on |w| > 1
        K: Number of tail coefficients
        R: Sampling radius (> 1)
        M: Number of samples, at least 8K

    Returns:
        LaurentMap carrying the evaluator as its closed form

    Raises:
        ExtractionError: If the series disagrees with the evaluator on |w| = 2
    """
    if K < 1:
        raise DomainError(f"truncation K={K} must be positive")
    if R is None:
        R = min(1.5, 1.0 + 4.0 / K)
    if R <= 1.0:
        raise DomainError(f"sampling radius R={R} must exceed 1")
    if M is None:
        M = max(8 * K, 4096)
    M = max(M, 8 * K)

    nodes = R * np.exp(2j * np.pi * np.arange(M) / M)
    samples = evaluator.value(nodes)
    spectrum = np.fft.fft(samples) / M

    leading = spectrum[1] / R
    constant = spectrum[0]
    t = np.arange(1, K + 1)
    tail = spectrum[(-t) % M] * R ** t

    lmap = LaurentMap(leading, constant, tail, evaluator)

    check = 2.0 * np.exp(2j * np.pi * (np.arange(64) + 0.5) / 64)
    exact = evaluator.value(check)
    residual = float(np.max(np.abs(lmap.series_value(check) - exact)) / np.max(np.abs(exact)))
    logger.debug(f"Extracted Laurent tail K={K} R={R:.4f} M={M}: residual {residual:.2e}")
    if residual > 1e-10:
        raise ExtractionError(
            f"Laurent extraction residual {residual:.3e} exceeds 1e-10 (K={K}, R={R})",
            residual=residual,
        )
    return lmap


@dataclass(frozen=True)
class BoundaryPreimage:
    """A unimodular solution of psi(w) = z, tagged with its corner if any."""

    w: complex
    corner: Optional[CornerData] = None

    @property
    def weight(self) -> float:
        return self.corner.lam if self.corner is not None else 1.0


def boundary_preimages(
    bundle: MapBundle,
    z: complex,
    tol: float = 1e-8,
    samples: int = 4096,
) -> List[BoundaryPreimage]:
    """
    All w on |w| = 1 with psi(w) = z.

    Declared corners matching z are taken as they are; the remaining solutions
    come from a dense angular scan of |psi(e^{i theta}) - z| whose local minima
    are refined by Gauss-Newton in theta.

    Args:
        bundle: Map bundle
        z: Point on the boundary curve
        tol: Acceptance and deduplication tolerance
        samples: Scan resolution (>= 4096)

    Returns:
        The preimages; their count is eta(z)

    Raises:
        NotOnBoundaryError: If no preimage is found within tol
    """
    lmap = bundle.map
    scale = 1.0 + abs(z)
    found: List[BoundaryPreimage] = [
        BoundaryPreimage(corner.omega, corner)
        for corner in bundle.corners
        if abs(corner.z - z) <= tol * scale
    ]

    samples = max(samples, 4096)
    step = 2.0 * np.pi / samples
    theta = np.arange(samples) * step
    gap = np.abs(lmap.value(np.exp(1j * theta)) - z)
    is_min = (gap <= np.roll(gap, 1)) & (gap <= np.roll(gap, -1))

    for index in np.flatnonzero(is_min):
        t = float(theta[index])
        if any(abs(np.angle(np.exp(1j * t) / p.w)) < 4 * step for p in found if p.corner is not None):
            continue
        for _ in range(60):
            w = np.exp(1j * t)
            residual = complex(lmap.value(w)) - z
            slope = 1j * w * complex(lmap.derivative(w))
            if not np.isfinite(slope) or abs(slope) == 0:
                break
            delta = (residual.real * slope.real + residual.imag * slope.imag) / abs(slope) ** 2
            t -= delta
            if abs(delta) < 1e-15:
                break
        w = complex(np.exp(1j * t))
        if abs(complex(lmap.value(w)) - z) > tol * scale:
            continue
        if any(abs(w - p.w) <= max(tol, 1e-7) for p in found):
            continue
        found.append(BoundaryPreimage(w))

    if not found:
        best = float(np.min(gap))
        raise NotOnBoundaryError(f"{z} is not on the boundary curve (closest sample {best:.3e})")
    logger.debug(f"boundary_preimages({z}): {len(found)} preimage(s)")
    return found


def _segment_distance(points: np.ndarray, z: np.ndarray) -> np.ndarray:
    a = points[None, :]
    b = np.roll(points, -1)[None, :]
    zz = z[:, None]
    ab = b - a
    length2 = np.abs(ab) ** 2
    length2[length2 == 0] = 1.0
    t = np.clip(((zz - a) * ab.conj()).real / length2, 0.0, 1.0)
    return np.min(np.abs(zz - (a + t * ab)), axis=1)


def _winding(points: np.ndarray, z: np.ndarray) -> np.ndarray:
    rel = points[None, :] - z[:, None]
    turn = np.angle(np.roll(rel, -1, axis=1) / rel)
    return np.rint(np.sum(turn, axis=1) / (2.0 * np.pi)).astype(int)


def boundary_distance(bundle: MapBundle, z: ArrayLike) -> np.ndarray:
    """Distance from each z to the sampled boundary polyline."""
    zs = np.atleast_1d(np.asarray(z, dtype=complex))
    _, points = bundle.boundary_samples
    out = np.empty(zs.size)
    for start in range(0, zs.size, 64):
        out[start : start + 64] = _segment_distance(points, zs[start : start + 64])
    return out


def classify_points(bundle: MapBundle, z: ArrayLike, band: float = BOUNDARY_BAND) -> List[str]:
    """
    Classify points as "interior", "boundary" or "exterior".

    Uses the winding number of the boundary polyline; points within band of
    the polyline are "boundary".
    """
    zs = np.atleast_1d(np.asarray(z, dtype=complex))
    _, points = bundle.boundary_samples
    labels: List[str] = []
    for start in range(0, zs.size, 64):
        chunk = zs[start : start + 64]
        dist = _segment_distance(points, chunk)
        wind = _winding(points, chunk)
        for d, k in zip(dist, wind):
            if d <= band:
                labels.append("boundary")
            elif k != 0:
                labels.append("interior")
            else:
                labels.append("exterior")
    return labels


def classify_point(bundle: MapBundle, z: complex, band: float = BOUNDARY_BAND) -> str:
    return classify_points(bundle, np.array([z]), band)[0]


def exterior_inverse(bundle: MapBundle, z: complex) -> complex:
    """
    phi(z): the unique w with |w| > 1 and psi(w) = z.

    Newton iteration from (z - c0)/c for large |z|, otherwise from the best
    few points of a radial grid; steps are damped to stay outside |w| = 1.

    Raises:
        DomainError: If z is inside or on the boundary curve
        NumericError: If Newton fails from every seed
    """
    lmap = bundle.map
    z = complex(z)
    label = classify_point(bundle, z)
    if label != "exterior":
        raise DomainError(f"{z} is {label}, no exterior preimage exists")

    tol = 1e-12 * (1.0 + abs(z))
    _, points = bundle.boundary_samples
    reach = float(np.max(np.abs(points)))

    seeds: List[complex] = []
    if abs(z) > 10.0 * (reach + 1.0):
        seeds.append((z - lmap.constant) / lmap.leading)
    radii = np.geomspace(1.02, 3.0, 24)
    angles = np.linspace(0.0, 2.0 * np.pi, 32, endpoint=False)
    grid = (radii[:, None] * np.exp(1j * angles)[None, :]).ravel()
    gaps = np.abs(lmap.value(grid) - z)
    seeds.extend(complex(w) for w in grid[np.argsort(gaps)[:4]])

    for seed in seeds:
        w = seed
        for _ in range(100):
            residual = complex(lmap.value(np.asarray(w))) - z
            if abs(residual) <= tol:
                return w
            slope = complex(lmap.derivative(np.asarray(w)))
            if slope == 0 or not np.isfinite(slope):
                break
            step = residual / slope
            trial = w - step
            for _ in range(30):
                if abs(trial) > 1.0:
                    break
                step *= 0.5
                trial = w - step
            w = trial
        logger.debug(f"exterior_inverse: seed {seed} did not converge for z={z}")
    raise NumericError(f"Newton iteration for the exterior preimage of {z} did not converge")


def estimate_corner_constant(
    evaluator: ClosedFormMap,
    omega: complex,
    theta: float,
    lam: float,
    z: Optional[complex] = None,
    eps0: float = 1e-3,
    max_exponent: float = 2.0,
) -> complex:
    """
    Richardson estimate of A = lim (psi(w) - z_k) / (w - omega)^lam along the
    exterior radius w = omega (1 + eps).

    The ratio is fitted by least squares to A + sum_p a_p eps^p over the local
    expansion exponents p = l + j*lam - lam, 0 < p <= max_exponent.
    """
    if z is None:
        z = complex(evaluator.value(np.asarray(omega)))
    exponents = sorted(
        {
            round(l + j * lam - lam, 12)
            for l in range(0, int(max_exponent) + 2)
            for j in range(0, int(max_exponent / lam) + 2)
            if 0.0 < l + j * lam - lam <= max_exponent + 1e-12
        }
    )
    levels = len(exponents) + 5
    eps = eps0 * 0.5 ** np.arange(levels)
    w = omega * (1.0 + eps)
    ratio = (evaluator.value(w) - z) / (eps ** lam * np.exp(1j * lam * theta))
    design = np.column_stack([np.ones(levels)] + [(eps / eps0) ** p for p in exponents]).astype(complex)
    solution, *_ = np.linalg.lstsq(design, ratio, rcond=None)
    return complex(solution[0])


def unit_circle_points(count: int, avoid: Sequence[float] = (), gap: float = 0.0) -> np.ndarray:
    """Evenly spaced angles on [0, 2pi) skipping those within gap of avoid."""
    theta = np.linspace(0.0, 2.0 * np.pi, 4 * count, endpoint=False) + np.pi / (4 * count)
    keep = np.ones(theta.size, dtype=bool)
    for a in avoid:
        keep &= np.abs(np.angle(np.exp(1j * (theta - a)))) >= gap
    theta = theta[keep]
    index = np.linspace(0, theta.size - 1, count).round().astype(int)
    return theta[index]
