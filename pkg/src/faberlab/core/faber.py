#!/usr/bin/env python3
# -*- coding: utf-8 -*-

"""
Faber polynomial generation and evaluation.

Matching powers of w in the generating function

    psi'(w) / (psi(w) - z) = sum_n F_n(z) / w^{n+1},   psi = c w + c0 + sum c_j w^{-j},

gives F_0 = 1 and

    c F_k = (z - c0) F_{k-1} - sum_{j=1}^{k-1} c_j F_{k-1-j} - (k-1) c_{k-1}.

The same recurrence runs on monomial coefficients (faber_sequence) or on
values at points (faber_values). Monomial coefficients grow geometrically
with n, so large degrees are evaluated pointwise.
"""

import logging
from dataclasses import dataclass
from typing import Any, Dict, List, Optional, Tuple

import numpy as np

from faberlab.core.conformal import LaurentMap, MapBundle, exterior_inverse
from faberlab.core.exceptions import DomainError, NumericError, PrecisionError
from faberlab.core.special_fn import gen_binomial

logger = logging.getLogger(__name__)

DEFAULT_DEGREE_CAP = 300


@dataclass(frozen=True, eq=False)
class FaberPolynomial:
    """
    Degree-n Faber polynomial in the monomial basis.

    Attributes:
        n: Degree
        coeffs: n+1 complex coefficients, ascending powers
        source: Map the polynomial was generated from, if known
    """

    n: int
    coeffs: np.ndarray
    source: Optional[LaurentMap] = None

    def __post_init__(self) -> None:
        coeffs = np.asarray(self.coeffs, dtype=complex).ravel()
        if coeffs.size != self.n + 1:
            raise DomainError(f"degree {self.n} needs {self.n + 1} coefficients, got {coeffs.size}")
        if coeffs[-1] == 0:
            raise DomainError(f"leading coefficient of F_{self.n} vanishes")
        object.__setattr__(self, "coeffs", coeffs)

    @property
    def leading(self) -> complex:
        return complex(self.coeffs[-1])

    def __call__(self, z: Any) -> np.ndarray:
        """Evaluate, through the source map's recurrence when available."""
        if self.source is not None:
            values, _ = faber_values(self.source, self.n, z)
            return values[self.n]
        return eval_faber(self, z)

    def value_and_derivative(self, z: Any) -> Tuple[np.ndarray, np.ndarray]:
        if self.source is not None:
            values, slopes = faber_values(self.source, self.n, z, derivative=True)
            return values[self.n], slopes[self.n]
        z = np.asarray(z, dtype=complex)
        ascending = np.polynomial.polynomial
        return ascending.polyval(z, self.coeffs), ascending.polyval(z, ascending.polyder(self.coeffs))

    def to_dict(self) -> Dict[str, Any]:
        return {
            "n": int(self.n),
            "coeffs": [[float(c.real), float(c.imag)] for c in self.coeffs],
        }


def _check_truncation(lmap: LaurentMap, n_max: int) -> None:
    if n_max < 0:
        raise DomainError(f"degree must be non-negative, got {n_max}")
    if lmap.K < n_max - 1:
        raise PrecisionError(
            f"Laurent truncation K={lmap.K} is too short for degree {n_max}; "
            f"need K >= {n_max - 1}",
            required_K=n_max - 1,
        )
    if n_max > DEFAULT_DEGREE_CAP:
        logger.warning(f"Degree {n_max} exceeds the default cap {DEFAULT_DEGREE_CAP}")


def faber_sequence(bundle: MapBundle, n_max: int) -> List[FaberPolynomial]:
    """
    F_0 .. F_{n_max} as monomial coefficient vectors.

    Args:
        bundle: Map bundle (its Laurent tail must reach c_{n_max-1})
        n_max: Highest degree

    Returns:
        List of FaberPolynomial carrying the bundle's map as source

    Raises:
        PrecisionError: If the truncation is too short
    """
    lmap = bundle.map
    _check_truncation(lmap, n_max)
    c, c0 = lmap.leading, lmap.constant
    tail = lmap.padded_tail(max(n_max, 1))

    table = np.zeros((n_max + 1, n_max + 1), dtype=complex)
    table[0, 0] = 1.0
    for k in range(1, n_max + 1):
        row = np.zeros(n_max + 1, dtype=complex)
        row[1 : k + 1] += table[k - 1, :k]
        row[:k] -= c0 * table[k - 1, :k]
        if k >= 2:
            row[: k - 1] -= tail[: k - 1] @ table[k - 2 :: -1, : k - 1]
            row[0] -= (k - 1) * tail[k - 2]
        table[k] = row / c

    logger.debug(f"Generated Faber sequence up to degree {n_max} for {bundle.name}")
    return [FaberPolynomial(k, table[k, : k + 1].copy(), lmap) for k in range(n_max + 1)]


def faber_values(
    lmap: LaurentMap,
    n_max: int,
    z: Any,
    derivative: bool = False,
) -> Tuple[np.ndarray, Optional[np.ndarray]]:
    """
    Values F_0(z) .. F_{n_max}(z) at an array of points.

    Args:
        lmap: Laurent map
        n_max: Highest degree
        z: Point or array of points
        derivative: Also return F_k'(z)

    Returns:
        (values, slopes) with shape (n_max+1,) + shape(z); slopes is None
        unless requested
    """
    _check_truncation(lmap, n_max)
    z = np.asarray(z, dtype=complex)
    flat = z.ravel()
    c, c0 = lmap.leading, lmap.constant
    tail = lmap.padded_tail(max(n_max, 1))
    shift = flat - c0

    values = np.zeros((n_max + 1, flat.size), dtype=complex)
    values[0] = 1.0
    slopes = np.zeros_like(values) if derivative else None
    for k in range(1, n_max + 1):
        acc = shift * values[k - 1]
        if k >= 2:
            acc -= tail[: k - 1] @ values[k - 2 :: -1]
            acc -= (k - 1) * tail[k - 2]
        values[k] = acc / c
        if slopes is not None:
            dacc = values[k - 1] + shift * slopes[k - 1]
            if k >= 2:
                dacc -= tail[: k - 1] @ slopes[k - 2 :: -1]
            slopes[k] = dacc / c

    shape = (n_max + 1,) + z.shape
    return values.reshape(shape), (slopes.reshape(shape) if slopes is not None else None)


def faber_lemniscate_closed(s: int, n: int) -> FaberPolynomial:
    """
    Closed form for the lemniscate |z^s - 1| = 1 with n = s*m + l:

        F_n(z) = sum_{j=0}^{m} (-1)^j binom(m + l/s, j) z^{s(m-j)+l}.
    """
    if int(s) != s or s < 2:
        raise DomainError(f"lemniscate needs an integer s >= 2, got {s}")
    if n < 0:
        raise DomainError(f"degree must be non-negative, got {n}")
    m, l = divmod(n, s)
    coeffs = np.zeros(n + 1, dtype=complex)
    for j in range(m + 1):
        coeffs[s * (m - j) + l] = (-1) ** j * gen_binomial(m + l / s, j)
    return FaberPolynomial(n, coeffs)


def eval_faber(poly: FaberPolynomial, z: Any) -> np.ndarray:
    """Horner evaluation of the monomial coefficients."""
    return np.polyval(poly.coeffs[::-1], np.asarray(z, dtype=complex))


def contour_oracle_sequence(
    bundle: MapBundle,
    n_max: int,
    z: complex,
    R: Optional[float] = None,
    M: Optional[int] = None,
) -> np.ndarray:
    """
    F_0(z) .. F_{n_max}(z) from the Cauchy integral over |t| = R.

    Trapezoidal rule on M nodes; when z lies outside the level curve L_R the
    winding index of psi(t) - z vanishes and phi(z)^n is added.

    Raises:
        NumericError: If z is numerically on L_R
    """
    lmap = bundle.map
    if R is None:
        R = min(1.5, 1.0 + 2.0 / (n_max + 1))
    if R <= 1.0:
        raise DomainError(f"contour radius R={R} must exceed 1")
    if M is None:
        M = max(512, 8 * (n_max + lmap.K))

    t = R * np.exp(2j * np.pi * np.arange(M) / M)
    gap = lmap.value(t) - z
    if np.min(np.abs(gap)) < 1e-8:
        raise NumericError(f"{z} lies on the level curve |w| = {R}; choose a different R")
    kernel = t * lmap.derivative(t) / gap

    powers = np.ones(M, dtype=complex)
    out = np.empty(n_max + 1, dtype=complex)
    for n in range(n_max + 1):
        out[n] = np.mean(powers * kernel)
        powers *= t

    winding = out[0].real
    if abs(winding) < 0.5:
        phi = exterior_inverse(bundle, z)
        out += phi ** np.arange(n_max + 1)
    return out


def contour_oracle(
    bundle: MapBundle,
    n: int,
    z: complex,
    R: Optional[float] = None,
    M: Optional[int] = None,
) -> complex:
    """F_n(z) by contour integration; independent check of the recurrence."""
    if n < 0:
        raise DomainError(f"degree must be non-negative, got {n}")
    if R is None:
        R = min(1.5, 1.0 + 2.0 / (n + 1))
    return complex(contour_oracle_sequence(bundle, n, z, R, M)[n])
