#!/usr/bin/env python3
# -*- coding: utf-8 -*-

"""
Asymptotic models of Faber polynomials inside, on and outside the boundary.

Outside the curve F_n ~ phi^n. On the curve F_n ~ Phi_n, a weighted sum over
unimodular preimages. Inside, F_n divided by

    C_1 e^{i(n+Lambda_1)Theta_1} alpha_{Lambda_1-1, M_1}(n)

tends to the rational function H_n(z) = sum_k Ahat_k e^{2 pi i n theta_k}/(z - z_k)
over the corners with minimal decay pair.
"""

import math
import logging
import warnings
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Dict, List, Optional, Tuple

import numpy as np

from faberlab.core.conformal import (
    CornerData,
    MapBundle,
    boundary_preimages,
    classify_point,
    exterior_inverse,
)
from faberlab.core.exceptions import (
    ConditionA3Warning,
    DomainError,
    PoleError,
    UnderflowError,
)
from faberlab.core.special_fn import AlphaParams, alpha, binomial_gamma

logger = logging.getLogger(__name__)

POLE_TOL = 1e-12
RESIDUE_TOL = 1e-10


def corner_normalizer(corner: CornerData) -> float:
    """C_k = 1/(Gamma(-lam)Gamma(lam)) = -lam sin(pi lam)/pi, or (-1)^(Lambda-1) m Lambda."""
    if not corner.relevant:
        raise DomainError("irrelevant corner has no normalizing constant")
    if not corner.integer_angle:
        return -corner.lam * math.sin(math.pi * corner.lam) / math.pi
    big_lambda = int(round(corner.pair[0]))
    return float((-1) ** (big_lambda - 1) * corner.m * big_lambda)


def _theta_fraction(first: CornerData, other: CornerData) -> Optional[Fraction]:
    if first.theta_over_pi is None or other.theta_over_pi is None:
        return None
    frac = ((other.theta_over_pi - first.theta_over_pi) / 2) % 1
    return frac if frac != 0 else Fraction(1)


@dataclass(frozen=True, eq=False)
class InteriorModel:
    """
    Interior asymptotic data of a bundle.

    Attributes:
        bundle: Source map bundle
        c1: Normalizing constant C_1
        corners: Minimal corners 1..u
        hats: Ahat_k = A_k e^{i Lambda_1 (Theta_k - Theta_1)}
        thetas: theta_k in (0, 1] with e^{2 pi i theta_k} = e^{i(Theta_k - Theta_1)}
        fractions: Exact theta_k where every corner angle is declared rational
        mixed_constants: True if minimal corners would carry different C_k
    """

    bundle: MapBundle
    c1: float
    corners: Tuple[CornerData, ...]
    hats: np.ndarray
    thetas: np.ndarray
    fractions: Tuple[Optional[Fraction], ...]
    mixed_constants: bool = False

    @property
    def big_lambda(self) -> float:
        return self.bundle.leading_pair[0]

    @property
    def big_m(self) -> int:
        return self.bundle.leading_pair[1]

    @property
    def theta1(self) -> float:
        return self.corners[0].theta

    @property
    def poles(self) -> np.ndarray:
        return np.array([corner.z for corner in self.corners], dtype=complex)

    @property
    def rational(self) -> bool:
        return all(frac is not None for frac in self.fractions)

    @property
    def period(self) -> Optional[int]:
        """Least common multiple of the theta_k denominators."""
        if not self.rational:
            return None
        q = 1
        for frac in self.fractions:
            assert frac is not None
            q = q * frac.denominator // math.gcd(q, frac.denominator)
        return q

    def phases(self, n: int) -> np.ndarray:
        """e^{2 pi i n theta_k}, reduced exactly when theta_k is rational."""
        out = np.empty(len(self.corners), dtype=complex)
        for k, corner in enumerate(self.corners):
            frac = self.fractions[k]
            if frac is not None:
                turn = (n * frac.numerator) % frac.denominator
                out[k] = np.exp(2j * np.pi * turn / frac.denominator)
            else:
                out[k] = np.exp(1j * n * (corner.theta - self.theta1))
        return out


def build_interior_model(bundle: MapBundle) -> InteriorModel:
    """Assemble C_1, Ahat_k and theta_k from the bundle's minimal corners."""
    corners = bundle.minimal_corners
    first = corners[0]
    constants = [corner_normalizer(corner) for corner in corners]
    mixed = any(abs(c - constants[0]) > 1e-12 for c in constants)
    if mixed:
        logger.warning(f"Minimal corners of {bundle.name} carry different normalizing constants")

    big_lambda = bundle.leading_pair[0]
    hats = np.array(
        [corner.A * np.exp(1j * big_lambda * (corner.theta - first.theta)) for corner in corners]
    )
    fractions = tuple(_theta_fraction(first, corner) for corner in corners)
    thetas = np.array(
        [
            float(frac) if frac is not None else _float_theta(first, corner)
            for frac, corner in zip(fractions, corners)
        ]
    )
    return InteriorModel(bundle, constants[0], corners, hats, thetas, fractions, mixed)


def _float_theta(first: CornerData, other: CornerData) -> float:
    value = ((other.theta - first.theta) / (2.0 * math.pi)) % 1.0
    return value if value > 0 else 1.0


@dataclass(frozen=True, eq=False)
class RationalModel:
    """z -> sum_k residues[k] / (z - poles[k]) with coincident poles merged."""

    poles: np.ndarray
    residues: np.ndarray
    n: int = 0

    @classmethod
    def merged(cls, poles: np.ndarray, residues: np.ndarray, n: int = 0) -> "RationalModel":
        scale = float(np.sum(np.abs(residues))) or 1.0
        kept_poles: List[complex] = []
        kept_res: List[complex] = []
        for pole, res in zip(poles, residues):
            for i, other in enumerate(kept_poles):
                if abs(pole - other) <= POLE_TOL * (1.0 + abs(pole)):
                    kept_res[i] += res
                    break
            else:
                kept_poles.append(complex(pole))
                kept_res.append(complex(res))
        live = [i for i, r in enumerate(kept_res) if abs(r) > RESIDUE_TOL * scale]
        return cls(
            np.array([kept_poles[i] for i in live], dtype=complex),
            np.array([kept_res[i] for i in live], dtype=complex),
            n,
        )

    @property
    def is_zero(self) -> bool:
        return self.residues.size == 0

    def __call__(self, z: Any) -> np.ndarray:
        z = np.asarray(z, dtype=complex)
        if self.is_zero:
            return np.zeros_like(z)
        gap = z[..., None] - self.poles
        if np.any(np.abs(gap) < POLE_TOL):
            raise PoleError(f"H_{self.n} evaluated within {POLE_TOL} of a pole")
        return np.sum(self.residues / gap, axis=-1)


def interior_model(model: InteriorModel, n: int) -> RationalModel:
    """H_n as a rational evaluator; the zero evaluator when all residues cancel."""
    return RationalModel.merged(model.poles, model.hats * model.phases(n), n)


def interior_normalizer(model: InteriorModel, n: int) -> complex:
    """C_1 e^{i(n+Lambda_1)Theta_1} alpha_{Lambda_1-1,M_1}(n)."""
    if n < 2:
        raise DomainError(f"interior normalizer needs n >= 2, got {n}")
    a = alpha(AlphaParams(model.big_lambda - 1.0, model.big_m, n))
    value = model.c1 * np.exp(1j * (n + model.big_lambda) * model.theta1) * a
    if abs(value) < 1e-300:
        raise UnderflowError(f"interior normalizer underflows at n={n}")
    return complex(value)


def normalize_interior(model: InteriorModel, n: int, value: Any) -> Any:
    """F*_n = F_n / normalizer."""
    return np.asarray(value, dtype=complex) / interior_normalizer(model, n)


def exterior_model(bundle: MapBundle, n: int, z: complex) -> complex:
    """phi(z)^n for z outside the boundary curve."""
    if n < 0:
        raise DomainError(f"degree must be non-negative, got {n}")
    return complex(exterior_inverse(bundle, z) ** n)


def boundary_model(bundle: MapBundle, n: int, z: complex, tol: float = 1e-8) -> complex:
    """Phi_n(z) = sum_j lamhat_j phi_j(z)^n over the unimodular preimages of z."""
    if n < 0:
        raise DomainError(f"degree must be non-negative, got {n}")
    preimages = boundary_preimages(bundle, z, tol)
    return complex(sum(p.weight * p.w ** n for p in preimages))


def refined_model(model: InteriorModel, n: int, z: complex, tol: float = 1e-8) -> complex:
    """
    Exterior or boundary model plus the interior correction term
    normalizer * H_n(z), for z outside or on the curve away from corners.
    """
    bundle = model.bundle
    label = classify_point(bundle, z)
    if label == "interior":
        raise DomainError(f"refined model is defined outside or on the curve, {z} is interior")
    base = exterior_model(bundle, n, z) if label == "exterior" else boundary_model(bundle, n, z, tol)
    correction = interior_normalizer(model, n) * complex(interior_model(model, n)(z))
    return base + correction


def _check_petal(s: int, l: int, z: complex) -> None:
    if int(s) != s or s < 2:
        raise DomainError(f"lemniscate needs an integer s >= 2, got {s}")
    if not 1 <= l <= s - 1:
        raise DomainError(f"residue l={l} must lie in 1..{s - 1}")
    if z == 0 or not abs(z ** s - 1.0) < 1.0:
        raise DomainError(f"{z} is outside the petal region |z^s - 1| < 1")


def subsequence_bracket(s: int, l: int, z: complex) -> complex:
    """First-order coefficient (s-l)/(s z^s) - (s-1)(s-l)(2s-l)/(2 s^3)."""
    _check_petal(s, l, z)
    return (s - l) / (s * z ** s) - (s - 1) * (s - l) * (2 * s - l) / (2.0 * s ** 3)


def lemniscate_subsequence_normalizer(s: int, l: int, m: int) -> float:
    """(-1)^m / binom(sm+l, l/s-1), the Gamma-ratio binomial with negative lower argument."""
    if m < 1:
        raise DomainError(f"m must be positive, got {m}")
    return (-1) ** m / binomial_gamma(s * m + l, l / s - 1.0)


def lemniscate_subsequence_model(s: int, l: int, m: int, z: complex) -> Tuple[complex, complex]:
    """
    Interior limit of the normalized subsequence F_{sm+l} on the lemniscate:

        (-1)^m binom(sm+l, l/s-1)^{-1} F_{sm+l}(z) = s^{1-l/s} z^{l-s} [1 + r_m(z)],

    with r_m(z) = bracket / m + o(1/m).

    Returns:
        (leading model value, first-order correction bracket/m)
    """
    _check_petal(s, l, z)
    if m < 1:
        raise DomainError(f"m must be positive, got {m}")
    leading = s ** (1.0 - l / s) * z ** (l - s)
    return complex(leading), complex(subsequence_bracket(s, l, z) / m)


@dataclass(frozen=True)
class RateClass:
    """Decay class n^{-n_power} (log n)^{log_power} of a corner remainder."""

    kind: str
    n_power: float
    log_power: int
    label: str

    def evaluate(self, n: int) -> float:
        return float(n ** (-self.n_power) * math.log(n) ** self.log_power)

    def to_dict(self) -> Dict[str, Any]:
        return {"kind": self.kind, "n_power": self.n_power, "log_power": self.log_power, "label": self.label}


def error_rate_class(corner: CornerData) -> RateClass:
    """Decay rate of the interior remainder contributed by a relevant corner."""
    if not corner.relevant:
        raise DomainError("error rate classes are defined for relevant corners only")
    lam = corner.lam
    if corner.integer_angle:
        assert corner.m is not None and corner.r is not None
        if corner.m >= 2:
            return RateClass("inverse_log", 0.0, -1, "1/log n")
        power = math.floor((corner.r + 1) / lam) - 1
        return RateClass("log_power", 1.0, power, f"n^-1 (log n)^{power}")
    if abs(lam - 0.5) < 1e-12:
        return RateClass("half", 1.0, 1, "n^-1 log n")
    if lam < 1.0:
        return RateClass("power", lam, 0, f"n^-{lam:g}")
    return RateClass("inverse", 1.0, 0, "n^-1")


@dataclass
class A3Report:
    """Outcome of the condition A.3 check."""

    violated: bool
    vanishing_classes: List[int] = field(default_factory=list)
    note: str = ""

    def to_dict(self) -> Dict[str, Any]:
        return {"violated": self.violated, "vanishing_classes": self.vanishing_classes, "note": self.note}


def a3_check(model: InteriorModel) -> A3Report:
    """
    Check whether some subsequence of H_n vanishes identically.

    Rational phases are checked class by class. Irrational phases can only
    cancel within a group of coincident poles whose moduli admit a closed
    polygon (2 max|Ahat| <= sum |Ahat|).
    """
    q = model.period
    if q is not None:
        vanishing = [ell for ell in range(q) if interior_model(model, ell).is_zero]
        report = A3Report(bool(vanishing), vanishing, f"checked {q} residue classes")
    else:
        groups: List[List[float]] = []
        anchors: List[complex] = []
        for pole, hat in zip(model.poles, model.hats):
            for i, anchor in enumerate(anchors):
                if abs(pole - anchor) <= POLE_TOL * (1.0 + abs(pole)):
                    groups[i].append(abs(hat))
                    break
            else:
                anchors.append(complex(pole))
                groups.append([abs(hat)])
        closable = all(len(g) > 1 and 2 * max(g) <= sum(g) for g in groups)
        report = A3Report(closable, [], "irrational phases, polygon criterion")
    if report.violated:
        logger.warning(f"Condition A.3 fails for {model.bundle.name}: {report.note}")
        warnings.warn(f"condition A.3 fails for {model.bundle.name}", ConditionA3Warning)
    return report
