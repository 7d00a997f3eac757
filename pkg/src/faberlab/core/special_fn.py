#!/usr/bin/env python3
# -*- coding: utf-8 -*-

"""
Special functions used by the asymptotic formulas.

Provides log-gamma, generalized binomial coefficients and the moment family

    alpha_{beta,m}(n) = integral_0^1 x^n (1-x)^beta log^m(1-x) dx

computed by an exact recurrence in (m, n), together with its leading-order
asymptotic form and an independent quadrature oracle.
"""

import math
import logging
import threading
from dataclasses import dataclass
from typing import Dict, List

import numpy as np
from scipy import integrate, special

from faberlab.core.exceptions import DomainError, NumericError

logger = logging.getLogger(__name__)

MAX_LOG_POWER = 8
MAX_RECURRENCE_DEGREE = 100_000
MAX_ASYMPTOTIC_DEGREE = 1_000_000


@dataclass(frozen=True)
class AlphaParams:
    """
    Parameters of alpha_{beta,m}(n).

    Attributes:
        beta: Exponent of (1 - x), must exceed -1
        m: Power of the logarithm, 0 <= m <= 8
        n: Monomial degree, n >= 0
    """

    beta: float
    m: int
    n: int

    def __post_init__(self) -> None:
        if not self.beta > -1.0:
            raise DomainError(f"alpha diverges for beta={self.beta} (need beta > -1)")
        if self.m < 0 or self.m > MAX_LOG_POWER:
            raise DomainError(f"log power m={self.m} outside supported range 0..{MAX_LOG_POWER}")
        if self.n < 0:
            raise DomainError(f"degree n={self.n} must be non-negative")


def log_gamma(x: float) -> float:
    """
    Natural logarithm of the gamma function for positive arguments.

    Args:
        x: Positive real argument

    Returns:
        ln Gamma(x)

    Raises:
        DomainError: If x is not positive
    """
    if not x > 0:
        raise DomainError(f"log_gamma requires x > 0, got {x}")
    return float(special.gammaln(x))


def gen_binomial(a: float, b: int) -> float:
    """Generalized binomial coefficient a(a-1)...(a-b+1)/b! for integer b >= 0."""
    if b < 0:
        raise DomainError(f"gen_binomial requires b >= 0, got {b}")
    if b == 0:
        return 1.0
    k = np.arange(b, dtype=float)
    return float(np.prod((a - k) / (k + 1.0)))


def binomial_gamma(a: float, b: float) -> float:
    """
    Gamma-ratio binomial Gamma(a+1) / (Gamma(b+1) Gamma(a-b+1)) for real a, b.

    Signs are tracked through the reflection region with gammasgn, so negative
    non-integer lower arguments are handled. A pole of 1/Gamma in the
    denominator gives zero.

    Args:
        a: Upper argument
        b: Lower argument

    Returns:
        The binomial coefficient value

    Raises:
        DomainError: If Gamma(a+1) itself has a pole
    """
    def _is_pole(x: float) -> bool:
        return x <= 0 and float(x).is_integer()

    if _is_pole(a + 1.0):
        raise DomainError(f"binomial_gamma: Gamma({a + 1.0}) has a pole")
    if _is_pole(b + 1.0) or _is_pole(a - b + 1.0):
        return 0.0

    sign = (
        special.gammasgn(a + 1.0)
        * special.gammasgn(b + 1.0)
        * special.gammasgn(a - b + 1.0)
    )
    log_mag = special.gammaln(a + 1.0) - special.gammaln(b + 1.0) - special.gammaln(a - b + 1.0)
    return float(sign * np.exp(log_mag))


class AlphaTable:
    """
    Memoized rows of alpha_{beta,m}(n) for one beta.

    Rows are extended on demand by doubling. Reads of already computed entries
    take no lock; growth is serialized.
    """

    def __init__(self, beta: float) -> None:
        self.beta = beta
        self._rows: List[np.ndarray] = []
        self._size = 0
        self._lock = threading.Lock()

    def _build(self, size: int) -> List[np.ndarray]:
        beta = self.beta
        n = np.arange(size, dtype=float)
        # P[n] = prod_{j<=n} j/(j+beta+1); every recurrence step is a same-sign update
        log_p = special.gammaln(n + 1.0) + special.gammaln(beta + 2.0) - special.gammaln(n + beta + 2.0)
        p = np.exp(log_p)

        base = np.exp(special.gammaln(beta + 1.0) + special.gammaln(n + 1.0) - special.gammaln(n + beta + 2.0))
        rows = [base]
        for m in range(MAX_LOG_POWER):
            start = (-1.0) ** (m + 1) * math.factorial(m + 1) / (beta + 1.0) ** (m + 2)
            forcing = -(m + 1) * rows[m] / (n + beta + 1.0)
            forcing[0] = 0.0
            rows.append(p * (start + np.cumsum(forcing / p)))
        return rows

    def get(self, m: int, n: int) -> float:
        """Return alpha_{beta,m}(n), growing the table if needed."""
        if n >= self._size:
            with self._lock:
                if n >= self._size:
                    size = max(64, self._size)
                    while size <= n:
                        size *= 2
                    size = min(size, MAX_RECURRENCE_DEGREE + 1)
                    logger.debug(f"Extending alpha table beta={self.beta} to {size} entries")
                    self._rows = self._build(size)
                    self._size = size
        return float(self._rows[m][n])


_tables: Dict[float, AlphaTable] = {}
_tables_lock = threading.Lock()


def _table_for(beta: float) -> AlphaTable:
    table = _tables.get(beta)
    if table is None:
        with _tables_lock:
            table = _tables.setdefault(beta, AlphaTable(beta))
    return table


def alpha(params: AlphaParams) -> float:
    """
    Exact alpha_{beta,m}(n) from the integration-by-parts recurrence

        alpha_{m+1}(n) = [n alpha_{m+1}(n-1) - (m+1) alpha_m(n)] / (n+beta+1)

    with alpha_0(n) = B(n+1, beta+1) and alpha_m(0) = (-1)^m m!/(beta+1)^(m+1).

    Args:
        params: Validated parameters, n <= 100000

    Returns:
        The integral value; its sign is (-1)^m
    """
    if params.n > MAX_RECURRENCE_DEGREE:
        raise DomainError(
            f"alpha recurrence supports n <= {MAX_RECURRENCE_DEGREE}, got {params.n}; "
            f"use alpha_asymptotic"
        )
    return _table_for(float(params.beta)).get(params.m, params.n)


def alpha_asymptotic(params: AlphaParams) -> float:
    """Leading form Gamma(beta+1) n! (-log n)^m / Gamma(n+beta+2)."""
    n, beta, m = params.n, params.beta, params.m
    if n < 2:
        raise DomainError(f"alpha_asymptotic requires n >= 2, got {n}")
    if n > MAX_ASYMPTOTIC_DEGREE:
        raise DomainError(f"alpha_asymptotic supports n <= {MAX_ASYMPTOTIC_DEGREE}, got {n}")
    log_mag = special.gammaln(beta + 1.0) + special.gammaln(n + 1.0) - special.gammaln(n + beta + 2.0)
    return float(np.exp(log_mag) * (-math.log(n)) ** m)


def alpha_quadrature_oracle(params: AlphaParams, nodes: int = 200) -> float:
    """
    Adaptive quadrature of alpha under x = 1 - exp(-t).

    The integrand (1-e^{-t})^n e^{-(beta+1)t} (-t)^m peaks near t = log n, so
    the half line is split there.

    Args:
        params: Validated parameters
        nodes: Subinterval budget handed to the adaptive integrator (>= 64)

    Returns:
        The integral value

    Raises:
        NumericError: If the estimated error exceeds 1e-9 relative
    """
    if nodes < 64:
        raise DomainError(f"quadrature oracle needs nodes >= 64, got {nodes}")

    n, beta, m = params.n, params.beta, params.m

    def integrand(t: float) -> float:
        return float((-math.expm1(-t)) ** n * math.exp(-(beta + 1.0) * t) * (-t) ** m)

    split = math.log(n + 1.0) + 1.0
    head, head_err = integrate.quad(integrand, 0.0, split, limit=nodes, epsabs=0.0, epsrel=1e-12)
    tail, tail_err = integrate.quad(integrand, split, np.inf, limit=nodes, epsabs=0.0, epsrel=1e-12)
    value = head + tail
    error = head_err + tail_err
    if error > 1e-9 * abs(value):
        raise NumericError(
            f"alpha quadrature did not converge for {params}: estimated error {error:.3e}",
            achieved=error / abs(value) if value else float("inf"),
        )
    return float(value)
