#!/usr/bin/env python3
# -*- coding: utf-8 -*-

"""
Exception types raised by the faberlab core modules.
"""

from typing import Optional


class FaberLabError(Exception):
    """Base class for all faberlab errors."""


class DomainError(FaberLabError, ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class NotOnBoundaryError(DomainError):
    """A point expected on the boundary curve has no unimodular preimage."""


class PoleError(DomainError):
    """A rational model was evaluated too close to one of its poles."""


class UnsupportedCaseError(DomainError):
    """The requested case is outside what the implementation handles."""


class NumericError(FaberLabError, ArithmeticError):
    """A numerical procedure failed to reach its target accuracy."""

    def __init__(self, message: str, achieved: Optional[float] = None) -> None:
        super().__init__(message)
        self.achieved = achieved


class PrecisionError(NumericError):
    """The Laurent truncation is too short for the requested degree."""

    def __init__(self, message: str, required_K: int) -> None:
        super().__init__(message)
        self.required_K = required_K


class ExtractionError(NumericError):
    """Extracted Laurent coefficients disagree with the closed-form map."""

    def __init__(self, message: str, residual: float) -> None:
        super().__init__(message, achieved=residual)
        self.residual = residual


class UnderflowError(NumericError):
    """A normalizer is too small to divide by."""


class MapSpecError(FaberLabError, ValueError):
    """A map specification is malformed or inconsistent."""


class ConditionA3Warning(UserWarning):
    """Some subsequence of the interior model functions vanishes identically."""


class ConditionA3Error(DomainError):
    """Every residue class of the interior model degenerates to zero."""
