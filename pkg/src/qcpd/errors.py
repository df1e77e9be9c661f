"""Exception types shared across the package.

Everything derives from :class:`QcpdError`, itself a ``ValueError``, so
callers that don't care about the fine distinctions can catch a single
type (the CLI maps any of these to exit code 1).
"""
from __future__ import annotations


class QcpdError(ValueError):
    """Base class for domain and validity errors raised by this package."""


class InvalidMeasurementError(QcpdError):
    """A measurement strength lies outside the admissible interval [c, 1/c]."""


class OutOfValidityError(QcpdError):
    """A closed-form expression was requested outside its validity range."""


class SingularityError(QcpdError):
    """A formula hits a removable-pole/zero-denominator configuration."""


class NumericDomainError(QcpdError):
    """An iterative computation left its numeric domain (e.g. a recursion
    denominator crossed zero).  Carries the 1-based position at which the
    iteration failed, when known."""

    def __init__(self, message: str, position: int | None = None):
        super().__init__(message)
        self.position = position
