"""Exception hierarchy shared by every module."""
from __future__ import annotations


class PredwaveError(Exception):
    """Base class for all library errors."""


class InvalidParameterError(PredwaveError, ValueError):
    """A parameter violates its declared invariant."""


class DomainError(PredwaveError, ValueError):
    """An argument lies outside the domain where a formula is defined."""


class NoRealRootsError(DomainError):
    """A quadratic or cubic has no admissible real root."""


class RegimeError(PredwaveError, ValueError):
    """The requested quantity does not exist in this parameter regime."""


class ConfigurationError(PredwaveError, ValueError):
    """A simulation configuration is inconsistent."""


class NumericalBlowupError(PredwaveError, FloatingPointError):
    """Non-finite values appeared during time stepping."""

    def __init__(self, message: str, node: int, t: float):
        super().__init__(f"{message} (node {node}, t={t:.6g})")
        self.node = node
        self.t = t
