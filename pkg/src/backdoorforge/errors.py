"""backdoorforge.errors

Exception types raised by backdoorforge.

Everything derives from `ValueError`, so callers that only catch `ValueError`
keep working.
"""
from __future__ import annotations

from typing import Iterable, Tuple


class BackdoorForgeError(ValueError):
    """Base class for all backdoorforge errors."""


class GraphInputError(BackdoorForgeError):
    """Invalid graph, unknown node id, or an invalid query set."""


class ConditioningError(BackdoorForgeError):
    """A conditioning submatrix is singular (or numerically so).

    Attributes:
        labels: Labels of the variables whose covariance submatrix failed.
    """

    def __init__(self, message: str, labels: Iterable[str] = ()):
        super().__init__(message)
        self.labels: Tuple[str, ...] = tuple(labels)


class DegenerateColumnError(BackdoorForgeError):
    """A data column has zero sample variance."""


class DegenerateDirectionError(BackdoorForgeError):
    """beta^T Z has (numerically) zero variance."""


class NonDifferentiablePointError(BackdoorForgeError):
    """The objective was evaluated at gamma = 0."""


class SingularDesignError(BackdoorForgeError):
    """An OLS design matrix is rank deficient."""


class PopulationViewError(BackdoorForgeError):
    """A sampling-based test was requested on a population covariance."""


class ConfigError(BackdoorForgeError):
    """Invalid configuration values."""


class InsufficientSamplesError(BackdoorForgeError):
    """Too few rows for the requested covariance or test."""
