"""Exception types shared across solver modules."""
from __future__ import annotations


class NumericalError(RuntimeError):
    """A solver failed to converge or violated a conservation check."""


class FitError(NumericalError):
    """Not enough structure in the data to perform the requested fit."""


class SingularEvaluationError(ZeroDivisionError):
    """Spectral kernel evaluated exactly on a pole with zero linewidth."""


class ConfigError(ValueError):
    """An experiment configuration failed validation."""
