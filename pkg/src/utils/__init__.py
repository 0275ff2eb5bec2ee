"""Utility modules package."""

from src.utils.validators import (
    InvariantValidator,
    ValidationError,
    ParameterError,
    GeometryError,
    ResolutionError,
    SolverError,
    ConvergenceError,
    ConfigError,
    require,
    require_exponent,
)

__all__ = [
    "InvariantValidator",
    "ValidationError",
    "ParameterError",
    "GeometryError",
    "ResolutionError",
    "SolverError",
    "ConvergenceError",
    "ConfigError",
    "require",
    "require_exponent",
]
