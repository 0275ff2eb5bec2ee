"""
Validators and error types for eigenvalue computations.
Checks the invariants of profiles, grid domains and fields.
"""

import logging
from typing import List, Dict, Any, Optional

import numpy as np

logger = logging.getLogger(__name__)


class ValidationError(Exception):
    """Raised when validation fails."""
    pass


class ParameterError(ValidationError):
    """Raised when an operation's precondition is violated."""
    pass


class GeometryError(ValidationError):
    """Raised when a domain cannot be built or is inadmissible."""
    pass


class ResolutionError(GeometryError):
    """Raised when the grid spacing cannot resolve a boundary component."""
    pass


class SolverError(Exception):
    """Raised when a solver fails; carries the last diagnostics."""

    def __init__(self, message: str, diagnostics: Optional[Dict[str, Any]] = None):
        super().__init__(message)
        self.diagnostics = diagnostics or {}


class ConvergenceError(SolverError):
    """Raised when an iterative minimizer hits its iteration cap."""

    def __init__(self, message: str, history: Optional[List[float]] = None):
        super().__init__(message, {"iterations": len(history or [])})
        self.history = list(history or [])


class ConfigError(Exception):
    """Raised for invalid command-line or file configuration."""

    def __init__(self, message: str, key: Optional[str] = None):
        super().__init__(message)
        self.key = key


def require(condition: bool, message: str, error=ParameterError) -> None:
    """Raise ``error`` with ``message`` unless ``condition`` holds."""
    if not condition:
        raise error(message)


def require_exponent(p: float) -> None:
    """Validate the p-Laplacian exponent (1 < p < inf)."""
    require(np.isfinite(p) and p > 1.0, f"p must exceed 1 (got {p})")


class InvariantValidator:
    """Validates invariants of computed eigenfunctions and domains."""

    def __init__(self):
        """Initialize validator with empty error and warning lists."""
        self.errors: List[str] = []
        self.warnings: List[str] = []

    # =========================================================================
    # RADIAL PROFILES
    # =========================================================================

    def validate_profile_shape(self, r, value, flux, label: str = "profile") -> bool:
        """Validate lengths and ordering of a radial profile.

        Args:
            r: Radii
            value: Sampled u(r)
            flux: Sampled W(r)
            label: Name used in error messages

        Returns:
            True if valid
        """
        valid = True
        if not (len(r) == len(value) == len(flux)):
            self.errors.append(
                f"Shape Error [{label}]: lengths differ ({len(r)}, {len(value)}, {len(flux)})"
            )
            return False
        if len(r) < 2:
            self.errors.append(f"Shape Error [{label}]: needs at least 2 samples, got {len(r)}")
            valid = False
        elif np.any(np.diff(r) <= 0):
            self.errors.append(f"Shape Error [{label}]: radii are not strictly increasing")
            valid = False
        if not (np.all(np.isfinite(value)) and np.all(np.isfinite(flux))):
            self.errors.append(f"Shape Error [{label}]: non-finite samples")
            valid = False
        return valid

    def validate_profile_positive(self, value, label: str = "profile") -> bool:
        """Validate that u is strictly positive at interior samples.

        The first eigenfunction does not change sign, so a profile that
        vanishes or turns negative inside the annulus is rejected.
        """
        interior = np.asarray(value)[1:-1]
        if interior.size and np.min(interior) <= 0.0:
            self.errors.append(
                f"Sign Error [{label}]: u is not positive on the open annulus "
                f"(min {np.min(interior):.3e})"
            )
            return False
        return True

    # =========================================================================
    # GRID DOMAINS AND FIELDS
    # =========================================================================

    def validate_field_support(self, values, pinned_mask, label: str = "field") -> bool:
        """Validate that a field is finite and vanishes on pinned cells."""
        valid = True
        if not np.all(np.isfinite(values)):
            self.errors.append(f"Field Error [{label}]: non-finite values")
            valid = False
        if np.any(values[pinned_mask] != 0.0):
            self.errors.append(f"Field Error [{label}]: nonzero values on Dirichlet/exterior cells")
            valid = False
        return valid

    def validate_nonnegative(self, values, label: str = "field") -> bool:
        """Validate that a field has no negative values."""
        if np.any(values < 0.0):
            self.errors.append(f"Field Error [{label}]: negative values (min {np.min(values):.3e})")
            return False
        return True

    def validate_level_resolution(self, values, levels: int, label: str = "field") -> bool:
        """Warn when a field has fewer distinct positive values than ladder levels.

        Note: soft validation. Extra levels then repeat radii and are
        collapsed, so the profile is coarser than requested.

        Returns:
            True always (warnings only)
        """
        distinct = np.unique(np.asarray(values)[np.asarray(values) > 0.0]).size
        if distinct < levels:
            self.warnings.append(
                f"Resolution Warning [{label}]: {distinct} distinct positive values for {levels} levels"
            )
        return True

    # =========================================================================
    # BATCH VALIDATION
    # =========================================================================

    def get_validation_summary(self) -> Dict[str, Any]:
        """Get summary of validation results.

        Returns:
            Dictionary with error and warning counts and lists
        """
        return {
            "valid": len(self.errors) == 0,
            "error_count": len(self.errors),
            "warning_count": len(self.warnings),
            "errors": self.errors[:20],
            "warnings": self.warnings[:20],
        }

    def raise_if_invalid(self, error=ValidationError):
        """Log recorded warnings, then raise ``error`` with the first recorded error, if any."""
        for warning in self.warnings:
            logger.warning(f"  {warning}")
        if self.errors:
            for message in self.errors[1:]:
                logger.debug(f"  {message}")
            raise error(self.errors[0])
