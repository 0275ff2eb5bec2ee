"""
Data models for space forms, eigen solves and verification reports.
Uses dataclasses for clean, type-hinted value objects.
"""

import math
from dataclasses import dataclass, field
from typing import Optional, List, Dict, Any, Tuple
from enum import Enum

import numpy as np

from src.utils.validators import InvariantValidator, ParameterError, ValidationError


class BoundaryLayout(Enum):
    """Which boundary component carries the Dirichlet condition."""
    INNER_NEUMANN_OUTER_DIRICHLET = "lambda"
    INNER_DIRICHLET_OUTER_NEUMANN = "mu"
    NEUMANN_ONLY = "neumann"


class ProblemKind(Enum):
    """Radial eigenvalue problems."""
    LAMBDA = "lambda"
    MU = "mu"
    DIRICHLET_BALL = "ball"


class CellClass(Enum):
    """Grid cell classification."""
    EXTERIOR = 0
    INTERIOR = 1
    DIRICHLET = 2
    NEUMANN = 3


class Metric(Enum):
    """Planar metrics: flat, or the unit sphere via stereographic projection."""
    FLAT = "flat"
    SPHERE = "sphere"


class ShapeKind(Enum):
    """Rasterizable planar shapes."""
    DISK = "disk"
    RECTANGLE = "rectangle"
    ANNULUS = "annulus"
    DISK_MINUS_SQUARE = "disk-minus-square"
    ELLIPSE_ANNULUS = "ellipse-annulus"


class Relation(Enum):
    """Relation asserted by a comparison report."""
    GE = "GE"
    LE = "LE"
    EQ = "EQ"


# =============================================================================
# GEOMETRY
# =============================================================================

@dataclass(frozen=True)
class SpaceForm:
    """Model space of dimension n and constant curvature kappa."""
    n: int
    kappa: float = 0.0

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 1:
            raise ParameterError(f"dimension n must be an integer >= 1 (got {self.n})")
        if not math.isfinite(self.kappa):
            raise ParameterError(f"curvature must be finite (got {self.kappa})")

    @property
    def diameter(self) -> float:
        """Largest admissible radius (pi/sqrt(kappa) on spheres, inf otherwise)."""
        if self.kappa > 0:
            return math.pi / math.sqrt(self.kappa)
        return math.inf


@dataclass(frozen=True)
class AnnulusSpec:
    """Geodesic annulus B(r2) minus B(r1) with a boundary layout."""
    r1: float
    r2: float
    layout: BoundaryLayout = BoundaryLayout.INNER_NEUMANN_OUTER_DIRICHLET

    def __post_init__(self):
        if not (0.0 < self.r1 < self.r2):
            raise ParameterError(f"annulus needs 0 < r1 < r2 (got r1={self.r1}, r2={self.r2})")
        if self.layout is BoundaryLayout.NEUMANN_ONLY:
            raise ParameterError("annulus layout must carry a Dirichlet component")

    def check_fits(self, sf: SpaceForm) -> None:
        """Validate that the annulus lies inside the model diameter."""
        if self.r2 >= sf.diameter:
            raise ParameterError(
                f"r2={self.r2} must be below pi/sqrt(kappa)={sf.diameter:.6g} for kappa={sf.kappa}"
            )


# =============================================================================
# RADIAL SOLVES
# =============================================================================

@dataclass(frozen=True)
class SolverOptions:
    """Tolerances and limits of the shooting solver."""
    eig_rel_tol: float = 1e-8
    ode_tol: float = 1e-10
    max_bracket_doublings: int = 60
    start_offset: Optional[float] = None  # defaults to 1e-6 * (r2 - r1)
    boundary_tol: float = 1e-6
    samples: int = 1025
    min_steps: int = 512
    scan_bracket: bool = False

    def __post_init__(self):
        for name in ("eig_rel_tol", "ode_tol", "boundary_tol"):
            if not getattr(self, name) > 0:
                raise ParameterError(f"{name} must be positive")
        if self.max_bracket_doublings < 1 or self.samples < 2 or self.min_steps < 1:
            raise ParameterError("max_bracket_doublings, samples and min_steps must be positive")
        if self.start_offset is not None and not self.start_offset > 0:
            raise ParameterError("start_offset must be positive")


@dataclass(frozen=True)
class RadialProfile:
    """Sampled radial eigenfunction u and flux W = J|u'|^(p-2)u'."""
    r: np.ndarray
    value: np.ndarray
    flux: np.ndarray

    def __post_init__(self):
        r = np.asarray(self.r, dtype=float)
        value = np.asarray(self.value, dtype=float)
        flux = np.asarray(self.flux, dtype=float)
        validator = InvariantValidator()
        validator.validate_profile_shape(r, value, flux)
        validator.raise_if_invalid(ValidationError)
        for name, arr in (("r", r), ("value", value), ("flux", flux)):
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)

    def __len__(self) -> int:
        return len(self.r)


@dataclass(frozen=True)
class EigenResult:
    """Converged radial eigenvalue with its normalized profile."""
    eigenvalue: float
    profile: RadialProfile
    boundary_residual: float
    ode_residual: float
    bisection_iterations: int
    normalization: float
    problem: ProblemKind
    p: float
    space_form: SpaceForm
    inner_radius: float
    outer_radius: float
    bracket: Tuple[float, float] = (0.0, 0.0)


# =============================================================================
# PLANAR GRIDS
# =============================================================================

@dataclass(frozen=True)
class ShapeSpec:
    """Planar shape with a boundary-condition layout.

    dims per kind: disk (R,), rectangle (a, b), annulus (R_out, R_in),
    disk-minus-square (R, side), ellipse-annulus (a, b, r_in).
    """
    kind: ShapeKind
    dims: Tuple[float, ...]
    hole_offset: float = 0.0
    layout: BoundaryLayout = BoundaryLayout.INNER_NEUMANN_OUTER_DIRICHLET

    @property
    def has_hole(self) -> bool:
        return self.kind in (ShapeKind.ANNULUS, ShapeKind.DISK_MINUS_SQUARE, ShapeKind.ELLIPSE_ANNULUS)

    @property
    def hole_centered(self) -> bool:
        return self.hole_offset == 0.0


@dataclass(frozen=True, eq=False)
class GridDomain:
    """Rasterized planar domain on a node grid of spacing h."""
    nx: int
    ny: int
    h: float
    cell_class: np.ndarray  # (ny, nx) int8 of CellClass values
    hole_class: np.ndarray  # (ny, nx) bool, True on the inner component
    metric: Metric
    origin: Tuple[float, float]
    shape: ShapeSpec

    def coordinates(self) -> Tuple[np.ndarray, np.ndarray]:
        """Node coordinates as (X, Y) arrays of shape (ny, nx)."""
        x = self.origin[0] + self.h * np.arange(self.nx)
        y = self.origin[1] + self.h * np.arange(self.ny)
        return np.meshgrid(x, y)

    def mask(self, cls: CellClass) -> np.ndarray:
        return self.cell_class == cls.value

    @property
    def interior(self) -> np.ndarray:
        return self.mask(CellClass.INTERIOR)

    def conformal_factor(self) -> np.ndarray:
        """rho = 2/(1+|x|^2) for the sphere metric, 1 for the flat one."""
        if self.metric is Metric.FLAT:
            return np.ones((self.ny, self.nx))
        X, Y = self.coordinates()
        return 2.0 / (1.0 + X ** 2 + Y ** 2)

    def mass_weights(self) -> np.ndarray:
        """Per-node volume weights h^2 rho^2."""
        return self.h ** 2 * self.conformal_factor() ** 2

    def energy_weights(self, p: float) -> np.ndarray:
        """Per-node gradient weights h^2 rho^(2-p)."""
        return self.h ** 2 * self.conformal_factor() ** (2.0 - p)

    def volume(self) -> float:
        """Metric volume of the interior cells."""
        return float(np.sum(self.mass_weights()[self.interior]))

    def hole_volume(self) -> float:
        """Metric volume of the nodes enclosed by the inner boundary."""
        return float(np.sum(self.mass_weights()[self.hole_class]))


@dataclass(frozen=True, eq=False)
class PlanarField:
    """Nodal field over a grid domain."""
    values: np.ndarray
    domain: GridDomain

    def __post_init__(self):
        values = np.array(self.values, dtype=float)
        if values.shape != (self.domain.ny, self.domain.nx):
            raise ParameterError(
                f"field shape {values.shape} does not match domain {(self.domain.ny, self.domain.nx)}"
            )
        validator = InvariantValidator()
        pinned = ~(self.domain.interior | self.domain.mask(CellClass.NEUMANN))
        validator.validate_field_support(values, pinned)
        validator.raise_if_invalid(ParameterError)
        values.setflags(write=False)
        object.__setattr__(self, "values", values)


@dataclass(frozen=True, eq=False)
class EigenResult2D:
    """Result of a planar Rayleigh-quotient minimization."""
    eigenvalue: float
    field: PlanarField
    iterations: int
    final_step: float
    energy_history: List[float] = field(default_factory=list)
    method: str = "lbfgs"
    p: float = 2.0


# =============================================================================
# VERIFICATION REPORTS
# =============================================================================

@dataclass(frozen=True)
class ComparisonReport:
    """Signed comparison of two computed quantities.

    expected is False for relations known to fail on the given input
    (for instance the radial bound on an off-center hole); such a report
    is as expected when it does not pass.
    """
    lhs: float
    rhs: float
    relation: Relation
    slack: float
    tolerance: float
    passed: bool
    provenance: str
    theorem: str = ""
    parameters: Dict[str, Any] = field(default_factory=dict)
    expected: bool = True

    @property
    def as_expected(self) -> bool:
        return self.passed == self.expected

    @classmethod
    def compare(
        cls,
        lhs: float,
        rhs: float,
        relation: Relation,
        tolerance: float,
        provenance: str,
        theorem: str = "",
        parameters: Optional[Dict[str, Any]] = None,
        expected: bool = True,
    ) -> "ComparisonReport":
        """Build a report, computing the relative slack and the verdict."""
        scale = abs(rhs) if rhs != 0 else 1.0
        if relation is Relation.GE:
            slack = (lhs - rhs) / scale
        elif relation is Relation.LE:
            slack = (rhs - lhs) / scale
        else:
            slack = -abs(lhs - rhs) / scale
        return cls(
            lhs=float(lhs),
            rhs=float(rhs),
            relation=relation,
            slack=float(slack),
            tolerance=float(tolerance),
            passed=bool(slack >= -tolerance),
            provenance=provenance,
            theorem=theorem,
            parameters=dict(parameters or {}),
            expected=bool(expected),
        )


@dataclass(frozen=True)
class FitReport:
    """Least-squares fit of log(ys) against log(xs)."""
    xs: Tuple[float, ...]
    ys: Tuple[float, ...]
    slope: float
    intercept: float
    r_squared: float

    def predict(self, x) -> np.ndarray:
        """Fitted power law exp(intercept) * x**slope."""
        return np.exp(self.intercept) * np.asarray(x, dtype=float) ** self.slope


@dataclass(frozen=True)
class SymmetrizationPlan:
    """Target model space and volume ratio of a symmetrization."""
    beta: float
    target: SpaceForm

    def __post_init__(self):
        if self.beta != 1.0:
            raise ParameterError(f"only beta = 1 is supported (got {self.beta})")


@dataclass
class ResultRecord:
    """Serialized outcome of one CLI command."""
    config_digest: str
    tool_version: str
    timestamp: str
    command: str
    payload: Dict[str, Any]
