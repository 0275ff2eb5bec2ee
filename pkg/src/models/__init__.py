"""Data models package."""

from src.models.entities import (
    SpaceForm,
    AnnulusSpec,
    SolverOptions,
    RadialProfile,
    EigenResult,
    ShapeSpec,
    GridDomain,
    PlanarField,
    EigenResult2D,
    ComparisonReport,
    FitReport,
    SymmetrizationPlan,
    ResultRecord,
    BoundaryLayout,
    ProblemKind,
    CellClass,
    Metric,
    ShapeKind,
    Relation,
)

__all__ = [
    "SpaceForm",
    "AnnulusSpec",
    "SolverOptions",
    "RadialProfile",
    "EigenResult",
    "ShapeSpec",
    "GridDomain",
    "PlanarField",
    "EigenResult2D",
    "ComparisonReport",
    "FitReport",
    "SymmetrizationPlan",
    "ResultRecord",
    "BoundaryLayout",
    "ProblemKind",
    "CellClass",
    "Metric",
    "ShapeKind",
    "Relation",
]
