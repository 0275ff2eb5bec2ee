"""
Validated run configuration for the command-line front end.

Each command has a parameter schema; unknown keys are rejected and every
value is checked before any computation starts.
"""

import itertools
import math
from typing import Annotated, Any, Dict, List, Literal, Optional

from pydantic import AfterValidator, BaseModel, ConfigDict, Field, field_validator, model_validator

from src.solvers.domains import parse_shape
from src.models.entities import BoundaryLayout
from src.utils.validators import ValidationError as DomainValidationError

COMMANDS = ("radial", "ball", "grid", "rearrange", "verify", "sweep", "plotdata")
CHECKS = (
    "faber-krahn",
    "curvature",
    "vanishing-hole",
    "mu-decay",
    "trial-bound",
    "hadamard",
    "sign-structure",
    "rearrangement",
    "mesh-convergence",
    "suite",
)


def _check_exponent(p: float) -> float:
    if not (math.isfinite(p) and p > 1.0):
        raise ValueError(f"p must exceed 1 (got {p})")
    return p


def _check_fits(kappa: float, r2: float) -> None:
    if kappa > 0 and r2 >= math.pi / math.sqrt(kappa):
        raise ValueError(f"r2={r2} must be below pi/sqrt(kappa)={math.pi / math.sqrt(kappa):.6g}")


Exponent = Annotated[float, AfterValidator(_check_exponent)]


class Params(BaseModel):
    """Base schema: frozen, unknown keys forbidden."""
    model_config = ConfigDict(extra="forbid", frozen=True)


class SolverParams(Params):
    eig_rel_tol: float = Field(1e-8, gt=0)
    ode_tol: float = Field(1e-10, gt=0)
    samples: int = Field(1025, ge=2)


class RadialParams(SolverParams):
    """Inputs of ``radial``."""
    problem: Literal["lambda", "mu"] = "lambda"
    p: Exponent
    n: int = Field(2, ge=1)
    kappa: float = 0.0
    r1: float = Field(gt=0)
    r2: float = Field(gt=0)

    @model_validator(mode="after")
    def _annulus(self):
        if not self.r1 < self.r2:
            raise ValueError(f"r1 must be below r2 (got r1={self.r1}, r2={self.r2})")
        _check_fits(self.kappa, self.r2)
        return self


class BallParams(SolverParams):
    """Inputs of ``ball``."""
    p: Exponent
    n: int = Field(2, ge=1)
    kappa: float = 0.0
    r: float = Field(gt=0)

    @model_validator(mode="after")
    def _radius(self):
        _check_fits(self.kappa, self.r)
        return self


class GridParams(Params):
    """Inputs of ``grid``."""
    shape: str
    offset: float = 0.0
    layout: Literal["lambda", "mu", "neumann"] = "lambda"
    metric: Literal["flat", "sphere"] = "flat"
    h: float = Field(1.0 / 64, gt=0)
    p: Exponent = 2.0
    method: Literal["lbfgs", "descent"] = "lbfgs"
    max_iterations: int = Field(200000, ge=1)
    field_csv: Optional[str] = None
    mask_pgm: Optional[str] = None

    @model_validator(mode="after")
    def _shape(self):
        try:
            parse_shape(self.shape, self.offset, BoundaryLayout(self.layout))
        except DomainValidationError as e:
            raise ValueError(str(e))
        return self


class RearrangeParams(GridParams):
    """Inputs of ``rearrange``."""
    levels: int = Field(256, ge=2)


class VerifyParams(Params):
    """Inputs of ``verify``; unset values take per-check defaults."""
    check: Literal[CHECKS]
    p: Exponent = 2.0
    n: Optional[int] = Field(None, ge=1)
    kappa: float = 0.0
    r1: float = Field(0.3, gt=0)
    r2: float = Field(1.0, gt=0)
    R: float = Field(1.0, gt=0)
    kappas: Optional[List[float]] = None
    epsilons: Optional[List[float]] = None
    epsilon: float = Field(0.1, gt=0)
    eta: float = Field(0.1, gt=0)
    etas: Optional[List[float]] = None
    delta: float = Field(1e-3, gt=0)
    shape: str = "annulus:1,0.3"
    offset: float = 0.0
    layout: Literal["lambda", "mu"] = "lambda"
    metric: Literal["flat", "sphere"] = "flat"
    h: float = Field(1.0 / 64, gt=0)
    spacings: Optional[List[float]] = None
    quick: bool = False

    @model_validator(mode="after")
    def _shape(self):
        try:
            parse_shape(self.shape, self.offset, BoundaryLayout(self.layout))
        except DomainValidationError as e:
            raise ValueError(str(e))
        return self


class SweepParams(SolverParams):
    """Cartesian grid of radial solves for ``sweep``."""
    problem: Literal["lambda", "mu"] = "lambda"
    kappa: List[float] = [0.0]
    p: List[Exponent] = [2.0]
    n: List[int] = [2]
    r1: List[float]
    r2: List[float]

    @field_validator("kappa", "p", "n", "r1", "r2")
    @classmethod
    def _non_empty(cls, values):
        if not values:
            raise ValueError("sweep axes must not be empty")
        return values

    @model_validator(mode="after")
    def _points(self):
        if min(self.n) < 1:
            raise ValueError("n must be >= 1")
        for r1, r2 in itertools.product(self.r1, self.r2):
            if not 0 < r1 < r2:
                raise ValueError(f"every sweep point needs 0 < r1 < r2 (got r1={r1}, r2={r2})")
        for kappa in self.kappa:
            _check_fits(kappa, max(self.r2))
        return self

    def points(self) -> List[Dict[str, Any]]:
        """Sweep points in deterministic order (kappa, p, n, r1, r2)."""
        return [
            {"kappa": k, "p": p, "n": n, "r1": r1, "r2": r2}
            for k, p, n, r1, r2 in itertools.product(self.kappa, self.p, self.n, self.r1, self.r2)
        ]


class PlotdataParams(Params):
    """Record files for ``plotdata``."""
    inputs: List[str] = []


PARAMETER_MODELS = {
    "radial": RadialParams,
    "ball": BallParams,
    "grid": GridParams,
    "rearrange": RearrangeParams,
    "verify": VerifyParams,
    "sweep": SweepParams,
    "plotdata": PlotdataParams,
}


class RunConfig(BaseModel):
    """Command, validated parameters and output settings."""
    model_config = ConfigDict(extra="forbid", frozen=True)

    command: Literal[COMMANDS]
    parameters: Dict[str, Any]
    output_path: Optional[str] = None
    cache_dir: str = ".cache"
    jobs: int = Field(1, ge=1)
    use_cache: bool = True
    verbose: bool = False

    def params(self) -> Params:
        """Typed parameter model of the command."""
        return PARAMETER_MODELS[self.command].model_validate(self.parameters)
