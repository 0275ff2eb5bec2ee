"""
Discrete p-Rayleigh quotients and their minimization on grid domains.

The energy sums w_E |D u|^p over interior and Dirichlet nodes using forward
differences; a difference is kept only when both of its nodes carry the
unknown or the Dirichlet zero, so Neumann conditions hold naturally. The
mass sums w_M |u|^p over interior nodes.
"""

import math
import logging
from dataclasses import dataclass
from pathlib import Path
from typing import List, Tuple

import numpy as np
import pandas as pd
from scipy import ndimage, optimize

from src.models.entities import CellClass, EigenResult2D, GridDomain, PlanarField
from src.utils.validators import (
    ConvergenceError,
    GeometryError,
    ParameterError,
    require,
    require_exponent,
)

logger = logging.getLogger(__name__)

SUPPORTED_P = (1.2, 6.0)
METHODS = ("lbfgs", "descent")


@dataclass(frozen=True)
class PlanarOptions:
    """Stopping rules of the planar minimizer."""
    method: str = "lbfgs"
    max_iterations: int = 200000
    rel_tol: float = 1e-8
    window: int = 10
    initial_step: float = 1e-3
    min_step: float = 1e-18

    def __post_init__(self):
        if self.method not in METHODS:
            raise ParameterError(f"method must be one of {METHODS} (got '{self.method}')")
        if self.max_iterations < 1 or self.window < 1:
            raise ParameterError("max_iterations and window must be positive")
        if not (self.rel_tol > 0 and self.initial_step > 0 and self.min_step > 0):
            raise ParameterError("rel_tol, initial_step and min_step must be positive")


class RayleighEnergy:
    """Energy, mass and quotient of nodal fields on one domain.

    Works on the vector of interior values; all other nodes are zero.
    """

    def __init__(self, domain: GridDomain, p: float):
        require_exponent(p)
        self.domain = domain
        self.p = p
        self.h = domain.h
        self.interior = domain.interior
        active = self.interior | domain.mask(CellClass.DIRICHLET)
        self.edge_x = active[:, :-1] & active[:, 1:]
        self.edge_y = active[:-1, :] & active[1:, :]
        self.w_energy = domain.energy_weights(p)
        self.w_mass = domain.mass_weights()[self.interior]
        self.size = int(self.interior.sum())

    def expand(self, x: np.ndarray) -> np.ndarray:
        """Full grid array from interior values."""
        u = np.zeros(self.interior.shape)
        u[self.interior] = x
        return u

    def _differences(self, u: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        gx = np.zeros_like(u)
        gy = np.zeros_like(u)
        gx[:, :-1] = np.where(self.edge_x, (u[:, 1:] - u[:, :-1]) / self.h, 0.0)
        gy[:-1, :] = np.where(self.edge_y, (u[1:, :] - u[:-1, :]) / self.h, 0.0)
        return gx, gy

    def energy(self, x: np.ndarray) -> float:
        gx, gy = self._differences(self.expand(x))
        return float(np.sum(self.w_energy * (gx * gx + gy * gy) ** (self.p / 2.0)))

    def mass(self, x: np.ndarray) -> float:
        return float(np.sum(self.w_mass * np.abs(x) ** self.p))

    def energy_and_gradient(self, x: np.ndarray) -> Tuple[float, np.ndarray]:
        p = self.p
        gx, gy = self._differences(self.expand(x))
        g2 = gx * gx + gy * gy
        energy = float(np.sum(self.w_energy * g2 ** (p / 2.0)))

        # |g|^(p-2) g vanishes with g for every p > 1
        safe = np.where(g2 > 0, g2, 1.0)
        coef = np.where(g2 > 0, p * self.w_energy * safe ** ((p - 2.0) / 2.0) / self.h, 0.0)
        ax = coef * gx
        ay = coef * gy
        grad = np.zeros_like(g2)
        grad[:, 1:] += ax[:, :-1]
        grad[:, :-1] -= ax[:, :-1]
        grad[1:, :] += ay[:-1, :]
        grad[:-1, :] -= ay[:-1, :]
        return energy, grad[self.interior]

    def quotient_and_gradient(self, x: np.ndarray) -> Tuple[float, np.ndarray]:
        """R(x) = E/M and (grad E - R grad M)/M."""
        energy, grad_e = self.energy_and_gradient(x)
        mass = self.mass(x)
        if mass == 0.0:
            raise ZeroDivisionError("Rayleigh quotient of a zero field")
        ratio = energy / mass
        grad_m = self.p * self.w_mass * np.sign(x) * np.abs(x) ** (self.p - 1.0)
        return ratio, (grad_e - ratio * grad_m) / mass

    def normalize(self, x: np.ndarray) -> np.ndarray:
        """Scale to unit mass."""
        mass = self.mass(x)
        if mass == 0.0:
            raise ZeroDivisionError("cannot normalize a zero field")
        return x / mass ** (1.0 / self.p)


def rayleigh_quotient(field: PlanarField, p: float) -> float:
    """Discrete Rayleigh quotient of a field.

    Raises:
        ZeroDivisionError: field vanishes on every interior node
    """
    energy = RayleighEnergy(field.domain, p)
    x = np.asarray(field.values)[energy.interior]
    mass = energy.mass(x)
    if mass == 0.0:
        raise ZeroDivisionError("Rayleigh quotient of a zero field")
    return energy.energy(x) / mass


def dirichlet_energy(field: PlanarField, p: float) -> float:
    """Numerator of the discrete quotient, the p-energy of the field."""
    energy = RayleighEnergy(field.domain, p)
    return energy.energy(np.asarray(field.values)[energy.interior])


def field_mass(field: PlanarField, p: float) -> float:
    """Denominator of the discrete quotient, the metric p-th power mass."""
    energy = RayleighEnergy(field.domain, p)
    return energy.mass(np.asarray(field.values)[energy.interior])


def initial_guess(domain: GridDomain) -> np.ndarray:
    """Distance from each interior node to the nearest Dirichlet node."""
    dirichlet = domain.mask(CellClass.DIRICHLET)
    distance = ndimage.distance_transform_edt(~dirichlet) * domain.h
    return distance[domain.interior]


def _stalled(history: List[float], window: int, rel_tol: float) -> bool:
    if len(history) <= window:
        return False
    return abs(history[-window - 1] - history[-1]) <= rel_tol * abs(history[-1])


def _minimize_lbfgs(energy: RayleighEnergy, x0: np.ndarray, opts: PlanarOptions):
    history: List[float] = []
    steps: List[float] = []
    previous = [x0]

    def callback(intermediate_result):
        history.append(float(intermediate_result.fun))
        steps.append(float(np.linalg.norm(intermediate_result.x - previous[0])))
        previous[0] = intermediate_result.x.copy()
        if len(history) % 500 == 0:
            logger.debug(f"    iteration {len(history)}: R = {history[-1]:.10g}")
        if _stalled(history, opts.window, opts.rel_tol):
            raise StopIteration

    result = optimize.minimize(
        energy.quotient_and_gradient,
        x0,
        jac=True,
        method="L-BFGS-B",
        bounds=optimize.Bounds(np.zeros(energy.size), np.full(energy.size, np.inf)),
        callback=callback,
        options={
            "maxiter": opts.max_iterations,
            "maxfun": 20 * opts.max_iterations,
            "ftol": opts.rel_tol * 1e-3,
            "gtol": 1e-14,
            "maxcor": 20,
        },
    )
    if result.status == 1:
        raise ConvergenceError(
            f"L-BFGS-B reached its iteration cap ({opts.max_iterations}): {result.message}",
            history,
        )
    if not result.success and not _stalled(history, opts.window, opts.rel_tol):
        logger.warning(f"  L-BFGS-B stopped early: {result.message}")
    return np.maximum(result.x, 0.0), history, (steps[-1] if steps else 0.0)


def _minimize_descent(energy: RayleighEnergy, x0: np.ndarray, opts: PlanarOptions):
    x = energy.normalize(x0)
    ratio, grad = energy.quotient_and_gradient(x)
    history = [ratio]
    step = opts.initial_step

    for iteration in range(1, opts.max_iterations + 1):
        while True:
            trial = np.maximum(x - step * grad, 0.0)
            if energy.mass(trial) > 0.0:
                trial = energy.normalize(trial)
                trial_ratio, trial_grad = energy.quotient_and_gradient(trial)
                if trial_ratio < ratio:
                    break
            step /= 2.0
            if step < opts.min_step:
                logger.debug(f"    step underflow at iteration {iteration}: stationary point")
                return x, history, step

        x, ratio, grad = trial, trial_ratio, trial_grad
        history.append(ratio)
        if iteration % 5000 == 0:
            logger.debug(f"    iteration {iteration}: R = {ratio:.10g}, step {step:.3e}")
        if _stalled(history, opts.window, opts.rel_tol):
            return x, history, step
        step *= 2.0

    raise ConvergenceError(
        f"gradient descent reached its iteration cap ({opts.max_iterations})", history
    )


def minimize_rayleigh(domain: GridDomain, p: float, opts: PlanarOptions = None) -> EigenResult2D:
    """Minimize the discrete Rayleigh quotient over nonnegative fields.

    Starts from the distance-to-Dirichlet profile and stops once the
    quotient changes by less than rel_tol over ``window`` iterations.

    Args:
        domain: Grid domain with at least one Dirichlet node
        p: Exponent in [1.2, 6]
        opts: Method and stopping rules

    Returns:
        EigenResult2D with a nonnegative unit-mass field

    Raises:
        ConvergenceError: iteration cap reached, with the quotient history
    """
    opts = opts or PlanarOptions()
    require_exponent(p)
    require(SUPPORTED_P[0] <= p <= SUPPORTED_P[1],
            f"planar solver supports p in [{SUPPORTED_P[0]}, {SUPPORTED_P[1]}] (got {p})")
    if not domain.mask(CellClass.DIRICHLET).any():
        raise GeometryError("minimization needs at least one Dirichlet node")

    energy = RayleighEnergy(domain, p)
    x0 = energy.normalize(initial_guess(domain))

    if opts.method == "lbfgs":
        x, history, final_step = _minimize_lbfgs(energy, x0, opts)
    else:
        x, history, final_step = _minimize_descent(energy, x0, opts)

    x = energy.normalize(x)
    field = PlanarField(values=energy.expand(x), domain=domain)
    eigenvalue = energy.energy(x) / energy.mass(x)
    logger.info(
        f"  planar {domain.shape.kind.value} ({domain.metric.value}, h={domain.h:g}, p={p:g}): "
        f"{eigenvalue:.10g} after {len(history)} iterations [{opts.method}]"
    )
    return EigenResult2D(
        eigenvalue=float(eigenvalue),
        field=field,
        iterations=len(history),
        final_step=float(final_step),
        energy_history=history,
        method=opts.method,
        p=float(p),
    )


def field_frame(field: PlanarField) -> pd.DataFrame:
    """Node coordinates and values of the non-exterior nodes."""
    domain = field.domain
    X, Y = domain.coordinates()
    keep = domain.cell_class != CellClass.EXTERIOR.value
    return pd.DataFrame({"x": X[keep], "y": Y[keep], "value": np.asarray(field.values)[keep]})


def export_field_csv(field: PlanarField, path: str) -> Path:
    """Write a field as CSV with columns x, y, value."""
    out = Path(path)
    out.parent.mkdir(parents=True, exist_ok=True)
    field_frame(field).to_csv(out, index=False, float_format="%.17g")
    logger.info(f"Wrote field to {out}")
    return out
