"""
Log-log least-squares fits for asymptotic rates.
"""

import logging
from typing import Sequence

import numpy as np

from src.models.entities import FitReport
from src.utils.validators import require

logger = logging.getLogger(__name__)

MIN_POINTS = 4


def fit_loglog(xs: Sequence[float], ys: Sequence[float]) -> FitReport:
    """Ordinary least squares of log(ys) against log(xs).

    Args:
        xs: Positive abscissae
        ys: Positive ordinates, same length, at least 4 points

    Returns:
        FitReport with slope, intercept and coefficient of determination
    """
    x = np.asarray(xs, dtype=float)
    y = np.asarray(ys, dtype=float)
    require(x.shape == y.shape and x.ndim == 1, f"xs and ys must be equal-length sequences")
    require(len(x) >= MIN_POINTS, f"a fit needs at least {MIN_POINTS} points (got {len(x)})")
    require(np.all(x > 0) and np.all(y > 0), "log-log fits need positive values")

    lx, ly = np.log(x), np.log(y)
    slope, intercept = np.polyfit(lx, ly, 1)
    residual = ly - (slope * lx + intercept)
    spread = np.sum((ly - ly.mean()) ** 2)
    r_squared = 1.0 - np.sum(residual ** 2) / spread if spread > 0 else 1.0

    logger.debug(f"  log-log fit: slope {slope:.4f}, R^2 {r_squared:.6f} over {len(x)} points")
    return FitReport(
        xs=tuple(float(v) for v in x),
        ys=tuple(float(v) for v in y),
        slope=float(slope),
        intercept=float(intercept),
        r_squared=float(r_squared),
    )
