"""
Space-form primitives.

Curvature-indexed trigonometric functions s_kappa and c_kappa, the radial
volume element s_kappa^(n-1), geodesic ball volumes and the equal-volume
(Schwarz) radius of a space form M^n_kappa.
"""

import math
import logging
from typing import Union

import numpy as np
from scipy import integrate, optimize, special

from src.models.entities import SpaceForm
from src.utils.validators import ParameterError

logger = logging.getLogger(__name__)

ArrayLike = Union[float, np.ndarray]

# Below this value of |kappa| t^2 the series branch is used.
SERIES_THRESHOLD = 1e-8
QUAD_EPSREL = 1e-12
QUAD_EPSABS = 1e-14
ROOT_RTOL = 1e-12


def _check_radius(kappa: float, t: ArrayLike) -> None:
    t_arr = np.asarray(t, dtype=float)
    if np.any(t_arr < 0) or not np.all(np.isfinite(t_arr)):
        raise ParameterError(f"radius must be finite and >= 0 (got min {np.min(t_arr)})")
    if kappa > 0:
        bound = math.pi / math.sqrt(kappa)
        if np.any(t_arr > bound * (1.0 + 1e-12)):
            raise ParameterError(
                f"radius {np.max(t_arr):.6g} exceeds pi/sqrt(kappa) = {bound:.6g} for kappa = {kappa}"
            )


def _s_scalar(kappa: float, t: float) -> float:
    x = kappa * t * t
    if abs(x) < SERIES_THRESHOLD:
        return t * (1.0 - x / 6.0 + x * x / 120.0 - x * x * x / 5040.0)
    if kappa > 0:
        k = math.sqrt(kappa)
        return math.sin(k * t) / k
    k = math.sqrt(-kappa)
    return math.sinh(k * t) / k


def _c_scalar(kappa: float, t: float) -> float:
    x = kappa * t * t
    if abs(x) < SERIES_THRESHOLD:
        return 1.0 - x / 2.0 + x * x / 24.0 - x * x * x / 720.0
    if kappa > 0:
        return math.cos(math.sqrt(kappa) * t)
    return math.cosh(math.sqrt(-kappa) * t)


def s_kappa(kappa: float, t: ArrayLike) -> ArrayLike:
    """Generalized sine: sin(sqrt(k) t)/sqrt(k), t, or sinh(sqrt(-k) t)/sqrt(-k).

    Args:
        kappa: Curvature
        t: Radius (scalar or array), 0 <= t <= pi/sqrt(kappa) when kappa > 0

    Returns:
        s_kappa(t), same shape as t
    """
    _check_radius(kappa, t)
    if np.ndim(t) == 0:
        return _s_scalar(kappa, float(t))
    t = np.asarray(t, dtype=float)
    x = kappa * t * t
    series = t * (1.0 - x / 6.0 + x * x / 120.0 - x * x * x / 5040.0)
    if kappa > 0:
        k = math.sqrt(kappa)
        closed = np.sin(k * t) / k
    elif kappa < 0:
        k = math.sqrt(-kappa)
        closed = np.sinh(k * t) / k
    else:
        closed = t
    return np.where(np.abs(x) < SERIES_THRESHOLD, series, closed)


def c_kappa(kappa: float, t: ArrayLike) -> ArrayLike:
    """Generalized cosine, the derivative of s_kappa in t."""
    _check_radius(kappa, t)
    if np.ndim(t) == 0:
        return _c_scalar(kappa, float(t))
    t = np.asarray(t, dtype=float)
    x = kappa * t * t
    series = 1.0 - x / 2.0 + x * x / 24.0 - x * x * x / 720.0
    if kappa > 0:
        closed = np.cos(math.sqrt(kappa) * t)
    elif kappa < 0:
        closed = np.cosh(math.sqrt(-kappa) * t)
    else:
        closed = np.ones_like(t)
    return np.where(np.abs(x) < SERIES_THRESHOLD, series, closed)


def volume_element(sf: SpaceForm, r: ArrayLike) -> ArrayLike:
    """Radial density J(r) = s_kappa(r)^(n-1) against dr and the unit-sphere measure."""
    if sf.n == 1:
        _check_radius(sf.kappa, r)
        return 1.0 if np.ndim(r) == 0 else np.ones_like(np.asarray(r, dtype=float))
    return s_kappa(sf.kappa, r) ** (sf.n - 1)


def unit_sphere_area(n: int) -> float:
    """Area omega_(n-1) = 2 pi^(n/2) / Gamma(n/2) of the unit (n-1)-sphere."""
    return float(2.0 * math.pi ** (n / 2.0) / special.gamma(n / 2.0))


def sphere_area(sf: SpaceForm, r: float) -> float:
    """Area of the geodesic sphere of radius r."""
    return unit_sphere_area(sf.n) * float(volume_element(sf, r))


def ball_volume(sf: SpaceForm, r: float) -> float:
    """Volume of the geodesic ball of radius r in the space form.

    Closed form for kappa = 0, adaptive quadrature otherwise.
    """
    _check_radius(sf.kappa, r)
    omega = unit_sphere_area(sf.n)
    if r == 0.0:
        return 0.0
    if sf.kappa == 0.0:
        return omega * r ** sf.n / sf.n
    if sf.n == 1:
        return omega * r
    kappa, power = sf.kappa, sf.n - 1
    value, _ = integrate.quad(
        lambda t: _s_scalar(kappa, t) ** power,
        0.0,
        min(r, sf.diameter),
        epsabs=QUAD_EPSABS,
        epsrel=QUAD_EPSREL,
        limit=200,
    )
    return omega * value


def model_volume(sf: SpaceForm) -> float:
    """Total volume of the model space (finite only for kappa > 0)."""
    if sf.kappa > 0:
        return ball_volume(sf, sf.diameter)
    return math.inf


def schwarz_radius(sf: SpaceForm, vol: float) -> float:
    """Radius of the geodesic ball whose volume equals ``vol``.

    Args:
        sf: Space form
        vol: Target volume, at most the model volume when kappa > 0

    Returns:
        r with ball_volume(sf, r) = vol
    """
    if not (vol >= 0.0 and math.isfinite(vol)):
        raise ParameterError(f"volume must be finite and >= 0 (got {vol})")
    if vol == 0.0:
        return 0.0
    omega = unit_sphere_area(sf.n)
    if sf.kappa == 0.0:
        return (sf.n * vol / omega) ** (1.0 / sf.n)

    total = model_volume(sf)
    if vol > total * (1.0 + 1e-12):
        raise ParameterError(f"volume {vol:.6g} exceeds the model volume {total:.6g}")
    if sf.kappa > 0:
        if vol >= total:
            return sf.diameter
        upper = sf.diameter
    else:
        upper = (sf.n * vol / omega) ** (1.0 / sf.n)
        while ball_volume(sf, upper) < vol:
            upper *= 2.0

    radius = optimize.brentq(
        lambda r: ball_volume(sf, r) - vol, 0.0, upper, xtol=1e-300, rtol=ROOT_RTOL
    )
    return float(radius)


def stereographic_radius(theta: float) -> float:
    """Planar radius tan(theta/2) of the stereographic image of a cap of geodesic radius theta."""
    if not 0.0 <= theta < math.pi:
        raise ParameterError(f"cap radius must lie in [0, pi) (got {theta})")
    return math.tan(theta / 2.0)


def geodesic_radius(rho: float) -> float:
    """Geodesic radius 2 atan(rho) of the cap whose stereographic image has radius rho."""
    if rho < 0.0:
        raise ParameterError(f"planar radius must be >= 0 (got {rho})")
    return 2.0 * math.atan(rho)


def density_function(sf: SpaceForm):
    """Unchecked scalar callable r -> s_kappa(r)^(n-1) for inner loops.

    Callers validate the radial range once before integrating.
    """
    kappa, power = sf.kappa, sf.n - 1
    if power == 0:
        return lambda r: 1.0
    return lambda r: _s_scalar(kappa, r) ** power
