"""Space-form geometry package."""

from src.geometry.space_forms import (
    s_kappa,
    c_kappa,
    volume_element,
    unit_sphere_area,
    sphere_area,
    ball_volume,
    model_volume,
    schwarz_radius,
    stereographic_radius,
    geodesic_radius,
    density_function,
)

__all__ = [
    "s_kappa",
    "c_kappa",
    "volume_element",
    "unit_sphere_area",
    "sphere_area",
    "ball_volume",
    "model_volume",
    "schwarz_radius",
    "stereographic_radius",
    "geodesic_radius",
    "density_function",
]
