"""Radial shooting, planar grid and rearrangement solvers."""

from src.solvers.radial import (
    solve_lambda_star,
    solve_mu_star,
    solve_dirichlet_ball,
    solve_annulus,
    shooting_residual,
    ode_residual,
)
from src.solvers.domains import parse_shape, build_domain, export_domain_pgm
from src.solvers.planar import (
    PlanarOptions,
    rayleigh_quotient,
    minimize_rayleigh,
    export_field_csv,
)
from src.solvers.rearrangement import schwarz_rearrange, radial_mass, radial_energy

__all__ = [
    "solve_lambda_star",
    "solve_mu_star",
    "solve_dirichlet_ball",
    "solve_annulus",
    "shooting_residual",
    "ode_residual",
    "parse_shape",
    "build_domain",
    "export_domain_pgm",
    "PlanarOptions",
    "rayleigh_quotient",
    "minimize_rayleigh",
    "export_field_csv",
    "schwarz_rearrange",
    "radial_mass",
    "radial_energy",
]
