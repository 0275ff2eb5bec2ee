"""Comparison checks, rate fits and the verification suite."""

from src.verify.fits import fit_loglog
from src.verify.checks import (
    VerifyOptions,
    check_faber_krahn,
    check_curvature_monotonicity,
    check_vanishing_hole,
    richardson_limit,
    check_mu_decay,
    mu_trial_upper_bound,
    scan_trial_bounds,
    check_trial_bound,
    check_hadamard,
    hadamard_derivative,
    check_sign_structure,
    check_rearrangement,
    mesh_convergence,
    symmetrization_plan,
)
from src.verify.suite import VerificationSuite, SuiteResult

__all__ = [
    "fit_loglog",
    "VerifyOptions",
    "check_faber_krahn",
    "check_curvature_monotonicity",
    "check_vanishing_hole",
    "richardson_limit",
    "check_mu_decay",
    "mu_trial_upper_bound",
    "scan_trial_bounds",
    "check_trial_bound",
    "check_hadamard",
    "hadamard_derivative",
    "check_sign_structure",
    "check_rearrangement",
    "mesh_convergence",
    "symmetrization_plan",
    "VerificationSuite",
    "SuiteResult",
]
