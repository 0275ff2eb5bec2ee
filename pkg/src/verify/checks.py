"""
Executable comparison checks for mixed-boundary p-Laplacian eigenvalues.

Each check computes both sides of an inequality, identity or rate with the
radial and planar solvers and returns ComparisonReport / FitReport values.
Checks never raise on a failed comparison; they report it.
"""

import math
import logging
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

import numpy as np
from scipy import integrate

from src.geometry.space_forms import ball_volume, schwarz_radius, sphere_area, volume_element
from src.models.entities import (
    AnnulusSpec,
    BoundaryLayout,
    ComparisonReport,
    EigenResult,
    FitReport,
    GridDomain,
    Metric,
    PlanarField,
    ProblemKind,
    Relation,
    ShapeSpec,
    SolverOptions,
    SpaceForm,
    SymmetrizationPlan,
)
from src.solvers.domains import build_domain, count_hole_components
from src.solvers.planar import PlanarOptions, dirichlet_energy, field_mass, minimize_rayleigh
from src.solvers.radial import solve_dirichlet_ball, solve_lambda_star, solve_mu_star
from src.solvers.rearrangement import (
    LEVELS,
    level_ladder,
    radial_energy,
    radial_mass,
    schwarz_rearrange,
)
from src.utils.validators import GeometryError, require, require_exponent
from src.verify.fits import fit_loglog

logger = logging.getLogger(__name__)

# Shape-derivative comparisons need tighter solves than the defaults
HADAMARD_SOLVER = SolverOptions(eig_rel_tol=1e-12, ode_tol=1e-12, samples=4097)


@dataclass(frozen=True)
class VerifyOptions:
    """Solver settings and tolerances shared by the checks."""
    solver: SolverOptions = field(default_factory=SolverOptions)
    planar: PlanarOptions = field(default_factory=PlanarOptions)
    grid_tolerance: float = 0.02
    grid_bias_factor: float = 1.0
    radial_tolerance_factor: float = 10.0
    rearrangement_tolerance: float = 0.01
    ladder_tolerance: float = 0.002
    volume_tolerance: float = 1e-9
    extrapolation_tolerance: float = 1e-4
    hadamard_tolerance: float = 1e-3
    hadamard_refinement: float = 3.0
    sandwich_allowance: float = 2.0
    slope_margin: float = 0.3

    @property
    def radial_tolerance(self) -> float:
        return self.radial_tolerance_factor * self.solver.eig_rel_tol

    def grid_allowance(self, h: float) -> float:
        """Relative tolerance for a grid eigenvalue at spacing h.

        Dirichlet nodes sit up to one spacing beyond a curved boundary, so
        the grid value runs low by O(h) on top of the base tolerance.
        """
        return self.grid_tolerance + self.grid_bias_factor * h


def _strictly_decreasing(values: Sequence[float]) -> bool:
    return all(a > b for a, b in zip(values, values[1:]))


# =============================================================================
# FABER-KRAHN
# =============================================================================

def symmetrization_plan(domain: GridDomain) -> SymmetrizationPlan:
    """Model space targeted by the symmetrization of a planar domain."""
    kappa = 1.0 if domain.metric is Metric.SPHERE else 0.0
    return SymmetrizationPlan(beta=1.0, target=SpaceForm(2, kappa))


def check_faber_krahn(
    domain: GridDomain, p: float, opts: Optional[VerifyOptions] = None
) -> ComparisonReport:
    """Planar eigenvalue against the equal-volume concentric model annulus.

    The bound holds when the hole sits at the center. Moving the hole
    off center lowers the eigenvalue below the radial value, so reports
    for off-center holes carry expected=False and fail with negative slack.

    Args:
        domain: Grid domain with exactly one hole component
        p: Exponent
        opts: Verification options

    Returns:
        GE report, lhs planar eigenvalue, rhs radial eigenvalue
    """
    opts = opts or VerifyOptions()
    require_exponent(p)
    components = count_hole_components(domain)
    require(components == 1, f"Faber-Krahn check needs exactly one hole (got {components})")
    layout = domain.shape.layout
    require(layout is not BoundaryLayout.NEUMANN_ONLY, "Faber-Krahn check needs a Dirichlet boundary")

    plan = symmetrization_plan(domain)
    planar = minimize_rayleigh(domain, p, opts.planar)

    hole_volume = domain.hole_volume()
    domain_volume = domain.volume()
    r1 = schwarz_radius(plan.target, hole_volume)
    r2 = schwarz_radius(plan.target, hole_volume + domain_volume)
    if layout is BoundaryLayout.INNER_DIRICHLET_OUTER_NEUMANN:
        radial = solve_mu_star(plan.target, p, AnnulusSpec(r1, r2, layout), opts.solver)
    else:
        radial = solve_lambda_star(plan.target, p, AnnulusSpec(r1, r2, layout), opts.solver)

    shape = domain.shape
    report = ComparisonReport.compare(
        lhs=planar.eigenvalue,
        rhs=radial.eigenvalue,
        relation=Relation.GE,
        tolerance=opts.grid_allowance(domain.h),
        provenance=(
            f"lhs: planar {layout.value} eigenvalue of {shape.kind.value}{shape.dims} "
            f"offset {shape.hole_offset:g} ({domain.metric.value}, h={domain.h:g}); "
            f"rhs: radial {layout.value} eigenvalue of the equal-volume annulus "
            f"[{r1:.6g}, {r2:.6g}] in kappa={plan.target.kappa:g}"
        ),
        theorem="faber-krahn",
        parameters={
            "shape": shape.kind.value,
            "dims": list(shape.dims),
            "offset": shape.hole_offset,
            "layout": layout.value,
            "metric": domain.metric.value,
            "h": domain.h,
            "p": p,
            "domain_volume": domain_volume,
            "hole_volume": hole_volume,
            "r1_star": r1,
            "r2_star": r2,
            "iterations": planar.iterations,
        },
        expected=shape.hole_centered,
    )
    _log_report(report)
    return report


# =============================================================================
# CURVATURE MONOTONICITY
# =============================================================================

def check_curvature_monotonicity(
    p: float,
    n: int,
    r1: float,
    r2: float,
    kappas: Sequence[float],
    opts: Optional[VerifyOptions] = None,
) -> List[ComparisonReport]:
    """Model-annulus eigenvalues along an increasing curvature ladder.

    lambda must not increase and mu must not decrease with kappa; one
    report per consecutive pair and problem.
    """
    opts = opts or VerifyOptions()
    kappas = [float(k) for k in kappas]
    require(len(kappas) >= 2, "curvature ladder needs at least two values")
    require(all(a <= b for a, b in zip(kappas, kappas[1:])), f"kappas must be non-decreasing (got {kappas})")
    AnnulusSpec(r1, r2).check_fits(SpaceForm(n, kappas[-1]))

    lam, mu = [], []
    for kappa in kappas:
        sf = SpaceForm(n, kappa)
        lam.append(solve_lambda_star(sf, p, AnnulusSpec(r1, r2), opts.solver).eigenvalue)
        mu.append(solve_mu_star(
            sf, p, AnnulusSpec(r1, r2, BoundaryLayout.INNER_DIRICHLET_OUTER_NEUMANN), opts.solver
        ).eigenvalue)

    reports = []
    for i in range(len(kappas) - 1):
        k0, k1 = kappas[i], kappas[i + 1]
        params = {"p": p, "n": n, "r1": r1, "r2": r2, "kappa_low": k0, "kappa_high": k1}
        reports.append(ComparisonReport.compare(
            lhs=lam[i], rhs=lam[i + 1], relation=Relation.GE, tolerance=opts.radial_tolerance,
            provenance=f"lhs: lambda at kappa={k0:g}; rhs: lambda at kappa={k1:g}",
            theorem="curvature-lambda", parameters=params,
        ))
        reports.append(ComparisonReport.compare(
            lhs=mu[i + 1], rhs=mu[i], relation=Relation.GE, tolerance=opts.radial_tolerance,
            provenance=f"lhs: mu at kappa={k1:g}; rhs: mu at kappa={k0:g}",
            theorem="curvature-mu", parameters=params,
        ))
    for report in reports:
        _log_report(report)
    return reports


# =============================================================================
# VANISHING HOLES
# =============================================================================

def _epsilon_ladder(epsilons: Sequence[float], R: float, limit: float) -> List[float]:
    eps = [float(e) for e in epsilons]
    require(len(eps) >= 4, f"epsilon ladder needs at least 4 values (got {len(eps)})")
    require(_strictly_decreasing(eps), f"epsilons must be strictly decreasing (got {eps})")
    require(eps[-1] > 0 and eps[0] < limit, f"epsilons must lie in (0, {limit:g}) for R={R:g}")
    return eps


def richardson_limit(eps_a: float, value_a: float, eps_b: float, value_b: float, rate: float) -> float:
    """Limit at epsilon -> 0 of value = limit + C eps^rate from two samples."""
    wa, wb = eps_a ** rate, eps_b ** rate
    return (value_a * wb - value_b * wa) / (wb - wa)


def check_vanishing_hole(
    p: float,
    n: int,
    R: float,
    epsilons: Sequence[float],
    opts: Optional[VerifyOptions] = None,
    kappa: float = 0.0,
) -> Tuple[FitReport, List[ComparisonReport]]:
    """Approach of lambda(B(R) minus B(eps)) to the Dirichlet ball eigenvalue.

    Reports, per eps: lambda(eps) > lambda_0, the fitted sandwich
    lambda_0 - C1 eps^(n-1) <= lambda(eps) <= lambda_0 + C2 eps^n, and domain
    monotonicity along the ladder; then the Richardson limit against
    lambda_0. The fit of |lambda(eps) - lambda_0| against eps estimates
    the rate n.
    """
    opts = opts or VerifyOptions()
    eps = _epsilon_ladder(epsilons, R, R / 2.0)
    sf = SpaceForm(n, kappa)

    lam0 = solve_dirichlet_ball(sf, p, R, opts.solver).eigenvalue
    lam = [solve_lambda_star(sf, p, AnnulusSpec(e, R), opts.solver).eigenvalue for e in eps]
    gaps = [abs(v - lam0) for v in lam]
    fit = fit_loglog(eps, gaps)

    base = {"p": p, "n": n, "R": R, "kappa": kappa, "lambda_0": lam0}
    reports = []
    for e, v in zip(eps, lam):
        reports.append(ComparisonReport.compare(
            lhs=v, rhs=lam0, relation=Relation.GE, tolerance=0.0,
            provenance=f"lhs: lambda of the annulus with hole {e:g}; rhs: Dirichlet ball eigenvalue",
            theorem="vanishing-hole-above", parameters={**base, "epsilon": e},
        ))

    if not _strictly_decreasing(lam):
        logger.warning("  lambda(eps) is not monotone along the ladder: domain monotonicity violated")
    for i in range(len(eps) - 1):
        reports.append(ComparisonReport.compare(
            lhs=lam[i], rhs=lam[i + 1], relation=Relation.GE, tolerance=opts.radial_tolerance,
            provenance=f"lhs: lambda at eps={eps[i]:g}; rhs: lambda at eps={eps[i + 1]:g}",
            theorem="vanishing-hole-monotone", parameters={**base, "epsilon": eps[i]},
        ))

    # Constants fitted at the smallest hole
    c_upper = (lam[-1] - lam0) / eps[-1] ** n
    c_lower = max(0.0, (lam0 - lam[-1]) / eps[-1] ** (n - 1))
    for e, v in zip(eps, lam):
        upper = lam0 + opts.sandwich_allowance * max(c_upper, 0.0) * e ** n
        lower = lam0 - opts.sandwich_allowance * c_lower * e ** (n - 1)
        params = {**base, "epsilon": e, "c_upper": c_upper, "c_lower": c_lower}
        reports.append(ComparisonReport.compare(
            lhs=v, rhs=upper, relation=Relation.LE, tolerance=opts.radial_tolerance,
            provenance=f"lhs: lambda at eps={e:g}; rhs: lambda_0 + C2 eps^{n}",
            theorem="vanishing-hole-upper", parameters=params,
        ))
        reports.append(ComparisonReport.compare(
            lhs=v, rhs=lower, relation=Relation.GE, tolerance=opts.radial_tolerance,
            provenance=f"lhs: lambda at eps={e:g}; rhs: lambda_0 - C1 eps^{n - 1}",
            theorem="vanishing-hole-lower", parameters=params,
        ))

    limit = richardson_limit(eps[-2], lam[-2], eps[-1], lam[-1], float(n))
    reports.append(ComparisonReport.compare(
        lhs=limit, rhs=lam0, relation=Relation.EQ, tolerance=opts.extrapolation_tolerance,
        provenance=f"lhs: Richardson limit of lambda(eps) at rate {n}; rhs: Dirichlet ball eigenvalue",
        theorem="vanishing-hole-limit", parameters=base,
    ))

    logger.info(f"  vanishing hole: slope {fit.slope:.4f} (rate {n}), R^2 {fit.r_squared:.6f}")
    for report in reports:
        _log_report(report)
    return fit, reports


def check_mu_decay(
    p: float,
    n: int,
    R: float,
    epsilons: Sequence[float],
    opts: Optional[VerifyOptions] = None,
) -> Tuple[FitReport, List[ComparisonReport]]:
    """Decay of mu(B(R) minus B(eps)) as eps shrinks, for n >= 3.

    The fitted log-log slope must be at least n - 2 - slope_margin; strict
    decrease along the ladder is reported pairwise.
    """
    opts = opts or VerifyOptions()
    require(n >= 3, f"mu decays to zero only for n >= 3 (got n = {n})")
    eps = _epsilon_ladder(epsilons, R, R)
    sf = SpaceForm(n, 0.0)
    layout = BoundaryLayout.INNER_DIRICHLET_OUTER_NEUMANN
    mu = [solve_mu_star(sf, p, AnnulusSpec(e, R, layout), opts.solver).eigenvalue for e in eps]
    fit = fit_loglog(eps, mu)

    base = {"p": p, "n": n, "R": R}
    reports = []
    for i in range(len(eps) - 1):
        reports.append(ComparisonReport.compare(
            lhs=mu[i], rhs=mu[i + 1], relation=Relation.GE, tolerance=0.0,
            provenance=f"lhs: mu at eps={eps[i]:g}; rhs: mu at eps={eps[i + 1]:g}",
            theorem="mu-decay-monotone", parameters={**base, "epsilon": eps[i]},
        ))
    reports.append(ComparisonReport.compare(
        lhs=fit.slope, rhs=n - 2 - opts.slope_margin, relation=Relation.GE, tolerance=0.0,
        provenance=f"lhs: fitted log-log slope of mu(eps); rhs: n - 2 - {opts.slope_margin:g}",
        theorem="mu-decay-rate", parameters={**base, "r_squared": fit.r_squared},
    ))

    logger.info(f"  mu decay: slope {fit.slope:.4f} (bound {n - 2}), R^2 {fit.r_squared:.6f}")
    for report in reports:
        _log_report(report)
    return fit, reports


# =============================================================================
# TRIAL-FUNCTION BOUND
# =============================================================================

def mu_trial_upper_bound(
    sf: SpaceForm, p: float, epsilon: float, eta: float, outer_radius: float
) -> float:
    """Rayleigh quotient of the ramp min((r - eps)/eta, 1) on B(R) minus B(eps).

    The ramp vanishes on the inner sphere and is admissible for the
    inner-Dirichlet problem, so the quotient bounds mu from above.
    """
    require_exponent(p)
    if not (epsilon > 0 and eta > 0 and epsilon + eta <= outer_radius):
        raise GeometryError(
            f"ramp [{epsilon:g}, {epsilon + eta:g}] must fit inside the ball of radius {outer_radius:g}"
        )
    AnnulusSpec(epsilon, outer_radius).check_fits(sf)

    def density(r):
        return float(volume_element(sf, r))

    edge = epsilon + eta
    quad = dict(epsabs=0.0, epsrel=1e-12, limit=200)
    energy, _ = integrate.quad(density, epsilon, edge, **quad)
    energy *= eta ** (-p)
    ramp, _ = integrate.quad(lambda r: ((r - epsilon) / eta) ** p * density(r), epsilon, edge, **quad)
    cap = 0.0
    if edge < outer_radius:
        cap, _ = integrate.quad(density, edge, outer_radius, **quad)
    return float(energy / (ramp + cap))


def scan_trial_bounds(
    sf: SpaceForm, p: float, epsilon: float, outer_radius: float, etas: Sequence[float]
) -> Tuple[List[float], FitReport]:
    """Ramp bounds over a ladder of widths, with their log-log fit in eta."""
    bounds = [mu_trial_upper_bound(sf, p, epsilon, eta, outer_radius) for eta in etas]
    return bounds, fit_loglog(list(etas), bounds)


def check_trial_bound(
    p: float,
    n: int,
    R: float,
    epsilon: float,
    eta: float,
    opts: Optional[VerifyOptions] = None,
) -> ComparisonReport:
    """Ramp bound against the computed mu of B(R) minus B(eps)."""
    opts = opts or VerifyOptions()
    sf = SpaceForm(n, 0.0)
    bound = mu_trial_upper_bound(sf, p, epsilon, eta, R)
    mu = solve_mu_star(
        sf, p, AnnulusSpec(epsilon, R, BoundaryLayout.INNER_DIRICHLET_OUTER_NEUMANN), opts.solver
    ).eigenvalue
    report = ComparisonReport.compare(
        lhs=bound, rhs=mu, relation=Relation.GE, tolerance=opts.radial_tolerance,
        provenance=f"lhs: ramp quotient with width {eta:g}; rhs: mu of the annulus [{epsilon:g}, {R:g}]",
        theorem="trial-bound", parameters={"p": p, "n": n, "R": R, "epsilon": epsilon, "eta": eta},
    )
    _log_report(report)
    return report


# =============================================================================
# SHAPE DERIVATIVE
# =============================================================================

def hadamard_derivative(result: EigenResult) -> float:
    """d lambda / d r1 = lambda u(r1)^p Area(S(r1)) for the normalized inner-Neumann profile.

    The gradient vanishes on the Neumann sphere, and moving it outward
    removes mass at the inner boundary, so the derivative is positive.
    """
    u_inner = result.profile.value[0]
    area = sphere_area(result.space_form, result.inner_radius)
    return float(result.eigenvalue * abs(u_inner) ** result.p * area)


def check_hadamard(
    p: float,
    n: int,
    r1: float,
    r2: float,
    delta: float,
    opts: Optional[VerifyOptions] = None,
    kappa: float = 0.0,
    solver: SolverOptions = HADAMARD_SOLVER,
) -> List[ComparisonReport]:
    """Shape derivative in the inner radius against a central difference.

    The difference is repeated at delta/2; its mismatch with the formula
    must shrink by at least opts.hadamard_refinement, as a second-order
    difference does.
    """
    opts = opts or VerifyOptions()
    require(0 < delta <= r1 / 10.0, f"delta must lie in (0, r1/10] (got {delta})")
    sf = SpaceForm(n, kappa)

    centre = solve_lambda_star(sf, p, AnnulusSpec(r1, r2), solver)
    formula = hadamard_derivative(centre)
    difference = _central_difference(sf, p, r1, r2, delta, solver)
    half = _central_difference(sf, p, r1, r2, delta / 2.0, solver)
    mismatch = abs(difference - formula) / abs(formula)
    half_mismatch = abs(half - formula) / abs(formula)
    ratio = mismatch / half_mismatch if half_mismatch > 0 else math.inf
    base = {"p": p, "n": n, "kappa": kappa, "r1": r1, "r2": r2, "delta": delta}

    reports = [
        ComparisonReport.compare(
            lhs=difference,
            rhs=formula,
            relation=Relation.EQ,
            tolerance=max(opts.hadamard_tolerance, delta ** 2),
            provenance="lhs: central difference of lambda in r1; rhs: lambda u(r1)^p Area(S(r1))",
            theorem="hadamard",
            parameters={
                **base,
                "eigenvalue": centre.eigenvalue,
                "sign": "positive" if formula > 0 else "negative",
                "mismatch": mismatch,
            },
        ),
        ComparisonReport.compare(
            lhs=ratio,
            rhs=opts.hadamard_refinement,
            relation=Relation.GE,
            tolerance=0.0,
            provenance=f"lhs: mismatch at delta={delta:g} over mismatch at delta={delta / 2:g}; rhs: required shrink",
            theorem="hadamard-refinement",
            parameters={**base, "mismatch": mismatch, "half_mismatch": half_mismatch},
        ),
    ]
    for report in reports:
        _log_report(report)
    return reports


def _central_difference(
    sf: SpaceForm, p: float, r1: float, r2: float, delta: float, solver: SolverOptions
) -> float:
    above = solve_lambda_star(sf, p, AnnulusSpec(r1 + delta, r2), solver).eigenvalue
    below = solve_lambda_star(sf, p, AnnulusSpec(r1 - delta, r2), solver).eigenvalue
    return (above - below) / (2.0 * delta)


# =============================================================================
# SIGN STRUCTURE
# =============================================================================

def check_sign_structure(result: EigenResult) -> ComparisonReport:
    """Strict sign of the flux inside, zero flux at the Neumann end.

    lhs is the fraction of samples with the required sign; the report
    passes only when it is 1.
    """
    w = np.asarray(result.profile.flux)
    scale = float(np.max(np.abs(w))) if w.size else 0.0
    allowance = max(2.0 * result.boundary_residual, 1e-12) * scale

    if result.problem is ProblemKind.MU:
        ok = w > 0.0
        ok[-1] = abs(w[-1]) <= allowance
        expected = "W > 0 on [r1, r2), W(r2) = 0"
    elif result.problem is ProblemKind.LAMBDA:
        ok = w < 0.0
        ok[0] = abs(w[0]) <= allowance
        expected = "W(r1) = 0, W < 0 on (r1, r2]"
    else:
        ok = w < 0.0
        expected = "W < 0 on (0, r]"

    fraction = float(np.mean(ok)) if ok.size else 0.0
    report = ComparisonReport.compare(
        lhs=fraction, rhs=1.0, relation=Relation.GE, tolerance=0.0,
        provenance=f"fraction of {len(ok)} samples with {expected}",
        theorem="sign-structure",
        parameters={
            "problem": result.problem.value,
            "p": result.p,
            "n": result.space_form.n,
            "kappa": result.space_form.kappa,
            "r1": result.inner_radius,
            "r2": result.outer_radius,
            "violations": int(np.sum(~ok)),
        },
    )
    _log_report(report)
    return report


# =============================================================================
# REARRANGEMENT IDENTITIES
# =============================================================================

def check_rearrangement(
    field: PlanarField,
    p: float,
    sf: SpaceForm,
    hole_volume: float,
    opts: Optional[VerifyOptions] = None,
) -> List[ComparisonReport]:
    """Norm preservation, energy decrease and level volumes of the rearrangement.

    The energy bound needs the field to be symmetric about the hole; on an
    off-center hole the rearranged profile carries more energy than the
    field, and that report is expected to fail.
    """
    opts = opts or VerifyOptions()
    centered = field.domain.shape.hole_centered
    profile = schwarz_rearrange(field, hole_volume, sf, p=p)
    fine = schwarz_rearrange(field, hole_volume, sf, levels=2 * LEVELS, p=p)
    mass = field_mass(field, p)
    energy = dirichlet_energy(field, p)
    params = {"p": p, "kappa": sf.kappa, "hole_volume": hole_volume, "h": field.domain.h}

    reports = [
        ComparisonReport.compare(
            lhs=radial_mass(profile, sf, p), rhs=mass, relation=Relation.EQ,
            tolerance=opts.rearrangement_tolerance,
            provenance="lhs: p-mass of the rearranged profile; rhs: p-mass of the field",
            theorem="rearrangement-norm", parameters=params,
        ),
        ComparisonReport.compare(
            lhs=radial_energy(profile, sf, p), rhs=energy, relation=Relation.LE,
            tolerance=opts.rearrangement_tolerance,
            provenance="lhs: p-energy of the rearranged profile; rhs: discrete p-energy of the field",
            theorem="rearrangement-energy", parameters=params,
            expected=centered,
        ),
        ComparisonReport.compare(
            lhs=radial_mass(fine, sf, p), rhs=radial_mass(profile, sf, p), relation=Relation.EQ,
            tolerance=opts.ladder_tolerance,
            provenance=f"lhs: p-mass with {2 * LEVELS} levels; rhs: p-mass with {LEVELS} levels",
            theorem="rearrangement-ladder", parameters=params,
        ),
    ]

    increasing = field.domain.shape.layout is BoundaryLayout.INNER_DIRICHLET_OUTER_NEUMANN
    _, volumes = level_ladder(field, LEVELS, increasing)
    total = max(float(np.max(volumes)), np.finfo(float).tiny)
    deviation = max(
        abs(ball_volume(sf, schwarz_radius(sf, v + hole_volume)) - hole_volume - v) / total
        for v in volumes
    )
    reports.append(ComparisonReport.compare(
        lhs=deviation, rhs=0.0, relation=Relation.LE, tolerance=opts.volume_tolerance,
        provenance="lhs: largest relative mismatch between level-set and ball volumes; rhs: 0",
        theorem="rearrangement-volume", parameters=params,
    ))
    for report in reports:
        _log_report(report)
    return reports


# =============================================================================
# MESH CONVERGENCE
# =============================================================================

def mesh_convergence(
    shape: ShapeSpec,
    p: float,
    spacings: Sequence[float],
    metric: Metric = Metric.FLAT,
    opts: Optional[VerifyOptions] = None,
) -> Tuple[List[float], ComparisonReport]:
    """Planar eigenvalues under refinement.

    The change between the first two spacings must stay below four times
    the change between the last two.
    """
    opts = opts or VerifyOptions()
    hs = [float(h) for h in spacings]
    require(len(hs) >= 3, f"mesh study needs at least 3 spacings (got {len(hs)})")
    require(_strictly_decreasing(hs), f"spacings must be strictly decreasing (got {hs})")

    values = [minimize_rayleigh(build_domain(shape, h, metric), p, opts.planar).eigenvalue for h in hs]
    changes = [abs(a - b) for a, b in zip(values, values[1:])]
    ratios = [a / b if b > 0 else math.inf for a, b in zip(changes, changes[1:])]

    report = ComparisonReport.compare(
        lhs=changes[0], rhs=4.0 * changes[-1], relation=Relation.LE, tolerance=0.0,
        provenance=f"lhs: change from h={hs[0]:g} to h={hs[1]:g}; rhs: 4x change from h={hs[-2]:g} to h={hs[-1]:g}",
        theorem="mesh-convergence",
        parameters={
            "shape": shape.kind.value, "dims": list(shape.dims), "p": p,
            "spacings": hs, "eigenvalues": values, "ratios": ratios,
        },
    )
    _log_report(report)
    return values, report


def _log_report(report: ComparisonReport) -> None:
    status = "PASS" if report.passed else "FAIL"
    if not report.expected:
        status = f"{status}, expected FAIL"
    message = (
        f"  [{status}] {report.theorem}: {report.lhs:.10g} {report.relation.value} "
        f"{report.rhs:.10g} (slack {report.slack:+.3e}, tol {report.tolerance:.1e})"
    )
    if report.as_expected:
        logger.debug(message)
    else:
        logger.warning(message)
