"""
Shooting solver for radial p-Laplacian eigenvalue problems.

Integrates the first-order flux system

    u' = phi_q(W / J),    W' = -lambda J phi_p(u),

with J = s_kappa^(n-1), phi_p(s) = |s|^(p-2) s and q = p/(p-1), on a geodesic
annulus or ball of a space form, and locates the first eigenvalue by
bracketing followed by Brent's method on the boundary residual.

The radial reduction of the p-Laplacian carries the coefficient
(n-1) c_kappa/s_kappa in front of the first-order term; the flux form
encodes it through J'/J.
"""

import math
import logging
from dataclasses import dataclass
from typing import Dict, Any, Optional, Tuple

import numpy as np
from scipy import integrate, optimize

from src.geometry.space_forms import density_function, unit_sphere_area, volume_element
from src.models.entities import (
    AnnulusSpec,
    BoundaryLayout,
    EigenResult,
    ProblemKind,
    RadialProfile,
    SolverOptions,
    SpaceForm,
)
from src.utils.validators import (
    InvariantValidator,
    ParameterError,
    SolverError,
    require,
    require_exponent,
)

logger = logging.getLogger(__name__)

MIN_RESIDUAL_SAMPLES = 64
MAX_CENTER_HALVINGS = 4


def phi(s: float, p: float) -> float:
    """phi_p(s) = |s|^(p-2) s, continuous at 0 for p > 1."""
    return math.copysign(abs(s) ** (p - 1.0), s)


def conjugate_exponent(p: float) -> float:
    """Hoelder conjugate q = p/(p-1)."""
    return p / (p - 1.0)


@dataclass
class _Shooter:
    """Initial-value integrations of the flux system for one problem."""
    sf: SpaceForm
    p: float
    problem: ProblemKind
    r_start: float
    r_end: float
    opts: SolverOptions

    def __post_init__(self):
        self.q = conjugate_exponent(self.p)
        self.density = density_function(self.sf)
        self.max_step = (self.r_end - self.r_start) / self.opts.min_steps
        self.atol = self.opts.ode_tol * 1e-2
        self.last: Dict[str, Any] = {}

    def initial_state(self, lam: float) -> Tuple[float, float]:
        if self.problem is ProblemKind.LAMBDA:
            return 1.0, 0.0
        if self.problem is ProblemKind.MU:
            return 0.0, self.density(self.r_start)
        # Two-term center expansion: W(r0) = -lam * int_0^r0 J phi_p(u) ~ -lam J(r0) r0 / n
        r0 = self.r_start
        return 1.0, -lam * self.density(r0) * r0 / self.sf.n

    def rhs(self, lam: float):
        p, q, density = self.p, self.q, self.density

        def f(r, y):
            jac = density(r)
            return [phi(y[1] / jac, q), -lam * jac * phi(y[0], p)]

        return f

    def _event(self):
        index = 1 if self.problem is ProblemKind.MU else 0

        def crossing(r, y):
            return y[index]

        crossing.terminal = True
        crossing.direction = -1
        return crossing

    def integrate(self, lam: float, t_eval=None, terminal: bool = True):
        """Integrate from r_start to r_end; stops at the first sign change when terminal."""
        sol = integrate.solve_ivp(
            self.rhs(lam),
            (self.r_start, self.r_end),
            list(self.initial_state(lam)),
            method="RK45",
            rtol=self.opts.ode_tol,
            atol=self.atol,
            max_step=self.max_step,
            events=self._event() if terminal else None,
            t_eval=t_eval,
        )
        if sol.status < 0:
            raise SolverError(
                f"integration failed at lambda={lam:.12g}: {sol.message}",
                {"eigenvalue": lam, "message": sol.message},
            )
        return sol

    def boundary_value(self, lam: float) -> float:
        """Signed boundary residual; positive below the first eigenvalue.

        When the solution crosses zero before r_end, the residual is the
        linear extrapolation of the crossing to r_end, which keeps the map
        continuous across the first eigenvalue.
        """
        if lam == 0.0:
            return 1.0
        sol = self.integrate(lam)
        u0, w0 = self.initial_state(lam)
        if sol.status == 1 and sol.t_events[0].size:
            r_cross = float(sol.t_events[0][0])
            u_c, w_c = sol.y_events[0][0]
            jac = self.density(r_cross)
            if self.problem is ProblemKind.MU:
                slope = -lam * jac * phi(u_c, self.p) / w0
            else:
                slope = phi(w_c / jac, self.q) / u0
            value = slope * (self.r_end - r_cross)
        elif self.problem is ProblemKind.MU:
            r_cross = None
            value = float(sol.y[1, -1]) / w0
        else:
            r_cross = None
            value = float(sol.y[0, -1]) / u0
        self.last = {
            "eigenvalue": lam,
            "boundary_value": value,
            "crossing": r_cross,
            "steps": int(sol.t.size),
        }
        return value


def _initial_guess(p: float, length: float) -> float:
    return (p - 1.0) * (math.pi / length) ** p


def _bracket(shooter: _Shooter, length: float) -> Tuple[float, float]:
    """Bracket the first eigenvalue between lo (residual > 0) and hi (residual <= 0)."""
    lo = 0.0
    hi = _initial_guess(shooter.p, length)
    for doubling in range(shooter.opts.max_bracket_doublings):
        value = shooter.boundary_value(hi)
        logger.debug(f"  bracket {doubling}: g({hi:.6g}) = {value:.3e}")
        if value <= 0.0:
            return lo, hi
        lo, hi = hi, 2.0 * hi
    raise SolverError(
        f"no sign change of the boundary residual within "
        f"{shooter.opts.max_bracket_doublings} doublings",
        dict(shooter.last),
    )


def count_sign_changes(shooter: _Shooter, lo: float, hi: float, points: int = 16) -> int:
    """Number of sign changes of the boundary residual on a uniform scan of [lo, hi]."""
    values = np.array([shooter.boundary_value(lam) for lam in np.linspace(lo, hi, points)])
    signs = np.sign(values)
    signs[signs == 0] = -1
    return int(np.sum(signs[1:] != signs[:-1]))


def _normalize(sf: SpaceForm, p: float, r, u, w) -> Tuple[np.ndarray, np.ndarray, float]:
    """Scale (u, W) so that omega * int |u|^p J dr = 1 (trapezoid rule)."""
    omega = unit_sphere_area(sf.n)
    mass = omega * integrate.trapezoid(np.abs(u) ** p * volume_element(sf, r), r)
    if not mass > 0:
        raise SolverError("eigenfunction has zero mass", {"mass": float(mass)})
    scale = mass ** (-1.0 / p)
    u = u * scale
    w = w * scale ** (p - 1.0)
    normalization = omega * integrate.trapezoid(np.abs(u) ** p * volume_element(sf, r), r)
    return u, w, float(normalization)


def ode_residual(profile: RadialProfile, sf: SpaceForm, p: float, eigenvalue: float) -> float:
    """Scaled residual of W' + lambda J phi_p(u) = 0 at interior samples.

    Args:
        profile: Radial profile with at least 64 samples, u > 0 inside
        sf: Space form
        p: Exponent
        eigenvalue: Eigenvalue to test

    Returns:
        max |W' + lambda J phi_p(u)| / max |W'|, W' by central differences
    """
    require(len(profile) >= MIN_RESIDUAL_SAMPLES,
            f"profile needs at least {MIN_RESIDUAL_SAMPLES} samples (got {len(profile)})")
    validator = InvariantValidator()
    validator.validate_profile_positive(profile.value)
    validator.raise_if_invalid(ParameterError)

    r, u, w = profile.r, profile.value, profile.flux
    dw = np.gradient(w, r)[1:-1]
    source = eigenvalue * volume_element(sf, r[1:-1]) * np.sign(u[1:-1]) * np.abs(u[1:-1]) ** (p - 1.0)
    scale = np.max(np.abs(dw))
    if scale == 0.0:
        return math.inf
    return float(np.max(np.abs(dw + source)) / scale)


def _solve(
    sf: SpaceForm,
    p: float,
    problem: ProblemKind,
    r_start: float,
    r_end: float,
    opts: SolverOptions,
    inner_radius: float,
) -> EigenResult:
    shooter = _Shooter(sf, p, problem, r_start, r_end, opts)
    lo, hi = _bracket(shooter, r_end - inner_radius)

    if opts.scan_bracket:
        changes = count_sign_changes(shooter, lo, hi)
        if changes != 1:
            raise SolverError(
                f"boundary residual changes sign {changes} times on [{lo:.6g}, {hi:.6g}]",
                {"bracket": (lo, hi), "sign_changes": changes},
            )

    eigenvalue, info = optimize.brentq(
        shooter.boundary_value,
        lo,
        hi,
        xtol=1e-300,
        rtol=max(opts.eig_rel_tol / 2.0, 4.0 * np.finfo(float).eps),
        maxiter=500,
        full_output=True,
        disp=False,
    )
    if not info.converged:
        raise SolverError(f"root finding did not converge: {info.flag}", dict(shooter.last))

    r = np.linspace(r_start, r_end, opts.samples)
    sol = shooter.integrate(eigenvalue, t_eval=r, terminal=False)
    u, w = sol.y[0], sol.y[1]

    if problem is ProblemKind.MU:
        boundary_residual = abs(w[-1]) / np.max(np.abs(w))
    else:
        boundary_residual = abs(u[-1]) / np.max(np.abs(u))
    if boundary_residual > opts.boundary_tol:
        raise SolverError(
            f"boundary residual {boundary_residual:.3e} exceeds {opts.boundary_tol:.1e}",
            {"eigenvalue": eigenvalue, "boundary_residual": boundary_residual},
        )

    u, w, normalization = _normalize(sf, p, r, u, w)
    profile = RadialProfile(r=r, value=u, flux=w)
    residual = ode_residual(profile, sf, p, eigenvalue) if opts.samples >= MIN_RESIDUAL_SAMPLES else math.nan

    logger.info(
        f"  {problem.value}: {eigenvalue:.12g} (n={sf.n}, kappa={sf.kappa:g}, p={p:g}, "
        f"r=[{inner_radius:g}, {r_end:g}], {info.iterations} iterations)"
    )
    return EigenResult(
        eigenvalue=float(eigenvalue),
        profile=profile,
        boundary_residual=float(boundary_residual),
        ode_residual=residual,
        bisection_iterations=int(info.iterations),
        normalization=normalization,
        problem=problem,
        p=float(p),
        space_form=sf,
        inner_radius=float(inner_radius),
        outer_radius=float(r_end),
        bracket=(float(lo), float(hi)),
    )


def solve_lambda_star(
    sf: SpaceForm, p: float, ann: AnnulusSpec, opts: Optional[SolverOptions] = None
) -> EigenResult:
    """First eigenvalue with Neumann inner and Dirichlet outer boundary.

    Shoots from u(r1) = 1, W(r1) = 0 and drives u(r2) to zero.
    """
    opts = opts or SolverOptions()
    require_exponent(p)
    require(ann.layout is BoundaryLayout.INNER_NEUMANN_OUTER_DIRICHLET,
            f"solve_lambda_star needs the inner-Neumann layout (got {ann.layout.value})")
    ann.check_fits(sf)
    return _solve(sf, p, ProblemKind.LAMBDA, ann.r1, ann.r2, opts, ann.r1)


def solve_mu_star(
    sf: SpaceForm, p: float, ann: AnnulusSpec, opts: Optional[SolverOptions] = None
) -> EigenResult:
    """First eigenvalue with Dirichlet inner and Neumann outer boundary.

    Shoots from u(r1) = 0 with unit flux and drives W(r2) to zero.
    """
    opts = opts or SolverOptions()
    require_exponent(p)
    require(ann.layout is BoundaryLayout.INNER_DIRICHLET_OUTER_NEUMANN,
            f"solve_mu_star needs the inner-Dirichlet layout (got {ann.layout.value})")
    ann.check_fits(sf)
    return _solve(sf, p, ProblemKind.MU, ann.r1, ann.r2, opts, ann.r1)


def solve_annulus(
    sf: SpaceForm, p: float, ann: AnnulusSpec, opts: Optional[SolverOptions] = None
) -> EigenResult:
    """Dispatch to the lambda or mu solver according to the annulus layout."""
    if ann.layout is BoundaryLayout.INNER_DIRICHLET_OUTER_NEUMANN:
        return solve_mu_star(sf, p, ann, opts)
    return solve_lambda_star(sf, p, ann, opts)


def solve_dirichlet_ball(
    sf: SpaceForm, p: float, r: float, opts: Optional[SolverOptions] = None
) -> EigenResult:
    """First Dirichlet eigenvalue of the geodesic ball B(r).

    The flux system is singular at the center, so integration starts at an
    offset r0 with the two-term expansion; r0 is halved until the eigenvalue
    moves by less than eig_rel_tol.
    """
    opts = opts or SolverOptions()
    require_exponent(p)
    require(r > 0 and r < sf.diameter,
            f"ball radius must lie in (0, {sf.diameter:.6g}) (got {r})")

    r0 = opts.start_offset if opts.start_offset is not None else 1e-6 * r
    require(r0 < r, f"start offset {r0} must be below the radius {r}")
    result = _solve(sf, p, ProblemKind.DIRICHLET_BALL, r0, r, opts, 0.0)
    for _ in range(MAX_CENTER_HALVINGS):
        r0 /= 2.0
        refined = _solve(sf, p, ProblemKind.DIRICHLET_BALL, r0, r, opts, 0.0)
        change = abs(refined.eigenvalue - result.eigenvalue) / refined.eigenvalue
        result = refined
        if change < opts.eig_rel_tol:
            break
        logger.debug(f"  center offset {r0:.3e}: eigenvalue moved by {change:.3e}")
    return result


def shooting_residual(
    sf: SpaceForm,
    p: float,
    problem: ProblemKind,
    r_start: float,
    r_end: float,
    eigenvalue: float,
    opts: Optional[SolverOptions] = None,
) -> float:
    """Boundary residual of a single shoot at a trial eigenvalue."""
    shooter = _Shooter(sf, p, problem, r_start, r_end, opts or SolverOptions())
    return shooter.boundary_value(eigenvalue)
