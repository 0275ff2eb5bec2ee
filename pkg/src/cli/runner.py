"""
Command dispatch: runs a validated RunConfig and writes its output.

Solve and verify commands emit one JSON ResultRecord and go through the
result cache; ``sweep`` and ``plotdata`` emit CSV and are never cached.
"""

import json
import time
import logging
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional, Tuple

import pandas as pd
from tqdm import tqdm

from src.cli.cache import ResultCache
from src.cli.plotdata import emit_plotdata, to_csv_text
from src.cli.records import (
    dumps_record,
    fit_payload,
    grid_payload,
    make_record,
    radial_payload,
    report_payload,
)
from src.models.config import (
    BallParams,
    GridParams,
    PlotdataParams,
    RadialParams,
    RearrangeParams,
    RunConfig,
    SweepParams,
    VerifyParams,
)
from src.models.entities import (
    AnnulusSpec,
    BoundaryLayout,
    ComparisonReport,
    FitReport,
    Metric,
    SolverOptions,
    SpaceForm,
)
from src.solvers.domains import build_domain, export_domain_pgm, parse_shape
from src.solvers.planar import PlanarOptions, export_field_csv, minimize_rayleigh
from src.solvers.radial import solve_annulus, solve_dirichlet_ball
from src.solvers.rearrangement import schwarz_rearrange
from src.utils.validators import ConfigError, SolverError, ValidationError
from src.verify.checks import (
    VerifyOptions,
    check_curvature_monotonicity,
    check_faber_krahn,
    check_hadamard,
    check_mu_decay,
    check_rearrangement,
    check_sign_structure,
    check_trial_bound,
    check_vanishing_hole,
    mesh_convergence,
    scan_trial_bounds,
    symmetrization_plan,
)
from src.verify.suite import VerificationSuite

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_CONFIG = 2
EXIT_SOLVER = 3

SWEEP_COLUMNS = ["problem", "kappa", "p", "n", "r1", "r2", "eigenvalue", "residual", "wall_ms"]

# Per-check defaults for unset verify parameters
DEFAULT_N = {"vanishing-hole": 2, "mu-decay": 3, "trial-bound": 3}
DEFAULT_KAPPAS = VerificationSuite.CURVATURE_KAPPA


def _solver_options(params) -> SolverOptions:
    return SolverOptions(eig_rel_tol=params.eig_rel_tol, ode_tol=params.ode_tol, samples=params.samples)


def _grid_domain(params):
    shape = parse_shape(params.shape, params.offset, BoundaryLayout(params.layout))
    return build_domain(shape, params.h, Metric(params.metric))


def _planar_options(params) -> PlanarOptions:
    return PlanarOptions(method=params.method, max_iterations=params.max_iterations)


# =============================================================================
# SOLVE COMMANDS
# =============================================================================

def run_radial(params: RadialParams) -> Dict[str, Any]:
    sf = SpaceForm(params.n, params.kappa)
    ann = AnnulusSpec(params.r1, params.r2, BoundaryLayout(params.problem))
    return radial_payload(solve_annulus(sf, params.p, ann, _solver_options(params)))


def run_ball(params: BallParams) -> Dict[str, Any]:
    sf = SpaceForm(params.n, params.kappa)
    return radial_payload(solve_dirichlet_ball(sf, params.p, params.r, _solver_options(params)))


def run_grid(params: GridParams) -> Dict[str, Any]:
    domain = _grid_domain(params)
    if params.mask_pgm:
        export_domain_pgm(domain, params.mask_pgm)
    result = minimize_rayleigh(domain, params.p, _planar_options(params))
    if params.field_csv:
        export_field_csv(result.field, params.field_csv)
    return grid_payload(result)


def run_rearrange(params: RearrangeParams) -> Dict[str, Any]:
    domain = _grid_domain(params)
    result = minimize_rayleigh(domain, params.p, _planar_options(params))
    target = symmetrization_plan(domain).target
    profile = schwarz_rearrange(result.field, domain.hole_volume(), target, levels=params.levels, p=params.p)
    return {
        "kind": "radial",
        "problem": params.layout,
        "eigenvalue": result.eigenvalue,
        "p": params.p,
        "n": target.n,
        "kappa": target.kappa,
        "levels": params.levels,
        "r1": float(profile.r[0]),
        "r2": float(profile.r[-1]),
        "profile": {"r": profile.r, "u": profile.value, "flux": profile.flux},
    }


# =============================================================================
# VERIFY
# =============================================================================

def _verify_reports(params: VerifyParams, opts: VerifyOptions) -> Tuple[List[ComparisonReport], Optional[FitReport]]:
    """Reports and optional fit of a single check."""
    check = params.check
    n = params.n or DEFAULT_N.get(check, 2)

    if check == "faber-krahn":
        return [check_faber_krahn(_grid_domain(params), params.p, opts)], None
    if check == "curvature":
        kappas = params.kappas or DEFAULT_KAPPAS
        return check_curvature_monotonicity(params.p, n, params.r1, params.r2, kappas, opts), None
    if check == "vanishing-hole":
        epsilons = params.epsilons or VerificationSuite.HOLE_EPSILONS
        fit, reports = check_vanishing_hole(params.p, n, params.R, epsilons, opts, kappa=params.kappa)
        return reports, fit
    if check == "mu-decay":
        epsilons = params.epsilons or VerificationSuite.MU_EPSILONS
        fit, reports = check_mu_decay(params.p, n, params.R, epsilons, opts)
        return reports, fit
    if check == "trial-bound":
        report = check_trial_bound(params.p, n, params.R, params.epsilon, params.eta, opts)
        fit = None
        if params.etas:
            _, fit = scan_trial_bounds(SpaceForm(n, 0.0), params.p, params.epsilon, params.R, params.etas)
        return [report], fit
    if check == "hadamard":
        return check_hadamard(params.p, n, params.r1, params.r2, params.delta, opts, kappa=params.kappa), None
    if check == "sign-structure":
        sf = SpaceForm(n, params.kappa)
        ann = AnnulusSpec(params.r1, params.r2, BoundaryLayout(params.layout))
        return [check_sign_structure(solve_annulus(sf, params.p, ann, opts.solver))], None
    if check == "rearrangement":
        domain = _grid_domain(params)
        eigen = minimize_rayleigh(domain, params.p, opts.planar)
        target = symmetrization_plan(domain).target
        return check_rearrangement(eigen.field, params.p, target, domain.hole_volume(), opts), None
    if check == "mesh-convergence":
        shape = parse_shape(params.shape, params.offset, BoundaryLayout(params.layout))
        spacings = params.spacings or VerificationSuite.MESH_SPACINGS
        _, report = mesh_convergence(shape, params.p, spacings, Metric(params.metric), opts)
        return [report], None
    raise ConfigError(f"unknown check '{check}'", "check")


def run_verify(params: VerifyParams) -> Dict[str, Any]:
    opts = VerifyOptions()
    if params.check == "suite":
        result = VerificationSuite(opts, quick=params.quick).run_all()
        return {
            "kind": "check",
            "check": "suite",
            "passed": result.passed,
            "expected_failures": len(result.expected_failures),
            "reports": [report_payload(r) for r in result.all_reports],
            "fits": {name: fit_payload(fit) for name, fit in result.fits.items()},
            "fit": None,
        }

    reports, fit = _verify_reports(params, opts)
    return {
        "kind": "check",
        "check": params.check,
        "passed": all(r.as_expected for r in reports),
        "reports": [report_payload(r) for r in reports],
        "fit": fit_payload(fit) if fit is not None else None,
    }


HANDLERS: Dict[str, Callable[[Any], Dict[str, Any]]] = {
    "radial": run_radial,
    "ball": run_ball,
    "grid": run_grid,
    "rearrange": run_rearrange,
    "verify": run_verify,
}


# =============================================================================
# SWEEP / PLOTDATA
# =============================================================================

def sweep_point(task: Tuple[str, Dict[str, Any], Dict[str, Any]]) -> Dict[str, Any]:
    """Solve one sweep point; top-level so worker processes can pickle it."""
    problem, point, solver = task
    started = time.perf_counter()
    result = solve_annulus(
        SpaceForm(point["n"], point["kappa"]),
        point["p"],
        AnnulusSpec(point["r1"], point["r2"], BoundaryLayout(problem)),
        SolverOptions(**solver),
    )
    wall_ms = (time.perf_counter() - started) * 1000.0
    return {
        "problem": problem,
        **point,
        "eigenvalue": result.eigenvalue,
        "residual": result.boundary_residual,
        "wall_ms": wall_ms,
    }


def run_sweep(params: SweepParams, jobs: int = 1) -> str:
    """CSV with one row per sweep point, in input order."""
    solver = {"eig_rel_tol": params.eig_rel_tol, "ode_tol": params.ode_tol, "samples": params.samples}
    tasks = [(params.problem, point, solver) for point in params.points()]
    logger.info(f"Sweeping {len(tasks)} point(s) with {jobs} worker(s)")

    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            rows = list(tqdm(pool.map(sweep_point, tasks), total=len(tasks), desc="sweep"))
    else:
        rows = [sweep_point(task) for task in tqdm(tasks, desc="sweep")]

    return to_csv_text(pd.DataFrame(rows, columns=SWEEP_COLUMNS))


def run_plotdata(params: PlotdataParams) -> str:
    records = []
    for name in params.inputs:
        try:
            records.append(json.loads(Path(name).read_text()))
        except FileNotFoundError:
            raise ConfigError(f"record file not found: {name}", "inputs")
        except json.JSONDecodeError as e:
            raise ConfigError(f"record file {name} is not valid JSON: {e}", "inputs")
    return to_csv_text(emit_plotdata(records))


# =============================================================================
# ENTRY
# =============================================================================

def write_output(text: str, output_path: Optional[str]) -> None:
    if output_path:
        out = Path(output_path)
        out.parent.mkdir(parents=True, exist_ok=True)
        out.write_text(text)
        logger.info(f"Wrote {out}")
    else:
        print(text, end="")


def _exit_code(payload: Dict[str, Any]) -> int:
    return EXIT_OK if payload.get("passed", True) else EXIT_CHECK_FAILED


def _run_record(config: RunConfig) -> int:
    params = config.params()
    # Side-file exports must be rewritten on every run
    cacheable = config.use_cache and not getattr(params, "field_csv", None) and not getattr(params, "mask_pgm", None)
    record = make_record(config.command, config.parameters, {})
    cache = ResultCache(config.cache_dir) if cacheable else None

    if cache is not None:
        cached = cache.load(record.config_digest)
        if cached is not None:
            write_output(cached, config.output_path)
            return _exit_code(json.loads(cached)["payload"])

    payload = HANDLERS[config.command](params)
    record = make_record(config.command, config.parameters, payload)
    text = dumps_record(record)
    if cache is not None:
        cache.store(record.config_digest, text)
    write_output(text, config.output_path)

    code = _exit_code(record.payload)
    if code == EXIT_CHECK_FAILED:
        logger.error(f"{config.command}: at least one check failed")
    return code


def run(config: RunConfig) -> int:
    """Execute a command and return the process exit code.

    0 on success with every check passing, 1 when a check failed (the
    record is still written), 2 on configuration errors, 3 on solver
    failure.
    """
    try:
        if config.command == "sweep":
            write_output(run_sweep(config.params(), config.jobs), config.output_path)
            return EXIT_OK
        if config.command == "plotdata":
            write_output(run_plotdata(config.params()), config.output_path)
            return EXIT_OK
        return _run_record(config)
    except ConfigError as e:
        logger.error(f"Configuration error: {e}")
        return EXIT_CONFIG
    except SolverError as e:
        logger.error(f"Solver failed: {e}")
        if e.diagnostics:
            logger.error(f"  diagnostics: {e.diagnostics}")
        return EXIT_SOLVER
    except ValidationError as e:
        logger.error(f"Invalid input: {e}")
        return EXIT_CONFIG
