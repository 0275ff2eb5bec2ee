"""
Command-line parsing into a validated RunConfig.

Values come from, in increasing precedence: schema defaults, a JSON config
file (``--config``), the ANNULUS_SPECTRA_CACHE environment variable (cache
directory only) and explicit flags.
"""

import os
import json
import argparse
import logging
from pathlib import Path
from typing import Any, Dict, List, Optional

from pydantic import ValidationError as PydanticValidationError

from src.models.config import CHECKS, PARAMETER_MODELS, RunConfig
from src.utils.validators import ConfigError

logger = logging.getLogger(__name__)

CACHE_ENV = "ANNULUS_SPECTRA_CACHE"
RUN_KEYS = ("output_path", "cache_dir", "jobs", "use_cache", "verbose")
FILE_KEYS = ("command", "parameters") + RUN_KEYS

PLOTDATA_HELP = """
Columns by record kind (after a leading 'record' index):
    fit      x, y, fit_y
    radial   r, u, flux
    grid     x, y, value
    report   theorem, relation, lhs, rhs, slack, tolerance, passed
"""


def _common_options() -> argparse.ArgumentParser:
    parent = argparse.ArgumentParser(add_help=False, allow_abbrev=False, argument_default=argparse.SUPPRESS)
    parent.add_argument("--config", dest="config_file", help="JSON config file; flags override its values")
    parent.add_argument("--output", "-o", dest="output_path", help="Write the result here instead of stdout")
    parent.add_argument("--cache-dir", dest="cache_dir", help="Result cache directory (default: .cache)")
    parent.add_argument("--jobs", "-j", type=int, help="Concurrent sweep workers (default: 1)")
    parent.add_argument("--no-cache", dest="use_cache", action="store_false", help="Always recompute")
    parent.add_argument("--verbose", "-v", action="store_true", help="Enable verbose logging")
    return parent


def _solver_options(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--eig-rel-tol", dest="eig_rel_tol", type=float, help="Relative eigenvalue tolerance")
    parser.add_argument("--ode-tol", dest="ode_tol", type=float, help="ODE stepper tolerance")
    parser.add_argument("--samples", type=int, help="Profile samples")


def _grid_options(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--shape", help="kind:d1,d2,... e.g. annulus:1,0.3")
    parser.add_argument("--offset", type=float, help="Hole center offset along x")
    parser.add_argument("--layout", choices=["lambda", "mu", "neumann"], help="Boundary layout")
    parser.add_argument("--metric", choices=["flat", "sphere"], help="Grid metric")
    parser.add_argument("--h", type=float, help="Grid spacing")
    parser.add_argument("--p", type=float, help="Exponent p > 1")


def build_parser() -> argparse.ArgumentParser:
    """Parser with one subcommand per RunConfig command."""
    parser = argparse.ArgumentParser(
        description="First eigenvalues of the p-Laplacian on annular domains",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        allow_abbrev=False,
        epilog="""
Examples:
    # Inner-Neumann annulus in the plane
    python src/main.py radial --problem lambda --p 2 --n 2 --kappa 0 --r1 0.5 --r2 1

    # Faber-Krahn comparison for an offset hole
    python src/main.py verify faber-krahn --shape annulus:1,0.3 --offset 0.4 --p 2

    # Full verification suite
    python src/main.py verify suite
        """,
    )
    common = _common_options()
    sub = parser.add_subparsers(dest="command", required=True)
    kwargs = dict(parents=[common], allow_abbrev=False, argument_default=argparse.SUPPRESS)

    radial = sub.add_parser("radial", help="Radial annulus eigenvalue", **kwargs)
    radial.add_argument("--problem", choices=["lambda", "mu"], help="lambda: inner Neumann; mu: inner Dirichlet")
    radial.add_argument("--p", type=float, help="Exponent p > 1")
    radial.add_argument("--n", type=int, help="Dimension")
    radial.add_argument("--kappa", type=float, help="Curvature")
    radial.add_argument("--r1", type=float, help="Inner radius")
    radial.add_argument("--r2", type=float, help="Outer radius")
    _solver_options(radial)

    ball = sub.add_parser("ball", help="Dirichlet eigenvalue of a geodesic ball", **kwargs)
    ball.add_argument("--p", type=float, help="Exponent p > 1")
    ball.add_argument("--n", type=int, help="Dimension")
    ball.add_argument("--kappa", type=float, help="Curvature")
    ball.add_argument("--r", type=float, help="Radius")
    _solver_options(ball)

    grid = sub.add_parser("grid", help="Planar Rayleigh-quotient minimization", **kwargs)
    _grid_options(grid)
    grid.add_argument("--method", choices=["lbfgs", "descent"], help="Minimizer")
    grid.add_argument("--max-iterations", dest="max_iterations", type=int, help="Iteration cap")
    grid.add_argument("--field-csv", dest="field_csv", help="Also export the field as CSV")
    grid.add_argument("--mask-pgm", dest="mask_pgm", help="Also export the cell mask as PGM")

    rearrange = sub.add_parser("rearrange", help="Schwarz rearrangement of a planar eigenfunction", **kwargs)
    _grid_options(rearrange)
    rearrange.add_argument("--method", choices=["lbfgs", "descent"], help="Minimizer")
    rearrange.add_argument("--max-iterations", dest="max_iterations", type=int, help="Iteration cap")
    rearrange.add_argument("--levels", type=int, help="Level ladder size")

    verify = sub.add_parser("verify", help="Comparison checks", **kwargs)
    verify.add_argument("check", choices=CHECKS, help="Check to run")
    _grid_options(verify)
    verify.add_argument("--n", type=int, help="Dimension")
    verify.add_argument("--kappa", type=float, help="Curvature")
    verify.add_argument("--r1", type=float, help="Inner radius")
    verify.add_argument("--r2", type=float, help="Outer radius")
    verify.add_argument("--R", type=float, help="Ball radius for vanishing-hole checks")
    verify.add_argument("--kappas", type=float, nargs="+", help="Curvature ladder")
    verify.add_argument("--epsilons", type=float, nargs="+", help="Decreasing hole radii")
    verify.add_argument("--epsilon", type=float, help="Hole radius of the trial bound")
    verify.add_argument("--eta", type=float, help="Ramp width of the trial bound")
    verify.add_argument("--etas", type=float, nargs="+", help="Ramp widths to scan")
    verify.add_argument("--delta", type=float, help="Finite-difference step in r1")
    verify.add_argument("--spacings", type=float, nargs="+", help="Decreasing grid spacings")
    verify.add_argument("--quick", action="store_true", help="Coarse grids for the suite")

    sweep = sub.add_parser("sweep", help="Radial solves over a parameter grid (CSV)", **kwargs)
    sweep.add_argument("--problem", choices=["lambda", "mu"], help="Problem")
    sweep.add_argument("--kappa", type=float, nargs="+", help="Curvatures")
    sweep.add_argument("--p", type=float, nargs="+", help="Exponents")
    sweep.add_argument("--n", type=int, nargs="+", help="Dimensions")
    sweep.add_argument("--r1", type=float, nargs="+", help="Inner radii")
    sweep.add_argument("--r2", type=float, nargs="+", help="Outer radii")
    _solver_options(sweep)

    plot = sub.add_parser(
        "plotdata",
        help="Tidy CSV from stored records",
        epilog=PLOTDATA_HELP,
        formatter_class=argparse.RawDescriptionHelpFormatter,
        **kwargs,
    )
    plot.add_argument("inputs", nargs="*", default=[], help="Record JSON files")

    return parser


def _load_file(path: str) -> Dict[str, Any]:
    try:
        data = json.loads(Path(path).read_text())
    except FileNotFoundError:
        raise ConfigError(f"config file not found: {path}", "config")
    except json.JSONDecodeError as e:
        raise ConfigError(f"config file {path} is not valid JSON: {e}", "config")
    if not isinstance(data, dict):
        raise ConfigError(f"config file {path} must hold a JSON object", "config")
    for key in data:
        if key not in FILE_KEYS:
            raise ConfigError(f"unknown config key '{key}'", key)
    return data


def _first_error(error: PydanticValidationError) -> ConfigError:
    first = error.errors()[0]
    key = ".".join(str(part) for part in first["loc"]) or None
    where = f"'{key}': " if key else ""
    return ConfigError(f"invalid {where}{first['msg']}", key)


def parse_config(argv: Optional[List[str]] = None) -> RunConfig:
    """Parse flags and an optional config file into a RunConfig.

    Raises:
        ConfigError: unknown or invalid key, named in the message
    """
    args = vars(build_parser().parse_args(argv))
    command = args.pop("command")

    file_data = _load_file(args.pop("config_file")) if "config_file" in args else {}
    if file_data.get("command", command) != command:
        raise ConfigError(f"config file is for '{file_data['command']}', not '{command}'", "command")

    parameters = file_data.get("parameters", {})
    if not isinstance(parameters, dict):
        raise ConfigError("'parameters' must be a JSON object", "parameters")
    parameters = dict(parameters)
    run_settings = {key: file_data[key] for key in RUN_KEYS if key in file_data}
    if os.getenv(CACHE_ENV):
        run_settings["cache_dir"] = os.getenv(CACHE_ENV)

    for key, value in args.items():
        if key in RUN_KEYS:
            run_settings[key] = value
        else:
            parameters[key] = value

    try:
        params = PARAMETER_MODELS[command].model_validate(parameters)
        config = RunConfig(command=command, parameters=params.model_dump(), **run_settings)
    except PydanticValidationError as e:
        raise _first_error(e)

    logger.debug(f"Parsed {command} config: {config.parameters}")
    return config
