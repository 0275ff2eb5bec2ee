"""Command-line front end: config parsing, dispatch, records and cache."""

from src.cli.config import build_parser, parse_config
from src.cli.runner import EXIT_CHECK_FAILED, EXIT_CONFIG, EXIT_OK, EXIT_SOLVER, run
from src.cli.plotdata import emit_plotdata

__all__ = [
    "build_parser",
    "parse_config",
    "run",
    "emit_plotdata",
    "EXIT_OK",
    "EXIT_CHECK_FAILED",
    "EXIT_CONFIG",
    "EXIT_SOLVER",
]
