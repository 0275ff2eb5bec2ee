#!/usr/bin/env python3
"""
Annulus Spectra

Main entry point for first-eigenvalue computations of the p-Laplacian on
annular domains with mixed boundary conditions, and for the comparison
checks built on them.

Usage:
    python src/main.py <command> [options]

Commands:
    radial      Radial annulus eigenvalue (lambda or mu problem)
    ball        Dirichlet eigenvalue of a geodesic ball
    grid        Planar Rayleigh-quotient minimization
    rearrange   Schwarz rearrangement of a planar eigenfunction
    verify      Comparison checks, or the whole suite
    sweep       Radial solves over a parameter grid (CSV)
    plotdata    Tidy CSV from stored records

Exit codes: 0 success, 1 a check failed, 2 configuration error, 3 solver failure.
"""

import os
import sys
import logging
from pathlib import Path
from typing import List, Optional

# Add src to path for imports
sys.path.insert(0, str(Path(__file__).parent.parent))

import colorlog
from dotenv import load_dotenv

from src.cli.config import parse_config
from src.cli.runner import EXIT_CONFIG, run
from src.utils.validators import ConfigError


def setup_logging(verbose: bool = False):
    """Configure logging on stderr; stdout carries results only."""
    level = logging.DEBUG if verbose else logging.INFO

    formatter = colorlog.ColoredFormatter(
        '%(log_color)s%(asctime)s | %(levelname)-8s | %(message)s',
        datefmt='%H:%M:%S'
    )

    console = logging.StreamHandler(sys.stderr)
    console.setLevel(level)
    console.setFormatter(formatter)

    root = logging.getLogger()
    root.setLevel(level)
    root.handlers.clear()
    root.addHandler(console)


def main(argv: Optional[List[str]] = None) -> int:
    """Main entry point."""
    # Load environment variables
    load_dotenv()

    env_verbose = os.getenv("VERBOSE", "").lower() == "true"
    setup_logging(env_verbose)
    logger = logging.getLogger(__name__)

    try:
        config = parse_config(argv)
    except ConfigError as e:
        logger.error(f"Configuration error: {e}")
        return EXIT_CONFIG
    except SystemExit as e:
        # argparse usage errors and --help
        return EXIT_CONFIG if e.code else 0

    if config.verbose and not env_verbose:
        setup_logging(True)

    logger.debug(f"Command: {config.command}, cache: {config.cache_dir}, jobs: {config.jobs}")
    return run(config)


if __name__ == "__main__":
    sys.exit(main())
