"""Command-line front end: ``python -m modesort <command> [CONFIG] [options]``."""

import argparse
import logging
import sys
from typing import List, Optional

from .config import load_config
from .errors import (
    ArtifactMissingError,
    ConfigError,
    ConservationError,
    ConvergenceError,
    DomainError,
    SaturationError,
)
from .pipeline import COMMANDS

logger = logging.getLogger("modesort")

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_CONVERGENCE = 3
EXIT_PHYSICS = 4
EXIT_MISSING_ARTIFACT = 5

DESCRIPTIONS = {
    "modes": "simulate the SPDC source and write the signal modes S1-S6",
    "pumps": "design pumps P1-P6 and their 17-line comb representations",
    "matrix": "sweep delay/power and write the two-alphabet efficiency reports",
    "spsa": "run the pump-phase feedback loop on one pump/signal pair",
    "counts": "emulate photon counting and noise-corrected separabilities",
    "align": "recover mode timing offsets from visibility-versus-delay scans",
    "chirp": "measure and correct the chirp of a synthetic comb",
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="modesort", description="Mode-separable frequency conversion toolkit")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_text in DESCRIPTIONS.items():
        cmd = sub.add_parser(name, help=help_text, description=help_text)
        cmd.add_argument("config", nargs="?", default=None, help="JSON configuration file (defaults when omitted)")
        cmd.add_argument("--output-dir", default=None, help="override the configured output directory")
        cmd.add_argument("--seed", type=int, default=None, help="override the configured seed")
        cmd.add_argument("--log-level", default="INFO", choices=["DEBUG", "INFO", "WARNING", "ERROR"])
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=getattr(logging, args.log_level), format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = load_config(args.config)
        updates = {}
        if args.output_dir is not None:
            updates["output_dir"] = args.output_dir
        if args.seed is not None:
            updates["seed"] = args.seed
        if updates:
            cfg = cfg.model_copy(update=updates)
        result = COMMANDS[args.command](cfg)
    except ConfigError as exc:
        logger.error("%s", exc)
        return EXIT_CONFIG
    except DomainError as exc:
        logger.error("invalid input: %s", exc)
        return EXIT_CONFIG
    except ConvergenceError as exc:
        logger.error("%s", exc)
        return EXIT_CONVERGENCE
    except (ConservationError, SaturationError) as exc:
        logger.error("%s", exc)
        return EXIT_PHYSICS
    except ArtifactMissingError as exc:
        logger.error("%s", exc)
        return EXIT_MISSING_ARTIFACT
    if result.exit_code:
        logger.warning("%s finished with exit code %d", args.command, result.exit_code)
    return result.exit_code


if __name__ == "__main__":
    sys.exit(main())
