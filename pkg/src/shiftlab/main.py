import argparse
import logging
import sys
from typing import Any, Dict, List, Optional

from shiftlab.controllers.scenario_controller import EXIT_ERROR, ScenarioController
from shiftlab.exceptions import ShiftlabError
from shiftlab.models.scenario_config import ScenarioConfig
from shiftlab.utils.config import (DEFAULT_OUTPUT_DIR, DEFAULT_SEED, K_MAX, LIMIT_TOLERANCE, OUTPUT_ENV_VAR,
                                   load_config_file, merge_blocks, resolve_output_dir)
from shiftlab.utils.scenarios import TASKS, scenario_defaults

logger = logging.getLogger("shiftlab")

LOG_FORMAT = "%(asctime)s %(levelname)s %(name)s: %(message)s"


def configure_logging(verbosity: int = 0, quiet: bool = False):
    """One stream handler on the package logger: INFO by default, DEBUG with -v, WARNING with --quiet."""
    level = logging.WARNING if quiet else (logging.DEBUG if verbosity > 0 else logging.INFO)
    handler = logging.StreamHandler()
    handler.setFormatter(logging.Formatter(LOG_FORMAT))
    logger.handlers[:] = [handler]
    logger.setLevel(level)
    logger.propagate = False


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="shiftlab",
        description="Check subspace-hypercyclicity criteria for weighted shifts at desk scale.",
    )
    commands = parser.add_subparsers(dest="command", required=True)
    run = commands.add_parser(
        "run",
        help="run a task or named scenario",
        description=(
            "Exit status: 0 satisfied, 2 violated, 3 inconclusive, 1 error. "
            f"Output directory: --out, else ${OUTPUT_ENV_VAR}, else ./{DEFAULT_OUTPUT_DIR}."
        ),
    )
    run.add_argument("target", choices=TASKS, help="task or named scenario")
    run.add_argument("--config", help="YAML or JSON scenario file merged over the embedded defaults")
    run.add_argument("--kmax", type=int, help=f"number of schedule entries (default {K_MAX})")
    run.add_argument("--tol", type=float, help=f"limit tolerance (default {LIMIT_TOLERANCE:g})")
    run.add_argument("--out", help="output directory for report.json and CSV tables")
    run.add_argument("--seed", type=int, help=f"sampling seed (default {DEFAULT_SEED})")
    run.add_argument("--p", type=int, help="power of T for eigen-scan and witness tasks")
    run.add_argument("--grid", help='lambda grid for eigen-scan, e.g. "annulus(0.1, 16, 24 points)"')
    run.add_argument("--workers", type=int, default=1, help="threads for grid scans (default 1)")
    run.add_argument("-v", "--verbose", action="count", default=0, help="debug logging")
    run.add_argument("--quiet", action="store_true", help="warnings only, no progress bars")
    return parser


def assemble_config(args: argparse.Namespace) -> Dict[str, Any]:
    """Embedded defaults < config file < command-line flags."""
    config = scenario_defaults(args.target)
    if args.config:
        config = merge_blocks(config, load_config_file(args.config))
    overrides: Dict[str, Any] = {}
    if args.kmax is not None:
        overrides["schedule"] = {"k_max": args.kmax}
    if args.tol is not None:
        overrides["tolerances"] = {"limit": args.tol}
    if args.seed is not None:
        overrides["seed"] = args.seed
    if args.p is not None:
        overrides["eigen_scan"] = {"p": args.p}
        overrides["witness"] = {"p": args.p}
    if args.grid is not None:
        overrides.setdefault("eigen_scan", {})["grid"] = args.grid
    return merge_blocks(config, overrides)


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    configure_logging(args.verbose, args.quiet)
    try:
        config = ScenarioConfig.from_dict(assemble_config(args))
        controller = ScenarioController(show_progress=not args.quiet, workers=args.workers)
        result = controller.run(config)
        out_dir = resolve_output_dir(args.out)
        files = controller.write_outputs(result, out_dir)
    except ShiftlabError as e:
        logger.error(str(e))
        logger.debug("details", exc_info=True)
        return EXIT_ERROR
    except OSError as e:
        logger.error(f"cannot write outputs: {e}")
        return EXIT_ERROR
    logger.info(f"verdict {result.verdict.value}; wrote {', '.join(files)} to {out_dir}")
    return result.exit_code


if __name__ == "__main__":
    sys.exit(main())
