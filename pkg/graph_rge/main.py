# main.py
"""Command-line entry point: `python -m graph_rge <command> [flags]`."""

import argparse
import logging
import sys
from typing import Optional, Sequence

import numpy as np
from pydantic import ValidationError

from .config import get_settings
from .controllers import COMMANDS
from .exceptions import EXIT_DATA, EXIT_NUMERICAL, EXIT_OK, EXIT_USAGE, RgeError
from .schemas.embedding import Scheme
from .schemas.run import RunConfig

logger = logging.getLogger(__name__)


def common_flags() -> argparse.ArgumentParser:
    parent = argparse.ArgumentParser(add_help=False)
    parent.add_argument("--dataset", help="Dataset name (file prefix)")
    parent.add_argument("--root", help="Directory holding the dataset files")
    parent.add_argument("--scheme", choices=[s.value for s in Scheme])
    parent.add_argument("--use-labels", dest="use_labels", action="store_true", default=None)
    parent.add_argument("--wl", type=int, help="WL relabeling iterations before embedding")
    parent.add_argument("--d", type=int, help="Node embedding dimension")
    parent.add_argument("--R", type=int, help="Number of random graphs")
    parent.add_argument("--dmax", type=int, help="Maximum random graph size")
    parent.add_argument("--gamma", type=float, help="Feature map scale")
    parent.add_argument("--seed", type=int)
    parent.add_argument("--out", help="Output directory")
    parent.add_argument("--threads", type=int)
    parent.add_argument("--force", action="store_true", default=None)
    parent.add_argument("--overwrite", action="store_true", default=None)
    parent.add_argument("--max-seconds", dest="max_seconds", type=float)
    parent.add_argument("--graphs", dest="graph_count", type=int, help="Synthetic graph count")
    parent.add_argument("--nodes", dest="node_count", type=int, help="Synthetic graph size")
    parent.add_argument("--log-level", dest="log_level")
    return parent


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="graph_rge", description="Random graph embeddings for graph sets")
    subparsers = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    for controller in COMMANDS:
        # One parent per command; set_defaults on a shared parent leaks across commands.
        controller.add_parser(subparsers, [common_flags()])
    return parser


def resolve_config(args: argparse.Namespace) -> RunConfig:
    settings = get_settings()
    values = {
        k: v for k, v in vars(args).items()
        if v is not None and k not in ("handler", "log_level")
    }
    values.setdefault("threads", settings.threads)
    values.setdefault("out", settings.output_dir / args.command)
    return RunConfig(**values)


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    settings = get_settings()
    logging.basicConfig(
        level=(args.log_level or settings.log_level).upper(),
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )
    try:
        config = resolve_config(args)
    except ValidationError as exc:
        logger.error(f"Invalid flags: {exc}")
        return EXIT_USAGE

    try:
        args.handler(config, settings)
    except RgeError as exc:
        logger.error(exc.detail)
        return exc.exit_code
    except ValidationError as exc:
        logger.error(f"Invalid data: {exc}")
        return EXIT_DATA
    except (np.linalg.LinAlgError, ArithmeticError) as exc:
        logger.error(f"Numerical failure: {exc}")
        return EXIT_NUMERICAL
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
