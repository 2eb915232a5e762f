# controllers/gen.py
"""`gen`: write a synthetic dataset in benchmark format."""

import logging
from pathlib import Path

from ..config import Settings
from ..dependencies import get_output_dir
from ..exceptions import NumericalError
from ..schemas.run import RunConfig
from ..services.dataset import generate_synthetic_dataset, parse_dataset, write_dataset
from ..utils.io import write_config_record

logger = logging.getLogger(__name__)


def add_parser(subparsers, parents):
    parser = subparsers.add_parser("gen", parents=parents, help="Generate a synthetic dataset")
    parser.set_defaults(handler=cmd_gen)
    return parser


def cmd_gen(config: RunConfig, settings: Settings) -> list[Path]:
    out = get_output_dir(config, must_be_new=True)
    name = config.dataset or "SYNTH"
    dataset = generate_synthetic_dataset(config.graph_count, config.node_count, config.seed, name=name)
    write_dataset(dataset, out)
    if parse_dataset(out, name) != dataset:
        raise NumericalError(f"Synthetic dataset {name} did not survive a round trip")
    logger.info(f"Generated {config.graph_count} graphs with {config.node_count} nodes in {out}")
    return sorted(out.glob(f"{name}_*.txt")) + [write_config_record(out, config)]
