# controllers/rsweep.py
"""`rsweep`: accuracy and embedding time against the number of random graphs."""

import logging
from pathlib import Path

from ..config import Settings
from ..dependencies import get_dataset, get_output_dir
from ..schemas.run import RunConfig
from ..services.learn import r_sweep
from ..utils.io import format_number, write_config_record

logger = logging.getLogger(__name__)


def add_parser(subparsers, parents):
    parser = subparsers.add_parser("rsweep", parents=parents, help="Accuracy versus R")
    parser.set_defaults(handler=cmd_rsweep)
    return parser


def cmd_rsweep(config: RunConfig, settings: Settings) -> list[Path]:
    dataset = get_dataset(config, settings)
    out = get_output_dir(config)
    chosen, rows = r_sweep(dataset, config.sampler(), threads=config.threads)
    lines = [
        f"# gamma {format_number(chosen.gamma)} d_max {chosen.d_max} C {format_number(chosen.C)}",
        "R mean_accuracy std_accuracy embedding_seconds",
    ]
    lines += [
        f"{r.R} {format_number(r.mean_accuracy)} {format_number(r.std_accuracy)} {r.embedding_seconds:.6f}"
        for r in rows
    ]
    path = out / "rsweep.txt"
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return [path, write_config_record(out, config)]
