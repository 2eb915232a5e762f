# controllers/bench.py
"""`bench`: runtime table over graph count N and graph size n."""

import logging
from pathlib import Path

from ..config import Settings
from ..dependencies import get_output_dir
from ..schemas.run import RunConfig
from ..services.bench import run_benchmark
from ..utils.io import write_config_record

logger = logging.getLogger(__name__)


def add_parser(subparsers, parents):
    parser = subparsers.add_parser("bench", parents=parents, help="Scalability timings")
    parser.set_defaults(handler=cmd_bench, dmax=10, R=128, d=6, graph_count=1000)
    return parser


def cmd_bench(config: RunConfig, settings: Settings) -> list[Path]:
    out = get_output_dir(config)
    result = run_benchmark(
        default_graph_count=config.graph_count,
        default_node_count=config.node_count,
        config=config.sampler(),
        threads=config.threads,
        max_seconds=config.max_seconds,
    )
    lines = ["axis value eigen_seconds embedding_seconds total_seconds"]
    lines += [
        f"{r.axis} {r.value} {r.eigen_seconds:.6f} {r.embedding_seconds:.6f} {r.total_seconds:.6f}"
        for r in result.rows
    ]
    for axis, slope in result.slopes.items():
        lines.append(f"# slope {axis} {'nan' if slope is None else f'{slope:.4f}'}")
    lines.append(f"# complete {str(result.complete).lower()}")
    path = out / "bench.txt"
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    logger.info(f"bench wrote {len(result.rows)} rows, slopes {result.slopes}")
    return [path, write_config_record(out, config)]
