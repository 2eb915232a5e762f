# controllers/embed.py
"""`embed`: embedding matrix plus the random-graph bundle that produced it."""

import logging
from pathlib import Path

from ..config import Settings
from ..dependencies import get_dataset, get_output_dir
from ..exceptions import DatasetFormatError, DimensionError, PreconditionError
from ..schemas.embedding import RandomGraph
from ..schemas.run import RunConfig
from ..schemas.transport import TransportProblem
from ..services.rge import embed_dataset, transform
from ..services.spectral import embed_graphs
from ..services.transport import cost_matrix, emd, format_transport_debug
from ..utils.io import (
    read_random_graphs,
    write_config_record,
    write_embedding_matrix,
    write_random_graphs,
)

logger = logging.getLogger(__name__)


def add_parser(subparsers, parents):
    parser = subparsers.add_parser("embed", parents=parents, help="Embed a dataset")
    parser.add_argument("--debug-transport", action="store_true",
                        help="Dump cost, flow and objective of one transport problem")
    parser.add_argument("--random-graphs", dest="random_graphs",
                        help="Embed against a random_graphs.txt bundle from an earlier run")
    parser.set_defaults(handler=cmd_embed)
    return parser


def load_bundle(config: RunConfig) -> list[RandomGraph]:
    """Random graphs of an earlier run, checked against the current flags."""
    bundle = read_random_graphs(config.random_graphs)
    if not bundle:
        raise DatasetFormatError(f"Random-graph bundle {config.random_graphs} is empty")
    if bundle[0].d != config.d:
        raise DimensionError(f"Bundle holds d={bundle[0].d} vectors, run uses d={config.d}")
    if (bundle[0].labels is not None) != config.use_labels:
        raise PreconditionError("Labeled bundles go with --use-labels and unlabeled ones without")
    return bundle


def cmd_embed(config: RunConfig, settings: Settings) -> list[Path]:
    dataset = get_dataset(config, settings)
    out = get_output_dir(config)
    embeddings = embed_graphs(dataset, config.d, config.threads)
    if config.random_graphs is not None:
        random_graphs = load_bundle(config)
        config = config.model_copy(update={"R": len(random_graphs)})
        logger.info(f"Reusing {len(random_graphs)} random graphs from {config.random_graphs}")
        matrix = transform(embeddings, random_graphs, config.sampler(), config.threads)
    else:
        matrix, random_graphs = embed_dataset(embeddings, config.sampler(), threads=config.threads)

    written = [
        write_embedding_matrix(out / "embedding_matrix.txt", matrix),
        write_random_graphs(out / "random_graphs.txt", random_graphs),
        write_config_record(out, config),
    ]
    if config.debug_transport:
        graph, omega = embeddings[0], random_graphs[0]
        labels = graph.labels if config.use_labels else None
        problem = TransportProblem(
            source_weights=graph.weights,
            sink_weights=omega.weights,
            cost=cost_matrix(graph.vectors, omega.vectors, labels, omega.labels, config.d),
        )
        path = out / "transport_debug.txt"
        path.write_text(format_transport_debug(problem, emd(problem)), encoding="utf-8")
        written.append(path)
    logger.info(f"embed finished: {', '.join(p.name for p in written)}")
    return written
