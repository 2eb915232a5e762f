# controllers/cv.py
"""`cv`: repeated stratified cross-validation report."""

import logging
from pathlib import Path

from ..config import Settings
from ..dependencies import get_dataset, get_output_dir
from ..schemas.run import RunConfig
from ..services.learn import cross_validate
from ..utils.io import format_cv_report, write_config_record

logger = logging.getLogger(__name__)


def add_parser(subparsers, parents):
    parser = subparsers.add_parser("cv", parents=parents, help="Cross-validate a linear SVM")
    parser.add_argument("--repetitions", type=int, default=10)
    parser.add_argument("--folds", type=int, default=10)
    parser.set_defaults(handler=cmd_cv)
    return parser


def cmd_cv(config: RunConfig, settings: Settings) -> list[Path]:
    dataset = get_dataset(config, settings)
    out = get_output_dir(config)
    report = cross_validate(
        dataset,
        config.sampler(),
        repetitions=config.repetitions,
        folds=config.folds,
        threads=config.threads,
        wl_iterations=config.wl,
    )
    logger.info(
        f"{dataset.name}: {report.mean_accuracy:.2f} +/- {report.std_accuracy:.2f}% "
        f"in {report.wall_time:.1f}s"
    )
    report_path = out / "cv_report.txt"
    report_path.write_text(format_cv_report(report), encoding="utf-8")
    timing_path = out / "timings.txt"
    timing_path.write_text(f"wall_time_seconds {report.wall_time:.6f}\n", encoding="utf-8")
    return [report_path, timing_path, write_config_record(out, config)]
