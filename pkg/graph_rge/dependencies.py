# dependencies.py
"""Shared resources resolved for every command."""

import logging
from pathlib import Path

from .config import Settings
from .exceptions import UsageError
from .schemas.graph import Dataset
from .schemas.run import RunConfig
from .services.dataset import parse_dataset, wl_relabel

logger = logging.getLogger(__name__)


def get_dataset(config: RunConfig, settings: Settings) -> Dataset:
    """Parse --dataset under --root (or RGE_DATA_ROOT), applying --wl if given."""
    root = config.root or settings.data_root
    candidates = [Path(root) / config.dataset, Path(root)]
    directory = next(
        (c for c in candidates if (c / f"{config.dataset}_A.txt").is_file()), candidates[0]
    )
    dataset = parse_dataset(directory, config.dataset)
    if config.wl is not None:
        logger.info(f"Applying {config.wl} WL iterations to {dataset.name}")
        dataset = wl_relabel(dataset, config.wl)
    return dataset


def get_output_dir(config: RunConfig, must_be_new: bool = False) -> Path:
    out = Path(config.out)
    if must_be_new and out.exists() and any(out.iterdir()) and not config.overwrite:
        raise UsageError(f"Output directory {out} exists; pass --overwrite to replace it")
    out.mkdir(parents=True, exist_ok=True)
    return out
