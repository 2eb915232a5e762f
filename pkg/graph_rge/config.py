# config.py
"""Runtime settings read from the environment (and an optional .env file)."""

import logging
import os
from functools import lru_cache
from pathlib import Path
from typing import Optional

from dotenv import load_dotenv
from pydantic import BaseModel, field_validator

logger = logging.getLogger(__name__)

# Load environment variables from the .env file
load_dotenv()


class Settings(BaseModel):
    data_root: Path = Path("data")
    output_dir: Path = Path("runs")
    threads: int = os.cpu_count() or 1
    log_level: str = "INFO"

    @field_validator("threads")
    @classmethod
    def threads_must_be_positive(cls, v: int) -> int:
        if v < 1:
            raise ValueError("RGE_THREADS must be at least 1")
        return v

    @field_validator("log_level")
    @classmethod
    def log_level_must_exist(cls, v: str) -> str:
        v = v.upper()
        if not isinstance(logging.getLevelName(v), int):
            raise ValueError(f"Unknown log level: {v}")
        return v


def _env(name: str) -> Optional[str]:
    value = os.getenv(name)
    return value if value else None


@lru_cache(maxsize=1)
def get_settings() -> Settings:
    """Settings resolved once per process."""
    values = {
        "data_root": _env("RGE_DATA_ROOT"),
        "output_dir": _env("RGE_OUTPUT_DIR"),
        "threads": _env("RGE_THREADS"),
        "log_level": _env("RGE_LOG_LEVEL"),
    }
    settings = Settings(**{k: v for k, v in values.items() if v is not None})
    logger.debug(f"Resolved settings: {settings}")
    return settings
