# schemas/run.py
"""Resolved command-line configuration, written next to every output."""

from pathlib import Path
from typing import Literal, Optional

from pydantic import BaseModel, ConfigDict, field_validator, model_validator

from .embedding import SamplerConfig, Scheme

Command = Literal["embed", "kernel", "cv", "bench", "gen", "rsweep"]


class RunConfig(BaseModel):
    model_config = ConfigDict(frozen=True)

    command: Command
    dataset: Optional[str] = None
    root: Optional[Path] = None
    scheme: Scheme = Scheme.RF
    use_labels: bool = False
    wl: Optional[int] = None
    d: int = 6
    R: int = 128
    dmax: int = 10
    gamma: float = 0.1
    seed: int = 0
    out: Path = Path("runs")
    threads: int = 1
    force: bool = False
    overwrite: bool = False
    max_seconds: Optional[float] = None
    node_count: int = 100
    graph_count: int = 100
    repetitions: int = 10
    folds: int = 10
    debug_transport: bool = False
    random_graphs: Optional[Path] = None
    embedding: Optional[Path] = None

    @field_validator("wl")
    @classmethod
    def wl_must_be_positive(cls, v: Optional[int]) -> Optional[int]:
        if v is not None and v < 1:
            raise ValueError("--wl must be at least 1")
        return v

    @field_validator("threads", "d", "R", "dmax", "repetitions", "folds", "node_count", "graph_count")
    @classmethod
    def must_be_positive(cls, v: int) -> int:
        if v < 1:
            raise ValueError("must be at least 1")
        return v

    @model_validator(mode="after")
    def check_flag_combinations(self) -> "RunConfig":
        if self.use_labels and self.scheme != Scheme.ASG:
            raise ValueError("--use-labels requires --scheme asg")
        if self.command in ("embed", "kernel", "cv", "rsweep") and not self.dataset:
            raise ValueError(f"{self.command} requires --dataset")
        return self

    def sampler(self) -> SamplerConfig:
        return SamplerConfig(
            scheme=self.scheme,
            d_max=self.dmax,
            R=self.R,
            gamma=self.gamma,
            d=self.d,
            seed=self.seed,
            use_labels=self.use_labels,
        )
