# schemas/embedding.py
"""Node embeddings, random graphs, sampler configuration and the RGE matrix."""

import math
from enum import Enum
from typing import Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, field_validator, model_validator

from ..constants import WEIGHT_SUM_TOL


def _frozen_array(v, dtype) -> np.ndarray:
    array = np.array(v, dtype=dtype, copy=True)
    array.setflags(write=False)
    return array


class NodeEmbeddings(BaseModel):
    """Per-graph geometric node embedding (n x d) with nBOW weights."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    vectors: np.ndarray
    weights: np.ndarray
    d: int
    labels: Optional[np.ndarray] = None

    @field_validator("vectors")
    @classmethod
    def vectors_in_unit_hypercube(cls, v) -> np.ndarray:
        v = _frozen_array(v, np.float64)
        if v.ndim != 2:
            raise ValueError("vectors must be a 2-D matrix")
        if v.size and (v.min() < 0.0 or v.max() > 1.0):
            raise ValueError("Embedding entries must lie in [0, 1]")
        return v

    @field_validator("weights")
    @classmethod
    def weights_must_be_distribution(cls, v) -> np.ndarray:
        v = _frozen_array(v, np.float64)
        if v.ndim != 1 or (v < 0).any():
            raise ValueError("weights must be a non-negative vector")
        if abs(v.sum() - 1.0) > WEIGHT_SUM_TOL:
            raise ValueError(f"weights sum to {v.sum()!r}, expected 1")
        return v

    @field_validator("labels")
    @classmethod
    def labels_as_array(cls, v) -> Optional[np.ndarray]:
        return None if v is None else _frozen_array(v, np.int64)

    @model_validator(mode="after")
    def check_shapes(self) -> "NodeEmbeddings":
        n, width = self.vectors.shape
        if width != self.d:
            raise ValueError(f"vectors have width {width}, expected d={self.d}")
        if self.weights.shape != (n,):
            raise ValueError("one weight per node required")
        if self.labels is not None and self.labels.shape != (n,):
            raise ValueError("one label per node required")
        return self

    @property
    def node_count(self) -> int:
        return self.vectors.shape[0]


class Scheme(str, Enum):
    RF = "rf"
    ASG = "asg"


class RandomGraph(BaseModel):
    """A sampled set of D_j node-embedding vectors; one column of the feature map."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    vectors: np.ndarray
    labels: Optional[np.ndarray] = None

    @field_validator("vectors")
    @classmethod
    def vectors_must_be_matrix(cls, v) -> np.ndarray:
        v = _frozen_array(v, np.float64)
        if v.ndim != 2 or v.shape[0] < 1:
            raise ValueError("A random graph needs at least one node vector")
        return v

    @field_validator("labels")
    @classmethod
    def labels_as_array(cls, v) -> Optional[np.ndarray]:
        return None if v is None else _frozen_array(v, np.int64)

    @model_validator(mode="after")
    def check_label_count(self) -> "RandomGraph":
        if self.labels is not None and self.labels.shape != (self.size,):
            raise ValueError("one label per random-graph node required")
        return self

    @property
    def size(self) -> int:
        return self.vectors.shape[0]

    @property
    def d(self) -> int:
        return self.vectors.shape[1]

    @property
    def weights(self) -> np.ndarray:
        # Random graphs carry uniform node mass.
        return np.full(self.size, 1.0 / self.size)

    def as_node_embeddings(self) -> NodeEmbeddings:
        return NodeEmbeddings(
            vectors=np.clip(self.vectors, 0.0, 1.0),
            weights=self.weights,
            d=self.d,
            labels=self.labels,
        )


class SamplerConfig(BaseModel):
    model_config = ConfigDict(frozen=True)

    scheme: Scheme = Scheme.RF
    d_max: int = 10
    R: int = 128
    gamma: float = 0.1
    d: int = 6
    seed: int = 0
    use_labels: bool = False

    @field_validator("d_max", "R", "d")
    @classmethod
    def must_be_positive(cls, v: int) -> int:
        if v < 1:
            raise ValueError("must be at least 1")
        return v

    @field_validator("gamma")
    @classmethod
    def gamma_must_be_positive(cls, v: float) -> float:
        if not v > 0:
            raise ValueError("gamma must be positive")
        return v

    @model_validator(mode="after")
    def labels_need_anchor_subgraphs(self) -> "SamplerConfig":
        if self.use_labels and self.scheme != Scheme.ASG:
            raise ValueError("use_labels requires the asg scheme")
        return self


class EmbeddingMatrix(BaseModel):
    """N x R matrix Z; inner products of its rows approximate the graph kernel."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    values: np.ndarray
    config: SamplerConfig

    @field_validator("values")
    @classmethod
    def values_as_matrix(cls, v) -> np.ndarray:
        v = _frozen_array(v, np.float64)
        if v.ndim != 2:
            raise ValueError("values must be a 2-D matrix")
        return v

    @model_validator(mode="after")
    def check_range(self) -> "EmbeddingMatrix":
        if self.values.shape[1] != self.config.R:
            raise ValueError(f"{self.values.shape[1]} columns, expected R={self.config.R}")
        upper = 1.0 / math.sqrt(self.config.R)
        if self.values.size and (
            self.values.min() <= 0.0 or self.values.max() > upper * (1 + 1e-12)
        ):
            raise ValueError("entries must lie in (0, 1/sqrt(R)]")
        return self
