# schemas/transport.py
"""Transportation problem and its optimal plan."""

from typing import Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, field_validator, model_validator

from .embedding import _frozen_array


class TransportProblem(BaseModel):
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    source_weights: np.ndarray
    sink_weights: np.ndarray
    cost: np.ndarray

    @field_validator("source_weights", "sink_weights")
    @classmethod
    def weights_must_be_non_negative(cls, v) -> np.ndarray:
        v = _frozen_array(v, np.float64)
        if v.ndim != 1 or v.size == 0:
            raise ValueError("weights must be a non-empty vector")
        if not np.isfinite(v).all() or (v < 0).any():
            raise ValueError("weights must be finite and non-negative")
        return v

    @field_validator("cost")
    @classmethod
    def cost_must_be_non_negative(cls, v) -> np.ndarray:
        v = _frozen_array(v, np.float64)
        if v.ndim != 2:
            raise ValueError("cost must be a 2-D matrix")
        if not np.isfinite(v).all() or (v < 0).any():
            raise ValueError("cost entries must be finite and non-negative")
        return v

    @model_validator(mode="after")
    def check_shapes(self) -> "TransportProblem":
        expected = (self.source_weights.size, self.sink_weights.size)
        if self.cost.shape != expected:
            raise ValueError(f"cost has shape {self.cost.shape}, expected {expected}")
        return self


class TransportPlan(BaseModel):
    """Optimal flow, its objective, and a matching dual solution.

    The potentials satisfy source_potentials[i] + sink_potentials[j] <= cost[i, j]
    with equality wherever flow[i, j] > 0.
    """

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    flow: np.ndarray
    objective: float
    source_potentials: Optional[np.ndarray] = None
    sink_potentials: Optional[np.ndarray] = None

    @field_validator("flow")
    @classmethod
    def flow_must_be_non_negative(cls, v) -> np.ndarray:
        v = _frozen_array(v, np.float64)
        if (v < 0).any():
            raise ValueError("flow must be non-negative")
        return v
