# schemas/learn.py
"""Classifier and evaluation report models."""

import math
from typing import List, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, field_validator, model_validator

from .embedding import Scheme, _frozen_array


class LinearModel(BaseModel):
    """One-vs-rest linear classifier: one weight row and bias per class."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    weights: np.ndarray
    bias: np.ndarray
    classes: List[int]

    @field_validator("weights", "bias")
    @classmethod
    def as_array(cls, v) -> np.ndarray:
        return _frozen_array(v, np.float64)

    @model_validator(mode="after")
    def check_shapes(self) -> "LinearModel":
        if self.weights.ndim != 2 or self.weights.shape[0] != len(self.classes):
            raise ValueError("one weight vector per class required")
        if self.bias.shape != (len(self.classes),):
            raise ValueError("one bias per class required")
        return self

    @property
    def width(self) -> int:
        return self.weights.shape[1]


class Hyperparams(BaseModel):
    model_config = ConfigDict(frozen=True)

    gamma: float
    d_max: int
    C: float


class CvReport(BaseModel):
    """Repeated k-fold cross-validation summary; accuracies in percent."""

    dataset: str
    scheme: Scheme
    use_labels: bool = False
    classes: List[int]
    mean_accuracy: float
    std_accuracy: float
    repetition_std: float
    per_run_accuracies: List[List[float]]
    chosen_hyperparams: List[List[Hyperparams]]
    wall_time: float
    R: int
    d: int
    seed: int
    wl_iterations: Optional[int] = None

    @model_validator(mode="after")
    def check_statistics(self) -> "CvReport":
        mean, std = summarize(self.per_run_accuracies)
        if abs(mean - self.mean_accuracy) > 1e-9 or abs(std - self.std_accuracy) > 1e-9:
            raise ValueError("mean/std disagree with per_run_accuracies")
        if abs(repetition_spread(self.per_run_accuracies) - self.repetition_std) > 1e-9:
            raise ValueError("repetition_std disagrees with per_run_accuracies")
        return self


def summarize(per_run_accuracies: List[List[float]]) -> tuple[float, float]:
    """Mean and population standard deviation over all runs."""
    flat = np.array([acc for run in per_run_accuracies for acc in run], dtype=np.float64)
    if flat.size == 0:
        return math.nan, math.nan
    return float(flat.mean()), float(flat.std())


def repetition_spread(per_run_accuracies: List[List[float]]) -> float:
    """Standard deviation of the per-repetition mean accuracies."""
    if not per_run_accuracies:
        return math.nan
    means = np.array([np.mean(run) for run in per_run_accuracies], dtype=np.float64)
    return float(means.std())
