# services/learn.py
"""Linear SVM on graph embeddings and the repeated cross-validation protocol."""

import logging
import time
import warnings
from itertools import product
from typing import Optional, Sequence

import numpy as np
from pydantic import BaseModel, ConfigDict
from sklearn.exceptions import ConvergenceWarning
from sklearn.model_selection import StratifiedKFold
from sklearn.svm import LinearSVC

from ..constants import (
    C_GRID,
    CV_FOLDS,
    CV_REPETITIONS,
    DMAX_GRID,
    GAMMA_GRID,
    INNER_FOLDS,
    SVM_MAX_EPOCHS,
    SVM_TOL,
)
from ..exceptions import DegenerateLabelError, DimensionError, PreconditionError, StratificationError
from ..schemas.embedding import NodeEmbeddings, SamplerConfig, Scheme
from ..schemas.graph import Dataset
from ..schemas.learn import CvReport, Hyperparams, LinearModel, repetition_spread, summarize
from ..utils.parallel import parallel_map
from ..utils.seeds import child_seeds
from .rge import emd_feature_distances, features_from_distances, generate_random_graphs
from .spectral import embed_graphs

logger = logging.getLogger(__name__)


class SearchGrid(BaseModel):
    model_config = ConfigDict(frozen=True)

    gammas: tuple[float, ...] = GAMMA_GRID
    d_maxes: tuple[int, ...] = DMAX_GRID
    Cs: tuple[float, ...] = C_GRID


def svm_train(features: np.ndarray, labels: Sequence[int], C: float) -> LinearModel:
    """One-vs-rest L2-regularized hinge-loss linear SVM (liblinear dual coordinate descent)."""
    X = np.asarray(features, dtype=np.float64)
    y = np.asarray(labels)
    if X.ndim != 2 or X.shape[0] != y.size:
        raise DimensionError(f"{X.shape} features for {y.size} labels")
    if y.size < 2:
        raise PreconditionError("svm_train needs at least two samples")
    if not C > 0:
        raise PreconditionError(f"C must be positive, got {C}")
    classes = np.unique(y)
    if classes.size < 2:
        raise DegenerateLabelError(f"Only class {classes[0]} present in the training labels")

    svc = LinearSVC(
        C=C, loss="hinge", dual=True, tol=SVM_TOL, max_iter=SVM_MAX_EPOCHS, random_state=0
    )
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", ConvergenceWarning)
        svc.fit(X, y)
    if any(issubclass(w.category, ConvergenceWarning) for w in caught):
        logger.debug(f"LinearSVC hit {SVM_MAX_EPOCHS} epochs (C={C})")

    weights, bias = svc.coef_, svc.intercept_
    if classes.size == 2:
        # Binary liblinear fits one separator; expand to one row per class.
        weights = np.vstack([-weights[0], weights[0]])
        bias = np.array([-bias[0], bias[0]])
    return LinearModel(weights=weights, bias=bias, classes=[int(c) for c in classes])


def svm_decision(model: LinearModel, features: np.ndarray) -> np.ndarray:
    X = np.asarray(features, dtype=np.float64)
    if X.shape[1] != model.width:
        raise DimensionError(f"Features of width {X.shape[1]}, model expects {model.width}")
    return X @ model.weights.T + model.bias


def svm_predict(model: LinearModel, features: np.ndarray) -> np.ndarray:
    """Highest margin wins; ties go to the lower class id."""
    return np.asarray(model.classes)[np.argmax(svm_decision(model, features), axis=1)]


def accuracy(model: LinearModel, features: np.ndarray, labels: Sequence[int]) -> float:
    return float(np.mean(svm_predict(model, features) == np.asarray(labels)) * 100.0)


def stratified_folds(
    labels: Sequence[int], folds: int, seed: int
) -> list[tuple[np.ndarray, np.ndarray]]:
    """Shuffled stratified (train, test) index pairs."""
    y = np.asarray(labels)
    classes, counts = np.unique(y, return_counts=True)
    for class_id, count in zip(classes, counts):
        if count < folds:
            raise StratificationError(int(class_id), int(count), folds)
    splitter = StratifiedKFold(n_splits=folds, shuffle=True, random_state=seed % 2**32)
    return list(splitter.split(np.zeros((y.size, 1)), y))


def _inner_splits(labels: np.ndarray, seed: int) -> Optional[list[tuple[np.ndarray, np.ndarray]]]:
    smallest = int(np.unique(labels, return_counts=True)[1].min())
    folds = min(INNER_FOLDS, smallest)
    if folds < 2:
        return None
    if folds < INNER_FOLDS:
        logger.warning(f"Inner selection shrunk to {folds} folds (smallest class has {smallest})")
    return stratified_folds(labels, folds, seed)


def select_hyperparams(
    distances: dict[int, np.ndarray],
    labels: np.ndarray,
    grid: SearchGrid,
    seed: int,
) -> Hyperparams:
    """Grid point with the best inner-CV accuracy; ties keep the earliest grid point.

    `distances[d_max]` holds the EMD feature distances of the training graphs only.
    """
    splits = _inner_splits(labels, seed)
    if splits is None:
        logger.warning("Too few samples for inner CV; selecting on training accuracy")
    best, best_score = None, -np.inf
    for d_max, gamma in product(grid.d_maxes, grid.gammas):
        Z = features_from_distances(distances[d_max], gamma)
        for C in grid.Cs:
            if splits is None:
                score = accuracy(svm_train(Z, labels, C), Z, labels)
            else:
                score = np.mean([
                    accuracy(svm_train(Z[tr], labels[tr], C), Z[va], labels[va])
                    for tr, va in splits
                ])
            if score > best_score:
                best, best_score = Hyperparams(gamma=gamma, d_max=d_max, C=C), score
    return best


def _fold_distances(
    embeddings: list[NodeEmbeddings],
    config: SamplerConfig,
    d_maxes: Sequence[int],
    training: Sequence[int],
    seed: int,
    threads: int = 1,
) -> dict[int, np.ndarray]:
    """EMD feature distances of all graphs, one matrix per D_max."""
    out = {}
    for d_max in d_maxes:
        sampler = config.model_copy(update={"d_max": d_max, "seed": seed})
        random_graphs = generate_random_graphs(embeddings, sampler, training)
        out[d_max] = emd_feature_distances(
            embeddings, random_graphs, config.d, config.use_labels, threads
        )
    return out


def _evaluate_fold(
    job: tuple[int, int, np.ndarray, np.ndarray, int],
    embeddings: list[NodeEmbeddings],
    labels: np.ndarray,
    config: SamplerConfig,
    grid: SearchGrid,
    shared: Optional[dict[int, np.ndarray]],
) -> tuple[int, int, float, Hyperparams]:
    repetition, fold, train, test, seed = job
    if shared is None:
        # Anchor sub-graphs come from this fold's training graphs only.
        distances = _fold_distances(embeddings, config, grid.d_maxes, train, seed)
    else:
        distances = shared
    chosen = select_hyperparams(
        {k: v[train] for k, v in distances.items()}, labels[train], grid, seed
    )
    Z = features_from_distances(distances[chosen.d_max], chosen.gamma)
    model = svm_train(Z[train], labels[train], chosen.C)
    score = accuracy(model, Z[test], labels[test])
    logger.debug(f"repetition {repetition} fold {fold}: {score:.2f}% with {chosen}")
    return repetition, fold, score, chosen


def cross_validate(
    dataset: Dataset,
    config: SamplerConfig,
    grid: SearchGrid = SearchGrid(),
    repetitions: int = CV_REPETITIONS,
    folds: int = CV_FOLDS,
    threads: int = 1,
    embeddings: Optional[list[NodeEmbeddings]] = None,
    wl_iterations: Optional[int] = None,
) -> CvReport:
    """Repeated stratified k-fold CV with inner hyperparameter selection.

    Node embeddings use no labels and are computed once; RF random graphs are
    drawn once per repetition, anchor sub-graphs once per fold.
    """
    started = time.perf_counter()
    labels = np.asarray(dataset.graph_labels)
    if embeddings is None:
        embeddings = embed_graphs(dataset, config.d, threads)
    logger.info(
        f"Cross-validating {dataset.name}: {repetitions}x{folds} folds, "
        f"scheme={config.scheme.value}, R={config.R}, d={config.d}"
    )

    per_run = [[0.0] * folds for _ in range(repetitions)]
    chosen = [[None] * folds for _ in range(repetitions)]
    for repetition, rep_seed in enumerate(child_seeds(config.seed, repetitions)):
        splits = stratified_folds(labels, folds, rep_seed)
        fold_seeds = child_seeds(rep_seed, folds)
        shared = None
        if config.scheme == Scheme.RF:
            shared = _fold_distances(embeddings, config, grid.d_maxes, None, rep_seed, threads)
        jobs = [
            (repetition, fold, train, test, fold_seeds[fold])
            for fold, (train, test) in enumerate(splits)
        ]
        for rep, fold, score, params in parallel_map(
            _evaluate_fold, jobs, threads, embeddings, labels, config, grid, shared
        ):
            per_run[rep][fold] = score
            chosen[rep][fold] = params
        logger.info(f"Repetition {repetition + 1}/{repetitions}: {np.mean(per_run[repetition]):.2f}%")

    mean, std = summarize(per_run)
    return CvReport(
        dataset=dataset.name,
        scheme=config.scheme,
        use_labels=config.use_labels,
        classes=dataset.classes,
        mean_accuracy=mean,
        std_accuracy=std,
        repetition_std=repetition_spread(per_run),
        per_run_accuracies=per_run,
        chosen_hyperparams=chosen,
        wall_time=time.perf_counter() - started,
        R=config.R,
        d=config.d,
        seed=config.seed,
        wl_iterations=wl_iterations,
    )


class SweepRow(BaseModel):
    R: int
    mean_accuracy: float
    std_accuracy: float
    embedding_seconds: float


def r_values_for(dataset: Dataset, start: int = 4) -> list[int]:
    """Powers of two from `start` up to the first one above the largest graph."""
    values, R = [], start
    while True:
        values.append(R)
        if R > dataset.max_node_count:
            return values
        R *= 2


def r_sweep(
    dataset: Dataset,
    config: SamplerConfig,
    r_values: Optional[Sequence[int]] = None,
    grid: SearchGrid = SearchGrid(),
    folds: int = CV_FOLDS,
    threads: int = 1,
) -> tuple[Hyperparams, list[SweepRow]]:
    """Accuracy and embedding time as the number of random graphs grows.

    Hyperparameters are selected once on the whole dataset at config.R and
    then held fixed for every R.
    """
    labels = np.asarray(dataset.graph_labels)
    embeddings = embed_graphs(dataset, config.d, threads)
    every = np.arange(dataset.size)
    distances = _fold_distances(embeddings, config, grid.d_maxes, every, config.seed, threads)
    chosen = select_hyperparams(distances, labels, grid, config.seed)
    logger.info(f"R sweep on {dataset.name} with {chosen}")

    rows = []
    for R in r_values or r_values_for(dataset):
        sampler = config.model_copy(update={"R": R, "d_max": chosen.d_max, "gamma": chosen.gamma})
        splits = stratified_folds(labels, folds, config.seed)
        scores, seconds = [], 0.0
        shared = None
        if sampler.scheme == Scheme.RF:
            tick = time.perf_counter()
            shared = _fold_distances(embeddings, sampler, [chosen.d_max], None, config.seed, threads)
            seconds += time.perf_counter() - tick
        for fold, (train, test) in enumerate(splits):
            distances = shared
            if distances is None:
                tick = time.perf_counter()
                distances = _fold_distances(
                    embeddings, sampler, [chosen.d_max], train, config.seed + fold, threads
                )
                seconds += time.perf_counter() - tick
            Z = features_from_distances(distances[chosen.d_max], chosen.gamma)
            model = svm_train(Z[train], labels[train], chosen.C)
            scores.append(accuracy(model, Z[test], labels[test]))
        rows.append(SweepRow(
            R=R,
            mean_accuracy=float(np.mean(scores)),
            std_accuracy=float(np.std(scores)),
            embedding_seconds=seconds,
        ))
        logger.info(f"R={R}: {rows[-1].mean_accuracy:.2f}% in {seconds:.2f}s")
    return chosen, rows
