import numpy as np
import pytest
from scipy.optimize import minimize

from conftest import graph
from graph_rge.exceptions import DegenerateLabelError, DimensionError, StratificationError
from graph_rge.schemas.embedding import SamplerConfig, Scheme
from graph_rge.schemas.graph import Dataset
from graph_rge.services.learn import (
    SearchGrid,
    accuracy,
    cross_validate,
    r_sweep,
    r_values_for,
    select_hyperparams,
    stratified_folds,
    svm_decision,
    svm_predict,
    svm_train,
)

K4_EDGES = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]


@pytest.fixture
def edges_vs_cliques():
    graphs = tuple([graph(2, [(0, 1)])] * 10 + [graph(4, K4_EDGES)] * 10)
    return Dataset(name="EDGES_VS_K4", graphs=graphs, graph_labels=tuple([0] * 10 + [1] * 10))


def overlapping_clusters(seed, n=30):
    rng = np.random.default_rng(seed)
    labels = np.arange(n) % 2
    X = rng.normal(size=(n, 3)) + labels[:, None] * 1.2
    return X, labels


def primal_objective(w, b, X, y, C):
    margins = y * (X @ w + b)
    return 0.5 * (w @ w + b * b) + C * np.maximum(0.0, 1.0 - margins).sum()


def dual_optimum(X, y, C):
    """Box-constrained dual of the bias-regularized hinge-loss SVM."""
    Xa = np.hstack([X, np.ones((X.shape[0], 1))])
    Q = (y[:, None] * Xa) @ (y[:, None] * Xa).T
    result = minimize(
        lambda a: 0.5 * a @ Q @ a - a.sum(),
        np.zeros(len(y)),
        jac=lambda a: Q @ a - 1.0,
        bounds=[(0.0, C)] * len(y),
        method="L-BFGS-B",
        options={"ftol": 1e-15, "gtol": 1e-12, "maxiter": 10000},
    )
    return -result.fun


def test_separable_points_are_classified():
    X = np.array([[0.0, 0.0], [0.0, 1.0], [3.0, 3.0], [3.0, 4.0]])
    labels = [0, 0, 1, 1]
    model = svm_train(X, labels, C=10.0)
    assert model.classes == [0, 1]
    assert accuracy(model, X, labels) == 100.0
    np.testing.assert_array_equal(svm_predict(model, X), labels)


def test_binary_model_has_mirrored_rows():
    X, labels = overlapping_clusters(0)
    model = svm_train(X, labels, C=1.0)
    np.testing.assert_array_equal(model.weights[0], -model.weights[1])
    scores = svm_decision(model, X)
    np.testing.assert_allclose(scores[:, 0], -scores[:, 1])


def test_objective_matches_dual_optimum():
    X, labels = overlapping_clusters(1)
    C = 1.0
    model = svm_train(X, labels, C)
    y = np.where(labels == 1, 1.0, -1.0)
    primal = primal_objective(model.weights[1], model.bias[1], X, y, C)
    dual = dual_optimum(X, y, C)
    assert primal >= dual - 1e-6
    assert primal <= dual * (1 + 1e-3)


def test_duplicating_points_with_half_C_keeps_decisions():
    X, labels = overlapping_clusters(2, n=20)
    once = svm_train(X, labels, C=2.0)
    twice = svm_train(np.vstack([X, X]), np.concatenate([labels, labels]), C=1.0)
    np.testing.assert_allclose(svm_decision(once, X), svm_decision(twice, X), atol=5e-2)


def test_zero_column_does_not_change_predictions():
    X, labels = overlapping_clusters(3)
    padded = np.hstack([X, np.zeros((X.shape[0], 1))])
    plain = svm_train(X, labels, C=1.0)
    extended = svm_train(padded, labels, C=1.0)
    np.testing.assert_array_equal(svm_predict(plain, X), svm_predict(extended, padded))
    assert extended.weights[:, -1] == pytest.approx([0.0, 0.0])


def test_multiclass_model_has_one_row_per_class():
    rng = np.random.default_rng(4)
    labels = np.repeat([0, 1, 2], 10)
    X = rng.normal(scale=0.2, size=(30, 2)) + np.eye(3)[labels][:, :2] * 4
    model = svm_train(X, labels, C=10.0)
    assert model.weights.shape == (3, 2)
    assert accuracy(model, X, labels) >= 90.0


def test_single_class_is_rejected():
    with pytest.raises(DegenerateLabelError):
        svm_train(np.ones((4, 2)), [1, 1, 1, 1], C=1.0)


def test_feature_width_mismatch():
    X, labels = overlapping_clusters(5)
    model = svm_train(X, labels, C=1.0)
    with pytest.raises(DimensionError):
        svm_decision(model, np.ones((2, 4)))


def test_stratified_folds_partition_and_keep_proportions():
    labels = np.array([0] * 30 + [1] * 20)
    splits = stratified_folds(labels, 10, seed=7)
    assert len(splits) == 10
    seen = np.concatenate([test for _, test in splits])
    assert sorted(seen.tolist()) == list(range(50))
    for train, test in splits:
        assert np.bincount(labels[test]).tolist() == [3, 2]
        assert not set(train) & set(test)
    again = stratified_folds(labels, 10, seed=7)
    for (_, a), (_, b) in zip(splits, again):
        np.testing.assert_array_equal(a, b)


def test_stratification_needs_enough_members():
    with pytest.raises(StratificationError) as excinfo:
        stratified_folds([0, 0, 0, 0, 0, 0, 1, 1, 1], 5, seed=0)
    assert excinfo.value.exit_code == 3


def test_select_hyperparams_keeps_earliest_on_ties():
    # Identical rows give a constant prediction; balanced folds score it 50% everywhere.
    labels = np.arange(12) % 2
    grid = SearchGrid(gammas=(0.5, 2.0), d_maxes=(3, 6), Cs=(1.0, 10.0))
    E_same = np.zeros((12, 5))
    chosen = select_hyperparams({3: E_same, 6: E_same}, labels, grid, seed=0)
    assert (chosen.d_max, chosen.gamma, chosen.C) == (3, 0.5, 1.0)


def test_cross_validation_on_separable_dataset(edges_vs_cliques):
    config = SamplerConfig(scheme=Scheme.RF, d=1, R=16, seed=3)
    grid = SearchGrid(gammas=(1.0, 10.0), d_maxes=(3,), Cs=(1.0, 100.0))
    report = cross_validate(edges_vs_cliques, config, grid, repetitions=2, folds=5)
    assert report.classes == [0, 1]
    assert len(report.per_run_accuracies) == 2
    assert all(len(run) == 5 for run in report.per_run_accuracies)
    assert report.mean_accuracy == pytest.approx(100.0)
    assert report.std_accuracy == pytest.approx(0.0)
    assert report.repetition_std == pytest.approx(0.0)
    for run in report.chosen_hyperparams:
        for params in run:
            assert params.d_max == 3 and params.gamma in grid.gammas and params.C in grid.Cs


def test_cross_validation_is_reproducible(edges_vs_cliques):
    config = SamplerConfig(scheme=Scheme.ASG, d=1, R=8, seed=5)
    grid = SearchGrid(gammas=(1.0,), d_maxes=(3,), Cs=(100.0,))
    first = cross_validate(edges_vs_cliques, config, grid, repetitions=1, folds=5)
    second = cross_validate(edges_vs_cliques, config, grid, repetitions=1, folds=5, threads=2)
    assert first.per_run_accuracies == second.per_run_accuracies


def test_r_values_stop_past_largest_graph(edges_vs_cliques):
    assert r_values_for(edges_vs_cliques) == [4, 8]
    assert r_values_for(edges_vs_cliques, start=1) == [1, 2, 4, 8]


def test_r_sweep_reports_every_r(edges_vs_cliques):
    config = SamplerConfig(scheme=Scheme.RF, d=1, R=8, seed=1)
    grid = SearchGrid(gammas=(10.0,), d_maxes=(3,), Cs=(100.0,))
    chosen, rows = r_sweep(edges_vs_cliques, config, grid=grid, folds=5)
    assert (chosen.gamma, chosen.d_max, chosen.C) == (10.0, 3, 100.0)
    assert [row.R for row in rows] == [4, 8]
    assert all(0.0 <= row.mean_accuracy <= 100.0 for row in rows)
    assert all(row.embedding_seconds >= 0.0 for row in rows)
