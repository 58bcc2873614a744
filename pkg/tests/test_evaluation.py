"""Multi-label kNN classifier and ranking metrics."""

from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from mvmlfs.evaluation import (
    MetricReport,
    PredictionScores,
    average_precision,
    count_degenerate_labels,
    coverage_error,
    evaluate_predictions,
    macro_auc,
    mlknn_fit,
    mlknn_predict,
    ranking_loss,
)
from mvmlfs.oracles import (
    average_precision_reference,
    coverage_error_reference,
    macro_auc_reference,
    ranking_loss_reference,
)


def _metric_instance(rng, n=12, c=4):
    scores = rng.random((n, c))
    y = (rng.random((n, c)) < 0.5).astype(np.int64)
    y[0] = 1
    y[1] = 0
    y[2, 0] = 1
    y[2, 1:] = 0
    return scores, y


# ----------------------------------------------------------------------- MLKNN


def test_mlknn_prior_all_positive_label():
    rng = np.random.default_rng(0)
    x = rng.standard_normal((10, 2))
    y = np.ones((10, 1), dtype=np.int64)
    model = mlknn_fit(x, y, k=3, s=1.0)
    assert model.priors[0] == pytest.approx(11.0 / 12.0, abs=1e-15)


def test_mlknn_prior_half():
    x = np.array([[0.0], [1.0]])
    y = np.array([[1], [0]])
    model = mlknn_fit(x, y, k=1, s=1.0)
    assert model.priors[0] == pytest.approx(0.5, abs=1e-15)


def test_mlknn_loo_tables_hand_computed():
    # Three points, two coincident: the query never counts itself, and the
    # distance tie at the far point resolves toward the lower training index.
    x = np.array([[0.0], [0.0], [10.0]])
    y = np.array([[1], [0], [0]])
    model = mlknn_fit(x, y, k=1, s=1.0)
    assert model.priors[0] == pytest.approx(0.4, abs=1e-15)
    assert np.allclose(model.like_pos[0], [2.0 / 3.0, 1.0 / 3.0], atol=1e-15)
    assert np.allclose(model.like_neg[0], [0.25, 0.75], atol=1e-15)


def test_mlknn_fit_errors():
    x = np.zeros((5, 2))
    y = np.zeros((5, 1), dtype=np.int64)
    with pytest.raises(ValueError, match="more than k"):
        mlknn_fit(x, y, k=5)
    with pytest.raises(ValueError, match="k must be positive"):
        mlknn_fit(x, y, k=0)
    with pytest.raises(ValueError, match="smoothing"):
        mlknn_fit(x, y, k=2, s=0.0)
    with pytest.raises(ValueError, match="incompatible"):
        mlknn_fit(x, np.zeros((4, 1), dtype=np.int64), k=2)


def test_mlknn_likelihood_rows_sum_to_one():
    rng = np.random.default_rng(1)
    x = rng.standard_normal((30, 3))
    y = (rng.random((30, 4)) < 0.4).astype(np.int64)
    model = mlknn_fit(x, y, k=5)
    assert np.allclose(model.like_pos.sum(axis=1), 1.0, atol=1e-12)
    assert np.allclose(model.like_neg.sum(axis=1), 1.0, atol=1e-12)


def test_mlknn_predict_degenerate_label_scores_high():
    rng = np.random.default_rng(2)
    x = rng.standard_normal((10, 2))
    y = np.ones((10, 1), dtype=np.int64)
    model = mlknn_fit(x, y, k=3)
    scores = mlknn_predict(model, rng.standard_normal((4, 2))).scores
    assert (scores > 0.9).all()


def test_mlknn_predict_cluster_sides_of_half():
    rng = np.random.default_rng(3)
    left = rng.standard_normal((10, 2)) * 0.1 - 5.0
    right = rng.standard_normal((10, 2)) * 0.1 + 5.0
    x = np.vstack([left, right])
    y = np.array([[1]] * 10 + [[0]] * 10, dtype=np.int64)
    model = mlknn_fit(x, y, k=3)
    probe = np.array([[-5.0, -5.0], [5.0, 5.0]])
    scores = mlknn_predict(model, probe).scores
    assert scores[0, 0] > 0.5
    assert scores[1, 0] < 0.5


def test_mlknn_predict_dim_mismatch():
    rng = np.random.default_rng(4)
    model = mlknn_fit(rng.standard_normal((8, 3)), (rng.random((8, 2)) < 0.5).astype(np.int64), k=2)
    with pytest.raises(ValueError, match="columns"):
        mlknn_predict(model, rng.standard_normal((2, 4)))


def test_mlknn_deterministic():
    rng = np.random.default_rng(5)
    x = rng.standard_normal((25, 4))
    y = (rng.random((25, 3)) < 0.5).astype(np.int64)
    y[0] = 1
    y[1] = 0
    test = rng.standard_normal((7, 4))
    a = mlknn_predict(mlknn_fit(x, y, k=4), test).scores
    b = mlknn_predict(mlknn_fit(x, y, k=4), test).scores
    assert np.array_equal(a, b)


@given(st.integers(0, 10_000))
def test_mlknn_scores_bounded(seed):
    rng = np.random.default_rng(seed)
    x = rng.standard_normal((15, 2))
    y = (rng.random((15, 3)) < 0.5).astype(np.int64)
    scores = mlknn_predict(mlknn_fit(x, y, k=3), rng.standard_normal((5, 2))).scores
    assert np.isfinite(scores).all()
    assert ((scores >= 0.0) & (scores <= 1.0)).all()


def test_prediction_scores_validation():
    PredictionScores(np.array([[0.2, 0.8]]))
    with pytest.raises(ValueError, match="2-D"):
        PredictionScores(np.array([0.5]))
    with pytest.raises(ValueError, match=r"\[0, 1\]"):
        PredictionScores(np.array([[1.5]]))
    assert np.array_equal(PredictionScores(np.array([[0.4, 0.6]])).hard_labels(), [[0, 1]])


# --------------------------------------------------------------------- metrics


def test_ap_perfect_ranking():
    scores = np.array([[0.9], [0.8], [0.2], [0.1]])
    y = np.array([[1], [1], [0], [0]])
    assert average_precision(scores, y) == 1.0


def test_ap_frozen_five_sixths():
    # positives at ranks 1 and 3: (1/1 + 2/3) / 2
    scores = np.array([[0.9], [0.5], [0.3]])
    y = np.array([[1], [0], [1]])
    assert average_precision(scores, y) == pytest.approx(5.0 / 6.0, abs=1e-15)


def test_auc_perfect_and_uninformative():
    y = np.array([[1], [1], [0], [0]])
    assert macro_auc(np.array([[0.9], [0.8], [0.2], [0.1]]), y) == 1.0
    assert macro_auc(np.full((4, 1), 0.5), y) == 0.5


def test_auc_frozen_three_quarters():
    scores = np.array([[0.9], [0.4], [0.6], [0.1]])
    y = np.array([[1], [1], [0], [0]])
    assert macro_auc(scores, y) == pytest.approx(0.75, abs=1e-15)


def test_coverage_true_label_first():
    scores = np.array([[0.9, 0.5, 0.1]])
    y = np.array([[1, 0, 0]])
    assert coverage_error(scores, y) == 1.0


def test_coverage_frozen_depth_three():
    scores = np.array([[0.9, 0.2, 0.8, 0.1, 0.7]])
    y = np.array([[0, 0, 1, 0, 1]])
    assert coverage_error(scores, y) == 3.0


def test_ranking_loss_extremes():
    y = np.array([[1, 1, 0, 0]])
    assert ranking_loss(np.array([[0.9, 0.8, 0.2, 0.1]]), y) == 0.0
    assert ranking_loss(np.array([[0.1, 0.2, 0.8, 0.9]]), y) == 1.0


def test_ranking_loss_frozen_with_tie():
    scores = np.array([[0.5, 0.7, 0.5]])
    y = np.array([[1, 0, 0]])
    assert ranking_loss(scores, y) == pytest.approx(0.75, abs=1e-15)


def test_metrics_skip_degenerate_labels():
    rng = np.random.default_rng(6)
    scores, y = _metric_instance(rng)
    extra_scores = np.column_stack([scores, rng.random(scores.shape[0])])
    extra_y = np.column_stack([y, np.zeros(y.shape[0], dtype=np.int64)])
    assert average_precision(extra_scores, extra_y) == pytest.approx(average_precision(scores, y), abs=1e-15)
    assert macro_auc(extra_scores, extra_y) == pytest.approx(macro_auc(scores, y), abs=1e-15)
    assert count_degenerate_labels(extra_y) == 1
    report = evaluate_predictions(extra_scores, extra_y)
    assert report.skipped_labels == 1


def test_metrics_all_degenerate_raises():
    scores = np.array([[0.4, 0.6], [0.5, 0.5]])
    y = np.array([[1, 0], [1, 0]])
    with pytest.raises(ValueError, match="degenerate"):
        average_precision(scores, y)
    with pytest.raises(ValueError, match="degenerate"):
        macro_auc(scores, y)


def test_coverage_and_rl_input_errors():
    with pytest.raises(ValueError, match="positive label"):
        coverage_error(np.array([[0.1, 0.9]]), np.array([[0, 0]]))
    with pytest.raises(ValueError, match="relevant and irrelevant"):
        ranking_loss(np.array([[0.1, 0.9]]), np.array([[1, 1]]))
    with pytest.raises(ValueError, match="equal 2-D shapes"):
        average_precision(np.zeros((3, 2)), np.zeros((2, 3), dtype=np.int64))


def test_metric_report_validation():
    MetricReport(0.5, 0.5, 2.0, 0.1, 0)
    with pytest.raises(ValueError, match="ap"):
        MetricReport(1.5, 0.5, 2.0, 0.1, 0)
    with pytest.raises(ValueError, match="coverage"):
        MetricReport(0.5, 0.5, 0.5, 0.1, 0)


@given(st.integers(0, 10_000))
def test_metrics_monotone_transform_invariance(seed):
    rng = np.random.default_rng(seed)
    scores, y = _metric_instance(rng)
    warped = 2.0 * scores**3 + 1.0  # strictly increasing, so all rankings survive
    assert average_precision(warped, y) == pytest.approx(average_precision(scores, y), abs=1e-12)
    assert macro_auc(warped, y) == pytest.approx(macro_auc(scores, y), abs=1e-12)
    assert coverage_error(warped, y) == pytest.approx(coverage_error(scores, y), abs=1e-12)
    assert ranking_loss(warped, y) == pytest.approx(ranking_loss(scores, y), abs=1e-12)


@given(st.integers(0, 10_000))
def test_metrics_label_permutation_invariance(seed):
    rng = np.random.default_rng(seed)
    scores, y = _metric_instance(rng)
    perm = rng.permutation(y.shape[1])
    assert average_precision(scores[:, perm], y[:, perm]) == pytest.approx(
        average_precision(scores, y), abs=1e-12
    )
    assert macro_auc(scores[:, perm], y[:, perm]) == pytest.approx(macro_auc(scores, y), abs=1e-12)
    assert coverage_error(scores[:, perm], y[:, perm]) == pytest.approx(
        coverage_error(scores, y), abs=1e-12
    )
    assert ranking_loss(scores[:, perm], y[:, perm]) == pytest.approx(
        ranking_loss(scores, y), abs=1e-12
    )


@given(st.integers(0, 10_000))
def test_metrics_bounds(seed):
    rng = np.random.default_rng(seed)
    scores, y = _metric_instance(rng)
    assert 0.0 <= average_precision(scores, y) <= 1.0
    assert 0.0 <= macro_auc(scores, y) <= 1.0
    assert 1.0 <= coverage_error(scores, y) <= y.shape[1]
    assert 0.0 <= ranking_loss(scores, y) <= 1.0


@given(st.integers(0, 10_000))
def test_metrics_match_references_with_ties(seed):
    rng = np.random.default_rng(seed)
    scores, y = _metric_instance(rng)
    scores = np.round(scores, 1)  # coarse grid injects plenty of score ties
    assert average_precision(scores, y) == pytest.approx(average_precision_reference(scores, y), abs=1e-12)
    assert macro_auc(scores, y) == pytest.approx(macro_auc_reference(scores, y), abs=1e-12)
    assert coverage_error(scores, y) == pytest.approx(coverage_error_reference(scores, y), abs=1e-12)
    assert ranking_loss(scores, y) == pytest.approx(ranking_loss_reference(scores, y), abs=1e-12)
