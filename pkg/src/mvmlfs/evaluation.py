"""Multi-label k-nearest-neighbor classification and ranking metrics.

The classifier follows the standard smoothed counting construction: label
priors from training frequencies, and per-label likelihood tables over the
number of positive neighbors, estimated leave-one-out on the training set.
Posterior scores are the usual two-hypothesis ratio, so they live in (0, 1).

All metrics are rank-based. Degenerate labels (single-class columns) are
excluded from the label-based metrics and counted; samples without relevant
labels are skipped by the sample-based metrics.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.spatial.distance import cdist
from scipy.stats import rankdata

__all__ = [
    "MlknnModel",
    "PredictionScores",
    "MetricReport",
    "mlknn_fit",
    "mlknn_predict",
    "average_precision",
    "macro_auc",
    "coverage_error",
    "ranking_loss",
    "evaluate_predictions",
    "count_degenerate_labels",
]


@dataclass(frozen=True)
class MlknnModel:
    """Fitted state: priors, likelihood tables, and the training data itself."""

    k: int
    s: float
    priors: np.ndarray      # (c,) P(label positive)
    like_pos: np.ndarray    # (c, k+1) P(j positive neighbors | label positive)
    like_neg: np.ndarray    # (c, k+1) P(j positive neighbors | label negative)
    train_x: np.ndarray
    train_y: np.ndarray

    def __post_init__(self) -> None:
        if ((self.priors <= 0) | (self.priors >= 1)).any():
            raise ValueError("smoothed priors must lie strictly inside (0, 1)")
        for table in (self.like_pos, self.like_neg):
            if np.abs(table.sum(axis=1) - 1.0).max() > 1e-9:
                raise ValueError("likelihood tables must sum to 1 over neighbor counts")


@dataclass(frozen=True)
class PredictionScores:
    """Per-sample per-label posterior scores in [0, 1]."""

    scores: np.ndarray

    def __post_init__(self) -> None:
        scores = np.asarray(self.scores, dtype=np.float64)
        if scores.ndim != 2:
            raise ValueError(f"scores must be 2-D, got shape {scores.shape}")
        if ((scores < 0) | (scores > 1)).any() or not np.isfinite(scores).all():
            raise ValueError("scores must lie in [0, 1]")
        object.__setattr__(self, "scores", scores)

    def hard_labels(self, threshold: float = 0.5) -> np.ndarray:
        return (self.scores > threshold).astype(np.int64)


@dataclass(frozen=True)
class MetricReport:
    """One evaluation cell: four ranking metrics plus the degenerate-label count."""

    ap: float
    auc: float
    coverage: float
    ranking_loss: float
    skipped_labels: int

    def __post_init__(self) -> None:
        for name in ("ap", "auc", "ranking_loss"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise ValueError(f"{name} must lie in [0, 1], got {v}")
        if self.coverage < 1.0:
            raise ValueError(f"coverage is 1-indexed and cannot drop below 1, got {self.coverage}")


def _neighbor_order(d2: np.ndarray, k: int) -> np.ndarray:
    # stable argsort resolves distance ties by ascending training index
    return np.argsort(d2, axis=1, kind="stable")[:, :k]


def mlknn_fit(train_x: np.ndarray, train_y: np.ndarray, k: int = 10, s: float = 1.0) -> MlknnModel:
    """Fit priors and leave-one-out likelihood tables.

    Neighbors are the k nearest training points by Euclidean distance, the
    query point itself excluded; exact distance ties break toward the lower
    training index. Smoothing ``s`` keeps every estimate strictly positive.
    """
    x = np.asarray(train_x, dtype=np.float64)
    y = np.asarray(train_y)
    if x.ndim != 2 or y.ndim != 2 or x.shape[0] != y.shape[0]:
        raise ValueError(f"incompatible training shapes {x.shape} and {y.shape}")
    n, c = y.shape
    if k < 1:
        raise ValueError(f"k must be positive, got {k}")
    if n <= k:
        raise ValueError(f"need more than k={k} training samples, got {n}")
    if s <= 0:
        raise ValueError(f"smoothing must be positive, got {s}")
    y = y.astype(np.int64)

    d2 = cdist(x, x, "sqeuclidean")
    np.fill_diagonal(d2, np.inf)
    neighbors = _neighbor_order(d2, k)
    counts = y[neighbors].sum(axis=1)  # (n, c) positive neighbors per label

    priors = (s + y.sum(axis=0)) / (2.0 * s + n)
    like_pos = np.zeros((c, k + 1))
    like_neg = np.zeros((c, k + 1))
    for l in range(c):
        pos = y[:, l] == 1
        hist_pos = np.bincount(counts[pos, l], minlength=k + 1)
        hist_neg = np.bincount(counts[~pos, l], minlength=k + 1)
        like_pos[l] = (s + hist_pos) / (s * (k + 1) + hist_pos.sum())
        like_neg[l] = (s + hist_neg) / (s * (k + 1) + hist_neg.sum())
    return MlknnModel(k, float(s), priors, like_pos, like_neg, x, y)


def mlknn_predict(model: MlknnModel, test_x: np.ndarray) -> PredictionScores:
    """Posterior score per test sample and label."""
    x = np.asarray(test_x, dtype=np.float64)
    if x.ndim != 2 or x.shape[1] != model.train_x.shape[1]:
        raise ValueError(
            f"test data has {x.shape[1] if x.ndim == 2 else '?'} columns, "
            f"model expects {model.train_x.shape[1]}"
        )
    d2 = cdist(x, model.train_x, "sqeuclidean")
    neighbors = _neighbor_order(d2, model.k)
    counts = model.train_y[neighbors].sum(axis=1)

    c = model.train_y.shape[1]
    scores = np.empty((x.shape[0], c))
    for l in range(c):
        p1 = model.priors[l] * model.like_pos[l, counts[:, l]]
        p0 = (1.0 - model.priors[l]) * model.like_neg[l, counts[:, l]]
        scores[:, l] = p1 / (p1 + p0)
    return PredictionScores(scores)


# ---------------------------------------------------------------------------
# metrics


def count_degenerate_labels(y_true: np.ndarray) -> int:
    """Labels that are all-positive or all-negative in this fold."""
    y = np.asarray(y_true)
    pos = y.sum(axis=0)
    return int(((pos == 0) | (pos == y.shape[0])).sum())


def _valid_label_indices(y: np.ndarray) -> np.ndarray:
    pos = y.sum(axis=0)
    valid = np.flatnonzero((pos > 0) & (pos < y.shape[0]))
    if valid.size == 0:
        raise ValueError("every label is degenerate in this fold")
    return valid


def _check_metric_inputs(scores: np.ndarray, y_true: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    scores = np.asarray(scores, dtype=np.float64)
    y = np.asarray(y_true)
    if scores.shape != y.shape or scores.ndim != 2:
        raise ValueError(f"scores {scores.shape} and labels {y.shape} must be equal 2-D shapes")
    return scores, y.astype(np.int64)


def average_precision(scores: np.ndarray, y_true: np.ndarray) -> float:
    """Label-based average precision, macro-averaged over non-degenerate labels.

    Samples are ranked per label by descending score, ties resolved toward
    the lower sample index; precision is averaged over the ranks that hold a
    positive.
    """
    scores, y = _check_metric_inputs(scores, y_true)
    n = scores.shape[0]
    ranks = np.arange(1, n + 1)
    values = []
    for l in _valid_label_indices(y):
        order = np.argsort(-scores[:, l], kind="stable")
        hits = y[order, l]
        cum = np.cumsum(hits)
        values.append((cum[hits == 1] / ranks[hits == 1]).mean())
    return float(np.mean(values))


def macro_auc(scores: np.ndarray, y_true: np.ndarray) -> float:
    """Mann-Whitney AUC per non-degenerate label, ties counting one half."""
    scores, y = _check_metric_inputs(scores, y_true)
    values = []
    for l in _valid_label_indices(y):
        r = rankdata(scores[:, l])  # average ranks make tied pairs count 0.5
        pos = y[:, l] == 1
        n_pos = int(pos.sum())
        n_neg = y.shape[0] - n_pos
        u = r[pos].sum() - n_pos * (n_pos + 1) / 2.0
        values.append(u / (n_pos * n_neg))
    return float(np.mean(values))


def coverage_error(scores: np.ndarray, y_true: np.ndarray) -> float:
    """Mean depth (1-indexed) a ranking must descend to cover all true labels.

    Label ties resolve toward the lower label index. Samples without any
    true label are skipped.
    """
    scores, y = _check_metric_inputs(scores, y_true)
    valid = y.sum(axis=1) > 0
    if not valid.any():
        raise ValueError("no sample carries a positive label")
    n, c = scores.shape
    order = np.argsort(-scores, axis=1, kind="stable")
    ranks = np.empty((n, c), dtype=np.int64)
    np.put_along_axis(ranks, order, np.broadcast_to(np.arange(1, c + 1), (n, c)), axis=1)
    depth = np.max(np.where(y == 1, ranks, 0), axis=1)
    return float(depth[valid].mean())


def ranking_loss(scores: np.ndarray, y_true: np.ndarray) -> float:
    """Fraction of (relevant, irrelevant) label pairs ranked wrongly, ties 0.5.

    Samples lacking either a relevant or an irrelevant label are skipped.
    """
    scores, y = _check_metric_inputs(scores, y_true)
    c = y.shape[1]
    row_pos = y.sum(axis=1)
    valid = np.flatnonzero((row_pos > 0) & (row_pos < c))
    if valid.size == 0:
        raise ValueError("no sample has both relevant and irrelevant labels")
    values = []
    for i in valid:
        rel = scores[i, y[i] == 1]
        irr = scores[i, y[i] == 0]
        diff = rel[:, None] - irr[None, :]
        values.append(((diff < 0).sum() + 0.5 * (diff == 0).sum()) / diff.size)
    return float(np.mean(values))


def evaluate_predictions(scores: np.ndarray, y_true: np.ndarray) -> MetricReport:
    """All four metrics plus the count of degenerate labels they excluded."""
    return MetricReport(
        ap=average_precision(scores, y_true),
        auc=macro_auc(scores, y_true),
        coverage=coverage_error(scores, y_true),
        ranking_loss=ranking_loss(scores, y_true),
        skipped_labels=count_degenerate_labels(y_true),
    )
