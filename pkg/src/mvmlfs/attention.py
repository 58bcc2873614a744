"""Label-driven attention scoring within and across feature views.

Scoring treats the label matrix as queries and z-scored feature columns as
keys. A row softmax over scaled label-feature inner products distributes one
unit of weight per label across a view's columns; summing those weights per
column and scaling by the column's value magnitude gives the view-self score.
The cross-view score chains the same label attention over the concatenated
context views through the correlation between context and current columns.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .dataset import FeatureId, MultiViewDataset

__all__ = [
    "AttentionWeights",
    "ViewScores",
    "softmax_rows",
    "self_attention_weights",
    "intra_scores",
    "context_keys",
    "cross_scores",
]


def softmax_rows(logits: np.ndarray) -> np.ndarray:
    """Row-wise softmax with max subtraction. Shifting a row leaves it unchanged."""
    logits = np.asarray(logits, dtype=np.float64)
    shifted = logits - logits.max(axis=1, keepdims=True)
    e = np.exp(shifted)
    return e / e.sum(axis=1, keepdims=True)


@dataclass(frozen=True)
class AttentionWeights:
    """Label-by-feature attention matrix; every row is a distribution.

    ``d_k`` records the key dimensionality used in the logit scaling, which is
    always the column count of the view being scored (also for cross-view
    weights, where the matrix spans context columns).
    """

    matrix: np.ndarray
    d_k: int

    def __post_init__(self) -> None:
        matrix = np.asarray(self.matrix, dtype=np.float64)
        if matrix.ndim != 2:
            raise ValueError(f"attention weights must be 2-D, got shape {matrix.shape}")
        if int(self.d_k) < 1:
            raise ValueError(f"d_k must be a positive integer, got {self.d_k}")
        if not np.isfinite(matrix).all():
            raise ValueError("attention weights contain non-finite entries")
        if (matrix < 0).any() or (matrix > 1.0 + 1e-12).any():
            raise ValueError("attention weights must lie in [0, 1]")
        row_err = np.abs(matrix.sum(axis=1) - 1.0).max()
        if row_err > 1e-9:
            raise ValueError(f"attention rows must sum to 1, worst deviation {row_err:.3e}")
        object.__setattr__(self, "matrix", matrix)
        object.__setattr__(self, "d_k", int(self.d_k))


@dataclass(frozen=True)
class ViewScores:
    """Per-column view-self and cross-view scores for one view."""

    intra: np.ndarray
    cross: np.ndarray

    def __post_init__(self) -> None:
        intra = np.asarray(self.intra, dtype=np.float64)
        cross = np.asarray(self.cross, dtype=np.float64)
        if intra.shape != cross.shape or intra.ndim != 1:
            raise ValueError(
                f"intra and cross must be 1-D vectors of equal length, got {intra.shape} and {cross.shape}"
            )
        if not (np.isfinite(intra).all() and np.isfinite(cross).all()):
            raise ValueError("view scores contain non-finite entries")
        object.__setattr__(self, "intra", intra)
        object.__setattr__(self, "cross", cross)


def self_attention_weights(labels: np.ndarray, view_matrix: np.ndarray, d_k: int) -> AttentionWeights:
    """Label-over-feature attention for one view.

    Logits are (Y^T X) / sqrt(d_k) with Y the raw binary label matrix and X
    the z-scored view; each label row is then softmax-normalized over the
    view's columns.
    """
    labels = np.asarray(labels, dtype=np.float64)
    view_matrix = np.asarray(view_matrix, dtype=np.float64)
    if labels.ndim != 2 or view_matrix.ndim != 2:
        raise ValueError("labels and view matrix must both be 2-D")
    if labels.shape[0] != view_matrix.shape[0]:
        raise ValueError(
            f"row mismatch: labels have {labels.shape[0]} samples, view has {view_matrix.shape[0]}"
        )
    if d_k < 1:
        raise ValueError(f"d_k must be positive, got {d_k}")
    logits = (labels.T @ view_matrix) / np.sqrt(float(d_k))
    return AttentionWeights(softmax_rows(logits), d_k)


def intra_scores(weights: AttentionWeights, view_matrix: np.ndarray) -> np.ndarray:
    """Per-column view-self score: value magnitude times total attention.

    The value magnitude is the RMS of the column, which is 1 for z-scored
    non-constant columns and 0 for zeroed constant ones, so on normalized
    data this reduces to the column sums of the weight matrix.
    """
    view_matrix = np.asarray(view_matrix, dtype=np.float64)
    if view_matrix.ndim != 2 or view_matrix.shape[1] != weights.matrix.shape[1]:
        raise ValueError(
            f"view matrix shape {view_matrix.shape} does not match {weights.matrix.shape[1]} weight columns"
        )
    energy = np.sqrt((view_matrix**2).mean(axis=0))
    return energy * weights.matrix.sum(axis=0)


def context_keys(dataset: MultiViewDataset, view_index: int) -> tuple[np.ndarray, list[FeatureId]]:
    """Concatenate every other view's columns, in ascending view order.

    Returns the context matrix together with the provenance of each context
    column. Requires at least two views.
    """
    if not (0 <= view_index < dataset.n_views):
        raise ValueError(f"view index {view_index} out of range for {dataset.n_views} views")
    if dataset.n_views < 2:
        raise ValueError("cross-view context needs at least two views")
    blocks = []
    provenance: list[FeatureId] = []
    for v, view in enumerate(dataset.views):
        if v == view_index:
            continue
        blocks.append(view.data)
        provenance.extend(FeatureId(v, c) for c in range(view.n_features))
    return np.hstack(blocks), provenance


def cross_scores(
    labels: np.ndarray,
    context: np.ndarray,
    view_matrix: np.ndarray,
    d_k: int,
    absolute_correlation: bool = False,
) -> np.ndarray:
    """Cross-view score for each column of the current view.

    Label attention over the context columns (scaled by the current view's
    d_k, not the context width) is aggregated per context column, then pushed
    through the context-to-view correlation matrix. Correlations keep their
    sign unless ``absolute_correlation`` is set.
    """
    labels = np.asarray(labels, dtype=np.float64)
    context = np.asarray(context, dtype=np.float64)
    view_matrix = np.asarray(view_matrix, dtype=np.float64)
    if context.ndim != 2 or context.shape[1] < 1:
        raise ValueError("context must be a 2-D matrix with at least one column")
    n = view_matrix.shape[0]
    if labels.shape[0] != n or context.shape[0] != n:
        raise ValueError(
            f"row mismatch: labels {labels.shape[0]}, context {context.shape[0]}, view {n}"
        )
    weights = self_attention_weights(labels, context, d_k)
    aggregated = weights.matrix.sum(axis=0)
    corr = (context.T @ view_matrix) / n  # Pearson correlations when both sides are z-scored
    if absolute_correlation:
        corr = np.abs(corr)
    return aggregated @ corr
