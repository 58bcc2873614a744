"""Brute-force reference implementations for verification.

Everything here trades speed for obviousness: plain Python loops, explicit
pair enumeration, rank walks. The fast implementations elsewhere in the
package are checked against these in the test suite and in ``selftest``;
nothing in here is used on the scoring path itself.
"""

from __future__ import annotations

import math
from typing import Sequence

import numpy as np

from .dataset import FeatureId, MultiViewDataset
from .redundancy import RedundancyConfig, discretize

__all__ = [
    "pearson_reference",
    "mutual_information_reference",
    "static_redundancy_reference",
    "dynamic_redundancy_reference",
    "average_precision_reference",
    "macro_auc_reference",
    "coverage_error_reference",
    "ranking_loss_reference",
    "top_correlation_baseline",
]


def pearson_reference(x, y) -> float:
    x = [float(v) for v in x]
    y = [float(v) for v in y]
    n = len(x)
    mx = math.fsum(x) / n
    my = math.fsum(y) / n
    sxy = math.fsum((a - mx) * (b - my) for a, b in zip(x, y))
    sxx = math.fsum((a - mx) ** 2 for a in x)
    syy = math.fsum((b - my) ** 2 for b in y)
    if sxx == 0.0 or syy == 0.0:
        return 0.0
    return sxy / math.sqrt(sxx * syy)


def mutual_information_reference(x, y, bins: int) -> float:
    """Plug-in MI from explicit cell probabilities.

    Shares the binning convention with the implementation (same code paths
    would otherwise disagree about edge cases by one cell) but walks the
    joint table independently.
    """
    cx = discretize(np.asarray(x, dtype=float), bins)
    cy = discretize(np.asarray(y, dtype=float), bins)
    n = len(cx)
    joint: dict[tuple[int, int], int] = {}
    mx: dict[int, int] = {}
    my: dict[int, int] = {}
    for a, b in zip(cx.tolist(), cy.tolist()):
        joint[(a, b)] = joint.get((a, b), 0) + 1
        mx[a] = mx.get(a, 0) + 1
        my[b] = my.get(b, 0) + 1
    total = 0.0
    for (a, b), count in sorted(joint.items()):
        p_ab = count / n
        total += p_ab * math.log(p_ab / ((mx[a] / n) * (my[b] / n)))
    return max(total, 0.0)


def _dependence_reference(x, y, metric: str, bins: int) -> float:
    if metric == "correlation":
        return abs(pearson_reference(x, y))
    return mutual_information_reference(x, y, bins)


def static_redundancy_reference(view_matrix: np.ndarray, config: RedundancyConfig | None = None) -> np.ndarray:
    config = config or RedundancyConfig()
    view_matrix = np.asarray(view_matrix, dtype=float)
    d = view_matrix.shape[1]
    if d == 1:
        return np.zeros(1)
    out = np.zeros(d)
    for i in range(d):
        total = 0.0
        for j in range(d):
            if j != i:
                total += _dependence_reference(
                    view_matrix[:, i], view_matrix[:, j], config.static_metric, config.mi_bins
                )
        out[i] = total / (d - 1)
    return out


def dynamic_redundancy_reference(
    candidates: Sequence[FeatureId],
    selected_ids: Sequence[FeatureId],
    dataset: MultiViewDataset,
    config: RedundancyConfig | None = None,
) -> np.ndarray:
    config = config or RedundancyConfig()
    out = np.zeros(len(candidates))
    if not selected_ids:
        return out
    for i, fid in enumerate(candidates):
        col = dataset.column(fid)
        terms = [
            _dependence_reference(col, dataset.column(other), config.dynamic_metric, config.mi_bins)
            for other in selected_ids
        ]
        out[i] = math.fsum(terms) / len(terms)
    return out


# ---------------------------------------------------------------------------
# metric references


def _label_ranking(scores_col, n: int) -> list[int]:
    return sorted(range(n), key=lambda i: (-scores_col[i], i))


def average_precision_reference(scores: np.ndarray, y_true: np.ndarray) -> float:
    scores = np.asarray(scores, dtype=float)
    y = np.asarray(y_true, dtype=int)
    n, c = y.shape
    per_label = []
    for l in range(c):
        pos = int(y[:, l].sum())
        if pos == 0 or pos == n:
            continue
        hits = 0
        precisions = []
        for rank, i in enumerate(_label_ranking(scores[:, l], n), start=1):
            if y[i, l] == 1:
                hits += 1
                precisions.append(hits / rank)
        per_label.append(sum(precisions) / len(precisions))
    if not per_label:
        raise ValueError("every label is degenerate")
    return sum(per_label) / len(per_label)


def macro_auc_reference(scores: np.ndarray, y_true: np.ndarray) -> float:
    scores = np.asarray(scores, dtype=float)
    y = np.asarray(y_true, dtype=int)
    n, c = y.shape
    per_label = []
    for l in range(c):
        pos = [i for i in range(n) if y[i, l] == 1]
        neg = [i for i in range(n) if y[i, l] == 0]
        if not pos or not neg:
            continue
        wins = 0.0
        for i in pos:
            for j in neg:
                if scores[i, l] > scores[j, l]:
                    wins += 1.0
                elif scores[i, l] == scores[j, l]:
                    wins += 0.5
        per_label.append(wins / (len(pos) * len(neg)))
    if not per_label:
        raise ValueError("every label is degenerate")
    return sum(per_label) / len(per_label)


def coverage_error_reference(scores: np.ndarray, y_true: np.ndarray) -> float:
    scores = np.asarray(scores, dtype=float)
    y = np.asarray(y_true, dtype=int)
    n, c = y.shape
    depths = []
    for i in range(n):
        true_labels = [l for l in range(c) if y[i, l] == 1]
        if not true_labels:
            continue
        order = sorted(range(c), key=lambda l: (-scores[i, l], l))
        position = {l: r for r, l in enumerate(order, start=1)}
        depths.append(max(position[l] for l in true_labels))
    if not depths:
        raise ValueError("no sample carries a positive label")
    return sum(depths) / len(depths)


def ranking_loss_reference(scores: np.ndarray, y_true: np.ndarray) -> float:
    scores = np.asarray(scores, dtype=float)
    y = np.asarray(y_true, dtype=int)
    n, c = y.shape
    values = []
    for i in range(n):
        rel = [l for l in range(c) if y[i, l] == 1]
        irr = [l for l in range(c) if y[i, l] == 0]
        if not rel or not irr:
            continue
        bad = 0.0
        for a in rel:
            for b in irr:
                if scores[i, a] < scores[i, b]:
                    bad += 1.0
                elif scores[i, a] == scores[i, b]:
                    bad += 0.5
        values.append(bad / (len(rel) * len(irr)))
    if not values:
        raise ValueError("no sample has both relevant and irrelevant labels")
    return sum(values) / len(values)


# ---------------------------------------------------------------------------
# baseline selector


def top_correlation_baseline(dataset: MultiViewDataset, k: int) -> list[FeatureId]:
    """Rank all features by max |correlation| with any label; take the top k."""
    scored = []
    for fid in dataset.feature_ids():
        col = dataset.column(fid)
        best = max(abs(pearson_reference(col, dataset.labels[:, l])) for l in range(dataset.n_labels))
        scored.append((best, fid))
    scored.sort(key=lambda item: (-item[0], item[1]))
    return [fid for _, fid in scored[:k]]
