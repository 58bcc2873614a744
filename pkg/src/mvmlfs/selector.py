"""Importance assembly and the sequential per-view feature selection loop.

Each view is scored in ascending view order. A column's raw importance is

    (intra - lambda * static_red) + cross - beta * dynamic_red

and the ranking key is its magnitude unless signed ordering is requested.
Views hand over a per-view quota of features (largest-remainder apportionment
of the global budget by view width); the dynamic penalty is computed once per
view in block mode or refreshed after every pick in greedy mode.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

from .attention import ViewScores, context_keys, cross_scores, intra_scores, self_attention_weights
from .dataset import FeatureId, MultiViewDataset, apportion
from .redundancy import (
    RedundancyConfig,
    SelectedSet,
    dependence,
    dynamic_redundancy,
    static_redundancy,
)

__all__ = [
    "SelectorConfig",
    "ImportanceScores",
    "SelectionResult",
    "importance",
    "per_view_quota",
    "select",
    "SELECTION_MODES",
]

SELECTION_MODES = ("block_per_view", "greedy_per_feature")


@dataclass(frozen=True)
class SelectorConfig:
    """Knobs of one selection run.

    Disabling a term is exactly equivalent to zeroing its coefficient: a
    disabled (or zero-coefficient) penalty term is never computed and enters
    the importance as zeros.
    """

    k: int = 1
    lambda_: float = 1.0
    beta: float = 1.0
    enable_cross: bool = True
    enable_static: bool = True
    enable_dynamic: bool = True
    redundancy: RedundancyConfig = field(default_factory=RedundancyConfig)
    selection_mode: str = "block_per_view"
    signed_importance: bool = False

    def __post_init__(self) -> None:
        if self.k < 1:
            raise ValueError(f"k must be at least 1, got {self.k}")
        if self.lambda_ < 0 or self.beta < 0:
            raise ValueError(f"lambda and beta must be non-negative, got {self.lambda_}, {self.beta}")
        if self.selection_mode not in SELECTION_MODES:
            raise ValueError(f"selection_mode must be one of {SELECTION_MODES}, got {self.selection_mode!r}")

    @property
    def effective_lambda(self) -> float:
        return self.lambda_ if self.enable_static else 0.0

    @property
    def effective_beta(self) -> float:
        return self.beta if self.enable_dynamic else 0.0


@dataclass(frozen=True)
class ImportanceScores:
    """Per-view score snapshots taken when each view was scored.

    In greedy mode the dynamic column reflects the state at view entry,
    before any same-view pick.
    """

    intra: tuple[np.ndarray, ...]
    cross: tuple[np.ndarray, ...]
    static_red: tuple[np.ndarray, ...]
    dynamic_red: tuple[np.ndarray, ...]
    importance: tuple[np.ndarray, ...]

    def __post_init__(self) -> None:
        parts = (self.intra, self.cross, self.static_red, self.dynamic_red, self.importance)
        if len({len(p) for p in parts}) != 1:
            raise ValueError("score snapshots must cover the same views")
        for vectors in zip(*parts):
            if len({v.shape for v in vectors}) != 1:
                raise ValueError("score vectors of one view must share their length")
            if any(not np.isfinite(v).all() for v in vectors):
                raise ValueError("score snapshots contain non-finite entries")


@dataclass(frozen=True)
class SelectionResult:
    selected: tuple[FeatureId, ...]
    scores: ImportanceScores
    config: SelectorConfig
    quotas: tuple[int, ...]


def importance(
    view_scores: ViewScores,
    static_red: np.ndarray,
    dynamic_red: np.ndarray,
    config: SelectorConfig,
) -> np.ndarray:
    """Combine score and penalty vectors into one importance vector."""
    static_red = np.asarray(static_red, dtype=np.float64)
    dynamic_red = np.asarray(dynamic_red, dtype=np.float64)
    d = view_scores.intra.shape[0]
    if static_red.shape != (d,) or dynamic_red.shape != (d,):
        raise ValueError("penalty vectors must match the view's column count")
    cross = view_scores.cross if config.enable_cross else np.zeros(d)
    raw = (view_scores.intra - config.effective_lambda * static_red) + cross - config.effective_beta * dynamic_red
    return raw if config.signed_importance else np.abs(raw)


def per_view_quota(k: int, view_dims: tuple[int, ...] | list[int]) -> list[int]:
    """Apportion the global budget over views, proportional to view width.

    Largest-remainder rounding; leftover seats go to views by descending
    fractional remainder (ties by ascending view index), skipping views that
    are already at capacity.
    """
    dims = [int(d) for d in view_dims]
    if not dims or any(d < 1 for d in dims):
        raise ValueError("view dims must be non-empty with positive entries")
    total = sum(dims)
    if not 1 <= k <= total:
        raise ValueError(f"k must lie in [1, {total}], got {k}")
    return apportion(k, dims, dims)


def _ranked_columns(scores: np.ndarray) -> np.ndarray:
    # stable sort on the negated key keeps ties in ascending column order
    return np.argsort(-scores, kind="stable")


def _dependence_to_column(view_matrix: np.ndarray, col: np.ndarray, config: RedundancyConfig) -> np.ndarray:
    out = np.empty(view_matrix.shape[1])
    for j in range(view_matrix.shape[1]):
        out[j] = dependence(view_matrix[:, j], col, config.dynamic_metric, config.mi_bins)
    return out


def select(dataset: MultiViewDataset, config: SelectorConfig) -> SelectionResult:
    """Run the full selection loop and return the chosen features with scores.

    Expects z-scored views; the value-magnitude factor inside the attention
    score assumes unit-RMS columns. Views are processed in ascending index
    order, and within a view features enter the result in descending
    importance (ties by ascending column index).
    """
    dims = dataset.view_dims
    if config.k > dataset.total_features:
        raise ValueError(f"k={config.k} exceeds the {dataset.total_features} available features")
    quotas = per_view_quota(config.k, dims)
    labels = dataset.labels
    selected = SelectedSet(dataset)
    snapshots = {name: [] for name in ("intra", "cross", "static", "dynamic", "importance")}

    for v, view in enumerate(dataset.views):
        x = view.data
        d_v = view.n_features

        if config.enable_cross and dataset.n_views >= 2:
            context, _ = context_keys(dataset, v)
            cross = cross_scores(labels, context, x, d_v)
        else:
            if config.enable_cross:
                warnings.warn(
                    "dataset has a single view; cross-view scores are zero", RuntimeWarning, stacklevel=2
                )
            cross = np.zeros(d_v)
        weights = self_attention_weights(labels, x, d_v)
        intra = intra_scores(weights, x)
        scores = ViewScores(intra, cross)

        static = static_redundancy(x, config.redundancy) if config.effective_lambda != 0.0 else np.zeros(d_v)
        candidates = [FeatureId(v, j) for j in range(d_v)]

        if config.selection_mode == "block_per_view":
            dynamic0 = (
                dynamic_redundancy(candidates, selected, dataset, config.redundancy)
                if config.effective_beta != 0.0 and len(selected)
                else np.zeros(d_v)
            )
            imp0 = importance(scores, static, dynamic0, config)
            for j in _ranked_columns(imp0)[: quotas[v]]:
                selected.add(candidates[j])
        else:
            dynamic0, imp0 = _greedy_view(x, candidates, scores, static, quotas[v], config, selected)

        snapshots["intra"].append(intra)
        snapshots["cross"].append(cross)
        snapshots["static"].append(static)
        snapshots["dynamic"].append(dynamic0)
        snapshots["importance"].append(imp0)

    score_snapshots = ImportanceScores(
        tuple(snapshots["intra"]),
        tuple(snapshots["cross"]),
        tuple(snapshots["static"]),
        tuple(snapshots["dynamic"]),
        tuple(snapshots["importance"]),
    )
    return SelectionResult(selected.ids, score_snapshots, config, tuple(quotas))


def _greedy_view(
    x: np.ndarray,
    candidates: list[FeatureId],
    scores: ViewScores,
    static: np.ndarray,
    quota: int,
    config: SelectorConfig,
    selected: SelectedSet,
) -> tuple[np.ndarray, np.ndarray]:
    """Pick ``quota`` features one at a time, refreshing only the dynamic term.

    Dependence sums accumulate in selection order, so every refreshed mean is
    exactly what a fresh ``dynamic_redundancy`` call would return at that
    state. Returns the view-entry (dynamic, importance) snapshot.
    """
    d_v = len(candidates)
    beta = config.effective_beta
    base = (scores.intra - config.effective_lambda * static) + (
        scores.cross if config.enable_cross else np.zeros(d_v)
    )
    dep_sum = np.zeros(d_v)
    if beta != 0.0:
        for fid in selected:
            dep_sum = dep_sum + _dependence_to_column(x, selected.dataset.column(fid), config.redundancy)
    dynamic0 = dep_sum / len(selected) if (beta != 0.0 and len(selected)) else np.zeros(d_v)
    imp0 = importance(scores, static, dynamic0, config)

    remaining = np.ones(d_v, dtype=bool)
    for _ in range(quota):
        n_sel = len(selected)
        dynamic = dep_sum / n_sel if (beta != 0.0 and n_sel) else np.zeros(d_v)
        raw = base - beta * dynamic
        imp = raw if config.signed_importance else np.abs(raw)
        imp = np.where(remaining, imp, -np.inf)
        pick = int(np.argmax(imp))  # first maximum, so ties fall to the lowest column
        selected.add(candidates[pick])
        remaining[pick] = False
        if beta != 0.0 and remaining.any():
            dep_sum = dep_sum + _dependence_to_column(x, x[:, pick], config.redundancy)
    return dynamic0, imp0
