"""Static and dynamic redundancy penalties.

Static redundancy scores each column of a view by its mean absolute Pearson
correlation with the view's other columns. Dynamic redundancy scores a
candidate feature by its mean dependence on the features already selected,
measured by a histogram mutual information estimator by default. Both
measures can swap their metric (correlation or mutual information) through
``RedundancyConfig``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence

import numpy as np

from .dataset import FeatureId, MultiViewDataset

__all__ = [
    "RedundancyConfig",
    "SelectedSet",
    "pearson",
    "static_redundancy",
    "discretize",
    "mutual_information",
    "dependence",
    "dynamic_redundancy",
]

_METRICS = ("correlation", "mutual_information")


@dataclass(frozen=True)
class RedundancyConfig:
    """Metric choices for the two redundancy terms."""

    static_metric: str = "correlation"
    dynamic_metric: str = "mutual_information"
    mi_bins: int = 10

    def __post_init__(self) -> None:
        if self.static_metric not in _METRICS:
            raise ValueError(f"static_metric must be one of {_METRICS}, got {self.static_metric!r}")
        if self.dynamic_metric not in _METRICS:
            raise ValueError(f"dynamic_metric must be one of {_METRICS}, got {self.dynamic_metric!r}")
        if self.mi_bins < 2:
            raise ValueError(f"mi_bins must be at least 2, got {self.mi_bins}")


class SelectedSet:
    """Ordered, duplicate-free collection of selected features.

    Keeps a reference to the owning dataset so redundancy terms can fetch
    columns by identity.
    """

    def __init__(self, dataset: MultiViewDataset, ids: Iterable[FeatureId] = ()) -> None:
        self._dataset = dataset
        self._ids: list[FeatureId] = []
        self._seen: set[FeatureId] = set()
        for fid in ids:
            self.add(fid)

    @property
    def dataset(self) -> MultiViewDataset:
        return self._dataset

    @property
    def ids(self) -> tuple[FeatureId, ...]:
        return tuple(self._ids)

    def add(self, fid: FeatureId) -> None:
        fid = FeatureId(*fid)
        self._dataset.column(fid)  # bounds check
        if fid in self._seen:
            raise ValueError(f"feature {tuple(fid)} is already selected")
        self._ids.append(fid)
        self._seen.add(fid)

    def __len__(self) -> int:
        return len(self._ids)

    def __iter__(self) -> Iterator[FeatureId]:
        return iter(self._ids)

    def __contains__(self, fid: object) -> bool:
        return fid in self._seen


def pearson(x: np.ndarray, y: np.ndarray) -> float:
    """Pearson correlation; 0 whenever either input is constant."""
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if x.ndim != 1 or y.ndim != 1 or x.shape != y.shape:
        raise ValueError(f"inputs must be 1-D of equal length, got shapes {x.shape} and {y.shape}")
    if x.size < 2:
        raise ValueError("correlation needs at least two samples")
    xc = x - x.mean()
    yc = y - y.mean()
    sx = float(xc @ xc)
    sy = float(yc @ yc)
    if sx == 0.0 or sy == 0.0:
        return 0.0
    r = float(xc @ yc) / np.sqrt(sx * sy)
    return float(min(1.0, max(-1.0, r)))


def _zscore_columns(matrix: np.ndarray) -> np.ndarray:
    centered = matrix - matrix.mean(axis=0)
    sigma = np.sqrt((centered**2).mean(axis=0))
    sigma = np.where(sigma == 0.0, 1.0, sigma)
    return centered / sigma


def static_redundancy(view_matrix: np.ndarray, config: RedundancyConfig | None = None) -> np.ndarray:
    """Mean pairwise dependence of every column against the rest of its view.

    With the correlation metric this is the mean absolute Pearson correlation,
    bounded in [0, 1]; constant columns contribute zero. A single-column view
    yields [0]. Mutual information is available as a swap metric.
    """
    view_matrix = np.asarray(view_matrix, dtype=np.float64)
    if view_matrix.ndim != 2:
        raise ValueError(f"view matrix must be 2-D, got shape {view_matrix.shape}")
    config = config or RedundancyConfig()
    n, d = view_matrix.shape
    if d == 1:
        return np.zeros(1)
    if config.static_metric == "correlation":
        z = _zscore_columns(view_matrix)
        corr = np.abs(z.T @ z) / n
        np.clip(corr, 0.0, 1.0, out=corr)
        np.fill_diagonal(corr, 0.0)
        return corr.sum(axis=1) / (d - 1)
    codes = [discretize(view_matrix[:, j], config.mi_bins) for j in range(d)]
    out = np.zeros(d)
    for i in range(d):
        total = 0.0
        for j in range(d):
            if j != i:
                total += _mi_from_codes(codes[i], codes[j], config.mi_bins)
        out[i] = total / (d - 1)
    return out


def discretize(x: np.ndarray, bins: int) -> np.ndarray:
    """Equal-width bin codes over the variable's own range.

    The last bin includes the upper edge. A constant variable occupies a
    single cell (all codes zero).
    """
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 1:
        raise ValueError(f"expected a 1-D variable, got shape {x.shape}")
    if bins < 2:
        raise ValueError(f"bins must be at least 2, got {bins}")
    lo, hi = x.min(), x.max()
    if lo == hi:
        return np.zeros(x.size, dtype=np.int64)
    edges = np.linspace(lo, hi, bins + 1)
    codes = np.searchsorted(edges, x, side="right") - 1
    return np.clip(codes, 0, bins - 1).astype(np.int64)


def _entropy_from_counts(counts: np.ndarray) -> float:
    # canonical (sorted) accumulation keeps the sum order independent of the
    # cell traversal order, which makes mutual_information exactly symmetric
    counts = np.sort(counts[counts > 0])
    p = counts / counts.sum()
    return float(-(p * np.log(p)).sum())


def _mi_from_codes(cx: np.ndarray, cy: np.ndarray, bins: int) -> float:
    joint = np.bincount(cx * bins + cy, minlength=bins * bins)
    hx = _entropy_from_counts(np.bincount(cx, minlength=bins))
    hy = _entropy_from_counts(np.bincount(cy, minlength=bins))
    hxy = _entropy_from_counts(joint)
    mi = (hx + hy) - hxy
    return mi if mi > 0.0 else 0.0  # plug-in MI is non-negative; clamp float dust


def mutual_information(x: np.ndarray, y: np.ndarray, bins: int = 10) -> float:
    """Histogram plug-in mutual information in nats.

    Each variable is binned into ``bins`` equal-width cells over its own
    range. Constant variables give exactly 0.
    """
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if x.shape != y.shape or x.ndim != 1:
        raise ValueError(f"inputs must be 1-D of equal length, got shapes {x.shape} and {y.shape}")
    if x.size < 1:
        raise ValueError("mutual information needs at least one sample")
    return _mi_from_codes(discretize(x, bins), discretize(y, bins), bins)


def dependence(x: np.ndarray, y: np.ndarray, metric: str, bins: int) -> float:
    """Non-negative pairwise dependence under the chosen metric."""
    if metric == "correlation":
        return abs(pearson(x, y))
    if metric == "mutual_information":
        return mutual_information(x, y, bins)
    raise ValueError(f"unknown metric {metric!r}")


def dynamic_redundancy(
    candidates: Sequence[FeatureId],
    selected: SelectedSet,
    dataset: MultiViewDataset,
    config: RedundancyConfig | None = None,
) -> np.ndarray:
    """Mean dependence of each candidate on the already selected features.

    An empty selected set yields zeros. Accumulation runs in selection order,
    so an incremental caller that adds one dependence term per pick
    reproduces these values exactly.
    """
    config = config or RedundancyConfig()
    out = np.zeros(len(candidates))
    if len(selected) == 0:
        return out
    picked_cols = [dataset.column(fid) for fid in selected]
    for i, fid in enumerate(candidates):
        col = dataset.column(fid)
        total = 0.0
        for other in picked_cols:
            total += dependence(col, other, config.dynamic_metric, config.mi_bins)
        out[i] = total / len(picked_cols)
    return out
