"""Containers, loading, splitting, and synthesis of multi-view multi-label data.

A dataset couples several feature views (real matrices sharing one sample
axis) with a binary label matrix. Arrays are frozen on construction (write
flag cleared) so datasets can be shared freely between workers.
"""

from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass
from pathlib import Path
from typing import NamedTuple, Sequence

import numpy as np

__all__ = [
    "FeatureId",
    "FeatureView",
    "MultiViewDataset",
    "SynthSpec",
    "SynthLayout",
    "zscore_stats",
    "apply_zscore",
    "zscore_normalize",
    "normalize_dataset",
    "split",
    "split_indices",
    "load_manifest",
    "save_manifest",
    "apportion",
    "synth_layout",
    "synth_generate",
]


class FeatureId(NamedTuple):
    """Identity of a single feature: owning view plus column within that view."""

    view_index: int
    column_index: int


def _freeze(values, dtype) -> np.ndarray:
    arr = np.array(values, dtype=dtype)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class FeatureView:
    """One feature representation of the sample set.

    ``normalized`` asserts that every non-constant column is centered with
    unit population standard deviation; the claim is validated here so a
    wrongly flagged view fails fast instead of corrupting scores downstream.
    """

    name: str
    data: np.ndarray
    normalized: bool = False

    def __post_init__(self) -> None:
        data = _freeze(self.data, np.float64)
        if data.ndim != 2:
            raise ValueError(f"view {self.name!r}: data must be 2-D, got shape {data.shape}")
        if data.shape[0] < 1 or data.shape[1] < 1:
            raise ValueError(
                f"view {self.name!r}: needs at least one sample and one feature, got shape {data.shape}"
            )
        bad = np.argwhere(~np.isfinite(data))
        if bad.size:
            r, c = bad[0]
            raise ValueError(f"view {self.name!r}: non-finite entry at row {int(r)}, column {int(c)}")
        object.__setattr__(self, "data", data)
        if self.normalized:
            self._check_normalized()

    def _check_normalized(self) -> None:
        nonconst = ~(self.data == self.data[0]).all(axis=0)
        if not nonconst.any():
            return
        cols = self.data[:, nonconst]
        mu = np.abs(cols.mean(axis=0)).max()
        sigma = np.abs(cols.std(axis=0) - 1.0).max()
        if mu > 1e-9 or sigma > 1e-9:
            raise ValueError(f"view {self.name!r}: marked normalized but columns are not z-scored")

    @property
    def n_samples(self) -> int:
        return self.data.shape[0]

    @property
    def n_features(self) -> int:
        return self.data.shape[1]


@dataclass(frozen=True)
class MultiViewDataset:
    """Several feature views over one sample set plus binary labels."""

    views: tuple[FeatureView, ...]
    labels: np.ndarray

    def __post_init__(self) -> None:
        views = tuple(self.views)
        if not views:
            raise ValueError("dataset needs at least one view")
        labels = np.asarray(self.labels)
        if labels.ndim != 2 or labels.shape[1] < 1:
            raise ValueError(f"labels must be a 2-D matrix with at least one column, got shape {labels.shape}")
        bad = np.argwhere(~np.isin(labels, (0, 1)))
        if bad.size:
            r, c = bad[0]
            raise ValueError(f"label entry at row {int(r)}, column {int(c)} is not 0/1")
        labels = _freeze(labels, np.int64)
        n = labels.shape[0]
        for i, view in enumerate(views):
            if view.n_samples != n:
                raise ValueError(
                    f"view {i} ({view.name!r}) has {view.n_samples} rows but labels have {n}"
                )
        object.__setattr__(self, "views", views)
        object.__setattr__(self, "labels", labels)

    @property
    def sample_count(self) -> int:
        return self.labels.shape[0]

    @property
    def n_labels(self) -> int:
        return self.labels.shape[1]

    @property
    def n_views(self) -> int:
        return len(self.views)

    @property
    def view_dims(self) -> tuple[int, ...]:
        return tuple(v.n_features for v in self.views)

    @property
    def total_features(self) -> int:
        return sum(self.view_dims)

    def feature_ids(self) -> list[FeatureId]:
        """All features in ascending (view, column) order."""
        return [FeatureId(v, c) for v, dim in enumerate(self.view_dims) for c in range(dim)]

    def column(self, fid: FeatureId) -> np.ndarray:
        v, c = fid
        if not (0 <= v < self.n_views):
            raise ValueError(f"feature {tuple(fid)}: view index out of range")
        if not (0 <= c < self.views[v].n_features):
            raise ValueError(f"feature {tuple(fid)}: column index out of range")
        return self.views[v].data[:, c]

    def stack_columns(self, ids: Sequence[FeatureId]) -> np.ndarray:
        """Concatenate the given feature columns, in the given order."""
        if not ids:
            raise ValueError("need at least one feature to stack")
        return np.column_stack([self.column(fid) for fid in ids])

    def subset_rows(self, rows: np.ndarray) -> "MultiViewDataset":
        """Row subset across every view and the labels. Clears normalized flags."""
        rows = np.asarray(rows, dtype=np.int64)
        views = tuple(FeatureView(v.name, v.data[rows], normalized=False) for v in self.views)
        return MultiViewDataset(views, self.labels[rows])

    def content_hash(self) -> str:
        """Hex digest over view names, shapes, and raw values."""
        h = hashlib.sha256()
        for view in self.views:
            h.update(view.name.encode("utf-8"))
            h.update(np.asarray(view.data.shape, dtype=np.int64).tobytes())
            h.update(np.ascontiguousarray(view.data).tobytes())
        h.update(np.asarray(self.labels.shape, dtype=np.int64).tobytes())
        h.update(np.ascontiguousarray(self.labels).tobytes())
        return h.hexdigest()


# ---------------------------------------------------------------------------
# normalization


def zscore_stats(view: FeatureView) -> tuple[np.ndarray, np.ndarray]:
    """Per-column mean and population standard deviation, zero sigma mapped to 1."""
    mu = view.data.mean(axis=0)
    sigma = view.data.std(axis=0)
    sigma = np.where(sigma == 0.0, 1.0, sigma)
    return mu, sigma


def apply_zscore(view: FeatureView, mu: np.ndarray, sigma: np.ndarray) -> FeatureView:
    """Apply externally supplied statistics (e.g. from a training fold) verbatim."""
    mu = np.asarray(mu, dtype=np.float64)
    sigma = np.asarray(sigma, dtype=np.float64)
    if mu.shape != (view.n_features,) or sigma.shape != (view.n_features,):
        raise ValueError(f"view {view.name!r}: statistics shape does not match {view.n_features} columns")
    if (sigma <= 0).any():
        raise ValueError(f"view {view.name!r}: sigma entries must be positive")
    return FeatureView(view.name, (view.data - mu) / sigma, normalized=False)


def zscore_normalize(view: FeatureView) -> FeatureView:
    """Z-score each column with population statistics.

    Constant columns map to all zeros (sigma replaced by 1). Centering runs
    twice so the residual mean stays near float epsilon even for columns with
    large offsets.
    """
    centered = view.data - view.data.mean(axis=0)
    centered = centered - centered.mean(axis=0)
    sigma = np.sqrt((centered**2).mean(axis=0))
    sigma = np.where(sigma == 0.0, 1.0, sigma)
    return FeatureView(view.name, centered / sigma, normalized=True)


def normalize_dataset(dataset: MultiViewDataset) -> MultiViewDataset:
    return MultiViewDataset(tuple(zscore_normalize(v) for v in dataset.views), dataset.labels)


# ---------------------------------------------------------------------------
# splitting


def _round_half_away(x: float) -> int:
    return int(np.floor(x + 0.5))


def split_indices(n: int, test_fraction: float, seed: int) -> tuple[np.ndarray, np.ndarray]:
    """Deterministic row partition, sorted within each fold."""
    if not 0.0 < test_fraction < 1.0:
        raise ValueError(f"test_fraction must lie in (0, 1), got {test_fraction}")
    n_test = _round_half_away(test_fraction * n)
    if n_test < 1 or n_test >= n:
        raise ValueError(
            f"degenerate split: {n} samples at test fraction {test_fraction} leaves an empty fold"
        )
    perm = np.random.default_rng(seed).permutation(n)
    return np.sort(perm[n_test:]), np.sort(perm[:n_test])


def split(
    dataset: MultiViewDataset, test_fraction: float, seed: int
) -> tuple[MultiViewDataset, MultiViewDataset]:
    """Split into (train, test) with the same row partition across views and labels."""
    train_rows, test_rows = split_indices(dataset.sample_count, test_fraction, seed)
    return dataset.subset_rows(train_rows), dataset.subset_rows(test_rows)


# ---------------------------------------------------------------------------
# manifest I/O

_CSV_FMT = "%.17g"  # 17 significant digits round-trips IEEE doubles exactly


def _read_csv(path: Path, header: bool) -> np.ndarray:
    if not path.is_file():
        raise ValueError(f"manifest references missing file: {path}")
    try:
        data = np.loadtxt(path, delimiter=",", skiprows=1 if header else 0, ndmin=2, dtype=np.float64)
    except ValueError as exc:
        raise ValueError(f"could not parse {path}: {exc}") from exc
    if data.size == 0:
        raise ValueError(f"{path}: file holds no data rows")
    return data


def load_manifest(path: str | Path) -> MultiViewDataset:
    """Load a dataset described by a manifest file.

    The manifest is UTF-8 text. ``view <name> <csv-path>`` lines add feature
    views (line order defines view indices), one ``labels <csv-path>`` line
    names the label matrix, and an optional ``header true`` line marks every
    CSV as carrying a single header row. Paths resolve relative to the
    manifest's directory. Blank lines and ``#`` comments are ignored.
    """
    path = Path(path)
    if not path.is_file():
        raise ValueError(f"manifest not found: {path}")
    base = path.parent
    header = False
    view_entries: list[tuple[str, Path]] = []
    labels_path: Path | None = None
    for lineno, raw in enumerate(path.read_text(encoding="utf-8").splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        directive = line.split(maxsplit=1)[0]
        if directive == "header":
            parts = line.split()
            if len(parts) != 2 or parts[1] not in ("true", "false"):
                raise ValueError(f"{path}:{lineno}: header line must read 'header true' or 'header false'")
            header = parts[1] == "true"
        elif directive == "view":
            parts = line.split(maxsplit=2)
            if len(parts) != 3:
                raise ValueError(f"{path}:{lineno}: view line needs a name and a csv path")
            view_entries.append((parts[1], base / parts[2]))
        elif directive == "labels":
            parts = line.split(maxsplit=1)
            if len(parts) != 2:
                raise ValueError(f"{path}:{lineno}: labels line needs a csv path")
            if labels_path is not None:
                raise ValueError(f"{path}:{lineno}: duplicate labels line")
            labels_path = base / parts[1]
        else:
            raise ValueError(f"{path}:{lineno}: unknown directive {directive!r}")
    if not view_entries:
        raise ValueError(f"{path}: manifest defines no views")
    if labels_path is None:
        raise ValueError(f"{path}: manifest defines no labels")

    views = []
    n_rows: int | None = None
    for name, csv_path in view_entries:
        data = _read_csv(csv_path, header)
        if n_rows is None:
            n_rows = data.shape[0]
        elif data.shape[0] != n_rows:
            raise ValueError(f"{csv_path}: has {data.shape[0]} rows, expected {n_rows}")
        views.append(FeatureView(name, data))

    raw_labels = _read_csv(labels_path, header)
    if raw_labels.shape[0] != n_rows:
        raise ValueError(f"{labels_path}: has {raw_labels.shape[0]} rows, expected {n_rows}")
    bad = np.argwhere(~np.isin(raw_labels, (0.0, 1.0)))
    if bad.size:
        r, c = bad[0]
        raise ValueError(
            f"{labels_path}: label entry at row {int(r)}, column {int(c)} is not 0/1"
        )
    return MultiViewDataset(tuple(views), raw_labels.astype(np.int64))


def save_manifest(dataset: MultiViewDataset, path: str | Path, header: bool = False) -> Path:
    """Write the dataset as a manifest plus CSV files next to it.

    Values are serialized with 17 significant digits, so a reload reproduces
    every matrix bit-exactly.
    """
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    lines = []
    if header:
        lines.append("header true")
    for i, view in enumerate(dataset.views):
        if any(ch.isspace() for ch in view.name) or not view.name:
            raise ValueError(f"view {view.name!r}: names in a manifest must be non-empty and whitespace-free")
        csv_name = f"view{i}_{view.name}.csv"
        _write_csv(path.parent / csv_name, view.data, _CSV_FMT, header)
        lines.append(f"view {view.name} {csv_name}")
    _write_csv(path.parent / "labels.csv", dataset.labels, "%d", header)
    lines.append("labels labels.csv")
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path


def _write_csv(path: Path, data: np.ndarray, fmt: str, header: bool) -> None:
    head = ",".join(f"c{j}" for j in range(data.shape[1])) if header else ""
    np.savetxt(path, data, fmt=fmt, delimiter=",", header=head, comments="")


# ---------------------------------------------------------------------------
# synthetic data


@dataclass(frozen=True)
class SynthSpec:
    """Recipe for a planted-feature synthetic dataset."""

    n_samples: int
    view_dims: tuple[int, ...]
    n_labels: int
    n_planted: int
    n_duplicates: int
    noise_std: float
    seed: int

    def __post_init__(self) -> None:
        object.__setattr__(self, "view_dims", tuple(int(d) for d in self.view_dims))
        if self.n_samples < 2:
            raise ValueError("n_samples must be at least 2")
        if not self.view_dims or any(d < 1 for d in self.view_dims):
            raise ValueError("view_dims must be non-empty with positive entries")
        if self.n_labels < 1:
            raise ValueError("n_labels must be positive")
        if self.n_planted < 1:
            raise ValueError("n_planted must be positive")
        if self.n_duplicates < 0:
            raise ValueError("n_duplicates must be non-negative")
        if self.noise_std < 0:
            raise ValueError("noise_std must be non-negative")
        if self.n_planted + self.n_duplicates > sum(self.view_dims):
            raise ValueError(
                f"{self.n_planted} planted plus {self.n_duplicates} duplicate columns "
                f"exceed the {sum(self.view_dims)} available"
            )


@dataclass(frozen=True)
class SynthLayout:
    """Where the generator placed signal columns.

    ``duplicates`` pairs each copy with its source planted feature.
    """

    planted: tuple[FeatureId, ...]
    duplicates: tuple[tuple[FeatureId, FeatureId], ...]


def apportion(total: int, weights: Sequence[int], capacities: Sequence[int]) -> list[int]:
    """Split ``total`` integer seats proportionally to ``weights``.

    Largest-remainder rule: floor shares first, then leftover seats by
    descending remainder (ties to the lower index). Entries never exceed
    their capacity; seats that would overflow move to the next candidate.
    """
    if len(weights) != len(capacities):
        raise ValueError("weights and capacities must have equal length")
    if total > sum(capacities):
        raise ValueError(f"cannot apportion {total} seats into capacity {sum(capacities)}")
    weight_sum = float(sum(weights))
    shares = [total * w / weight_sum for w in weights]
    counts = [min(int(math.floor(s)), c) for s, c in zip(shares, capacities)]
    order = sorted(range(len(weights)), key=lambda i: (-(shares[i] - math.floor(shares[i])), i))
    remaining = total - sum(counts)
    while remaining > 0:
        for i in order:
            if remaining == 0:
                break
            if counts[i] < capacities[i]:
                counts[i] += 1
                remaining -= 1
    return counts


def synth_layout(spec: SynthSpec) -> SynthLayout:
    """Deterministic column placement for ``synth_generate``.

    Planted features are spread across views in proportion to view width
    (largest-remainder apportionment) and assigned contiguously from view 0.
    Each duplicate goes to a view other than its source's, preferring the
    next view cyclically, within its own width-proportional allocation.
    Exposing the layout lets callers recover duplicate pairs without
    re-deriving generator internals.
    """
    dims = spec.view_dims
    n_views = len(dims)

    planted_counts = apportion(spec.n_planted, dims, dims)
    planted = []
    for v, count in enumerate(planted_counts):
        planted.extend(FeatureId(v, c) for c in range(count))
    planted = tuple(planted)

    dup_caps = [d - p for d, p in zip(dims, planted_counts)]
    dup_quota = apportion(spec.n_duplicates, dims, dup_caps)
    cursors = list(planted_counts)
    duplicates = []
    for d in range(spec.n_duplicates):
        src = planted[d % spec.n_planted]
        placed = None
        for step in range(1, n_views + 1):
            v = (src.view_index + step) % n_views
            if dup_quota[v] > 0 and v != src.view_index:
                placed = v
                break
        if placed is None:  # only the source's own view has room left
            placed = src.view_index
            if dup_quota[placed] == 0:
                raise ValueError("ran out of columns while placing duplicates")
        dup_quota[placed] -= 1
        duplicates.append((src, FeatureId(placed, cursors[placed])))
        cursors[placed] += 1
    return SynthLayout(planted, tuple(duplicates))


def synth_generate(spec: SynthSpec) -> tuple[MultiViewDataset, list[FeatureId]]:
    """Generate a dataset with known informative columns.

    Planted features are standard normal. Label ``l`` thresholds a random
    +/-1-weighted copy of planted feature ``l mod n_planted`` at its median,
    so positives sit near 50%; each feature's signs across its labels are a
    random shuffle of a balanced +/- pattern, so no feature ends up visible
    only through negated labels. Duplicate columns are exact copies of
    planted features plus ``noise_std`` times standard normal noise. All
    remaining columns are pure noise. Returns the dataset and the planted
    feature identities.
    """
    layout = synth_layout(spec)
    rng = np.random.default_rng(spec.seed)
    n, n_planted = spec.n_samples, spec.n_planted

    planted_data = rng.standard_normal((n, n_planted))

    label_members = [l % n_planted for l in range(spec.n_labels)]
    weights = np.zeros(spec.n_labels)
    for p in range(n_planted):
        owned = [l for l in range(spec.n_labels) if label_members[l] == p]
        if owned:
            base = np.array([1.0, -1.0] * len(owned))[: len(owned)]
            weights[owned] = rng.permutation(base)

    labels = np.zeros((n, spec.n_labels), dtype=np.int64)
    for l in range(spec.n_labels):
        latent = weights[l] * planted_data[:, label_members[l]]
        labels[:, l] = latent > np.median(latent)

    dup_noise = rng.standard_normal((n, spec.n_duplicates)) if spec.n_duplicates else None

    views_data = [np.zeros((n, d)) for d in spec.view_dims]
    filled = [np.zeros(d, dtype=bool) for d in spec.view_dims]
    for p, fid in enumerate(layout.planted):
        views_data[fid.view_index][:, fid.column_index] = planted_data[:, p]
        filled[fid.view_index][fid.column_index] = True
    for d, (src, copy) in enumerate(layout.duplicates):
        col = planted_data[:, layout.planted.index(src)] + spec.noise_std * dup_noise[:, d]
        views_data[copy.view_index][:, copy.column_index] = col
        filled[copy.view_index][copy.column_index] = True
    for v, mask in enumerate(filled):
        open_cols = np.flatnonzero(~mask)
        if open_cols.size:
            views_data[v][:, open_cols] = rng.standard_normal((n, open_cols.size))

    views = tuple(FeatureView(f"view{v}", views_data[v]) for v in range(len(spec.view_dims)))
    return MultiViewDataset(views, labels), list(layout.planted)
