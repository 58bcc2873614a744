"""Small dataset builders shared across test modules."""

from __future__ import annotations

import numpy as np

from mvmlfs.dataset import FeatureId, FeatureView, MultiViewDataset, normalize_dataset


def make_dataset(view_arrays, labels, normalize=False) -> MultiViewDataset:
    views = tuple(
        FeatureView(f"view{i}", np.asarray(a, dtype=float)) for i, a in enumerate(view_arrays)
    )
    ds = MultiViewDataset(views, np.asarray(labels, dtype=np.int64))
    return normalize_dataset(ds) if normalize else ds


def random_dataset(rng, n=40, dims=(5, 7), c=3, normalize=True) -> MultiViewDataset:
    views = [rng.standard_normal((n, d)) for d in dims]
    labels = (rng.random((n, c)) < 0.5).astype(np.int64)
    labels[0] = 1  # keep every label non-degenerate
    labels[1] = 0
    return make_dataset(views, labels, normalize=normalize)


def orthonormal_columns_n4() -> np.ndarray:
    """Three exactly uncorrelated zero-mean columns on four samples."""
    return np.array(
        [
            [1.0, 1.0, 1.0],
            [1.0, -1.0, -1.0],
            [-1.0, 1.0, -1.0],
            [-1.0, -1.0, 1.0],
        ]
    )


def plain_quota(k, dims):
    """Largest-remainder apportionment written independently for cross-checks."""
    total = sum(dims)
    shares = [k * d / total for d in dims]
    floors = [int(s) for s in shares]
    leftover = k - sum(floors)
    order = sorted(range(len(dims)), key=lambda v: (-(shares[v] - floors[v]), v))
    for v in order[:leftover]:
        floors[v] += 1
    return floors


def _plain_softmax_rows(logits):
    shifted = logits - logits.max(axis=1, keepdims=True)
    e = np.exp(shifted)
    return e / e.sum(axis=1, keepdims=True)


def straight_line_select(dataset, config):
    """Independent selection walk that omits disabled terms outright.

    Mirrors the selector contract with plain loops: ascending views, stable
    descending-importance ranking inside each view, largest-remainder quotas,
    and either one dynamic evaluation per view or a refresh after every pick.
    Returns (selected ids, per-view importance vectors at view entry).
    """
    from mvmlfs.oracles import mutual_information_reference, pearson_reference

    def dep(a, b):
        if config.redundancy.dynamic_metric == "correlation":
            return abs(pearson_reference(a, b))
        return mutual_information_reference(a, b, config.redundancy.mi_bins)

    labels = dataset.labels.astype(float)
    n = labels.shape[0]
    quotas = plain_quota(config.k, list(dataset.view_dims))
    picked = []
    entry_importances = []

    for v, view in enumerate(dataset.views):
        x = view.data
        d_v = x.shape[1]
        w = _plain_softmax_rows((labels.T @ x) / np.sqrt(d_v))
        energy = np.sqrt((x**2).mean(axis=0))
        score = energy * w.sum(axis=0)

        if config.enable_cross and dataset.n_views >= 2:
            context = np.hstack([o.data for u, o in enumerate(dataset.views) if u != v])
            a = _plain_softmax_rows((labels.T @ context) / np.sqrt(d_v)).sum(axis=0)
            score = score + a @ ((context.T @ x) / n)

        if config.enable_static and config.lambda_ != 0.0:
            static = np.zeros(d_v)
            if d_v > 1:
                for i in range(d_v):
                    if config.redundancy.static_metric == "correlation":
                        vals = [abs(pearson_reference(x[:, i], x[:, j])) for j in range(d_v) if j != i]
                    else:
                        vals = [
                            mutual_information_reference(x[:, i], x[:, j], config.redundancy.mi_bins)
                            for j in range(d_v)
                            if j != i
                        ]
                    static[i] = sum(vals) / (d_v - 1)
            score = score - config.lambda_ * static

        dyn_on = config.enable_dynamic and config.beta != 0.0

        def dynamic_vector():
            if not (dyn_on and picked):
                return np.zeros(d_v)
            out = np.zeros(d_v)
            for j in range(d_v):
                out[j] = sum(dep(x[:, j], dataset.column(f)) for f in picked) / len(picked)
            return out

        entry = score - config.beta * dynamic_vector() if dyn_on else score.copy()
        entry_imp = entry if config.signed_importance else np.abs(entry)
        entry_importances.append(entry_imp)

        if config.selection_mode == "block_per_view":
            for j in np.argsort(-entry_imp, kind="stable")[: quotas[v]]:
                picked.append(FeatureId(v, int(j)))
        else:
            taken = set()
            for _ in range(quotas[v]):
                raw = score - config.beta * dynamic_vector() if dyn_on else score
                imp = raw if config.signed_importance else np.abs(raw)
                best = min(
                    (j for j in range(d_v) if j not in taken),
                    key=lambda j: (-imp[j], j),
                )
                taken.add(best)
                picked.append(FeatureId(v, best))
    return picked, entry_importances
