"""Experiment protocol: split, normalize, select, classify, score, aggregate.

One run sweeps a grid of selection-budget fractions over repeated random
train/test splits. Normalization statistics come from the training fold and
are applied to both folds; ``paper_mode`` instead normalizes the full dataset
once before splitting, mirroring protocols that report on pre-normalized
data. Repeats are independent and can run in a small worker pool
(``MVMLFS_WORKERS``); results are keyed by repeat index, so the worker count
never changes any reported number.
"""

from __future__ import annotations

import hashlib
import json
import math
import os
import time
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Callable, Sequence

import numpy as np

from . import oracles
from . import redundancy as redundancy_mod
from .attention import self_attention_weights, softmax_rows
from .dataset import (
    FeatureId,
    MultiViewDataset,
    SynthSpec,
    apply_zscore,
    load_manifest,
    normalize_dataset,
    split_indices,
    synth_generate,
    synth_layout,
    zscore_normalize,
    zscore_stats,
)
from .evaluation import MetricReport, evaluate_predictions, mlknn_fit, mlknn_predict
from .redundancy import RedundancyConfig
from .selector import SelectorConfig, select

__all__ = [
    "ABLATION_PRESETS",
    "REDUNDANCY_PRESETS",
    "DEFAULT_FRACTIONS",
    "DEFAULT_GRID",
    "WORKERS_ENV_VAR",
    "ExperimentSpec",
    "CellResult",
    "FractionAggregate",
    "EvaluationReport",
    "SelftestResult",
    "k_for_fraction",
    "resolve_selector",
    "load_dataset",
    "run",
    "sweep",
    "sweep_summary",
    "report_to_dict",
    "write_report",
    "load_report",
    "CSV_HEADER",
    "cells_csv_lines",
    "write_cells_csv",
    "selftest",
]

DEFAULT_FRACTIONS = tuple(round(0.02 * i, 2) for i in range(1, 11))
DEFAULT_GRID = (0.001, 0.01, 0.1, 1.0, 10.0, 100.0, 1000.0)
WORKERS_ENV_VAR = "MVMLFS_WORKERS"

# ablation presets force one scoring term off; "full" leaves the config alone
ABLATION_PRESETS = {
    "full": {},
    "rman1": {"enable_cross": False},
    "rman2": {"enable_static": False},
    "rman3": {"enable_dynamic": False},
}

# metric combinations for the two redundancy terms (static, dynamic)
REDUNDANCY_PRESETS = {
    "rman": ("correlation", "mutual_information"),
    "alpha": ("mutual_information", "correlation"),
    "beta": ("mutual_information", "mutual_information"),
    "gamma": ("correlation", "correlation"),
}

_METRIC_NAMES = ("ap", "auc", "coverage", "ranking_loss")


@dataclass(frozen=True)
class ExperimentSpec:
    """Everything one evaluation run depends on.

    Exactly one of ``manifest`` and ``synth`` names the dataset. The selector
    config's ``k`` is a placeholder; the per-cell budget comes from the
    fraction grid. Presets are applied on top of the selector config by
    ``resolve_selector``.
    """

    manifest: str | None = None
    synth: SynthSpec | None = None
    fractions: tuple[float, ...] = DEFAULT_FRACTIONS
    repeats: int = 10
    test_fraction: float = 0.3
    base_seed: int = 0
    selector: SelectorConfig = field(default_factory=SelectorConfig)
    ablation: str = "full"
    redundancy_preset: str = "rman"
    paper_mode: bool = False
    mlknn_k: int = 10
    mlknn_s: float = 1.0
    lambda_grid: tuple[float, ...] = DEFAULT_GRID
    beta_grid: tuple[float, ...] = DEFAULT_GRID

    def __post_init__(self) -> None:
        if (self.manifest is None) == (self.synth is None):
            raise ValueError("specify exactly one dataset source, manifest or synth")
        if not self.fractions or any(not 0 < f <= 1 for f in self.fractions):
            raise ValueError("fractions must be non-empty and lie in (0, 1]")
        if self.repeats < 1:
            raise ValueError("repeats must be positive")
        if self.ablation not in ABLATION_PRESETS:
            raise ValueError(f"ablation must be one of {tuple(ABLATION_PRESETS)}, got {self.ablation!r}")
        if self.redundancy_preset not in REDUNDANCY_PRESETS:
            raise ValueError(
                f"redundancy_preset must be one of {tuple(REDUNDANCY_PRESETS)}, got {self.redundancy_preset!r}"
            )
        object.__setattr__(self, "fractions", tuple(float(f) for f in self.fractions))
        object.__setattr__(self, "lambda_grid", tuple(float(g) for g in self.lambda_grid))
        object.__setattr__(self, "beta_grid", tuple(float(g) for g in self.beta_grid))


@dataclass(frozen=True)
class CellResult:
    """One (fraction, repeat) evaluation cell."""

    fraction: float
    repeat: int
    k: int
    seed: int
    split_hash: str
    metrics: MetricReport | None
    selected: tuple[FeatureId, ...]
    seconds_select: float
    seconds_eval: float
    error: str | None = None

    @property
    def valid(self) -> bool:
        return self.error is None


@dataclass(frozen=True)
class FractionAggregate:
    fraction: float
    n_valid: int
    mean: dict[str, float]
    std: dict[str, float]


@dataclass(frozen=True)
class EvaluationReport:
    spec: ExperimentSpec
    resolved_flags: dict
    dataset_fingerprint: str
    cells: tuple[CellResult, ...]
    aggregates: tuple[FractionAggregate, ...]

    @property
    def all_valid(self) -> bool:
        return all(c.valid for c in self.cells)


def k_for_fraction(fraction: float, d_total: int) -> int:
    """Budget for one fraction: rounded half away from zero, clamped to [1, d]."""
    if not 0 < fraction <= 1:
        raise ValueError(f"fraction must lie in (0, 1], got {fraction}")
    k = int(math.floor(fraction * d_total + 0.5))
    return min(max(k, 1), d_total)


def resolve_selector(spec: ExperimentSpec, k: int) -> SelectorConfig:
    """Selector config for one cell: presets applied, budget filled in."""
    static_metric, dynamic_metric = REDUNDANCY_PRESETS[spec.redundancy_preset]
    red = RedundancyConfig(
        static_metric=static_metric,
        dynamic_metric=dynamic_metric,
        mi_bins=spec.selector.redundancy.mi_bins,
    )
    return replace(spec.selector, k=k, redundancy=red, **ABLATION_PRESETS[spec.ablation])


def load_dataset(spec: ExperimentSpec) -> MultiViewDataset:
    if spec.manifest is not None:
        return load_manifest(spec.manifest)
    dataset, _ = synth_generate(spec.synth)
    return dataset


def _worker_count() -> int:
    raw = os.environ.get(WORKERS_ENV_VAR, "1")
    try:
        workers = int(raw)
    except ValueError as exc:
        raise ValueError(f"{WORKERS_ENV_VAR} must be an integer, got {raw!r}") from exc
    return max(workers, 1)


def _normalized_folds(train: MultiViewDataset, test: MultiViewDataset, paper_mode: bool):
    if paper_mode:
        # folds of an already normalized dataset are used as they are
        return train, test
    train_views, test_views = [], []
    for tv, sv in zip(train.views, test.views):
        mu, sigma = zscore_stats(tv)
        train_views.append(zscore_normalize(tv))
        test_views.append(apply_zscore(sv, mu, sigma))
    return (
        MultiViewDataset(tuple(train_views), train.labels),
        MultiViewDataset(tuple(test_views), test.labels),
    )


def _run_repeat(spec: ExperimentSpec, dataset: MultiViewDataset, repeat: int) -> list[CellResult]:
    seed = spec.base_seed + repeat
    train_rows, test_rows = split_indices(dataset.sample_count, spec.test_fraction, seed)
    split_hash = hashlib.sha256(train_rows.tobytes() + b"|" + test_rows.tobytes()).hexdigest()
    train = dataset.subset_rows(train_rows)
    test = dataset.subset_rows(test_rows)
    train_n, test_n = _normalized_folds(train, test, spec.paper_mode)
    d_total = dataset.total_features

    cells = []
    for fraction in spec.fractions:
        k = k_for_fraction(fraction, d_total)
        config = resolve_selector(spec, k)
        t0 = time.perf_counter()
        try:
            with warnings.catch_warnings():
                warnings.simplefilter("ignore", RuntimeWarning)
                result = select(train_n, config)
            seconds_select = time.perf_counter() - t0
            t1 = time.perf_counter()
            model = mlknn_fit(train_n.stack_columns(result.selected), train.labels, spec.mlknn_k, spec.mlknn_s)
            predictions = mlknn_predict(model, test_n.stack_columns(result.selected))
            metrics = evaluate_predictions(predictions.scores, test.labels)
            seconds_eval = time.perf_counter() - t1
            cells.append(
                CellResult(fraction, repeat, k, seed, split_hash, metrics, result.selected,
                           seconds_select, seconds_eval)
            )
        except ValueError as exc:
            cells.append(
                CellResult(fraction, repeat, k, seed, split_hash, None, (),
                           time.perf_counter() - t0, 0.0, error=str(exc))
            )
    return cells


def _aggregate(cells: Sequence[CellResult], fractions: Sequence[float]) -> tuple[FractionAggregate, ...]:
    out = []
    for fraction in fractions:
        rows = [c.metrics for c in cells if c.fraction == fraction and c.metrics is not None]
        mean: dict[str, float] = {}
        std: dict[str, float] = {}
        if rows:
            for name in _METRIC_NAMES:
                values = np.array([getattr(m, name) for m in rows])
                mean[name] = float(values.mean())
                std[name] = float(values.std())
        out.append(FractionAggregate(fraction, len(rows), mean, std))
    return tuple(out)


def run(spec: ExperimentSpec, dataset: MultiViewDataset | None = None) -> EvaluationReport:
    """Execute the full protocol and return the report.

    A pre-loaded dataset can be passed to share loading work across sweep
    cells; it must be the dataset ``spec.manifest``/``spec.synth`` points at.
    """
    ds = dataset if dataset is not None else load_dataset(spec)
    fingerprint = ds.content_hash()
    base = normalize_dataset(ds) if spec.paper_mode else ds
    workers = _worker_count()
    task = lambda r: _run_repeat(spec, base, r)
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            per_repeat = list(pool.map(task, range(spec.repeats)))
    else:
        per_repeat = [task(r) for r in range(spec.repeats)]
    cells = tuple(cell for chunk in per_repeat for cell in chunk)
    sample = resolve_selector(spec, 1)
    resolved_flags = {
        "lambda": sample.lambda_,
        "beta": sample.beta,
        "enable_cross": sample.enable_cross,
        "enable_static": sample.enable_static,
        "enable_dynamic": sample.enable_dynamic,
        "selection_mode": sample.selection_mode,
        "signed_importance": sample.signed_importance,
        "static_metric": sample.redundancy.static_metric,
        "dynamic_metric": sample.redundancy.dynamic_metric,
        "mi_bins": sample.redundancy.mi_bins,
    }
    return EvaluationReport(spec, resolved_flags, fingerprint, cells, _aggregate(cells, spec.fractions))


def sweep(
    spec: ExperimentSpec,
    lambda_grid: Sequence[float] | None = None,
    beta_grid: Sequence[float] | None = None,
) -> list[EvaluationReport]:
    """Run the full protocol per (lambda, beta) grid cell.

    Every cell reuses ``spec.base_seed``, so all cells see identical
    splits; the dataset is loaded once.
    """
    lambdas = tuple(lambda_grid) if lambda_grid is not None else spec.lambda_grid
    betas = tuple(beta_grid) if beta_grid is not None else spec.beta_grid
    if not lambdas or not betas:
        raise ValueError("sweep grids must be non-empty")
    dataset = load_dataset(spec)
    reports = []
    for lam in lambdas:
        for beta in betas:
            cell_spec = replace(spec, selector=replace(spec.selector, lambda_=lam, beta=beta))
            reports.append(run(cell_spec, dataset=dataset))
    return reports


def sweep_summary(reports: Sequence[EvaluationReport]) -> list[dict]:
    """Flat rows keyed by (lambda, beta, fraction) with metric means and stds."""
    rows = []
    for report in reports:
        lam = report.resolved_flags["lambda"]
        beta = report.resolved_flags["beta"]
        for agg in report.aggregates:
            row = {"lambda": lam, "beta": beta, "fraction": agg.fraction, "n_valid": agg.n_valid}
            for name in _METRIC_NAMES:
                row[f"{name}_mean"] = agg.mean.get(name)
                row[f"{name}_std"] = agg.std.get(name)
            rows.append(row)
    return rows


# ---------------------------------------------------------------------------
# report serialization


def _spec_to_dict(spec: ExperimentSpec) -> dict:
    sel = spec.selector
    return {
        "manifest": spec.manifest,
        "synth": None
        if spec.synth is None
        else {
            "n_samples": spec.synth.n_samples,
            "view_dims": list(spec.synth.view_dims),
            "n_labels": spec.synth.n_labels,
            "n_planted": spec.synth.n_planted,
            "n_duplicates": spec.synth.n_duplicates,
            "noise_std": spec.synth.noise_std,
            "seed": spec.synth.seed,
        },
        "fractions": list(spec.fractions),
        "repeats": spec.repeats,
        "test_fraction": spec.test_fraction,
        "base_seed": spec.base_seed,
        "ablation": spec.ablation,
        "redundancy_preset": spec.redundancy_preset,
        "paper_mode": spec.paper_mode,
        "mlknn_k": spec.mlknn_k,
        "mlknn_s": spec.mlknn_s,
        "selector": {
            "lambda": sel.lambda_,
            "beta": sel.beta,
            "enable_cross": sel.enable_cross,
            "enable_static": sel.enable_static,
            "enable_dynamic": sel.enable_dynamic,
            "selection_mode": sel.selection_mode,
            "signed_importance": sel.signed_importance,
            "mi_bins": sel.redundancy.mi_bins,
        },
    }


def report_to_dict(report: EvaluationReport) -> dict:
    cells = []
    for c in report.cells:
        m = c.metrics
        cells.append(
            {
                "fraction": c.fraction,
                "repeat": c.repeat,
                "k": c.k,
                "seed": c.seed,
                "split_hash": c.split_hash,
                "valid": c.valid,
                "error": c.error,
                "ap": None if m is None else m.ap,
                "auc": None if m is None else m.auc,
                "coverage": None if m is None else m.coverage,
                "ranking_loss": None if m is None else m.ranking_loss,
                "skipped_labels": None if m is None else m.skipped_labels,
                "selected": [list(fid) for fid in c.selected],
                "seconds_select": c.seconds_select,
                "seconds_eval": c.seconds_eval,
            }
        )
    aggregates = [
        {"fraction": a.fraction, "n_valid": a.n_valid, "mean": dict(a.mean), "std": dict(a.std)}
        for a in report.aggregates
    ]
    return {
        "schema": "mvmlfs-report-v1",
        "spec": _spec_to_dict(report.spec),
        "resolved_selector": dict(report.resolved_flags),
        "dataset_fingerprint": report.dataset_fingerprint,
        "cells": cells,
        "aggregates": aggregates,
    }


def write_report(report: EvaluationReport, path: str | Path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(report_to_dict(report), indent=2) + "\n", encoding="utf-8")
    return path


def load_report(path: str | Path) -> dict:
    """Read a report back and re-derive its aggregates from the cell rows.

    Raises if the stored aggregates disagree with the recomputation beyond
    1e-12, so a hand-edited or truncated report cannot slip through.
    """
    doc = json.loads(Path(path).read_text(encoding="utf-8"))
    by_fraction: dict[float, list[dict]] = {}
    for cell in doc["cells"]:
        if cell["valid"]:
            by_fraction.setdefault(cell["fraction"], []).append(cell)
    for agg in doc["aggregates"]:
        rows = by_fraction.get(agg["fraction"], [])
        if len(rows) != agg["n_valid"]:
            raise ValueError(f"aggregate row count mismatch at fraction {agg['fraction']}")
        for name in _METRIC_NAMES:
            if not rows:
                continue
            values = np.array([r[name] for r in rows])
            if abs(values.mean() - agg["mean"][name]) > 1e-12 or abs(values.std() - agg["std"][name]) > 1e-12:
                raise ValueError(f"aggregate {name} at fraction {agg['fraction']} does not match its cells")
    return doc


CSV_HEADER = "fraction,repeat,lambda,beta,ap,auc,coverage,ranking_loss,seconds_select,seconds_eval"


def cells_csv_lines(reports: EvaluationReport | Sequence[EvaluationReport]) -> list[str]:
    if isinstance(reports, EvaluationReport):
        reports = [reports]
    lines = [CSV_HEADER]
    for report in reports:
        lam = report.resolved_flags["lambda"]
        beta = report.resolved_flags["beta"]
        for c in report.cells:
            m = c.metrics
            metric_cols = (
                ["", "", "", ""]
                if m is None
                else [str(m.ap), str(m.auc), str(m.coverage), str(m.ranking_loss)]
            )
            lines.append(
                ",".join(
                    [str(c.fraction), str(c.repeat), str(lam), str(beta)]
                    + metric_cols
                    + [str(c.seconds_select), str(c.seconds_eval)]
                )
            )
    return lines


def write_cells_csv(reports: EvaluationReport | Sequence[EvaluationReport], path: str | Path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text("\n".join(cells_csv_lines(reports)) + "\n", encoding="utf-8")
    return path


# ---------------------------------------------------------------------------
# selftest


@dataclass(frozen=True)
class SelftestResult:
    ok: bool
    failures: tuple[str, ...]
    lines: tuple[str, ...]


def _check_metric_oracles() -> tuple[bool, str]:
    from .evaluation import average_precision, coverage_error, macro_auc, ranking_loss

    rng = np.random.default_rng(7001)
    worst = 0.0
    for trial in range(40):
        n = int(rng.integers(5, 41))
        c = int(rng.integers(2, 9))
        y = (rng.random((n, c)) < 0.4).astype(int)
        y[0] = 1
        y[1] = 0
        scores = rng.random((n, c))
        if trial % 2:
            scores = np.round(scores, 1)  # force ties
        pairs = [
            (average_precision(scores, y), oracles.average_precision_reference(scores, y)),
            (macro_auc(scores, y), oracles.macro_auc_reference(scores, y)),
            (coverage_error(scores, y), oracles.coverage_error_reference(scores, y)),
            (ranking_loss(scores, y), oracles.ranking_loss_reference(scores, y)),
        ]
        worst = max(worst, max(abs(a - b) for a, b in pairs))
    return worst <= 1e-12, f"40 instances, worst |diff| {worst:.2e} (tolerance 1e-12)"


def _check_redundancy_oracles() -> tuple[bool, str]:
    from .dataset import FeatureView
    from .redundancy import dynamic_redundancy, static_redundancy

    rng = np.random.default_rng(7002)
    worst = 0.0
    for _ in range(25):
        n = int(rng.integers(20, 101))
        d = int(rng.integers(2, 8))
        x = rng.standard_normal((n, d))
        config = RedundancyConfig(mi_bins=int(rng.integers(3, 9)))
        worst = max(
            worst,
            np.abs(static_redundancy(x, config) - oracles.static_redundancy_reference(x, config)).max(),
        )
        labels = (rng.random((n, 2)) < 0.5).astype(int)
        labels[0] = 1
        labels[1] = 0
        ds = MultiViewDataset((FeatureView("v0", x),), labels)
        ids = ds.feature_ids()
        sel = redundancy_mod.SelectedSet(ds, ids[: d // 2])
        cand = ids[d // 2 :]
        got = dynamic_redundancy(cand, sel, ds, config)
        want = oracles.dynamic_redundancy_reference(cand, sel.ids, ds, config)
        worst = max(worst, np.abs(got - want).max() if len(cand) else 0.0)
    return worst <= 1e-12, f"25 instances, worst |diff| {worst:.2e} (tolerance 1e-12)"


def _check_mi_symmetry() -> tuple[bool, str]:
    rng = np.random.default_rng(7003)
    for _ in range(200):
        n = int(rng.integers(4, 120))
        x = rng.standard_normal(n)
        y = rng.standard_normal(n) if rng.random() < 0.7 else np.round(x + 0.1 * rng.standard_normal(n), 1)
        bins = int(rng.integers(2, 14))
        # module attribute lookup keeps this check honest under monkeypatching
        if redundancy_mod.mutual_information(x, y, bins) != redundancy_mod.mutual_information(y, x, bins):
            return False, "found an asymmetric pair"
    return True, "200 random pairs exactly symmetric"


def _check_attention_invariants() -> tuple[bool, str]:
    rng = np.random.default_rng(7004)
    for _ in range(50):
        n = int(rng.integers(4, 40))
        c = int(rng.integers(1, 6))
        d = int(rng.integers(1, 12))
        y = (rng.random((n, c)) < 0.5).astype(int)
        x = rng.standard_normal((n, d))
        w = self_attention_weights(y, x, d)
        if np.abs(w.matrix.sum(axis=1) - 1.0).max() > 1e-9:
            return False, "row sums drifted beyond 1e-9"
        logits = rng.standard_normal((c, d))
        shifted = logits.copy()
        shifted[0] += float(rng.normal(scale=50))
        if np.abs(softmax_rows(logits) - softmax_rows(shifted)).max() > 1e-9:
            return False, "row shift changed the softmax"
    return True, "50 instances: rows normalized, shift-invariant"


def _check_normalization_idempotence() -> tuple[bool, str]:
    from .dataset import FeatureView

    rng = np.random.default_rng(7005)
    worst = 0.0
    for _ in range(20):
        n = int(rng.integers(3, 50))
        d = int(rng.integers(1, 10))
        view = FeatureView("v", rng.standard_normal((n, d)) * 10 + 5)
        once = zscore_normalize(view)
        twice = zscore_normalize(once)
        worst = max(worst, np.abs(once.data - twice.data).max())
    return worst <= 1e-9, f"20 views, worst re-normalization drift {worst:.2e}"


def _check_split_partition() -> tuple[bool, str]:
    for seed in range(20):
        train, test = split_indices(37, 0.3, seed)
        merged = np.sort(np.concatenate([train, test]))
        if not np.array_equal(merged, np.arange(37)):
            return False, f"seed {seed} does not partition the rows"
    return True, "20 seeds partition the rows exactly"


def _check_ablation_zero_coefficient() -> tuple[bool, str]:
    spec = SynthSpec(60, (6, 8), 3, 3, 2, 0.1, seed=7006)
    dataset, _ = synth_generate(spec)
    dataset = normalize_dataset(dataset)
    pairs = [
        ({"enable_static": False}, {"lambda_": 0.0}),
        ({"enable_dynamic": False}, {"beta": 0.0}),
    ]
    for disabled, zeroed in pairs:
        a = select(dataset, SelectorConfig(k=5, **disabled))
        b = select(dataset, SelectorConfig(k=5, **zeroed))
        if a.selected != b.selected:
            return False, f"disabling {disabled} diverged from {zeroed}"
    return True, "disabled terms match zeroed coefficients"


def _check_planted_recovery() -> tuple[bool, str]:
    threshold = 0.8
    recalls = []
    for seed in range(3):
        spec = SynthSpec(300, (30, 40, 30), 5, 5, 5, 0.05, seed=7100 + seed)
        dataset, planted = synth_generate(spec)
        result = select(normalize_dataset(dataset), SelectorConfig(k=10))
        recalls.append(len(set(result.selected) & set(planted)) / len(planted))
    median = float(np.median(recalls))
    return median >= threshold, f"median recall {median:.2f} over 3 seeds (threshold {threshold:.2f})"


def _check_duplicate_suppression() -> tuple[bool, str]:
    wins = 0
    for seed in range(3):
        spec = SynthSpec(300, (30, 40, 30), 5, 5, 5, 0.05, seed=7200 + seed)
        dataset, _ = synth_generate(spec)
        layout = synth_layout(spec)
        normalized = normalize_dataset(dataset)
        counts = []
        for lam, beta in ((10.0, 10.0), (0.0, 0.0)):
            picked = set(select(normalized, SelectorConfig(k=10, lambda_=lam, beta=beta)).selected)
            counts.append(sum(1 for src, copy in layout.duplicates if src in picked and copy in picked))
        if counts[0] < counts[1]:
            wins += 1
    return wins >= 2, f"penalties reduced duplicate co-selection in {wins}/3 seeds"


_SELFTEST_CHECKS: tuple[tuple[str, Callable[[], tuple[bool, str]]], ...] = (
    ("metric-oracles", _check_metric_oracles),
    ("redundancy-oracles", _check_redundancy_oracles),
    ("mi-symmetry", _check_mi_symmetry),
    ("attention-invariants", _check_attention_invariants),
    ("normalization-idempotence", _check_normalization_idempotence),
    ("split-partition", _check_split_partition),
    ("ablation-zero-coefficient", _check_ablation_zero_coefficient),
    ("planted-recovery", _check_planted_recovery),
    ("duplicate-suppression", _check_duplicate_suppression),
)


def selftest(print_fn: Callable[[str], None] = print) -> SelftestResult:
    """Run the built-in verification checks, one pass/fail line per check."""
    failures = []
    lines = []
    for name, check in _SELFTEST_CHECKS:
        try:
            ok, detail = check()
        except Exception as exc:  # a crashed check is a failed check
            ok, detail = False, f"raised {exc!r}"
        line = f"[{'PASS' if ok else 'FAIL'}] {name}: {detail}"
        lines.append(line)
        print_fn(line)
        if not ok:
            failures.append(name)
    return SelftestResult(not failures, tuple(failures), tuple(lines))
