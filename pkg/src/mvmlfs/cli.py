"""Command line front end: select, evaluate, sweep, selftest."""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .dataset import SynthSpec, load_manifest, normalize_dataset, synth_generate
from .harness import (
    DEFAULT_FRACTIONS,
    DEFAULT_GRID,
    REDUNDANCY_PRESETS,
    ExperimentSpec,
    k_for_fraction,
    run,
    selftest,
    sweep,
    sweep_summary,
    write_cells_csv,
    write_report,
)
from .redundancy import RedundancyConfig
from .selector import SelectorConfig, select

_METRIC_CHOICES = {"corr": "correlation", "mi": "mutual_information"}
_MODE_CHOICES = {"block": "block_per_view", "greedy": "greedy_per_feature"}


def _add_dataset_args(parser: argparse.ArgumentParser) -> None:
    source = parser.add_mutually_exclusive_group(required=True)
    source.add_argument("--manifest", help="path to a dataset manifest file")
    source.add_argument("--synth", action="store_true", help="generate a synthetic dataset")
    parser.add_argument("--synth-samples", type=int, default=200)
    parser.add_argument("--synth-view-dims", type=_parse_dims, default=(20, 30, 20),
                        help="comma-separated feature counts per view")
    parser.add_argument("--synth-labels", type=int, default=5)
    parser.add_argument("--synth-planted", type=int, default=5)
    parser.add_argument("--synth-duplicates", type=int, default=5)
    parser.add_argument("--synth-noise-std", type=float, default=0.05)
    parser.add_argument("--synth-seed", type=int, default=0)


def _add_selector_args(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--lambda", dest="lambda_", type=float, default=1.0,
                        help="static redundancy weight")
    parser.add_argument("--beta", type=float, default=1.0, help="dynamic redundancy weight")
    parser.add_argument("--no-cross", action="store_true", help="drop the cross-view term")
    parser.add_argument("--no-static", action="store_true", help="drop the static redundancy term")
    parser.add_argument("--no-dynamic", action="store_true", help="drop the dynamic redundancy term")
    parser.add_argument("--mode", choices=sorted(_MODE_CHOICES), default="block")
    parser.add_argument("--static-metric", choices=sorted(_METRIC_CHOICES), default=None)
    parser.add_argument("--dynamic-metric", choices=sorted(_METRIC_CHOICES), default=None)
    parser.add_argument("--mi-bins", type=int, default=10)
    parser.add_argument("--signed", action="store_true",
                        help="rank by signed importance instead of magnitude")


def _parse_dims(raw: str) -> tuple[int, ...]:
    try:
        dims = tuple(int(part) for part in raw.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"view dims must be comma-separated integers, got {raw!r}")
    return dims


def _parse_grid(raw: str) -> tuple[float, ...]:
    try:
        return tuple(float(part) for part in raw.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"grid must be comma-separated numbers, got {raw!r}")


def _synth_spec(args: argparse.Namespace) -> SynthSpec:
    return SynthSpec(
        n_samples=args.synth_samples,
        view_dims=args.synth_view_dims,
        n_labels=args.synth_labels,
        n_planted=args.synth_planted,
        n_duplicates=args.synth_duplicates,
        noise_std=args.synth_noise_std,
        seed=args.synth_seed,
    )


def _load_cli_dataset(args: argparse.Namespace):
    if args.manifest is not None:
        return load_manifest(args.manifest)
    dataset, _ = synth_generate(_synth_spec(args))
    return dataset


def _selector_config(args: argparse.Namespace, parser: argparse.ArgumentParser,
                     k: int = 1) -> SelectorConfig:
    preset = getattr(args, "redundancy_preset", "rman")
    explicit = args.static_metric is not None or args.dynamic_metric is not None
    if explicit and preset != "rman":
        parser.error("--static-metric/--dynamic-metric conflict with --redundancy-preset; pick one way")
    red = RedundancyConfig(
        static_metric=_METRIC_CHOICES[args.static_metric or "corr"],
        dynamic_metric=_METRIC_CHOICES[args.dynamic_metric or "mi"],
        mi_bins=args.mi_bins,
    )
    return SelectorConfig(
        k=k,
        lambda_=args.lambda_,
        beta=args.beta,
        enable_cross=not args.no_cross,
        enable_static=not args.no_static,
        enable_dynamic=not args.no_dynamic,
        redundancy=red,
        selection_mode=_MODE_CHOICES[args.mode],
        signed_importance=args.signed,
    )


def _cmd_select(args: argparse.Namespace, parser: argparse.ArgumentParser) -> int:
    dataset = _load_cli_dataset(args)
    if args.k is not None:
        k = args.k
    else:
        k = k_for_fraction(args.fraction, dataset.total_features)
    config = _selector_config(args, parser, k=k)
    result = select(normalize_dataset(dataset), config)
    print("rank,view_index,column_index")
    for rank, fid in enumerate(result.selected, start=1):
        print(f"{rank},{fid.view_index},{fid.column_index}")
    return 0


def _experiment_spec(args: argparse.Namespace, parser: argparse.ArgumentParser) -> ExperimentSpec:
    selector = _selector_config(args, parser)
    preset = args.redundancy_preset
    if args.static_metric is not None or args.dynamic_metric is not None:
        # explicit metric flags passed the conflict check, so the preset is
        # still at its default; translate the metrics into their preset name
        metrics = (selector.redundancy.static_metric, selector.redundancy.dynamic_metric)
        preset = {pair: name for name, pair in REDUNDANCY_PRESETS.items()}[metrics]
    return ExperimentSpec(
        manifest=args.manifest,
        synth=None if args.manifest is not None else _synth_spec(args),
        fractions=args.fractions if args.fractions is not None else DEFAULT_FRACTIONS,
        repeats=args.repeats,
        test_fraction=args.test_fraction,
        base_seed=args.base_seed,
        selector=selector,
        ablation=args.ablation,
        redundancy_preset=preset,
        paper_mode=args.paper_mode,
        mlknn_k=args.mlknn_k,
        mlknn_s=args.mlknn_smoothing,
    )


def _print_aggregates(report) -> None:
    print("fraction  n  ap        auc       coverage  ranking_loss")
    for agg in report.aggregates:
        if agg.n_valid:
            print(
                f"{agg.fraction:<8g}  {agg.n_valid:<2d} "
                f"{agg.mean['ap']:.6f}  {agg.mean['auc']:.6f}  "
                f"{agg.mean['coverage']:.6f}  {agg.mean['ranking_loss']:.6f}"
            )
        else:
            print(f"{agg.fraction:<8g}  0  (no valid cells)")


def _cmd_evaluate(args: argparse.Namespace, parser: argparse.ArgumentParser) -> int:
    spec = _experiment_spec(args, parser)
    report = run(spec)
    if args.out:
        write_report(report, args.out)
        print(f"report written to {args.out}")
    if args.csv:
        write_cells_csv(report, args.csv)
        print(f"cells written to {args.csv}")
    _print_aggregates(report)
    if not report.all_valid:
        bad = [c for c in report.cells if not c.valid]
        print(f"{len(bad)} cell(s) failed; first error: {bad[0].error}", file=sys.stderr)
        return 1
    return 0


def _cmd_sweep(args: argparse.Namespace, parser: argparse.ArgumentParser) -> int:
    spec = _experiment_spec(args, parser)
    lambdas = args.lambda_grid if args.lambda_grid is not None else DEFAULT_GRID
    betas = args.beta_grid if args.beta_grid is not None else DEFAULT_GRID
    reports = sweep(spec, lambdas, betas)
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    for report in reports:
        lam = report.resolved_flags["lambda"]
        beta = report.resolved_flags["beta"]
        write_report(report, out_dir / f"report_lambda{lam:g}_beta{beta:g}.json")
    write_cells_csv(reports, out_dir / "cells.csv")
    if args.summary:
        rows = sweep_summary(reports)
        print("lambda,beta,fraction,n_valid,ap_mean,auc_mean,coverage_mean,ranking_loss_mean")
        for row in rows:
            print(
                f"{row['lambda']},{row['beta']},{row['fraction']},{row['n_valid']},"
                f"{row['ap_mean']},{row['auc_mean']},{row['coverage_mean']},{row['ranking_loss_mean']}"
            )
    print(f"{len(reports)} reports written to {out_dir}")
    if any(not r.all_valid for r in reports):
        return 1
    return 0


def _cmd_selftest(args: argparse.Namespace, parser: argparse.ArgumentParser) -> int:
    result = selftest()
    if result.ok:
        print("all checks passed")
        return 0
    print(f"failed checks: {', '.join(result.failures)}", file=sys.stderr)
    return 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mvmlfs",
        description="multi-view multi-label feature selection and evaluation",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_select = sub.add_parser("select", help="rank and print the selected features")
    _add_dataset_args(p_select)
    _add_selector_args(p_select)
    budget = p_select.add_mutually_exclusive_group(required=True)
    budget.add_argument("--k", type=int, help="number of features to keep")
    budget.add_argument("--fraction", type=float, help="fraction of the total feature count")
    p_select.set_defaults(func=_cmd_select)

    for name, func, help_text in (
        ("evaluate", _cmd_evaluate, "run the split/select/classify protocol"),
        ("sweep", _cmd_sweep, "evaluate over a lambda/beta grid"),
    ):
        p = sub.add_parser(name, help=help_text)
        _add_dataset_args(p)
        _add_selector_args(p)
        p.add_argument("--fractions", type=_parse_grid, default=None,
                       help="comma-separated budget fractions")
        p.add_argument("--repeats", type=int, default=10)
        p.add_argument("--test-fraction", type=float, default=0.3)
        p.add_argument("--base-seed", type=int, default=0)
        p.add_argument("--ablation", choices=("full", "rman1", "rman2", "rman3"), default="full")
        p.add_argument("--redundancy-preset", choices=("rman", "alpha", "beta", "gamma"),
                       default="rman")
        p.add_argument("--paper-mode", action="store_true",
                       help="normalize the full dataset before splitting")
        p.add_argument("--mlknn-k", type=int, default=10)
        p.add_argument("--mlknn-smoothing", type=float, default=1.0)
        if name == "evaluate":
            p.add_argument("--out", default=None, help="write the JSON report here")
            p.add_argument("--csv", default=None, help="write the per-cell CSV here")
        else:
            p.add_argument("--lambda-grid", type=_parse_grid, default=None,
                           help="comma-separated lambda values")
            p.add_argument("--beta-grid", type=_parse_grid, default=None,
                           help="comma-separated beta values")
            p.add_argument("--out-dir", required=True, help="directory for reports and cells.csv")
            p.add_argument("--summary", action="store_true", help="print the aggregate grid")
        p.set_defaults(func=func)

    p_selftest = sub.add_parser("selftest", help="run the built-in verification checks")
    p_selftest.set_defaults(func=_cmd_selftest)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args, parser)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    raise SystemExit(main())
