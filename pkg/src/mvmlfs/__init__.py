"""Multi-view multi-label feature selection with attention scoring.

Features are scored per view by label-conditioned attention (a within-view
term plus a cross-view agreement term), discounted by static and dynamic
redundancy penalties, then picked under a per-view budget. Evaluation wraps
the selected columns in an MLKNN classifier and reports ranking metrics.
"""

from .attention import (
    AttentionWeights,
    ViewScores,
    context_keys,
    cross_scores,
    intra_scores,
    self_attention_weights,
    softmax_rows,
)
from .dataset import (
    FeatureId,
    FeatureView,
    MultiViewDataset,
    SynthLayout,
    SynthSpec,
    apply_zscore,
    load_manifest,
    normalize_dataset,
    save_manifest,
    split,
    split_indices,
    synth_generate,
    synth_layout,
    zscore_normalize,
    zscore_stats,
)
from .evaluation import (
    MetricReport,
    MlknnModel,
    PredictionScores,
    average_precision,
    coverage_error,
    evaluate_predictions,
    macro_auc,
    mlknn_fit,
    mlknn_predict,
    ranking_loss,
)
from .harness import (
    DEFAULT_FRACTIONS,
    DEFAULT_GRID,
    CellResult,
    EvaluationReport,
    ExperimentSpec,
    FractionAggregate,
    k_for_fraction,
    load_report,
    resolve_selector,
    run,
    selftest,
    sweep,
    sweep_summary,
    write_cells_csv,
    write_report,
)
from .redundancy import (
    RedundancyConfig,
    SelectedSet,
    dependence,
    discretize,
    dynamic_redundancy,
    mutual_information,
    pearson,
    static_redundancy,
)
from .selector import (
    ImportanceScores,
    SelectionResult,
    SelectorConfig,
    importance,
    per_view_quota,
    select,
)

__version__ = "0.1.0"

__all__ = [
    "AttentionWeights",
    "ViewScores",
    "context_keys",
    "cross_scores",
    "intra_scores",
    "self_attention_weights",
    "softmax_rows",
    "FeatureId",
    "FeatureView",
    "MultiViewDataset",
    "SynthLayout",
    "SynthSpec",
    "apply_zscore",
    "load_manifest",
    "normalize_dataset",
    "save_manifest",
    "split",
    "split_indices",
    "synth_generate",
    "synth_layout",
    "zscore_normalize",
    "zscore_stats",
    "MetricReport",
    "MlknnModel",
    "PredictionScores",
    "average_precision",
    "coverage_error",
    "evaluate_predictions",
    "macro_auc",
    "mlknn_fit",
    "mlknn_predict",
    "ranking_loss",
    "DEFAULT_FRACTIONS",
    "DEFAULT_GRID",
    "CellResult",
    "EvaluationReport",
    "ExperimentSpec",
    "FractionAggregate",
    "k_for_fraction",
    "load_report",
    "resolve_selector",
    "run",
    "selftest",
    "sweep",
    "sweep_summary",
    "write_cells_csv",
    "write_report",
    "RedundancyConfig",
    "SelectedSet",
    "dependence",
    "discretize",
    "dynamic_redundancy",
    "mutual_information",
    "pearson",
    "static_redundancy",
    "ImportanceScores",
    "SelectionResult",
    "SelectorConfig",
    "importance",
    "per_view_quota",
    "select",
    "__version__",
]
