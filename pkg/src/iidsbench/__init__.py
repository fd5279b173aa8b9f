"""Benchmark harness for measuring whether industrial intrusion detectors
generalize to attack types held out of training.

The workflow: load or synthesize a labeled dataset, enumerate scenario
variants of a k-fold split (plain baseline, leave-one-unit-out, and
train-on-one-unit), train the bundled from-scratch classifiers on each
variant, and aggregate per-group recall into heatmap matrices.
"""

from .classifiers import ClassifierSpec, TrainedModel, load_model, predict, save_model, train
from .dataset import (
    AttackSpec,
    AttackTaxonomy,
    Dataset,
    FeatureSchema,
    LabeledRecord,
    StatsSummary,
    SyntheticConfig,
    builtin_taxonomy,
    dataset_stats,
    generate_synthetic,
    load_taxonomy,
    parse_dataset,
    validate_dataset,
    write_dataset,
)
from .errors import (
    ConfigError,
    DatasetError,
    HarnessError,
    ReportError,
    RunError,
    SplitError,
    TaxonomyError,
    TrainError,
)
from .metrics import GroupRecallRow, aggregate_folds, confusion, per_group_recall
from .report import HeatmapSpec, MetricsMatrix, delta_vs_baseline, precision_report
from .runner import (
    ExperimentConfig,
    RunArtifact,
    compare_experiments,
    load_artifact,
    resume,
    run,
)
from .splitting import (
    FoldPlan,
    ScenarioSpec,
    SplitInstance,
    check_split,
    enumerate_scenarios,
    materialize_split,
    partition_folds,
)

__version__ = "0.1.0"

__all__ = [
    "AttackSpec",
    "AttackTaxonomy",
    "ClassifierSpec",
    "ConfigError",
    "Dataset",
    "DatasetError",
    "ExperimentConfig",
    "FeatureSchema",
    "FoldPlan",
    "GroupRecallRow",
    "HarnessError",
    "HeatmapSpec",
    "LabeledRecord",
    "MetricsMatrix",
    "ReportError",
    "RunArtifact",
    "RunError",
    "ScenarioSpec",
    "SplitError",
    "SplitInstance",
    "StatsSummary",
    "SyntheticConfig",
    "TaxonomyError",
    "TrainError",
    "TrainedModel",
    "aggregate_folds",
    "builtin_taxonomy",
    "check_split",
    "compare_experiments",
    "confusion",
    "dataset_stats",
    "delta_vs_baseline",
    "enumerate_scenarios",
    "generate_synthetic",
    "load_artifact",
    "load_model",
    "load_taxonomy",
    "materialize_split",
    "parse_dataset",
    "partition_folds",
    "per_group_recall",
    "precision_report",
    "predict",
    "resume",
    "run",
    "save_model",
    "train",
    "validate_dataset",
    "write_dataset",
]
