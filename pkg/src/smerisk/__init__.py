"""Credit default scoring for SME loan books.

A from-scratch random forest compared against a logistic-regression
baseline (the "Delphi proxy") on synthetic loan data with a controllable
feature-to-default signal. Everything is deterministic given the seeds in
the configs: datasets, trained models, reports.
"""

from .cart import TreeParams, grow_tree, predict_tree
from .dataset import (
    Dataset,
    SmeRecord,
    load_csv,
    pearson_correlation,
    split_train_test,
    write_csv,
)
from .experiment import (
    ComparisonReport,
    ExperimentConfig,
    default_experiment_config,
    load_model,
    render_report,
    run_comparison,
    save_model,
)
from .forest import ForestModel, ForestParams, feature_importances, predict_forest, train_forest
from .logit import LogisticModel, LogitHyperparams, predict_label, predict_proba, train_logistic
from .metrics import ConfusionMatrix, MetricsReport, compute_metrics, confusion_matrix
from .synthgen import GeneratorConfig, generate, latent_default_probability

__version__ = "0.1.0"

__all__ = [
    "ComparisonReport",
    "ConfusionMatrix",
    "Dataset",
    "ExperimentConfig",
    "ForestModel",
    "ForestParams",
    "GeneratorConfig",
    "LogisticModel",
    "LogitHyperparams",
    "MetricsReport",
    "SmeRecord",
    "TreeParams",
    "compute_metrics",
    "confusion_matrix",
    "default_experiment_config",
    "feature_importances",
    "generate",
    "grow_tree",
    "latent_default_probability",
    "load_csv",
    "load_model",
    "pearson_correlation",
    "predict_forest",
    "predict_label",
    "predict_proba",
    "predict_tree",
    "render_report",
    "run_comparison",
    "save_model",
    "split_train_test",
    "train_forest",
    "train_logistic",
    "write_csv",
    "__version__",
]
