"""End-to-end model comparison: one dataset, one split, two models.

Both models are trained on the identical training partition and scored on
the identical held-out partition at threshold 0.5. The text rendering
reproduces the comparison-table layout (metric rows, one column per
model); the JSON rendering carries full precision and round-trips to an
equal report, byte for byte when re-rendered.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import Union

import numpy as np

from .dataset import Dataset, load_csv, split_train_test
from .errors import DataError, DegenerateLabelsError, ParameterError
from .forest import (
    ForestModel,
    ForestParams,
    feature_importances,
    forest_from_json_document,
    forest_to_json_document,
    predict_forest_dataset,
    train_forest,
)
from .logit import (
    LogisticModel,
    LogitHyperparams,
    logistic_from_json_document,
    logistic_to_json_document,
    predict_proba_dataset,
    train_logistic,
)
from .metrics import MetricsReport, score_predictions, two_decimals
from .serialize import check_model_envelope, dumps_deterministic, parse_json_file, write_json_file
from .synthgen import GeneratorConfig, generate

DECISION_THRESHOLD = 0.5

DELPHI_COLUMN = "Delphi model"
FOREST_COLUMN = "Random forest (AI model)"


@dataclass(frozen=True)
class ExperimentConfig:
    """Comparison recipe: exactly one data source plus split and model
    settings."""

    generator: GeneratorConfig | None = None
    csv_path: str | None = None
    test_fraction: float = 0.3
    split_seed: int = 42
    logit_hyper: LogitHyperparams = field(default_factory=LogitHyperparams)
    forest_params: ForestParams = field(default_factory=ForestParams)

    def __post_init__(self):
        if (self.generator is None) == (self.csv_path is None):
            raise ParameterError("configure exactly one data source: generator or csv_path")
        if not 0.0 < self.test_fraction < 1.0:
            raise ParameterError(f"test_fraction must lie in (0, 1), got {self.test_fraction!r}")
        if not isinstance(self.split_seed, int) or self.split_seed < 0:
            raise ParameterError(f"split_seed must be a non-negative integer, got {self.split_seed!r}")

    def to_json_dict(self) -> dict:
        source = {"generator": self.generator.to_json_dict()} if self.generator else {"csv_path": self.csv_path}
        return {
            "data_source": source,
            "test_fraction": self.test_fraction,
            "split_seed": self.split_seed,
            "logit_hyper": self.logit_hyper.to_json_dict(),
            "forest_params": self.forest_params.to_json_dict(),
        }

    @classmethod
    def from_json_dict(cls, doc: dict) -> "ExperimentConfig":
        known = {"data_source", "test_fraction", "split_seed", "logit_hyper", "forest_params"}
        unknown = set(doc) - known
        if unknown:
            raise ParameterError(f"unknown experiment config keys: {sorted(unknown)}")
        kwargs: dict = {}
        source = doc.get("data_source")
        if source is not None:
            if not isinstance(source, dict) or len(source) != 1 or not {"generator", "csv_path"} >= set(source):
                raise ParameterError("data_source must hold exactly one of: generator, csv_path")
            if "generator" in source:
                kwargs["generator"] = GeneratorConfig.from_json_dict(source["generator"])
            else:
                kwargs["csv_path"] = str(source["csv_path"])
        else:
            kwargs["generator"] = GeneratorConfig()
        if "test_fraction" in doc:
            kwargs["test_fraction"] = float(doc["test_fraction"])
        if "split_seed" in doc:
            kwargs["split_seed"] = int(doc["split_seed"])
        if "logit_hyper" in doc:
            kwargs["logit_hyper"] = LogitHyperparams.from_json_dict(doc["logit_hyper"])
        if "forest_params" in doc:
            kwargs["forest_params"] = ForestParams.from_json_dict(doc["forest_params"])
        return cls(**kwargs)


def default_experiment_config() -> ExperimentConfig:
    return ExperimentConfig(generator=GeneratorConfig())


@dataclass(frozen=True)
class ComparisonReport:
    delphi_metrics: MetricsReport
    forest_metrics: MetricsReport
    feature_names: tuple[str, ...]
    importances: tuple[float, ...]
    importances_degenerate: bool
    dataset_summary: dict
    config_echo: dict

    def to_json_dict(self) -> dict:
        return {
            "delphi_metrics": self.delphi_metrics.to_json_dict(),
            "forest_metrics": self.forest_metrics.to_json_dict(),
            "feature_importances": {
                "names": list(self.feature_names),
                "values": list(self.importances),
                "degenerate": self.importances_degenerate,
            },
            "dataset_summary": self.dataset_summary,
            "config_echo": self.config_echo,
        }

    @classmethod
    def from_json_dict(cls, doc: dict) -> "ComparisonReport":
        imp = doc["feature_importances"]
        return cls(
            delphi_metrics=MetricsReport.from_json_dict(doc["delphi_metrics"]),
            forest_metrics=MetricsReport.from_json_dict(doc["forest_metrics"]),
            feature_names=tuple(str(n) for n in imp["names"]),
            importances=tuple(float(v) for v in imp["values"]),
            importances_degenerate=bool(imp["degenerate"]),
            dataset_summary=dict(doc["dataset_summary"]),
            config_echo=dict(doc["config_echo"]),
        )


def _load_source(config: ExperimentConfig) -> tuple[Dataset, str]:
    if config.generator is not None:
        g = config.generator
        return generate(g), f"generator(n={g.n_samples}, seed={g.seed}, signal={g.signal_strength})"
    data = load_csv(config.csv_path)
    if not data.labeled:
        raise DataError(f"{config.csv_path} has no Default_Status column; comparison needs labels")
    return data, f"csv({config.csv_path})"


def run_comparison(config: ExperimentConfig) -> ComparisonReport:
    """Train both models on one shared split and score the held-out part."""
    data, source = _load_source(config)
    train, test = split_train_test(data, config.test_fraction, config.split_seed)
    if len(np.unique(train.labels())) < 2:
        raise DegenerateLabelsError(
            f"training split under split_seed {config.split_seed} contains a single class"
        )

    delphi = train_logistic(train, config.logit_hyper)
    forest = train_forest(train, config.forest_params)

    y_test = test.labels()
    delphi_pred = (predict_proba_dataset(delphi, test) >= DECISION_THRESHOLD).astype(np.int64)
    forest_pred, _ = predict_forest_dataset(forest, test)

    importance_values, degenerate = feature_importances(forest)
    return ComparisonReport(
        delphi_metrics=score_predictions(y_test, delphi_pred),
        forest_metrics=score_predictions(y_test, forest_pred),
        feature_names=forest.feature_names,
        importances=tuple(float(v) for v in importance_values),
        importances_degenerate=degenerate,
        dataset_summary={
            "n_records": len(data),
            "default_rate": data.default_rate,
            "source": source,
        },
        config_echo=config.to_json_dict(),
    )


def _metric_rows(report: ComparisonReport) -> list[tuple[str, float, float, bool, bool]]:
    d, f = report.delphi_metrics, report.forest_metrics
    return [
        ("Accuracy", d.accuracy, f.accuracy, False, False),
        ("Precision", d.precision, f.precision, d.precision_undefined, f.precision_undefined),
        ("Recall", d.recall, f.recall, d.recall_undefined, f.recall_undefined),
        ("F-1", d.f1, f.f1, d.f1_undefined, f.f1_undefined),
    ]


def render_report(report: ComparisonReport, format: str = "text") -> str:
    """Render to 'text' (two-decimal comparison table) or 'json' (full
    precision, deterministic key order)."""
    if format == "json":
        return dumps_deterministic(report.to_json_dict())
    if format != "text":
        raise ParameterError(f"unknown report format {format!r}; use 'text' or 'json'")

    summary = report.dataset_summary
    lines = [
        f"Data: {summary['source']}, {summary['n_records']} records, "
        f"default rate {summary['default_rate']:.3f}",
        "",
        f"{'Performance metric':<20}{DELPHI_COLUMN:<16}{FOREST_COLUMN}",
    ]
    notes = []
    for name, dv, fv, d_flag, f_flag in _metric_rows(report):
        lines.append(f"{name:<20}{two_decimals(dv):<16}{two_decimals(fv)}")
        if d_flag:
            notes.append(f"note: Delphi {name.lower()} undefined (zero denominator), shown as 0.00")
        if f_flag:
            notes.append(f"note: forest {name.lower()} undefined (zero denominator), shown as 0.00")
    lines.extend(notes)
    lines.append("")
    if report.importances_degenerate:
        lines.append("Feature importances: degenerate (no split reduced impurity)")
    else:
        lines.append("Feature importances (impurity decrease, normalized):")
        for name, value in sorted(zip(report.feature_names, report.importances), key=lambda kv: -kv[1]):
            lines.append(f"  {name:<28}{value:.4f}")
    return "\n".join(lines) + "\n"


def save_model(model: Union[LogisticModel, ForestModel], path: str | Path) -> None:
    """Write a model as a versioned JSON document."""
    if isinstance(model, LogisticModel):
        doc = logistic_to_json_document(model)
    elif isinstance(model, ForestModel):
        doc = forest_to_json_document(model)
    else:
        raise ParameterError(f"cannot serialize {type(model).__name__}")
    write_json_file(doc, path)


def load_model(path: str | Path) -> Union[LogisticModel, ForestModel]:
    """Read back a model written by save_model; dispatches on model_type."""
    doc = parse_json_file(path)
    model_type = check_model_envelope(doc)
    if model_type == "logistic":
        return logistic_from_json_document(doc)
    return forest_from_json_document(doc)
