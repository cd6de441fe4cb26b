"""Logistic regression baseline trained by full-batch gradient descent.

The objective is mean cross-entropy plus an L2 penalty (lambda/2)*||w||^2
on the weights only; the bias is unpenalized. Training standardizes the
continuous features first, starts from all-zero parameters, and takes
fixed-rate gradient steps with backtracking: any step that would increase
the loss is halved and retried, so the loss sequence is non-increasing by
construction. With lambda > 0 the objective is strictly convex and the
whole procedure is deterministic, so retraining reproduces the model bit
for bit.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union

import numpy as np

from .dataset import (
    Dataset,
    FEATURE_COLUMNS,
    SmeRecord,
    StandardizationParams,
    apply_standardizer,
    fit_standardizer,
)
from .errors import DegenerateLabelsError, ModelFormatError, ParameterError
from .serialize import MODEL_FORMAT_VERSION, check_model_envelope

_PROB_CLAMP = 1e-12
_MAX_HALVINGS = 60


def sigmoid(z: Union[float, np.ndarray]) -> Union[float, np.ndarray]:
    """1/(1 + e^-z), overflow-safe for any finite argument.

    The two algebraically equal branches each exponentiate only a
    non-positive number, so extreme z underflows harmlessly to 0 or 1
    instead of overflowing.
    """
    z = np.asarray(z, dtype=float)
    out = np.empty_like(z)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return float(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class LogitHyperparams:
    learning_rate: float = 0.1
    l2_lambda: float = 1e-3
    max_iterations: int = 5000
    tolerance: float = 1e-8  # absolute loss decrease that counts as converged

    def __post_init__(self):
        if not self.learning_rate > 0:
            raise ParameterError(f"learning_rate must be > 0, got {self.learning_rate!r}")
        if self.l2_lambda < 0:
            raise ParameterError(f"l2_lambda must be >= 0, got {self.l2_lambda!r}")
        if not isinstance(self.max_iterations, int) or self.max_iterations < 0:
            raise ParameterError(f"max_iterations must be a non-negative integer, got {self.max_iterations!r}")
        if not self.tolerance > 0:
            raise ParameterError(f"tolerance must be > 0, got {self.tolerance!r}")

    def to_json_dict(self) -> dict:
        return {
            "learning_rate": self.learning_rate,
            "l2_lambda": self.l2_lambda,
            "max_iterations": self.max_iterations,
            "tolerance": self.tolerance,
        }

    @classmethod
    def from_json_dict(cls, doc: dict) -> "LogitHyperparams":
        return cls(
            learning_rate=float(doc["learning_rate"]),
            l2_lambda=float(doc["l2_lambda"]),
            max_iterations=int(doc["max_iterations"]),
            tolerance=float(doc["tolerance"]),
        )


@dataclass(frozen=True, eq=False)
class LogisticModel:
    """Trained coefficients plus the standardizer they were fitted under.

    ``weights`` has one slot per canonical feature (sector encoded 0/1 and
    unstandardized); predictions standardize the continuous features with
    the stored parameters before applying the linear form.
    """

    weights: np.ndarray
    bias: float
    standardization: StandardizationParams
    training_meta: dict

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=float)
        if w.shape != (len(FEATURE_COLUMNS),):
            raise ParameterError(f"weights must have shape ({len(FEATURE_COLUMNS)},), got {w.shape}")
        if not (np.isfinite(w).all() and np.isfinite(self.bias)):
            raise ParameterError("model parameters must be finite")
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "bias", float(self.bias))


def loss_and_gradient(
    weights: np.ndarray, bias: float, X: np.ndarray, y: np.ndarray, l2_lambda: float
) -> tuple[float, np.ndarray]:
    """Regularized cross-entropy and its analytic gradient.

    The gradient vector carries the weight slots first and the bias slot
    last. Probabilities are clamped to [1e-12, 1 - 1e-12] inside the
    logarithms only; the gradient uses the raw probabilities, which is the
    exact derivative everywhere the clamp is inactive.
    """
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float)
    n = len(y)
    if n == 0:
        raise ParameterError("loss needs a nonempty batch")
    z = X @ weights + bias
    p = sigmoid(z)
    # 1 - p computed as sigmoid(-z): algebraically identical, but avoids the
    # cancellation that makes log(1 - p) lose digits when p is close to 1
    pc = np.clip(p, _PROB_CLAMP, 1.0 - _PROB_CLAMP)
    qc = np.clip(sigmoid(-z), _PROB_CLAMP, 1.0 - _PROB_CLAMP)
    cross_entropy = float(-np.mean(y * np.log(pc) + (1.0 - y) * np.log(qc)))
    loss = cross_entropy + 0.5 * l2_lambda * float(weights @ weights)
    residual = p - y
    grad_w = X.T @ residual / n + l2_lambda * weights
    grad_b = float(np.mean(residual))
    return loss, np.concatenate([grad_w, [grad_b]])


def train_logistic(train: Dataset, hyper: LogitHyperparams = LogitHyperparams()) -> LogisticModel:
    """Fit the baseline on a labeled dataset.

    Stops on the first update whose loss decrease falls below
    hyper.tolerance, or after hyper.max_iterations updates.
    """
    y = train.labels().astype(float)
    if len(np.unique(y)) < 2:
        raise DegenerateLabelsError("training set contains a single class; the baseline needs both")
    standardization = fit_standardizer(train)
    X = apply_standardizer(standardization, train).feature_matrix()

    weights = np.zeros(len(FEATURE_COLUMNS))
    bias = 0.0
    loss, grad = loss_and_gradient(weights, bias, X, y, hyper.l2_lambda)
    iterations = 0
    for _ in range(hyper.max_iterations):
        step = hyper.learning_rate
        halvings = 0
        while True:
            new_w = weights - step * grad[:-1]
            new_b = bias - step * grad[-1]
            new_loss, new_grad = loss_and_gradient(new_w, new_b, X, y, hyper.l2_lambda)
            if new_loss <= loss:
                break
            halvings += 1
            if halvings > _MAX_HALVINGS:
                break
            step /= 2.0
        if halvings > _MAX_HALVINGS:
            # no step this small can decrease the loss; we are at the optimum
            # to within float resolution
            break
        decrease = loss - new_loss
        weights, bias, loss, grad = new_w, new_b, new_loss, new_grad
        iterations += 1
        if decrease < hyper.tolerance:
            break

    return LogisticModel(
        weights=weights,
        bias=bias,
        standardization=standardization,
        training_meta={"iterations": iterations, "final_loss": loss},
    )


def _standardized_vector(model: LogisticModel, record: SmeRecord) -> np.ndarray:
    continuous = model.standardization.transform_matrix(np.array([record.continuous_values()]))[0]
    return np.concatenate([continuous, [float(record.industry_sector)]])


def predict_proba(model: LogisticModel, record: SmeRecord) -> float:
    """sigmoid(w . standardize(x) + b) for one record."""
    return float(sigmoid(_standardized_vector(model, record) @ model.weights + model.bias))


def predict_proba_dataset(model: LogisticModel, dataset: Dataset) -> np.ndarray:
    X = apply_standardizer(model.standardization, dataset).feature_matrix()
    return np.asarray(sigmoid(X @ model.weights + model.bias))


def predict_label(model: LogisticModel, record: SmeRecord, threshold: float = 0.5) -> int:
    """1 iff predicted probability >= threshold (ties go to the default
    class, the conservative call in credit screening)."""
    if not 0.0 < threshold < 1.0:
        raise ParameterError(f"threshold must lie in (0, 1), got {threshold}")
    return 1 if predict_proba(model, record) >= threshold else 0


def logistic_to_json_document(model: LogisticModel) -> dict:
    return {
        "format_version": MODEL_FORMAT_VERSION,
        "model_type": "logistic",
        "weights": [float(w) for w in model.weights],
        "bias": model.bias,
        "standardization": model.standardization.to_json_dict(),
        "training_meta": {
            "iterations": int(model.training_meta["iterations"]),
            "final_loss": float(model.training_meta["final_loss"]),
        },
    }


def logistic_from_json_document(doc: dict) -> LogisticModel:
    check_model_envelope(doc, expected_type="logistic")
    try:
        return LogisticModel(
            weights=np.array([float(w) for w in doc["weights"]]),
            bias=float(doc["bias"]),
            standardization=StandardizationParams.from_json_dict(doc["standardization"]),
            training_meta={
                "iterations": int(doc["training_meta"]["iterations"]),
                "final_loss": float(doc["training_meta"]["final_loss"]),
            },
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise ModelFormatError(f"malformed logistic document: {exc!r}") from None
