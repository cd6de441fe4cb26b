"""SME loan dataset: record schema, CSV round trip, splitting, standardization.

The canonical schema is fixed: five continuous risk features, a binary
industry sector code, and an optional binary default label. CSV files carry
exactly these columns, in this order, with the label column optional for
unlabeled scoring data.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Iterator, Sequence

import numpy as np

from .errors import (
    DataError,
    EmptyInputError,
    ParameterError,
    RowParseError,
    SchemaError,
    UndefinedCorrelationError,
)

SCHEMA_VERSION = "sme-credit-1"

CONTINUOUS_FEATURES = (
    "Revenue_Growth",
    "Cash_Flow_Variability",
    "Debt_Equity_Ratio",
    "Profit_Margin",
    "Commodity_Price_Dependency",
)
SECTOR_COLUMN = "Industry_Sector"
LABEL_COLUMN = "Default_Status"
FEATURE_COLUMNS = CONTINUOUS_FEATURES + (SECTOR_COLUMN,)
ALL_COLUMNS = FEATURE_COLUMNS + (LABEL_COLUMN,)

AGRICULTURE = 0
MANUFACTURING = 1


@dataclass(frozen=True)
class SmeRecord:
    """One loan applicant.

    Continuous features are fractions or ratios; ``commodity_price_dependency``
    is a correlation coefficient against commodity prices, so it lives in
    [-1, 1]. ``industry_sector`` is 0 (agriculture) or 1 (manufacturing).
    ``default_status`` is 1 for a default, 0 otherwise, None when unlabeled.
    """

    revenue_growth: float
    cash_flow_variability: float
    debt_equity_ratio: float
    profit_margin: float
    commodity_price_dependency: float
    industry_sector: int
    default_status: int | None = None

    def continuous_values(self) -> tuple[float, float, float, float, float]:
        return (
            self.revenue_growth,
            self.cash_flow_variability,
            self.debt_equity_ratio,
            self.profit_margin,
            self.commodity_price_dependency,
        )

    def feature_vector(self) -> np.ndarray:
        """All six model features, sector encoded 0/1, as float64."""
        return np.array(self.continuous_values() + (float(self.industry_sector),))

    def validate(self, ranges: bool = True) -> None:
        """Check field invariants; ``ranges=False`` skips the physical bounds
        (used for standardized data, where values are z-scores)."""
        if self.industry_sector not in (0, 1):
            raise ParameterError(f"industry_sector must be 0 or 1, got {self.industry_sector!r}")
        if self.default_status not in (0, 1, None):
            raise ParameterError(f"default_status must be 0, 1 or absent, got {self.default_status!r}")
        for name, value in zip(CONTINUOUS_FEATURES, self.continuous_values()):
            if not (isinstance(value, (int, float)) and math.isfinite(value)):
                raise ParameterError(f"{name} must be a finite number, got {value!r}")
        if not ranges:
            return
        if self.cash_flow_variability < 0:
            raise ParameterError(f"Cash_Flow_Variability must be >= 0, got {self.cash_flow_variability}")
        if self.debt_equity_ratio < 0:
            raise ParameterError(f"Debt_Equity_Ratio must be >= 0, got {self.debt_equity_ratio}")
        if not -1.0 <= self.commodity_price_dependency <= 1.0:
            raise ParameterError(
                f"Commodity_Price_Dependency must lie in [-1, 1], got {self.commodity_price_dependency}"
            )


@dataclass(frozen=True)
class Dataset:
    """Ordered, immutable collection of records sharing the canonical schema.

    ``standardized`` marks data transformed by apply_standardizer; such
    records are z-scores and are exempt from the physical range checks.
    """

    records: tuple[SmeRecord, ...]
    schema_version: str = SCHEMA_VERSION
    standardized: bool = False

    def __post_init__(self):
        object.__setattr__(self, "records", tuple(self.records))
        for record in self.records:
            record.validate(ranges=not self.standardized)

    def __len__(self) -> int:
        return len(self.records)

    def __iter__(self) -> Iterator[SmeRecord]:
        return iter(self.records)

    @property
    def labeled(self) -> bool:
        return all(r.default_status is not None for r in self.records)

    @property
    def default_rate(self) -> float:
        self._require_labeled()
        self._require_nonempty()
        return float(np.mean([r.default_status for r in self.records]))

    def feature_matrix(self) -> np.ndarray:
        """(n, 6) float64 matrix in canonical column order."""
        return np.array([r.feature_vector() for r in self.records], dtype=float).reshape(len(self), 6)

    def continuous_matrix(self) -> np.ndarray:
        """(n, 5) matrix of the continuous features only."""
        return np.array([r.continuous_values() for r in self.records], dtype=float).reshape(len(self), 5)

    def sector_array(self) -> np.ndarray:
        return np.array([r.industry_sector for r in self.records], dtype=np.int64)

    def labels(self) -> np.ndarray:
        self._require_labeled()
        return np.array([r.default_status for r in self.records], dtype=np.int64)

    def subset(self, indices: Sequence[int]) -> "Dataset":
        return Dataset(
            tuple(self.records[int(i)] for i in indices),
            schema_version=self.schema_version,
            standardized=self.standardized,
        )

    def _require_nonempty(self):
        if not self.records:
            raise EmptyInputError("dataset holds no records")

    def _require_labeled(self):
        if not self.labeled:
            raise ParameterError("operation requires a labeled dataset")


def _parse_cell(text: str, column: str) -> float:
    try:
        return float(text)
    except ValueError:
        raise ValueError(f"non-numeric value {text!r} in column {column}")


def _parse_binary(text: str, column: str) -> int:
    value = _parse_cell(text, column)
    if value not in (0.0, 1.0):
        raise ValueError(f"column {column} must be 0 or 1, got {text!r}")
    return int(value)


def load_csv(path: str | Path) -> Dataset:
    """Read a canonical CSV file into a Dataset.

    The header must match the canonical columns exactly (label column
    optional). Raises SchemaError for header drift, RowParseError with the
    offending data-row index for bad cells, EmptyInputError for a file with
    no data rows.
    """
    path = Path(path)
    try:
        with path.open(newline="", encoding="utf-8") as fh:
            rows = [row for row in csv.reader(fh)]
    except OSError as exc:
        raise DataError(f"cannot read {path}: {exc}") from None
    if not rows:
        raise EmptyInputError(f"{path} is empty")
    header = tuple(rows[0])
    if header == ALL_COLUMNS:
        labeled = True
    elif header == FEATURE_COLUMNS:
        labeled = False
    else:
        raise SchemaError(_describe_header_mismatch(header))
    body = rows[1:]
    if not body:
        raise EmptyInputError(f"{path} has a header but no data rows")

    records = []
    for i, row in enumerate(body):
        if len(row) != len(header):
            raise RowParseError(i, f"expected {len(header)} cells, got {len(row)}")
        try:
            continuous = [_parse_cell(cell, col) for cell, col in zip(row[:5], CONTINUOUS_FEATURES)]
            sector = _parse_binary(row[5], SECTOR_COLUMN)
            label = _parse_binary(row[6], LABEL_COLUMN) if labeled else None
            record = SmeRecord(*continuous, industry_sector=sector, default_status=label)
            record.validate()
        except (ValueError, ParameterError) as exc:
            raise RowParseError(i, str(exc)) from None
        records.append(record)
    return Dataset(tuple(records))


def _describe_header_mismatch(header: tuple[str, ...]) -> str:
    expected = ALL_COLUMNS if len(header) >= len(ALL_COLUMNS) else FEATURE_COLUMNS
    for got, want in zip(header, expected):
        if got != want:
            return f"unknown column {got!r} where {want!r} was expected"
    if len(header) < len(FEATURE_COLUMNS):
        return f"missing column {FEATURE_COLUMNS[len(header)]!r}"
    return f"unexpected extra column {header[len(expected)]!r}"


def _render_number(value: float) -> str:
    # repr() emits the shortest digit string that round-trips exactly.
    return repr(float(value))


def write_csv(dataset: Dataset, path: str | Path) -> None:
    """Write a Dataset to a canonical CSV file.

    Numbers are rendered with full round-trip precision, so
    ``load_csv(write_csv(d))`` reproduces ``d`` exactly.
    """
    dataset._require_nonempty()
    header = ALL_COLUMNS if dataset.labeled else FEATURE_COLUMNS
    with Path(path).open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for r in dataset:
            row = [_render_number(v) for v in r.continuous_values()]
            row.append(str(int(r.industry_sector)))
            if dataset.labeled:
                row.append(str(int(r.default_status)))
            writer.writerow(row)


def split_train_test(dataset: Dataset, test_fraction: float, seed: int) -> tuple[Dataset, Dataset]:
    """Uniformly shuffled partition into (train, test).

    The test part gets ``round(n * test_fraction)`` records. The partition
    is a pure function of (record order, test_fraction, seed).
    """
    dataset._require_nonempty()
    dataset._require_labeled()
    if not 0.0 < test_fraction < 1.0:
        raise ParameterError(f"test_fraction must lie in (0, 1), got {test_fraction}")
    n = len(dataset)
    n_test = round(n * test_fraction)
    if n_test == 0 or n_test == n:
        raise ParameterError(
            f"test_fraction {test_fraction} leaves an empty part for {n} records"
        )
    perm = np.random.Generator(np.random.PCG64(seed)).permutation(n)
    return dataset.subset(perm[n_test:]), dataset.subset(perm[:n_test])


@dataclass(frozen=True)
class StandardizationParams:
    """Per-feature centering and scaling fitted on a training set.

    One (mean, sd) pair per continuous feature, population standard
    deviation. Features with zero spread are flagged constant and carry
    sd = 0; they standardize to 0 rather than raising.
    """

    means: tuple[float, ...]
    sds: tuple[float, ...]
    constant_flags: tuple[bool, ...]

    def __post_init__(self):
        if not (len(self.means) == len(self.sds) == len(self.constant_flags)):
            raise ParameterError("standardization parameter lengths disagree")
        for sd, flag in zip(self.sds, self.constant_flags):
            if sd < 0 or (sd == 0) != flag:
                raise ParameterError("sd must be > 0 exactly where the constant flag is unset")

    def transform_matrix(self, matrix: np.ndarray) -> np.ndarray:
        if matrix.ndim != 2 or matrix.shape[1] != len(self.means):
            raise ParameterError(
                f"expected {len(self.means)} feature columns, got shape {matrix.shape}"
            )
        means = np.asarray(self.means)
        sds = np.where(self.constant_flags, 1.0, np.asarray(self.sds))
        out = (matrix - means) / sds
        out[:, np.asarray(self.constant_flags)] = 0.0
        return out

    def to_json_dict(self) -> dict:
        return {
            "means": list(self.means),
            "sds": list(self.sds),
            "constant_flags": list(self.constant_flags),
        }

    @classmethod
    def from_json_dict(cls, doc: dict) -> "StandardizationParams":
        return cls(
            means=tuple(float(v) for v in doc["means"]),
            sds=tuple(float(v) for v in doc["sds"]),
            constant_flags=tuple(bool(v) for v in doc["constant_flags"]),
        )


def fit_standardizer(train: Dataset) -> StandardizationParams:
    """Mean and population standard deviation of each continuous feature."""
    train._require_nonempty()
    matrix = train.continuous_matrix()
    means = matrix.mean(axis=0)
    sds = matrix.std(axis=0)  # ddof=0: population sd
    flags = sds == 0.0
    return StandardizationParams(
        means=tuple(float(m) for m in means),
        sds=tuple(float(s) for s in sds),
        constant_flags=tuple(bool(f) for f in flags),
    )


def apply_standardizer(params: StandardizationParams, dataset: Dataset) -> Dataset:
    """Return a copy of ``dataset`` with continuous features z-scored under
    ``params``. Constant-flagged features become 0; sector and labels pass
    through unchanged."""
    transformed = params.transform_matrix(dataset.continuous_matrix()) if len(dataset) else np.empty((0, 5))
    records = tuple(
        SmeRecord(
            *(float(v) for v in row),
            industry_sector=r.industry_sector,
            default_status=r.default_status,
        )
        for row, r in zip(transformed, dataset)
    )
    return Dataset(records, schema_version=dataset.schema_version, standardized=True)


def pearson_correlation(a: Sequence[float], b: Sequence[float]) -> float:
    """Pearson correlation coefficient of two equal-length series.

    This is the sensitivity measure used for the commodity-dependency
    feature: the correlation between a revenue series and a commodity price
    series. The result is clamped to [-1, 1] against rounding.
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.ndim != 1 or b.ndim != 1:
        raise ParameterError("series must be one-dimensional")
    if len(a) != len(b):
        raise ParameterError(f"series lengths differ: {len(a)} vs {len(b)}")
    if len(a) < 2:
        raise ParameterError("correlation needs at least 2 points")
    if not (np.isfinite(a).all() and np.isfinite(b).all()):
        raise ParameterError("series must be finite")
    da = a - a.mean()
    db = b - b.mean()
    var_a = float(da @ da)
    var_b = float(db @ db)
    if var_a == 0.0 or var_b == 0.0:
        raise UndefinedCorrelationError("a series with zero variance has no defined correlation")
    r = float(da @ db) / math.sqrt(var_a * var_b)
    return min(1.0, max(-1.0, r))
