"""CART-style binary decision trees grown on the canonical feature matrix.

Conventions, fixed so independent reimplementations agree node for node:
gini impurity, candidate thresholds at midpoints between consecutive
distinct sorted values, routing rule value <= threshold goes left, ties
broken by lowest feature index then lowest threshold, and a split is
accepted only when it strictly reduces the size-weighted mean child
impurity.

Split scoring is exact. With left counts (a, b) and right counts (c, d),
minimizing the weighted child gini is equivalent to maximizing

    S = (a^2 + b^2)/nL + (c^2 + d^2)/nR = T / D,
    T = (a^2 + b^2) * nR + (c^2 + d^2) * nL,   D = nL * nR,

where T and D are integers. A single correctly rounded division per
candidate keeps the comparison order exact for any node that fits in
int64 arithmetic (n below about two million rows), and the final
strict-improvement test against the parent is done in unbounded integers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence, Union

import numpy as np

from .dataset import SmeRecord
from .errors import ModelFormatError, ParameterError


@dataclass(frozen=True)
class ClassCounts:
    """Label tallies for the rows reaching one node."""

    count_0: int
    count_1: int

    def __post_init__(self):
        for name in ("count_0", "count_1"):
            v = getattr(self, name)
            if isinstance(v, bool) or not isinstance(v, (int, np.integer)) or v < 0:
                raise ParameterError(f"{name} must be a non-negative integer, got {v!r}")
            object.__setattr__(self, name, int(v))

    @property
    def total(self) -> int:
        return self.count_0 + self.count_1

    @property
    def prob_1(self) -> float:
        if self.total == 0:
            raise ParameterError("empty counts have no class fraction")
        return self.count_1 / self.total


def gini_impurity(counts: ClassCounts) -> float:
    """1 - p0^2 - p1^2, in [0, 0.5] for two classes."""
    n = counts.total
    if n == 0:
        raise ParameterError("gini impurity is undefined for an empty node")
    return 1.0 - (counts.count_0 ** 2 + counts.count_1 ** 2) / (n * n)


@dataclass(frozen=True)
class Leaf:
    counts: ClassCounts

    def __post_init__(self):
        if self.counts.total < 1:
            raise ParameterError("a leaf must hold at least one row")


@dataclass
class Internal:
    """Split node. Children are filled in during growth and are never None
    on a finished tree."""

    feature: int
    threshold: float
    left: "TreeNode | None" = None
    right: "TreeNode | None" = None


TreeNode = Union[Leaf, Internal]


@dataclass(frozen=True)
class TreeParams:
    """Growth limits. ``features_per_split=None`` resolves to
    floor(sqrt(feature count)) at training time."""

    max_depth: int | None = None
    min_samples_split: int = 2
    features_per_split: int | None = None

    def __post_init__(self):
        if self.max_depth is not None and (not isinstance(self.max_depth, int) or self.max_depth < 1):
            raise ParameterError(f"max_depth must be a positive integer or None, got {self.max_depth!r}")
        if not isinstance(self.min_samples_split, int) or self.min_samples_split < 1:
            raise ParameterError(f"min_samples_split must be a positive integer, got {self.min_samples_split!r}")
        if self.features_per_split is not None and (
            not isinstance(self.features_per_split, int) or self.features_per_split < 1
        ):
            raise ParameterError(
                f"features_per_split must be a positive integer or None, got {self.features_per_split!r}"
            )

    def resolve_features_per_split(self, n_features: int) -> int:
        k = self.features_per_split
        if k is None:
            k = int(math.floor(math.sqrt(n_features)))
        if k > n_features:
            raise ParameterError(f"features_per_split {k} exceeds feature count {n_features}")
        return k

    def to_json_dict(self) -> dict:
        return {
            "max_depth": self.max_depth,
            "min_samples_split": self.min_samples_split,
            "features_per_split": self.features_per_split,
        }

    @classmethod
    def from_json_dict(cls, doc: dict) -> "TreeParams":
        return cls(
            max_depth=None if doc["max_depth"] is None else int(doc["max_depth"]),
            min_samples_split=int(doc["min_samples_split"]),
            features_per_split=None if doc["features_per_split"] is None else int(doc["features_per_split"]),
        )


def best_split(
    X: np.ndarray, y: np.ndarray, candidate_features: Sequence[int]
) -> Optional[tuple[int, float, float]]:
    """Exhaustive search for the impurity-minimizing (feature, threshold).

    Returns (feature_index, threshold, weighted_child_impurity), or None if
    no candidate strictly beats the parent impurity. Candidates are the
    midpoints between consecutive distinct sorted values of each feature.
    """
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=np.int64)
    n = len(y)
    if n == 0 or len(candidate_features) == 0:
        raise ParameterError("best_split needs rows and at least one candidate feature")

    total_1 = int(y.sum())
    total_0 = n - total_1
    parent_score = total_0 * total_0 + total_1 * total_1

    best = None  # (S, feature, threshold, T, D)
    for f in sorted(int(f) for f in candidate_features):
        col = X[:, f]
        order = np.argsort(col, kind="stable")
        v = col[order]
        boundaries = np.nonzero(v[:-1] < v[1:])[0]
        if len(boundaries) == 0:
            continue
        n_left = boundaries + 1
        n_right = n - n_left
        c1_left = np.cumsum(y[order])[boundaries]
        c0_left = n_left - c1_left
        c1_right = total_1 - c1_left
        c0_right = n_right - c1_right
        A = c0_left * c0_left + c1_left * c1_left
        B = c0_right * c0_right + c1_right * c1_right
        T = A * n_right + B * n_left
        D = n_left * n_right
        S = T / D
        # argmax takes the first maximum; thresholds ascend with the sort,
        # so within a feature the lowest winning threshold is kept.
        j = int(np.argmax(S))
        if best is None or S[j] > best[0]:
            a = float(v[boundaries[j]])
            b = float(v[boundaries[j] + 1])
            threshold = (a + b) / 2.0
            if threshold == b:
                # adjacent floats can round the midpoint up onto the right
                # value; fall back to the left value so routing by
                # x <= threshold reproduces the intended partition
                threshold = a
            best = (S[j], f, threshold, int(T[j]), int(D[j]))

    if best is None:
        return None
    S_best, feature, threshold, T, D = best
    if T * n <= parent_score * D:  # exact: S <= parent impurity score
        return None
    return feature, threshold, 1.0 - S_best / n


def _place(parent, key, value):
    if isinstance(parent, (list, dict)):
        parent[key] = value
    else:
        setattr(parent, key, value)


def grow_tree_arrays(
    X: np.ndarray,
    y: np.ndarray,
    params: TreeParams,
    rng: np.random.Generator,
) -> TreeNode:
    """Grow a tree on a feature matrix and 0/1 label array.

    Per node: stop with a Leaf if the node is pure, smaller than
    min_samples_split, or at the depth limit; otherwise draw a fresh random
    feature subset (skipped when the subset is all features, so full-subset
    growth consumes no randomness) and split, stopping if best_split finds
    no strict improvement.
    """
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=np.int64)
    if X.ndim != 2 or len(X) != len(y):
        raise ParameterError(f"feature matrix {X.shape} does not match {len(y)} labels")
    n, d = X.shape
    if n == 0:
        raise ParameterError("cannot grow a tree on zero rows")
    if not np.isin(y, (0, 1)).all():
        raise ParameterError("labels may contain only 0 and 1")
    k = params.resolve_features_per_split(d)

    root_holder: list = [None]
    # LIFO with right pushed before left gives pre-order growth, so the
    # feature sampler is consumed in the same order a recursive
    # implementation would use, without recursion depth limits
    stack: list[tuple[np.ndarray, int, object, object]] = [(np.arange(n), 0, root_holder, 0)]
    while stack:
        idx, depth, parent, key = stack.pop()
        sub_y = y[idx]
        n_node = len(idx)
        c1 = int(sub_y.sum())
        c0 = n_node - c1
        at_depth_limit = params.max_depth is not None and depth >= params.max_depth
        if c0 == 0 or c1 == 0 or n_node < params.min_samples_split or at_depth_limit:
            _place(parent, key, Leaf(ClassCounts(c0, c1)))
            continue
        features = np.sort(rng.choice(d, size=k, replace=False)) if k < d else np.arange(d)
        found = best_split(X[idx], sub_y, features)
        if found is None:
            _place(parent, key, Leaf(ClassCounts(c0, c1)))
            continue
        feature, threshold, _ = found
        node = Internal(feature=feature, threshold=threshold)
        _place(parent, key, node)
        goes_left = X[idx, feature] <= threshold
        stack.append((idx[~goes_left], depth + 1, node, "right"))
        stack.append((idx[goes_left], depth + 1, node, "left"))
    return root_holder[0]


def grow_tree(train, params: TreeParams, rng: np.random.Generator) -> TreeNode:
    """Grow a tree on a labeled Dataset."""
    return grow_tree_arrays(train.feature_matrix(), train.labels(), params, rng)


def predict_vector(tree: TreeNode, x: np.ndarray) -> tuple[int, float]:
    node = tree
    while isinstance(node, Internal):
        node = node.left if x[node.feature] <= node.threshold else node.right
    p = node.counts.prob_1
    return (1 if p >= 0.5 else 0), p


def predict_tree(tree: TreeNode, record: SmeRecord) -> tuple[int, float]:
    """Route one record to its leaf; label = 1 iff prob_1 >= 0.5."""
    return predict_vector(tree, record.feature_vector())


def tree_to_json_dict(root: TreeNode) -> dict:
    holder: list = [None]
    stack = [(root, holder, 0)]
    while stack:
        node, parent, key = stack.pop()
        if isinstance(node, Leaf):
            _place(parent, key, {"count_0": node.counts.count_0, "count_1": node.counts.count_1})
        elif isinstance(node, Internal):
            doc = {"feature": node.feature, "threshold": node.threshold, "left": None, "right": None}
            _place(parent, key, doc)
            stack.append((node.right, doc, "right"))
            stack.append((node.left, doc, "left"))
        else:
            raise ParameterError(f"not a tree node: {node!r}")
    return holder[0]


def tree_from_json_dict(doc: dict) -> TreeNode:
    holder: list = [None]
    stack = [(doc, holder, 0)]
    while stack:
        d, parent, key = stack.pop()
        if not isinstance(d, dict):
            raise ModelFormatError(f"tree node must be an object, got {type(d).__name__}")
        keys = set(d)
        if keys == {"count_0", "count_1"}:
            _place(parent, key, Leaf(ClassCounts(int(d["count_0"]), int(d["count_1"]))))
        elif keys == {"feature", "threshold", "left", "right"}:
            node = Internal(feature=int(d["feature"]), threshold=float(d["threshold"]))
            _place(parent, key, node)
            stack.append((d["right"], node, "right"))
            stack.append((d["left"], node, "left"))
        else:
            raise ModelFormatError(f"unrecognized tree node fields: {sorted(keys)}")
    return holder[0]
