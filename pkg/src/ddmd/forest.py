"""From-scratch random forest for binary classification.

Trees grow on bootstrap resamples with Gini-impurity splits over a random
feature subset per node. Each tree consumes its own RNG stream derived from
(seed, tree_index), so serial and parallel training produce byte-identical
models. Models serialize to a versioned JSON document.
"""

from __future__ import annotations

import json
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from .config import MODEL_SCHEMA_VERSION
from .errors import DecodeError, InvalidInput, SchemaError

DEFAULT_LABEL_NAMES = {0: "NDD", 1: "DD"}

# A node is either a split {"feature", "threshold", "left", "right"} with
# child indices into the tree's preorder node list, or {"leaf_counts": [n0, n1]}.
TreeNodes = list[dict]


@dataclass(frozen=True)
class Hyperparams:
    """Forest training knobs. features_per_split=None means floor(sqrt(n_features))."""

    n_trees: int = 100
    max_depth: int | None = None
    min_samples_split: int = 2
    features_per_split: int | None = None
    seed: int = 0


@dataclass(frozen=True)
class TrainingSet:
    """Feature matrix with binary labels (0 = NDD, 1 = DD)."""

    vectors: np.ndarray
    labels: np.ndarray
    label_names: dict[int, str] = field(default_factory=lambda: dict(DEFAULT_LABEL_NAMES))

    def __post_init__(self):
        vectors = np.asarray(self.vectors, dtype=np.float64)
        labels = np.asarray(self.labels, dtype=np.int64)
        object.__setattr__(self, "vectors", vectors)
        object.__setattr__(self, "labels", labels)
        if vectors.ndim != 2:
            raise InvalidInput(f"vectors must be 2-D, got shape {vectors.shape}")
        if len(vectors) != len(labels):
            raise InvalidInput(f"{len(vectors)} vectors vs {len(labels)} labels")
        if not np.isfinite(vectors).all():
            raise InvalidInput("vectors contain non-finite values")
        if labels.size and not np.isin(labels, (0, 1)).all():
            raise InvalidInput("labels must be 0 or 1")

    @property
    def n_features(self) -> int:
        return self.vectors.shape[1]


@dataclass(frozen=True)
class ForestModel:
    """Trained ensemble plus its hyperparameters and feature importances."""

    trees: list[TreeNodes]
    hyperparams: Hyperparams
    feature_importance: np.ndarray
    label_names: dict[int, str]
    schema_version: int = MODEL_SCHEMA_VERSION

    @property
    def n_features(self) -> int:
        return len(self.feature_importance)


def gini(class_counts) -> float:
    """Gini impurity 1 - sum(p_c^2) of a two-class count pair."""
    c0, c1 = class_counts
    if c0 < 0 or c1 < 0:
        raise InvalidInput(f"counts must be non-negative, got {class_counts}")
    total = c0 + c1
    if total == 0:
        raise InvalidInput("gini of an empty node is undefined")
    p0 = c0 / total
    p1 = c1 / total
    return 1.0 - (p0 * p0 + p1 * p1)


def _best_split(values: np.ndarray, labels: np.ndarray):
    """Best (threshold, weighted_child_gini) for one feature, or None.

    Thresholds are midpoints between consecutive distinct sorted values; ties
    on impurity resolve to the lowest threshold.
    """
    order = np.argsort(values, kind="stable")
    v = values[order]
    n = len(v)
    if v[0] == v[-1]:
        return None
    ones = np.cumsum(labels[order])
    total1 = ones[-1]
    left_n = np.arange(1, n, dtype=np.float64)
    left1 = ones[:-1].astype(np.float64)
    right_n = n - left_n
    right1 = total1 - left1
    left_gini = 1.0 - ((left1 / left_n) ** 2 + ((left_n - left1) / left_n) ** 2)
    right_gini = 1.0 - ((right1 / right_n) ** 2 + ((right_n - right1) / right_n) ** 2)
    weighted = (left_n * left_gini + right_n * right_gini) / n
    weighted[v[:-1] == v[1:]] = np.inf  # cuts inside runs of equal values are not real splits
    best = int(np.argmin(weighted))
    if not np.isfinite(weighted[best]):
        return None
    threshold = (v[best] + v[best + 1]) / 2.0
    return float(threshold), float(weighted[best])


def _grow_tree(X: np.ndarray, y: np.ndarray, hp: Hyperparams, k_features: int,
               tree_index: int) -> tuple[TreeNodes, np.ndarray]:
    """Grow one tree on a bootstrap sample; returns (preorder nodes, importance)."""
    rng = np.random.default_rng([hp.seed, tree_index])
    n_total, n_features = X.shape
    sample = rng.integers(0, n_total, size=n_total)
    importance = np.zeros(n_features)
    nodes: TreeNodes = []
    # Stack-based preorder build; RNG consumption order is the preorder walk,
    # which keeps models schedule-independent and depth unbounded.
    stack = [(None, None, sample, 0)]
    while stack:
        parent, side, idxs, depth = stack.pop()
        my_index = len(nodes)
        if parent is not None:
            nodes[parent][side] = my_index
        labels = y[idxs]
        n1 = int(labels.sum())
        counts = (len(labels) - n1, n1)
        pure = counts[0] == 0 or counts[1] == 0
        depth_capped = hp.max_depth is not None and depth >= hp.max_depth
        if pure or depth_capped or len(idxs) < hp.min_samples_split:
            nodes.append({"leaf_counts": [counts[0], counts[1]]})
            continue
        parent_gini = gini(counts)
        candidates = np.sort(rng.choice(n_features, size=k_features, replace=False))
        best = None  # (weighted_gini, feature, threshold)
        for feature in candidates:
            found = _best_split(X[idxs, feature], labels)
            if found is None:
                continue
            threshold, weighted = found
            if best is None or weighted < best[0]:
                best = (weighted, int(feature), threshold)
        if best is None:
            nodes.append({"leaf_counts": [counts[0], counts[1]]})
            continue
        weighted, feature, threshold = best
        importance[feature] += (len(idxs) / n_total) * (parent_gini - weighted)
        nodes.append({"feature": feature, "threshold": threshold, "left": None, "right": None})
        go_left = X[idxs, feature] <= threshold
        # Push right first so the left subtree is built (and numbered) first.
        stack.append((my_index, "right", idxs[~go_left], depth + 1))
        stack.append((my_index, "left", idxs[go_left], depth + 1))
    return nodes, importance


def _grow_tree_task(args):
    return _grow_tree(*args)


def fit(data: TrainingSet, hyperparams: Hyperparams = Hyperparams(), n_jobs: int = 1) -> ForestModel:
    """Train a forest. Deterministic in (data, hyperparams), independent of n_jobs.

    Single-class input is permitted and produces a degenerate constant model
    (all trees are pure leaves, importances all zero).
    """
    if len(data.vectors) == 0:
        raise InvalidInput("cannot fit on an empty training set")
    if len(data.vectors) < 2:
        raise InvalidInput("need at least 2 training examples")
    if hyperparams.n_trees < 1:
        raise InvalidInput(f"n_trees must be >= 1, got {hyperparams.n_trees}")
    if hyperparams.features_per_split is None:
        k = max(1, int(np.sqrt(data.n_features)))
    else:
        k = hyperparams.features_per_split
    if not 1 <= k <= data.n_features:
        raise InvalidInput(f"features_per_split must be in [1, {data.n_features}], got {k}")
    resolved = Hyperparams(
        n_trees=hyperparams.n_trees,
        max_depth=hyperparams.max_depth,
        min_samples_split=hyperparams.min_samples_split,
        features_per_split=k,
        seed=hyperparams.seed,
    )

    X, y = data.vectors, data.labels
    tasks = [(X, y, resolved, k, i) for i in range(resolved.n_trees)]
    if n_jobs > 1:
        with ProcessPoolExecutor(max_workers=n_jobs) as pool:
            grown = list(pool.map(_grow_tree_task, tasks))
    else:
        grown = [_grow_tree(*task) for task in tasks]

    trees = [nodes for nodes, _ in grown]
    importance = np.sum([imp for _, imp in grown], axis=0)
    total = importance.sum()
    if total > 0:
        importance = importance / total
    return ForestModel(
        trees=trees,
        hyperparams=resolved,
        feature_importance=importance,
        label_names=dict(data.label_names),
    )


def _tree_vote(nodes: TreeNodes, vector: np.ndarray) -> int:
    node = nodes[0]
    while "leaf_counts" not in node:
        node = nodes[node["left"] if vector[node["feature"]] <= node["threshold"] else node["right"]]
    n0, n1 = node["leaf_counts"]
    return 1 if n1 >= n0 else 0


def _check_vector(model: ForestModel, vector) -> np.ndarray:
    vector = np.asarray(vector, dtype=np.float64)
    if vector.shape != (model.n_features,):
        raise InvalidInput(f"expected {model.n_features} features, got shape {vector.shape}")
    if not np.isfinite(vector).all():
        raise InvalidInput("feature vector contains non-finite values")
    return vector


def predict(model: ForestModel, vector) -> int:
    """Majority vote over tree leaves; an exact tie returns class 1."""
    vector = _check_vector(model, vector)
    ones = sum(_tree_vote(nodes, vector) for nodes in model.trees)
    return 1 if 2 * ones >= len(model.trees) else 0


def predict_proba(model: ForestModel, vector) -> float:
    """Fraction of trees voting class 1."""
    vector = _check_vector(model, vector)
    ones = sum(_tree_vote(nodes, vector) for nodes in model.trees)
    return ones / len(model.trees)


def save_model(model: ForestModel, path: str | Path) -> None:
    """Serialize to versioned JSON. Output bytes are deterministic."""
    document = {
        "schema_version": model.schema_version,
        "label_names": {str(k): v for k, v in sorted(model.label_names.items())},
        "hyperparams": asdict(model.hyperparams),
        "feature_importance": [float(v) for v in model.feature_importance],
        "trees": model.trees,
    }
    Path(path).write_text(json.dumps(document, sort_keys=True, separators=(",", ":")) + "\n")


def load_model(path: str | Path) -> ForestModel:
    """Load a model written by save_model.

    Raises:
        SchemaError: schema_version differs from the supported one.
        DecodeError: file is not valid model JSON.
    """
    try:
        document = json.loads(Path(path).read_text())
    except (json.JSONDecodeError, UnicodeDecodeError) as exc:
        raise DecodeError(f"not a valid model file: {exc}") from exc
    if not isinstance(document, dict):
        raise DecodeError("model document is not a JSON object")
    version = document.get("schema_version")
    if version != MODEL_SCHEMA_VERSION:
        raise SchemaError(f"unsupported model schema_version {version!r}, expected {MODEL_SCHEMA_VERSION}")
    try:
        return ForestModel(
            trees=document["trees"],
            hyperparams=Hyperparams(**document["hyperparams"]),
            feature_importance=np.asarray(document["feature_importance"], dtype=np.float64),
            label_names={int(k): str(v) for k, v in document["label_names"].items()},
            schema_version=version,
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise DecodeError(f"model document is missing or corrupt: {exc}") from exc
