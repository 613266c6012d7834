"""Supervised co-location classifiers built from scratch.

Provides a stratified train/test split, a CART-style decision tree on Gini
impurity, a bagged random forest, confusion-matrix evaluation, and the five
derived metrics (accuracy, sensitivity, specificity, precision, F1).

Conventions
-----------
* Samples are numeric feature matrices ``X`` of shape (n, 4) as produced by
  :func:`proxauth.beacon_model.encode_dataset`, with integer labels ``y``
  (1 = Authentic, the positive class; 0 = Unauthorized).
* Internal tree nodes route ``feature <= threshold`` to the left child.
* All tie-breaks fail toward Unauthorized: leaf majorities and forest votes
  that end even predict Unauthorized.
* Randomness comes from numpy's PCG64 generator seeded through
  ``SeedSequence``; per-tree streams derive only from (seed, tree_index),
  so serial and concurrent forest builds produce identical models.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Sequence

import numpy as np

from .beacon_model import (
    Dataset,
    FeatureEncoder,
    FEATURE_VECTOR_LENGTH,
    Label,
)
from .errors import (
    DegenerateSplit,
    EmptyMatrix,
    EmptyNode,
    EmptyTestSet,
    EmptyTrainingSet,
)

__all__ = [
    "TreeParams",
    "ForestParams",
    "SplitNode",
    "LeafNode",
    "DecisionTree",
    "RandomForest",
    "SplitCandidate",
    "ConfusionMatrix",
    "MetricsReport",
    "stratified_split",
    "gini_impurity",
    "best_split",
    "train_decision_tree",
    "train_random_forest",
    "predict",
    "predict_batch",
    "evaluate",
    "compute_metrics",
    "model_to_document",
    "document_to_model",
    "save_model",
    "load_model",
    "derived_rng",
]

_SEED_MASK = (1 << 64) - 1

MODEL_FORMAT = "proxauth-colocation-model"
MODEL_FORMAT_VERSION = 1


def derived_rng(seed: int, *path: int) -> np.random.Generator:
    """A PCG64 generator derived deterministically from a seed and a key path."""
    return np.random.default_rng(np.random.SeedSequence(seed & _SEED_MASK, spawn_key=tuple(path)))


def _round_half_up(x: float) -> int:
    return int(math.floor(x + 0.5))


@dataclass(frozen=True)
class TreeParams:
    """Decision-tree hyperparameters; the defaults are the canonical configuration."""

    max_depth: int | None = 16  # None = unbounded
    min_samples_split: int = 2
    min_samples_leaf: int = 1

    def __post_init__(self):
        if self.max_depth is not None and self.max_depth < 1:
            raise ValueError("max_depth must be >= 1 or None")
        if self.min_samples_split < 2:
            raise ValueError("min_samples_split must be >= 2")
        if self.min_samples_leaf < 1:
            raise ValueError("min_samples_leaf must be >= 1")


@dataclass(frozen=True)
class ForestParams:
    """Random-forest hyperparameters; defaults are the canonical configuration."""

    n_trees: int = 100
    bootstrap: bool = True
    features_per_split: int = 2  # floor(sqrt(4))
    tree_params: TreeParams = field(default_factory=TreeParams)
    seed: int = 0

    def __post_init__(self):
        if self.n_trees < 1:
            raise ValueError("n_trees must be >= 1")
        if not 1 <= self.features_per_split <= FEATURE_VECTOR_LENGTH:
            raise ValueError(
                f"features_per_split must be in [1, {FEATURE_VECTOR_LENGTH}]"
            )


@dataclass(frozen=True)
class LeafNode:
    label: Label
    class_counts: tuple[int, int]  # (unauthorized, authentic)


@dataclass(frozen=True)
class SplitNode:
    feature_index: int
    threshold: float
    left: "SplitNode | LeafNode"   # samples with feature <= threshold
    right: "SplitNode | LeafNode"  # samples with feature > threshold


@dataclass(frozen=True)
class DecisionTree:
    root: SplitNode | LeafNode
    params: TreeParams

    def depth(self) -> int:
        def walk(node, d):
            if isinstance(node, LeafNode):
                return d
            return max(walk(node.left, d + 1), walk(node.right, d + 1))

        return walk(self.root, 0)

    def node_count(self) -> int:
        def walk(node):
            if isinstance(node, LeafNode):
                return 1
            return 1 + walk(node.left) + walk(node.right)

        return walk(self.root)


@dataclass(frozen=True)
class RandomForest:
    trees: tuple[DecisionTree, ...]
    params: ForestParams


@dataclass(frozen=True)
class SplitCandidate:
    feature_index: int
    threshold: float
    weighted_impurity: float


@dataclass(frozen=True)
class ConfusionMatrix:
    """Counts with Authentic as the positive class."""

    tp: int
    tn: int
    fp: int
    fn: int

    def __post_init__(self):
        if min(self.tp, self.tn, self.fp, self.fn) < 0:
            raise ValueError("confusion matrix counts must be non-negative")

    @property
    def total(self) -> int:
        return self.tp + self.tn + self.fp + self.fn


@dataclass(frozen=True)
class MetricsReport:
    """The five derived metrics as fractions in [0, 1]; None marks an
    undefined value (zero denominator)."""

    accuracy: float | None
    sensitivity: float | None
    specificity: float | None
    precision: float | None
    f1: float | None

    def as_dict(self) -> dict[str, float | None]:
        return {
            "accuracy": self.accuracy,
            "sensitivity": self.sensitivity,
            "specificity": self.specificity,
            "precision": self.precision,
            "f1": self.f1,
        }


def stratified_split(
    dataset: Dataset, test_fraction: float, seed: int
) -> tuple[Dataset, Dataset]:
    """Split per class: the test side receives round-half-up(fraction * count)
    samples of each class, chosen by a seeded uniform shuffle. Deterministic
    for a fixed seed. Raises :class:`DegenerateSplit` when either class would
    leave one partition empty."""
    if not 0.0 < test_fraction < 1.0:
        raise ValueError(f"test_fraction must be in (0, 1), got {test_fraction}")
    by_label: dict[Label, list[int]] = {Label.AUTHENTIC: [], Label.UNAUTHORIZED: []}
    for i, s in enumerate(dataset.samples):
        by_label[s.label].append(i)
    for label, idxs in by_label.items():
        if not idxs:
            raise DegenerateSplit(f"class {label.value!r} has no samples")

    rng = derived_rng(seed)
    test_idx: list[int] = []
    train_idx: list[int] = []
    for label in (Label.AUTHENTIC, Label.UNAUTHORIZED):
        idxs = np.array(by_label[label], dtype=np.int64)
        k = _round_half_up(test_fraction * len(idxs))
        if k == 0 or k == len(idxs):
            raise DegenerateSplit(
                f"class {label.value!r} would contribute 0 samples to one partition"
            )
        perm = rng.permutation(idxs)
        test_idx.extend(perm[:k].tolist())
        train_idx.extend(perm[k:].tolist())

    test_idx.sort()
    train_idx.sort()
    samples = dataset.samples
    train = Dataset(tuple(samples[i] for i in train_idx), dataset.provenance)
    test = Dataset(tuple(samples[i] for i in test_idx), dataset.provenance)
    return train, test


def gini_impurity(class_counts: Sequence[int]) -> float:
    """Gini impurity 1 - sum(p_c^2) for a two-class count pair."""
    total = int(class_counts[0]) + int(class_counts[1])
    if total == 0:
        raise EmptyNode("gini impurity is undefined for an empty node")
    p0 = class_counts[0] / total
    p1 = class_counts[1] / total
    return 1.0 - (p0 * p0 + p1 * p1)


def _gini_from_arrays(neg: np.ndarray, pos: np.ndarray) -> np.ndarray:
    total = neg + pos
    with np.errstate(invalid="ignore"):
        return 1.0 - ((neg / total) ** 2 + (pos / total) ** 2)


def best_split(
    X: np.ndarray,
    y: np.ndarray,
    candidate_features: Sequence[int],
    min_child: int = 1,
    require_improvement: bool = True,
) -> SplitCandidate | None:
    """Exhaustively evaluate midpoint thresholds on each candidate feature and
    return the split minimizing child-size-weighted Gini impurity.

    Returns None when no threshold exists or (with ``require_improvement``)
    no split strictly reduces the parent impurity. Ties break toward the
    lowest feature index, then the lowest threshold. ``min_child`` rejects
    splits that would leave a child smaller than the minimum leaf size.
    ``require_improvement=False`` serves the tree builder's deadlock-breaker:
    exactly balanced mixed-label nodes (XOR-like) can have every candidate
    split tie the parent impurity, yet still separate perfectly one level
    deeper.
    """
    n = len(y)
    if n < 2:
        return None
    total_pos = int(y.sum())
    total_neg = n - total_pos
    parent = gini_impurity((total_neg, total_pos))

    best: tuple[float, int, float] | None = None  # (impurity, feature, threshold)
    for f in sorted(set(int(f) for f in candidate_features)):
        xs = X[:, f]
        order = np.argsort(xs, kind="stable")
        sx = xs[order]
        sy = y[order]
        # candidate boundaries between consecutive distinct values
        cut = np.nonzero(sx[1:] != sx[:-1])[0] + 1  # left sizes
        if cut.size == 0:
            continue
        if min_child > 1:
            cut = cut[(cut >= min_child) & (n - cut >= min_child)]
            if cut.size == 0:
                continue
        csum = np.cumsum(sy)
        left_pos = csum[cut - 1].astype(np.float64)
        left_n = cut.astype(np.float64)
        left_neg = left_n - left_pos
        right_pos = total_pos - left_pos
        right_n = n - left_n
        right_neg = right_n - right_pos
        weighted = (
            left_n * _gini_from_arrays(left_neg, left_pos)
            + right_n * _gini_from_arrays(right_neg, right_pos)
        ) / n
        thresholds = (sx[cut - 1] + sx[cut]) / 2.0
        # lowest threshold wins among equal impurities within this feature
        i = int(np.lexsort((thresholds, weighted))[0])
        cand = (float(weighted[i]), f, float(thresholds[i]))
        if best is None or cand < best:
            best = cand

    if best is None:
        return None
    if require_improvement and best[0] >= parent:
        return None
    return SplitCandidate(feature_index=best[1], threshold=best[2], weighted_impurity=best[0])


def _majority_label(neg: int, pos: int) -> Label:
    # ties fail closed to Unauthorized
    return Label.AUTHENTIC if pos > neg else Label.UNAUTHORIZED


def _build_tree(
    X: np.ndarray,
    y: np.ndarray,
    params: TreeParams,
    depth: int,
    choose_features: Callable[[], Sequence[int]],
) -> SplitNode | LeafNode:
    n = len(y)
    pos = int(y.sum())
    neg = n - pos

    def leaf() -> LeafNode:
        return LeafNode(label=_majority_label(neg, pos), class_counts=(neg, pos))

    if pos == 0 or neg == 0:
        return leaf()
    if n < params.min_samples_split:
        return leaf()
    if params.max_depth is not None and depth >= params.max_depth:
        return leaf()

    features = choose_features()
    cand = best_split(X, y, features, min_child=params.min_samples_leaf)
    if cand is None:
        # Deadlock-breaker: a mixed node whose every split exactly ties the
        # parent impurity (weighted child Gini can never exceed it) still
        # separates deeper down; take the best tie split rather than giving
        # up, so consistent data always trains to purity.
        cand = best_split(
            X, y, features, min_child=params.min_samples_leaf, require_improvement=False
        )
    if cand is None:
        return leaf()

    mask = X[:, cand.feature_index] <= cand.threshold
    left = _build_tree(X[mask], y[mask], params, depth + 1, choose_features)
    right = _build_tree(X[~mask], y[~mask], params, depth + 1, choose_features)
    return SplitNode(cand.feature_index, cand.threshold, left, right)


def train_decision_tree(
    X: np.ndarray,
    y: np.ndarray,
    params: TreeParams = TreeParams(),
    seed: int = 0,
) -> DecisionTree:
    """Greedy CART over all four features. ``seed`` is accepted for interface
    symmetry with the forest; plain tree induction is fully deterministic."""
    if len(y) == 0:
        raise EmptyTrainingSet("cannot train a tree on zero samples")
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y)
    all_features = tuple(range(X.shape[1]))
    root = _build_tree(X, y, params, 0, lambda: all_features)
    return DecisionTree(root=root, params=params)


def train_random_forest(
    X: np.ndarray,
    y: np.ndarray,
    params: ForestParams = ForestParams(),
) -> RandomForest:
    """Bagged forest: tree i trains on a bootstrap resample (drawn from an RNG
    derived from (seed, i)) and considers ``features_per_split`` randomly drawn
    features at each node."""
    n = len(y)
    if n == 0:
        raise EmptyTrainingSet("cannot train a forest on zero samples")
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y)
    n_features = X.shape[1]

    trees = []
    for i in range(params.n_trees):
        rng = derived_rng(params.seed, i)
        if params.bootstrap:
            idx = rng.integers(0, n, size=n)
            Xi, yi = X[idx], y[idx]
        else:
            Xi, yi = X, y

        def choose() -> Sequence[int]:
            return np.sort(rng.choice(n_features, size=params.features_per_split, replace=False))

        root = _build_tree(Xi, yi, params.tree_params, 0, choose)
        trees.append(DecisionTree(root=root, params=params.tree_params))
    return RandomForest(trees=tuple(trees), params=params)


def _walk(node: SplitNode | LeafNode, x: np.ndarray) -> Label:
    while isinstance(node, SplitNode):
        node = node.left if x[node.feature_index] <= node.threshold else node.right
    return node.label


def predict(model: DecisionTree | RandomForest, x: np.ndarray) -> Label:
    """Classify one feature vector. Forests take an unweighted majority vote;
    an even vote predicts Unauthorized."""
    if isinstance(model, DecisionTree):
        return _walk(model.root, x)
    votes = sum(1 for t in model.trees if _walk(t.root, x) is Label.AUTHENTIC)
    return Label.AUTHENTIC if 2 * votes > len(model.trees) else Label.UNAUTHORIZED


def _predict_tree_batch(tree: DecisionTree, X: np.ndarray) -> np.ndarray:
    out = np.empty(len(X), dtype=np.int8)

    def descend(node, idx):
        if isinstance(node, LeafNode):
            out[idx] = 1 if node.label is Label.AUTHENTIC else 0
            return
        go_left = X[idx, node.feature_index] <= node.threshold
        descend(node.left, idx[go_left])
        descend(node.right, idx[~go_left])

    descend(tree.root, np.arange(len(X)))
    return out


def predict_batch(model: DecisionTree | RandomForest, X: np.ndarray) -> np.ndarray:
    """Vectorized prediction of many rows; returns int labels (1 = Authentic)."""
    X = np.asarray(X, dtype=np.float64)
    if isinstance(model, DecisionTree):
        return _predict_tree_batch(model, X)
    votes = np.zeros(len(X), dtype=np.int32)
    for t in model.trees:
        votes += _predict_tree_batch(t, X)
    return (2 * votes > len(model.trees)).astype(np.int8)


def evaluate(
    model: DecisionTree | RandomForest, X: np.ndarray, y: np.ndarray
) -> ConfusionMatrix:
    """Confusion matrix of the model over an encoded test set."""
    if len(y) == 0:
        raise EmptyTestSet("cannot evaluate on zero samples")
    pred = predict_batch(model, X)
    y = np.asarray(y)
    tp = int(np.sum((pred == 1) & (y == 1)))
    tn = int(np.sum((pred == 0) & (y == 0)))
    fp = int(np.sum((pred == 1) & (y == 0)))
    fn = int(np.sum((pred == 0) & (y == 1)))
    return ConfusionMatrix(tp=tp, tn=tn, fp=fp, fn=fn)


def compute_metrics(cm: ConfusionMatrix) -> MetricsReport:
    """Accuracy, sensitivity, specificity, precision, and F1 as fractions.

    A metric whose denominator is zero is reported as None (undefined); F1 is
    0 when precision and sensitivity are both defined but sum to zero.
    """
    n = cm.total
    if n == 0:
        raise EmptyMatrix("confusion matrix has zero total count")

    def ratio(num: int, den: int) -> float | None:
        return num / den if den > 0 else None

    accuracy = (cm.tp + cm.tn) / n
    sensitivity = ratio(cm.tp, cm.tp + cm.fn)
    specificity = ratio(cm.tn, cm.tn + cm.fp)
    precision = ratio(cm.tp, cm.tp + cm.fp)
    if precision is None or sensitivity is None:
        f1 = None
    elif precision + sensitivity == 0:
        f1 = 0.0
    else:
        f1 = 2.0 * precision * sensitivity / (precision + sensitivity)
    return MetricsReport(
        accuracy=accuracy,
        sensitivity=sensitivity,
        specificity=specificity,
        precision=precision,
        f1=f1,
    )


# -- model serialization ------------------------------------------------------
#
# A model file is a single JSON document: format marker, version, model kind,
# the fitted encoder, the hyperparameters, and the full tree structures. The
# document round-trips losslessly and re-serializes byte-identically.


def _node_to_doc(node: SplitNode | LeafNode) -> dict:
    if isinstance(node, LeafNode):
        return {
            "type": "leaf",
            "label": node.label.value,
            "class_counts": list(node.class_counts),
        }
    return {
        "type": "split",
        "feature_index": node.feature_index,
        "threshold": node.threshold,
        "left": _node_to_doc(node.left),
        "right": _node_to_doc(node.right),
    }


def _node_from_doc(doc: dict) -> SplitNode | LeafNode:
    if doc["type"] == "leaf":
        counts = doc["class_counts"]
        return LeafNode(label=Label(doc["label"]), class_counts=(int(counts[0]), int(counts[1])))
    return SplitNode(
        feature_index=int(doc["feature_index"]),
        threshold=float(doc["threshold"]),
        left=_node_from_doc(doc["left"]),
        right=_node_from_doc(doc["right"]),
    )


def _tree_params_doc(p: TreeParams) -> dict:
    return {
        "max_depth": p.max_depth,
        "min_samples_split": p.min_samples_split,
        "min_samples_leaf": p.min_samples_leaf,
    }


def _tree_params_from_doc(doc: dict) -> TreeParams:
    return TreeParams(
        max_depth=doc["max_depth"],
        min_samples_split=int(doc["min_samples_split"]),
        min_samples_leaf=int(doc["min_samples_leaf"]),
    )


def model_to_document(
    model: DecisionTree | RandomForest, encoder: FeatureEncoder
) -> dict:
    doc = {
        "format": MODEL_FORMAT,
        "version": MODEL_FORMAT_VERSION,
        "kind": "decision_tree" if isinstance(model, DecisionTree) else "random_forest",
        "encoder": {
            "ssid_vocabulary": dict(encoder.ssid_vocabulary),
            "frequency_scale": list(encoder.frequency_scale),
        },
    }
    if isinstance(model, DecisionTree):
        doc["params"] = _tree_params_doc(model.params)
        doc["tree"] = _node_to_doc(model.root)
    else:
        p = model.params
        doc["params"] = {
            "n_trees": p.n_trees,
            "bootstrap": p.bootstrap,
            "features_per_split": p.features_per_split,
            "seed": p.seed,
            "tree_params": _tree_params_doc(p.tree_params),
        }
        doc["trees"] = [_node_to_doc(t.root) for t in model.trees]
    return doc


def document_to_model(doc: dict) -> tuple[DecisionTree | RandomForest, FeatureEncoder]:
    if doc.get("format") != MODEL_FORMAT:
        raise ValueError(f"not a {MODEL_FORMAT} document")
    if doc.get("version") != MODEL_FORMAT_VERSION:
        raise ValueError(f"unsupported model format version {doc.get('version')!r}")
    enc = doc["encoder"]
    encoder = FeatureEncoder(
        ssid_vocabulary={str(k): int(v) for k, v in enc["ssid_vocabulary"].items()},
        frequency_scale=(float(enc["frequency_scale"][0]), float(enc["frequency_scale"][1])),
    )
    if doc["kind"] == "decision_tree":
        model: DecisionTree | RandomForest = DecisionTree(
            root=_node_from_doc(doc["tree"]),
            params=_tree_params_from_doc(doc["params"]),
        )
    elif doc["kind"] == "random_forest":
        p = doc["params"]
        params = ForestParams(
            n_trees=int(p["n_trees"]),
            bootstrap=bool(p["bootstrap"]),
            features_per_split=int(p["features_per_split"]),
            tree_params=_tree_params_from_doc(p["tree_params"]),
            seed=int(p["seed"]),
        )
        tp = params.tree_params
        trees = tuple(DecisionTree(root=_node_from_doc(d), params=tp) for d in doc["trees"])
        model = RandomForest(trees=trees, params=params)
    else:
        raise ValueError(f"unknown model kind {doc['kind']!r}")
    return model, encoder


def save_model(
    path: str | Path, model: DecisionTree | RandomForest, encoder: FeatureEncoder
) -> None:
    doc = model_to_document(model, encoder)
    Path(path).write_text(json.dumps(doc, separators=(",", ":")) + "\n", encoding="utf-8")


def load_model(path: str | Path) -> tuple[DecisionTree | RandomForest, FeatureEncoder]:
    doc = json.loads(Path(path).read_text(encoding="utf-8"))
    return document_to_model(doc)
