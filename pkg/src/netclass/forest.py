"""CART decision trees and a bagged random forest, trained without sklearn.

Determinism contract: tree t of a forest draws its bootstrap sample from
derive_seed(master, 2t) and its split-candidate subsets from
derive_seed(master, 2t+1), so any scheduling of tree construction yields the
same model.  All ties (equal Gini gain, equal votes) break toward the lowest
feature index / threshold / class index.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .data import Dataset, StandardizeParams, apply_standardize, fit_standardize
from .seeding import derive_seed, make_rng

MODEL_FORMAT = "netclass-forest"
MODEL_VERSION = 1


class ModelFormatError(ValueError):
    """Raised when a serialized model cannot be understood."""


@dataclass
class Leaf:
    counts: tuple[int, ...]


@dataclass
class Node:
    feature: int
    threshold: float
    left: "Node | Leaf | None" = None
    right: "Node | Leaf | None" = None


@dataclass(frozen=True)
class ForestParams:
    """Training hyperparameters.

    features_per_split=None means round(sqrt(n_features)).  log_flags is the
    per-column log-transform layout handed to standardization (None = plain
    z-score).
    """

    trees: int = 100
    features_per_split: "int | None" = None
    min_split: int = 2
    log_flags: "tuple[bool, ...] | None" = None

    def validate(self, n_features: int) -> None:
        if self.trees < 1:
            raise ValueError("need at least one tree")
        if self.min_split < 2:
            raise ValueError("min_split must be at least 2")
        fps = self.resolved_features_per_split(n_features)
        if not 1 <= fps <= n_features:
            raise ValueError(
                f"features_per_split {fps} outside 1..{n_features}"
            )
        if self.log_flags is not None and len(self.log_flags) != n_features:
            raise ValueError("log_flags length does not match feature count")

    def resolved_features_per_split(self, n_features: int) -> int:
        if self.features_per_split is not None:
            return self.features_per_split
        return max(1, int(round(np.sqrt(n_features))))


@dataclass(frozen=True)
class DecisionTree:
    root: "Node | Leaf"
    n_classes: int

    def predict_counts(self, x: np.ndarray) -> tuple[int, ...]:
        node = self.root
        while isinstance(node, Node):
            node = node.left if x[node.feature] <= node.threshold else node.right
        return node.counts

    def predict(self, x: np.ndarray) -> int:
        return int(np.argmax(self.predict_counts(x)))


@dataclass(frozen=True)
class Forest:
    trees: tuple[DecisionTree, ...]
    params: ForestParams
    standardize: StandardizeParams
    label_names: tuple[str, ...]
    tree_seeds: tuple[int, ...] = field(default_factory=tuple)


def _gini_gain(sv, sy, n_classes, parent_counts, parent_gini):
    """Best (gain, threshold) for one sorted feature column, or None."""
    n = len(sv)
    cut = np.nonzero(sv[:-1] != sv[1:])[0]
    if len(cut) == 0:
        return None
    onehot = sy[:, None] == np.arange(n_classes)[None, :]
    prefix = np.cumsum(onehot, axis=0)
    left = prefix[cut].astype(np.float64)
    right = parent_counts[None, :] - left
    n_left = (cut + 1).astype(np.float64)
    n_right = n - n_left
    gini_left = 1.0 - ((left / n_left[:, None]) ** 2).sum(axis=1)
    gini_right = 1.0 - ((right / n_right[:, None]) ** 2).sum(axis=1)
    gain = parent_gini - (n_left / n) * gini_left - (n_right / n) * gini_right
    best = int(np.argmax(gain))
    threshold = (sv[cut[best]] + sv[cut[best] + 1]) / 2.0
    return float(gain[best]), float(threshold)


def train_tree(
    matrix: np.ndarray,
    labels: np.ndarray,
    features_per_split: int,
    min_split: int,
    seed: int,
    n_classes: "int | None" = None,
) -> DecisionTree:
    """Grow one CART tree with Gini impurity and midpoint thresholds.

    A node becomes a leaf when it is pure, holds fewer than min_split
    samples, or no candidate split has strictly positive gain.  Each node
    examines its own random subset of feature columns.
    """
    x = np.asarray(matrix, dtype=np.float64)
    y = np.asarray(labels, dtype=np.int64)
    if x.ndim != 2 or x.shape[0] < 1 or x.shape[0] != y.shape[0]:
        raise ValueError("matrix and labels disagree or are empty")
    if n_classes is None:
        n_classes = int(y.max()) + 1
    n_features = x.shape[1]
    if not 1 <= features_per_split <= n_features:
        raise ValueError("features_per_split outside 1..n_features")
    rng = make_rng(seed)

    def grow(idx: np.ndarray) -> "Node | Leaf":
        counts = np.bincount(y[idx], minlength=n_classes)
        total = len(idx)
        parent_gini = 1.0 - ((counts / total) ** 2).sum()
        leaf = Leaf(tuple(int(c) for c in counts))
        if total < min_split or (counts > 0).sum() <= 1:
            return leaf
        feats = np.sort(rng.choice(n_features, size=features_per_split, replace=False))
        best = None
        for f in feats:
            col = x[idx, f]
            order = np.argsort(col, kind="stable")
            found = _gini_gain(col[order], y[idx][order], n_classes, counts, parent_gini)
            if found is None:
                continue
            gain, threshold = found
            if gain > 0.0 and (best is None or gain > best[0]):
                best = (gain, int(f), threshold)
        if best is None:
            return leaf
        _, f, threshold = best
        mask = x[idx, f] <= threshold
        node = Node(f, threshold)
        node.left = grow(idx[mask])
        node.right = grow(idx[~mask])
        return node

    # Worst-case tree depth is the sample count, which can exceed the default
    # interpreter stack budget on degenerate data.
    import sys

    limit = sys.getrecursionlimit()
    needed = x.shape[0] + 100
    if needed > limit:
        sys.setrecursionlimit(needed)
    try:
        root = grow(np.arange(x.shape[0]))
    finally:
        if needed > limit:
            sys.setrecursionlimit(limit)
    return DecisionTree(root, n_classes)


def forest_train(dataset: Dataset, params: ForestParams, master_seed: int) -> Forest:
    """Train a bagged forest; standardization is fitted on this data only."""
    if dataset.n_rows < 1:
        raise ValueError("cannot train on an empty dataset")
    n_features = dataset.matrix.shape[1]
    params.validate(n_features)
    std_params = fit_standardize(dataset.matrix, params.log_flags)
    xs = apply_standardize(std_params, dataset.matrix)
    y = dataset.labels
    n = dataset.n_rows
    fps = params.resolved_features_per_split(n_features)
    trees = []
    tree_seeds = []
    for t in range(params.trees):
        boot_seed = derive_seed(master_seed, 2 * t)
        split_seed = derive_seed(master_seed, 2 * t + 1)
        idx = make_rng(boot_seed).integers(0, n, size=n)
        trees.append(
            train_tree(xs[idx], y[idx], fps, params.min_split, split_seed,
                       n_classes=dataset.n_classes)
        )
        tree_seeds.append(boot_seed)
    return Forest(tuple(trees), params, std_params, dataset.label_names,
                  tuple(tree_seeds))


def forest_predict(forest: Forest, x: np.ndarray) -> tuple[int, np.ndarray]:
    """Majority vote over trees on one raw (unstandardized) feature vector.

    Returns (label index, per-class vote counts); vote ties go to the lowest
    class index.
    """
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 1 or x.shape[0] != len(forest.standardize.means):
        raise ValueError(
            f"expected a vector of {len(forest.standardize.means)} features"
        )
    xs = apply_standardize(forest.standardize, x)
    votes = np.zeros(len(forest.label_names), dtype=np.int64)
    for tree in forest.trees:
        votes[tree.predict(xs)] += 1
    return int(np.argmax(votes)), votes


def _node_to_dict(node: "Node | Leaf") -> dict:
    if isinstance(node, Leaf):
        return {"counts": list(node.counts)}
    return {
        "feature": node.feature,
        "threshold": node.threshold,
        "left": _node_to_dict(node.left),
        "right": _node_to_dict(node.right),
    }


def _node_from_dict(data: dict) -> "Node | Leaf":
    if "counts" in data:
        return Leaf(tuple(int(c) for c in data["counts"]))
    try:
        return Node(
            int(data["feature"]),
            float(data["threshold"]),
            _node_from_dict(data["left"]),
            _node_from_dict(data["right"]),
        )
    except KeyError as exc:
        raise ModelFormatError(f"tree node missing key {exc}") from None


def forest_to_json(forest: Forest) -> str:
    """Serialize to a versioned, key-sorted JSON document."""
    payload = {
        "format": MODEL_FORMAT,
        "version": MODEL_VERSION,
        "label_names": list(forest.label_names),
        "params": {
            "trees": forest.params.trees,
            "features_per_split": forest.params.features_per_split,
            "min_split": forest.params.min_split,
            "log_flags": (
                list(forest.params.log_flags)
                if forest.params.log_flags is not None else None
            ),
        },
        "standardize": {
            "log_flags": list(forest.standardize.log_flags),
            "means": list(forest.standardize.means),
            "stds": list(forest.standardize.stds),
        },
        "tree_seeds": list(forest.tree_seeds),
        "trees": [
            {"n_classes": t.n_classes, "root": _node_to_dict(t.root)}
            for t in forest.trees
        ],
    }
    return json.dumps(payload, sort_keys=True, separators=(",", ":"))


def forest_from_json(text: str) -> Forest:
    """Parse a model document, rejecting unknown formats and versions."""
    try:
        payload = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ModelFormatError(f"not valid JSON: {exc}") from None
    if not isinstance(payload, dict) or payload.get("format") != MODEL_FORMAT:
        raise ModelFormatError("not a netclass-forest model file")
    if payload.get("version") != MODEL_VERSION:
        raise ModelFormatError(
            f"unsupported model version {payload.get('version')!r}"
        )
    try:
        raw_params = payload["params"]
        params = ForestParams(
            trees=int(raw_params["trees"]),
            features_per_split=(
                None if raw_params["features_per_split"] is None
                else int(raw_params["features_per_split"])
            ),
            min_split=int(raw_params["min_split"]),
            log_flags=(
                None if raw_params["log_flags"] is None
                else tuple(bool(b) for b in raw_params["log_flags"])
            ),
        )
        std = payload["standardize"]
        standardize = StandardizeParams(
            tuple(bool(b) for b in std["log_flags"]),
            tuple(float(v) for v in std["means"]),
            tuple(float(v) for v in std["stds"]),
        )
        trees = tuple(
            DecisionTree(_node_from_dict(t["root"]), int(t["n_classes"]))
            for t in payload["trees"]
        )
        label_names = tuple(str(s) for s in payload["label_names"])
        tree_seeds = tuple(int(s) for s in payload["tree_seeds"])
    except (KeyError, TypeError) as exc:
        raise ModelFormatError(f"malformed model document: {exc}") from None
    return Forest(trees, params, standardize, label_names, tree_seeds)
