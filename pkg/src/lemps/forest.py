"""Random-forest regression built on variance-reduction decision trees.

Trees grow greedily: every internal node takes the split with the largest
squared-error reduction over a per-node random draw of candidate features,
with thresholds placed at midpoints between consecutive distinct sorted
values. Ties resolve to the lowest feature index, then the lowest
threshold, so a given seed always yields the same forest.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

_GAIN_TINY = 1e-12


@dataclass(frozen=True)
class TreeNode:
    """Leaf (value set, children None) or internal split."""

    value: float | None = None
    feature_index: int | None = None
    threshold: float | None = None
    left: "TreeNode | None" = None
    right: "TreeNode | None" = None

    @property
    def is_leaf(self) -> bool:
        return self.left is None


@dataclass(frozen=True)
class ForestModel:
    trees: tuple
    n_trees: int
    bootstrap: bool
    seed: int
    n_features: int
    bag_indices: tuple

    def predict(self, X) -> np.ndarray:
        X = np.asarray(X, dtype=np.float64)
        if X.ndim == 1:
            X = X.reshape(1, -1)
        if X.shape[1] != self.n_features:
            raise ValueError(
                f"model was trained on {self.n_features} features, got {X.shape[1]}"
            )
        total = np.zeros(X.shape[0])
        for tree in self.trees:
            out = np.empty(X.shape[0])
            _predict_tree(tree, X, np.arange(X.shape[0]), out)
            total += out
        return total / self.n_trees


def _predict_tree(node: TreeNode, X, rows, out) -> None:
    if node.is_leaf:
        out[rows] = node.value
        return
    go_left = X[rows, node.feature_index] <= node.threshold
    _predict_tree(node.left, X, rows[go_left], out)
    _predict_tree(node.right, X, rows[~go_left], out)


def _best_split(X, y, features, min_samples_leaf):
    """Best (feature, threshold, gain) over the candidate features, or None.

    Gain is the reduction in total squared error, computed from prefix sums
    of the per-feature sorted targets; only boundaries between distinct
    feature values qualify. All candidates are scored in one vectorized
    pass; the flat argmax scans features in ascending index and thresholds
    in ascending value, which realizes the documented tie-breaking.
    """
    n = y.shape[0]
    total = float(y.sum())
    cols = X[:, features]
    order = np.argsort(cols, axis=0, kind="stable")
    vals = np.take_along_axis(cols, order, axis=0)
    mids = 0.5 * (vals[:-1] + vals[1:])
    # float midpoints must stay strictly between the neighbours they separate
    valid = (vals[:-1] < mids) & (mids < vals[1:])
    if min_samples_leaf > 1:
        n_left_int = np.arange(1, n)[:, None]
        valid &= (n_left_int >= min_samples_leaf) & (n - n_left_int >= min_samples_leaf)
    if not valid.any():
        return None
    left_sum = np.cumsum(y[order], axis=0)[:-1]
    n_left = np.arange(1, n, dtype=np.float64)[:, None]
    gains = left_sum**2 / n_left + (total - left_sum) ** 2 / (n - n_left) \
        - total * total / n
    gains = np.where(valid, gains, -np.inf)
    flat = np.ascontiguousarray(gains.T).reshape(-1)
    best_flat = int(np.argmax(flat))
    gain = float(flat[best_flat])
    if not gain > _GAIN_TINY:
        return None
    fi, pos = divmod(best_flat, n - 1)
    return gain, int(features[fi]), float(mids[pos, fi]), order[:, fi], pos


def _grow(X, y, rng, max_features, min_samples_split, min_samples_leaf) -> TreeNode:
    n, p = X.shape
    if n < min_samples_split or np.ptp(y) == 0.0:
        return TreeNode(value=float(y.mean()))
    features = np.sort(rng.permutation(p)[:max_features])
    found = _best_split(X, y, features, min_samples_leaf)
    if found is None:
        return TreeNode(value=float(y.mean()))
    _, f, threshold, order, pos = found
    left_rows = order[: pos + 1]
    right_rows = order[pos + 1:]
    left = _grow(X[left_rows], y[left_rows], rng, max_features,
                 min_samples_split, min_samples_leaf)
    right = _grow(X[right_rows], y[right_rows], rng, max_features,
                  min_samples_split, min_samples_leaf)
    return TreeNode(feature_index=int(f), threshold=threshold, left=left, right=right)


def fit_random_forest(X, y, n_trees: int = 10, max_features: int | None = None,
                      min_samples_split: int = 2, min_samples_leaf: int = 1,
                      bootstrap: bool = True, seed: int = 0) -> ForestModel:
    """Fit a forest of variance-reduction regression trees.

    Defaults mirror the reference parametrization: 10 trees, all features
    considered at every split, nodes expanded until leaves are pure or hold
    a single sample, bootstrap resampling on.
    """
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if X.ndim != 2 or X.shape[0] == 0 or X.shape[1] == 0:
        raise ValueError("X must be a nonempty 2-D matrix")
    if y.shape != (X.shape[0],):
        raise ValueError("y must be 1-D with one entry per row of X")
    n, p = X.shape
    if max_features is None:
        max_features = p
    if n_trees < 1:
        raise ValueError(f"n_trees must be >= 1, got {n_trees}")
    if not 1 <= max_features <= p:
        raise ValueError(f"max_features must lie in 1..{p}, got {max_features}")
    if min_samples_split < 2:
        raise ValueError(f"min_samples_split must be >= 2, got {min_samples_split}")
    if min_samples_leaf < 1:
        raise ValueError(f"min_samples_leaf must be >= 1, got {min_samples_leaf}")

    trees = []
    bags = []
    for child_seq in np.random.SeedSequence(seed).spawn(n_trees):
        rng = np.random.Generator(np.random.PCG64(child_seq))
        if bootstrap:
            bag = rng.integers(0, n, size=n)
        else:
            bag = np.arange(n)
        trees.append(_grow(X[bag], y[bag], rng, max_features,
                           min_samples_split, min_samples_leaf))
        bags.append(tuple(int(i) for i in bag))
    return ForestModel(trees=tuple(trees), n_trees=n_trees, bootstrap=bootstrap,
                       seed=seed, n_features=p, bag_indices=tuple(bags))
