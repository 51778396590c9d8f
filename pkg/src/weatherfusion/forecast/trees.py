"""Variance-reduction regression trees and their bootstrap ensemble."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

BAGGING_TREES = 10
MIN_LEAF = 2


@dataclass
class TreeNode:
    value: float
    feature: int | None = None
    threshold: float | None = None
    left: "TreeNode | None" = None
    right: "TreeNode | None" = None

    @property
    def is_leaf(self) -> bool:
        return self.feature is None

    def predict_one(self, x: np.ndarray) -> float:
        node = self
        while not node.is_leaf:
            node = node.left if x[node.feature] <= node.threshold else node.right
        return node.value

    def predict(self, X: np.ndarray) -> np.ndarray:
        return np.asarray([self.predict_one(row) for row in X])


def _best_split(X: np.ndarray, y: np.ndarray, min_leaf: int, order: np.ndarray):
    """(feature, threshold) with the largest SSE reduction, or None.

    Both children must keep at least min_leaf rows. Features are scanned in
    the given order and strict improvement wins, so the order is the only
    tie-break.
    """
    n = y.shape[0]
    parent_sse = float(np.sum((y - y.mean()) ** 2))
    best = None
    best_gain = 1e-12  # require a real reduction
    for feature in order:
        col = X[:, feature]
        sort_idx = np.argsort(col, kind="stable")
        cs = col[sort_idx]
        ys = y[sort_idx]
        csum = np.cumsum(ys)
        csum_sq = np.cumsum(ys**2)
        total, total_sq = csum[-1], csum_sq[-1]
        for k in range(min_leaf, n - min_leaf + 1):
            if cs[k - 1] == cs[k]:
                continue
            left_sse = csum_sq[k - 1] - csum[k - 1] ** 2 / k
            right_sum = total - csum[k - 1]
            right_sse = (total_sq - csum_sq[k - 1]) - right_sum**2 / (n - k)
            gain = parent_sse - (left_sse + right_sse)
            if gain > best_gain:
                best_gain = gain
                best = (int(feature), float((cs[k - 1] + cs[k]) / 2.0))
    return best


def fit_regression_tree(
    X: np.ndarray,
    y: np.ndarray,
    min_leaf: int = MIN_LEAF,
    rng: np.random.Generator | None = None,
) -> TreeNode:
    """Grow a binary CART tree with axis-aligned splits and mean leaves.

    Splitting stops when a node has fewer than 2*min_leaf rows, zero target
    variance, or no split reduces the SSE. When an rng is supplied it only
    permutes the feature scan order (the tie-break); growth is otherwise
    deterministic.
    """
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float)
    order = np.arange(X.shape[1])
    if rng is not None:
        order = rng.permutation(order)
    return _grow(X, y, min_leaf, order)


def _grow(X: np.ndarray, y: np.ndarray, min_leaf: int, order: np.ndarray) -> TreeNode:
    node = TreeNode(value=float(y.mean()))
    n = y.shape[0]
    if n < 2 * min_leaf or np.all(y == y[0]):
        return node
    split = _best_split(X, y, min_leaf, order)
    if split is None:
        return node
    feature, threshold = split
    mask = X[:, feature] <= threshold
    node.feature = feature
    node.threshold = threshold
    node.left = _grow(X[mask], y[mask], min_leaf, order)
    node.right = _grow(X[~mask], y[~mask], min_leaf, order)
    return node


@dataclass
class BaggedTrees:
    """Bootstrap-aggregated regression trees; the prediction is the tree mean.

    Per-tree rngs are spawned from the seed, so fitting order cannot change
    the result and B=1 without bootstrap degenerates to a single tree.
    """

    n_trees: int = BAGGING_TREES
    min_leaf: int = MIN_LEAF
    bootstrap: bool = True
    trees: list[TreeNode] | None = None

    def fit(self, X: np.ndarray, y: np.ndarray, seed: int = 0) -> "BaggedTrees":
        X = np.asarray(X, dtype=float)
        y = np.asarray(y, dtype=float)
        n = y.shape[0]
        streams = np.random.SeedSequence(seed).spawn(self.n_trees)
        self.trees = []
        for stream in streams:
            rng = np.random.default_rng(stream)
            if self.bootstrap:
                idx = rng.integers(0, n, size=n)
            else:
                idx = np.arange(n)
            self.trees.append(fit_regression_tree(X[idx], y[idx], self.min_leaf, rng))
        return self

    def predict(self, X: np.ndarray) -> np.ndarray:
        X = np.asarray(X, dtype=float)
        preds = np.vstack([tree.predict(X) for tree in self.trees])
        return preds.mean(axis=0)
