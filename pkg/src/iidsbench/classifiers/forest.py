"""CART-style random forest grown on bootstrap samples.

Each node draws sqrt(F) candidate features without replacement and takes
the (feature, threshold) pair minimizing weighted Gini impurity, with
thresholds at midpoints between consecutive distinct sorted values. Ties
keep the earliest candidate in draw order, so training is deterministic
given the seed. Leaves store the malicious fraction of their samples; a
tree votes malicious when the reached leaf's fraction is >= 0.5, and the
forest score is the fraction of trees voting malicious.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .base import sqrt_feature_count


@dataclass(eq=False)
class DecisionTree:
    feature: np.ndarray  # split feature per node; -1 marks a leaf
    threshold: np.ndarray
    left: np.ndarray
    right: np.ndarray
    fraction: np.ndarray  # malicious fraction of the node's training rows


def _best_split(X, y, idx, rng, m_try, min_leaf):
    feats = rng.choice(X.shape[1], size=m_try, replace=False)
    n = len(idx)
    yv = y[idx].astype(np.float64)
    best = None  # (cost, feature, threshold)
    for f in feats:
        vals = X[idx, f]
        order = np.argsort(vals, kind="stable")
        sv = vals[order]
        sy = yv[order]
        boundaries = np.flatnonzero(sv[:-1] < sv[1:])
        if boundaries.size == 0:
            continue
        n_left = boundaries + 1
        keep = (n_left >= min_leaf) & ((n - n_left) >= min_leaf)
        if not keep.any():
            continue
        boundaries = boundaries[keep]
        cum_pos = np.cumsum(sy)
        n_l = (boundaries + 1).astype(np.float64)
        pos_l = cum_pos[boundaries]
        n_r = n - n_l
        pos_r = cum_pos[-1] - pos_l
        p_l = pos_l / n_l
        p_r = pos_r / n_r
        cost = (n_l * 2 * p_l * (1 - p_l) + n_r * 2 * p_r * (1 - p_r)) / n
        j = int(np.argmin(cost))
        if best is None or cost[j] < best[0]:
            thr = (sv[boundaries[j]] + sv[boundaries[j] + 1]) / 2.0
            best = (float(cost[j]), int(f), float(thr))
    if best is None:
        return None
    return best[1], best[2]


def _grow_tree(X, y, rng, max_depth, min_leaf, m_try) -> DecisionTree:
    feature: list[int] = []
    threshold: list[float] = []
    left: list[int] = []
    right: list[int] = []
    fraction: list[float] = []

    def add_node() -> int:
        feature.append(-1)
        threshold.append(0.0)
        left.append(-1)
        right.append(-1)
        fraction.append(0.0)
        return len(feature) - 1

    root = add_node()
    stack = [(np.arange(len(y)), 0, root)]
    while stack:
        idx, depth, slot = stack.pop()
        pos = int(y[idx].sum())
        fraction[slot] = pos / len(idx)
        if pos == 0 or pos == len(idx):
            continue
        if max_depth is not None and depth >= max_depth:
            continue
        if len(idx) < 2 * min_leaf:
            continue
        split = _best_split(X, y, idx, rng, m_try, min_leaf)
        if split is None:
            continue
        f, thr = split
        goes_left = X[idx, f] <= thr
        feature[slot] = f
        threshold[slot] = thr
        left[slot] = add_node()
        right[slot] = add_node()
        stack.append((idx[goes_left], depth + 1, left[slot]))
        stack.append((idx[~goes_left], depth + 1, right[slot]))

    return DecisionTree(
        feature=np.asarray(feature, dtype=np.int64),
        threshold=np.asarray(threshold, dtype=np.float64),
        left=np.asarray(left, dtype=np.int64),
        right=np.asarray(right, dtype=np.int64),
        fraction=np.asarray(fraction, dtype=np.float64),
    )


def train_random_forest(hyperparameters: dict, X, y, seed: int) -> list[DecisionTree]:
    """Grow n_trees trees, each on a bootstrap resample (same size as the
    train set, drawn with replacement). Tree i trains under its own RNG
    derived from (seed, i), so tree-level work could be parallelized without
    changing the result.
    """
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=bool)
    n = len(y)
    m_try = sqrt_feature_count(X.shape[1])
    trees = []
    for i in range(hyperparameters["n_trees"]):
        rng = np.random.default_rng((seed, i))
        boot = rng.integers(0, n, size=n)
        trees.append(
            _grow_tree(
                X[boot],
                y[boot],
                rng,
                hyperparameters["max_depth"],
                hyperparameters["min_leaf"],
                m_try,
            )
        )
    return trees


def tree_leaf_fractions(tree: DecisionTree, X: np.ndarray) -> np.ndarray:
    node = np.zeros(len(X), dtype=np.int64)
    active = np.flatnonzero(tree.feature[node] >= 0)
    while active.size:
        current = node[active]
        values = X[active, tree.feature[current]]
        node[active] = np.where(
            values <= tree.threshold[current], tree.left[current], tree.right[current]
        )
        active = active[tree.feature[node[active]] >= 0]
    return tree.fraction[node]


def forest_scores(trees: list[DecisionTree], X) -> np.ndarray:
    X = np.asarray(X, dtype=np.float64)
    votes = np.zeros(len(X), dtype=np.float64)
    for tree in trees:
        votes += tree_leaf_fractions(tree, X) >= 0.5
    return votes / len(trees)


def forest_to_dict(trees: list[DecisionTree]) -> dict:
    return {
        "trees": [
            {
                "feature": t.feature.tolist(),
                "threshold": t.threshold.tolist(),
                "left": t.left.tolist(),
                "right": t.right.tolist(),
                "fraction": t.fraction.tolist(),
            }
            for t in trees
        ]
    }


def forest_from_dict(data: dict) -> list[DecisionTree]:
    return [
        DecisionTree(
            feature=np.asarray(t["feature"], dtype=np.int64),
            threshold=np.asarray(t["threshold"], dtype=np.float64),
            left=np.asarray(t["left"], dtype=np.int64),
            right=np.asarray(t["right"], dtype=np.int64),
            fraction=np.asarray(t["fraction"], dtype=np.float64),
        )
        for t in data["trees"]
    ]
