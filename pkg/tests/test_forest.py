"""Random forest: split selection, stopping rules, scoring, determinism."""

from __future__ import annotations

import numpy as np
import pytest

from iidsbench.classifiers.forest import (
    forest_from_dict,
    forest_scores,
    forest_to_dict,
    train_random_forest,
)


def hp(**overrides):
    base = {"n_trees": 100, "max_depth": 20, "min_leaf": 2}
    base.update(overrides)
    return base


def test_two_point_midpoint_split():
    x = np.array([[0.0], [1.0]])
    y = np.array([False, True])
    forest = train_random_forest(hp(n_trees=1, min_leaf=1), x, y, seed=0)
    tree = forest[0]
    # bootstrap of 2 points may draw a pure sample; find a seed with both
    seed = 0
    while len(set(np.random.default_rng((seed, 0)).integers(0, 2, 2).tolist())) == 1:
        seed += 1
    forest = train_random_forest(hp(n_trees=1, min_leaf=1), x, y, seed=seed)
    tree = forest[0]
    assert tree.feature[0] == 0
    assert tree.threshold[0] == 0.5  # midpoint of the two distinct values


def test_pure_node_is_leaf():
    x = np.array([[0.0], [1.0], [2.0]])
    y = np.array([True, True, True])
    forest = train_random_forest(hp(n_trees=3, min_leaf=1), x, y, seed=1)
    for tree in forest:
        assert tree.feature[0] == -1  # root is a leaf
        assert tree.fraction[0] == 1.0


def test_separable_sign_probe(rng):
    x = rng.normal(0, 1, size=(100, 1))
    x = x[abs(x[:, 0]) > 0.05]  # keep a margin around the boundary
    y = x[:, 0] > 0
    forest = train_random_forest(hp(n_trees=20), x, y, seed=3)
    scores = forest_scores(forest, np.array([[-1.0], [1.0]]))
    assert scores[0] < 0.5
    assert scores[1] > 0.5


def test_single_unbounded_tree_memorizes(rng):
    x = rng.normal(size=(60, 4))
    y = rng.integers(0, 2, 60).astype(bool)
    y[0], y[1] = False, True
    forest = train_random_forest(
        {"n_trees": 1, "max_depth": None, "min_leaf": 1}, x, y, seed=5
    )
    # train on the bootstrap sample; accuracy must be 1.0 on it
    boot = np.random.default_rng((5, 0)).integers(0, 60, 60)
    scores = forest_scores(forest, x[boot])
    assert ((scores >= 0.5) == y[boot]).all()


def test_max_depth_respected(rng):
    x = rng.normal(size=(200, 3))
    y = rng.integers(0, 2, 200).astype(bool)
    forest = train_random_forest(hp(n_trees=5, max_depth=2, min_leaf=1), x, y, seed=7)

    def depth(tree, node=0):
        if tree.feature[node] == -1:
            return 0
        return 1 + max(depth(tree, tree.left[node]), depth(tree, tree.right[node]))

    assert all(depth(t) <= 2 for t in forest)


def test_all_trees_vote_malicious():
    x = np.vstack([np.zeros((10, 1)), np.ones((10, 1))])
    y = np.array([False] * 10 + [True] * 10)
    forest = train_random_forest(hp(n_trees=9, min_leaf=1), x, y, seed=2)
    scores = forest_scores(forest, np.array([[1.0]]))
    assert scores[0] == 1.0


def test_deterministic(rng):
    x = rng.normal(size=(80, 3))
    y = rng.integers(0, 2, 80).astype(bool)
    y[:2] = [False, True]
    a = train_random_forest(hp(n_trees=10), x, y, seed=11)
    b = train_random_forest(hp(n_trees=10), x, y, seed=11)
    probe = rng.normal(size=(30, 3))
    assert (forest_scores(a, probe) == forest_scores(b, probe)).all()
    c = train_random_forest(hp(n_trees=10), x, y, seed=12)
    assert not (forest_scores(a, probe) == forest_scores(c, probe)).all()


def test_json_round_trip(rng):
    x = rng.normal(size=(40, 2))
    y = x[:, 0] > 0.1
    y[0] = True
    y[1] = False
    forest = train_random_forest(hp(n_trees=4), x, y, seed=4)
    again = forest_from_dict(forest_to_dict(forest))
    probe = rng.normal(size=(20, 2))
    assert (forest_scores(forest, probe) == forest_scores(again, probe)).all()
