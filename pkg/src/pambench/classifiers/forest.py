"""Random forest: bootstrap resampling plus sqrt(N) feature subsampling at
every node, one Philox substream per tree."""

from __future__ import annotations

import math

import numpy as np
from numpy.random import Generator, Philox, SeedSequence

from .base import Classifier, check_training_data
from .tree import grow_tree, tree_values


class RandomForest(Classifier):
    kind = "forest"

    def __init__(
        self,
        n_trees=30,
        max_depth=12,
        min_samples_split=2,
        min_samples_leaf=1,
        seed=0,
    ):
        super().__init__(seed)
        self.n_trees = int(n_trees)
        self.max_depth = int(max_depth)
        self.min_samples_split = int(min_samples_split)
        self.min_samples_leaf = int(min_samples_leaf)
        self.trees_ = None

    def fit(self, X, y):
        X, y = check_training_data(X, y)
        m, d = X.shape
        self.n_features_ = d
        n_sub = max(1, int(math.isqrt(d)))
        trees = []
        for t in range(self.n_trees):
            rng = Generator(Philox(SeedSequence(self.seed, spawn_key=(t,))))
            idx = rng.integers(0, m, size=m)
            trees.append(
                grow_tree(
                    X[idx],
                    y[idx],
                    self.max_depth,
                    self.min_samples_split,
                    self.min_samples_leaf,
                    rng=rng,
                    n_sub=n_sub,
                )
            )
        self.trees_ = trees
        return self

    def score_batch(self, X):
        X = self._check_scoring_input(X)
        total = np.zeros(X.shape[0])
        for tree in self.trees_:
            total += tree_values(tree, X)
        return total / len(self.trees_)

    def train_config(self):
        return {
            "n_trees": self.n_trees,
            "max_depth": self.max_depth,
            "min_samples_split": self.min_samples_split,
            "min_samples_leaf": self.min_samples_leaf,
            "seed": self.seed,
        }

    def export_state(self):
        return {"trees": self.trees_, "n_features": self.n_features_}, {}

    def import_state(self, meta, arrays):
        self.trees_ = meta["trees"]
        self.n_features_ = int(meta["n_features"])
