"""Constant-positive baseline: scores 1.0 for everything. Reproduces the
degenerate predict-all-cancer behavior as an honestly labeled baseline."""

from __future__ import annotations

import numpy as np

from .base import Classifier, check_training_data


class ConstantPositive(Classifier):
    kind = "const_pos"

    def __init__(self, seed=0):
        super().__init__(seed)

    def fit(self, X, y):
        X, _ = check_training_data(X, y)
        self.n_features_ = X.shape[1]
        return self

    def score_batch(self, X):
        X = self._check_scoring_input(X)
        return np.ones(X.shape[0])

    def train_config(self):
        return {"seed": self.seed}

    def export_state(self):
        return {"n_features": self.n_features_}, {}

    def import_state(self, meta, arrays):
        self.n_features_ = int(meta["n_features"])
