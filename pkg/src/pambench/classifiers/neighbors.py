"""k-nearest-neighbors with deterministic tie handling."""

from __future__ import annotations

import numpy as np

from .base import Classifier, check_training_data


class KNearestNeighbors(Classifier):
    """Score is the fraction of positive labels among the k nearest training
    points (Euclidean). Distance ties resolve to the lowest training index,
    so scoring is fully deterministic."""

    kind = "knn"

    def __init__(self, k=2, chunk_size=256, seed=0):
        super().__init__(seed)
        if k < 1:
            raise ValueError("k must be >= 1")
        self.k = int(k)
        self.chunk_size = int(chunk_size)
        self.ref_x_ = None
        self.ref_y_ = None

    def fit(self, X, y):
        X, y = check_training_data(X, y)
        if X.shape[0] < self.k:
            raise ValueError(f"need at least k={self.k} training points")
        self.n_features_ = X.shape[1]
        self.ref_x_ = X
        self.ref_y_ = y
        self._ref_sq = np.einsum("ij,ij->i", X, X)
        return self

    def score_batch(self, X):
        X = self._check_scoring_input(X)
        scores = np.empty(X.shape[0])
        for start in range(0, X.shape[0], self.chunk_size):
            block = X[start : start + self.chunk_size]
            d2 = (
                np.einsum("ij,ij->i", block, block)[:, None]
                + self._ref_sq[None, :]
                - 2.0 * block @ self.ref_x_.T
            )
            # stable sort keeps ascending training index on distance ties
            nearest = np.argsort(d2, axis=1, kind="stable")[:, : self.k]
            scores[start : start + block.shape[0]] = self.ref_y_[nearest].mean(axis=1)
        return scores

    def train_config(self):
        return {"k": self.k, "chunk_size": self.chunk_size, "seed": self.seed}

    def export_state(self):
        return {}, {"ref_x": self.ref_x_, "ref_y": self.ref_y_}

    def import_state(self, meta, arrays):
        self.ref_x_ = np.ascontiguousarray(arrays["ref_x"], dtype=np.float64)
        self.ref_y_ = np.asarray(arrays["ref_y"], dtype=np.float64)
        self.n_features_ = self.ref_x_.shape[1]
        self._ref_sq = np.einsum("ij,ij->i", self.ref_x_, self.ref_x_)
