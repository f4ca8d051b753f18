"""Shared classifier plumbing: validation, stable sigmoid, base interface."""

from __future__ import annotations

import numpy as np

from ..errors import InvalidInputError, TrainingError


def sigmoid(z: np.ndarray) -> np.ndarray:
    """Numerically stable logistic function."""
    z = np.asarray(z, dtype=np.float64)
    out = np.empty_like(z)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


def softplus(z: np.ndarray) -> np.ndarray:
    """log(1 + exp(z)) without overflow."""
    return np.logaddexp(0.0, z)


def check_training_data(X, y) -> tuple[np.ndarray, np.ndarray]:
    X = np.ascontiguousarray(X, dtype=np.float64)
    y = np.asarray(y)
    if X.ndim != 2 or X.shape[0] < 2:
        raise TrainingError("training data must be an (M, N) matrix with M >= 2")
    if y.shape != (X.shape[0],):
        raise TrainingError("labels must be a length-M vector")
    if not np.isfinite(X).all():
        raise TrainingError("training features must be finite")
    if not np.isin(y, (0, 1)).all():
        raise TrainingError("labels must be 0 or 1")
    y = y.astype(np.float64)
    if y.min() == y.max():
        raise TrainingError("training data holds a single class")
    return X, y


class Classifier:
    """Train/score interface every model implements.

    ``fit`` is deterministic given (data, hyperparameters, seed) and
    ``score_batch`` maps an (M, N) matrix to scores in [0, 1], higher
    meaning more cancer-like. Fitted models are immutable and safe to share
    across threads.
    """

    kind = "?"

    def __init__(self, seed: int = 0):
        self.seed = int(seed)
        self.n_features_ = None

    def fit(self, X, y) -> "Classifier":
        raise NotImplementedError

    def score_batch(self, X: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def _check_scoring_input(self, X) -> np.ndarray:
        X = np.ascontiguousarray(X, dtype=np.float64)
        single = X.ndim == 1
        if single:
            X = X[None, :]
        if X.ndim != 2:
            raise InvalidInputError("expected a feature vector or matrix")
        if self.n_features_ is None:
            raise InvalidInputError(f"{self.kind} model is not fitted")
        if X.shape[1] != self.n_features_:
            raise InvalidInputError(
                f"expected {self.n_features_} features, got {X.shape[1]}"
            )
        return X

    # hyperparameters that reproduce this model, seed included
    def train_config(self) -> dict:
        raise NotImplementedError

    # (json-able metadata, arrays) for serialization
    def export_state(self) -> tuple[dict, dict]:
        raise NotImplementedError

    def import_state(self, meta: dict, arrays: dict) -> None:
        raise NotImplementedError
