"""Single-hidden-layer perceptron: tanh hidden units, sigmoid output,
cross-entropy loss, full-batch gradient descent with a fixed step.

The analytic gradient is exposed through ``loss_and_gradient`` so it can be
checked against central finite differences on the flattened parameter
vector.
"""

from __future__ import annotations

import numpy as np
from numpy.random import Generator, Philox, SeedSequence

from .base import Classifier, check_training_data, sigmoid, softplus


class MultiLayerPerceptron(Classifier):
    kind = "mlp"

    def __init__(self, hidden=64, learning_rate=0.2, max_iter=300, tol=1e-8, seed=0):
        super().__init__(seed)
        self.hidden = int(hidden)
        self.learning_rate = float(learning_rate)
        self.max_iter = int(max_iter)
        self.tol = float(tol)
        self.w1_ = None
        self.b1_ = None
        self.w2_ = None
        self.b2_ = 0.0

    def init_params(self, n_features: int) -> None:
        """Glorot-uniform initialization from the model's seed."""
        rng = Generator(Philox(SeedSequence(self.seed)))
        limit1 = np.sqrt(6.0 / (n_features + self.hidden))
        limit2 = np.sqrt(6.0 / (self.hidden + 1))
        self.w1_ = rng.uniform(-limit1, limit1, size=(n_features, self.hidden))
        self.b1_ = np.zeros(self.hidden)
        self.w2_ = rng.uniform(-limit2, limit2, size=self.hidden)
        self.b2_ = 0.0
        self.n_features_ = n_features

    def get_flat_params(self) -> np.ndarray:
        return np.concatenate(
            [self.w1_.ravel(), self.b1_, self.w2_, np.array([self.b2_])]
        )

    def set_flat_params(self, flat: np.ndarray) -> None:
        d, h = self.n_features_, self.hidden
        pos = 0
        self.w1_ = flat[pos : pos + d * h].reshape(d, h).copy()
        pos += d * h
        self.b1_ = flat[pos : pos + h].copy()
        pos += h
        self.w2_ = flat[pos : pos + h].copy()
        pos += h
        self.b2_ = float(flat[pos])

    def _forward(self, X):
        hidden = np.tanh(X @ self.w1_ + self.b1_)
        logits = hidden @ self.w2_ + self.b2_
        return hidden, logits

    def loss_and_gradient(self, X, y) -> tuple[float, np.ndarray]:
        """Mean cross-entropy and its gradient w.r.t. the flat parameters."""
        X = np.asarray(X, dtype=np.float64)
        y = np.asarray(y, dtype=np.float64)
        m = X.shape[0]
        hidden, logits = self._forward(X)
        loss = float(np.mean(softplus(logits) - y * logits))
        dz = (sigmoid(logits) - y) / m
        grad_w2 = hidden.T @ dz
        grad_b2 = dz.sum()
        dpre = np.outer(dz, self.w2_) * (1.0 - hidden * hidden)
        grad_w1 = X.T @ dpre
        grad_b1 = dpre.sum(axis=0)
        grad = np.concatenate(
            [grad_w1.ravel(), grad_b1, grad_w2, np.array([grad_b2])]
        )
        return loss, grad

    def fit(self, X, y):
        X, y = check_training_data(X, y)
        self.init_params(X.shape[1])
        params = self.get_flat_params()
        prev = np.inf
        for _ in range(self.max_iter):
            loss, grad = self.loss_and_gradient(X, y)
            params -= self.learning_rate * grad
            self.set_flat_params(params)
            if abs(prev - loss) < self.tol:
                break
            prev = loss
        return self

    def score_batch(self, X):
        X = self._check_scoring_input(X)
        _, logits = self._forward(X)
        return sigmoid(logits)

    def train_config(self):
        return {
            "hidden": self.hidden,
            "learning_rate": self.learning_rate,
            "max_iter": self.max_iter,
            "tol": self.tol,
            "seed": self.seed,
        }

    def export_state(self):
        return {"b2": self.b2_}, {"w1": self.w1_, "b1": self.b1_, "w2": self.w2_}

    def import_state(self, meta, arrays):
        self.w1_ = arrays["w1"]
        self.b1_ = arrays["b1"]
        self.w2_ = arrays["w2"]
        self.b2_ = float(meta["b2"])
        self.n_features_ = self.w1_.shape[0]
