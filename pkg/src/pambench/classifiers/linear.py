"""Logistic regression and linear SVM trained by full-batch gradient descent
with a fixed step and an iteration cap; training stops early when the loss
delta falls below the tolerance."""

from __future__ import annotations

import numpy as np

from .base import Classifier, check_training_data, sigmoid, softplus


class LogisticRegression(Classifier):
    kind = "lr"

    def __init__(self, learning_rate=0.5, max_iter=500, l2=0.0, tol=1e-8, seed=0):
        super().__init__(seed)
        self.learning_rate = float(learning_rate)
        self.max_iter = int(max_iter)
        self.l2 = float(l2)
        self.tol = float(tol)
        self.weights_ = None
        self.intercept_ = 0.0

    def fit(self, X, y):
        X, y = check_training_data(X, y)
        m, d = X.shape
        self.n_features_ = d
        w = np.zeros(d)
        b = 0.0
        prev = np.inf
        for _ in range(self.max_iter):
            z = X @ w + b
            loss = float(np.mean(softplus(-z) + (1.0 - y) * z))
            loss += 0.5 * self.l2 * float(w @ w)
            p = sigmoid(z)
            residual = p - y
            grad_w = X.T @ residual / m + self.l2 * w
            grad_b = float(residual.mean())
            w -= self.learning_rate * grad_w
            b -= self.learning_rate * grad_b
            if abs(prev - loss) < self.tol:
                break
            prev = loss
        self.weights_ = w
        self.intercept_ = b
        return self

    def score_batch(self, X):
        X = self._check_scoring_input(X)
        return sigmoid(X @ self.weights_ + self.intercept_)

    def train_config(self):
        return {
            "learning_rate": self.learning_rate,
            "max_iter": self.max_iter,
            "l2": self.l2,
            "tol": self.tol,
            "seed": self.seed,
        }

    def export_state(self):
        return {"intercept": self.intercept_}, {"weights": self.weights_}

    def import_state(self, meta, arrays):
        self.weights_ = arrays["weights"]
        self.intercept_ = float(meta["intercept"])
        self.n_features_ = self.weights_.size


class LinearSVM(Classifier):
    """Hinge loss with L2 regularization; scores are a fixed sigmoid of the
    signed margin (no held-out calibration fit)."""

    kind = "linear_svm"

    def __init__(self, learning_rate=0.1, max_iter=500, l2=1e-3, tol=1e-8, seed=0):
        super().__init__(seed)
        self.learning_rate = float(learning_rate)
        self.max_iter = int(max_iter)
        self.l2 = float(l2)
        self.tol = float(tol)
        self.weights_ = None
        self.intercept_ = 0.0

    def fit(self, X, y):
        X, y = check_training_data(X, y)
        m, d = X.shape
        self.n_features_ = d
        t = 2.0 * y - 1.0
        w = np.zeros(d)
        b = 0.0
        prev = np.inf
        for _ in range(self.max_iter):
            margin = t * (X @ w + b)
            hinge = np.maximum(0.0, 1.0 - margin)
            loss = float(hinge.mean()) + 0.5 * self.l2 * float(w @ w)
            active = hinge > 0
            coeff = np.where(active, -t, 0.0)
            grad_w = X.T @ coeff / m + self.l2 * w
            grad_b = float(coeff.mean())
            w -= self.learning_rate * grad_w
            b -= self.learning_rate * grad_b
            if abs(prev - loss) < self.tol:
                break
            prev = loss
        self.weights_ = w
        self.intercept_ = b
        return self

    def score_batch(self, X):
        X = self._check_scoring_input(X)
        return sigmoid(X @ self.weights_ + self.intercept_)

    def train_config(self):
        return {
            "learning_rate": self.learning_rate,
            "max_iter": self.max_iter,
            "l2": self.l2,
            "tol": self.tol,
            "seed": self.seed,
        }

    def export_state(self):
        return {"intercept": self.intercept_}, {"weights": self.weights_}

    def import_state(self, meta, arrays):
        self.weights_ = arrays["weights"]
        self.intercept_ = float(meta["intercept"])
        self.n_features_ = self.weights_.size
