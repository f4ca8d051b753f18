"""Gaussian generative classifiers: naive Bayes, LDA and QDA.

Scores are true posterior probabilities of the positive class, computed
from class log-likelihood differences through a stable sigmoid. Population
(divide-by-M) covariance estimates are used throughout; near-singular
covariances get lam * I added with lam = 1e-6 * trace(Sigma) / n_features,
escalating tenfold until the Cholesky factorization succeeds.
"""

from __future__ import annotations

import math

import numpy as np

from ..errors import TrainingError
from .base import Classifier, check_training_data, sigmoid

_LOG_2PI = math.log(2.0 * math.pi)


def _regularize_spd(cov: np.ndarray) -> np.ndarray:
    """Return a positive-definite version of a symmetric covariance."""
    d = cov.shape[0]
    lam = 1e-6 * float(np.trace(cov)) / d
    if lam <= 0:
        lam = 1e-12
    attempt = cov
    for _ in range(30):
        try:
            np.linalg.cholesky(attempt)
            return attempt
        except np.linalg.LinAlgError:
            attempt = attempt + lam * np.eye(d)
            lam *= 10.0
    raise TrainingError("covariance cannot be regularized to positive definite")


def _gaussian_loglik(X: np.ndarray, mean: np.ndarray, cov: np.ndarray) -> np.ndarray:
    diff = X - mean
    solved = np.linalg.solve(cov, diff.T).T
    quad = np.einsum("ij,ij->i", diff, solved)
    _, logdet = np.linalg.slogdet(cov)
    return -0.5 * (quad + logdet + X.shape[1] * _LOG_2PI)


class GaussianNaiveBayes(Classifier):
    kind = "nb"

    def __init__(self, var_smoothing=1e-9, seed=0):
        super().__init__(seed)
        self.var_smoothing = float(var_smoothing)

    def fit(self, X, y):
        X, y = check_training_data(X, y)
        self.n_features_ = X.shape[1]
        self.means_ = np.stack([X[y == c].mean(axis=0) for c in (0.0, 1.0)])
        variances = np.stack([X[y == c].var(axis=0) for c in (0.0, 1.0)])
        floor = self.var_smoothing * max(float(variances.max()), 1e-3)
        self.variances_ = variances + floor
        self.log_priors_ = np.log(
            np.array([np.mean(y == 0.0), np.mean(y == 1.0)])
        )
        return self

    def _loglik(self, X, c):
        diff = X - self.means_[c]
        var = self.variances_[c]
        return -0.5 * np.sum(np.log(2.0 * np.pi * var) + diff * diff / var, axis=1)

    def score_batch(self, X):
        X = self._check_scoring_input(X)
        ll0 = self._loglik(X, 0) + self.log_priors_[0]
        ll1 = self._loglik(X, 1) + self.log_priors_[1]
        return sigmoid(ll1 - ll0)

    def train_config(self):
        return {"var_smoothing": self.var_smoothing, "seed": self.seed}

    def export_state(self):
        return {}, {
            "means": self.means_,
            "variances": self.variances_,
            "log_priors": self.log_priors_,
        }

    def import_state(self, meta, arrays):
        self.means_ = arrays["means"]
        self.variances_ = arrays["variances"]
        self.log_priors_ = arrays["log_priors"]
        self.n_features_ = self.means_.shape[1]


class LinearDiscriminant(Classifier):
    """Shared-covariance Gaussian classifier; the decision boundary normal
    is the Fisher direction Sigma^-1 (mu1 - mu0)."""

    kind = "lda"

    def __init__(self, seed=0):
        super().__init__(seed)

    def fit(self, X, y):
        X, y = check_training_data(X, y)
        m, d = X.shape
        self.n_features_ = d
        mu0 = X[y == 0.0].mean(axis=0)
        mu1 = X[y == 1.0].mean(axis=0)
        pooled = np.zeros((d, d))
        for c, mu in ((0.0, mu0), (1.0, mu1)):
            diff = X[y == c] - mu
            pooled += diff.T @ diff
        pooled /= m
        pooled = _regularize_spd(pooled)
        w = np.linalg.solve(pooled, mu1 - mu0)
        prior1 = float(np.mean(y == 1.0))
        b = -0.5 * float((mu1 + mu0) @ w) + math.log(prior1 / (1.0 - prior1))
        self.direction_ = w
        self.intercept_ = b
        return self

    def score_batch(self, X):
        X = self._check_scoring_input(X)
        return sigmoid(X @ self.direction_ + self.intercept_)

    def train_config(self):
        return {"seed": self.seed}

    def export_state(self):
        return {"intercept": self.intercept_}, {"direction": self.direction_}

    def import_state(self, meta, arrays):
        self.direction_ = arrays["direction"]
        self.intercept_ = float(meta["intercept"])
        self.n_features_ = self.direction_.size


class QuadraticDiscriminant(Classifier):
    kind = "qda"

    def __init__(self, seed=0):
        super().__init__(seed)

    def fit(self, X, y):
        X, y = check_training_data(X, y)
        self.n_features_ = X.shape[1]
        self.means_ = []
        self.covs_ = []
        self.log_priors_ = []
        for c in (0.0, 1.0):
            block = X[y == c]
            mu = block.mean(axis=0)
            diff = block - mu
            cov = diff.T @ diff / block.shape[0]
            self.means_.append(mu)
            self.covs_.append(_regularize_spd(cov))
            self.log_priors_.append(math.log(block.shape[0] / X.shape[0]))
        return self

    def score_batch(self, X):
        X = self._check_scoring_input(X)
        ll0 = _gaussian_loglik(X, self.means_[0], self.covs_[0]) + self.log_priors_[0]
        ll1 = _gaussian_loglik(X, self.means_[1], self.covs_[1]) + self.log_priors_[1]
        return sigmoid(ll1 - ll0)

    def train_config(self):
        return {"seed": self.seed}

    def export_state(self):
        return {"log_priors": list(self.log_priors_)}, {
            "mean0": self.means_[0],
            "mean1": self.means_[1],
            "cov0": self.covs_[0],
            "cov1": self.covs_[1],
        }

    def import_state(self, meta, arrays):
        self.means_ = [arrays["mean0"], arrays["mean1"]]
        self.covs_ = [arrays["cov0"], arrays["cov1"]]
        self.log_priors_ = [float(v) for v in meta["log_priors"]]
        self.n_features_ = self.means_[0].size
