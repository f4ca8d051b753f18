"""Boosted ensembles: AdaBoost over depth-1 stumps and gradient-boosted
regression trees with logistic loss.

Both models record their training loss after every round
(``loss_history_``): exponential loss for AdaBoost, mean logistic loss for
the gradient-boosted trees. Split ties break to the lowest feature index,
then the lowest threshold.
"""

from __future__ import annotations

import numpy as np

from ..errors import TrainingError
from .base import Classifier, check_training_data, sigmoid, softplus

_ERR_FLOOR = 1e-12


def _midpoint(lo: float, hi: float) -> float:
    mid = (lo + hi) / 2.0
    return lo if mid >= hi else mid


class AdaBoostStumps(Classifier):
    """SAMME with decision stumps. Scores pass the alpha-normalized vote
    margin through a sigmoid, so score >= 0.5 exactly when the weighted
    stump vote is non-negative."""

    kind = "adaboost"

    def __init__(self, n_rounds=100, seed=0):
        super().__init__(seed)
        self.n_rounds = int(n_rounds)
        self.stumps_ = None  # list of (feature, threshold, flip)
        self.alphas_ = None
        self.loss_history_ = None

    @staticmethod
    def _stump_outputs(X, feature, threshold, flip):
        raw = np.where(X[:, feature] > threshold, 1.0, -1.0)
        return -raw if flip else raw

    def fit(self, X, y):
        X, y = check_training_data(X, y)
        m, d = X.shape
        self.n_features_ = d
        t = 2.0 * y - 1.0

        order = np.argsort(X, axis=0, kind="stable")
        vs = np.take_along_axis(X, order, axis=0)
        ts = t[order]
        valid = vs[1:] != vs[:-1]

        weights = np.full(m, 1.0 / m)
        margin = np.zeros(m)
        stumps, alphas, losses = [], [], []
        for _ in range(self.n_rounds):
            ws = weights[order]
            wpos = np.cumsum(np.where(ts > 0, ws, 0.0), axis=0)
            wneg = np.cumsum(np.where(ts < 0, ws, 0.0), axis=0)
            total_pos = wpos[-1, 0]
            total_neg = wneg[-1, 0]
            # stump "right side positive": error = positives left + negatives right
            err_plus = wpos[:-1] + (total_neg - wneg[:-1])
            err_minus = (total_pos - wpos[:-1]) + wneg[:-1]
            err = np.minimum(err_plus, err_minus)
            err[~valid] = np.inf
            flat = err.T.ravel()
            k = int(np.argmin(flat))
            if not np.isfinite(flat[k]):
                break
            feature = k // (m - 1)
            pos = k % (m - 1)
            best_err = float(flat[k])
            flip = bool(err_minus[pos, feature] < err_plus[pos, feature])
            if best_err >= 0.5 - _ERR_FLOOR:
                break
            threshold = _midpoint(float(vs[pos, feature]), float(vs[pos + 1, feature]))
            clipped = min(max(best_err, _ERR_FLOOR), 1.0 - _ERR_FLOOR)
            alpha = float(np.log((1.0 - clipped) / clipped))

            outputs = self._stump_outputs(X, feature, threshold, flip)
            weights = weights * np.exp(alpha * (outputs != t))
            weights /= weights.sum()
            margin += alpha * outputs
            stumps.append((int(feature), float(threshold), flip))
            alphas.append(alpha)
            losses.append(float(np.mean(np.exp(-0.5 * t * margin))))
            if best_err <= _ERR_FLOOR:
                break
        if not stumps:
            raise TrainingError("adaboost found no usable stump")
        self.stumps_ = stumps
        self.alphas_ = np.asarray(alphas)
        self.loss_history_ = losses
        return self

    def _vote(self, X):
        total = np.zeros(X.shape[0])
        for (feature, threshold, flip), alpha in zip(self.stumps_, self.alphas_):
            total += alpha * self._stump_outputs(X, feature, threshold, flip)
        return total / self.alphas_.sum()

    def score_batch(self, X):
        X = self._check_scoring_input(X)
        return sigmoid(2.0 * self._vote(X))

    def train_config(self):
        return {"n_rounds": self.n_rounds, "seed": self.seed}

    def export_state(self):
        meta = {
            "stumps": [[f, t, bool(flip)] for f, t, flip in self.stumps_],
            "n_features": self.n_features_,
        }
        return meta, {"alphas": self.alphas_}

    def import_state(self, meta, arrays):
        self.stumps_ = [(int(f), float(t), bool(flip)) for f, t, flip in meta["stumps"]]
        self.alphas_ = arrays["alphas"]
        self.n_features_ = int(meta["n_features"])
        self.loss_history_ = None


def _best_gain_split(X, g, h, lam, min_leaf):
    """Newton-gain split search over all features; returns
    (feature, threshold, gain) or None."""
    m = X.shape[0]
    if m < 2 * min_leaf or m < 2:
        return None
    order = np.argsort(X, axis=0, kind="stable")
    vs = np.take_along_axis(X, order, axis=0)
    gl = np.cumsum(g[order], axis=0)
    hl = np.cumsum(h[order], axis=0)
    g_tot = gl[-1, 0]
    h_tot = hl[-1, 0]
    gl = gl[:-1]
    hl = hl[:-1]
    gr = g_tot - gl
    hr = h_tot - hl
    gain = gl * gl / (hl + lam) + gr * gr / (hr + lam) - g_tot * g_tot / (h_tot + lam)
    gain[vs[1:] == vs[:-1]] = -np.inf
    if min_leaf > 1:
        gain[: min_leaf - 1, :] = -np.inf
        gain[m - min_leaf :, :] = -np.inf
    flat = gain.T.ravel()
    k = int(np.argmax(flat))
    if not (flat[k] > 0):
        return None
    feature = k // (m - 1)
    pos = k % (m - 1)
    threshold = _midpoint(float(vs[pos, feature]), float(vs[pos + 1, feature]))
    return int(feature), threshold, float(flat[k])


def _grow_gain_tree(X, g, h, lam, max_depth, min_leaf, depth=0):
    if depth >= max_depth:
        split = None
    else:
        split = _best_gain_split(X, g, h, lam, min_leaf)
    if split is None:
        return {"w": float(-g.sum() / (h.sum() + lam))}
    f, t, _ = split
    mask = X[:, f] <= t
    return {
        "f": f,
        "t": t,
        "l": _grow_gain_tree(X[mask], g[mask], h[mask], lam, max_depth, min_leaf, depth + 1),
        "r": _grow_gain_tree(X[~mask], g[~mask], h[~mask], lam, max_depth, min_leaf, depth + 1),
    }


class GradientBoostedTrees(Classifier):
    """Depth-limited regression trees on the logistic-loss gradient with
    second-order leaf weights, shrinkage and L2 leaf regularization. One
    implementation stands in for the histogram-based boosting family."""

    kind = "gbt"

    def __init__(
        self,
        n_rounds=50,
        max_depth=3,
        learning_rate=0.3,
        reg_lambda=1.0,
        min_samples_leaf=1,
        seed=0,
    ):
        super().__init__(seed)
        self.n_rounds = int(n_rounds)
        self.max_depth = int(max_depth)
        self.learning_rate = float(learning_rate)
        self.reg_lambda = float(reg_lambda)
        self.min_samples_leaf = int(min_samples_leaf)
        self.trees_ = None
        self.base_score_ = 0.0
        self.loss_history_ = None

    def fit(self, X, y):
        from .tree import tree_values

        X, y = check_training_data(X, y)
        self.n_features_ = X.shape[1]
        pos = float(y.sum())
        self.base_score_ = float(np.log(pos / (y.size - pos)))
        raw = np.full(y.size, self.base_score_)
        trees, losses = [], []
        for _ in range(self.n_rounds):
            p = sigmoid(raw)
            g = p - y
            h = p * (1.0 - p)
            tree = _grow_gain_tree(
                X, g, h, self.reg_lambda, self.max_depth, self.min_samples_leaf
            )
            trees.append(tree)
            raw = raw + self.learning_rate * tree_values(tree, X, key="w")
            losses.append(float(np.mean(softplus(raw) - y * raw)))
        self.trees_ = trees
        self.loss_history_ = losses
        return self

    def _raw(self, X):
        from .tree import tree_values

        raw = np.full(X.shape[0], self.base_score_)
        for tree in self.trees_:
            raw += self.learning_rate * tree_values(tree, X, key="w")
        return raw

    def score_batch(self, X):
        X = self._check_scoring_input(X)
        return sigmoid(self._raw(X))

    def train_config(self):
        return {
            "n_rounds": self.n_rounds,
            "max_depth": self.max_depth,
            "learning_rate": self.learning_rate,
            "reg_lambda": self.reg_lambda,
            "min_samples_leaf": self.min_samples_leaf,
            "seed": self.seed,
        }

    def export_state(self):
        meta = {
            "trees": self.trees_,
            "base_score": self.base_score_,
            "n_features": self.n_features_,
        }
        return meta, {}

    def import_state(self, meta, arrays):
        self.trees_ = meta["trees"]
        self.base_score_ = float(meta["base_score"])
        self.n_features_ = int(meta["n_features"])
        self.loss_history_ = None
