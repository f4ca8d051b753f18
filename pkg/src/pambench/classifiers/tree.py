"""CART decision tree with Gini impurity and midpoint thresholds.

Split ties are broken deterministically: lowest feature index first, then
lowest threshold. Trees are plain nested dicts (json-able), with leaves
holding the positive-class fraction of their training points.
"""

from __future__ import annotations

import numpy as np

from .base import Classifier, check_training_data


def best_gini_split(X, y, feature_ids=None, min_leaf=1):
    """Best (feature, threshold) under weighted Gini, or None.

    ``feature_ids`` restricts the search to a sorted subset of columns
    (used by the forest); indices in the result refer to the full matrix.
    """
    cols = X if feature_ids is None else X[:, feature_ids]
    m = cols.shape[0]
    if m < 2:
        return None
    order = np.argsort(cols, axis=0, kind="stable")
    vs = np.take_along_axis(cols, order, axis=0)
    ys = y[order]
    cum_pos = np.cumsum(ys, axis=0)
    total_pos = cum_pos[-1, 0]

    nl = np.arange(1, m, dtype=np.float64)[:, None]
    pl = cum_pos[:-1, :]
    nr = m - nl
    pr = total_pos - pl
    # proportional to the weighted child Gini; lower is better
    score = pl * (nl - pl) / nl + pr * (nr - pr) / nr
    score[vs[1:] == vs[:-1]] = np.inf
    if min_leaf > 1:
        score[: min_leaf - 1, :] = np.inf
        score[m - min_leaf :, :] = np.inf

    flat = score.T.ravel()  # feature-major: ties pick lowest feature, then threshold
    k = int(np.argmin(flat))
    if not np.isfinite(flat[k]):
        return None
    f_local = k // (m - 1)
    pos = k % (m - 1)
    lo, hi = vs[pos, f_local], vs[pos + 1, f_local]
    threshold = (lo + hi) / 2.0
    if threshold >= hi:  # midpoint rounded onto the upper value
        threshold = lo
    feature = f_local if feature_ids is None else int(feature_ids[f_local])
    return int(feature), float(threshold)


def grow_tree(X, y, max_depth, min_split=2, min_leaf=1, rng=None, n_sub=None, depth=0):
    m = y.size
    pos = float(y.sum())
    if (
        depth >= max_depth
        or pos == 0.0
        or pos == m
        or m < min_split
        or m < 2 * min_leaf
    ):
        return {"p": pos / m, "n": int(m)}
    feature_ids = None
    if n_sub is not None and n_sub < X.shape[1]:
        feature_ids = np.sort(rng.choice(X.shape[1], size=n_sub, replace=False))
    split = best_gini_split(X, y, feature_ids, min_leaf)
    if split is None:
        return {"p": pos / m, "n": int(m)}
    f, t = split
    mask = X[:, f] <= t
    return {
        "f": f,
        "t": t,
        "l": grow_tree(X[mask], y[mask], max_depth, min_split, min_leaf, rng, n_sub, depth + 1),
        "r": grow_tree(X[~mask], y[~mask], max_depth, min_split, min_leaf, rng, n_sub, depth + 1),
    }


def tree_values(node, X, key="p"):
    """Leaf value for every row of X."""
    out = np.empty(X.shape[0])
    stack = [(node, np.arange(X.shape[0]))]
    while stack:
        nd, idx = stack.pop()
        if idx.size == 0:
            continue
        if "f" not in nd:
            out[idx] = nd[key]
            continue
        mask = X[idx, nd["f"]] <= nd["t"]
        stack.append((nd["l"], idx[mask]))
        stack.append((nd["r"], idx[~mask]))
    return out


class DecisionTree(Classifier):
    kind = "tree"

    def __init__(self, max_depth=12, min_samples_split=2, min_samples_leaf=1, seed=0):
        super().__init__(seed)
        self.max_depth = int(max_depth)
        self.min_samples_split = int(min_samples_split)
        self.min_samples_leaf = int(min_samples_leaf)
        self.root_ = None

    def fit(self, X, y):
        X, y = check_training_data(X, y)
        self.n_features_ = X.shape[1]
        self.root_ = grow_tree(
            X, y, self.max_depth, self.min_samples_split, self.min_samples_leaf
        )
        return self

    def score_batch(self, X):
        X = self._check_scoring_input(X)
        return tree_values(self.root_, X)

    def train_config(self):
        return {
            "max_depth": self.max_depth,
            "min_samples_split": self.min_samples_split,
            "min_samples_leaf": self.min_samples_leaf,
            "seed": self.seed,
        }

    def export_state(self):
        return {"root": self.root_, "n_features": self.n_features_}, {}

    def import_state(self, meta, arrays):
        self.root_ = meta["root"]
        self.n_features_ = int(meta["n_features"])
