"""Classifier registry: one train/score interface over all model families.

Every model trains deterministically from (data, hyperparameters, seed) and
scores in [0, 1], with 1 meaning cancer-like. ``predict`` applies the fixed
0.5 threshold (score exactly 0.5 maps to the positive label).

Models serialize to a versioned npz file: a json metadata entry (kind,
hyperparameters, structural state) plus raw float arrays, so a round-trip
reproduces scores exactly.
"""

from __future__ import annotations

import json

import numpy as np

from ..dataset import LabeledDataset
from ..errors import InvalidInputError
from .base import Classifier
from .baseline import ConstantPositive
from .boosting import AdaBoostStumps, GradientBoostedTrees
from .forest import RandomForest
from .gaussian import GaussianNaiveBayes, LinearDiscriminant, QuadraticDiscriminant
from .linear import LinearSVM, LogisticRegression
from .mlp import MultiLayerPerceptron
from .neighbors import KNearestNeighbors
from .tree import DecisionTree

MODEL_FORMAT = "pambench-model"
MODEL_FORMAT_VERSION = 1

_REGISTRY = {
    cls.kind: cls
    for cls in (
        LogisticRegression,
        KNearestNeighbors,
        LinearSVM,
        GaussianNaiveBayes,
        LinearDiscriminant,
        QuadraticDiscriminant,
        DecisionTree,
        RandomForest,
        AdaBoostStumps,
        GradientBoostedTrees,
        MultiLayerPerceptron,
        ConstantPositive,
    )
}

KINDS = tuple(sorted(_REGISTRY))


def make(kind: str, config: dict | None = None, seed: int = 0) -> Classifier:
    if kind not in _REGISTRY:
        raise InvalidInputError(f"unknown classifier kind {kind!r}; know {KINDS}")
    kwargs = dict(config or {})
    kwargs.pop("seed", None)
    return _REGISTRY[kind](seed=seed, **kwargs)


def train(
    kind: str, data: LabeledDataset, config: dict | None = None, seed: int = 0
) -> Classifier:
    """Fit a classifier of the given kind on a labeled dataset."""
    model = make(kind, config, seed)
    model.fit(data.features, data.labels)
    return model


def score(model: Classifier, x) -> float:
    """Score one feature vector; higher means more cancer-like."""
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 1:
        raise InvalidInputError("score takes a single feature vector")
    return float(model.score_batch(x)[0])


def predict(model: Classifier, x) -> int:
    """Hard label at the fixed 0.5 threshold; 0.5 itself maps to 1."""
    return int(score(model, x) >= 0.5)


def predict_batch(model: Classifier, X) -> np.ndarray:
    return (model.score_batch(X) >= 0.5).astype(np.int64)


def save_model(model: Classifier, path) -> None:
    meta_dict, arrays = model.export_state()
    meta = {
        "format": MODEL_FORMAT,
        "version": MODEL_FORMAT_VERSION,
        "kind": model.kind,
        "train_config": model.train_config(),
        "state": meta_dict,
    }
    with open(path, "wb") as fh:
        np.savez(fh, meta=np.array(json.dumps(meta)), **arrays)


def load_model(path) -> Classifier:
    with np.load(path, allow_pickle=False) as bundle:
        meta = json.loads(str(bundle["meta"]))
        arrays = {k: bundle[k] for k in bundle.files if k != "meta"}
    if meta.get("format") != MODEL_FORMAT:
        raise InvalidInputError(f"{path}: not a pambench model file")
    if meta.get("version") != MODEL_FORMAT_VERSION:
        raise InvalidInputError(f"{path}: unsupported model version")
    config = dict(meta["train_config"])
    seed = config.pop("seed", 0)
    model = make(meta["kind"], config, seed)
    model.import_state(meta["state"], arrays)
    return model


__all__ = [
    "KINDS",
    "Classifier",
    "load_model",
    "make",
    "predict",
    "predict_batch",
    "save_model",
    "score",
    "train",
]
