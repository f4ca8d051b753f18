"""Independent brute-force oracles used by the unit and acceptance tests.

These deliberately avoid the library's code paths: the analytic-signal
oracle uses explicit DFT summation matrices, the AUROC oracle counts
concordant pairs, and the AP oracle re-derives every confusion table by
per-threshold recounting.
"""

from __future__ import annotations

import numpy as np


def dft_matrix(n: int) -> np.ndarray:
    k = np.arange(n)
    return np.exp(-2j * np.pi * np.outer(k, k) / n)


def oracle_analytic(x: np.ndarray) -> np.ndarray:
    """Analytic signal via explicit O(N^2) DFT sums."""
    x = np.asarray(x, dtype=np.float64)
    n = x.size
    forward = dft_matrix(n)
    spectrum = forward @ x
    h = np.zeros(n)
    if n % 2 == 0:
        h[0] = 1.0
        h[1 : n // 2] = 2.0
        h[n // 2] = 1.0
    else:
        h[0] = 1.0
        h[1 : (n + 1) // 2] = 2.0
    inverse = np.conj(forward)
    return (inverse @ (spectrum * h)) / n


def oracle_features(x: np.ndarray) -> np.ndarray:
    """Direct-summation DFT of the analytic signal of the standardized
    input; magnitude."""
    x = np.asarray(x, dtype=np.float64)
    z = (x - x.mean()) / x.std()
    analytic = oracle_analytic(z)
    return np.abs(dft_matrix(x.size) @ analytic)


def oracle_confusion(scores, labels, threshold):
    """Per-point recount of the confusion table."""
    tp = fp = tn = fn = 0
    for s, y in zip(scores, labels):
        predicted = s >= threshold
        if predicted and y == 1:
            tp += 1
        elif predicted and y == 0:
            fp += 1
        elif not predicted and y == 0:
            tn += 1
        else:
            fn += 1
    return tp, fp, tn, fn


def oracle_auroc_pairs(scores, labels) -> float:
    """(concordant + 0.5 * tied) / (P * N) over all positive-negative pairs."""
    scores = np.asarray(scores, dtype=np.float64)
    labels = np.asarray(labels)
    pos = scores[labels == 1]
    neg = scores[labels == 0]
    greater = (pos[:, None] > neg[None, :]).sum()
    ties = (pos[:, None] == neg[None, :]).sum()
    return (greater + 0.5 * ties) / (pos.size * neg.size)


def oracle_average_precision(scores, labels) -> float:
    """Exhaustive threshold enumeration with step-wise recall sums."""
    scores = np.asarray(scores, dtype=np.float64)
    labels = np.asarray(labels)
    total_pos = int((labels == 1).sum())
    ap = 0.0
    prev_recall = 0.0
    for t in np.sort(np.unique(scores))[::-1]:
        predicted = scores >= t
        tp = int((predicted & (labels == 1)).sum())
        precision = tp / int(predicted.sum())
        recall = tp / total_pos
        ap += (recall - prev_recall) * precision
        prev_recall = recall
    return ap
