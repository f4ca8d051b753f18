"""Classification metric battery: confusion counts, point metrics, ROC/PRC
curves, AUROC, average precision and the Brier score.

Curves are built by sweeping the distinct score values from high to low
with tied scores handled as one group, which makes the trapezoidal AUROC
equal to the rank statistic (concordant pairs plus half the ties). Average
precision uses the step-wise sum over recall increments, not a trapezoid.
Ratios with a zero denominator become a NaN sentinel that survives into the
CSV rendering as the literal string "NaN".
"""

from __future__ import annotations

import math
from dataclasses import dataclass, fields

import numpy as np

from .errors import InvalidInputError, UndefinedMetricError

NAN = float("nan")

#: decision threshold used for all point metrics
DEFAULT_THRESHOLD = 0.5

REPORT_COLUMNS = (
    "accuracy",
    "auroc",
    "ap",
    "sensitivity",
    "specificity",
    "ppv",
    "npv",
    "f1",
    "brier",
)


def _check_scores_labels(scores, labels) -> tuple[np.ndarray, np.ndarray]:
    scores = np.asarray(scores, dtype=np.float64)
    labels = np.asarray(labels)
    if scores.ndim != 1 or labels.shape != scores.shape:
        raise InvalidInputError("scores and labels must be 1-D and equally long")
    if scores.size == 0:
        raise InvalidInputError("empty input")
    if not np.isfinite(scores).all():
        raise InvalidInputError("scores must be finite")
    if not np.isin(labels, (0, 1)).all():
        raise InvalidInputError("labels must be 0 or 1")
    return scores, labels.astype(np.int64)


@dataclass(frozen=True)
class ConfusionCounts:
    tp: int
    fp: int
    tn: int
    fn: int

    @property
    def total(self) -> int:
        return self.tp + self.fp + self.tn + self.fn


def confusion(scores, labels, threshold: float = DEFAULT_THRESHOLD) -> ConfusionCounts:
    """Counts with the positive call made at score >= threshold."""
    scores, labels = _check_scores_labels(scores, labels)
    predicted = scores >= threshold
    actual = labels == 1
    return ConfusionCounts(
        tp=int(np.sum(predicted & actual)),
        fp=int(np.sum(predicted & ~actual)),
        tn=int(np.sum(~predicted & ~actual)),
        fn=int(np.sum(~predicted & actual)),
    )


def _ratio(num: int, den: int) -> float:
    return num / den if den else NAN


def point_metrics(c: ConfusionCounts) -> tuple[float, float, float, float, float, float]:
    """(accuracy, sensitivity, specificity, ppv, npv, f1); 0/0 ratios are NaN.

    F1 is NaN only when precision and recall are both undefined
    (tp = fp = fn = 0); with tp = 0 but positives predicted or present it
    is 0.
    """
    if c.total <= 0:
        raise InvalidInputError("confusion counts are empty")
    accuracy = (c.tp + c.tn) / c.total
    sensitivity = _ratio(c.tp, c.tp + c.fn)
    specificity = _ratio(c.tn, c.tn + c.fp)
    ppv = _ratio(c.tp, c.tp + c.fp)
    npv = _ratio(c.tn, c.tn + c.fn)
    if c.tp == 0:
        f1 = NAN if (c.fp == 0 and c.fn == 0) else 0.0
    else:
        f1 = 2.0 * ppv * sensitivity / (ppv + sensitivity)
    return accuracy, sensitivity, specificity, ppv, npv, f1


def _grouped_sweep(scores: np.ndarray, labels: np.ndarray):
    """Cumulative (threshold, tp, fp) after each distinct-score group,
    sweeping from the highest score down."""
    order = np.argsort(-scores, kind="stable")
    s = scores[order]
    y = labels[order]
    ends = np.append(np.flatnonzero(np.diff(s) != 0), s.size - 1)
    cum_tp = np.cumsum(y)[ends]
    cum_pp = ends + 1
    return s[ends], cum_tp, cum_pp - cum_tp


@dataclass(frozen=True)
class RocCurve:
    """(FPR, TPR) points for thresholds from +inf down; endpoints (0,0) and
    (1,1) are always present."""

    fpr: np.ndarray
    tpr: np.ndarray
    thresholds: np.ndarray


@dataclass(frozen=True)
class PrCurve:
    """(recall, precision) points, anchored at (0, 1) for threshold +inf."""

    recall: np.ndarray
    precision: np.ndarray
    thresholds: np.ndarray


def roc_curve(scores, labels) -> RocCurve:
    scores, labels = _check_scores_labels(scores, labels)
    pos = int(labels.sum())
    neg = labels.size - pos
    if pos == 0 or neg == 0:
        raise UndefinedMetricError("ROC needs both classes present")
    thresholds, tp, fp = _grouped_sweep(scores, labels)
    return RocCurve(
        fpr=np.concatenate(([0.0], fp / neg)),
        tpr=np.concatenate(([0.0], tp / pos)),
        thresholds=np.concatenate(([np.inf], thresholds)),
    )


def auroc(curve: RocCurve) -> float:
    """Trapezoidal area under the ROC curve."""
    dx = np.diff(curve.fpr)
    mid = (curve.tpr[1:] + curve.tpr[:-1]) / 2.0
    return float(np.sum(dx * mid))


def pr_curve(scores, labels) -> PrCurve:
    scores, labels = _check_scores_labels(scores, labels)
    pos = int(labels.sum())
    if pos == 0:
        raise UndefinedMetricError("PR curve needs at least one positive label")
    thresholds, tp, fp = _grouped_sweep(scores, labels)
    return PrCurve(
        recall=np.concatenate(([0.0], tp / pos)),
        precision=np.concatenate(([1.0], tp / (tp + fp))),
        thresholds=np.concatenate(([np.inf], thresholds)),
    )


def average_precision(curve: PrCurve) -> float:
    """Step-wise sum of precision over recall increments."""
    dr = np.diff(curve.recall)
    return float(np.sum(dr * curve.precision[1:]))


def brier(scores, labels) -> float:
    """Mean squared difference between scores and labels."""
    scores, labels = _check_scores_labels(scores, labels)
    if (scores < 0).any() or (scores > 1).any():
        raise InvalidInputError("scores must lie in [0, 1]")
    return float(np.mean((scores - labels) ** 2))


@dataclass(frozen=True)
class MetricReport:
    """The nine Table-style statistics for one classifier."""

    accuracy: float
    auroc: float
    ap: float
    sensitivity: float
    specificity: float
    ppv: float
    npv: float
    f1: float
    brier: float

    def __post_init__(self):
        for f in fields(self):
            v = getattr(self, f.name)
            if not math.isnan(v) and not (0.0 <= v <= 1.0):
                raise InvalidInputError(f"{f.name}={v} outside [0, 1]")

    def as_dict(self) -> dict:
        return {name: getattr(self, name) for name in REPORT_COLUMNS}


def report(scores, labels, threshold: float = DEFAULT_THRESHOLD) -> MetricReport:
    """Assemble all nine metrics at the given decision threshold."""
    scores, labels = _check_scores_labels(scores, labels)
    c = confusion(scores, labels, threshold)
    accuracy, sensitivity, specificity, ppv, npv, f1 = point_metrics(c)
    return MetricReport(
        accuracy=accuracy,
        auroc=auroc(roc_curve(scores, labels)),
        ap=average_precision(pr_curve(scores, labels)),
        sensitivity=sensitivity,
        specificity=specificity,
        ppv=ppv,
        npv=npv,
        f1=f1,
        brier=brier(scores, labels),
    )


def render_metric(value: float) -> str:
    """Six-decimal fixed-point rendering; NaN stays the literal 'NaN'."""
    return "NaN" if math.isnan(value) else f"{value:.6f}"


def write_report_csv(path, rows: dict) -> None:
    """Write per-classifier report rows sorted by decreasing accuracy
    (ties broken by classifier name)."""
    ordered = sorted(rows.items(), key=lambda item: (-item[1].accuracy, item[0]))
    lines = ["classifier," + ",".join(REPORT_COLUMNS)]
    for name, rep in ordered:
        lines.append(
            name + "," + ",".join(render_metric(getattr(rep, c)) for c in REPORT_COLUMNS)
        )
    with open(path, "w", encoding="ascii") as fh:
        fh.write("\n".join(lines) + "\n")


def write_curve_csv(path, curve) -> None:
    """Write a curve as `threshold,x,y` rows (x,y = FPR,TPR or recall,precision)."""
    if isinstance(curve, RocCurve):
        xs, ys = curve.fpr, curve.tpr
    elif isinstance(curve, PrCurve):
        xs, ys = curve.recall, curve.precision
    else:
        raise InvalidInputError("curve must be a RocCurve or PrCurve")
    lines = ["threshold,x,y"]
    for t, x, y in zip(curve.thresholds, xs, ys):
        lines.append(f"{float(t)!r},{float(x)!r},{float(y)!r}")
    with open(path, "w", encoding="ascii") as fh:
        fh.write("\n".join(lines) + "\n")
