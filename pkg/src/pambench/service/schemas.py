"""Pydantic request/response models for the HTTP service.

JSON cannot carry NaN or infinity, so metric fields that may be the NaN
sentinel and the +inf curve threshold are nullable: null means NaN/inf.
"""

from __future__ import annotations

import math

from pydantic import BaseModel, Field


class SignalIn(BaseModel):
    samples: list[float] = Field(min_length=2)
    sample_rate: float = 8.0e7


class AnalyticOut(BaseModel):
    real: list[float]
    imag: list[float]


class EnvelopeOut(BaseModel):
    envelope: list[float]


class GridIn(BaseModel):
    signals: list[list[list[float]]]
    sample_rate: float = 8.0e7
    row_step_um: float = 100.0
    col_step_um: float = 40.0


class MapOut(BaseModel):
    pixels: list[list[float]]
    rows: int
    cols: int


class FeaturesOut(BaseModel):
    values: list[float]


class PropertiesIn(BaseModel):
    mu_a: float
    eta: float
    beta: float
    kappa: float
    rho: float
    c_v: float


class ValueOut(BaseModel):
    value: float


class PressureIn(BaseModel):
    props: PropertiesIn
    fluence: float


class ImpulseIn(BaseModel):
    times: list[float]
    center_freq: float = 10e6
    fractional_bandwidth: float = 0.6
    focal_length_mm: float = 18.0


class ValuesOut(BaseModel):
    values: list[float]


class ScoredLabelsIn(BaseModel):
    scores: list[float] = Field(min_length=1)
    labels: list[int] = Field(min_length=1)
    threshold: float = 0.5


class ReportOut(BaseModel):
    accuracy: float | None
    auroc: float | None
    ap: float | None
    sensitivity: float | None
    specificity: float | None
    ppv: float | None
    npv: float | None
    f1: float | None
    brier: float | None

    @classmethod
    def from_report(cls, rep) -> "ReportOut":
        clean = {
            k: (None if math.isnan(v) else v) for k, v in rep.as_dict().items()
        }
        return cls(**clean)


class CurveOut(BaseModel):
    thresholds: list[float | None]
    x: list[float]
    y: list[float]

    @classmethod
    def from_arrays(cls, thresholds, x, y) -> "CurveOut":
        return cls(
            thresholds=[None if math.isinf(t) else float(t) for t in thresholds],
            x=[float(v) for v in x],
            y=[float(v) for v in y],
        )


class ExperimentIn(BaseModel):
    config: dict
    output_dir: str


class ExperimentOut(BaseModel):
    output_dir: str
    ood_sample_ids: list[int]
    stages: dict[str, str]
    metrics_test: dict[str, ReportOut]
    metrics_eval: dict[str, ReportOut]


class HealthOut(BaseModel):
    status: str
    version: str
