"""FastAPI service exposing the core operations over HTTP.

The service wraps the same library the CLI drives: signal transforms,
phantom physics, preprocessing, the metric battery, and a synchronous
experiment runner intended for small configurations (the request blocks
until the pipeline finishes and files land in ``output_dir``).
"""

from __future__ import annotations

import numpy as np
from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse

from .. import __version__
from .. import metrics as mt
from ..errors import GridError, PambenchError, StageError
from ..harness import config_from_dict, run_experiment
from ..phantom import (
    OpticalProperties,
    TransducerModel,
    grueneisen,
    initial_pressure,
    transducer_impulse,
)
from ..preprocess import preprocess_batch
from ..signal_core import AScan, ScanGrid, analytic_signal, envelope, map_project
from . import schemas

app = FastAPI(title="pambench", version=__version__)


@app.exception_handler(PambenchError)
async def _domain_error(request: Request, exc: PambenchError):
    status = 500 if isinstance(exc, StageError) else 400
    return JSONResponse(status_code=status, content={"detail": str(exc)})


@app.get("/health", response_model=schemas.HealthOut)
def health():
    return schemas.HealthOut(status="ok", version=__version__)


@app.post("/signal/analytic", response_model=schemas.AnalyticOut)
def signal_analytic(body: schemas.SignalIn):
    z = analytic_signal(AScan(body.samples, body.sample_rate))
    return schemas.AnalyticOut(real=z.real.tolist(), imag=z.imag.tolist())


@app.post("/signal/envelope", response_model=schemas.EnvelopeOut)
def signal_envelope(body: schemas.SignalIn):
    env = envelope(AScan(body.samples, body.sample_rate))
    return schemas.EnvelopeOut(envelope=env.tolist())


@app.post("/signal/map", response_model=schemas.MapOut)
def signal_map(body: schemas.GridIn):
    try:
        signals = np.asarray(body.signals, dtype=np.float64)
    except ValueError as exc:  # ragged nesting
        raise GridError(f"signals must form a rectangular H x W x N block: {exc}")
    grid = ScanGrid(
        signals,
        body.sample_rate,
        body.row_step_um,
        body.col_step_um,
    )
    image = map_project(grid)
    return schemas.MapOut(
        pixels=image.pixels.tolist(), rows=image.rows, cols=image.cols
    )


@app.post("/preprocess", response_model=schemas.FeaturesOut)
def preprocess_signal(body: schemas.SignalIn):
    scan = AScan(body.samples, body.sample_rate)
    return schemas.FeaturesOut(values=preprocess_batch(scan.samples).tolist())


@app.post("/phantom/grueneisen", response_model=schemas.ValueOut)
def phantom_grueneisen(body: schemas.PropertiesIn):
    return schemas.ValueOut(value=grueneisen(OpticalProperties(**body.model_dump())))


@app.post("/phantom/initial-pressure", response_model=schemas.ValueOut)
def phantom_pressure(body: schemas.PressureIn):
    props = OpticalProperties(**body.props.model_dump())
    return schemas.ValueOut(value=initial_pressure(props, body.fluence))


@app.post("/phantom/impulse", response_model=schemas.ValuesOut)
def phantom_impulse(body: schemas.ImpulseIn):
    model = TransducerModel(
        body.center_freq, body.fractional_bandwidth, body.focal_length_mm
    )
    values = transducer_impulse(np.asarray(body.times, dtype=np.float64), model)
    return schemas.ValuesOut(values=np.atleast_1d(values).tolist())


@app.post("/metrics/report", response_model=schemas.ReportOut)
def metrics_report(body: schemas.ScoredLabelsIn):
    rep = mt.report(body.scores, body.labels, threshold=body.threshold)
    return schemas.ReportOut.from_report(rep)


@app.post("/metrics/roc", response_model=schemas.CurveOut)
def metrics_roc(body: schemas.ScoredLabelsIn):
    curve = mt.roc_curve(body.scores, body.labels)
    return schemas.CurveOut.from_arrays(curve.thresholds, curve.fpr, curve.tpr)


@app.post("/metrics/prc", response_model=schemas.CurveOut)
def metrics_prc(body: schemas.ScoredLabelsIn):
    curve = mt.pr_curve(body.scores, body.labels)
    return schemas.CurveOut.from_arrays(curve.thresholds, curve.recall, curve.precision)


@app.post("/experiment/run", response_model=schemas.ExperimentOut)
def experiment_run(body: schemas.ExperimentIn):
    config = config_from_dict(body.config)
    manifest = run_experiment(config, body.output_dir)
    reports = {
        name: {
            kind: schemas.ReportOut(
                **{k: (None if v != v else v) for k, v in row.items()}
            )
            for kind, row in manifest["metrics"][name].items()
        }
        for name in ("test", "eval")
    }
    return schemas.ExperimentOut(
        output_dir=body.output_dir,
        ood_sample_ids=manifest["ood_sample_ids"],
        stages={s: e["status"] for s, e in manifest["stages"].items()},
        metrics_test=reports["test"],
        metrics_eval=reports["eval"],
    )
