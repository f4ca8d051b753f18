"""Experiment orchestration: configuration, splits, pipeline stages and the
run manifest.

A run writes everything under one output directory: the raw signal archive,
MAP images, the feature archive, serialized models, metric CSVs, per-model
ROC/PRC curves, and ``manifest.json`` recording the resolved configuration,
seeds, versions and stage status. Re-running from the manifest's config
reproduces every CSV and PGM byte for byte, regardless of thread count: all
randomness is derived from the single experiment seed through counter-based
substreams.
"""

from __future__ import annotations

import json
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from numpy.random import Generator, Philox, SeedSequence

from . import classifiers as clf
from . import metrics as mt
from .dataset import LabeledDataset, SignalRecords, read_records, write_records
from .errors import ConfigError, StageError
from .phantom import (
    AcquisitionConfig,
    ClassSpec,
    PhantomPopulation,
    TransducerModel,
    simulate_dataset,
)
from .preprocess import preprocess_batch
from .signal_core import ScanGrid, map_project, write_pgm

CONFIG_VERSION = 1

STAGES = ("simulate", "reconstruct", "preprocess", "train", "evaluate", "report")

#: distinct exit code per failing stage, for the CLI
STAGE_EXIT_CODES = {stage: 10 + i for i, stage in enumerate(STAGES)}

_STREAM_SPLIT = 1001


# ---------------------------------------------------------------------------
# configuration


@dataclass(frozen=True)
class ExperimentConfig:
    seed: int
    split_fraction: float
    threads: int
    standardize_features: bool
    classifiers: dict
    transducer: TransducerModel
    acquisition: AcquisitionConfig
    population: PhantomPopulation
    ood_acquisition: AcquisitionConfig
    ood_population: PhantomPopulation

    def __post_init__(self):
        if not (0.0 < self.split_fraction < 1.0):
            raise ConfigError("split_fraction must lie in (0, 1)")
        if self.threads < 1:
            raise ConfigError("threads must be >= 1")
        for kind in self.classifiers:
            if kind not in clf.KINDS:
                raise ConfigError(f"unknown classifier {kind!r}; know {clf.KINDS}")
        if not self.classifiers:
            raise ConfigError("at least one classifier must be configured")


def _class_spec_to_dict(spec: ClassSpec) -> dict:
    return {
        "n_samples": spec.n_samples,
        "mu_a_range": list(spec.mu_a_range),
        "n_layers_range": list(spec.n_layers_range),
        "depth_range_mm": list(spec.depth_range_mm),
        "fluence_gain_range": list(spec.fluence_gain_range),
    }


def _population_to_dict(pop: PhantomPopulation) -> dict:
    return {
        "benign": _class_spec_to_dict(pop.benign),
        "malignant": _class_spec_to_dict(pop.malignant),
        "surface_fluence": pop.surface_fluence,
        "fluence_decay": pop.fluence_decay,
        "speed_of_sound": pop.speed_of_sound,
        "eta": pop.eta,
        "beta": pop.beta,
        "kappa": pop.kappa,
        "rho": pop.rho,
        "c_v": pop.c_v,
        "sample_mu_a_jitter": pop.sample_mu_a_jitter,
    }


def _acquisition_to_dict(acq: AcquisitionConfig) -> dict:
    return {
        "sample_rate": acq.sample_rate,
        "n_samples": acq.n_samples,
        "rows": acq.rows,
        "cols": acq.cols,
        "row_step_um": acq.row_step_um,
        "col_step_um": acq.col_step_um,
        "noise_sigma": acq.noise_sigma,
    }


def config_to_dict(cfg: ExperimentConfig) -> dict:
    """Fully resolved, file-ready form of a configuration."""
    return {
        "version": CONFIG_VERSION,
        "seed": cfg.seed,
        "split_fraction": cfg.split_fraction,
        "threads": cfg.threads,
        "standardize_features": cfg.standardize_features,
        "classifiers": {k: dict(v) for k, v in cfg.classifiers.items()},
        "transducer": {
            "center_freq": cfg.transducer.center_freq,
            "fractional_bandwidth": cfg.transducer.fractional_bandwidth,
            "focal_length_mm": cfg.transducer.focal_length_mm,
        },
        "acquisition": _acquisition_to_dict(cfg.acquisition),
        "population": _population_to_dict(cfg.population),
        "ood": {
            "acquisition": _acquisition_to_dict(cfg.ood_acquisition),
            "population": _population_to_dict(cfg.ood_population),
        },
    }


def _take(raw: dict, allowed: set, where: str) -> dict:
    unknown = set(raw) - allowed
    if unknown:
        raise ConfigError(f"unknown keys in {where}: {sorted(unknown)}")
    return dict(raw)


def _class_spec_from_dict(raw: dict, where: str) -> ClassSpec:
    fields = _take(
        raw,
        {"n_samples", "mu_a_range", "n_layers_range", "depth_range_mm", "fluence_gain_range"},
        where,
    )
    for key in ("mu_a_range", "n_layers_range", "depth_range_mm", "fluence_gain_range"):
        if key in fields:
            fields[key] = tuple(fields[key])
    return ClassSpec(**fields)


def _population_from_dict(raw: dict, where: str) -> PhantomPopulation:
    fields = _take(
        raw,
        {
            "benign",
            "malignant",
            "surface_fluence",
            "fluence_decay",
            "speed_of_sound",
            "eta",
            "beta",
            "kappa",
            "rho",
            "c_v",
            "sample_mu_a_jitter",
        },
        where,
    )
    for cls in ("benign", "malignant"):
        if cls not in fields:
            raise ConfigError(f"{where} needs a {cls!r} class spec")
        fields[cls] = _class_spec_from_dict(fields[cls], f"{where}.{cls}")
    return PhantomPopulation(**fields)


def _acquisition_from_dict(raw: dict, where: str, seed: int) -> AcquisitionConfig:
    fields = _take(
        raw,
        {"sample_rate", "n_samples", "rows", "cols", "row_step_um", "col_step_um", "noise_sigma"},
        where,
    )
    return AcquisitionConfig(rng_seed=seed, **fields)


def _deep_merge(base: dict, override: dict) -> dict:
    out = dict(base)
    for key, value in override.items():
        if isinstance(value, dict) and isinstance(out.get(key), dict):
            out[key] = _deep_merge(out[key], value)
        else:
            out[key] = value
    return out


def config_from_dict(raw: dict) -> ExperimentConfig:
    try:
        return _config_from_dict(raw)
    except (ConfigError, StageError):
        raise
    except (TypeError, ValueError, AttributeError, KeyError) as exc:
        raise ConfigError(f"invalid config value: {exc}") from exc


def _config_from_dict(raw: dict) -> ExperimentConfig:
    raw = _take(
        raw,
        {
            "version",
            "seed",
            "split_fraction",
            "threads",
            "standardize_features",
            "classifiers",
            "transducer",
            "acquisition",
            "population",
            "ood",
        },
        "config",
    )
    version = raw.get("version", CONFIG_VERSION)
    if version != CONFIG_VERSION:
        raise ConfigError(f"unsupported config version {version}")
    if "population" not in raw or "acquisition" not in raw:
        raise ConfigError("config needs 'population' and 'acquisition' sections")
    seed = int(raw.get("seed", 0))
    trans_raw = _take(
        raw.get("transducer", {}),
        {"center_freq", "fractional_bandwidth", "focal_length_mm"},
        "transducer",
    )
    ood = raw.get("ood", {})
    ood = _take(ood, {"acquisition", "population"}, "ood")
    ood_acq_raw = _deep_merge(raw["acquisition"], ood.get("acquisition", {}))
    ood_pop_raw = _deep_merge(raw["population"], ood.get("population", {}))
    classifiers = raw.get("classifiers", {})
    if isinstance(classifiers, (list, tuple)):
        classifiers = {kind: {} for kind in classifiers}
    return ExperimentConfig(
        seed=seed,
        split_fraction=float(raw.get("split_fraction", 0.75)),
        threads=int(raw.get("threads", 1)),
        standardize_features=bool(raw.get("standardize_features", True)),
        classifiers={k: dict(v) for k, v in classifiers.items()},
        transducer=TransducerModel(**trans_raw),
        acquisition=_acquisition_from_dict(raw["acquisition"], "acquisition", seed),
        population=_population_from_dict(raw["population"], "population"),
        ood_acquisition=_acquisition_from_dict(ood_acq_raw, "ood.acquisition", seed),
        ood_population=_population_from_dict(ood_pop_raw, "ood.population"),
    )


def load_config(path) -> ExperimentConfig:
    """Read a config file; a manifest file works too (its resolved config is
    used, which is how a run is reproduced exactly)."""
    with open(path, "r", encoding="utf-8") as fh:
        raw = json.load(fh)
    if "config" in raw and "stages" in raw:  # looks like a manifest
        raw = raw["config"]
    return config_from_dict(raw)


def default_config_dict() -> dict:
    """The default experiment: 4 virtual samples per class in distribution,
    a noisier/dimmer out-of-distribution set, every classifier enabled."""
    return {
        "version": CONFIG_VERSION,
        "seed": 20260809,
        "split_fraction": 0.75,
        "threads": 1,
        "standardize_features": True,
        "classifiers": {
            kind: ({"min_samples_leaf": 5} if kind == "tree" else {})
            for kind in clf.KINDS
        },
        "transducer": {},
        "acquisition": {
            "sample_rate": 8.0e7,
            "n_samples": 256,
            "rows": 26,
            "cols": 26,
            "row_step_um": 100.0,
            "col_step_um": 40.0,
            "noise_sigma": 4.5e-4,
        },
        "population": {
            "surface_fluence": 0.02,
            "fluence_decay": 0.08,
            "speed_of_sound": 1.54,
            "eta": 0.9,
            "sample_mu_a_jitter": 0.1,
            "benign": {
                "n_samples": 4,
                "mu_a_range": [1.3, 2.3],
                "n_layers_range": [1, 2],
                "depth_range_mm": [0.5, 2.5],
                "fluence_gain_range": [0.9, 1.1],
            },
            "malignant": {
                "n_samples": 4,
                "mu_a_range": [0.1, 0.55],
                "n_layers_range": [1, 2],
                "depth_range_mm": [0.5, 2.5],
                "fluence_gain_range": [0.9, 1.1],
            },
        },
        "ood": {
            "acquisition": {"rows": 20, "cols": 20, "noise_sigma": 1.1e-3},
            "population": {
                "benign": {"n_samples": 2, "fluence_gain_range": [0.5, 0.7]},
                "malignant": {"n_samples": 2, "fluence_gain_range": [0.5, 0.7]},
            },
        },
    }


def small_config_dict() -> dict:
    """A quick smoke-scale variant of the default configuration."""
    cfg = default_config_dict()
    cfg["acquisition"].update({"rows": 8, "cols": 8, "n_samples": 250})
    cfg["population"]["benign"]["n_samples"] = 2
    cfg["population"]["malignant"]["n_samples"] = 2
    cfg["ood"]["acquisition"].update({"rows": 6, "cols": 6})
    cfg["ood"]["population"]["benign"]["n_samples"] = 2
    cfg["ood"]["population"]["malignant"]["n_samples"] = 2
    cfg["classifiers"] = {
        "lr": {"max_iter": 200},
        "knn": {},
        "tree": {"max_depth": 6},
        "forest": {"n_trees": 10, "max_depth": 6},
        "gbt": {"n_rounds": 15},
        "mlp": {"max_iter": 80},
        "const_pos": {},
    }
    return cfg


# ---------------------------------------------------------------------------
# splitting


def split_indices(m: int, fraction: float, seed: int) -> tuple[np.ndarray, np.ndarray]:
    """Seeded uniform shuffle, then cut at floor(fraction * m)."""
    if not (0.0 < fraction < 1.0):
        raise ConfigError("split fraction must lie in (0, 1)")
    n_train = int(fraction * m)
    if n_train == 0 or n_train == m:
        raise ConfigError(f"degenerate split: {n_train}/{m - n_train} of {m}")
    rng = Generator(Philox(SeedSequence(seed, spawn_key=(_STREAM_SPLIT,))))
    perm = rng.permutation(m)
    return np.sort(perm[:n_train]), np.sort(perm[n_train:])


def split(
    data: LabeledDataset, fraction: float, seed: int
) -> tuple[LabeledDataset, LabeledDataset]:
    """Shuffle-split a dataset; warns when one side misses a class."""
    train_idx, test_idx = split_indices(len(data), fraction, seed)
    train = data.subset(train_idx)
    test = data.subset(test_idx)
    for name, part in (("train", train), ("test", test)):
        if np.unique(part.labels).size < 2:
            warnings.warn(f"{name} split holds a single class", stacklevel=2)
    return train, test


# ---------------------------------------------------------------------------
# feature scaling (fit on the training split only)


@dataclass
class FeatureScaler:
    mean: np.ndarray
    std: np.ndarray

    @classmethod
    def fit(cls, X: np.ndarray) -> "FeatureScaler":
        std = X.std(axis=0)
        std = np.where(std == 0.0, 1.0, std)
        return cls(X.mean(axis=0), std)

    @classmethod
    def identity(cls, n: int) -> "FeatureScaler":
        return cls(np.zeros(n), np.ones(n))

    def transform(self, X: np.ndarray) -> np.ndarray:
        return (X - self.mean) / self.std

    def save(self, path) -> None:
        np.savez(path, mean=self.mean, std=self.std)

    @classmethod
    def load(cls, path) -> "FeatureScaler":
        with np.load(path, allow_pickle=False) as bundle:
            return cls(bundle["mean"].copy(), bundle["std"].copy())


# ---------------------------------------------------------------------------
# the runner


class ExperimentRunner:
    """Executes pipeline stages against one output directory.

    Stages can run in one process (``run_all``) or one at a time across CLI
    invocations; intermediate state is re-read from the output directory
    when it is not already in memory.
    """

    def __init__(self, config: ExperimentConfig, output_dir):
        self.config = config
        self.outdir = Path(output_dir)
        self.outdir.mkdir(parents=True, exist_ok=True)
        self._records = None
        self._features = None
        self.manifest_path = self.outdir / "manifest.json"
        if self.manifest_path.exists():
            with open(self.manifest_path, "r", encoding="utf-8") as fh:
                self.manifest = json.load(fh)
            if self.manifest.get("config") != config_to_dict(config):
                # a different configuration supersedes the old run
                self.manifest["config"] = config_to_dict(config)
                self.manifest["stages"] = {}
                self.manifest["incomplete"] = True
                self.manifest.pop("metrics", None)
                self._flush_manifest()
        else:
            self.manifest = {
                "format": "pambench-manifest",
                "version": 1,
                "package_version": _package_version(),
                "numpy_version": np.__version__,
                "config": config_to_dict(config),
                "stages": {},
                "incomplete": True,
            }
            self._flush_manifest()

    # -- manifest plumbing

    def _flush_manifest(self):
        with open(self.manifest_path, "w", encoding="utf-8") as fh:
            json.dump(self.manifest, fh, indent=2, sort_keys=True)
            fh.write("\n")

    def _mark(self, stage: str, status: str, **stats):
        entry = {"status": status}
        entry.update(stats)
        self.manifest["stages"][stage] = entry
        done = all(
            self.manifest["stages"].get(s, {}).get("status") == "complete"
            for s in STAGES
        )
        self.manifest["incomplete"] = not done
        self._flush_manifest()

    def _stage(self, name: str, body):
        try:
            return body()
        except Exception as exc:
            self._mark(name, "failed", error=str(exc))
            raise StageError(name, str(exc)) from exc

    # -- lazy state

    @property
    def records(self) -> SignalRecords:
        if self._records is None:
            self._records = read_records(self.outdir / "signals.bin")
        return self._records

    @property
    def features(self) -> SignalRecords:
        if self._features is None:
            self._features = read_records(self.outdir / "features.bin")
        return self._features

    def _ood_ids(self) -> set[int]:
        return set(self.manifest["ood_sample_ids"])

    # -- stages

    def simulate(self) -> SignalRecords:
        def body():
            cfg = self.config
            in_dist = simulate_dataset(
                cfg.population,
                cfg.acquisition,
                cfg.transducer,
                first_sample_id=0,
                threads=cfg.threads,
            )
            n_in = len(in_dist.samples)
            ood = simulate_dataset(
                cfg.ood_population,
                cfg.ood_acquisition,
                cfg.transducer,
                first_sample_id=n_in,
                threads=cfg.threads,
            )
            rec_in = in_dist.to_records()
            rec_ood = ood.to_records()
            records = SignalRecords(
                np.concatenate([rec_in.values, rec_ood.values]),
                np.concatenate([rec_in.labels, rec_ood.labels]),
                np.concatenate([rec_in.sample_ids, rec_ood.sample_ids]),
                np.concatenate([rec_in.grid_rows, rec_ood.grid_rows]),
                np.concatenate([rec_in.grid_cols, rec_ood.grid_cols]),
                rec_in.sample_rate,
            )
            write_records(self.outdir / "signals.bin", records)
            log_lines = in_dist.truncation_log + ood.truncation_log
            with open(self.outdir / "simulation_log.txt", "w", encoding="utf-8") as fh:
                fh.write(f"signals: {len(records)}\n")
                fh.write(f"truncated layers: {len(log_lines)}\n")
                for line in log_lines:
                    fh.write(line + "\n")
            self.manifest["ood_sample_ids"] = sorted(
                int(s.sample_id) for s in ood.samples
            )
            self._records = records
            self._mark(
                "simulate",
                "complete",
                signals=len(records),
                in_distribution_samples=n_in,
                ood_samples=len(ood.samples),
                truncated_layers=len(log_lines),
            )
            return records

        return self._stage("simulate", body)

    def reconstruct(self) -> list:
        def body():
            records = self.records
            ood_ids = self._ood_ids()
            written = []
            for sid in sorted(records.sample_id_set()):
                part = records.subset(records.sample_ids == sid)
                acq = self.config.ood_acquisition if sid in ood_ids else self.config.acquisition
                grid = _records_to_grid(part, acq.row_step_um, acq.col_step_um)
                image = map_project(grid)
                path = self.outdir / f"map_{sid:03d}.pgm"
                write_pgm(image, path, bit_depth=8)
                written.append(path.name)
            self._mark("reconstruct", "complete", images=len(written))
            return written

        return self._stage("reconstruct", body)

    def preprocess(self) -> SignalRecords:
        def body():
            records = self.records
            std = records.values.std(axis=1)
            keep = std > 0.0
            dropped = np.flatnonzero(~keep)
            kept = records.subset(keep)
            values = preprocess_batch(kept.values)
            features = SignalRecords(
                values,
                kept.labels,
                kept.sample_ids,
                kept.grid_rows,
                kept.grid_cols,
                kept.sample_rate,
            )
            write_records(self.outdir / "features.bin", features)
            with open(self.outdir / "preprocess_log.txt", "w", encoding="utf-8") as fh:
                fh.write(f"selected {len(features)} of {len(records)} signals\n")
                for idx in dropped:
                    fh.write(
                        f"dropped zero-variance signal: sample "
                        f"{records.sample_ids[idx]} cell "
                        f"({records.grid_rows[idx]}, {records.grid_cols[idx]})\n"
                    )
            self._features = features
            self._mark(
                "preprocess",
                "complete",
                selected=len(features),
                dropped_zero_variance=int(dropped.size),
            )
            return features

        return self._stage("preprocess", body)

    def _in_distribution_mask(self, records: SignalRecords) -> np.ndarray:
        ood_ids = self._ood_ids()
        return ~np.isin(records.sample_ids, sorted(ood_ids))

    def train(self) -> dict:
        def body():
            cfg = self.config
            features = self.features
            in_mask = self._in_distribution_mask(features)
            in_rows = np.flatnonzero(in_mask)
            train_local, test_local = split_indices(
                in_rows.size, cfg.split_fraction, cfg.seed
            )
            train_rows = in_rows[train_local]
            test_rows = in_rows[test_local]

            train_x = features.values[train_rows]
            train_y = features.labels[train_rows]
            if cfg.standardize_features:
                scaler = FeatureScaler.fit(train_x)
            else:
                scaler = FeatureScaler.identity(train_x.shape[1])
            model_dir = self.outdir / "models"
            model_dir.mkdir(exist_ok=True)
            scaler.save(model_dir / "feature_scaler.npz")

            data = LabeledDataset(
                scaler.transform(train_x), train_y, features.sample_ids[train_rows]
            )

            def fit_one(kind):
                return kind, clf.train(kind, data, cfg.classifiers[kind], cfg.seed)

            kinds = sorted(cfg.classifiers)
            if cfg.threads > 1:
                with ThreadPoolExecutor(max_workers=cfg.threads) as pool:
                    fitted = dict(pool.map(fit_one, kinds))
            else:
                fitted = dict(fit_one(k) for k in kinds)
            for kind in kinds:
                clf.save_model(fitted[kind], model_dir / f"{kind}.npz")

            self.manifest["train_record_indices"] = [int(r) for r in train_rows]
            self.manifest["test_record_indices"] = [int(r) for r in test_rows]
            self._mark(
                "train",
                "complete",
                classifiers=kinds,
                train_size=int(train_rows.size),
                test_size=int(test_rows.size),
            )
            return fitted

        return self._stage("train", body)

    def _load_models(self) -> dict:
        model_dir = self.outdir / "models"
        return {
            kind: clf.load_model(model_dir / f"{kind}.npz")
            for kind in sorted(self.config.classifiers)
        }

    def evaluate(self) -> tuple[dict, dict]:
        def body():
            features = self.features
            scaler = FeatureScaler.load(self.outdir / "models" / "feature_scaler.npz")
            models = self._load_models()
            test_rows = np.asarray(self.manifest["test_record_indices"], dtype=np.int64)
            ood_rows = np.flatnonzero(~self._in_distribution_mask(features))

            splits = {
                "test": (features.values[test_rows], features.labels[test_rows]),
                "eval": (features.values[ood_rows], features.labels[ood_rows]),
            }
            reports = {"test": {}, "eval": {}}
            for split_name, (x, y) in splits.items():
                x = scaler.transform(x)
                suffix = "" if split_name == "test" else "_eval"
                for kind, model in models.items():
                    scores = model.score_batch(x)
                    reports[split_name][kind] = mt.report(scores, y)
                    mt.write_curve_csv(
                        self.outdir / f"roc{suffix}_{kind}.csv", mt.roc_curve(scores, y)
                    )
                    mt.write_curve_csv(
                        self.outdir / f"prc{suffix}_{kind}.csv", mt.pr_curve(scores, y)
                    )
            payload = {
                name: {kind: rep.as_dict() for kind, rep in rows.items()}
                for name, rows in reports.items()
            }
            self.manifest["metrics"] = payload
            self._mark(
                "evaluate",
                "complete",
                test_size=int(test_rows.size),
                eval_size=int(ood_rows.size),
            )
            return reports["test"], reports["eval"]

        return self._stage("evaluate", body)

    def report(self) -> list:
        def body():
            metrics = self.manifest.get("metrics")
            if not metrics:
                raise ConfigError("evaluate must run before report")
            written = []
            for split_name, filename in (("test", "metrics_test.csv"), ("eval", "metrics_eval.csv")):
                rows = {
                    kind: mt.MetricReport(**values)
                    for kind, values in metrics[split_name].items()
                }
                mt.write_report_csv(self.outdir / filename, rows)
                written.append(filename)
            self._mark("report", "complete", files=written)
            return written

        return self._stage("report", body)

    def run_all(self) -> dict:
        self.simulate()
        self.reconstruct()
        self.preprocess()
        self.train()
        self.evaluate()
        self.report()
        return self.manifest


def _records_to_grid(part: SignalRecords, row_step_um: float, col_step_um: float) -> ScanGrid:
    h = int(part.grid_rows.max()) + 1
    w = int(part.grid_cols.max()) + 1
    if len(part) != h * w:
        raise ConfigError(f"sample holds {len(part)} records, expected {h * w}")
    flat = part.grid_rows.astype(np.int64) * w + part.grid_cols
    if np.unique(flat).size != h * w:
        raise ConfigError("sample records do not cover the grid exactly once")
    block = np.empty((h, w, part.n_values))
    block[part.grid_rows, part.grid_cols] = part.values
    return ScanGrid(block, part.sample_rate, row_step_um, col_step_um)


def run_experiment(config: ExperimentConfig, output_dir) -> dict:
    """Run the whole pipeline and return the manifest."""
    return ExperimentRunner(config, output_dir).run_all()


def audit_manifest(output_dir) -> dict:
    """Re-check the leakage and ordering invariants of a finished run.

    Verifies that no training record carries an out-of-distribution sample
    ID and that the report CSVs are sorted by non-increasing accuracy.
    Raises ConfigError on violation; returns summary counts otherwise.
    """
    outdir = Path(output_dir)
    with open(outdir / "manifest.json", "r", encoding="utf-8") as fh:
        manifest = json.load(fh)
    features = read_records(outdir / "features.bin")
    ood_ids = set(manifest["ood_sample_ids"])
    train_rows = np.asarray(manifest["train_record_indices"], dtype=np.int64)
    train_sids = set(int(s) for s in features.sample_ids[train_rows])
    leaked = train_sids & ood_ids
    if leaked:
        raise ConfigError(f"OOD samples leaked into training: {sorted(leaked)}")
    for filename in ("metrics_test.csv", "metrics_eval.csv"):
        with open(outdir / filename, "r", encoding="ascii") as fh:
            lines = fh.read().strip().splitlines()[1:]
        accuracies = [float(line.split(",")[1]) for line in lines]
        if any(a < b for a, b in zip(accuracies, accuracies[1:])):
            raise ConfigError(f"{filename} is not sorted by decreasing accuracy")
    return {
        "train_records": int(train_rows.size),
        "ood_sample_ids": sorted(ood_ids),
        "report_rows": len(manifest["metrics"]["test"]),
    }


def _package_version() -> str:
    try:
        from importlib.metadata import version

        return version("pambench")
    except Exception:  # pragma: no cover - fallback for source trees
        return "unknown"
