import json

import numpy as np
import pytest

from pambench import metrics as mt
from pambench.dataset import LabeledDataset, read_records
from pambench.errors import ConfigError, StageError
from pambench.harness import (
    ExperimentRunner,
    FeatureScaler,
    audit_manifest,
    config_from_dict,
    config_to_dict,
    default_config_dict,
    load_config,
    run_experiment,
    small_config_dict,
    split,
    split_indices,
)


@pytest.fixture(scope="module")
def small_run(tmp_path_factory):
    outdir = tmp_path_factory.mktemp("run")
    config = config_from_dict(small_config_dict())
    manifest = run_experiment(config, outdir)
    return config, outdir, manifest


class TestSplit:
    def test_75_25_counts(self):
        train_idx, test_idx = split_indices(100, 0.75, 1)
        assert train_idx.size == 75 and test_idx.size == 25

    def test_same_seed_same_indices(self):
        a = split_indices(500, 0.6, 42)
        b = split_indices(500, 0.6, 42)
        assert np.array_equal(a[0], b[0]) and np.array_equal(a[1], b[1])

    def test_partition_laws(self):
        train_idx, test_idx = split_indices(137, 0.75, 9)
        union = np.union1d(train_idx, test_idx)
        assert np.array_equal(union, np.arange(137))
        assert np.intersect1d(train_idx, test_idx).size == 0

    def test_degenerate_sizes_rejected(self):
        with pytest.raises(ConfigError):
            split_indices(3, 0.1, 0)
        with pytest.raises(ConfigError):
            split_indices(10, 1.5, 0)

    def test_split_datasets(self):
        rng = np.random.default_rng(0)
        data = LabeledDataset(
            rng.normal(size=(100, 4)),
            rng.integers(0, 2, size=100),
            np.zeros(100, dtype=int),
        )
        train, test = split(data, 0.75, 3)
        assert len(train) == 75 and len(test) == 25

    def test_single_class_side_warns(self):
        features = np.arange(8, dtype=float).reshape(4, 2)
        data = LabeledDataset(features, np.array([0, 1, 1, 1]), np.zeros(4, dtype=int))
        with pytest.warns(UserWarning):
            split(data, 0.5, 12)


class TestConfig:
    def test_roundtrip(self):
        cfg = config_from_dict(default_config_dict())
        again = config_from_dict(config_to_dict(cfg))
        assert config_to_dict(again) == config_to_dict(cfg)

    def test_unknown_keys_rejected(self):
        raw = small_config_dict()
        raw["acquisition"]["rng_seed"] = 5
        with pytest.raises(ConfigError):
            config_from_dict(raw)

    def test_unknown_classifier_rejected(self):
        raw = small_config_dict()
        raw["classifiers"]["rbf_svm"] = {}
        with pytest.raises(ConfigError):
            config_from_dict(raw)

    def test_ood_overrides_merge(self):
        cfg = config_from_dict(default_config_dict())
        assert cfg.ood_acquisition.noise_sigma > cfg.acquisition.noise_sigma
        assert cfg.ood_acquisition.sample_rate == cfg.acquisition.sample_rate
        assert cfg.ood_population.benign.n_samples == 2
        # unshifted fields inherit the in-distribution population
        assert cfg.ood_population.benign.mu_a_range == cfg.population.benign.mu_a_range

    def test_classifier_list_form(self):
        raw = small_config_dict()
        raw["classifiers"] = ["lr", "const_pos"]
        cfg = config_from_dict(raw)
        assert set(cfg.classifiers) == {"lr", "const_pos"}

    def test_version_checked(self):
        raw = small_config_dict()
        raw["version"] = 999
        with pytest.raises(ConfigError):
            config_from_dict(raw)


class TestFeatureScaler:
    def test_constant_feature_safe(self):
        X = np.hstack([np.ones((10, 1)), np.arange(10.0)[:, None]])
        scaler = FeatureScaler.fit(X)
        out = scaler.transform(X)
        assert np.isfinite(out).all()
        assert out[:, 0].max() == 0.0

    def test_save_load(self, tmp_path):
        X = np.random.default_rng(0).normal(size=(20, 3))
        scaler = FeatureScaler.fit(X)
        scaler.save(tmp_path / "scaler.npz")
        loaded = FeatureScaler.load(tmp_path / "scaler.npz")
        assert np.array_equal(loaded.mean, scaler.mean)
        assert np.array_equal(loaded.std, scaler.std)


class TestPipeline:
    def test_outputs_exist(self, small_run):
        config, outdir, manifest = small_run
        assert not manifest["incomplete"]
        for name in ("signals.bin", "features.bin", "metrics_test.csv",
                     "metrics_eval.csv", "manifest.json", "simulation_log.txt",
                     "preprocess_log.txt"):
            assert (outdir / name).exists(), name
        for kind in config.classifiers:
            assert (outdir / f"roc_{kind}.csv").exists()
            assert (outdir / f"prc_{kind}.csv").exists()
            assert (outdir / f"roc_eval_{kind}.csv").exists()
            assert (outdir / f"prc_eval_{kind}.csv").exists()
            assert (outdir / "models" / f"{kind}.npz").exists()
        n_samples = len(manifest["ood_sample_ids"]) + manifest["stages"]["simulate"][
            "in_distribution_samples"
        ]
        assert len(list(outdir.glob("map_*.pgm"))) == n_samples

    def test_report_rows_per_classifier(self, small_run):
        config, outdir, _ = small_run
        lines = (outdir / "metrics_test.csv").read_text().strip().splitlines()
        assert len(lines) == 1 + len(config.classifiers)

    def test_const_pos_ppv_equals_prevalence(self, small_run):
        _, outdir, manifest = small_run
        features = read_records(outdir / "features.bin")
        ood_ids = set(manifest["ood_sample_ids"])
        ood_mask = np.isin(features.sample_ids, sorted(ood_ids))
        prevalence = features.labels[ood_mask].mean()
        row = manifest["metrics"]["eval"]["const_pos"]
        assert row["ppv"] == pytest.approx(prevalence, abs=1e-12)
        assert row["accuracy"] == pytest.approx(prevalence, abs=1e-12)

    def test_metrics_match_report_oracle(self, small_run):
        # recompute one classifier's test row end to end from saved artifacts
        from pambench import classifiers as clf
        from pambench.harness import FeatureScaler

        _, outdir, manifest = small_run
        features = read_records(outdir / "features.bin")
        scaler = FeatureScaler.load(outdir / "models" / "feature_scaler.npz")
        model = clf.load_model(outdir / "models" / "lr.npz")
        test_rows = np.asarray(manifest["test_record_indices"])
        x = scaler.transform(features.values[test_rows])
        y = features.labels[test_rows]
        rep = mt.report(model.score_batch(x), y)
        stored = manifest["metrics"]["test"]["lr"]
        for key, value in rep.as_dict().items():
            if value != value:
                assert stored[key] != stored[key]
            else:
                assert stored[key] == pytest.approx(value, abs=1e-12)

    def test_audit_passes(self, small_run):
        _, outdir, _ = small_run
        summary = audit_manifest(outdir)
        assert summary["train_records"] > 0

    def test_audit_catches_leakage(self, small_run, tmp_path):
        import shutil

        _, outdir, _ = small_run
        tampered = tmp_path / "tampered"
        shutil.copytree(outdir, tampered)
        with open(tampered / "manifest.json") as fh:
            manifest = json.load(fh)
        features = read_records(tampered / "features.bin")
        ood_row = int(np.flatnonzero(
            np.isin(features.sample_ids, manifest["ood_sample_ids"])
        )[0])
        manifest["train_record_indices"].append(ood_row)
        with open(tampered / "manifest.json", "w") as fh:
            json.dump(manifest, fh)
        with pytest.raises(ConfigError, match="leaked"):
            audit_manifest(tampered)

    def test_report_sorted_by_accuracy(self, small_run):
        _, outdir, _ = small_run
        for name in ("metrics_test.csv", "metrics_eval.csv"):
            lines = (outdir / name).read_text().strip().splitlines()[1:]
            accuracies = [float(line.split(",")[1]) for line in lines]
            assert accuracies == sorted(accuracies, reverse=True)

    def test_load_config_from_manifest(self, small_run):
        config, outdir, _ = small_run
        again = load_config(outdir / "manifest.json")
        assert config_to_dict(again) == config_to_dict(config)

    def test_no_ood_sample_trained_on(self, small_run):
        _, outdir, manifest = small_run
        features = read_records(outdir / "features.bin")
        train_ids = set(
            int(v) for v in features.sample_ids[manifest["train_record_indices"]]
        )
        assert train_ids.isdisjoint(manifest["ood_sample_ids"])


class TestManifestSupersede:
    def test_new_config_resets_stage_records(self, tmp_path):
        raw = small_config_dict()
        raw["classifiers"] = {"lr": {}, "const_pos": {}}
        raw["acquisition"].update({"rows": 4, "cols": 4, "n_samples": 64})
        raw["ood"]["acquisition"].update({"rows": 3, "cols": 3})
        outdir = tmp_path / "reused"
        first = ExperimentRunner(config_from_dict(raw), outdir)
        first.simulate()
        assert first.manifest["stages"]["simulate"]["status"] == "complete"

        raw["seed"] = 777
        second = ExperimentRunner(config_from_dict(raw), outdir)
        assert second.manifest["stages"] == {}
        assert second.manifest["config"]["seed"] == 777
        assert second.manifest["incomplete"]

    def test_same_config_keeps_progress(self, tmp_path):
        raw = small_config_dict()
        raw["classifiers"] = {"lr": {}, "const_pos": {}}
        raw["acquisition"].update({"rows": 4, "cols": 4, "n_samples": 64})
        raw["ood"]["acquisition"].update({"rows": 3, "cols": 3})
        outdir = tmp_path / "kept"
        ExperimentRunner(config_from_dict(raw), outdir).simulate()
        again = ExperimentRunner(config_from_dict(raw), outdir)
        assert again.manifest["stages"]["simulate"]["status"] == "complete"


class TestRecordsToGrid:
    def test_duplicate_cell_detected(self):
        from pambench.dataset import SignalRecords
        from pambench.harness import _records_to_grid

        values = np.arange(8.0).reshape(4, 2)
        # (0,0) appears twice, (1,1) is missing: count matches, coverage doesn't
        records = SignalRecords(
            values, [0, 0, 1, 1], [7, 7, 7, 7], [0, 0, 1, 0], [0, 1, 0, 0], 8.0e7
        )
        with pytest.raises(ConfigError, match="cover the grid"):
            _records_to_grid(records, 100.0, 40.0)

    def test_roundtrip_from_simulation(self):
        from pambench.harness import _records_to_grid
        from pambench.phantom import AcquisitionConfig, simulate_dataset
        from test_phantom import small_population

        cfg = AcquisitionConfig(rows=3, cols=5, n_samples=64, noise_sigma=1e-4)
        data = simulate_dataset(small_population(), cfg)
        records = data.to_records()
        part = records.subset(records.sample_ids == 2)
        grid = _records_to_grid(part, cfg.row_step_um, cfg.col_step_um)
        assert np.array_equal(grid.signals, data.samples[2].grid.signals)


class TestStageErrors:
    def test_evaluate_before_train_fails_with_stage_tag(self, tmp_path):
        config = config_from_dict(small_config_dict())
        runner = ExperimentRunner(config, tmp_path / "fresh")
        with pytest.raises(StageError) as err:
            runner.evaluate()
        assert err.value.stage == "evaluate"
        manifest = json.loads((tmp_path / "fresh" / "manifest.json").read_text())
        assert manifest["stages"]["evaluate"]["status"] == "failed"
        assert manifest["incomplete"]

    def test_zero_variance_signals_dropped_and_logged(self, tmp_path):
        raw = small_config_dict()
        # noiseless, and some columns carry no absorber at all
        raw["acquisition"]["noise_sigma"] = 0.0
        raw["acquisition"].update({"rows": 6, "cols": 6})
        raw["ood"]["acquisition"].update({"noise_sigma": 0.0})
        raw["population"]["benign"]["n_layers_range"] = [0, 1]
        raw["population"]["malignant"]["n_layers_range"] = [0, 1]
        raw["classifiers"] = {"lr": {}, "const_pos": {}}
        config = config_from_dict(raw)
        runner = ExperimentRunner(config, tmp_path / "drop")
        runner.simulate()
        runner.preprocess()
        stats = runner.manifest["stages"]["preprocess"]
        assert stats["dropped_zero_variance"] > 0
        log = (tmp_path / "drop" / "preprocess_log.txt").read_text()
        assert "dropped zero-variance signal" in log
