import numpy as np
import pytest

from pambench.errors import ConfigError, InvalidInputError
from pambench.phantom import (
    AbsorberLayer,
    AcquisitionConfig,
    ClassSpec,
    OpticalProperties,
    PhantomPopulation,
    TissuePhantom,
    TransducerModel,
    WATER_BETA,
    WATER_C_V,
    WATER_KAPPA,
    WATER_RHO,
    build_phantom,
    grueneisen,
    impulse_sigma,
    initial_pressure,
    simulate_ascan,
    simulate_dataset,
    transducer_impulse,
)
from pambench.signal_core import AScan, envelope


def props(mu_a=1.0, eta=1.0, beta=1.0, kappa=1.0, rho=1.0, c_v=1.0):
    return OpticalProperties(mu_a=mu_a, eta=eta, beta=beta, kappa=kappa, rho=rho, c_v=c_v)


def water_props(mu_a=1.0, eta=1.0):
    return OpticalProperties(
        mu_a=mu_a, eta=eta, beta=WATER_BETA, kappa=WATER_KAPPA, rho=WATER_RHO, c_v=WATER_C_V
    )


def single_absorber_phantom(depth_mm, mu_a=1.0, fluence=1.0, decay=0.0, speed=1.54):
    layer = AbsorberLayer(depth_mm, water_props(mu_a))
    return TissuePhantom(
        layers=(((layer,),),),
        surface_fluence=fluence,
        fluence_decay=decay,
        class_label="benign",
        speed_of_sound=speed,
    )


class TestGrueneisen:
    def test_identity_case(self):
        assert grueneisen(props()) == 1.0

    def test_forced_by_formula(self):
        assert grueneisen(props(beta=2.0, kappa=1.0, rho=2.0, c_v=1.0)) == 1.0

    def test_water_like_value(self):
        # hand evaluation: 2.07e-4 / (4.48e-10 * 1000 * 4184)
        value = grueneisen(water_props())
        assert value == pytest.approx(0.11043345397432396, rel=1e-12)

    def test_invalid_inputs(self):
        with pytest.raises(InvalidInputError):
            props(kappa=-1.0)
        with pytest.raises(InvalidInputError):
            props(rho=0.0)


class TestInitialPressure:
    def test_zero_absorption(self):
        assert initial_pressure(props(mu_a=0.0), 5.0) == 0.0

    def test_forced_by_formula(self):
        assert initial_pressure(props(mu_a=2.0), 3.0) == 6.0

    def test_negative_fluence(self):
        with pytest.raises(InvalidInputError):
            initial_pressure(props(), -0.1)

    def test_matches_scalar_recomputation(self):
        rng = np.random.default_rng(0)
        for _ in range(20):
            mu_a, eta = rng.uniform(0.01, 5.0), rng.uniform(0.1, 1.0)
            beta, kappa = rng.uniform(1e-5, 1e-3), rng.uniform(1e-11, 1e-9)
            rho, c_v = rng.uniform(800, 1200), rng.uniform(1000, 5000)
            fluence = rng.uniform(0.0, 1.0)
            p = props(mu_a, eta, beta, kappa, rho, c_v)
            expected = (beta / (kappa * rho * c_v)) * eta * mu_a * fluence
            assert initial_pressure(p, fluence) == pytest.approx(expected, rel=1e-12)

    def test_linear_in_fluence_and_absorption(self):
        rng = np.random.default_rng(1)
        for _ in range(20):
            base = props(mu_a=rng.uniform(0.1, 2.0))
            f = rng.uniform(0.1, 2.0)
            a = rng.uniform(0.5, 4.0)
            assert initial_pressure(base, a * f) == pytest.approx(
                a * initial_pressure(base, f), rel=1e-12
            )
            scaled = props(mu_a=a * base.mu_a)
            assert initial_pressure(scaled, f) == pytest.approx(
                a * initial_pressure(base, f), rel=1e-12
            )


class TestTransducerImpulse:
    def test_peak_at_zero(self):
        assert transducer_impulse(0.0, TransducerModel()) == 1.0

    def test_gaussian_decay(self):
        model = TransducerModel()
        t = 10.5 * impulse_sigma(model)
        assert abs(transducer_impulse(t, model)) < 1e-12
        assert abs(transducer_impulse(-t, model)) < 1e-12

    def test_measured_bandwidth(self):
        model = TransducerModel()  # 10 MHz, 60% fractional bandwidth
        fs, n = 8.0e7, 8192
        t = (np.arange(n) - n // 2) / fs
        spectrum = np.abs(np.fft.rfft(transducer_impulse(t, model)))
        freqs = np.fft.rfftfreq(n, 1.0 / fs)
        above = freqs[spectrum >= spectrum.max() / 2]
        width = above.max() - above.min()
        assert width == pytest.approx(6.0e6, rel=0.05)

    def test_validation(self):
        with pytest.raises(InvalidInputError):
            TransducerModel(center_freq=-1.0)
        with pytest.raises(InvalidInputError):
            TransducerModel(fractional_bandwidth=2.5)


class TestSimulateAscan:
    def test_no_absorbers_no_noise(self):
        phantom = TissuePhantom(
            layers=(((),),), surface_fluence=1.0, fluence_decay=0.0, class_label="benign"
        )
        cfg = AcquisitionConfig(rows=1, cols=1, n_samples=500, noise_sigma=0.0)
        scan = simulate_ascan(phantom, (0, 0), TransducerModel(), cfg)
        assert np.abs(scan.samples).max() == 0.0

    def test_time_of_flight_peak(self):
        # 1.54 mm at 1.54 mm/us arrives at 1 us = sample 80 at 80 MHz
        phantom = single_absorber_phantom(1.54)
        cfg = AcquisitionConfig(rows=1, cols=1, noise_sigma=0.0)
        scan = simulate_ascan(phantom, (0, 0), TransducerModel(), cfg)
        peak = int(envelope(scan).argmax())
        assert abs(peak - 80) <= 2

    def test_stronger_absorber_sets_the_peak(self):
        a1, a2 = 2.0, 0.8
        layers = (
            AbsorberLayer(1.0, water_props(a1)),
            AbsorberLayer(8.0, water_props(a2)),
        )
        phantom = TissuePhantom(
            layers=((layers,),), surface_fluence=1.0, fluence_decay=0.0,
            class_label="benign",
        )
        cfg = AcquisitionConfig(rows=1, cols=1, noise_sigma=0.0)
        scan = simulate_ascan(phantom, (0, 0), TransducerModel(), cfg)
        expected = initial_pressure(water_props(a1), 1.0)
        assert envelope(scan).max() == pytest.approx(expected, rel=0.05)

    def test_superposition(self):
        layer_a = AbsorberLayer(1.0, water_props(1.5))
        layer_b = AbsorberLayer(3.0, water_props(0.7))
        cfg = AcquisitionConfig(rows=1, cols=1, noise_sigma=0.0)
        model = TransducerModel()

        def scan_for(layers):
            phantom = TissuePhantom(
                layers=((layers,),), surface_fluence=1.0, fluence_decay=0.0,
                class_label="benign",
            )
            return simulate_ascan(phantom, (0, 0), model, cfg).samples

        combined = scan_for((layer_a, layer_b))
        parts = scan_for((layer_a,)) + scan_for((layer_b,))
        assert np.abs(combined - parts).max() <= 1e-9

    def test_doubling_absorption_doubles_signal(self):
        cfg = AcquisitionConfig(rows=1, cols=1, noise_sigma=0.0)
        base = simulate_ascan(
            single_absorber_phantom(2.0, mu_a=0.8), (0, 0), TransducerModel(), cfg
        )
        doubled = simulate_ascan(
            single_absorber_phantom(2.0, mu_a=1.6), (0, 0), TransducerModel(), cfg
        )
        assert np.abs(doubled.samples - 2.0 * base.samples).max() <= 1e-12

    def test_truncated_layer_is_logged(self):
        # record is 1000 / 80 MHz = 12.5 us; 25 mm at 1.54 mm/us needs 16.2 us
        phantom = single_absorber_phantom(25.0)
        cfg = AcquisitionConfig(rows=1, cols=1, noise_sigma=0.0)
        log = []
        scan = simulate_ascan(
            phantom, (0, 0), TransducerModel(), cfg, truncation_log=log
        )
        assert np.abs(scan.samples).max() == 0.0
        assert len(log) == 1 and "25.000 mm" in log[0]

    def test_peak_time_linear_in_depth(self):
        cfg = AcquisitionConfig(rows=1, cols=1, n_samples=1000, noise_sigma=0.0)
        model = TransducerModel()
        depths = np.linspace(1.0, 10.0, 10)
        peaks = []
        for depth in depths:
            scan = simulate_ascan(
                single_absorber_phantom(depth), (0, 0), model, cfg
            )
            peaks.append(envelope(scan).argmax() / cfg.sample_rate)
        peaks = np.asarray(peaks)
        slope, intercept = np.polyfit(depths, peaks, 1)
        fitted = slope * depths + intercept
        ss_res = np.sum((peaks - fitted) ** 2)
        ss_tot = np.sum((peaks - peaks.mean()) ** 2)
        assert 1.0 - ss_res / ss_tot > 0.999
        # slope is the inverse speed of sound (in seconds per mm)
        assert slope == pytest.approx(1e-6 / 1.54, rel=0.01)

    def test_out_of_range_lateral_index(self):
        phantom = single_absorber_phantom(1.0)
        cfg = AcquisitionConfig(rows=1, cols=1, noise_sigma=0.0)
        with pytest.raises(InvalidInputError):
            simulate_ascan(phantom, (1, 0), TransducerModel(), cfg)

    def test_noise_stream_is_counter_based(self):
        phantom = single_absorber_phantom(1.0)
        cfg = AcquisitionConfig(rows=1, cols=1, noise_sigma=0.1, rng_seed=9)
        model = TransducerModel()
        a = simulate_ascan(phantom, (0, 0), model, cfg, sample_id=3)
        b = simulate_ascan(phantom, (0, 0), model, cfg, sample_id=3)
        c = simulate_ascan(phantom, (0, 0), model, cfg, sample_id=4)
        assert np.array_equal(a.samples, b.samples)
        assert not np.array_equal(a.samples, c.samples)


def small_population(n_benign=2, n_malignant=2):
    return PhantomPopulation(
        benign=ClassSpec(
            n_samples=n_benign,
            mu_a_range=(1.3, 2.3),
            n_layers_range=(1, 2),
            depth_range_mm=(0.5, 2.5),
        ),
        malignant=ClassSpec(
            n_samples=n_malignant,
            mu_a_range=(0.1, 0.55),
            n_layers_range=(1, 2),
            depth_range_mm=(0.5, 2.5),
        ),
    )


class TestSimulateDataset:
    def test_counting_and_sample_ids(self):
        cfg = AcquisitionConfig(rows=10, cols=10, n_samples=64, noise_sigma=0.0)
        data = simulate_dataset(small_population(), cfg)
        records = data.to_records()
        assert len(records) == 4 * 100
        assert records.sample_id_set() == {0, 1, 2, 3}
        labels_by_sample = {
            sid: records.labels[records.sample_ids == sid][0]
            for sid in records.sample_id_set()
        }
        assert labels_by_sample == {0: 0, 1: 0, 2: 1, 3: 1}

    def test_determinism(self):
        cfg = AcquisitionConfig(rows=4, cols=4, n_samples=64, noise_sigma=1e-4, rng_seed=5)
        a = simulate_dataset(small_population(), cfg).to_records()
        b = simulate_dataset(small_population(), cfg).to_records()
        assert np.array_equal(a.values, b.values)

    def test_thread_count_does_not_change_output(self):
        cfg = AcquisitionConfig(rows=4, cols=4, n_samples=64, noise_sigma=1e-4, rng_seed=5)
        a = simulate_dataset(small_population(), cfg, threads=1).to_records()
        b = simulate_dataset(small_population(), cfg, threads=4).to_records()
        assert np.array_equal(a.values, b.values)

    def test_class_contrast_direction(self):
        # healthy tissue produces stronger envelopes than cancerous tissue
        cfg = AcquisitionConfig(
            rows=16, cols=16, n_samples=256, noise_sigma=4.5e-4, rng_seed=11
        )
        data = simulate_dataset(small_population(2, 2), cfg)
        records = data.to_records()
        assert len(records) >= 1000
        from pambench.signal_core import analytic_signal_batch

        peaks = np.abs(analytic_signal_batch(records.values)).max(axis=1)
        benign = peaks[records.labels == 0].mean()
        malignant = peaks[records.labels == 1].mean()
        assert benign > 1.5 * malignant

    def test_empty_class_rejected(self):
        with pytest.raises(ConfigError):
            ClassSpec(n_samples=0, mu_a_range=(0.1, 0.5))

    def test_per_sample_gain_draws(self):
        population = PhantomPopulation(
            benign=ClassSpec(
                n_samples=2, mu_a_range=(1.0, 1.0), fluence_gain_range=(0.5, 1.5)
            ),
            malignant=ClassSpec(n_samples=2, mu_a_range=(0.2, 0.2)),
        )
        cfg = AcquisitionConfig(rows=2, cols=2, n_samples=64, noise_sigma=0.0, rng_seed=2)
        b0 = build_phantom(population, population.benign, "benign", 0, cfg)
        b1 = build_phantom(population, population.benign, "benign", 1, cfg)
        assert b0.surface_fluence != b1.surface_fluence


class TestPhantomValidation:
    def test_depths_strictly_increasing(self):
        layers = (
            AbsorberLayer(2.0, water_props()),
            AbsorberLayer(1.0, water_props()),
        )
        with pytest.raises(InvalidInputError):
            TissuePhantom(
                layers=((layers,),), surface_fluence=1.0, fluence_decay=0.0,
                class_label="benign",
            )

    def test_class_label_checked(self):
        with pytest.raises(InvalidInputError):
            TissuePhantom(
                layers=(((),),), surface_fluence=1.0, fluence_decay=0.0,
                class_label="unknown",
            )

    def test_acquisition_validation(self):
        with pytest.raises(InvalidInputError):
            AcquisitionConfig(n_samples=1)
        with pytest.raises(InvalidInputError):
            AcquisitionConfig(noise_sigma=-0.1)
