"""Synthetic tissue phantoms and band-limited photoacoustic A-scan simulation.

The forward model: an absorber layer at depth z produces an initial
pressure Gamma * eta * mu_a * F(z), with the fluence decaying exponentially
from the surface (Beer-Lambert with an effective attenuation). Each layer
contributes a Gaussian-enveloped transducer impulse delayed by the one-way
time of flight z / c, because photoacoustic generation happens at the
absorber, not at the probe. Class contrast is carried by the absorption
ranges: benign phantoms draw stronger mu_a than malignant ones, with
overlapping tails so the classification task stays nontrivial.

All randomness is counter-based: every (sample, i, j) cell derives its own
generator from the global seed, so simulation order and thread count never
change the output.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from numpy.random import Generator, Philox, SeedSequence

from .dataset import SignalRecords
from .errors import ConfigError, InvalidInputError
from .signal_core import AScan, ScanGrid

BENIGN = "benign"
MALIGNANT = "malignant"
#: cancer is the positive class
LABEL_BY_CLASS = {BENIGN: 0, MALIGNANT: 1}

# Stream tags keep the per-cell geometry and noise substreams distinct.
_STREAM_SAMPLE = 0
_STREAM_GEOMETRY = 1
_STREAM_NOISE = 2


def _substream(seed: int, *key: int) -> Generator:
    return Generator(Philox(SeedSequence(seed, spawn_key=tuple(int(k) for k in key))))


@dataclass(frozen=True)
class OpticalProperties:
    """Pointwise optical/thermodynamic description of an absorber.

    mu_a in 1/mm, eta dimensionless, beta in 1/K, kappa in 1/Pa, rho in
    kg/m^3, c_v in J/(kg K).
    """

    mu_a: float
    eta: float
    beta: float
    kappa: float
    rho: float
    c_v: float

    def __post_init__(self):
        if not (self.mu_a >= 0):
            raise InvalidInputError("mu_a must be >= 0")
        if not (0 <= self.eta <= 1):
            raise InvalidInputError("eta must lie in [0, 1]")
        for name in ("beta", "kappa", "rho", "c_v"):
            if not (getattr(self, name) > 0):
                raise InvalidInputError(f"{name} must be > 0")


#: Water-like thermodynamic baseline; mu_a/eta vary per layer.
WATER_BETA = 2.07e-4
WATER_KAPPA = 4.48e-10
WATER_RHO = 1000.0
WATER_C_V = 4184.0


def grueneisen(props: OpticalProperties) -> float:
    """Thermoacoustic efficiency beta / (kappa * rho * c_v)."""
    if not (props.kappa > 0 and props.rho > 0 and props.c_v > 0):
        raise InvalidInputError("kappa, rho and c_v must be > 0")
    return props.beta / (props.kappa * props.rho * props.c_v)


def initial_pressure(props: OpticalProperties, fluence: float) -> float:
    """Local pressure rise for a given optical fluence (J/cm^2)."""
    if not (fluence >= 0):
        raise InvalidInputError("fluence must be >= 0")
    return grueneisen(props) * props.eta * props.mu_a * fluence


@dataclass(frozen=True)
class TransducerModel:
    """Focused detector model: 10 MHz center, 60% fractional bandwidth and
    18 mm focal length by default. The focal length is carried as metadata
    and does not shape the simulated beam."""

    center_freq: float = 10e6
    fractional_bandwidth: float = 0.6
    focal_length_mm: float = 18.0

    def __post_init__(self):
        if not (self.center_freq > 0):
            raise InvalidInputError("center_freq must be > 0")
        if not (0 < self.fractional_bandwidth < 2):
            raise InvalidInputError("fractional_bandwidth must lie in (0, 2)")


def impulse_sigma(model: TransducerModel) -> float:
    """Gaussian envelope scale giving a -6 dB two-sided spectral width of
    fractional_bandwidth * center_freq."""
    width = model.fractional_bandwidth * model.center_freq
    return math.sqrt(2.0 * math.log(2.0)) / (math.pi * width)


def transducer_impulse(t, model: TransducerModel):
    """Gaussian-enveloped cosine impulse response evaluated at time(s) t (s)."""
    sigma = impulse_sigma(model)
    t = np.asarray(t, dtype=np.float64)
    value = np.cos(2.0 * np.pi * model.center_freq * t) * np.exp(
        -(t * t) / (2.0 * sigma * sigma)
    )
    return value if value.ndim else float(value)


@dataclass(frozen=True)
class AcquisitionConfig:
    """Raster scan and digitizer settings; defaults mirror a 100 x 250 scan
    at 80 MHz with 1000-sample records."""

    sample_rate: float = 8.0e7
    n_samples: int = 1000
    rows: int = 100
    cols: int = 250
    row_step_um: float = 100.0
    col_step_um: float = 40.0
    noise_sigma: float = 0.0
    rng_seed: int = 0

    def __post_init__(self):
        if not (self.sample_rate > 0):
            raise InvalidInputError("sample_rate must be > 0")
        if self.n_samples < 2:
            raise InvalidInputError("n_samples must be >= 2")
        if self.rows < 1 or self.cols < 1:
            raise InvalidInputError("rows and cols must be >= 1")
        if not (self.row_step_um > 0 and self.col_step_um > 0):
            raise InvalidInputError("step sizes must be > 0")
        if not (self.noise_sigma >= 0):
            raise InvalidInputError("noise_sigma must be >= 0")


@dataclass(frozen=True)
class AbsorberLayer:
    depth_mm: float
    props: OpticalProperties

    def __post_init__(self):
        if not (self.depth_mm >= 0):
            raise InvalidInputError("depth_mm must be >= 0")


@dataclass(frozen=True)
class TissuePhantom:
    """Spatial absorber description for one virtual tissue sample.

    ``layers[i][j]`` lists the absorbers under lateral position (i, j) with
    strictly increasing depths. Fluence at depth z is
    surface_fluence * exp(-fluence_decay * z); speed_of_sound is in mm/us.
    """

    layers: tuple
    surface_fluence: float
    fluence_decay: float
    class_label: str
    speed_of_sound: float = 1.54

    def __post_init__(self):
        if self.class_label not in LABEL_BY_CLASS:
            raise InvalidInputError(
                f"class_label must be one of {sorted(LABEL_BY_CLASS)}"
            )
        if not (self.surface_fluence > 0):
            raise InvalidInputError("surface_fluence must be > 0")
        if not (self.fluence_decay >= 0):
            raise InvalidInputError("fluence_decay must be >= 0")
        if not (self.speed_of_sound > 0):
            raise InvalidInputError("speed_of_sound must be > 0")
        layers = tuple(tuple(tuple(col) for col in row) for row in self.layers)
        if not layers or not layers[0]:
            raise InvalidInputError("phantom needs at least one lateral position")
        width = len(layers[0])
        for i, row in enumerate(layers):
            if len(row) != width:
                raise InvalidInputError("ragged phantom: rows differ in width")
            for j, col in enumerate(row):
                depths = [layer.depth_mm for layer in col]
                if any(b <= a for a, b in zip(depths, depths[1:])):
                    raise InvalidInputError(
                        f"depths at ({i}, {j}) must be strictly increasing"
                    )
        object.__setattr__(self, "layers", layers)

    @property
    def rows(self) -> int:
        return len(self.layers)

    @property
    def cols(self) -> int:
        return len(self.layers[0])

    @property
    def label(self) -> int:
        return LABEL_BY_CLASS[self.class_label]


def simulate_ascan(
    phantom: TissuePhantom,
    lateral_index: tuple[int, int],
    model: TransducerModel,
    config: AcquisitionConfig,
    sample_id: int = 0,
    truncation_log: list | None = None,
) -> AScan:
    """Simulate the A-scan recorded above one lateral position.

    Each absorber layer arrives after the one-way time of flight
    depth / speed_of_sound and contributes an impulse scaled by its initial
    pressure. Layers arriving beyond the record are skipped; the skip is
    appended to ``truncation_log`` when one is given. Gaussian noise is
    drawn from a generator keyed on (rng_seed, sample_id, i, j), so the
    result is deterministic no matter how calls are ordered.
    """
    i, j = lateral_index
    if not (0 <= i < phantom.rows and 0 <= j < phantom.cols):
        raise InvalidInputError(f"lateral index ({i}, {j}) outside phantom")
    n = config.n_samples
    t = np.arange(n) / config.sample_rate
    record_end = (n - 1) / config.sample_rate
    signal = np.zeros(n)
    for layer in phantom.layers[i][j]:
        arrival = layer.depth_mm / phantom.speed_of_sound * 1e-6
        if arrival > record_end:
            if truncation_log is not None:
                truncation_log.append(
                    f"sample {sample_id} cell ({i}, {j}): layer at "
                    f"{layer.depth_mm:.3f} mm arrives {arrival * 1e6:.3f} us, "
                    f"beyond the {record_end * 1e6:.3f} us record"
                )
            continue
        fluence = phantom.surface_fluence * math.exp(
            -phantom.fluence_decay * layer.depth_mm
        )
        amplitude = initial_pressure(layer.props, fluence)
        signal += amplitude * transducer_impulse(t - arrival, model)
    if config.noise_sigma > 0:
        rng = _substream(config.rng_seed, sample_id, i, j, _STREAM_NOISE)
        signal = signal + rng.normal(0.0, config.noise_sigma, size=n)
    return AScan(signal, config.sample_rate)


@dataclass(frozen=True)
class ClassSpec:
    """Population parameters for one tissue class.

    Per-layer absorption is drawn uniformly from ``mu_a_range`` (1/mm) and
    scaled by a per-sample jitter factor; ``fluence_gain_range`` is a
    per-sample multiplier on the surface fluence (detector/illumination
    gain). Layer counts and depths are drawn per lateral position.
    """

    n_samples: int
    mu_a_range: tuple[float, float]
    n_layers_range: tuple[int, int] = (1, 3)
    depth_range_mm: tuple[float, float] = (0.5, 4.0)
    fluence_gain_range: tuple[float, float] = (1.0, 1.0)

    def __post_init__(self):
        if self.n_samples < 1:
            raise ConfigError("each class needs at least one virtual sample")
        lo, hi = self.mu_a_range
        if not (0 <= lo <= hi):
            raise ConfigError("mu_a_range must satisfy 0 <= lo <= hi")
        klo, khi = self.n_layers_range
        if not (0 <= klo <= khi):
            raise ConfigError("n_layers_range must satisfy 0 <= lo <= hi")
        dlo, dhi = self.depth_range_mm
        if not (0 <= dlo <= dhi):
            raise ConfigError("depth_range_mm must satisfy 0 <= lo <= hi")
        glo, ghi = self.fluence_gain_range
        if not (0 < glo <= ghi):
            raise ConfigError("fluence_gain_range must satisfy 0 < lo <= hi")


@dataclass(frozen=True)
class PhantomPopulation:
    """Declarative description of the virtual samples to synthesize."""

    benign: ClassSpec
    malignant: ClassSpec
    surface_fluence: float = 0.02
    fluence_decay: float = 0.1
    speed_of_sound: float = 1.54
    eta: float = 0.9
    beta: float = WATER_BETA
    kappa: float = WATER_KAPPA
    rho: float = WATER_RHO
    c_v: float = WATER_C_V
    sample_mu_a_jitter: float = 0.1

    def __post_init__(self):
        if not (self.surface_fluence > 0):
            raise ConfigError("surface_fluence must be > 0")
        if not (self.fluence_decay >= 0):
            raise ConfigError("fluence_decay must be >= 0")
        if not (0 <= self.sample_mu_a_jitter < 1):
            raise ConfigError("sample_mu_a_jitter must lie in [0, 1)")


@dataclass
class SimulatedSample:
    sample_id: int
    class_label: str
    label: int
    grid: ScanGrid
    phantom: TissuePhantom


@dataclass
class SimulatedDataset:
    samples: list
    truncation_log: list

    def to_records(self) -> SignalRecords:
        """Flatten grids into labeled per-position records."""
        values, labels, ids, rows, cols = [], [], [], [], []
        rate = self.samples[0].grid.sample_rate
        for sample in self.samples:
            grid = sample.grid
            h, w, n = grid.signals.shape
            values.append(grid.signals.reshape(h * w, n))
            labels.append(np.full(h * w, sample.label, dtype=np.uint8))
            ids.append(np.full(h * w, sample.sample_id, dtype=np.int64))
            ii, jj = np.divmod(np.arange(h * w), w)
            rows.append(ii.astype(np.int32))
            cols.append(jj.astype(np.int32))
        return SignalRecords(
            np.concatenate(values),
            np.concatenate(labels),
            np.concatenate(ids),
            np.concatenate(rows),
            np.concatenate(cols),
            rate,
        )


def build_phantom(
    population: PhantomPopulation,
    spec: ClassSpec,
    class_label: str,
    sample_id: int,
    config: AcquisitionConfig,
) -> TissuePhantom:
    """Draw one virtual sample's absorber geometry from the population."""
    rng_sample = _substream(config.rng_seed, sample_id, _STREAM_SAMPLE)
    jitter = population.sample_mu_a_jitter
    mu_a_scale = rng_sample.uniform(1.0 - jitter, 1.0 + jitter)
    gain = rng_sample.uniform(*spec.fluence_gain_range)

    layers = []
    for i in range(config.rows):
        row = []
        for j in range(config.cols):
            rng = _substream(config.rng_seed, sample_id, i, j, _STREAM_GEOMETRY)
            k = int(rng.integers(spec.n_layers_range[0], spec.n_layers_range[1] + 1))
            depths = np.sort(rng.uniform(*spec.depth_range_mm, size=k))
            while k > 1 and (np.diff(depths) <= 0).any():
                depths = np.sort(rng.uniform(*spec.depth_range_mm, size=k))
            mu_a = rng.uniform(*spec.mu_a_range, size=k) * mu_a_scale
            row.append(
                tuple(
                    AbsorberLayer(
                        float(depth),
                        OpticalProperties(
                            mu_a=float(m),
                            eta=population.eta,
                            beta=population.beta,
                            kappa=population.kappa,
                            rho=population.rho,
                            c_v=population.c_v,
                        ),
                    )
                    for depth, m in zip(depths, mu_a)
                )
            )
        layers.append(tuple(row))
    return TissuePhantom(
        layers=tuple(layers),
        surface_fluence=population.surface_fluence * gain,
        fluence_decay=population.fluence_decay,
        class_label=class_label,
        speed_of_sound=population.speed_of_sound,
    )


def _simulate_sample(
    population: PhantomPopulation,
    spec: ClassSpec,
    class_label: str,
    sample_id: int,
    model: TransducerModel,
    config: AcquisitionConfig,
) -> tuple[SimulatedSample, list]:
    phantom = build_phantom(population, spec, class_label, sample_id, config)
    log: list = []
    cells = [
        [
            simulate_ascan(
                phantom, (i, j), model, config, sample_id=sample_id, truncation_log=log
            )
            for j in range(config.cols)
        ]
        for i in range(config.rows)
    ]
    grid = ScanGrid.from_ascans(cells, config.row_step_um, config.col_step_um)
    return (
        SimulatedSample(sample_id, class_label, LABEL_BY_CLASS[class_label], grid, phantom),
        log,
    )


def simulate_dataset(
    population: PhantomPopulation,
    config: AcquisitionConfig,
    model: TransducerModel | None = None,
    first_sample_id: int = 0,
    threads: int = 1,
) -> SimulatedDataset:
    """Simulate every virtual sample of a population.

    Sample IDs are assigned sequentially starting at ``first_sample_id``,
    benign samples first. Grids for distinct samples may be simulated in
    parallel; the per-cell generators make the result independent of thread
    count.
    """
    model = model or TransducerModel()
    plan = []
    sid = first_sample_id
    for class_label, spec in ((BENIGN, population.benign), (MALIGNANT, population.malignant)):
        if spec.n_samples < 1:
            raise ConfigError(f"class {class_label} is empty")
        for _ in range(spec.n_samples):
            plan.append((spec, class_label, sid))
            sid += 1

    def work(entry):
        spec, class_label, sample_id = entry
        return _simulate_sample(population, spec, class_label, sample_id, model, config)

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(work, plan))
    else:
        results = [work(entry) for entry in plan]

    samples = [sample for sample, _ in results]
    log = [line for _, lines in results for line in lines]
    return SimulatedDataset(samples, log)
