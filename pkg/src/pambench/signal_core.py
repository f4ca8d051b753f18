"""Time-domain A-scan containers, analytic signal / envelope, and MAP images.

The analytic signal is built in the frequency domain: zero the negative
frequencies, double the positive ones, leave DC (and Nyquist, for even
length) untouched. Its modulus is the detection envelope, and the maximum
amplitude projection (MAP) collapses each A-scan of a raster grid to the
peak of that envelope.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import GridError, InvalidInputError


def _as_readonly_f64(values) -> np.ndarray:
    arr = np.asarray(values, dtype=np.float64).copy()
    arr.flags.writeable = False
    return arr


def _check_finite(samples: np.ndarray) -> None:
    bad = np.flatnonzero(~np.isfinite(samples))
    if bad.size:
        raise InvalidInputError(f"sample {bad[0]} is not finite")


@dataclass(frozen=True)
class AScan:
    """One time-domain photoacoustic signal.

    Attributes
    ----------
    samples : np.ndarray
        Real amplitudes, length >= 2, all finite.
    sample_rate : float
        Sampling frequency in Hz, > 0.
    """

    samples: np.ndarray
    sample_rate: float

    def __post_init__(self):
        samples = _as_readonly_f64(self.samples)
        if samples.ndim != 1 or samples.size < 2:
            raise InvalidInputError("an A-scan needs at least 2 samples")
        _check_finite(samples)
        if not (self.sample_rate > 0):
            raise InvalidInputError("sample_rate must be > 0")
        object.__setattr__(self, "samples", samples)
        object.__setattr__(self, "sample_rate", float(self.sample_rate))

    def __len__(self) -> int:
        return self.samples.size


@dataclass(frozen=True)
class ScanGrid:
    """H x W raster of A-scans with physical step sizes in micrometers.

    ``signals`` is stored as an (H, W, N) float array; every cell shares one
    sample rate. Row/column indices follow raster order, row 0 at the top.
    """

    signals: np.ndarray
    sample_rate: float
    row_step_um: float
    col_step_um: float

    def __post_init__(self):
        signals = np.asarray(self.signals, dtype=np.float64)
        if signals.ndim != 3:
            raise GridError("signals must be an (H, W, N) array")
        h, w, n = signals.shape
        if h < 1 or w < 1:
            raise GridError("grid needs at least one row and one column")
        if n < 2:
            raise GridError("grid signals need at least 2 samples")
        if not np.isfinite(signals).all():
            raise GridError("grid contains non-finite samples")
        if not (self.sample_rate > 0):
            raise GridError("sample_rate must be > 0")
        if not (self.row_step_um > 0 and self.col_step_um > 0):
            raise GridError("step sizes must be > 0")
        signals = signals.copy()
        signals.flags.writeable = False
        object.__setattr__(self, "signals", signals)

    @classmethod
    def from_ascans(cls, ascans, row_step_um: float, col_step_um: float) -> "ScanGrid":
        """Build a grid from a nested [H][W] list of AScan objects."""
        if not ascans or not ascans[0]:
            raise GridError("grid needs at least one row and one column")
        rates = {s.sample_rate for row in ascans for s in row}
        if len(rates) != 1:
            raise GridError("all A-scans must share one sample_rate")
        lengths = {len(s) for row in ascans for s in row}
        if len(lengths) != 1:
            raise GridError("all A-scans must share one length")
        widths = {len(row) for row in ascans}
        if len(widths) != 1:
            raise GridError("ragged grid: rows have different widths")
        stacked = np.stack([np.stack([s.samples for s in row]) for row in ascans])
        return cls(stacked, rates.pop(), row_step_um, col_step_um)

    @property
    def rows(self) -> int:
        return self.signals.shape[0]

    @property
    def cols(self) -> int:
        return self.signals.shape[1]

    @property
    def n_samples(self) -> int:
        return self.signals.shape[2]

    def ascan(self, i: int, j: int) -> AScan:
        """A-scan at 0-based raster position (i, j)."""
        return AScan(self.signals[i, j], self.sample_rate)

    def transpose(self) -> "ScanGrid":
        return ScanGrid(
            np.transpose(self.signals, (1, 0, 2)),
            self.sample_rate,
            self.col_step_um,
            self.row_step_um,
        )


@dataclass(frozen=True)
class MapImage:
    """Maximum-amplitude-projection image; every pixel is >= 0."""

    pixels: np.ndarray

    def __post_init__(self):
        pixels = _as_readonly_f64(self.pixels)
        if pixels.ndim != 2:
            raise InvalidInputError("pixels must be a 2-D array")
        if not np.isfinite(pixels).all() or (pixels < 0).any():
            raise InvalidInputError("pixels must be finite and non-negative")
        object.__setattr__(self, "pixels", pixels)

    @property
    def rows(self) -> int:
        return self.pixels.shape[0]

    @property
    def cols(self) -> int:
        return self.pixels.shape[1]


def _analytic_weights(n: int) -> np.ndarray:
    # DC stays at 1; Nyquist (even n) stays at 1; positive bins doubled.
    h = np.zeros(n)
    if n % 2 == 0:
        h[0] = 1.0
        h[1 : n // 2] = 2.0
        h[n // 2] = 1.0
    else:
        h[0] = 1.0
        h[1 : (n + 1) // 2] = 2.0
    return h


def analytic_signal_batch(signals: np.ndarray) -> np.ndarray:
    """Frequency-domain analytic signal along the last axis of a real array."""
    signals = np.asarray(signals, dtype=np.float64)
    n = signals.shape[-1]
    if n < 2:
        raise InvalidInputError("need at least 2 samples")
    _check_finite(signals.ravel())
    spectrum = np.fft.fft(signals, axis=-1)
    return np.fft.ifft(spectrum * _analytic_weights(n), axis=-1)


def analytic_signal(s: AScan) -> np.ndarray:
    """Complex analytic signal of an A-scan.

    The real part equals the input and the imaginary part is its discrete
    Hilbert transform.
    """
    return analytic_signal_batch(s.samples)


def envelope(s: AScan) -> np.ndarray:
    """Elementwise modulus of the analytic signal."""
    return np.abs(analytic_signal(s))


def map_project(grid: ScanGrid) -> MapImage:
    """Collapse each grid cell to the maximum of its envelope.

    All cells are transformed in one batched FFT, which is bitwise identical
    to projecting the cells one at a time.
    """
    h, w, n = grid.signals.shape
    flat = grid.signals.reshape(h * w, n)
    peaks = np.abs(analytic_signal_batch(flat)).max(axis=1)
    return MapImage(peaks.reshape(h, w))


def normalize_image(img: MapImage, bit_depth: int = 8) -> np.ndarray:
    """Min-max rescale to [0, 2**bit_depth - 1] integers, rounding half up.

    A constant image maps to all zeros.
    """
    if bit_depth not in (8, 16):
        raise InvalidInputError("bit_depth must be 8 or 16")
    lo = img.pixels.min()
    hi = img.pixels.max()
    top = (1 << bit_depth) - 1
    if hi == lo:
        scaled = np.zeros_like(img.pixels)
    else:
        scaled = (img.pixels - lo) / (hi - lo) * top
    ints = np.floor(scaled + 0.5).astype(np.uint8 if bit_depth == 8 else np.uint16)
    return ints


def write_pgm(img: MapImage, path, bit_depth: int = 8) -> None:
    """Write a binary (P5) PGM; 16-bit samples are big-endian per the format."""
    ints = normalize_image(img, bit_depth)
    maxval = (1 << bit_depth) - 1
    header = f"P5\n{img.cols} {img.rows}\n{maxval}\n".encode("ascii")
    payload = ints.tobytes() if bit_depth == 8 else ints.astype(">u2").tobytes()
    with open(path, "wb") as fh:
        fh.write(header + payload)


def write_png(img: MapImage, path, bit_depth: int = 8) -> None:
    """Write a grayscale PNG with the same pixel values as the PGM export."""
    try:
        from PIL import Image
    except ImportError as exc:  # pragma: no cover - depends on environment
        raise ImportError("PNG export requires Pillow (install the 'png' extra)") from exc
    ints = normalize_image(img, bit_depth)
    mode = "L" if bit_depth == 8 else "I;16"
    Image.fromarray(ints, mode=mode).save(path, format="PNG")
