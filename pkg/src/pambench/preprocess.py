"""Feature extraction: standardize, analytic signal, Fourier transform,
return spectral magnitudes.

Standardization uses population (divide-by-N) statistics, so the features
are invariant to positive affine changes of the raw signal. The full-length
magnitude spectrum is kept: the negative-frequency half is near zero for an
analytic signal but is retained as features rather than truncated.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateSignalError
from .signal_core import AScan, analytic_signal_batch


@dataclass(frozen=True)
class FeatureVector:
    """Non-negative spectral magnitudes plus the (sample, i, j) origin."""

    values: np.ndarray
    source_id: tuple[int, int, int] = (-1, -1, -1)

    def __post_init__(self):
        values = np.asarray(self.values, dtype=np.float64).copy()
        values.flags.writeable = False
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "source_id", tuple(int(v) for v in self.source_id))

    def __len__(self) -> int:
        return self.values.size


def standardized(samples: np.ndarray) -> np.ndarray:
    """(s - mean) / std with population statistics; errors on zero variance."""
    samples = np.asarray(samples, dtype=np.float64)
    std = samples.std(axis=-1, keepdims=True)
    if (std == 0).any():
        if samples.ndim > 1:
            row = int(np.flatnonzero(std.ravel() == 0)[0])
            raise DegenerateSignalError(f"signal {row} has zero variance")
        raise DegenerateSignalError("signal has zero variance")
    return (samples - samples.mean(axis=-1, keepdims=True)) / std


def preprocess_batch(signals: np.ndarray) -> np.ndarray:
    """Feature matrix for an (M, N) block of signals.

    Bitwise identical to preprocessing the rows one at a time; callers are
    expected to drop zero-variance rows beforehand (this raises on them).
    """
    z = standardized(signals)
    spectrum = np.fft.fft(analytic_signal_batch(z), axis=-1)
    return np.abs(spectrum)


def preprocess(s: AScan, source_id: tuple[int, int, int] = (-1, -1, -1)) -> FeatureVector:
    """Spectral-magnitude features of one A-scan."""
    return FeatureVector(preprocess_batch(s.samples), source_id)
