"""Labeled signal/feature containers and the binary dataset file format.

The on-disk format is a little-endian binary: a fixed header (magic,
version, record length N, record count, sample rate) followed by packed
records of (sample_id, i, j, label, N float64 amplitudes). Text formats do
not scale to ~1e5 signals of 1000 samples, so this is the interchange
format between pipeline stages. Round-trips are bitwise.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass

import numpy as np

from .errors import InvalidInputError

MAGIC = b"PAMD"
FORMAT_VERSION = 1

_HEADER = struct.Struct("<4sIIQd")  # magic, version, n, count, sample_rate


def _record_dtype(n: int) -> np.dtype:
    return np.dtype(
        [
            ("sample_id", "<i8"),
            ("i", "<i4"),
            ("j", "<i4"),
            ("label", "u1"),
            ("values", "<f8", (n,)),
        ]
    )


@dataclass
class SignalRecords:
    """Flat table of per-position records; ``values`` rows are signals or
    feature vectors depending on the pipeline stage."""

    values: np.ndarray
    labels: np.ndarray
    sample_ids: np.ndarray
    grid_rows: np.ndarray
    grid_cols: np.ndarray
    sample_rate: float

    def __post_init__(self):
        self.values = np.ascontiguousarray(self.values, dtype=np.float64)
        self.labels = np.asarray(self.labels, dtype=np.uint8)
        self.sample_ids = np.asarray(self.sample_ids, dtype=np.int64)
        self.grid_rows = np.asarray(self.grid_rows, dtype=np.int32)
        self.grid_cols = np.asarray(self.grid_cols, dtype=np.int32)
        if self.values.ndim != 2:
            raise InvalidInputError("values must be an (M, N) array")
        m = self.values.shape[0]
        for name, arr in (
            ("labels", self.labels),
            ("sample_ids", self.sample_ids),
            ("grid_rows", self.grid_rows),
            ("grid_cols", self.grid_cols),
        ):
            if arr.shape != (m,):
                raise InvalidInputError(f"{name} must have length {m}")
        if not np.isin(self.labels, (0, 1)).all():
            raise InvalidInputError("labels must be 0 or 1")
        if not (self.sample_rate > 0):
            raise InvalidInputError("sample_rate must be > 0")

    def __len__(self) -> int:
        return self.values.shape[0]

    @property
    def n_values(self) -> int:
        return self.values.shape[1]

    def subset(self, index) -> "SignalRecords":
        return SignalRecords(
            self.values[index],
            self.labels[index],
            self.sample_ids[index],
            self.grid_rows[index],
            self.grid_cols[index],
            self.sample_rate,
        )

    def sample_id_set(self) -> set[int]:
        return set(int(s) for s in np.unique(self.sample_ids))

    def to_labeled(self) -> "LabeledDataset":
        return LabeledDataset(self.values, self.labels, self.sample_ids)


@dataclass
class LabeledDataset:
    """Feature matrix with binary labels and source-sample IDs."""

    features: np.ndarray
    labels: np.ndarray
    sample_ids: np.ndarray

    def __post_init__(self):
        self.features = np.ascontiguousarray(self.features, dtype=np.float64)
        self.labels = np.asarray(self.labels, dtype=np.uint8)
        self.sample_ids = np.asarray(self.sample_ids, dtype=np.int64)
        if self.features.ndim != 2:
            raise InvalidInputError("features must be an (M, N) matrix")
        m = self.features.shape[0]
        if self.labels.shape != (m,) or self.sample_ids.shape != (m,):
            raise InvalidInputError("labels and sample_ids must have length M")
        if np.isnan(self.features).any():
            raise InvalidInputError("features contain NaN")
        if not np.isin(self.labels, (0, 1)).all():
            raise InvalidInputError("labels must be 0 or 1")

    def __len__(self) -> int:
        return self.features.shape[0]

    @property
    def n_features(self) -> int:
        return self.features.shape[1]

    def subset(self, index) -> "LabeledDataset":
        return LabeledDataset(
            self.features[index], self.labels[index], self.sample_ids[index]
        )


def write_records(path, records: SignalRecords) -> None:
    m, n = records.values.shape
    packed = np.empty(m, dtype=_record_dtype(n))
    packed["sample_id"] = records.sample_ids
    packed["i"] = records.grid_rows
    packed["j"] = records.grid_cols
    packed["label"] = records.labels
    packed["values"] = records.values
    with open(path, "wb") as fh:
        fh.write(_HEADER.pack(MAGIC, FORMAT_VERSION, n, m, records.sample_rate))
        fh.write(packed.tobytes())


def read_records(path) -> SignalRecords:
    with open(path, "rb") as fh:
        raw = fh.read()
    if len(raw) < _HEADER.size:
        raise InvalidInputError(f"{path}: truncated header")
    magic, version, n, count, sample_rate = _HEADER.unpack_from(raw)
    if magic != MAGIC:
        raise InvalidInputError(f"{path}: not a pambench dataset file")
    if version != FORMAT_VERSION:
        raise InvalidInputError(f"{path}: unsupported format version {version}")
    dtype = _record_dtype(n)
    body = raw[_HEADER.size :]
    if len(body) != count * dtype.itemsize:
        raise InvalidInputError(
            f"{path}: header promises {count} records but payload holds "
            f"{len(body) // dtype.itemsize}"
        )
    packed = np.frombuffer(body, dtype=dtype)
    return SignalRecords(
        packed["values"].copy(),
        packed["label"].copy(),
        packed["sample_id"].copy(),
        packed["i"].copy(),
        packed["j"].copy(),
        sample_rate,
    )
