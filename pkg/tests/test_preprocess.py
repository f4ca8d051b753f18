import numpy as np
import pytest

from pambench.errors import DegenerateSignalError
from pambench.preprocess import FeatureVector, preprocess, preprocess_batch
from pambench.signal_core import AScan

from oracles import oracle_features

RATE = 8.0e7


def test_pure_tone_has_single_dominant_bin():
    n = 64
    s = np.cos(2 * np.pi * 4 * np.arange(n) / n)
    fv = preprocess(AScan(s, RATE))
    assert fv.values.argmax() == 4
    assert fv.values[33:].max() <= 1e-9


def test_constant_signal_is_degenerate():
    with pytest.raises(DegenerateSignalError):
        preprocess(AScan(np.full(32, 3.0), RATE))


def test_matches_direct_summation_oracle():
    rng = np.random.default_rng(0)
    x = rng.normal(size=32)
    fv = preprocess(AScan(x, RATE))
    assert np.abs(fv.values - oracle_features(x)).max() <= 1e-9


def test_affine_invariance_for_positive_scale():
    rng = np.random.default_rng(1)
    for _ in range(25):
        n = int(rng.integers(16, 400))
        x = rng.normal(size=n)
        a = rng.uniform(0.1, 10.0)
        b = rng.uniform(-5.0, 5.0)
        base = preprocess(AScan(x, RATE)).values
        moved = preprocess(AScan(a * x + b, RATE)).values
        assert np.abs(base - moved).max() <= 1e-9


def test_negative_frequency_half_is_empty():
    rng = np.random.default_rng(2)
    for _ in range(25):
        n = int(rng.integers(16, 300))
        values = preprocess(AScan(rng.normal(size=n), RATE)).values
        neg = values[n // 2 + 1 :]
        assert neg.max() <= 1e-9 * values.max()


def test_parseval_identity():
    rng = np.random.default_rng(3)
    from pambench.signal_core import analytic_signal_batch
    from pambench.preprocess import standardized

    for _ in range(10):
        n = int(rng.integers(16, 500))
        x = rng.normal(size=n)
        values = preprocess(AScan(x, RATE)).values
        analytic = analytic_signal_batch(standardized(x))
        lhs = np.sum(values**2)
        rhs = n * np.sum(np.abs(analytic) ** 2)
        assert lhs == pytest.approx(rhs, rel=1e-9)


def test_output_length_matches_input():
    rng = np.random.default_rng(4)
    for n in (2, 17, 100, 1000):
        fv = preprocess(AScan(rng.normal(size=n), RATE))
        assert len(fv) == n
        assert (fv.values >= 0).all()


def test_source_id_carried():
    fv = preprocess(AScan(np.sin(np.arange(16)), RATE), source_id=(3, 1, 2))
    assert fv.source_id == (3, 1, 2)


def test_feature_vector_immutable():
    fv = FeatureVector(np.ones(4))
    with pytest.raises(ValueError):
        fv.values[0] = 2.0


def test_batch_matches_per_signal_bitwise():
    rng = np.random.default_rng(5)
    block = rng.normal(size=(20, 128))
    batch = preprocess_batch(block)
    loop = np.stack([preprocess(AScan(row, RATE)).values for row in block])
    assert np.array_equal(batch, loop)


def test_batch_raises_on_any_degenerate_row():
    block = np.ones((3, 16))
    block[0] = np.sin(np.arange(16))
    block[2] = np.cos(np.arange(16))
    with pytest.raises(DegenerateSignalError):
        preprocess_batch(block)
