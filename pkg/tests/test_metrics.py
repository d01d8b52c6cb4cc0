import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from puzzlekey.metrics import (
    MetricsReport,
    UndersampledEntropyWarning,
    correlation,
    entropy,
    leakage,
    mismatch_rate,
    non_leaked_bits,
)


def test_entropy_examples():
    assert entropy("abcd" * 5) == 2.0
    assert entropy([7] * 9) == 0.0
    assert entropy(["x", "x", "y", "z"]) == 1.5


def test_entropy_empty():
    with pytest.raises(ValueError):
        entropy([])


def test_entropy_warns_when_undersampled():
    with pytest.warns(UndersampledEntropyWarning):
        entropy([0, 1, 2], alphabet_size=3)


@settings(max_examples=200)
@given(st.lists(st.integers(0, 20), min_size=1, max_size=200))
def test_entropy_bounds(xs):
    h = entropy(xs)
    k = len(set(xs))
    assert 0.0 <= h <= math.log2(k) + 1e-12 <= math.log2(len(xs)) + 1e-12


def test_mismatch_examples():
    assert mismatch_rate([0, 1, 0, 1], [0, 1, 0, 1]) == 0
    assert mismatch_rate([0, 1, 1], [1, 0, 0]) == 1
    assert mismatch_rate([0, 1, 0, 1], [0, 0, 0, 1]) == 0.25


def test_mismatch_errors():
    with pytest.raises(ValueError, match="length mismatch"):
        mismatch_rate([0], [0, 1])
    with pytest.raises(ValueError):
        mismatch_rate([], [])


@given(st.lists(st.integers(0, 1), min_size=1, max_size=50), st.data())
def test_mismatch_symmetric(a, data):
    b = data.draw(st.lists(st.integers(0, 1), min_size=len(a), max_size=len(a)))
    assert mismatch_rate(a, b) == mismatch_rate(b, a)
    assert mismatch_rate(a, a) == 0


def test_correlation_examples():
    x = [1, 2, 3, 4]
    assert correlation(x, x) == 1.0
    assert correlation(x, [-v for v in x]) == -1.0
    assert correlation(x, [1, 3, 2, 4]) == 0.8


def test_correlation_constant():
    with pytest.raises(ValueError, match="undefined correlation"):
        correlation([1, 1, 1], [1, 2, 3])


finite = st.floats(-1e3, 1e3, allow_nan=False)


@settings(max_examples=200)
@given(st.lists(st.tuples(finite, finite), min_size=3, max_size=40), st.floats(0.1, 10), finite)
def test_correlation_affine(pairs, a, b):
    x = np.array([p[0] for p in pairs])
    y = np.array([p[1] for p in pairs])
    if np.ptp(x) < 1e-3 or np.ptp(y) < 1e-3:
        return
    r = correlation(x, y)
    assert -1.0 <= r <= 1.0
    assert correlation(a * x + b, y) == pytest.approx(r, abs=1e-9)
    assert correlation(-a * x + b, y) == pytest.approx(-r, abs=1e-9)


def test_leakage_examples():
    assert leakage(0.5) == 0
    assert leakage(0.0) == 1
    assert leakage(0.25) == 0.5
    assert leakage(0.9) == 0


def test_leakage_range():
    with pytest.raises(ValueError):
        leakage(1.5)


@given(st.floats(0, 0.5), st.floats(0, 0.5))
def test_leakage_monotone(p, q):
    lo, hi = sorted((p, q))
    assert leakage(lo) >= leakage(hi)


def test_non_leaked_examples():
    assert non_leaked_bits(4 * math.log2(3), 0.0) == pytest.approx(6.34, abs=0.005)
    assert non_leaked_bits(7.0, 1.0) == 0
    assert non_leaked_bits(1.0, 0.4) == pytest.approx(0.6)


def test_report_ranges():
    MetricsReport(1.0, 0.1, -0.5, 0.2, 10, "abc")
    with pytest.raises(ValueError):
        MetricsReport(1.0, 1.1, 0.0, 0.0, 10, "abc")
    with pytest.raises(ValueError):
        MetricsReport(1.0, 0.1, 0.0, 0.0, 0, "abc")
    assert MetricsReport(1.0, 0.1, 0.0, 0.0, 3, "d").to_dict()["n_packets"] == 3
