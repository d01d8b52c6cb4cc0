"""Evaluation metrics: entropy, bit mismatch rate, correlation, leakage."""

from __future__ import annotations

import math
import warnings
from collections import Counter
from collections.abc import Hashable, Sequence
from dataclasses import asdict, dataclass

import numpy as np

# plug-in entropy is badly biased below this many samples per symbol
MIN_SAMPLES_PER_SYMBOL = 50


class UndersampledEntropyWarning(UserWarning):
    pass


@dataclass(frozen=True)
class MetricsReport:
    entropy_bits: float
    mismatch_rate: float
    correlation: float
    leakage: float
    n_packets: int
    config_digest: str

    def __post_init__(self):
        if self.entropy_bits < 0:
            raise ValueError("entropy must be non-negative")
        if not 0.0 <= self.mismatch_rate <= 1.0:
            raise ValueError("mismatch rate must lie in [0, 1]")
        if not -1.0 <= self.correlation <= 1.0:
            raise ValueError("correlation must lie in [-1, 1]")
        if not 0.0 <= self.leakage <= 1.0:
            raise ValueError("leakage must lie in [0, 1]")
        if self.n_packets < 1:
            raise ValueError("n_packets must be >= 1")

    def to_dict(self) -> dict:
        return asdict(self)


def entropy(samples: Sequence[Hashable], alphabet_size: int | None = None) -> float:
    """Plug-in Shannon entropy (bits) of the empirical symbol distribution.

    If ``alphabet_size`` is given and there are fewer than 50 samples per
    possible symbol, an :class:`UndersampledEntropyWarning` is issued.
    """
    counts = Counter(samples)
    n = sum(counts.values())
    if n == 0:
        raise ValueError("entropy of an empty sample")
    if alphabet_size is not None and n < MIN_SAMPLES_PER_SYMBOL * alphabet_size:
        warnings.warn(
            f"{n} samples for an alphabet of {alphabet_size}: plug-in entropy is biased low",
            UndersampledEntropyWarning,
            stacklevel=2,
        )
    h = 0.0
    for c in counts.values():
        p = c / n
        h -= p * math.log2(p)
    return max(h, 0.0)


def mismatch_rate(a: Sequence[int], b: Sequence[int]) -> float:
    """Fraction of positions where the two bit strings differ."""
    if len(a) != len(b):
        raise ValueError(f"length mismatch: {len(a)} vs {len(b)}")
    if len(a) == 0:
        raise ValueError("mismatch rate of empty bit strings")
    return sum(x != y for x, y in zip(a, b)) / len(a)


def correlation(x: Sequence[float], y: Sequence[float]) -> float:
    """Pearson correlation coefficient."""
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if x.shape != y.shape:
        raise ValueError(f"length mismatch: {x.size} vs {y.size}")
    if x.size < 2:
        raise ValueError("correlation needs at least 2 samples")
    dx = x - x.mean()
    dy = y - y.mean()
    sxx = float(dx @ dx)
    syy = float(dy @ dy)
    if sxx == 0.0 or syy == 0.0:
        raise ValueError("undefined correlation: constant sequence")
    r = float(dx @ dy) / math.sqrt(sxx * syy)
    return min(1.0, max(-1.0, r))


def leakage(p_mis: float) -> float:
    """1 - p_mis/0.5 below 0.5, otherwise 0."""
    if not 0.0 <= p_mis <= 1.0:
        raise ValueError(f"p_mis must lie in [0, 1], got {p_mis}")
    return 1.0 - p_mis / 0.5 if p_mis < 0.5 else 0.0


def non_leaked_bits(bits_per_packet: float, leak: float) -> float:
    if bits_per_packet < 0:
        raise ValueError("bits_per_packet must be non-negative")
    if not 0.0 <= leak <= 1.0:
        raise ValueError("leakage must lie in [0, 1]")
    return bits_per_packet * (1.0 - leak)
