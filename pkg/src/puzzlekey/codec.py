"""Shape-based curve coding: trend patterns, Frechet classification, key extraction.

A smoothed curve is cut into ``m`` equal segments.  Each segment is labelled
with the trend pattern (ascending 0, descending 1, steady 2) it is closest
to in discrete Frechet distance.  The patterns are generated locally from the
curve's own peak-to-peak range, so the two ends never have to agree on gain.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dsp import Curve, IqTrace, estimate_psd, frechet_distance, lowess_smooth, to_db

ASCENDING, DESCENDING, STEADY = 0, 1, 2

_BIT_MAP = {0: (0, 0), 1: (0, 1), 2: (1, 0)}

# Variation below single-precision resolution (the trace file format) is
# rounding noise, not shape: such a curve is treated as flat.
FLAT_RTOL = float(np.finfo(np.float32).eps)


@dataclass(frozen=True, eq=False)
class PatternSet:
    ascending: np.ndarray
    descending: np.ndarray
    steady: np.ndarray
    peak: float
    k: int
    m: int

    def as_list(self) -> list[np.ndarray]:
        return [self.ascending, self.descending, self.steady]


@dataclass(frozen=True)
class CodeWord:
    symbols: tuple[int, ...]

    def __post_init__(self):
        sym = tuple(int(s) for s in self.symbols)
        if not sym:
            raise ValueError("code word must be non-empty")
        if any(s not in (0, 1, 2) for s in sym):
            raise ValueError(f"symbols must be in {{0, 1, 2}}, got {sym}")
        object.__setattr__(self, "symbols", sym)

    @property
    def m(self) -> int:
        return len(self.symbols)

    def __str__(self) -> str:
        return "".join(map(str, self.symbols))


def generate_patterns(
    k: int, m: int, peak: float, steady_level: float | None = None
) -> PatternSet:
    """Build the ascending, descending and steady reference patterns.

    Point ``i`` (1-based) sits at x = i - 1 with y = peak*i/k for the ascending
    pattern, -peak*i/k for the descending one, and the constant peak/(m/2) for
    the steady one.  ``steady_level`` replaces that constant when given.
    """
    if k < 2:
        raise ValueError(f"segment too short: k = {k} < 2")
    if m < 1:
        raise ValueError(f"m must be >= 1, got {m}")
    if peak < 0:
        raise ValueError(f"peak must be non-negative, got {peak}")
    i = np.arange(1, k + 1, dtype=np.float64)
    x = i - 1.0
    up = peak * i / k
    level = peak / (m / 2) if steady_level is None else float(steady_level)
    flat = np.full(k, level)
    return PatternSet(
        ascending=np.column_stack([x, up]),
        descending=np.column_stack([x, -up]),
        steady=np.column_stack([x, flat]),
        peak=float(peak),
        k=k,
        m=m,
    )


def segment_distances(
    curve: Curve, m: int, steady_level: float | None = None
) -> np.ndarray:
    """Frechet distance of every segment to each pattern, shape (m, 3).

    Distances are measured with y expressed in units of the curve's peak,
    which makes the labelling invariant to positive rescaling of the curve.
    A flat curve (peak 0, up to rounding) yields all-zero distances.
    """
    values = curve.values
    n = values.size
    k = n // m
    if k < 2:
        raise ValueError(f"too many segments: {m} segments of a {n}-point curve")
    peak = float(values.max() - values.min())
    out = np.zeros((m, 3))
    if peak <= FLAT_RTOL * float(np.abs(values).max()) or peak == 0.0:
        return out
    level = None if steady_level is None else steady_level / peak
    pats = generate_patterns(k, m, 1.0, steady_level=level).as_list()
    x = np.arange(k, dtype=np.float64)
    for s in range(m):
        seg = values[s * k : (s + 1) * k]
        poly = np.column_stack([x, (seg - seg[0]) / peak])
        for j, pat in enumerate(pats):
            out[s, j] = frechet_distance(poly, pat)
    return out


def encode_curve(curve: Curve, m: int, steady_level: float | None = None) -> CodeWord:
    """Label each of ``m`` segments of an already-smoothed curve.

    Segments hold ``len(curve) // m`` points; the tail remainder is dropped.
    Each segment has its first value subtracted before comparison.  Exact
    ties go to the lowest pattern index, and a flat curve is all steady.
    """
    d = segment_distances(curve, m, steady_level)
    if not d.any():
        return CodeWord((STEADY,) * m)
    return CodeWord(tuple(int(j) for j in np.argmin(d, axis=1)))


def symbols_to_bits(symbols) -> tuple[int, ...]:
    """Expand symbols to bits: 0 -> 00, 1 -> 01, 2 -> 10."""
    return tuple(b for s in symbols for b in _BIT_MAP[s])


def code_to_bits(code: CodeWord) -> tuple[int, ...]:
    return symbols_to_bits(code.symbols)


def curve_from_trace(
    trace: IqTrace,
    n_bins: int,
    span: float,
    *,
    db: bool = True,
    psd_method: str = "welch",
) -> Curve:
    """PSD of the trace (optionally in dB), Lowess-smoothed."""
    psd = estimate_psd(trace, n_bins, method=psd_method)
    if db:
        psd = to_db(psd)
    return lowess_smooth(psd, span)


def extract_key(
    trace: IqTrace,
    m: int,
    span: float = 0.4,
    n_bins: int = 128,
    *,
    db: bool = True,
    psd_method: str = "welch",
    steady_level: float | None = None,
) -> CodeWord:
    """Full pipeline: PSD -> dB -> Lowess -> segment coding."""
    curve = curve_from_trace(trace, n_bins, span, db=db, psd_method=psd_method)
    return encode_curve(curve, m, steady_level)
