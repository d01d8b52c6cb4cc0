"""Numerical kernels: PSD estimation, Lowess smoothing, discrete Frechet distance."""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from numba import njit
from scipy import signal

__all__ = [
    "IqTrace",
    "Curve",
    "as_polyline",
    "estimate_psd",
    "to_db",
    "lowess_smooth",
    "frechet_distance",
    "segment_polyline",
]


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, copy=True)
    a.flags.writeable = False
    return a


@dataclass(frozen=True, eq=False)
class IqTrace:
    """Complex baseband samples of one received packet."""

    samples: np.ndarray
    sample_rate_hz: float = 20e6

    def __post_init__(self):
        s = np.asarray(self.samples, dtype=np.complex128).ravel()
        if s.size < 2:
            raise ValueError("invalid trace: need at least 2 samples")
        if not np.all(np.isfinite(s)):
            raise ValueError("invalid trace: non-finite samples")
        if not (self.sample_rate_hz > 0 and math.isfinite(self.sample_rate_hz)):
            raise ValueError("invalid trace: sample rate must be positive")
        object.__setattr__(self, "samples", _frozen(s))

    def __len__(self) -> int:
        return self.samples.size

    @property
    def power(self) -> float:
        """Mean power per sample."""
        return float(np.mean(np.abs(self.samples) ** 2))

    def __eq__(self, other):
        if not isinstance(other, IqTrace):
            return NotImplemented
        return self.sample_rate_hz == other.sample_rate_hz and np.array_equal(
            self.samples, other.samples
        )


@dataclass(frozen=True, eq=False)
class Curve:
    """Ordered real values on a uniform abscissa with spacing ``x_step``."""

    values: np.ndarray
    x_step: float = 1.0

    def __post_init__(self):
        v = np.asarray(self.values, dtype=np.float64).ravel()
        if v.size < 2:
            raise ValueError("curve needs at least 2 values")
        if not np.all(np.isfinite(v)):
            raise ValueError("curve values must be finite")
        if not (self.x_step > 0 and math.isfinite(self.x_step)):
            raise ValueError("x_step must be positive")
        object.__setattr__(self, "values", _frozen(v))

    def __len__(self) -> int:
        return self.values.size

    @property
    def x(self) -> np.ndarray:
        return np.arange(self.values.size) * self.x_step

    def __eq__(self, other):
        if not isinstance(other, Curve):
            return NotImplemented
        return self.x_step == other.x_step and np.array_equal(self.values, other.values)


def as_polyline(points) -> np.ndarray:
    """Coerce ``points`` to a finite float array of shape (n, 2)."""
    p = np.asarray(points, dtype=np.float64)
    if p.size == 0:
        raise ValueError("empty curve")
    p = p.reshape(-1, 2)
    if not np.all(np.isfinite(p)):
        raise ValueError("polyline coordinates must be finite")
    return p


def segment_polyline(values) -> np.ndarray:
    """Embed a 1-D segment as a polyline with x = 0, 1, ..., k-1."""
    v = np.asarray(values, dtype=np.float64).ravel()
    return np.column_stack([np.arange(v.size, dtype=np.float64), v])


# ---------------------------------------------------------------------------
# PSD


def estimate_psd(trace: IqTrace, n_bins: int, method: str = "welch") -> Curve:
    """Two-sided power spectral density of ``trace`` on ``n_bins`` bins.

    Bins run from -fs/2 to fs/2 (DC at index ``n_bins // 2``) with spacing
    ``fs / n_bins``; values are linear power per Hz.  The estimate is
    rescaled so that ``sum(values) * x_step`` equals the trace's mean power.

    ``method="welch"`` averages Hann-windowed periodograms of ``n_bins``
    samples with 50% overlap.  ``method="periodogram"`` takes one
    rectangular periodogram of the whole trace and averages it down to
    ``n_bins`` contiguous bands.
    """
    if n_bins < 8 or n_bins & (n_bins - 1):
        raise ValueError(f"n_bins must be a power of two >= 8, got {n_bins}")
    if len(trace) < n_bins:
        raise ValueError(
            f"insufficient samples: trace has {len(trace)}, need >= {n_bins}"
        )
    x = trace.samples
    power = trace.power
    if power == 0.0:
        raise ValueError("invalid trace: zero power")
    fs = trace.sample_rate_hz

    if method == "welch":
        _, pxx = signal.welch(
            x,
            fs=fs,
            window="hann",
            nperseg=n_bins,
            noverlap=n_bins // 2,
            detrend=False,
            return_onesided=False,
            scaling="density",
        )
        pxx = np.fft.fftshift(pxx)
    elif method == "periodogram":
        _, full = signal.periodogram(
            x, fs=fs, window="boxcar", detrend=False, return_onesided=False
        )
        full = np.fft.fftshift(full)
        pxx = np.array([band.mean() for band in np.array_split(full, n_bins)])
    else:
        raise ValueError(f"unknown PSD method {method!r}")

    df = fs / n_bins
    pxx = pxx * (power / (pxx.sum() * df))
    return Curve(pxx, x_step=df)


def to_db(curve: Curve) -> Curve:
    """10*log10 of a non-negative curve; zeros are floored at the smallest normal."""
    v = np.maximum(curve.values, np.finfo(np.float64).tiny)
    return Curve(10.0 * np.log10(v), x_step=curve.x_step)


# ---------------------------------------------------------------------------
# Lowess


@lru_cache(maxsize=32)
def _lowess_weights(n: int, q: int) -> np.ndarray:
    """Row i holds the tricube weights of every point for the fit at point i.

    Weights on a uniform grid depend only on index distance ratios, so the
    matrix is shared by all curves of the same length.
    """
    x = np.arange(n, dtype=np.float64)
    dist = np.abs(x[None, :] - x[:, None])
    # stable sort keeps the lower index first among equidistant points
    order = np.argsort(dist, axis=1, kind="stable")
    rows = np.arange(n)[:, None]
    h = dist[rows[:, 0], order[:, q - 1]]
    w = np.zeros((n, n))
    idx = order[:, :q]
    u = dist[rows, idx] / h[:, None]
    w[rows, idx] = np.clip(1.0 - u**3, 0.0, None) ** 3
    w.flags.writeable = False
    return w


def lowess_smooth(curve: Curve, span: float) -> Curve:
    """Single-pass local linear Lowess with tricube weights.

    Each point is refit by weighted least squares on its ``ceil(span * n)``
    nearest neighbours; the window radius is the distance to the farthest
    of them, so that neighbour gets zero weight.  Where the weighted
    abscissae collapse to a point the local mean is used instead of a line.
    No robustness iterations are run.
    """
    if not 0.0 < span <= 1.0:
        raise ValueError(f"span must lie in (0, 1], got {span}")
    n = len(curve)
    q = math.ceil(span * n)
    if q < 3:
        raise ValueError(
            f"span too small for curve length: ceil({span}*{n}) = {q} < 3"
        )
    x = curve.x
    y = curve.values
    w = _lowess_weights(n, q)

    # centre the abscissa on each fit point so the intercept is the fit
    u = x[None, :] - x[:, None]
    s0 = w.sum(axis=1)
    s1 = (w * u).sum(axis=1)
    s2 = (w * u * u).sum(axis=1)
    t0 = (w * y).sum(axis=1)
    t1 = (w * u * y).sum(axis=1)
    det = s0 * s2 - s1 * s1
    mean = t0 / s0
    spread = x[-1] - x[0]
    degenerate = det <= (1e-12 * spread) ** 2 * s0 * s0
    safe_det = np.where(degenerate, 1.0, det)
    fit = np.where(degenerate, mean, (s2 * t0 - s1 * t1) / safe_det)
    return Curve(fit, x_step=curve.x_step)


# ---------------------------------------------------------------------------
# Discrete Frechet distance


@njit(cache=True)
def _frechet_dp(p, q):
    n, m = p.shape[0], q.shape[0]
    ca = np.empty((n, m))
    for i in range(n):
        for j in range(m):
            dx = p[i, 0] - q[j, 0]
            dy = p[i, 1] - q[j, 1]
            d = math.sqrt(dx * dx + dy * dy)
            if i == 0 and j == 0:
                ca[i, j] = d
            elif i == 0:
                ca[i, j] = max(ca[i, j - 1], d)
            elif j == 0:
                ca[i, j] = max(ca[i - 1, j], d)
            else:
                ca[i, j] = max(min(ca[i - 1, j], ca[i, j - 1], ca[i - 1, j - 1]), d)
    return ca[n - 1, m - 1]


def frechet_distance(p, q) -> float:
    """Discrete Frechet distance between two polylines (Eiter & Mannila DP).

    Parameters
    ----------
    p, q : array_like, shape (n, 2) and (m, 2)
        Vertices as (x, y) pairs.

    Returns
    -------
    float
        Minimum over order-preserving couplings of the largest Euclidean
        distance between coupled vertices.
    """
    return float(_frechet_dp(as_polyline(p), as_polyline(q)))
