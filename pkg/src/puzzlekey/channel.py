"""Seeded simulation of a reciprocal multipath channel and its observers.

Seed streams
------------
Every random draw takes an explicit integer seed (or a tuple of integers,
passed straight to :func:`numpy.random.default_rng`).  Experiment runners
derive per-packet seeds as tuples ``(seed, stream, packet, ...)`` so that no
two draws share a stream; see :mod:`puzzlekey.experiments`.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np
from scipy.special import j0

from .baselines import FreqResponse
from .dsp import IqTrace

MAX_TAPS = 64
_QPSK = np.array([1 + 1j, 1 - 1j, -1 + 1j, -1 - 1j]) / np.sqrt(2.0)


def _rng(seed) -> np.random.Generator:
    return np.random.default_rng(seed)


def _cn(rng: np.random.Generator, variance, size) -> np.ndarray:
    """Circular complex Gaussian draws with the given per-sample variance."""
    scale = np.sqrt(np.asarray(variance, dtype=np.float64) / 2.0)
    return scale * (rng.standard_normal(size) + 1j * rng.standard_normal(size))


@dataclass(frozen=True, eq=False)
class ChannelRealization:
    """Tapped-delay-line impulse response, taps at unit sample spacing.

    ``profile`` is the per-tap variance the taps were drawn from; it is what an
    independent draw of "the same kind of channel" would use.
    """

    taps: np.ndarray
    coherence_id: int = 0
    profile: np.ndarray | None = None

    def __post_init__(self):
        t = np.array(self.taps, dtype=np.complex128).ravel()
        if not 1 <= t.size <= MAX_TAPS:
            raise ValueError(f"tap count must be in [1, {MAX_TAPS}], got {t.size}")
        if not np.any(np.abs(t) > 0):
            raise ValueError("channel needs at least one non-zero tap")
        prof = np.abs(t) ** 2 if self.profile is None else self.profile
        prof = np.array(prof, dtype=np.float64).ravel()
        if prof.size != t.size:
            raise ValueError("profile length must match tap count")
        t.flags.writeable = False
        prof.flags.writeable = False
        object.__setattr__(self, "taps", t)
        object.__setattr__(self, "profile", prof)

    @property
    def n_taps(self) -> int:
        return self.taps.size

    @property
    def power(self) -> float:
        return float(np.sum(np.abs(self.taps) ** 2))

    def __eq__(self, other):
        if not isinstance(other, ChannelRealization):
            return NotImplemented
        return self.coherence_id == other.coherence_id and np.array_equal(
            self.taps, other.taps
        )


@dataclass(frozen=True)
class NoiseSpec:
    variance: float

    def __post_init__(self):
        if not self.variance >= 0:
            raise ValueError(f"noise variance must be >= 0, got {self.variance}")

    @classmethod
    def from_snr(cls, snr_db: float, signal_power: float = 1.0) -> "NoiseSpec":
        return cls(signal_power * 10.0 ** (-snr_db / 10.0))


@dataclass(frozen=True)
class EvePlacement:
    distance_wavelengths: float
    bearing_deg: float = 0.0

    def __post_init__(self):
        if not self.distance_wavelengths >= 0:
            raise ValueError("Eve distance must be >= 0")
        if not 0.0 <= self.bearing_deg < 360.0:
            raise ValueError("bearing must lie in [0, 360)")


@dataclass(frozen=True)
class MovementPattern:
    """Periodic blocking schedule: the first ``duty`` fraction of each period is blocked."""

    period_packets: int = 10
    duty: float = 0.5
    blockage_db: float = 10.0

    def __post_init__(self):
        if self.period_packets < 2:
            raise ValueError("movement period must be >= 2 packets")
        if not 0.0 < self.duty < 1.0:
            raise ValueError("duty must lie in (0, 1)")
        if not self.blockage_db > 0:
            raise ValueError("blockage_db must be positive")

    def is_blocked(self, packet_index: int) -> bool:
        return (packet_index % self.period_packets) < self.duty * self.period_packets


def exponential_profile(n_taps: int, decay: float) -> np.ndarray:
    """Tap variances proportional to decay**l, normalised to unit total power."""
    p = float(decay) ** np.arange(n_taps, dtype=np.float64)
    return p / p.sum()


def draw_channel(seed, n_taps: int = 8, decay: float = 0.5, coherence_id: int = 0):
    """Rayleigh taps with an exponentially decaying power-delay profile."""
    if not 1 <= n_taps <= MAX_TAPS:
        raise ValueError(f"n_taps must be in [1, {MAX_TAPS}], got {n_taps}")
    if not 0 < decay <= 1:
        raise ValueError(f"decay must lie in (0, 1], got {decay}")
    prof = exponential_profile(n_taps, decay)
    taps = _cn(_rng(seed), prof, n_taps)
    return ChannelRealization(taps, coherence_id=coherence_id, profile=prof)


def generate_qpsk(seed, n: int, power: float = 1.0, sample_rate_hz: float = 20e6):
    """i.i.d. uniform QPSK symbols; every sample has magnitude sqrt(power)."""
    if n < 2:
        raise ValueError(f"need n >= 2 samples, got {n}")
    if not power > 0:
        raise ValueError("power must be positive")
    idx = _rng(seed).integers(0, 4, size=n)
    return IqTrace(np.sqrt(power) * _QPSK[idx], sample_rate_hz=sample_rate_hz)


def observe(tx: IqTrace, ch: ChannelRealization, noise: NoiseSpec, seed) -> IqTrace:
    """Received trace: tx convolved with the taps plus complex AWGN.

    The first ``n_taps - 1`` outputs (filter start-up) are dropped, so the
    result has the same length as ``tx``.
    """
    if len(tx) <= ch.n_taps:
        raise ValueError(
            f"tx too short: {len(tx)} samples for a {ch.n_taps}-tap channel"
        )
    y = np.convolve(tx.samples, ch.taps)[ch.n_taps - 1 :]
    if noise.variance > 0:
        y = y + _cn(_rng(seed), noise.variance, y.size)
    return IqTrace(y, sample_rate_hz=tx.sample_rate_hz)


def frequency_response(
    ch: ChannelRealization, n_subcarriers: int = 72, n_fft: int = 128
) -> np.ndarray:
    """Noise-free H on the ``n_subcarriers`` FFT bins centred on DC."""
    if not 4 <= n_subcarriers <= n_fft:
        raise ValueError("need 4 <= n_subcarriers <= n_fft")
    h = np.fft.fft(ch.taps, n_fft)
    k = np.arange(n_subcarriers) - n_subcarriers // 2
    return h[k % n_fft]


def estimate_response(
    ch: ChannelRealization,
    snr_db: float,
    seed,
    n_subcarriers: int = 72,
    n_fft: int = 128,
    gain_db: float = 0.0,
) -> FreqResponse:
    """Noisy per-subcarrier estimate of H as seen by one node.

    Estimation noise is complex Gaussian with variance (channel power) / SNR
    per subcarrier; ``gain_db`` models a device-specific receive gain.
    """
    h = frequency_response(ch, n_subcarriers, n_fft)
    var = ch.power * 10.0 ** (-snr_db / 10.0)
    noisy = h + _cn(_rng(seed), var, h.size)
    return FreqResponse(noisy * 10.0 ** (gain_db / 20.0))


def spatial_correlation(distance_wavelengths) -> np.ndarray | float:
    """Per-tap correlation J0(2*pi*d), clamped to [0, 1]."""
    rho = np.clip(j0(2.0 * np.pi * np.asarray(distance_wavelengths, dtype=float)), 0.0, 1.0)
    return float(rho) if rho.ndim == 0 else rho


def eve_channel(ch: ChannelRealization, placement: EvePlacement, seed) -> ChannelRealization:
    """Eve's channel: rho * Bob's taps + sqrt(1 - rho^2) * an independent draw.

    The independent part uses Bob's tap profile; its stream is keyed by
    ``seed`` and the bearing, so each bearing is a distinct Eve position.
    """
    if placement.distance_wavelengths == 0:
        return ch
    rho = spatial_correlation(placement.distance_wavelengths)
    bearing_key = int(round(placement.bearing_deg * 1000))
    indep = _cn(_rng([*_seed_words(seed), bearing_key]), ch.profile, ch.n_taps)
    taps = rho * ch.taps + np.sqrt(1.0 - rho * rho) * indep
    if not np.any(np.abs(taps) > 0):
        taps = indep
    return ChannelRealization(taps, coherence_id=ch.coherence_id, profile=ch.profile)


def movement_attack(
    ch: ChannelRealization,
    pattern: MovementPattern,
    packet_index: int,
    seed,
    max_rotation_deg: float = 45.0,
) -> ChannelRealization:
    """Channel during a planned-movement attack.

    Blocked packets see every tap attenuated by ``blockage_db`` and rotated by
    an independent uniform phase in +/- ``max_rotation_deg``; the rotations
    are drawn once per coherence interval.  Unblocked packets see ``ch``.
    """
    if packet_index < 0:
        raise ValueError("packet_index must be >= 0")
    if not pattern.is_blocked(packet_index):
        return ch
    gain = 10.0 ** (-pattern.blockage_db / 20.0)
    lim = np.deg2rad(max_rotation_deg)
    theta = _rng([*_seed_words(seed), ch.coherence_id]).uniform(-lim, lim, ch.n_taps)
    return replace(
        ch, taps=gain * ch.taps * np.exp(1j * theta), profile=ch.profile * gain**2
    )


def rss_db(trace: IqTrace) -> float:
    """Received signal strength of a trace, dB relative to unit power."""
    return 10.0 * np.log10(trace.power)


def _seed_words(seed) -> list[int]:
    if isinstance(seed, (int, np.integer)):
        return [int(seed)]
    return [int(s) for s in seed]
