"""Comparison extractors: per-subcarrier 2-bit quantization and RSS thresholding."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

# Gray code for quantile bins, lowest magnitude first
_GRAY2 = ((0, 0), (0, 1), (1, 1), (1, 0))


@dataclass(frozen=True, eq=False)
class FreqResponse:
    """Per-subcarrier complex channel estimates."""

    responses: np.ndarray

    def __post_init__(self):
        r = np.array(self.responses, dtype=np.complex128).ravel()
        if r.size < 4:
            raise ValueError("need at least 4 subcarriers")
        if not np.all(np.isfinite(r)):
            raise ValueError("responses must be finite")
        r.flags.writeable = False
        object.__setattr__(self, "responses", r)

    @property
    def n_subcarriers(self) -> int:
        return self.responses.size

    @property
    def magnitude(self) -> np.ndarray:
        return np.abs(self.responses)


@dataclass(frozen=True)
class AsbgResult:
    bits: tuple[int, ...]
    kept_indices: tuple[int, ...]

    @property
    def empty(self) -> bool:
        return not self.bits


def select_subcarriers(n_subcarriers: int, n_selected: int) -> np.ndarray:
    """Evenly spaced indices round(i * n_subcarriers / n_selected)."""
    if not 1 <= n_selected <= n_subcarriers:
        raise ValueError(
            f"n_selected must be in [1, {n_subcarriers}], got {n_selected}"
        )
    i = np.arange(n_selected)
    # floor(x + 0.5) rather than np.round: banker's rounding would skew spacing
    return np.floor(i * n_subcarriers / n_selected + 0.5).astype(int)


def csi2bit_encode(fr: FreqResponse, n_selected: int) -> tuple[int, ...]:
    """Quantize ``n_selected`` evenly spaced subcarrier magnitudes to 2 bits each.

    Thresholds are the 25/50/75% quantiles of the selected magnitudes; a
    value equal to a threshold falls into the lower bin.
    """
    mags = fr.magnitude[select_subcarriers(fr.n_subcarriers, n_selected)]
    thresholds = np.quantile(mags, [0.25, 0.5, 0.75])
    bins = np.searchsorted(thresholds, mags, side="left")
    return tuple(b for q in bins for b in _GRAY2[q])


def _thresholds(rss: np.ndarray, alpha: float) -> tuple[float, float]:
    mu = float(np.mean(rss))
    sd = float(np.std(rss))
    return mu + alpha * sd, mu - alpha * sd


def _rss_array(rss) -> np.ndarray:
    r = np.asarray(rss, dtype=np.float64).ravel()
    if r.size < 2:
        raise ValueError("RSS sequence needs at least 2 values")
    if not np.all(np.isfinite(r)):
        raise ValueError("RSS values must be finite")
    return r


def asbg_extract(rss, alpha: float = 0.5) -> AsbgResult:
    """Keep probes outside mean +/- alpha*std; above -> 1, below -> 0.

    Values inside the band (including values exactly on a threshold) are
    dropped.  A constant sequence yields an empty key.
    """
    if alpha < 0:
        raise ValueError(f"alpha must be non-negative, got {alpha}")
    r = _rss_array(rss)
    hi, lo = _thresholds(r, alpha)
    bits, kept = [], []
    for i, v in enumerate(r):
        if v > hi:
            bits.append(1)
            kept.append(i)
        elif v < lo:
            bits.append(0)
            kept.append(i)
    return AsbgResult(tuple(bits), tuple(kept))


def eve_guess_asbg(
    bob: AsbgResult, eve_rss, alpha: float, seed: int, n_probes: int | None = None
) -> tuple[int, ...]:
    """Eve's bits at Bob's published indices.

    Where Eve's own probe clears her thresholds she uses her quantization;
    where she would have dropped it she flips a seeded fair coin.
    """
    e = _rss_array(eve_rss)
    if n_probes is not None and e.size != n_probes:
        raise ValueError(f"length mismatch: Eve has {e.size} probes, Bob {n_probes}")
    if bob.kept_indices and bob.kept_indices[-1] >= e.size:
        raise ValueError("length mismatch: Bob kept an index beyond Eve's sequence")
    hi, lo = _thresholds(e, alpha)
    coins = np.random.default_rng(seed).integers(0, 2, size=len(bob.kept_indices))
    out = []
    for c, i in zip(coins, bob.kept_indices):
        v = e[i]
        if v > hi:
            out.append(1)
        elif v < lo:
            out.append(0)
        else:
            out.append(int(c))
    return tuple(out)
