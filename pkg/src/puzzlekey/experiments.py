"""Seeded desk-scale versions of the three comparative studies.

Each runner returns an :class:`ExperimentResult`: named tables (lists of row
dicts, already sorted by their key columns) plus summary reports.  Nothing
here touches the filesystem; :mod:`puzzlekey.cli` writes the files.

Seed streams: every draw is seeded with a tuple ``(seed, STREAM, ...)`` where
the trailing integers index packet, bearing and distance.  The mapping is
fixed, so results depend only on the configuration.
"""

from __future__ import annotations

import math
import warnings
from collections.abc import Callable
from dataclasses import dataclass, field

import numpy as np

from . import channel as chn
from .baselines import asbg_extract, csi2bit_encode, eve_guess_asbg
from .codec import code_to_bits, curve_from_trace, encode_curve, symbols_to_bits
from .config import ExperimentConfig
from .dsp import Curve, IqTrace, lowess_smooth, to_db
from .metrics import (
    MetricsReport,
    UndersampledEntropyWarning,
    correlation,
    entropy,
    leakage,
    mismatch_rate,
    non_leaked_bits,
)

# seed stream identifiers
S_CHANNEL = 0
S_TX_ALICE = 1
S_TX_BOB = 2
S_NOISE_ALICE = 3
S_NOISE_BOB = 4
S_EVE_CHANNEL = 5
S_NOISE_EVE = 6
S_MOVEMENT = 7
S_COIN = 8
S_GAIN = 9

EXPERIMENTS = ("mismatch_entropy", "correlation", "leakage")


@dataclass
class ExperimentResult:
    name: str
    config: ExperimentConfig
    tables: dict[str, list[dict]] = field(default_factory=dict)
    reports: dict[str, MetricsReport] = field(default_factory=dict)
    extra: dict = field(default_factory=dict)


def _db_or_linear(curve: Curve, cfg: ExperimentConfig) -> Curve:
    return to_db(curve) if cfg.curve_units == "db" else curve


def _psd_code(trace: IqTrace, cfg: ExperimentConfig, m: int):
    curve = curve_from_trace(
        trace, cfg.n_bins, cfg.span, db=cfg.curve_units == "db", psd_method=cfg.psd_method
    )
    return encode_curve(curve, m, cfg.steady_level)


def _noise(cfg: ExperimentConfig) -> chn.NoiseSpec:
    # SNR is referenced to the mean received power of an unblocked channel
    return chn.NoiseSpec.from_snr(cfg.snr_db, cfg.tx_power)


def _joint_entropy(words: list[tuple], alphabet: int) -> tuple[float, bool]:
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", UndersampledEntropyWarning)
        h = entropy(words, alphabet_size=alphabet)
    return h, bool(caught)


def _per_position_entropy(words: list[tuple]) -> float:
    cols = zip(*words)
    return float(sum(entropy(c) for c in cols))


def _safe_corr(x, y) -> float:
    try:
        return correlation(x, y)
    except ValueError:
        return math.nan


def _nan_stats(vals: list[float]) -> tuple[float, float, float]:
    """(mean, min, max) ignoring NaN; all NaN if nothing is finite."""
    finite = [v for v in vals if not math.isnan(v)]
    if not finite:
        return math.nan, math.nan, math.nan
    return float(np.mean(finite)), min(finite), max(finite)


# ---------------------------------------------------------------------------
# Puzzle vs CSI-2bit: mismatch and entropy against bit rate


def run_mismatch_entropy(cfg: ExperimentConfig, progress: Callable | None = None):
    """Alice and Bob estimate the same subcarrier responses with independent noise.

    Puzzle encodes the (dB) curve of |H|^2 over all subcarriers into m symbols
    (2m bits); CSI-2bit quantizes m evenly spaced subcarriers (2m bits).
    """
    s = cfg.seed
    ms = list(cfg.m_values)
    puz = {m: {"a": [], "b": [], "mis": []} for m in ms}
    csi = {m: {"a": [], "b": [], "mis": []} for m in ms}
    for p in range(cfg.n_packets):
        ch = chn.draw_channel((s, S_CHANNEL, p), cfg.n_taps, cfg.tap_decay, coherence_id=p)
        spread = cfg.device_gain_spread_db
        g_a, g_b = np.random.default_rng((s, S_GAIN, p)).uniform(-spread, spread, 2)
        fa = chn.estimate_response(
            ch, cfg.snr_db, (s, S_NOISE_ALICE, p), cfg.n_subcarriers, cfg.n_fft, g_a
        )
        fb = chn.estimate_response(
            ch, cfg.snr_db, (s, S_NOISE_BOB, p), cfg.n_subcarriers, cfg.n_fft, g_b
        )
        ca = lowess_smooth(_db_or_linear(Curve(fa.magnitude**2), cfg), cfg.span)
        cb = lowess_smooth(_db_or_linear(Curve(fb.magnitude**2), cfg), cfg.span)
        for m in ms:
            a = encode_curve(ca, m, cfg.steady_level)
            b = encode_curve(cb, m, cfg.steady_level)
            puz[m]["a"].append(a.symbols)
            puz[m]["b"].append(b.symbols)
            puz[m]["mis"].append(mismatch_rate(code_to_bits(a), code_to_bits(b)))
            if cfg.csi2bit_enabled:
                xa = csi2bit_encode(fa, m)
                xb = csi2bit_encode(fb, m)
                csi[m]["a"].append(xa)
                csi[m]["b"].append(xb)
                csi[m]["mis"].append(mismatch_rate(xa, xb))
        if progress:
            progress(p + 1, cfg.n_packets)

    mismatch_rows, entropy_rows = [], []
    undersampled = False
    methods = [("puzzle", puz, 3)] + ([("csi2bit", csi, 4)] if cfg.csi2bit_enabled else [])
    for name, store, base in methods:
        for m in ms:
            bits = 2 * m
            mis = float(np.mean(store[m]["mis"]))
            h_joint, under = _joint_entropy(store[m]["a"], base**m)
            undersampled |= under
            if name == "csi2bit":
                # per-position entropy over the 2-bit quantization levels
                levels = [tuple(zip(w[::2], w[1::2])) for w in store[m]["a"]]
                h_pos = _per_position_entropy(levels)
            else:
                h_pos = _per_position_entropy(store[m]["a"])
            mismatch_rows.append({"bits_per_pkt": bits, "method": name, "m": m, "mismatch_rate": mis})
            entropy_rows.append(
                {
                    "bits_per_pkt": bits,
                    "method": name,
                    "m": m,
                    "entropy_joint_bits": h_joint,
                    "entropy_symbol_sum_bits": h_pos,
                }
            )
    key = lambda r: (r["bits_per_pkt"], r["method"])  # noqa: E731
    mismatch_rows.sort(key=key)
    entropy_rows.sort(key=key)

    res = ExperimentResult("mismatch_entropy", cfg)
    res.tables["mismatch"] = mismatch_rows
    res.tables["entropy"] = entropy_rows
    digest = cfg.digest()
    m0 = ms[0]
    for name, store, _ in methods:
        flat_a = [x for w in store[m0]["a"] for x in w]
        flat_b = [x for w in store[m0]["b"] for x in w]
        rows = [r for r in mismatch_rows if r["method"] == name]
        ent = next(r for r in entropy_rows if r["method"] == name and r["m"] == m0)
        corr = _safe_corr(flat_a, flat_b)
        res.reports[name] = MetricsReport(
            entropy_bits=ent["entropy_joint_bits"],
            mismatch_rate=float(np.mean([r["mismatch_rate"] for r in rows])),
            correlation=0.0 if math.isnan(corr) else corr,
            leakage=0.0,
            n_packets=cfg.n_packets,
            config_digest=digest,
        )
    res.extra["entropy_undersampled"] = undersampled
    res.extra["summary_m"] = m0
    return res


# ---------------------------------------------------------------------------
# Code correlation between Bob and Eve against distance


def run_correlation(cfg: ExperimentConfig, progress: Callable | None = None):
    """Bob and Eve both receive Alice's packets; Eve sits at each distance and bearing."""
    s = cfg.seed
    noise = _noise(cfg)
    dists = list(cfg.eve_distances_wavelengths)
    bearings = cfg.bearings_deg
    bob: list[int] = []
    eve = {(di, bi): [] for di in range(len(dists)) for bi in range(len(bearings))}
    total = cfg.n_packets
    for p in range(cfg.n_packets):
        ch = chn.draw_channel((s, S_CHANNEL, p), cfg.n_taps, cfg.tap_decay, coherence_id=p)
        tx = chn.generate_qpsk((s, S_TX_ALICE, p), cfg.n_samples, cfg.tx_power, cfg.sample_rate_hz)
        bob.extend(_psd_code(chn.observe(tx, ch, noise, (s, S_NOISE_BOB, p)), cfg, cfg.m_eve).symbols)
        for di, d in enumerate(dists):
            for bi, b in enumerate(bearings):
                place = chn.EvePlacement(d, b)
                ech = chn.eve_channel(ch, place, (s, S_EVE_CHANNEL, p, di))
                ye = chn.observe(tx, ech, noise, (s, S_NOISE_EVE, p, di, bi))
                eve[di, bi].extend(_psd_code(ye, cfg, cfg.m_eve).symbols)
        if progress:
            progress(p + 1, total)

    rows, per_distance = [], []
    for di, d in enumerate(dists):
        vals = []
        for bi, b in enumerate(bearings):
            r = _safe_corr(bob, eve[di, bi])
            vals.append(r)
            sym_mis = float(np.mean(np.array(bob) != np.array(eve[di, bi])))
            rows.append(
                {
                    "distance_wavelengths": d,
                    "bearing_deg": b,
                    "tap_correlation": chn.spatial_correlation(d),
                    "code_correlation": r,
                    "symbol_mismatch_rate": sym_mis,
                }
            )
        mean, lo, hi = _nan_stats(vals)
        per_distance.append(
            {
                "distance_wavelengths": d,
                "tap_correlation": chn.spatial_correlation(d),
                "mean_code_correlation": mean,
                "min_code_correlation": lo,
                "max_code_correlation": hi,
            }
        )
    rows.sort(key=lambda r: (r["distance_wavelengths"], r["bearing_deg"]))
    per_distance.sort(key=lambda r: r["distance_wavelengths"])

    res = ExperimentResult("correlation", cfg)
    res.tables["correlation"] = rows
    res.tables["correlation_mean"] = per_distance
    m = cfg.m_eve
    h, under = _joint_entropy([tuple(bob[i : i + m]) for i in range(0, len(bob), m)], 3**m)
    # summarise the nearest Eve position, the worst case for secrecy
    near = min(range(len(dists)), key=lambda i: dists[i])
    eve_near = [x for bi in range(len(bearings)) for x in eve[near, bi]]
    p_mis = mismatch_rate(symbols_to_bits(bob * len(bearings)), symbols_to_bits(eve_near))
    corr = per_distance[0]["mean_code_correlation"]
    res.reports["puzzle"] = MetricsReport(
        entropy_bits=h,
        mismatch_rate=p_mis,
        correlation=0.0 if math.isnan(corr) else max(-1.0, min(1.0, corr)),
        leakage=leakage(p_mis),
        n_packets=cfg.n_packets,
        config_digest=cfg.digest(),
    )
    res.extra["entropy_undersampled"] = under
    res.extra["summary_distance_wavelengths"] = dists[near]
    return res


# ---------------------------------------------------------------------------
# Leakage under the planned-movement attack


def run_leakage(cfg: ExperimentConfig, progress: Callable | None = None):
    """Puzzle vs ASBG when an object periodically blocks the Alice-Bob path.

    The blocked channel is Bob's; Eve's channel is derived from it, so the
    attenuation reaches Eve too while the multipath re-shaping is only
    partially shared (through the spatial correlation).  Bob's RSS is the
    mean power of his received packet.
    """
    s = cfg.seed
    noise = _noise(cfg)
    pattern = cfg.movement
    dists = list(cfg.leakage_distances_wavelengths)
    bearings = cfg.bearings_deg
    m = cfg.m_eve
    bob_sym: list[int] = []
    bob_rss: list[float] = []
    eve_sym = {(di, bi): [] for di in range(len(dists)) for bi in range(len(bearings))}
    eve_rss = {(di, bi): [] for di in range(len(dists)) for bi in range(len(bearings))}
    blocked = []
    for p in range(cfg.n_packets):
        ch = chn.draw_channel((s, S_CHANNEL, p), cfg.n_taps, cfg.tap_decay, coherence_id=p)
        if cfg.movement_enabled:
            ch = chn.movement_attack(
                ch, pattern, p, (s, S_MOVEMENT), max_rotation_deg=cfg.movement_max_rotation_deg
            )
            blocked.append(pattern.is_blocked(p))
        tx = chn.generate_qpsk((s, S_TX_ALICE, p), cfg.n_samples, cfg.tx_power, cfg.sample_rate_hz)
        yb = chn.observe(tx, ch, noise, (s, S_NOISE_BOB, p))
        bob_sym.extend(_psd_code(yb, cfg, m).symbols)
        bob_rss.append(chn.rss_db(yb))
        for di, d in enumerate(dists):
            for bi, b in enumerate(bearings):
                ech = chn.eve_channel(ch, chn.EvePlacement(d, b), (s, S_EVE_CHANNEL, p, di))
                ye = chn.observe(tx, ech, noise, (s, S_NOISE_EVE, p, di, bi))
                eve_sym[di, bi].extend(_psd_code(ye, cfg, m).symbols)
                eve_rss[di, bi].append(chn.rss_db(ye))
        if progress:
            progress(p + 1, cfg.n_packets)

    puzzle_rate = m * math.log2(3)
    bob_bits = symbols_to_bits(bob_sym)
    asbg = asbg_extract(bob_rss, cfg.asbg_alpha) if cfg.asbg_enabled else None
    asbg_rate = len(asbg.bits) / cfg.n_packets if asbg else 0.0

    rows = []
    for di, d in enumerate(dists):
        p_mis_bits = []
        sym_mis = []
        a_mis = []
        for bi in range(len(bearings)):
            eb = symbols_to_bits(eve_sym[di, bi])
            p_mis_bits.append(sum(x != y for x, y in zip(bob_bits, eb)))
            sym_mis.append(sum(x != y for x, y in zip(bob_sym, eve_sym[di, bi])))
            if asbg and asbg.bits:
                guess = eve_guess_asbg(
                    asbg, eve_rss[di, bi], cfg.asbg_alpha, (s, S_COIN, di, bi), n_probes=cfg.n_packets
                )
                a_mis.append(sum(x != y for x, y in zip(asbg.bits, guess)))
        nb = len(bearings)
        p_puz = sum(p_mis_bits) / (nb * len(bob_bits))
        row = {
            "distance_wavelengths": d,
            "puzzle_mismatch_rate": p_puz,
            "puzzle_symbol_mismatch_rate": sum(sym_mis) / (nb * len(bob_sym)),
            "puzzle_leakage": leakage(p_puz),
            "puzzle_bits_per_pkt": puzzle_rate,
            "puzzle_non_leaked_bits_per_pkt": non_leaked_bits(puzzle_rate, leakage(p_puz)),
        }
        if asbg is not None:
            if asbg.bits:
                p_a = sum(a_mis) / (nb * len(asbg.bits))
                leak_a = leakage(p_a)
            else:
                p_a, leak_a = math.nan, 0.0
            row.update(
                {
                    "asbg_mismatch_rate": p_a,
                    "asbg_leakage": leak_a,
                    "asbg_bits_per_pkt": asbg_rate,
                    "asbg_non_leaked_bits_per_pkt": non_leaked_bits(asbg_rate, leak_a),
                }
            )
        rows.append(row)
    rows.sort(key=lambda r: r["distance_wavelengths"])

    res = ExperimentResult("leakage", cfg)
    res.tables["leakage"] = rows
    digest = cfg.digest()
    words = [tuple(bob_sym[i : i + m]) for i in range(0, len(bob_sym), m)]
    h, under = _joint_entropy(words, 3**m)
    worst = max(rows, key=lambda r: r["puzzle_leakage"])
    res.reports["puzzle"] = MetricsReport(
        entropy_bits=h,
        mismatch_rate=worst["puzzle_mismatch_rate"],
        correlation=0.0,
        leakage=worst["puzzle_leakage"],
        n_packets=cfg.n_packets,
        config_digest=digest,
    )
    if asbg is not None:
        worst_a = max(rows, key=lambda r: r["asbg_leakage"])
        h_a = entropy(asbg.bits) if asbg.bits else 0.0
        p_a = worst_a["asbg_mismatch_rate"]
        res.reports["asbg"] = MetricsReport(
            entropy_bits=h_a,
            mismatch_rate=0.0 if math.isnan(p_a) else p_a,
            correlation=0.0,
            leakage=worst_a["asbg_leakage"],
            n_packets=cfg.n_packets,
            config_digest=digest,
        )
        res.extra["asbg_empty_key"] = asbg.empty
    if blocked:
        res.extra["rss_blocked_correlation"] = _safe_corr(bob_rss, [0.0 if b else 1.0 for b in blocked])
    res.extra["entropy_undersampled"] = under
    return res


RUNNERS = {
    "mismatch_entropy": run_mismatch_entropy,
    "correlation": run_correlation,
    "leakage": run_leakage,
}


def run(name: str, cfg: ExperimentConfig, progress: Callable | None = None) -> ExperimentResult:
    try:
        runner = RUNNERS[name]
    except KeyError:
        raise ValueError(f"unknown experiment {name!r}; choose from {', '.join(EXPERIMENTS)}") from None
    return runner(cfg, progress)
