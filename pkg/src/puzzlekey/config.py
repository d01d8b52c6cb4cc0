"""Experiment configuration: flat YAML mapping, validated eagerly with line numbers."""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import asdict, dataclass, fields
from pathlib import Path

import re

import yaml

from .channel import MAX_TAPS, MovementPattern


class _Loader(yaml.SafeLoader):
    """SafeLoader that also reads exponent floats without a dot (``1e-3``)."""


_Loader.add_implicit_resolver(
    "tag:yaml.org,2002:float",
    re.compile(
        r"""^(?:[-+]?(?:[0-9][0-9_]*)\.[0-9_]*(?:[eE][-+]?[0-9]+)?
        |[-+]?(?:[0-9][0-9_]*)(?:[eE][-+]?[0-9]+)
        |\.[0-9_]+(?:[eE][-+][0-9]+)?
        |[-+]?\.(?:inf|Inf|INF)
        |\.(?:nan|NaN|NAN))$""",
        re.X,
    ),
    list("-+0123456789."),
)


class ConfigError(ValueError):
    def __init__(self, message: str, line: int | None = None, key: str | None = None):
        self.line = line
        self.key = key
        where = f"line {line}: " if line is not None else ""
        what = f"{key}: " if key is not None else ""
        super().__init__(f"{where}{what}{message}")


@dataclass(frozen=True)
class ExperimentConfig:
    seed: int = 0
    n_packets: int = 500
    snr_db: float = 20.0
    n_taps: int = 8
    tap_decay: float = 0.5
    tx_power: float = 1.0
    sample_rate_hz: float = 20e6
    # PSD pipeline
    n_samples: int = 10240
    n_bins: int = 128
    psd_method: str = "welch"
    curve_units: str = "db"
    span: float = 0.4
    steady_level: float | None = None
    # subcarrier study
    n_subcarriers: int = 72
    n_fft: int = 128
    device_gain_spread_db: float = 3.0
    m_values: tuple[int, ...] = (4, 7, 14, 28)
    csi2bit_enabled: bool = True
    # eavesdropper studies
    m_eve: int = 4
    n_bearings: int = 6
    eve_distances_wavelengths: tuple[float, ...] = (0.0, 0.1, 0.25, 0.5, 1.0, 2.0, 3.0, 4.0)
    leakage_distances_wavelengths: tuple[float, ...] = (0.82, 1.63, 2.45, 3.27, 4.08)
    movement_enabled: bool = True
    movement_period_packets: int = 10
    movement_duty: float = 0.5
    movement_blockage_db: float = 10.0
    movement_max_rotation_deg: float = 45.0
    asbg_enabled: bool = True
    asbg_alpha: float = 0.5

    @property
    def movement(self) -> MovementPattern:
        return MovementPattern(
            self.movement_period_packets, self.movement_duty, self.movement_blockage_db
        )

    @property
    def bearings_deg(self) -> list[float]:
        return [360.0 * b / self.n_bearings for b in range(self.n_bearings)]

    def to_dict(self) -> dict:
        d = asdict(self)
        for k, v in d.items():
            if isinstance(v, tuple):
                d[k] = list(v)
        return d

    def digest(self) -> str:
        blob = json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode()).hexdigest()

    def to_yaml(self) -> str:
        lines = []
        for k, v in self.to_dict().items():
            lines.append(f"{k}: {_yaml_scalar(v)}")
        return "\n".join(lines) + "\n"


def _yaml_scalar(v) -> str:
    if v is None:
        return "null"
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        r = repr(v)
        mant, e, exp = r.partition("e")
        return f"{mant}.0e{exp}" if e and "." not in mant else r
    if isinstance(v, list):
        return "[" + ", ".join(_yaml_scalar(x) for x in v) + "]"
    return str(v)


_FIELDS = {f.name: f for f in fields(ExperimentConfig)}


def _coerce(name: str, value, line: int | None):
    default = _FIELDS[name].default

    def fail(msg):
        raise ConfigError(msg, line, name)

    if name == "steady_level":
        if value is None:
            return None
        default = 0.0
    if isinstance(default, bool):
        if not isinstance(value, bool):
            fail(f"expected true/false, got {value!r}")
        return value
    if isinstance(default, int):
        if isinstance(value, bool) or not isinstance(value, int):
            fail(f"expected an integer, got {value!r}")
        return value
    if isinstance(default, float):
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            fail(f"expected a number, got {value!r}")
        if not math.isfinite(value):
            fail(f"expected a finite number, got {value!r}")
        return float(value)
    if isinstance(default, str):
        if not isinstance(value, str):
            fail(f"expected a string, got {value!r}")
        return value
    if isinstance(default, tuple):
        if not isinstance(value, list) or not value:
            fail("expected a non-empty list")
        elem = type(default[0])
        out = []
        for x in value:
            if isinstance(x, bool) or not isinstance(x, (int, float)):
                fail(f"list element {x!r} is not a number")
            if elem is int and not isinstance(x, int):
                fail(f"list element {x!r} is not an integer")
            if not math.isfinite(x):
                fail(f"list element {x!r} is not finite")
            out.append(elem(x))
        return tuple(out)
    fail("unsupported field")  # pragma: no cover


def validate(cfg: ExperimentConfig, lines: dict[str, int] | None = None) -> ExperimentConfig:
    """Check every component precondition; raise ConfigError naming the line."""
    lines = lines or {}

    def check(ok: bool, key: str, msg: str):
        if not ok:
            raise ConfigError(msg, lines.get(key), key)

    check(cfg.seed >= 0, "seed", "must be >= 0")
    check(cfg.n_packets >= 1, "n_packets", "must be >= 1")
    check(1 <= cfg.n_taps <= MAX_TAPS, "n_taps", f"must be in [1, {MAX_TAPS}]")
    check(0 < cfg.tap_decay <= 1, "tap_decay", "must lie in (0, 1]")
    check(cfg.tx_power > 0, "tx_power", "must be positive")
    check(cfg.sample_rate_hz > 0, "sample_rate_hz", "must be positive")
    check(
        cfg.n_bins >= 8 and cfg.n_bins & (cfg.n_bins - 1) == 0,
        "n_bins",
        "must be a power of two >= 8",
    )
    check(cfg.n_samples >= cfg.n_bins, "n_samples", "must be >= n_bins")
    check(cfg.n_samples > cfg.n_taps, "n_samples", "must exceed n_taps")
    check(cfg.psd_method in ("welch", "periodogram"), "psd_method", "must be welch or periodogram")
    check(cfg.curve_units in ("db", "linear"), "curve_units", "must be db or linear")
    check(0 < cfg.span <= 1, "span", "must lie in (0, 1]")
    check(math.ceil(cfg.span * cfg.n_bins) >= 3, "span", "span too small for n_bins")
    check(
        math.ceil(cfg.span * cfg.n_subcarriers) >= 3,
        "span",
        "span too small for n_subcarriers",
    )
    check(4 <= cfg.n_subcarriers <= cfg.n_fft, "n_subcarriers", "must be in [4, n_fft]")
    check(cfg.device_gain_spread_db >= 0, "device_gain_spread_db", "must be >= 0")
    for m in cfg.m_values:
        check(m >= 1, "m_values", f"segment count {m} must be >= 1")
        check(
            cfg.n_subcarriers // m >= 2,
            "m_values",
            f"too many segments: {m} segments of {cfg.n_subcarriers} subcarriers",
        )
    check(cfg.m_eve >= 1 and cfg.n_bins // cfg.m_eve >= 2, "m_eve", "too many segments for n_bins")
    check(cfg.n_bearings >= 1, "n_bearings", "must be >= 1")
    for key in ("eve_distances_wavelengths", "leakage_distances_wavelengths"):
        check(all(d >= 0 for d in getattr(cfg, key)), key, "distances must be >= 0")
    check(cfg.movement_period_packets >= 2, "movement_period_packets", "must be >= 2")
    check(0 < cfg.movement_duty < 1, "movement_duty", "must lie in (0, 1)")
    check(cfg.movement_blockage_db > 0, "movement_blockage_db", "must be positive")
    check(cfg.movement_max_rotation_deg >= 0, "movement_max_rotation_deg", "must be >= 0")
    check(cfg.asbg_alpha >= 0, "asbg_alpha", "must be >= 0")
    return cfg


def from_mapping(data: dict, lines: dict[str, int] | None = None) -> ExperimentConfig:
    lines = lines or {}
    kwargs = {}
    for key, value in data.items():
        if key not in _FIELDS:
            raise ConfigError("unknown key", lines.get(key), key)
        kwargs[key] = _coerce(key, value, lines.get(key))
    return validate(ExperimentConfig(**kwargs), lines)


def parse_config(text: str) -> ExperimentConfig:
    """Parse a flat YAML mapping into a validated :class:`ExperimentConfig`."""
    try:
        node = yaml.compose(text, Loader=_Loader)
    except yaml.YAMLError as exc:
        mark = getattr(exc, "problem_mark", None)
        raise ConfigError(f"malformed YAML: {exc}", mark.line + 1 if mark else None) from None
    if node is None:
        return validate(ExperimentConfig())
    if not isinstance(node, yaml.MappingNode):
        raise ConfigError("top level must be a key: value mapping", node.start_mark.line + 1)
    lines: dict[str, int] = {}
    for key_node, _ in node.value:
        key = key_node.value
        line = key_node.start_mark.line + 1
        if key in lines:
            raise ConfigError(f"duplicate key (first on line {lines[key]})", line, key)
        lines[key] = line
    data = yaml.load(text, Loader=_Loader)
    return from_mapping(data, lines)


def load_config(path: str | Path) -> ExperimentConfig:
    return parse_config(Path(path).read_text())


def replace_fields(cfg: ExperimentConfig, **overrides) -> ExperimentConfig:
    """Apply overrides (e.g. from CLI flags) and re-validate."""
    data = cfg.to_dict()
    data.update({k: v for k, v in overrides.items() if v is not None})
    return from_mapping(data)

