"""Command-line front end: ``extract``, ``experiment``, ``gen-trace``, ``version``.

Exit codes: 0 success, 2 usage or configuration error, 3 data error.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import fields
from pathlib import Path

import numpy as np

from . import __version__
from . import channel as chn
from .codec import code_to_bits, curve_from_trace, encode_curve
from .config import ConfigError, ExperimentConfig, load_config, replace_fields
from .dsp import IqTrace
from .experiments import EXPERIMENTS, run
from .reports import write_result
from .traceio import TraceFormatError, read_trace, write_trace

EXIT_OK, EXIT_USAGE, EXIT_DATA = 0, 2, 3


class UsageError(Exception):
    pass


def _parse_taps(text: str) -> np.ndarray:
    try:
        return np.array([complex(t.strip().replace(" ", "")) for t in text.split(",")])
    except ValueError:
        raise UsageError(f"--taps: cannot parse {text!r} as comma-separated complex numbers") from None


def chirp_probe(n: int, power: float = 1.0) -> np.ndarray:
    """Constant-envelope chirp whose N-point DFT has constant magnitude."""
    k = np.arange(n)
    phase = np.pi * k * k / n if n % 2 == 0 else np.pi * k * (k + 1) / n
    return np.sqrt(power) * np.exp(-1j * phase)


# ---------------------------------------------------------------------------
# subcommands


def cmd_extract(args) -> int:
    trace = read_trace(args.trace, sample_rate_hz=args.sample_rate_hz)
    curve = curve_from_trace(
        trace, args.n_bins, args.span, db=args.units == "db", psd_method=args.psd_method
    )
    code = encode_curve(curve, args.m, args.steady_level)
    bits = code_to_bits(code)
    print(f"code: {code}")
    print(f"bits: {''.join(map(str, bits))}")
    if args.curve_csv:
        freqs = (np.arange(len(curve)) - len(curve) // 2) * curve.x_step
        rows = ["frequency_hz,value"]
        rows += [f"{float(f)!r},{float(v)!r}" for f, v in zip(freqs, curve.values)]
        Path(args.curve_csv).write_text("\n".join(rows) + "\n")
    return EXIT_OK


def cmd_gen_trace(args) -> int:
    if args.n < 2:
        raise UsageError(f"--n must be >= 2, got {args.n}")
    if not args.power > 0:
        raise UsageError("--power must be positive")
    if args.waveform == "qpsk":
        tx = chn.generate_qpsk((args.seed, 1), args.n, args.power, args.sample_rate_hz)
    else:
        tx = IqTrace(chirp_probe(args.n, args.power), args.sample_rate_hz)
    if args.taps is not None:
        ch = chn.ChannelRealization(_parse_taps(args.taps))
    else:
        try:
            ch = chn.draw_channel((args.seed, 0), args.n_taps, args.tap_decay)
        except ValueError as exc:
            raise UsageError(str(exc)) from None
    if len(tx) <= ch.n_taps:
        raise UsageError(f"--n must exceed the tap count ({ch.n_taps})")
    if args.snr_db is None:
        noise = chn.NoiseSpec(0.0)
    else:
        noise = chn.NoiseSpec.from_snr(args.snr_db, args.power * ch.power)
    y = chn.observe(tx, ch, noise, (args.seed, 2))
    write_trace(args.out, y, fmt=args.format)
    return EXIT_OK


_OVERRIDABLE = [f for f in fields(ExperimentConfig) if f.name != "seed"]


def _bool(text: str) -> bool:
    v = text.strip().lower()
    if v not in ("true", "false"):
        raise argparse.ArgumentTypeError(f"expected true or false, got {text!r}")
    return v == "true"


def _list_of(elem):
    def parse(text: str) -> list:
        try:
            return [elem(x) for x in text.split(",")]
        except ValueError:
            raise argparse.ArgumentTypeError(
                f"expected comma-separated {elem.__name__} values, got {text!r}"
            ) from None

    return parse


def _override_type(f):
    default = f.default
    if isinstance(default, bool):
        return _bool
    if isinstance(default, tuple):
        return _list_of(type(default[0]))
    if f.name == "steady_level":
        return float
    return type(default)


def cmd_experiment(args) -> int:
    cfg = load_config(args.config) if args.config else ExperimentConfig()
    overrides = {f.name: getattr(args, f.name) for f in _OVERRIDABLE}
    cfg = replace_fields(cfg, seed=args.seed, **overrides)

    def progress(done, total):
        if not args.quiet and (done == total or done % max(1, total // 20) == 0):
            print(f"\r{args.which}: {done}/{total} packets", end="", file=sys.stderr)
            if done == total:
                print(file=sys.stderr)

    result = run(args.which, cfg, progress)
    for p in write_result(result, args.out):
        print(p)
    return EXIT_OK


def cmd_version(args) -> int:
    print(f"puzzlekey {__version__}")
    return EXIT_OK


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="puzzlekey", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="cmd", required=True)

    e = sub.add_parser("extract", help="Extract a key from an IQ trace file.")
    e.add_argument("trace", help="binary PZL1 trace or two-column CSV")
    e.add_argument("--m", type=int, default=4, help="number of segments")
    e.add_argument("--span", type=float, default=0.4)
    e.add_argument("--n-bins", type=int, default=128)
    e.add_argument("--units", choices=["db", "linear"], default="db")
    e.add_argument("--psd-method", choices=["welch", "periodogram"], default="welch")
    e.add_argument("--steady-level", type=float, default=None)
    e.add_argument("--sample-rate-hz", type=float, default=20e6)
    e.add_argument("--curve-csv", default=None, help="write the smoothed curve here")
    e.set_defaults(func=cmd_extract)

    x = sub.add_parser("experiment", help="Run a seeded simulation study.")
    x.add_argument("which", choices=EXPERIMENTS)
    x.add_argument("--seed", type=int, required=True)
    x.add_argument("--config", default=None, help="flat YAML config file")
    x.add_argument("--out", default="results")
    x.add_argument("--quiet", action="store_true")
    grp = x.add_argument_group("config overrides", "each flag replaces the config field of the same name")
    for f in _OVERRIDABLE:
        metavar = "A,B,..." if isinstance(f.default, tuple) else None
        grp.add_argument(
            "--" + f.name.replace("_", "-"),
            dest=f.name,
            type=_override_type(f),
            default=None,
            metavar=metavar,
        )
    x.set_defaults(func=cmd_experiment)

    g = sub.add_parser("gen-trace", help="Simulate one received packet and save it.")
    g.add_argument("--seed", type=int, required=True)
    g.add_argument("--out", required=True)
    g.add_argument("--n", type=int, default=10240, help="number of samples")
    g.add_argument("--power", type=float, default=1.0)
    g.add_argument("--waveform", choices=["qpsk", "chirp"], default="qpsk")
    g.add_argument("--n-taps", type=int, default=8)
    g.add_argument("--tap-decay", type=float, default=0.5)
    g.add_argument("--taps", default=None, help='explicit taps, e.g. "1,-0.9" or "1,0.9j"')
    g.add_argument("--snr-db", type=float, default=None, help="omit for a noise-free trace")
    g.add_argument("--sample-rate-hz", type=float, default=20e6)
    g.add_argument("--format", choices=["bin", "csv"], default="bin")
    g.set_defaults(func=cmd_gen_trace)

    v = sub.add_parser("version", help="Print the version.")
    v.set_defaults(func=cmd_version)
    return p


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except (UsageError, ConfigError) as exc:
        print(f"puzzlekey: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except TraceFormatError as exc:
        print(f"puzzlekey: malformed trace {getattr(args, 'trace', '')}: {exc}", file=sys.stderr)
        return EXIT_DATA
    except (ValueError, OSError) as exc:
        print(f"puzzlekey: error: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
