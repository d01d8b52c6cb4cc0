"""IQ trace files.

Binary layout (little-endian)::

    offset  size  field
    0       4     magic  b"PZL1"
    4       4     version (u32, currently 1)
    8       8     sample count N (u64)
    16      8*N   interleaved I, Q as float32

CSV traces hold two columns (I, Q) with an optional header row.
"""

from __future__ import annotations

import csv
import io
import struct
from pathlib import Path

import numpy as np

from .dsp import IqTrace

MAGIC = b"PZL1"
VERSION = 1
_HEADER = struct.Struct("<4sIQ")


class TraceFormatError(ValueError):
    def __init__(self, message: str, offset: int):
        self.offset = offset
        super().__init__(f"byte {offset}: {message}")


def encode_trace(trace: IqTrace) -> bytes:
    iq = np.empty(2 * len(trace), dtype="<f4")
    iq[0::2] = trace.samples.real
    iq[1::2] = trace.samples.imag
    return _HEADER.pack(MAGIC, VERSION, len(trace)) + iq.tobytes()


def decode_trace(data: bytes, sample_rate_hz: float = 20e6) -> IqTrace:
    if len(data) < _HEADER.size:
        raise TraceFormatError(
            f"truncated header: file has {len(data)} bytes, header needs {_HEADER.size}",
            len(data),
        )
    magic, version, count = _HEADER.unpack_from(data)
    if magic != MAGIC:
        raise TraceFormatError(f"bad magic {magic!r}, expected {MAGIC!r}", 0)
    if version != VERSION:
        raise TraceFormatError(f"unsupported version {version}", 4)
    if count < 2:
        raise TraceFormatError(f"sample count {count} < 2", 8)
    need = 8 * count
    have = len(data) - _HEADER.size
    if have != need:
        end = _HEADER.size + min(have, need)
        what = "truncated payload" if have < need else "trailing bytes"
        raise TraceFormatError(
            f"{what}: header declares {count} samples ({need} bytes), found {have}", end
        )
    iq = np.frombuffer(data, dtype="<f4", offset=_HEADER.size).astype(np.float64)
    bad = np.flatnonzero(~np.isfinite(iq))
    if bad.size:
        raise TraceFormatError("non-finite sample value", _HEADER.size + 4 * int(bad[0]))
    return IqTrace(iq[0::2] + 1j * iq[1::2], sample_rate_hz=sample_rate_hz)


def parse_csv_trace(data: bytes, sample_rate_hz: float = 20e6) -> IqTrace:
    try:
        text = data.decode("utf-8")
    except UnicodeDecodeError as exc:
        raise TraceFormatError("not UTF-8 text", exc.start) from None
    rows = []
    offset = 0
    for lineno, line in enumerate(io.StringIO(text, newline="")):
        start = offset
        offset += len(line.encode("utf-8"))
        if not line.strip():
            continue
        fields = next(csv.reader([line]))
        if len(fields) != 2:
            raise TraceFormatError(f"line {lineno + 1}: expected 2 columns, got {len(fields)}", start)
        try:
            rows.append((float(fields[0]), float(fields[1])))
        except ValueError:
            if lineno == 0:
                continue  # header row
            raise TraceFormatError(f"line {lineno + 1}: not a number", start) from None
        if not all(np.isfinite(rows[-1])):
            raise TraceFormatError(f"line {lineno + 1}: non-finite sample", start)
    if len(rows) < 2:
        raise TraceFormatError(f"need at least 2 samples, found {len(rows)}", offset)
    a = np.asarray(rows)
    return IqTrace(a[:, 0] + 1j * a[:, 1], sample_rate_hz=sample_rate_hz)


def read_trace(path: str | Path, sample_rate_hz: float = 20e6) -> IqTrace:
    """Read a binary or CSV trace; the magic number decides which."""
    data = Path(path).read_bytes()
    if data[:4] == MAGIC:
        return decode_trace(data, sample_rate_hz)
    if Path(path).suffix.lower() == ".csv":
        return parse_csv_trace(data, sample_rate_hz)
    # NUL bytes near the start mean a damaged binary file, not text
    if b"\x00" in data[:64] or len(data) < 2:
        return decode_trace(data, sample_rate_hz)
    return parse_csv_trace(data, sample_rate_hz)


def write_trace(path: str | Path, trace: IqTrace, fmt: str = "bin") -> None:
    path = Path(path)
    if fmt == "bin":
        path.write_bytes(encode_trace(trace))
    elif fmt == "csv":
        lines = ["i,q"] + [f"{float(z.real)!r},{float(z.imag)!r}" for z in trace.samples]
        path.write_text("\n".join(lines) + "\n")
    else:
        raise ValueError(f"unknown trace format {fmt!r}")
