import struct

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from puzzlekey.dsp import IqTrace
from puzzlekey.traceio import (
    TraceFormatError,
    decode_trace,
    encode_trace,
    parse_csv_trace,
    read_trace,
    write_trace,
)


def test_header_layout():
    data = encode_trace(IqTrace([1 + 2j, -3 - 4j]))
    assert data[:4] == b"PZL1"
    assert struct.unpack("<IQ", data[4:16]) == (1, 2)
    assert np.frombuffer(data[16:], "<f4").tolist() == [1, 2, -3, -4]
    assert len(data) == 16 + 16


f32 = st.floats(-1e6, 1e6, width=32, allow_nan=False)


@settings(max_examples=100)
@given(st.lists(st.tuples(f32, f32), min_size=2, max_size=50))
def test_binary_roundtrip(pairs):
    tr = IqTrace([complex(a, b) for a, b in pairs])
    assert decode_trace(encode_trace(tr)) == tr


def test_truncated_header():
    with pytest.raises(TraceFormatError) as ei:
        decode_trace(b"PZL1\x01\x00")
    assert ei.value.offset == 6


def test_bad_magic():
    data = b"XXXX" + encode_trace(IqTrace([1, 2]))[4:]
    with pytest.raises(TraceFormatError, match="byte 0: bad magic"):
        decode_trace(data)


def test_bad_version():
    data = bytearray(encode_trace(IqTrace([1, 2])))
    data[4] = 7
    with pytest.raises(TraceFormatError, match="byte 4"):
        decode_trace(bytes(data))


def test_truncated_payload():
    data = encode_trace(IqTrace(np.ones(10)))[:-5]
    with pytest.raises(TraceFormatError, match="truncated payload") as ei:
        decode_trace(data)
    assert ei.value.offset == len(data)


def test_trailing_bytes():
    with pytest.raises(TraceFormatError, match="trailing"):
        decode_trace(encode_trace(IqTrace(np.ones(4))) + b"\x00")


def test_nan_offset():
    data = bytearray(encode_trace(IqTrace(np.ones(4))))
    data[16 + 12 : 16 + 16] = struct.pack("<f", float("nan"))  # Q of sample 1
    with pytest.raises(TraceFormatError, match="byte 28: non-finite"):
        decode_trace(bytes(data))


def test_csv_with_and_without_header():
    a = parse_csv_trace(b"i,q\n1,2\n3,-4\n")
    b = parse_csv_trace(b"1,2\n3,-4\n")
    assert a == b == IqTrace([1 + 2j, 3 - 4j])


def test_csv_errors():
    with pytest.raises(TraceFormatError, match="byte 4: line 2: expected 2 columns"):
        parse_csv_trace(b"1,2\n3\n")
    with pytest.raises(TraceFormatError, match="line 3: not a number"):
        parse_csv_trace(b"1,2\n3,4\nx,5\n")
    with pytest.raises(TraceFormatError, match="at least 2"):
        parse_csv_trace(b"i,q\n1,2\n")


def test_read_dispatch(tmp_path):
    tr = IqTrace(np.arange(6) * (0.5 - 0.25j))
    write_trace(tmp_path / "a.pzl", tr)
    write_trace(tmp_path / "a.csv", tr, fmt="csv")
    write_trace(tmp_path / "b.txt", tr, fmt="csv")
    assert read_trace(tmp_path / "a.pzl") == tr
    assert read_trace(tmp_path / "a.csv") == tr
    assert read_trace(tmp_path / "b.txt") == tr


def test_read_damaged_binary(tmp_path):
    p = tmp_path / "x.pzl"
    p.write_bytes(b"PZL2" + encode_trace(IqTrace([1, 2]))[4:])
    with pytest.raises(TraceFormatError, match="byte 0"):
        read_trace(p)
