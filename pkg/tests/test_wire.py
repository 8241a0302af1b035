import pytest
from hypothesis import given, settings, strategies as st

from upcap.wire import (
    COMPLETION_LEN,
    PROBE_HEADER_LEN,
    REPORT_LEN,
    CompletionFrame,
    FrameError,
    MAX_PAYLOAD,
    ProbeFrame,
    ReportFrame,
    StreamDecoder,
    decode_stream,
    encode_frame,
)


def test_probe_header_layout():
    wire = encode_frame(ProbeFrame(48, b"\x00" * 4))
    assert wire[:4] == b"UBE1"
    assert wire[4] == 0x00
    assert wire[5:13] == (48).to_bytes(8, "big")
    assert wire[13:17] == (4).to_bytes(4, "big")
    assert len(wire) == PROBE_HEADER_LEN + 4


def test_completion_layout():
    wire = encode_frame(CompletionFrame(0))
    assert wire == b"UBE1" + b"\x01" + b"\x00" * 8
    assert len(wire) == COMPLETION_LEN


def test_report_layout():
    wire = encode_frame(ReportFrame(240000, 57))
    assert wire[:5] == b"UBE1\x02"
    assert wire[5:13] == (240000).to_bytes(8, "big")
    assert wire[13:17] == (57).to_bytes(4, "big")
    assert len(wire) == REPORT_LEN


def test_roundtrip_all_types():
    frames = [
        ProbeFrame(10_000, b"abc"),
        CompletionFrame(123456789),
        ReportFrame(98765, 42),
        ProbeFrame(2**63, b""),
    ]
    buf = b"".join(encode_frame(f) for f in frames)
    decoded, residual, errors = decode_stream(buf)
    assert decoded == frames
    assert residual == b""
    assert errors == []


def test_truncated_frame_stays_in_residual():
    wire = encode_frame(ProbeFrame(100, b"x" * 50))
    frames, residual, errors = decode_stream(wire[:30])
    assert frames == []
    assert residual == wire[:30]
    assert errors == []


def test_resync_after_garbage():
    wire = encode_frame(ReportFrame(5, 1))
    frames, residual, errors = decode_stream(b"JUNKJUNK" + wire)
    assert frames == [ReportFrame(5, 1)]
    assert residual == b""
    assert len(errors) == 1


def test_unknown_type_skipped():
    bad = b"UBE1\xff" + b"\x00" * 8
    frames, _, errors = decode_stream(bad + encode_frame(CompletionFrame(7)))
    assert frames == [CompletionFrame(7)]
    assert errors  # the bad type was reported


def test_oversized_payload_rejected_on_encode():
    with pytest.raises(FrameError):
        encode_frame(ProbeFrame(0, b"x" * (MAX_PAYLOAD + 1)))


def test_split_mid_frame_chunked():
    wire = encode_frame(ProbeFrame(999, b"payload"))
    dec = StreamDecoder()
    assert dec.feed(wire[:7]) == []
    assert dec.feed(wire[7:]) == [ProbeFrame(999, b"payload")]
    assert dec.residual == b""


frame_strategy = st.one_of(
    st.builds(ProbeFrame, st.integers(0, 2**64 - 1), st.binary(max_size=64)),
    st.builds(CompletionFrame, st.integers(0, 2**64 - 1)),
    st.builds(ReportFrame, st.integers(0, 2**64 - 1), st.integers(0, 2**32 - 1)),
)


@settings(max_examples=200)
@given(st.lists(frame_strategy, max_size=8), st.data())
def test_chunked_equals_whole(frames, data):
    buf = b"".join(encode_frame(f) for f in frames)
    whole, residual, _ = decode_stream(buf)
    assert residual == b""
    dec = StreamDecoder()
    chunked = []
    i = 0
    while i < len(buf):
        step = data.draw(st.integers(1, max(1, len(buf) - i)))
        chunked.extend(dec.feed(buf[i : i + step]))
        i += step
    assert chunked == whole == frames
    assert dec.residual == b""


@settings(max_examples=200)
@given(st.binary(max_size=200), st.data())
def test_fuzzed_streams_never_crash_and_agree(noise, data):
    whole, residual, _ = decode_stream(noise)
    dec = StreamDecoder()
    chunked = []
    i = 0
    while i < len(noise):
        step = data.draw(st.integers(1, max(1, len(noise) - i)))
        chunked.extend(dec.feed(noise[i : i + step]))
        i += step
    assert chunked == whole
    assert dec.residual == residual
