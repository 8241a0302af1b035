"""Wire format for probe, completion and report messages.

Layout (all integers big-endian):

    magic  'UBE1' (4 bytes)
    type   1 byte: 0x00 probe, 0x01 completion, 0x02 report
    body   probe      -> u64 tab_total_bytes, u32 payload_len, payload
           completion -> u64 tab_total_bytes
           report     -> u64 uavg_bps, u32 sample_count

The framing is self-delimiting, so the same encoding works over datagram
transports (one frame per datagram) and byte streams (length-prefixed
payload).  ``decode_stream`` consumes complete frames greedily and keeps
the unconsumed suffix, resynchronizing on the magic after garbage.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass, field

MAGIC = b"UBE1"
TYPE_PROBE = 0x00
TYPE_COMPLETION = 0x01
TYPE_REPORT = 0x02

_PROBE_FIXED = struct.Struct(">QI")
_COMPLETION_BODY = struct.Struct(">Q")
_REPORT_BODY = struct.Struct(">QI")

HEADER_LEN = len(MAGIC) + 1
PROBE_HEADER_LEN = HEADER_LEN + _PROBE_FIXED.size  # 17 bytes before the payload
COMPLETION_LEN = HEADER_LEN + _COMPLETION_BODY.size
REPORT_LEN = HEADER_LEN + _REPORT_BODY.size
MAX_PAYLOAD = 1 << 20


class FrameError(ValueError):
    """Raised when a frame cannot be encoded (e.g. oversized payload)."""


@dataclass(frozen=True)
class ProbeFrame:
    """One probe message: cumulative sent-byte counter plus padding."""

    tab_total_bytes: int
    payload: bytes = b""

    @property
    def payload_len(self) -> int:
        return len(self.payload)

    @property
    def wire_size(self) -> int:
        return PROBE_HEADER_LEN + len(self.payload)


@dataclass(frozen=True)
class CompletionFrame:
    tab_total_bytes: int

    wire_size = COMPLETION_LEN


@dataclass(frozen=True)
class ReportFrame:
    uavg_bps: int
    sample_count: int

    wire_size = REPORT_LEN


Frame = ProbeFrame | CompletionFrame | ReportFrame


def probe_wire_size(payload_len: int) -> int:
    return PROBE_HEADER_LEN + payload_len


def encode_frame(frame: Frame) -> bytes:
    if isinstance(frame, ProbeFrame):
        if len(frame.payload) > MAX_PAYLOAD:
            raise FrameError(f"payload of {len(frame.payload)} bytes exceeds {MAX_PAYLOAD}")
        return (
            MAGIC
            + bytes([TYPE_PROBE])
            + _PROBE_FIXED.pack(frame.tab_total_bytes, len(frame.payload))
            + frame.payload
        )
    if isinstance(frame, CompletionFrame):
        return MAGIC + bytes([TYPE_COMPLETION]) + _COMPLETION_BODY.pack(frame.tab_total_bytes)
    if isinstance(frame, ReportFrame):
        return MAGIC + bytes([TYPE_REPORT]) + _REPORT_BODY.pack(frame.uavg_bps, frame.sample_count)
    raise FrameError(f"unknown frame object {frame!r}")


def _find_resync(buf: bytes, start: int) -> int:
    """Smallest index >= start where buf could begin a frame (full magic or a
    magic prefix running into the end of the buffer)."""
    i = start
    n = len(buf)
    while i < n:
        j = buf.find(MAGIC[:1], i)
        if j < 0:
            return n
        tail = buf[j : j + len(MAGIC)]
        if MAGIC.startswith(tail):
            return j
        i = j + 1
    return n


def decode_stream(buf: bytes) -> tuple[list[Frame], bytes, list[str]]:
    """Decode complete frames from the front of ``buf``.

    Returns (frames, residual, errors).  Malformed data is reported in
    ``errors`` and skipped; a truncated frame at the end of the buffer is
    left in ``residual`` so the caller can retry once more bytes arrive.
    """
    frames: list[Frame] = []
    errors: list[str] = []
    i = 0
    n = len(buf)
    while i < n:
        if not buf.startswith(MAGIC, i):
            j = _find_resync(buf, i)
            errors.append(f"bad magic at offset {i}, skipped {j - i} bytes")
            i = j
            continue
        if n - i < HEADER_LEN:
            break  # partial header, wait for more bytes
        ftype = buf[i + len(MAGIC)]
        if ftype == TYPE_PROBE:
            if n - i < PROBE_HEADER_LEN:
                break
            tab, plen = _PROBE_FIXED.unpack_from(buf, i + HEADER_LEN)
            if plen > MAX_PAYLOAD:
                errors.append(f"oversized payload_len {plen} at offset {i}")
                i += 1
                continue
            end = i + PROBE_HEADER_LEN + plen
            if n < end:
                break
            frames.append(ProbeFrame(tab, bytes(buf[i + PROBE_HEADER_LEN : end])))
            i = end
        elif ftype == TYPE_COMPLETION:
            if n - i < COMPLETION_LEN:
                break
            (tab,) = _COMPLETION_BODY.unpack_from(buf, i + HEADER_LEN)
            frames.append(CompletionFrame(tab))
            i += COMPLETION_LEN
        elif ftype == TYPE_REPORT:
            if n - i < REPORT_LEN:
                break
            uavg, cnt = _REPORT_BODY.unpack_from(buf, i + HEADER_LEN)
            frames.append(ReportFrame(uavg, cnt))
            i += REPORT_LEN
        else:
            errors.append(f"unknown frame type 0x{ftype:02x} at offset {i}")
            i += 1
    return frames, bytes(buf[i:]), errors


class StreamDecoder:
    """Stateful wrapper around decode_stream for chunked transports."""

    def __init__(self) -> None:
        self._buf = b""
        self.errors: list[str] = []

    def feed(self, chunk: bytes) -> list[Frame]:
        frames, self._buf, errs = decode_stream(self._buf + chunk)
        self.errors.extend(errs)
        return frames

    @property
    def residual(self) -> bytes:
        return self._buf
