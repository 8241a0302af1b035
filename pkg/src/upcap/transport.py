"""Socket transports: helper servers and sender-side estimation runs.

The same engines that drive the simulator run here against real sockets.
Datagram transports carry exactly one frame per datagram; the TCP paths
use the stream decoder and tolerate arbitrary chunking.  A UDP echo
server doubles as the "ping" landmark for real-transport probing.
"""

from __future__ import annotations

import socket
import time
from dataclasses import dataclass

from .helperengine import FilterParams, HelperEngine
from .sender import (
    AggregationParams,
    CapacityEstimate,
    SenderConfig,
    SenderEngine,
    TokenBucket,
)
from .wire import (
    CompletionFrame,
    ProbeFrame,
    ReportFrame,
    StreamDecoder,
    decode_stream,
    encode_frame,
)

ECHO_MAGIC = b"UBE1ECHO"


@dataclass
class HelperRunStats:
    samples: int
    discarded: int
    report_sent: bool
    peer: tuple | None


def run_helper_udp(
    bind: tuple[str, int],
    params: FilterParams | None = None,
    *,
    poll_interval: float = 0.25,
    ready_callback=None,
) -> HelperRunStats:
    """Serve one estimation session over UDP and return its statistics.

    Probe frames are accepted from the first peer that talks to us; the
    report goes back to that peer after a completion frame or after the
    idle timeout expires.  Echo datagrams are answered verbatim at any
    time, so the same port can serve as a ping landmark.
    """
    engine = HelperEngine(params)
    peer: tuple | None = None
    with socket.socket(socket.AF_INET, socket.SOCK_DGRAM) as sock:
        sock.bind(bind)
        sock.settimeout(poll_interval)
        if ready_callback is not None:
            ready_callback(sock.getsockname())
        report_sent = False
        while True:
            now = time.monotonic()
            if engine.check_idle(now) and engine.arrivals:
                break
            try:
                data, addr = sock.recvfrom(65535)
            except socket.timeout:
                continue
            if data.startswith(ECHO_MAGIC):
                sock.sendto(data, addr)
                continue
            frames, _, _ = decode_stream(data)
            for frame in frames:
                if isinstance(frame, ProbeFrame):
                    if peer is None:
                        peer = addr
                    if addr == peer:
                        engine.accept_frame(frame.tab_total_bytes, time.monotonic())
                elif isinstance(frame, CompletionFrame) and addr == peer:
                    engine.on_completion(time.monotonic())
            if engine.finalized:
                break
        rpt = engine.report()
        if rpt is not None and peer is not None:
            sock.sendto(encode_frame(rpt), peer)
            report_sent = True
        return HelperRunStats(len(engine.samples), engine.discarded, report_sent, peer)


def run_helper_tcp(
    bind: tuple[str, int],
    params: FilterParams | None = None,
    *,
    accept_timeout: float = 30.0,
    ready_callback=None,
) -> HelperRunStats:
    """Serve one estimation session over a single TCP connection."""
    engine = HelperEngine(params)
    decoder = StreamDecoder()
    with socket.socket(socket.AF_INET, socket.SOCK_STREAM) as srv:
        srv.setsockopt(socket.SOL_SOCKET, socket.SO_REUSEADDR, 1)
        srv.bind(bind)
        srv.listen(1)
        srv.settimeout(accept_timeout)
        if ready_callback is not None:
            ready_callback(srv.getsockname())
        conn, peer = srv.accept()
        with conn:
            conn.settimeout(0.25)
            while True:
                now = time.monotonic()
                if engine.check_idle(now) and engine.arrivals:
                    break
                try:
                    chunk = conn.recv(65536)
                except socket.timeout:
                    continue
                if not chunk:
                    engine.on_completion(time.monotonic())
                    break
                for frame in decoder.feed(chunk):
                    if isinstance(frame, ProbeFrame):
                        engine.accept_frame(frame.tab_total_bytes, time.monotonic())
                    elif isinstance(frame, CompletionFrame):
                        engine.on_completion(time.monotonic())
                if engine.finalized:
                    break
            rpt = engine.report()
            report_sent = False
            if rpt is not None:
                conn.sendall(encode_frame(rpt))
                report_sent = True
            return HelperRunStats(len(engine.samples), engine.discarded, report_sent, peer)


def _pace(bucket: TokenBucket | None, nbytes: int) -> None:
    if bucket is None:
        return
    now = time.monotonic()
    ready = bucket.earliest_send(now, nbytes)
    if ready > now:
        time.sleep(ready - now)
    bucket.consume(time.monotonic(), nbytes)


def run_sender_udp(
    helpers: list[tuple[str, int]],
    config: SenderConfig | None = None,
    agg_params: AggregationParams | None = None,
    *,
    report_deadline: float = 10.0,
) -> CapacityEstimate:
    """Run one estimation session against UDP helpers and aggregate."""
    cfg = config or SenderConfig(n_helpers=len(helpers))
    if cfg.n_helpers != len(helpers):
        raise ValueError("sender config does not match the helper list")
    agg = agg_params or AggregationParams()
    engine = SenderEngine(cfg)
    bucket = TokenBucket(cfg.rate_limit, start=time.monotonic()) if cfg.rate_limit else None
    addr_to_helper = {addr: h for h, addr in enumerate(helpers)}
    with socket.socket(socket.AF_INET, socket.SOCK_DGRAM) as sock:
        sock.bind(("0.0.0.0", 0))
        while True:
            nxt = engine.next_frame(time.monotonic())
            if nxt is None:
                break
            h, frame = nxt
            payload = encode_frame(frame)
            _pace(bucket, len(payload))
            sock.sendto(payload, helpers[h])
        for h, frame in enumerate(engine.completion_frames()):
            sock.sendto(encode_frame(frame), helpers[h])
        deadline = time.monotonic() + report_deadline
        sock.settimeout(0.25)
        while len(engine.reports) < len(helpers) and time.monotonic() < deadline:
            try:
                data, addr = sock.recvfrom(65535)
            except socket.timeout:
                continue
            frames, _, _ = decode_stream(data)
            for f in frames:
                if isinstance(f, ReportFrame) and addr in addr_to_helper:
                    engine.receive_report(addr_to_helper[addr], f.uavg_bps)
    return engine.aggregate(agg)


def run_sender_tcp(
    helpers: list[tuple[str, int]],
    config: SenderConfig | None = None,
    agg_params: AggregationParams | None = None,
    *,
    report_deadline: float = 10.0,
) -> CapacityEstimate:
    """Run one estimation session over per-helper TCP connections."""
    cfg = config or SenderConfig(n_helpers=len(helpers))
    if cfg.n_helpers != len(helpers):
        raise ValueError("sender config does not match the helper list")
    agg = agg_params or AggregationParams()
    engine = SenderEngine(cfg)
    bucket = TokenBucket(cfg.rate_limit, start=time.monotonic()) if cfg.rate_limit else None
    conns: list[socket.socket] = []
    try:
        for addr in helpers:
            c = socket.create_connection(addr, timeout=10.0)
            c.setsockopt(socket.IPPROTO_TCP, socket.TCP_NODELAY, 1)
            conns.append(c)
        while True:
            nxt = engine.next_frame(time.monotonic())
            if nxt is None:
                break
            h, frame = nxt
            payload = encode_frame(frame)
            _pace(bucket, len(payload))
            conns[h].sendall(payload)
        for h, frame in enumerate(engine.completion_frames()):
            conns[h].sendall(encode_frame(frame))
        deadline = time.monotonic() + report_deadline
        for h, conn in enumerate(conns):
            decoder = StreamDecoder()
            conn.settimeout(0.25)
            got = False
            while not got and time.monotonic() < deadline:
                try:
                    chunk = conn.recv(65536)
                except socket.timeout:
                    continue
                if not chunk:
                    break
                for f in decoder.feed(chunk):
                    if isinstance(f, ReportFrame):
                        engine.receive_report(h, f.uavg_bps)
                        got = True
    finally:
        for c in conns:
            c.close()
    return engine.aggregate(agg)


def run_echo_server(bind: tuple[str, int], *, duration: float | None = None, ready_callback=None) -> int:
    """UDP echo landmark; returns the number of echoed datagrams."""
    count = 0
    end = None if duration is None else time.monotonic() + duration
    with socket.socket(socket.AF_INET, socket.SOCK_DGRAM) as sock:
        sock.bind(bind)
        sock.settimeout(0.25)
        if ready_callback is not None:
            ready_callback(sock.getsockname())
        while end is None or time.monotonic() < end:
            try:
                data, addr = sock.recvfrom(65535)
            except socket.timeout:
                continue
            sock.sendto(data, addr)
            count += 1
    return count


def ping_once(sock: socket.socket, landmark: tuple[str, int], timeout: float, seq: int = 0) -> tuple[float, bool]:
    """(rtt_seconds, timed_out) for a single UDP echo round trip."""
    token = ECHO_MAGIC + seq.to_bytes(8, "big")
    start = time.monotonic()
    sock.sendto(token, landmark)
    sock.settimeout(timeout)
    try:
        while True:
            data, _ = sock.recvfrom(65535)
            if data == token:
                return time.monotonic() - start, False
            if time.monotonic() - start > timeout:
                return timeout, True
    except socket.timeout:
        return timeout, True
