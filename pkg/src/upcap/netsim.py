"""Deterministic discrete-event model of the source's upload path.

One FIFO link of capacity sub_bps serves every destination in send order.
Each helper sits behind a path with its own serialization bandwidth,
latency, jitter and loss; paths may share a bottleneck accumulator.  Echo
round-trip times grow with the bytes queued on the link, which is what the
rate-limited ping experiments rely on.

Time is continuous double-precision seconds.  Everything random (jitter,
loss) is drawn from one seeded generator in event order, so identical
configurations replay identical traces.
"""

from __future__ import annotations

import heapq
import math
import random
from dataclasses import dataclass, field


@dataclass
class PathConfig:
    ab_bps: float                     # available bandwidth of the path
    base_latency: float = 0.02
    jitter: float = 0.0               # max uniform extra delay
    loss_prob: float = 0.0
    shared_bottleneck_group: str | None = None

    def __post_init__(self) -> None:
        if self.ab_bps <= 0:
            raise ValueError("path bandwidth must be positive")
        if not (0.0 <= self.loss_prob <= 1.0):
            raise ValueError("loss_prob must lie in [0, 1]")


@dataclass
class BackgroundFlow:
    rate_bps: float
    start: float = 0.0
    end: float = math.inf
    chunk_bytes: int = 4096           # background apps send 4 KB packets


@dataclass
class PingConfig:
    base_rtt: float = 0.02
    timeout: float = 20.0
    probe_bytes: int = 64             # echo request size, shares the uplink


@dataclass
class SimConfig:
    sub_bps: float
    paths: list[PathConfig] = field(default_factory=list)
    background_flows: list[BackgroundFlow] = field(default_factory=list)
    ping: PingConfig = field(default_factory=PingConfig)
    seed: int = 0
    max_events: int = 2_000_000

    def __post_init__(self) -> None:
        if self.sub_bps <= 0:
            raise ValueError("upload capacity must be positive")


@dataclass(frozen=True)
class TraceRow:
    time: float
    kind: str
    helper: int | None
    nbytes: int
    rtt: float | None = None


class EventExplosion(RuntimeError):
    pass


class Simulator:
    """Event loop plus the link/path/ping models.

    Scenario code schedules callbacks with :meth:`schedule`; the loop runs
    them in nondecreasing time order with ties broken by insertion sequence.
    """

    def __init__(self, config: SimConfig) -> None:
        self.config = config
        self.rng = random.Random(config.seed)
        self.now = 0.0
        self._heap: list[tuple[float, int, object]] = []
        self._seq = 0
        self.link_busy_until = 0.0
        self._path_acc: dict[object, float] = {}
        self.trace: list[TraceRow] = []
        self.bytes_enqueued = 0
        self.bytes_delivered = 0
        self.bytes_lost = 0
        self.events_run = 0

    # -- event loop ------------------------------------------------------

    def schedule(self, t: float, fn) -> None:
        if t < self.now:
            raise ValueError(f"cannot schedule into the past ({t} < {self.now})")
        heapq.heappush(self._heap, (t, self._seq, fn))
        self._seq += 1

    def run(self, until: float | None = None) -> None:
        while self._heap:
            t, _, fn = self._heap[0]
            if until is not None and t > until:
                break
            heapq.heappop(self._heap)
            self.now = t
            self.events_run += 1
            if self.events_run > self.config.max_events:
                raise EventExplosion(f"exceeded {self.config.max_events} events")
            fn(t)
        if until is not None and until > self.now:
            self.now = until

    # -- FIFO upload link ------------------------------------------------

    def enqueue_send(self, now: float, dest: int | None, nbytes: int) -> float:
        """Append to the shared FIFO; returns the time the link finishes
        serializing this packet."""
        if nbytes <= 0:
            raise ValueError("nbytes must be positive")
        start = max(now, self.link_busy_until)
        done = start + nbytes / self.config.sub_bps
        self.link_busy_until = done
        self.bytes_enqueued += nbytes
        self.trace.append(TraceRow(now, "enqueue", dest, nbytes))
        return done

    def queued_delay(self, now: float) -> float:
        return max(0.0, self.link_busy_until - now)

    def bytes_in_flight(self) -> int:
        return self.bytes_enqueued - self.bytes_delivered - self.bytes_lost

    # -- per-helper paths ------------------------------------------------

    def path_delivery_time(self, path_idx: int, link_done: float, nbytes: int) -> float | None:
        """Serialization through the path (or its shared bottleneck), then
        latency and jitter; None when the frame is lost."""
        path = self.config.paths[path_idx]
        key = path.shared_bottleneck_group if path.shared_bottleneck_group is not None else ("path", path_idx)
        busy = self._path_acc.get(key, 0.0)
        ser_done = max(link_done, busy) + nbytes / path.ab_bps
        self._path_acc[key] = ser_done
        jitter = self.rng.uniform(0.0, path.jitter) if path.jitter > 0 else 0.0
        lost = path.loss_prob > 0 and self.rng.random() < path.loss_prob
        if lost:
            self.bytes_lost += nbytes
            self.trace.append(TraceRow(link_done, "loss", path_idx, nbytes))
            return None
        return ser_done + path.base_latency + jitter

    def send_to_helper(self, now: float, path_idx: int, nbytes: int, on_arrival) -> float:
        """Enqueue on the link, route through the path, schedule delivery.

        Returns the link-done time (useful for closed-loop senders)."""
        link_done = self.enqueue_send(now, path_idx, nbytes)
        arrival = self.path_delivery_time(path_idx, link_done, nbytes)
        if arrival is not None:
            def deliver(t: float, _nb=nbytes, _cb=on_arrival, _h=path_idx) -> None:
                self.bytes_delivered += _nb
                self.trace.append(TraceRow(t, "deliver", _h, _nb))
                _cb(t)
            self.schedule(arrival, deliver)
        return link_done

    def send_to_sink(self, now: float, nbytes: int) -> float:
        """Traffic that occupies the uplink but targets no helper."""
        link_done = self.enqueue_send(now, None, nbytes)
        def drained(t: float, _nb=nbytes) -> None:
            self.bytes_delivered += _nb
        self.schedule(link_done, drained)
        return link_done

    # -- ping model ------------------------------------------------------

    def ping_rtt(self, now: float) -> tuple[float, bool]:
        """(rtt, timed_out).  rtt = base_rtt + queue wait; the echo request's
        own bytes join the FIFO and therefore load the link a little."""
        ping = self.config.ping
        rtt = ping.base_rtt + self.queued_delay(now)
        self.send_to_sink(now, ping.probe_bytes)
        timed_out = rtt > ping.timeout
        self.trace.append(TraceRow(now, "ping", None, ping.probe_bytes, rtt=rtt))
        return rtt, timed_out

    # -- background flows ------------------------------------------------

    def start_background_flows(self) -> None:
        for flow in self.config.background_flows:
            if flow.rate_bps <= 0:
                continue
            period = flow.chunk_bytes / flow.rate_bps

            def tick(t: float, _f=flow, _p=period) -> None:
                if t >= _f.end:
                    return
                self.send_to_sink(t, _f.chunk_bytes)
                self.schedule(t + _p, tick)

            self.schedule(flow.start, tick)
