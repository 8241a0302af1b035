"""Source-side engine: probe scheduling, report aggregation, rate search.

The sender keeps a single cumulative byte counter covering probes,
completions and accounted application traffic (the "virtual helper"), so a
receiver always sees how many bytes left the uplink between two of its
probes.  Aggregation turns the per-helper reports into one capacity figure
with a confidence flag; the available-bandwidth search drives repeated
rate-limited runs through an exponential/binary ladder.
"""

from __future__ import annotations

import math
import statistics
from dataclasses import dataclass, field

from .helperengine import median
from .wire import CompletionFrame, ProbeFrame, probe_wire_size, PROBE_HEADER_LEN


def _per_helper(value, n: int, name: str) -> list[int]:
    if isinstance(value, int):
        return [value] * n
    vals = list(value)
    if len(vals) != n:
        raise ValueError(f"{name} must have one entry per helper")
    return vals


@dataclass
class SenderConfig:
    n_helpers: int
    packets_per_helper: int | list[int] = 20
    packet_size: int | list[int] = 8192       # full frame size on the wire
    schedule: list[int] | None = None         # custom order; default round-robin
    app_buffer_threshold: int = 64 * 1024
    max_probe_gap: float = 0.5
    rate_limit: float | None = None           # bytes/second, None = unlimited

    def __post_init__(self) -> None:
        if self.n_helpers < 1:
            raise ValueError("need at least one helper")
        self.packets_per_helper = _per_helper(self.packets_per_helper, self.n_helpers, "packets_per_helper")
        self.packet_size = _per_helper(self.packet_size, self.n_helpers, "packet_size")
        for s in self.packet_size:
            if s < PROBE_HEADER_LEN:
                raise ValueError(f"packet_size must be >= the {PROBE_HEADER_LEN}-byte frame header")
        if self.rate_limit is not None and self.rate_limit <= 0:
            raise ValueError("rate_limit must be positive")


@dataclass(frozen=True)
class SendDecision:
    defer: bool
    helper: int | None = None
    frame: ProbeFrame | None = None


class SenderEngine:
    """Maintains the TAB counter and the helper-directed send schedule."""

    def __init__(self, config: SenderConfig) -> None:
        self.config = config
        self.tab = 0
        self.sent = [0] * config.n_helpers
        self.app_bytes = 0
        self.last_probe_time: float | None = None
        self._cursor = 0
        self._completed = False
        self.reports: dict[int, int] = {}

    # -- probe emission -------------------------------------------------

    def _next_target(self) -> int | None:
        order = self.config.schedule or list(range(self.config.n_helpers))
        for _ in range(len(order)):
            h = order[self._cursor % len(order)]
            self._cursor += 1
            if self.sent[h] < self.config.packets_per_helper[h]:
                return h
        return None

    @property
    def sending_complete(self) -> bool:
        return all(s >= m for s, m in zip(self.sent, self.config.packets_per_helper))

    def peek_next_size(self) -> int | None:
        """Wire size of the probe next_frame would emit, without emitting it."""
        order = self.config.schedule or list(range(self.config.n_helpers))
        for k in range(len(order)):
            h = order[(self._cursor + k) % len(order)]
            if self.sent[h] < self.config.packets_per_helper[h]:
                return self.config.packet_size[h]
        return None

    def next_frame(self, now: float) -> tuple[int, ProbeFrame] | None:
        """Emit the next probe in schedule order, advancing TAB first."""
        target = self._next_target()
        if target is None:
            return None
        size = self.config.packet_size[target]
        self.tab += size  # counter includes the frame being sent
        frame = ProbeFrame(self.tab, bytes(size - PROBE_HEADER_LEN))
        self.sent[target] += 1
        self.last_probe_time = now
        return target, frame

    def schedule_next(self, now: float, app_buffer_bytes: int = 0) -> SendDecision:
        if app_buffer_bytes > self.config.app_buffer_threshold:
            last = self.last_probe_time
            if last is None or now - last < self.config.max_probe_gap:
                return SendDecision(defer=True)
        nxt = self.next_frame(now)
        if nxt is None:
            return SendDecision(defer=True)
        helper, frame = nxt
        return SendDecision(defer=False, helper=helper, frame=frame)

    def account_app_traffic(self, nbytes: int) -> int:
        """Application bytes go to the virtual helper: TAB advances, nothing is sent."""
        if nbytes < 0:
            raise ValueError("negative app traffic")
        self.tab += nbytes
        self.app_bytes += nbytes
        return self.tab

    def completion_frames(self) -> list[CompletionFrame]:
        frames = []
        for _ in range(self.config.n_helpers):
            self.tab += CompletionFrame.wire_size
            frames.append(CompletionFrame(self.tab))
        self._completed = True
        return frames

    # -- report collection ----------------------------------------------

    def receive_report(self, helper: int, uavg_bps: int) -> None:
        self.reports[helper] = uavg_bps

    def aggregate(self, params: "AggregationParams") -> "CapacityEstimate":
        return aggregate_reports(list(self.reports.values()), params, self.config.n_helpers)


# -- aggregation ---------------------------------------------------------


@dataclass(frozen=True)
class AggregationParams:
    p3: float = 0.8
    p4: float = 1.2
    pa: float = 0.6   # required fraction of close reports
    pb: float = 0.6   # required fraction of responding helpers

    def __post_init__(self) -> None:
        if not (0.0 <= self.p3 <= 1.0 <= self.p4):
            raise ValueError("need p3 <= 1 <= p4")
        if not (0.0 < self.pa <= 1.0 and 0.0 < self.pb <= 1.0):
            raise ValueError("pa and pb must lie in (0, 1]")


@dataclass(frozen=True)
class CapacityEstimate:
    value_bps: float | None
    confident: bool
    reports_used: tuple[float, ...]
    reports_received: int


def aggregate_reports(reports: list[float], params: AggregationParams, n: int) -> CapacityEstimate:
    """Median-closeness aggregation of per-helper averages.

    Too few responders, or a close set below the pa fraction, clears the
    confidence flag; the latter case still reports the close-set mean since
    the per-path available bandwidth can only drag estimates down.
    """
    if not reports:
        return CapacityEstimate(None, False, (), 0)
    if len(reports) < math.ceil(params.pb * n):
        return CapacityEstimate(median(reports), False, tuple(reports), len(reports))
    umd = median(reports)
    close = [r for r in reports if params.p3 * umd <= r <= params.p4 * umd]
    if not close:
        # With an even count the median can fall between two distant
        # clusters and the closeness band then contains no report at all.
        return CapacityEstimate(umd, False, (), len(reports))
    value = statistics.fmean(close)
    confident = len(close) / len(reports) >= params.pa
    return CapacityEstimate(value, confident, tuple(close), len(reports))


# -- rate limiting -------------------------------------------------------


class TokenBucket:
    """Token bucket with tick-quantized refill and a bounded burst.

    Time is passed in explicitly, so the same bucket paces both simulated
    and wall-clock transports.  The burst cap is max(one frame, rate * tick),
    realizing the "at most X bytes at a time" correction.
    """

    def __init__(self, rate_bps: float, granularity: float = 0.05, start: float = 0.0) -> None:
        if rate_bps <= 0:
            raise ValueError("rate must be positive")
        self.rate = rate_bps
        self.granularity = granularity
        self._t0 = start
        self._ticks = 0
        self._tokens = rate_bps * granularity  # one tick of credit up front

    def _cap(self, nbytes: int) -> float:
        # Burst cap plus one tick of headroom: without the extra tick,
        # credit earned while waiting for a full frame's worth of tokens
        # would be clipped at the cap and the long-run rate would fall
        # measurably below the configured one.
        return max(float(nbytes), self.rate * self.granularity) + self.rate * self.granularity

    def _advance(self, now: float, nbytes: int) -> None:
        ticks = int((now - self._t0) / self.granularity)
        if ticks > self._ticks:
            self._tokens = min(self._cap(nbytes), self._tokens + (ticks - self._ticks) * self.rate * self.granularity)
            self._ticks = ticks

    def earliest_send(self, now: float, nbytes: int) -> float:
        """Earliest time >= now at which nbytes may be sent."""
        self._advance(now, nbytes)
        if self._tokens >= nbytes:
            return max(now, self._t0 + self._ticks * self.granularity)
        deficit = nbytes - self._tokens
        need = math.ceil(deficit / (self.rate * self.granularity))
        return self._t0 + (self._ticks + need) * self.granularity

    def consume(self, now: float, nbytes: int) -> None:
        self._advance(now, nbytes)
        self._tokens -= nbytes


# -- available upload bandwidth search ----------------------------------


@dataclass(frozen=True)
class AubSearchParams:
    cr: float = 0.9
    r0: float = 16000.0
    resolution: float = 2000.0
    per_rate_duration: float = 6.0
    max_doublings: int = 40

    def __post_init__(self) -> None:
        if not (0.0 < self.cr <= 1.0):
            raise ValueError("cr must lie in (0, 1]")
        if self.r0 <= 0 or self.resolution <= 0:
            raise ValueError("r0 and resolution must be positive")


@dataclass(frozen=True)
class RateTrial:
    rate: float
    measured: float | None
    passed: bool


@dataclass(frozen=True)
class AubResult:
    aub_bps: float          # measured throughput at the largest passing rate
    r_star: float           # largest rate limit that still passed the cr-rule
    ladder: tuple[RateTrial, ...]


def aub_search(measure, params: AubSearchParams) -> AubResult:
    """Find the largest rate limit R with U(R) >= cr*R.

    ``measure(rate)`` returns the estimated throughput at that rate limit (or
    None when no estimate was obtained, which counts as a failure).  Doubles
    from r0 while the rule holds, then bisects between the last passing and
    first failing rate down to the resolution.  The returned AUB figure is
    the throughput measured at the largest passing rate: the rule's cr slack
    lets R overshoot the available bandwidth, the measured U does not.
    """
    ladder: list[RateTrial] = []

    def trial(rate: float) -> RateTrial:
        u = measure(rate)
        ok = u is not None and u >= params.cr * rate
        t = RateTrial(rate, u, ok)
        ladder.append(t)
        return t

    best: RateTrial | None = None
    r = params.r0
    first_fail: float | None = None
    for _ in range(params.max_doublings):
        t = trial(r)
        if t.passed:
            best = t
            r *= 2
        else:
            first_fail = r
            break
    if first_fail is None:
        raise RuntimeError("aub search did not converge: rule never failed")

    lo = best.rate if best is not None else 0.0
    hi = first_fail
    while hi - lo > params.resolution:
        mid = (lo + hi) / 2
        t = trial(mid)
        if t.passed:
            best = t
            lo = mid
        else:
            hi = mid
    if best is None:
        return AubResult(0.0, 0.0, tuple(ladder))
    return AubResult(float(best.measured), best.rate, tuple(ladder))


# -- ping probing --------------------------------------------------------


@dataclass(frozen=True)
class PingProbeParams:
    rate: float                    # upload rate during the probe (bytes/second)
    duration: float = 60.0
    ping_interval: float = 0.2
    rtt_threshold: float = 0.1
    ping_timeout: float = 2.0
    quality_fraction: float = 0.6
    rate_step: float = 8192.0
    max_timeout_run: int = 3       # structural limit on consecutive timeouts

    def __post_init__(self) -> None:
        if self.duration <= 0:
            raise ValueError("duration must be positive")
        if not (0.0 < self.quality_fraction <= 1.0):
            raise ValueError("quality_fraction must lie in (0, 1]")
        if self.ping_timeout < self.rtt_threshold:
            raise ValueError("ping_timeout must be >= rtt_threshold")
        if self.rate < 0 or self.rate_step <= 0:
            raise ValueError("bad rate parameters")


@dataclass(frozen=True)
class PingStats:
    rtts: tuple[float, ...]        # timed-out probes excluded
    timeout_count: int
    below_threshold_fraction: float
    median_rtt: float | None
    quality: bool


def evaluate_ping_quality(rtts: list[float], timeouts: list[bool], params: PingProbeParams) -> PingStats:
    """rtts and timeouts are parallel per-probe records (rtt meaningless when
    the probe timed out)."""
    good = [r for r, to in zip(rtts, timeouts) if not to]
    total = len(rtts)
    below = sum(1 for r in good if r <= params.rtt_threshold)
    frac = below / total if total else 0.0
    run = longest = 0
    for to in timeouts:
        run = run + 1 if to else 0
        longest = max(longest, run)
    quality = total > 0 and frac >= params.quality_fraction and longest <= params.max_timeout_run
    med = median(good) if good else None
    return PingStats(tuple(good), sum(timeouts), frac, med, quality)


class AubStepper:
    """Incremental headroom checks: is AUB at least the app rate plus one step?

    After a positive verdict, the next probe is only allowed once the
    application's own rate has actually grown to the probed total, so the
    extra traffic never exceeds what the application can use.
    """

    def __init__(self) -> None:
        self.required_rate: float | None = None

    def step(self, current_app_rate: float, step_rate: float, run_ping) -> bool:
        if step_rate <= 0:
            raise ValueError("step must be positive")
        if self.required_rate is not None and current_app_rate < self.required_rate:
            raise RuntimeError(
                f"probe gated until the application rate reaches {self.required_rate:.0f} Bps"
            )
        stats: PingStats = run_ping(current_app_rate + step_rate)
        if stats.quality:
            self.required_rate = current_app_rate + step_rate
        return stats.quality
