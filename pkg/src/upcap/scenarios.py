"""Simulated estimation sessions: capacity tests, rate searches, ping probes.

These runners drive the real sender/helper engines against the event-driven
network model, so the protocol logic under test is exactly what the socket
transports use.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

from .helperengine import FilterParams, HelperEngine
from .netsim import SimConfig, Simulator, BackgroundFlow
from .sender import (
    AggregationParams,
    AubResult,
    AubSearchParams,
    CapacityEstimate,
    PingProbeParams,
    PingStats,
    SenderConfig,
    SenderEngine,
    TokenBucket,
    evaluate_ping_quality,
    aub_search,
)
from .wire import CompletionFrame


@dataclass
class SessionResult:
    estimate: CapacityEstimate
    sender: SenderEngine
    helpers: list[HelperEngine]
    sim: Simulator
    completion_time: float | None = None
    aggregated_at: float | None = None


def run_capacity_test(
    sim_cfg: SimConfig,
    sender_cfg: SenderConfig | None = None,
    filter_params: FilterParams | None = None,
    agg_params: AggregationParams | None = None,
    duration: float | None = None,
    app_flow_bps: float = 0.0,
    app_chunk: int = 4096,
) -> SessionResult:
    """One full estimation session under the simulator.

    The sender is closed-loop: the next probe goes out the moment the link
    finishes the previous one (and, under a rate limit, once the token
    bucket allows it), so the uplink is never idle while probing.  With
    ``duration`` set, probing stops at that simulated time instead of after
    the configured per-helper packet counts.
    """
    n = len(sim_cfg.paths)
    if n < 1:
        raise ValueError("need at least one path")
    filt = filter_params or FilterParams()
    agg = agg_params or AggregationParams()
    if sender_cfg is None:
        sender_cfg = SenderConfig(n_helpers=n)
    if duration is not None:
        # duration-driven probing: effectively unlimited per-helper budget
        sender_cfg = SenderConfig(
            n_helpers=n,
            packets_per_helper=1 << 30,
            packet_size=sender_cfg.packet_size,
            schedule=sender_cfg.schedule,
            app_buffer_threshold=sender_cfg.app_buffer_threshold,
            max_probe_gap=sender_cfg.max_probe_gap,
            rate_limit=sender_cfg.rate_limit,
        )
    if sender_cfg.n_helpers != n:
        raise ValueError("sender config does not match the path count")

    sim = Simulator(sim_cfg)
    sender = SenderEngine(sender_cfg)
    helpers = [HelperEngine(filt) for _ in range(n)]
    result = SessionResult(
        estimate=CapacityEstimate(None, False, (), 0), sender=sender, helpers=helpers, sim=sim
    )
    bucket = TokenBucket(sender_cfg.rate_limit) if sender_cfg.rate_limit else None
    reported = [False] * n
    state = {"done": False, "aggregated": False}

    def aggregate(t: float) -> None:
        if state["aggregated"]:
            return
        state["aggregated"] = True
        state["done"] = True
        result.estimate = sender.aggregate(agg)
        result.aggregated_at = t

    def finalize_helper(h: int, t: float) -> None:
        if reported[h]:
            return
        reported[h] = True
        rpt = helpers[h].report()
        if rpt is None:
            return
        lat = sim_cfg.paths[h].base_latency

        def arrive_report(t2: float, _h=h, _r=rpt) -> None:
            sender.receive_report(_h, _r.uavg_bps)
            if len(sender.reports) == n:
                aggregate(t2)

        sim.schedule(t + lat, arrive_report)

    def probe_arrival(h: int, tab: int):
        def cb(t: float) -> None:
            helpers[h].accept_frame(tab, t)

            def idle_check(t2: float, _h=h) -> None:
                if helpers[_h].check_idle(t2):
                    finalize_helper(_h, t2)

            sim.schedule(t + filt.idle_timeout, idle_check)

        return cb

    def send_completions(t: float) -> None:
        result.completion_time = t
        for h, frame in enumerate(sender.completion_frames()):
            def cb(t2: float, _h=h) -> None:
                helpers[_h].on_completion(t2)
                finalize_helper(_h, t2)

            sim.send_to_helper(t, h, frame.wire_size, cb)
        sim.schedule(t + 2 * filt.idle_timeout, aggregate)

    def emit(t: float) -> None:
        if state["done"]:
            return
        if sender.sending_complete or (duration is not None and t >= duration):
            send_completions(t)
            return
        nxt = sender.next_frame(t)
        if nxt is None:
            send_completions(t)
            return
        h, frame = nxt
        size = frame.wire_size
        link_done = sim.send_to_helper(t, h, size, probe_arrival(h, frame.tab_total_bytes))
        ready = link_done
        if bucket is not None:
            bucket.consume(t, size)
            next_size = sender.peek_next_size() or CompletionFrame.wire_size
            ready = max(link_done, bucket.earliest_send(link_done, next_size))
        sim.schedule(ready, emit)

    if app_flow_bps > 0:
        period = app_chunk / app_flow_bps

        def app_tick(t: float) -> None:
            if state["done"]:
                return
            sim.send_to_sink(t, app_chunk)
            sender.account_app_traffic(app_chunk)
            sim.schedule(t + period, app_tick)

        sim.schedule(0.0, app_tick)

    for flow in sim_cfg.background_flows:
        if flow.rate_bps <= 0:
            continue
        bg_period = flow.chunk_bytes / flow.rate_bps

        def bg_tick(t: float, _f=flow, _p=bg_period) -> None:
            if state["done"] or t >= _f.end:
                return
            sim.send_to_sink(t, _f.chunk_bytes)
            sim.schedule(t + _p, bg_tick)

        sim.schedule(flow.start, bg_tick)

    first = 0.0
    if bucket is not None:
        first = bucket.earliest_send(0.0, sender.peek_next_size() or 0)
    sim.schedule(first, emit)
    sim.run()
    if not state["aggregated"]:
        aggregate(sim.now)
    return result


def run_rate_limited(
    sim_cfg: SimConfig,
    rate_bps: float,
    duration: float,
    packet_size: int = 4096,
    filter_params: FilterParams | None = None,
    agg_params: AggregationParams | None = None,
) -> SessionResult:
    """Capacity test under an upload rate limit, probing for a fixed time."""
    if rate_bps <= 0:
        raise ValueError("rate must be positive")
    n = len(sim_cfg.paths)
    cfg = SenderConfig(n_helpers=n, packet_size=packet_size, rate_limit=rate_bps)
    return run_capacity_test(
        sim_cfg, cfg, filter_params, agg_params, duration=duration
    )


# Wide trim band by default: under coarse-grained pacing the per-pair samples
# form a few discrete clusters around the true rate, and a tight q=1 trim
# would keep only the dominant cluster and bias the mean.
AUB_FILTER = FilterParams(q=3.0)


def run_aub_search(
    sim_cfg: SimConfig,
    params: AubSearchParams,
    packet_size: int = 4096,
    filter_params: FilterParams | None = None,
    agg_params: AggregationParams | None = None,
) -> AubResult:
    filt = filter_params or AUB_FILTER

    def measure(rate: float) -> float | None:
        res = run_rate_limited(
            sim_cfg, rate, params.per_rate_duration, packet_size, filt, agg_params
        )
        return res.estimate.value_bps

    return aub_search(measure, params)


def run_ping_probe(
    sim_cfg: SimConfig,
    params: PingProbeParams,
    filler_bytes: int = 2048,
) -> PingStats:
    """Rate-limited upload with periodic echo probes through the same FIFO."""
    sim = Simulator(sim_cfg)
    sim.start_background_flows()
    rtts: list[float] = []
    timeouts: list[bool] = []

    if params.rate > 0:
        bucket = TokenBucket(params.rate)

        def fill(t: float) -> None:
            if t >= params.duration:
                return
            sim.send_to_sink(t, filler_bytes)
            bucket.consume(t, filler_bytes)
            sim.schedule(max(t, bucket.earliest_send(t, filler_bytes)), fill)

        sim.schedule(bucket.earliest_send(0.0, filler_bytes), fill)

    def ping(t: float) -> None:
        if t >= params.duration:
            return
        rtt, timed_out = sim.ping_rtt(t)
        rtts.append(rtt)
        timeouts.append(timed_out)
        sim.schedule(t + params.ping_interval, ping)

    sim.schedule(0.0, ping)
    sim.run(until=params.duration)
    return evaluate_ping_quality(rtts, timeouts, params)


def run_headroom_check(
    sub_bps: float,
    app_rate: float,
    step_rate: float,
    params: PingProbeParams | None = None,
    seed: int = 0,
) -> PingStats:
    """Ping-probe verdict for "is there at least step_rate of headroom above
    the application's current rate?"  The app's own upload runs as a
    background flow; the probe adds step_rate of filler on top."""
    params = params or PingProbeParams(rate=step_rate)
    cfg = SimConfig(
        sub_bps=sub_bps,
        background_flows=[BackgroundFlow(rate_bps=app_rate)] if app_rate > 0 else [],
        seed=seed,
    )
    return run_ping_probe(cfg, replace(params, rate=step_rate))
