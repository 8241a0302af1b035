from upcap.netsim import BackgroundFlow, PathConfig, SimConfig
from upcap.scenarios import (
    run_capacity_test,
    run_headroom_check,
    run_ping_probe,
    run_rate_limited,
)
from upcap.sender import PingProbeParams, SenderConfig

LATENCIES = (0.020, 0.035, 0.050)


def _paths(ab=100000.0, **kw):
    return [PathConfig(ab, bl, **kw) for bl in LATENCIES]


def test_capacity_convergence():
    cfg = SimConfig(sub_bps=240000, paths=_paths(), seed=1)
    res = run_capacity_test(cfg, SenderConfig(n_helpers=3, packets_per_helper=20, packet_size=8192))
    assert res.estimate.confident
    assert abs(res.estimate.value_bps - 240000) < 1


def test_capacity_with_jitter_and_loss_stays_close():
    cfg = SimConfig(sub_bps=240000, paths=_paths(jitter=0.005, loss_prob=0.1), seed=3)
    res = run_capacity_test(cfg, SenderConfig(n_helpers=3, packets_per_helper=40, packet_size=8192))
    assert res.estimate.value_bps is not None
    assert abs(res.estimate.value_bps - 240000) / 240000 < 0.10


def test_total_loss_yields_no_estimate():
    cfg = SimConfig(sub_bps=240000, paths=_paths(loss_prob=1.0), seed=1)
    res = run_capacity_test(cfg, SenderConfig(n_helpers=3, packets_per_helper=10, packet_size=4096))
    assert res.estimate.value_bps is None
    assert not res.estimate.confident


def test_app_traffic_counts_toward_tab():
    # half the uplink carries application traffic; the estimate still sees
    # the full capacity because those bytes advance the shared counter
    cfg = SimConfig(sub_bps=240000, paths=_paths(), seed=1)
    res = run_capacity_test(
        cfg,
        SenderConfig(n_helpers=3, packets_per_helper=20, packet_size=8192),
        app_flow_bps=120000.0,
    )
    assert res.estimate.value_bps is not None
    assert abs(res.estimate.value_bps - 240000) / 240000 < 0.05


def test_rate_limited_run_measures_the_limit():
    cfg = SimConfig(sub_bps=240000, paths=_paths(), seed=1)
    res = run_rate_limited(cfg, rate_bps=80000.0, duration=5.0)
    assert res.estimate.value_bps is not None
    assert abs(res.estimate.value_bps - 80000) / 80000 < 0.08


def test_completion_precedes_deadline():
    cfg = SimConfig(sub_bps=240000, paths=_paths(), seed=1)
    res = run_capacity_test(cfg, SenderConfig(n_helpers=3, packets_per_helper=10, packet_size=4096))
    assert res.completion_time is not None
    assert res.aggregated_at is not None
    assert res.aggregated_at > res.completion_time


def test_determinism():
    def run():
        cfg = SimConfig(sub_bps=240000, paths=_paths(jitter=0.01, loss_prob=0.2), seed=9)
        return run_capacity_test(
            cfg, SenderConfig(n_helpers=3, packets_per_helper=20, packet_size=4096)
        ).estimate
    assert run() == run()


def test_ping_probe_under_capacity_passes():
    cfg = SimConfig(sub_bps=61440, seed=2)
    st = run_ping_probe(cfg, PingProbeParams(rate=25600, duration=30.0))
    assert st.quality


def test_ping_probe_over_capacity_fails():
    cfg = SimConfig(sub_bps=61440, seed=2)
    st = run_ping_probe(cfg, PingProbeParams(rate=70000, duration=30.0))
    assert not st.quality


def test_headroom_check_verdicts():
    # 20 kB/s app on a 100 kB/s link: 30 kB/s of headroom exists, 90 does not
    assert run_headroom_check(100000.0, 20000.0, 30000.0).quality
    assert not run_headroom_check(100000.0, 20000.0, 90000.0).quality
