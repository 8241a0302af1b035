import socket
import threading

from upcap.helperengine import FilterParams
from upcap.sender import SenderConfig
from upcap.transport import (
    ECHO_MAGIC,
    ping_once,
    run_echo_server,
    run_helper_tcp,
    run_helper_udp,
    run_sender_tcp,
    run_sender_udp,
)

FAST = FilterParams(idle_timeout=1.0)


def _spawn_helpers(runner, count):
    addrs = []
    ready = threading.Semaphore(0)
    results = []

    def serve():
        def cb(addr):
            addrs.append(addr)
            ready.release()
        results.append(runner(("127.0.0.1", 0), FAST, ready_callback=cb))

    threads = [threading.Thread(target=serve, daemon=True) for _ in range(count)]
    for t in threads:
        t.start()
    for _ in range(count):
        assert ready.acquire(timeout=10)
    return addrs, threads, results


def test_udp_session_end_to_end():
    addrs, threads, results = _spawn_helpers(run_helper_udp, 3)
    cfg = SenderConfig(n_helpers=3, packets_per_helper=30, packet_size=8192, rate_limit=491520.0)
    est = run_sender_udp(addrs, cfg, report_deadline=5.0)
    for t in threads:
        t.join(timeout=15)
    assert est.reports_received == 3
    assert est.value_bps is not None and est.value_bps > 0
    assert all(r.report_sent for r in results)


def test_tcp_session_end_to_end():
    addrs, threads, results = _spawn_helpers(run_helper_tcp, 2)
    cfg = SenderConfig(n_helpers=2, packets_per_helper=30, packet_size=8192, rate_limit=491520.0)
    est = run_sender_tcp(addrs, cfg, report_deadline=5.0)
    for t in threads:
        t.join(timeout=15)
    assert est.reports_received == 2
    assert est.value_bps is not None and est.value_bps > 0


def test_udp_helper_answers_echo():
    addrs, threads, _ = _spawn_helpers(run_helper_udp, 1)
    with socket.socket(socket.AF_INET, socket.SOCK_DGRAM) as sock:
        rtt, timed_out = ping_once(sock, addrs[0], timeout=5.0, seq=3)
    assert not timed_out
    assert rtt < 5.0
    # unblock the helper so its thread can finish
    cfg = SenderConfig(n_helpers=1, packets_per_helper=5, packet_size=1024)
    run_sender_udp(addrs, cfg, report_deadline=3.0)
    for t in threads:
        t.join(timeout=15)


def test_echo_server_roundtrip():
    ready = threading.Semaphore(0)
    addrs = []

    def serve():
        run_echo_server(("127.0.0.1", 0), duration=3.0,
                        ready_callback=lambda a: (addrs.append(a), ready.release()))

    t = threading.Thread(target=serve, daemon=True)
    t.start()
    assert ready.acquire(timeout=5)
    with socket.socket(socket.AF_INET, socket.SOCK_DGRAM) as sock:
        rtt, timed_out = ping_once(sock, addrs[0], timeout=2.0, seq=1)
    assert not timed_out and rtt < 2.0
    t.join(timeout=10)
