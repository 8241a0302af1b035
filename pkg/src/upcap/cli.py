"""Command-line interface.

Subcommands
-----------

simulate   one estimation session under the network model, CSV trace optional
estimate   real-socket runs (sender or helper role, UDP or TCP)
aub        available-bandwidth search or ping-probe quality check (simulated)
alloc      ring-allocation solver with algorithm cross-checking

Exit codes: 0 success / confident estimate, 1 usage or environment error,
2 low-confidence or no estimate, 3 internal cross-check mismatch.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys

from .helperengine import FilterParams
from .netsim import BackgroundFlow, PathConfig, SimConfig
from .scenarios import run_aub_search, run_capacity_test, run_ping_probe
from .sender import AggregationParams, AubSearchParams, PingProbeParams, SenderConfig
from . import ringalloc, transport

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_LOW_CONFIDENCE = 2
EXIT_MISMATCH = 3


class CliError(Exception):
    pass


def _parse_addr(text: str) -> tuple[str, int]:
    host, _, port = text.rpartition(":")
    if not host or not port.isdigit():
        raise CliError(f"bad address {text!r}; expected host:port")
    return host, int(port)


def _per_path(values: list[float] | None, n: int, default: float, name: str) -> list[float]:
    if not values:
        return [default] * n
    if len(values) == 1:
        return values * n
    if len(values) != n:
        raise CliError(f"--{name} needs 1 value or one per helper")
    return values


def _filter_params(args) -> FilterParams:
    return FilterParams(p1=args.p1, p2=args.p2, q=args.q, K=args.K, idle_timeout=args.idle_timeout)


def _agg_params(args) -> AggregationParams:
    return AggregationParams(p3=args.p3, p4=args.p4, pa=args.pa, pb=args.pb)


def _add_filter_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--p1", type=float, default=0.2, help="lower median band factor")
    p.add_argument("--p2", type=float, default=5.0, help="upper median band factor")
    p.add_argument("--q", type=float, default=1.0, help="std-deviation trim factor")
    p.add_argument("--K", type=int, default=3, help="trim only while count > K")
    p.add_argument("--idle-timeout", type=float, default=5.0, help="helper idle timeout (s)")
    p.add_argument("--p3", type=float, default=0.8, help="lower closeness factor")
    p.add_argument("--p4", type=float, default=1.2, help="upper closeness factor")
    p.add_argument("--pa", type=float, default=0.6, help="required close fraction")
    p.add_argument("--pb", type=float, default=0.6, help="required responding fraction")


def cmd_simulate(args) -> int:
    n = args.helpers
    if n < 1:
        raise CliError("--helpers must be at least 1")
    ab = _per_path(args.ab, n, 1e9, "ab")
    lat = _per_path(args.latency, n, 0.02, "latency")
    loss = _per_path(args.loss, n, 0.0, "loss")
    jit = _per_path(args.jitter, n, 0.0, "jitter")
    paths = [
        PathConfig(ab[i], lat[i], jit[i], loss[i], shared_bottleneck_group=args.shared_group)
        for i in range(n)
    ]
    flows = [BackgroundFlow(rate_bps=r) for r in (args.background or [])]
    sim_cfg = SimConfig(sub_bps=args.sub, paths=paths, background_flows=flows, seed=args.seed)
    sender_cfg = SenderConfig(
        n_helpers=n,
        packets_per_helper=args.packets,
        packet_size=args.size,
        rate_limit=args.rate_limit,
    )
    res = run_capacity_test(
        sim_cfg,
        sender_cfg,
        _filter_params(args),
        _agg_params(args),
        duration=args.duration,
        app_flow_bps=args.app_rate,
    )
    est = res.estimate
    report = {
        "command": "simulate",
        "sub_bps": args.sub,
        "helpers": n,
        "packets": args.packets,
        "size_bytes": args.size,
        "seed": args.seed,
        "estimate_bps": est.value_bps,
        "confident": est.confident,
        "reports_received": est.reports_received,
        "reports_used_bps": list(est.reports_used),
    }
    print(json.dumps(report, indent=2))
    if args.trace:
        with open(args.trace, "w", newline="") as f:
            w = csv.writer(f)
            w.writerow(["time_s", "kind", "helper", "bytes", "rtt_s"])
            for row in res.sim.trace:
                w.writerow([row.time, row.kind, row.helper, row.nbytes, row.rtt])
    if est.value_bps is None or not est.confident:
        return EXIT_LOW_CONFIDENCE
    return EXIT_OK


def cmd_estimate(args) -> int:
    filt = _filter_params(args)
    if args.role == "helper":
        bind = _parse_addr(args.bind)
        runner = transport.run_helper_udp if args.transport == "udp" else transport.run_helper_tcp
        stats = runner(bind, filt, ready_callback=lambda a: print(f"listening on {a[0]}:{a[1]}", flush=True))
        print(json.dumps({
            "command": "estimate/helper",
            "samples": stats.samples,
            "discarded": stats.discarded,
            "report_sent": stats.report_sent,
        }, indent=2))
        return EXIT_OK if stats.report_sent else EXIT_LOW_CONFIDENCE
    if not args.peer:
        raise CliError("sender role needs at least one --peer host:port")
    peers = [_parse_addr(p) for p in args.peer]
    cfg = SenderConfig(
        n_helpers=len(peers),
        packets_per_helper=args.packets,
        packet_size=args.size,
        rate_limit=args.rate_limit,
    )
    runner = transport.run_sender_udp if args.transport == "udp" else transport.run_sender_tcp
    est = runner(peers, cfg, _agg_params(args), report_deadline=2 * filt.idle_timeout)
    print(json.dumps({
        "command": "estimate/sender",
        "transport": args.transport,
        "helpers": len(peers),
        "estimate_bps": est.value_bps,
        "confident": est.confident,
        "reports_received": est.reports_received,
        "reports_used_bps": list(est.reports_used),
    }, indent=2))
    if est.value_bps is None or not est.confident:
        return EXIT_LOW_CONFIDENCE
    return EXIT_OK


def cmd_aub(args) -> int:
    flows = [BackgroundFlow(rate_bps=r) for r in (args.background or [])]
    if args.mode == "search":
        n = args.helpers
        paths = [PathConfig(args.ab, 0.02 + 0.015 * i) for i in range(n)]
        sim_cfg = SimConfig(sub_bps=args.sub, paths=paths, background_flows=flows, seed=args.seed)
        params = AubSearchParams(
            cr=args.cr, r0=args.r0, resolution=args.resolution, per_rate_duration=args.per_rate_duration
        )
        res = run_aub_search(sim_cfg, params, packet_size=args.size)
        print(json.dumps({
            "command": "aub/search",
            "aub_bps": res.aub_bps,
            "r_star_bps": res.r_star,
            "ladder": [
                {"rate_bps": t.rate, "measured_bps": t.measured, "passed": t.passed}
                for t in res.ladder
            ],
        }, indent=2))
        return EXIT_OK
    # ping mode
    sim_cfg = SimConfig(sub_bps=args.sub, background_flows=flows, seed=args.seed)
    params = PingProbeParams(
        rate=args.rate,
        duration=args.duration,
        rtt_threshold=args.rtt_threshold,
        ping_timeout=args.ping_timeout,
        quality_fraction=args.quality_fraction,
    )
    stats = run_ping_probe(sim_cfg, params)
    print(json.dumps({
        "command": "aub/ping",
        "rate_bps": args.rate,
        "quality": stats.quality,
        "timeout_count": stats.timeout_count,
        "below_threshold_fraction": stats.below_threshold_fraction,
        "median_rtt_s": stats.median_rtt,
        "max_rtt_s": max(stats.rtts) if stats.rtts else None,
    }, indent=2))
    return EXIT_OK if stats.quality else EXIT_LOW_CONFIDENCE


def cmd_alloc(args) -> int:
    if args.instance:
        with open(args.instance) as f:
            text = f.read()
    elif args.s and args.p:
        text = f"S: {' '.join(args.s)}\nP: {' '.join(args.p)}"
    else:
        raise CliError("provide --instance FILE or both --s and --p")
    try:
        inst = ringalloc.parse_instance(text)
    except ValueError as e:
        raise CliError(str(e)) from e

    if args.x is not None:
        if not (0 <= args.x <= inst.xmax):
            raise CliError(f"x must lie in [0, {inst.xmax}]")
        res = ringalloc.greedy_algo(inst, args.x)
        print(json.dumps({
            "command": "alloc",
            "x": args.x,
            "total": res.total,
            "own": list(res.own),
            "next": list(res.next),
        }, indent=2))
        return EXIT_OK

    tables: dict[str, list[int]] = {}
    if args.algorithm in ("naive", "all"):
        tables["naive"] = ringalloc.rsum_naive(inst)
    if args.algorithm in ("sweep", "all"):
        tables["sweep"] = ringalloc.rsum_sweep(inst)
    if args.algorithm in ("closed", "all"):
        tables["closed"] = ringalloc.rsum_closed_form(inst).expand()
    ref_name, ref = next(iter(tables.items()))
    mismatch = any(t != ref for t in tables.values())
    writer = csv.writer(sys.stdout)
    writer.writerow(["x", "rsum_units"])
    for x, v in enumerate(ref):
        writer.writerow([x, v])
    xstar, best = ringalloc.rsum_max(inst)
    print(json.dumps({
        "command": "alloc",
        "algorithm": args.algorithm,
        "xmax": inst.xmax,
        "best_x": xstar,
        "best_total": best,
        "algorithms_agree": not mismatch,
    }, indent=2))
    if mismatch:
        print(f"cross-check mismatch against {ref_name}: {tables}", file=sys.stderr)
        return EXIT_MISMATCH
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="upcap", description=__doc__,
                                 formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = ap.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", help="one estimation session under the network model")
    sim.add_argument("--sub", type=float, required=True, help="upload capacity (bytes/s)")
    sim.add_argument("--helpers", type=int, default=3)
    sim.add_argument("--ab", type=float, nargs="+", help="per-path bandwidth (bytes/s)")
    sim.add_argument("--latency", type=float, nargs="+", help="per-path latency (s)")
    sim.add_argument("--loss", type=float, nargs="+", help="per-path loss probability")
    sim.add_argument("--jitter", type=float, nargs="+", help="per-path max jitter (s)")
    sim.add_argument("--shared-group", help="put all paths behind one shared bottleneck")
    sim.add_argument("--background", type=float, nargs="+", help="background flow rates (bytes/s)")
    sim.add_argument("--packets", type=int, default=20, help="probes per helper")
    sim.add_argument("--size", type=int, default=8192, help="probe frame size (bytes)")
    sim.add_argument("--rate-limit", type=float, help="sender rate limit (bytes/s)")
    sim.add_argument("--duration", type=float, help="probe for a fixed time instead of a packet count")
    sim.add_argument("--app-rate", type=float, default=0.0, help="application traffic rate (bytes/s)")
    sim.add_argument("--seed", type=int, default=0)
    sim.add_argument("--trace", help="write the event trace to this CSV file")
    _add_filter_flags(sim)
    sim.set_defaults(func=cmd_simulate)

    est = sub.add_parser("estimate", help="real-socket estimation run")
    est.add_argument("--role", choices=("sender", "helper"), required=True)
    est.add_argument("--transport", choices=("udp", "tcp"), default="udp")
    est.add_argument("--bind", default="127.0.0.1:0", help="helper bind address host:port")
    est.add_argument("--peer", action="append", help="helper address host:port (repeatable)")
    est.add_argument("--packets", type=int, default=20)
    est.add_argument("--size", type=int, default=8192)
    est.add_argument("--rate-limit", type=float)
    _add_filter_flags(est)
    est.set_defaults(func=cmd_estimate)

    aub = sub.add_parser("aub", help="available-bandwidth search / ping quality (simulated)")
    aub.add_argument("--mode", choices=("search", "ping"), default="search")
    aub.add_argument("--sub", type=float, required=True)
    aub.add_argument("--background", type=float, nargs="+")
    aub.add_argument("--helpers", type=int, default=3)
    aub.add_argument("--ab", type=float, default=1e9, help="per-path bandwidth for search mode")
    aub.add_argument("--size", type=int, default=4096)
    aub.add_argument("--cr", type=float, default=0.9)
    aub.add_argument("--r0", type=float, default=16000.0)
    aub.add_argument("--resolution", type=float, default=2000.0)
    aub.add_argument("--per-rate-duration", type=float, default=4.0)
    aub.add_argument("--rate", type=float, default=0.0, help="upload rate for ping mode")
    aub.add_argument("--duration", type=float, default=60.0, help="ping mode test length (s)")
    aub.add_argument("--rtt-threshold", type=float, default=0.1)
    aub.add_argument("--ping-timeout", type=float, default=2.0)
    aub.add_argument("--quality-fraction", type=float, default=0.6)
    aub.add_argument("--seed", type=int, default=0)
    aub.set_defaults(func=cmd_aub)

    al = sub.add_parser("alloc", help="ring allocation solver")
    al.add_argument("--instance", help="instance file ('S: ...' / 'P: ...')")
    al.add_argument("--s", nargs="+", help="provider capacities")
    al.add_argument("--p", nargs="+", help="consumer capacities")
    al.add_argument("--algorithm", choices=("naive", "sweep", "closed", "all"), default="all")
    al.add_argument("--x", type=int, help="evaluate the greedy pass at one x only")
    al.set_defaults(func=cmd_alloc)

    return ap


def main(argv: list[str] | None = None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as e:
        return EXIT_USAGE if e.code not in (0, None) else 0
    try:
        return args.func(args)
    except CliError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except ValueError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    raise SystemExit(main())
