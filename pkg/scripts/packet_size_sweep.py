#!/usr/bin/env python3
"""Estimate quality as a function of probe packet size.

Sweeps the probe frame size over powers of two on a fixed scenario and
prints one CSV row per size: the estimate, its relative error against the
configured capacity, and the confidence flag.
"""

import argparse
import csv
import sys

from upcap import PathConfig, SenderConfig, SimConfig, run_capacity_test


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--sub", type=float, default=240000.0, help="upload capacity (bytes/s)")
    ap.add_argument("--ab", type=float, default=100000.0, help="per-path bandwidth (bytes/s)")
    ap.add_argument("--helpers", type=int, default=3)
    ap.add_argument("--packets", type=int, default=20)
    ap.add_argument("--sizes", type=int, nargs="+",
                    default=[128, 256, 512, 1024, 2048, 4096, 8192, 16384, 32768])
    ap.add_argument("--loss", type=float, default=0.0)
    ap.add_argument("--jitter", type=float, default=0.0)
    ap.add_argument("--seed", type=int, default=1)
    args = ap.parse_args()

    w = csv.writer(sys.stdout)
    w.writerow(["size_bytes", "estimate_bps", "relative_error", "confident", "reports"])
    for size in args.sizes:
        cfg = SimConfig(
            sub_bps=args.sub,
            paths=[
                PathConfig(args.ab, 0.02 + 0.015 * i, args.jitter, args.loss)
                for i in range(args.helpers)
            ],
            seed=args.seed,
        )
        res = run_capacity_test(cfg, SenderConfig(args.helpers, args.packets, size))
        est = res.estimate
        err = None if est.value_bps is None else abs(est.value_bps - args.sub) / args.sub
        w.writerow([size, est.value_bps, err, est.confident, est.reports_received])
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
