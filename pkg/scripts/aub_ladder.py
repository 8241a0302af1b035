#!/usr/bin/env python3
"""Available-bandwidth search ladder on a loaded uplink.

Runs the exponential/bisection rate search against a simulated uplink
carrying a background flow and prints each probed rate with its measured
throughput and pass/fail verdict, followed by the final figure.
"""

import argparse
import csv
import sys

from upcap import AubSearchParams, BackgroundFlow, PathConfig, SimConfig, run_aub_search


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--sub", type=float, default=240000.0)
    ap.add_argument("--background", type=float, default=140000.0)
    ap.add_argument("--cr", type=float, default=0.9)
    ap.add_argument("--r0", type=float, default=20000.0)
    ap.add_argument("--resolution", type=float, default=2000.0)
    ap.add_argument("--per-rate-duration", type=float, default=4.0)
    ap.add_argument("--seed", type=int, default=1)
    args = ap.parse_args()

    cfg = SimConfig(
        sub_bps=args.sub,
        paths=[PathConfig(args.sub, 0.02 + 0.015 * i) for i in range(3)],
        background_flows=[BackgroundFlow(rate_bps=args.background)],
        seed=args.seed,
    )
    params = AubSearchParams(cr=args.cr, r0=args.r0, resolution=args.resolution,
                             per_rate_duration=args.per_rate_duration)
    res = run_aub_search(cfg, params)

    w = csv.writer(sys.stdout)
    w.writerow(["rate_bps", "measured_bps", "passed"])
    for t in res.ladder:
        w.writerow([t.rate, t.measured, t.passed])
    print(f"# available bandwidth: {res.aub_bps:.0f} bytes/s "
          f"(largest passing rate limit {res.r_star:.0f})", file=sys.stderr)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
