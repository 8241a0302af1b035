#!/usr/bin/env python3
"""Ping-quality verdicts across upload rates.

For each probed rate the uplink carries that much filler traffic while an
echo probe fires every 200 ms; the row shows the RTT statistics and the
quality verdict.  Around the link capacity the RTTs take off and, well
above it, probes start timing out.
"""

import argparse
import csv
import sys

from upcap import PingProbeParams, SimConfig, run_ping_probe


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--sub", type=float, default=61440.0)
    ap.add_argument("--rates", type=float, nargs="+",
                    default=[25600, 35840, 46080, 56320, 61440, 70000, 122880])
    ap.add_argument("--duration", type=float, default=60.0)
    ap.add_argument("--seed", type=int, default=2)
    args = ap.parse_args()

    w = csv.writer(sys.stdout)
    w.writerow(["rate_bps", "quality", "below_threshold_fraction", "median_rtt_s",
                "max_rtt_s", "timeouts"])
    for rate in args.rates:
        cfg = SimConfig(sub_bps=args.sub, seed=args.seed)
        st = run_ping_probe(cfg, PingProbeParams(rate=rate, duration=args.duration))
        w.writerow([
            rate,
            st.quality,
            round(st.below_threshold_fraction, 4),
            st.median_rtt,
            max(st.rtts) if st.rtts else None,
            st.timeout_count,
        ])
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
