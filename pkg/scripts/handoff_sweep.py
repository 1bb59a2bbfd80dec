#!/usr/bin/env python3
"""Compare handoff strategies against the Mobile IP baseline on one topology.

Runs a packet-level sweep (plain / triple / advance joins plus the Mobile IP
registration) over the first moves of each movement model's trace and prints
per-strategy means; the per-move rows land in <out>/handoff.csv.
"""

import argparse
import sys
from collections import defaultdict
from statistics import fmean

from mcastmob import config as config_mod
from mcastmob import experiment


def parse_args():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", default="handoff_report")
    parser.add_argument("--nodes", type=int, default=100)
    parser.add_argument("--degree", type=float, default=3.7)
    parser.add_argument("--loss", type=float, default=0.0, help="per-hop loss probability")
    parser.add_argument("--moves", type=int, default=30)
    parser.add_argument("--master-seed", type=int, default=7)
    parser.add_argument(
        "--overlap", default="make_before_break",
        choices=("make_before_break", "break_before_make"),
    )
    return parser.parse_args()


def main():
    args = parse_args()
    cfg = config_mod.from_dict(
        {
            "name": "handoff_sweep",
            "master_seed": args.master_seed,
            "moves_per_run": args.moves,
            "seeds_per_scenario": 1,
            "topologies": [
                {
                    "name": f"ts{args.nodes}",
                    "type": "transit_stub",
                    "generator": {
                        "kind": "transit_stub",
                        "node_count": args.nodes,
                        "target_avg_degree": args.degree,
                    },
                }
            ],
            "handoff": {
                "message_loss_rate": args.loss,
                "overlap": args.overlap,
                "advance_lead": 120.0,
                "max_moves": args.moves,
            },
            "output_dir": args.out,
        }
    )
    result = experiment.execute_scenario(cfg)
    rows = experiment.handoff_sweep(result)

    from mcastmob.reporting import write_handoff

    write_handoff(f"{args.out}/handoff.csv", rows)

    by_strategy = defaultdict(list)
    for row in rows:
        by_strategy[row.strategy].append(row.report)
    print(f"{len(rows)} simulated handoffs, loss={args.loss}, overlap={args.overlap}")
    print(f"{'strategy':14s} {'latency_ms':>10s} {'lost':>6s} {'dup':>6s} {'ctl_msgs':>9s}")
    for strategy in ("plain_join", "triple_join", "advance_join", "mobile_ip"):
        reps = by_strategy.get(strategy)
        if not reps:
            continue
        finite = [r.handoff_latency for r in reps if r.handoff_latency != float("inf")]
        latency = fmean(finite) if finite else float("inf")
        print(
            f"{strategy:14s} {latency:10.1f} {fmean(r.packets_lost for r in reps):6.2f} "
            f"{fmean(r.packets_duplicated for r in reps):6.2f} "
            f"{fmean(r.control_messages for r in reps):9.1f}"
        )
    return 0


if __name__ == "__main__":
    sys.exit(main())
