#!/usr/bin/env python3
"""Run the full generator stand-in suite and render the report plots.

Writes the scenario config it used into the output directory, so the whole
report can be reproduced with `mcastmob run --config <out>/suite.json`.
"""

import argparse
import os
import sys

from mcastmob import config as config_mod
from mcastmob.cli import main as cli_main


def parse_args():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", default="suite_report", help="report directory")
    parser.add_argument("--master-seed", type=int, default=7)
    parser.add_argument("--seeds", type=int, default=10, help="runs per (topology, model)")
    parser.add_argument("--moves", type=int, default=100, help="visits per run")
    parser.add_argument("--workers", type=int, default=1)
    return parser.parse_args()


def main():
    args = parse_args()
    cfg = config_mod.reference_suite_config(
        master_seed=args.master_seed,
        seeds=args.seeds,
        moves=args.moves,
        output_dir=args.out,
    )
    os.makedirs(args.out, exist_ok=True)
    cfg_path = os.path.join(args.out, "suite.json")
    with open(cfg_path, "w", encoding="utf-8") as fh:
        fh.write(cfg.canonical_json())
    code = cli_main(["run", "--config", cfg_path, "--out", args.out,
                     "--workers", str(args.workers)])
    if code:
        return code
    return cli_main(["plot", "--out", args.out])


if __name__ == "__main__":
    sys.exit(main())
