#!/usr/bin/env python3
"""Run the load sweep and write CSV results.

Without flags this reproduces the default experiment: the 10-node mesh, loads
10..50, 100 seeded iterations. Pass --config to override any setting.
"""

import argparse
import sys
from pathlib import Path

from anypath_vne.cli import main


def parse_args():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--config", help="simulation config JSON file")
    parser.add_argument("--out", default="results",
                        help="output directory (default: results/)")
    return parser.parse_args()


if __name__ == "__main__":
    args = parse_args()
    argv = ["simulate", "--out", str(Path(args.out))]
    if args.config:
        argv += ["--config", args.config]
    sys.exit(main(argv))
