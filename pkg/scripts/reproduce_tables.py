#!/usr/bin/env python3
"""Run all three benchmark presets and collect their reports under one directory.

Produces results/<preset>/{report.json,table.txt} for the characteristics,
lengths, and runtime grids at the reference scale (n=15). Pass --n 8
--realizations 5 for a desk-scale run that finishes in well under a minute.

Usage: python3 scripts/reproduce_tables.py [--out results] [--seed 0] [--n N]
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from vcdf.cli import BENCH_PRESETS, main as cli_main


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--out", default="results", help="parent directory for the reports")
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--n", type=int, default=None, help="variables per system (default 15)")
    parser.add_argument("--realizations", type=int, default=None)
    args = parser.parse_args()

    for preset in BENCH_PRESETS:
        out_dir = Path(args.out) / preset
        argv = ["bench", preset, "--seed", str(args.seed), "--out", str(out_dir)]
        if args.n is not None:
            argv += ["--n", str(args.n)]
        if args.realizations is not None:
            argv += ["--realizations", str(args.realizations)]
        print(f"== {preset} ==", flush=True)
        code = cli_main(argv)
        if code != 0:
            print(f"preset {preset} failed with exit code {code}", file=sys.stderr)
            return code
        print()
    return 0


if __name__ == "__main__":
    sys.exit(main())
