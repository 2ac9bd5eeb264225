#!/usr/bin/env python3
"""Run every bundled scenario and drop metrics + SVG frames under out/.

Usage: python scripts/run_examples.py [--out DIR] [--svg-every K]
"""

import argparse
import sys
from pathlib import Path

from rngswarm.cli import main as cli_main

REPO = Path(__file__).resolve().parent.parent
SCENARIOS = sorted((REPO / "scenarios").glob("*.yaml"))


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default=str(REPO / "out"), help="output root (default: ./out)")
    ap.add_argument("--svg-every", type=int, default=50, metavar="K",
                    help="write an SVG frame every K rounds (default: 50)")
    args = ap.parse_args()

    failures = 0
    for path in SCENARIOS:
        out_dir = Path(args.out) / path.stem
        print(f"== {path.stem} ==")
        rc = cli_main([
            "run",
            "--scenario", str(path),
            "--out", str(out_dir),
            "--svg-every", str(args.svg_every),
        ])
        if rc != 0:
            print(f"{path.stem}: exit code {rc}", file=sys.stderr)
            failures += 1
    return 1 if failures else 0


if __name__ == "__main__":
    sys.exit(main())
