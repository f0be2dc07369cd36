"""Run the desk-scale sweeps and write CSVs plus SVG plots into results/.

    python3 scripts/reproduce_figures.py            # desk grid + 50 phases
    python3 scripts/reproduce_figures.py --full     # full-size presets (slow)
"""

import argparse
import sys
from pathlib import Path

from qst4.cli import main as cli_main

CONFIGS = Path(__file__).resolve().parent.parent / "configs"


def run(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--full", action="store_true", help="use the full-size sample presets")
    ap.add_argument("--workers", type=int, default=None)
    args = ap.parse_args(argv)
    names = ("grid_full", "entangled_full") if args.full else ("desk", "entangled")
    extra = ["--workers", str(args.workers)] if args.workers else []
    for name in names:
        code = cli_main(["sweep", str(CONFIGS / f"{name}.ini"), *extra])
        if code:
            return code
    return 0


if __name__ == "__main__":
    sys.exit(run())
