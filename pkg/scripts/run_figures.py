"""Run every experiment config in configs/ and write CSVs to results/.

Usage::

    python scripts/run_figures.py                 # all figure configs
    python scripts/run_figures.py fig2 fig4       # configs whose name starts with these
    python scripts/run_figures.py --trials 20000  # quick pass with fewer MC trials
"""

from __future__ import annotations

import argparse
import sys
import time
from pathlib import Path

from tasevt.cli import main as tasevt_main

ROOT = Path(__file__).resolve().parent.parent


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("prefixes", nargs="*", help="only configs whose stem starts with one of these")
    parser.add_argument("--trials", type=int, help="override Monte Carlo trials")
    parser.add_argument("--workers", type=int, default=4, help="Monte Carlo threads")
    args = parser.parse_args(argv)

    configs = sorted(p for p in (ROOT / "configs").glob("fig*.toml"))
    if args.prefixes:
        configs = [p for p in configs if p.stem.startswith(tuple(args.prefixes))]
    if not configs:
        print("no matching configs", file=sys.stderr)
        return 1
    status = 0
    for cfg in configs:
        extra = ["--workers", str(args.workers)]
        if args.trials is not None:
            extra += ["--trials", str(args.trials)]
        start = time.perf_counter()
        rc = tasevt_main(["run", str(cfg), *extra])
        print(f"{cfg.stem}: exit {rc} in {time.perf_counter() - start:.1f} s", file=sys.stderr)
        status = max(status, rc)
    return status


if __name__ == "__main__":
    sys.exit(main())
