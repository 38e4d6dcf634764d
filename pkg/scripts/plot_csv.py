"""Plot a results CSV (needs matplotlib, not a package dependency).

One line per (method, N) when the sweep is over Q or P_max; one line per
method when the sweep is over N (log-scaled x axis).  Monte Carlo rows get
their confidence interval as error bars.

Usage::

    python scripts/plot_csv.py results/fig2_mean_vs_q.csv [-o fig2.png]
"""

from __future__ import annotations

import argparse
import csv
from collections import defaultdict
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

STYLE = {"exact": "-", "mc": "o", "evt": "--", "iplr": "--", "iplr-scaling": ":", "tplr": "--", "tplr-low": ":"}


def load(path: Path):
    series = defaultdict(list)
    with path.open() as fh:
        for row in csv.DictReader(fh):
            if row["status"] != "ok":
                continue
            var = row["sweep_var"]
            key = row["method"] if var == "N" else f"{row['method']} N={row['n_antennas']}"
            lo = float(row["ci_low"]) if row["ci_low"] else None
            hi = float(row["ci_high"]) if row["ci_high"] else None
            series[key].append((float(row["sweep_value"]), float(row["value_nats"]), lo, hi))
    return var, series


def main(argv=None) -> None:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("csv", type=Path)
    parser.add_argument("-o", "--out", type=Path, help="image path (default: CSV name with .png)")
    args = parser.parse_args(argv)

    var, series = load(args.csv)
    fig, ax = plt.subplots(figsize=(6, 4))
    for key, pts in sorted(series.items()):
        pts.sort()
        x = [p[0] for p in pts]
        y = [p[1] for p in pts]
        style = STYLE.get(key.split()[0], "-")
        if pts[0][2] is not None:
            err = [[p[1] - p[2] for p in pts], [p[3] - p[1] for p in pts]]
            ax.errorbar(x, y, yerr=err, fmt=style, ms=4, capsize=2, label=key)
        else:
            ax.plot(x, y, style, label=key)
    if var == "N":
        ax.set_xscale("log")
    ax.set_xlabel({"Q": "Q (dB)", "P_max": "P_max (dB)", "N": "N"}.get(var, var))
    ax.set_ylabel("capacity (nats/s/Hz)")
    ax.grid(True, alpha=0.3)
    ax.legend(fontsize=7)
    fig.tight_layout()
    out = args.out or args.csv.with_suffix(".png")
    fig.savefig(out, dpi=150)
    print(f"wrote {out}")


if __name__ == "__main__":
    main()
