#!/usr/bin/env python3
"""Plot a CSV written by `cprsim run` or `cprsim scan`.

The first column is the x axis (time for runs, deltaS for scans).  All
population-like columns (P0, P1, P2, ..., Pminus, P2_final, P2_max) go on
the left axis; an energy column E, when present, gets its own axis on the
right because its scale is set by the bare level energies, not by [0, 1].

Example:
    cprsim run scenarios/jcm-fig5.json --out out
    python3 scripts/plot_trajectory.py out/jcm-fig5.csv
"""

import argparse
import pathlib

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import pandas as pd


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("csv", type=pathlib.Path, help="CSV produced by cprsim")
    parser.add_argument(
        "--out", type=pathlib.Path, default=None, help="output image (default: CSV path with .png)"
    )
    parser.add_argument(
        "--columns",
        default=None,
        help="comma-separated columns to plot instead of the automatic pick",
    )
    args = parser.parse_args()

    table = pd.read_csv(args.csv)
    x = table.columns[0]

    if args.columns:
        left = [c.strip() for c in args.columns.split(",")]
        missing = [c for c in left if c not in table.columns]
        if missing:
            parser.error(f"no such column(s): {', '.join(missing)}; file has {list(table.columns)}")
    else:
        left = [c for c in table.columns[1:] if c.startswith("P") or c.startswith("Inver")]
        if not left:
            left = list(table.columns[1:])

    fig, ax = plt.subplots(figsize=(8, 4.5))
    for column in left:
        ax.plot(table[x], table[column], label=column, linewidth=1.0)
    ax.set_xlabel(x)
    ax.set_ylabel("population / inversion")
    ax.legend(loc="upper right", fontsize="small")

    if "E" in table.columns and not args.columns:
        twin = ax.twinx()
        twin.plot(table[x], table["E"], color="gray", linestyle="--", linewidth=0.8, label="E")
        twin.set_ylabel("energy")
        twin.legend(loc="lower right", fontsize="small")

    out = args.out or args.csv.with_suffix(".png")
    fig.tight_layout()
    fig.savefig(out, dpi=150)
    print(f"wrote {out}")


if __name__ == "__main__":
    main()
