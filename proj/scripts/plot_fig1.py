#!/usr/bin/env python3
"""Render fig1.csv written by `kinvar fig1` as a log-log plot."""
import argparse
import csv

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

LABELS = {
    "BA_over_AA": "B_A / A_A",
    "BB_over_AB": "B_B / A_B",
    "BA_over_AB": "B_A / A_B",
}


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("csv", help="fig1.csv")
    parser.add_argument("-o", "--output", default="fig1.png")
    args = parser.parse_args()

    with open(args.csv, newline="") as f:
        rows = list(csv.DictReader(f))
    t = [float(r["t"]) for r in rows]

    fig, ax = plt.subplots(figsize=(6, 4.5))
    for key, label in LABELS.items():
        ax.plot(t, [float(r[key]) for r in rows], label=label)
    ax.set_xscale("log")
    ax.set_yscale("log")
    ax.set_xlabel("t")
    ax.set_ylabel("ratio")
    ax.legend()
    fig.tight_layout()
    fig.savefig(args.output, dpi=150)


if __name__ == "__main__":
    main()
