#!/usr/bin/env python3
"""Plot mean metrics per sweep point from a runs.csv written by mcs_sim.

usage: plot_results.py RUNS_CSV [--metric jain_index] [--out figure.png]
"""
import argparse
import sys

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import pandas as pd

METRICS = [
    "jain_index",
    "mismanagement_ratio",
    "sum_log_utility",
    "mean_rate_bps",
    "available_clusters_per_vehicle",
    "rounds",
]


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("runs")
    ap.add_argument("--metric", choices=METRICS, default="jain_index")
    ap.add_argument("--out", default=None)
    args = ap.parse_args(argv)

    df = pd.read_csv(args.runs)
    df = df[df["status"] == "ok"]
    sweep = df["sweep_var"].iloc[0]
    x = "sweep_index" if sweep == "none" else "sweep_value"

    fig, ax = plt.subplots(figsize=(5, 3.5))
    for algo, g in df.groupby("algorithm"):
        if g[args.metric].isna().all():
            continue
        stats = g.groupby(x)[args.metric].agg(["mean", "sem"]).reset_index()
        ax.errorbar(stats[x], stats["mean"], yerr=stats["sem"], marker="o", capsize=3, label=algo)
    if sweep in ("delta", "epsilon"):
        ax.set_xscale("log")
    ax.set_xlabel(sweep)
    ax.set_ylabel(args.metric)
    ax.legend()
    fig.tight_layout()
    out = args.out or f"{args.metric}.png"
    fig.savefig(out, dpi=150)
    print(out)
    return 0


if __name__ == "__main__":
    sys.exit(main())
