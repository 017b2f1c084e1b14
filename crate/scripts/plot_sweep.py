#!/usr/bin/env python3
"""Plot a `josephson sweep` CSV: pair current and heat amplitude vs the sweep variable."""

import argparse
import csv
import math

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt


def load(path):
    with open(path, newline="") as f:
        reader = csv.DictReader(f)
        variable = reader.fieldnames[0]
        rows = [r for r in reader if r["failed"] == "false"]
    xs = [float(r[variable]) for r in rows]
    j = [float(r["josephson"]) for r in rows]
    heat = [float(r["heat_amplitude"]) for r in rows]
    return variable, xs, j, heat


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("csv")
    parser.add_argument("-o", "--output", default="sweep.png")
    args = parser.parse_args()

    variable, xs, j, heat = load(args.csv)
    fig, (top, bottom) = plt.subplots(2, 1, sharex=True, figsize=(6, 6))
    top.plot(xs, j, marker=".")
    top.axhline(0.0, color="gray", lw=0.5)
    top.set_ylabel("j(C)")
    bottom.plot(xs, heat, marker=".", color="tab:red")
    bottom.axhline(0.0, color="gray", lw=0.5)
    bottom.set_ylabel("heat amplitude")
    bottom.set_xlabel(variable)
    if variable == "delta_phi":
        bottom.set_xticks([0, math.pi / 2, math.pi, 3 * math.pi / 2, 2 * math.pi])
        bottom.set_xticklabels(["0", "π/2", "π", "3π/2", "2π"])
    fig.tight_layout()
    fig.savefig(args.output, dpi=150)


if __name__ == "__main__":
    main()
