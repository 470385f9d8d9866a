#!/usr/bin/env python3
"""Plot the CSV outputs of an rjacobi run directory.

Usage: plot_outputs.py OUT_DIR [--save FILE]

Reads manifest.json to discover which command produced the directory and
renders the matching figure (sample paths, convergence rate, time averages,
density, or neuron trace). Requires matplotlib.
"""
import argparse
import csv
import json
import sys
from pathlib import Path


def read_csv(path):
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    header, data = rows[0], rows[1:]
    cols = {name: [float(r[i]) for r in data] for i, name in enumerate(header)}
    return cols


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("out_dir", type=Path)
    ap.add_argument("--save", type=Path, default=None)
    args = ap.parse_args()

    manifest = json.loads((args.out_dir / "manifest.json").read_text())
    command = manifest["command"]

    import matplotlib

    if args.save:
        matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    fig, ax = plt.subplots(figsize=(8, 5))

    if command == "simulate":
        paths = sorted(args.out_dir.glob("path_*.csv"))
        for p in paths:
            cols = read_csv(p)
            ax.plot(cols["t"], cols["x"], label=p.stem)
        ax.set_xlabel("t")
        ax.set_ylabel("x")
        ax.set_ylim(0, 1)
        ax.legend()
        ax.set_title("sample paths")
    elif command == "convergence":
        cols = read_csv(args.out_dir / "errors.csv")
        report = json.loads((args.out_dir / "report.json").read_text())
        ax.loglog(cols["n"], cols["error"], "o-", label="sup error")
        ax.set_xlabel("n")
        ax.set_ylabel("error")
        ax.set_title(f"convergence, slope {report['slope']:.3f}")
        ax.legend()
    elif command == "ergodic":
        series = sorted(args.out_dir.glob("timeavg_*.csv"))
        if series:
            for p in series:
                cols = read_csv(p)
                ax.plot(cols["t"], cols["S"], label=p.stem)
            ax.set_xlabel("t")
            ax.set_ylabel("running time average")
            ax.legend()
            ax.set_title("time averages")
        else:
            report = json.loads((args.out_dir / "report.json").read_text())
            ax.bar(["time avg", "fixed point"],
                   [report["time_avg_mean"], report["fixed_point_mean"]],
                   yerr=[report["se_time_avg"], report["se_fixed_point"]])
            ax.set_title(f"ensemble comparison, diff {report['diff']:.4f}")
    elif command == "density":
        cols = read_csv(args.out_dir / "density.csv")
        ax.plot(cols["y"], cols["f"], label="f(y)")
        xcols = read_csv(args.out_dir / "x_density.csv")
        ax2 = ax.twiny()
        ax2.plot(xcols["x"], xcols["density"], "C1--", label="density(x)")
        ax.set_xlabel("y")
        ax2.set_xlabel("x")
        ax.set_ylabel("density")
        ax.set_title("state density")
        ax.legend(loc="upper left")
        ax2.legend(loc="upper right")
    elif command == "neuron":
        cols = read_csv(args.out_dir / "neuron.csv")
        ax.plot(cols["t"], cols["V"], "C0", label="V")
        ax.set_xlabel("t [ms]")
        ax.set_ylabel("V [mV]", color="C0")
        ax2 = ax.twinx()
        ax2.plot(cols["t"], cols["X"], "C1", alpha=0.7, label="X")
        ax2.set_ylabel("gate fraction", color="C1")
        ax2.set_ylim(0, 1)
        ax.set_title("membrane voltage and gate")
    else:
        print(f"unknown command in manifest: {command}", file=sys.stderr)
        return 1

    fig.tight_layout()
    if args.save:
        fig.savefig(args.save, dpi=150)
        print(f"wrote {args.save}")
    else:
        plt.show()
    return 0


if __name__ == "__main__":
    sys.exit(main())
