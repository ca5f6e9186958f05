#!/usr/bin/env python3
"""Render the artifacts of a `classo doa-repro` run.

Produces a two-panel figure per loss/condition pair: the correlation
spectrum at the selected penalty (with the active set and the true
directions marked), and the magnitude paths across the penalty grid.

Usage:
    python3 docs/plot_doa_repro.py RUN_DIR [--out FIGURE.png]
"""

import argparse
import csv
import json
import sys
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

KINDS = [("ls", "clean"), ("huber", "clean"), ("ls", "corrupted"), ("huber", "corrupted")]


def read_spectrum(path):
    angles, corr, active = [], [], []
    with open(path, newline="") as fh:
        for row in csv.DictReader(fh):
            angles.append(float(row["angle_deg"]))
            corr.append(float(row["correlation"]))
            active.append(int(row["active"]))
    return angles, corr, active


def read_path(path):
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        coef_cols = [c for c in reader.fieldnames if c.startswith("abs_s_")]
        lambdas, coefs = [], {c: [] for c in coef_cols}
        for row in reader:
            lambdas.append(float(row["lambda"]))
            for c in coef_cols:
                coefs[c].append(float(row[c]))
    labels = {c: c[len("abs_s_"):] for c in coef_cols}
    return lambdas, coefs, labels


def plot_run(run_dir, out_file, dpi):
    run = Path(run_dir)
    present = [(loss, cond) for loss, cond in KINDS
               if (run / f"spectrum_{loss}_{cond}.csv").exists()]
    if not present:
        sys.exit(f"no spectrum_*.csv files in {run}")

    fig, axes = plt.subplots(len(present), 2, figsize=(12, 3.2 * len(present)), squeeze=False)
    for row, (loss, cond) in enumerate(present):
        stem = f"{loss}_{cond}"
        est = json.loads((run / f"estimate_{stem}.json").read_text())
        scenario = est["scenario"]
        true_doas = scenario["true_doas_deg"]
        lam = est["lambda_star"]

        ax = axes[row][0]
        angles, corr, active = read_spectrum(run / f"spectrum_{stem}.csv")
        ax.vlines(angles, 0.0, corr, color="0.7", lw=1)
        act = [(a, c) for a, c, f in zip(angles, corr, active) if f]
        if act:
            ax.plot(*zip(*act), "o", color="tab:red", ms=5, label="active")
        ax.axhline(lam, color="tab:blue", lw=0.8, ls="--", label=r"$\lambda^{*}$")
        for d in true_doas:
            ax.axvline(d, color="tab:green", lw=0.8, alpha=0.5)
        ax.set_xlabel("angle [deg]")
        ax.set_ylabel("correlation")
        ax.set_title(f"{stem}: spectrum at " + r"$\lambda^{*}$" + f" = {lam:.4g}")
        ax.legend(loc="upper right", fontsize=8)

        ax = axes[row][1]
        lambdas, coefs, labels = read_path(run / f"path_{stem}.csv")
        for col, values in coefs.items():
            if max(values) <= 0.0:
                continue
            is_true = float(labels[col]) in true_doas
            ax.plot(lambdas, values,
                    color="tab:green" if is_true else "0.75",
                    lw=1.6 if is_true else 0.8)
        ax.axvline(lam, color="tab:blue", lw=0.8, ls="--")
        ax.set_xscale("log")
        ax.invert_xaxis()
        ax.set_xlabel(r"$\lambda$")
        ax.set_ylabel(r"$|\hat{s}_j|$")
        ax.set_title(f"{stem}: magnitude paths (true directions in green)")

    fig.tight_layout()
    fig.savefig(out_file, dpi=dpi)
    print(f"wrote {out_file}")


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("run_dir", help="directory written by `classo doa-repro`")
    parser.add_argument("--out", default=None, help="output figure path (default RUN_DIR/doa_repro.png)")
    parser.add_argument("--dpi", type=int, default=150)
    args = parser.parse_args()
    out = args.out or str(Path(args.run_dir) / "doa_repro.png")
    plot_run(args.run_dir, out, args.dpi)


if __name__ == "__main__":
    main()
