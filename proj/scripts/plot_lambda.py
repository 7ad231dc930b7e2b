#!/usr/bin/env python3
"""Plot lambda(T) from one or more `spatent sweep` CSV files.

    spatent sweep --n-mean 10  --out n10.csv
    spatent sweep --n-mean 100 --out n100.csv
    python3 scripts/plot_lambda.py n10.csv n100.csv -o lambda.png
"""

import argparse
import sys

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import pandas as pd


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    parser.add_argument("csv", nargs="+", help="sweep outputs (CSV)")
    parser.add_argument("-o", "--output", default="lambda.png")
    parser.add_argument("--linear", action="store_true", help="linear temperature axis")
    parser.add_argument("--condensate", action="store_true", help="add <n_0>/<N> on a second axis")
    args = parser.parse_args(argv)

    fig, ax = plt.subplots(figsize=(6, 4))
    twin = ax.twinx() if args.condensate else None
    for path in args.csv:
        df = pd.read_csv(path)
        bad = df[df["status"] != "ok"]
        if len(bad):
            print(f"{path}: skipping {len(bad)} failed row(s)", file=sys.stderr)
        df = df[df["status"] == "ok"]
        (line,) = ax.plot(df["T"], df["lambda"], marker=".", label=path)
        if twin is not None:
            twin.plot(df["T"], df["condensate_fraction"], ls="--", color=line.get_color())
    if not args.linear:
        ax.set_xscale("log")
    ax.set_xlabel("T")
    ax.set_ylabel(r"$\lambda$")
    ax.set_ylim(bottom=0)
    if twin is not None:
        twin.set_ylabel(r"$\langle n_0\rangle / \langle N\rangle$ (dashed)")
        twin.set_ylim(0, 1.05)
    ax.legend()
    fig.tight_layout()
    fig.savefig(args.output, dpi=150)
    print(f"wrote {args.output}")


if __name__ == "__main__":
    main()
