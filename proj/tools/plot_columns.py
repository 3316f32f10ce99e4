#!/usr/bin/env python3
"""Extract plot-ready columns from a solver solution.csv.

The solution files store one row per (t, x[, y]) sample. This helper emits
two-column data that plotting tools consume directly:

  slice mode (default): u(x) at the time closest to --time (columns: x,u)
  trace mode:           u(t) at the grid point closest to --x (columns: t,u)

Usage:
  plot_columns.py solution.csv --time 0.5          > slice.dat
  plot_columns.py solution.csv --mode trace --x 0  > trace.dat
"""

import argparse
import csv
import sys


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__,
                                 formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("csv_path")
    ap.add_argument("--mode", choices=["slice", "trace"], default="slice")
    ap.add_argument("--time", type=float, default=None,
                    help="target time for slice mode (default: final time)")
    ap.add_argument("--x", type=float, default=0.0,
                    help="target grid point for trace mode")
    args = ap.parse_args()

    with open(args.csv_path, newline="", encoding="utf-8") as fh:
        rows = [r for r in csv.reader(fh) if r and not r[0].startswith("#")]
    header, body = rows[0], rows[1:]
    if header[0] != "t" or header[-1] != "u":
        sys.exit("unsupported CSV layout: expected t,x[,y],u columns")
    data = [[float(c) for c in r] for r in body]

    if args.mode == "slice":
        target = args.time if args.time is not None else max(r[0] for r in data)
        t_near = min((r[0] for r in data), key=lambda t: abs(t - target))
        print(f"# {header[1]},u at t={t_near!r}")
        for r in data:
            if r[0] == t_near:
                print(f"{r[1]!r},{r[-1]!r}")
    else:
        x_near = min((r[1] for r in data), key=lambda x: abs(x - args.x))
        print(f"# t,u at {header[1]}={x_near!r}")
        for r in data:
            if r[1] == x_near:
                print(f"{r[0]!r},{r[-1]!r}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
