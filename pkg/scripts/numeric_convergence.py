"""Residual of the Painleve-IV ladder against integration tolerance.

Integrates the q-d3 potential through its P4 parametrization at a sweep of
tolerances, prints residual / tol and fits the log-log slope.  A slope near
one means the residual is integration error, bounded by C * tol.
"""
import argparse
import csv
import sys
import time

import numpy as np

from superint.catalog import get_entry
from superint.numeric import numcheck


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--window", default="-1,1")
    ap.add_argument("--eps", type=int, default=1, choices=[-1, 1])
    ap.add_argument("--decades", type=float, default=4.0)
    ap.add_argument("--points", type=int, default=13)
    ap.add_argument("--csv", help="write tol,residual rows here")
    args = ap.parse_args(argv)
    a, b = map(float, args.window.split(","))
    entry = get_entry("q-d3")
    params = {"k1": 0, "k2": 0, "eps": args.eps}
    tols = np.logspace(-6, -6 - args.decades, args.points)
    rows = []
    start = time.perf_counter()
    for tol in tols:
        rep = numcheck(entry, params, window=(a, b), tol=tol, via="V through P4")
        rows.append((tol, rep.residual))
        print(f"tol {tol:9.2e}  residual {rep.residual:9.2e}  residual/tol {rep.residual / tol:8.1f}")
    t, r = np.array(rows).T
    slope, icpt = np.polyfit(np.log(t), np.log(r), 1)
    print(f"slope {slope:.3f}, C = max residual/tol = {np.max(r / t):.1f}, {time.perf_counter() - start:.1f} s")
    if args.csv:
        with open(args.csv, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["tol", "residual"])
            w.writerows(rows)
    return 0


if __name__ == "__main__":
    sys.exit(main())
