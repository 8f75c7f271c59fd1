"""Conservation of the displayed quartic along solutions of the c-d3 ODE.

Integrates the first-order condition from random starts and tracks the
quartic as printed and the quartic divided by x^2.
"""
import argparse
import sys

import numpy as np

from superint.catalog import get_entry
from superint.numeric import SingularityInWindow, first_integral_drift, first_integral_values, integrate_jet
from superint.symkernel import from_json


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--trajectories", type=int, default=10)
    ap.add_argument("--tol", type=float, default=1e-12)
    args = ap.parse_args(argv)
    entry = get_entry("c-d3")
    checks = {c.name: from_json(c.data["expr"]) for c in entry.checks if c.kind == "first_integral"}
    F = checks["quartic as printed is conserved"]
    G = checks["quartic divided by x^2 is conserved"]
    rng = np.random.default_rng(args.seed)
    done = 0
    print(f"{'d':>7} {'V(1.5)':>7} {'drift F':>9} {'drift F/x^2':>11} {'F(2)/F(1)':>9}")
    while done < args.trajectories:
        d, v0 = rng.uniform(-1, 1), rng.uniform(-1, -0.1)
        try:
            jet = integrate_jet(entry.potential, {"k1": d}, init=(1.5, [v0]), window=(1.0, 2.0), tol=args.tol)
        except SingularityInWindow:
            continue
        vals = first_integral_values(jet, F)
        print(f"{d:7.3f} {v0:7.3f} {first_integral_drift(jet, F):9.2e} {first_integral_drift(jet, G):11.2e} "
              f"{abs(vals[-1] / vals[0]):9.4f}")
        done += 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
