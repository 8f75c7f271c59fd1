"""Jauch-Hill integrals against their displayed compact forms.

For each coprime (m, n) the DD composition of two harmonic ladders gives K.
We report its order, whether K is c*T + poly(H1, H2) for the compact form T,
and the ratio of leading symbols.
"""
import argparse
import sys

from superint.composer import CompositionSpec, check_superintegrable, compare_compact, compose, jauch_hill_form
from superint.symkernel import to_text

PAIRS = [(1, 1), (2, 1), (3, 1), (3, 2), (4, 1), (2, 3), (5, 1), (5, 2), (4, 3)]


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--mechanics", choices=["quantum", "classical"], default="quantum")
    args = ap.parse_args(argv)
    entry = "q-d1" if args.mechanics == "quantum" else "c-d1"
    print(f"{'m':>2} {'n':>2} {'order':>5} {'[H,K]=0':>8} {'literal':>8}  leading ratio")
    for m, n in PAIRS:
        comp = compose(CompositionSpec("DD", entry, entry, m, n))
        cmp = compare_compact(comp, jauch_hill_form(m, n, args.mechanics))
        ok = check_superintegrable(comp, strict=False).integral
        ratio = to_text(cmp.leading_ratio) if cmp.leading else "-"
        print(f"{m:>2} {n:>2} {comp.order:>5} {str(ok):>8} {str(cmp.literal):>8}  {ratio}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
