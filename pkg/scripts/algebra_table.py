"""Polynomial algebra of each composition case, next to its template.

Prints C = [A, B], the reduced [A, C] and [B, C] as polynomials in A, B, H,
the template the case predicts and whether they agree.
"""
import argparse
import json
import sys

from superint.composer import CompositionSpec, algebra_structure, compose

ROWS = [
    ("AA", "q-a3", "q-a3", 1, 1), ("BB", "q-b1", "q-b1", 1, 1), ("CB", "q-c2", "q-b1", 1, 1),
    ("DD", "q-d1", "q-d1", 1, 1), ("DD", "q-d1", "q-d1", 2, 1), ("CC", "q-c2", "q-c2", 1, 1),
    ("AD", "q-a3", "q-d1", 1, 1),
    ("BB", "c-b1", "c-b1", 1, 1), ("CB", "c-c2", "c-b1", 1, 1), ("DD", "c-d1", "c-d1", 1, 1),
    ("DD", "c-d1", "c-d1", 2, 1), ("DD", "c-d1", "c-d1", 3, 2), ("CC", "c-c2", "c-c2", 1, 1),
]


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--json", action="store_true")
    args = ap.parse_args(argv)
    out = []
    for case, x, y, m, n in ROWS:
        alg = algebra_structure(compose(CompositionSpec(case, x, y, m, n)))
        rec = {"case": case, "x": x, "y": y, "m": m, "n": n, **alg.to_json()}
        out.append(rec)
        if not args.json:
            print(f"{case} ({x}, {y}) m={m} n={n}")
            print(f"  C       = {rec['C'] if len(rec['C']) < 120 else rec['C'][:117] + '...'}")
            print(f"  [A,C]   = {rec['R']}   template {rec['template_R']}   match {rec['R_matches']}")
            print(f"  [B,C]   = {rec['S']}   template {rec['template_S']}   match {rec['S_matches']}")
            for note in rec["notes"]:
                print(f"  note: {note}")
    if args.json:
        print(json.dumps(out, indent=1))
    return 0


if __name__ == "__main__":
    sys.exit(main())
