"""Betti vectors of S, T, X and X' for the construction corpus.

Usage: python scripts/fidelity_table.py [--field GF2|GF(p)]
"""

import argparse
import time

from betti_bounds.lab.corpus import FIDELITY_CORPUS, fidelity_rows


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--field", default="GF2")
    args = ap.parse_args()

    print(f"{'case':<24} {'lambda':<6} {'m':>2} {'S':<10} {'T':<10} {'X':<10} {'X prime':<10} ok    secs")
    bad = 0
    for case in FIDELITY_CORPUS:
        start = time.perf_counter()
        row_T, row_X = fidelity_rows(case, args.field)
        ok = row_T.equal and row_X.equal
        bad += not ok
        cells = [str(v.trimmed()) for v in (row_T.original, row_T.constructed, row_X.original, row_X.constructed)]
        print(f"{case.name:<24} {str(case.lam):<6} {case.m:>2} " + " ".join(f"{c:<10}" for c in cells)
              + f" {'yes' if ok else 'NO':<5} {time.perf_counter() - start:.2f}")
    return 1 if bad else 0


if __name__ == "__main__":
    raise SystemExit(main())
