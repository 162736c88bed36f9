"""How fast the bounds grow.

Prints the degree-measure bounds for a single equation and a closed set as
the dimension grows, then the bit length of the quantified bound as the
quantifier profile deepens, stopping at the size guard.

Usage: python scripts/bound_explorer.py [--max-bits N]
"""

import argparse

from betti_bounds.bounds import (
    BoundTooLargeError,
    QuantifierProfile,
    equalities_bound,
    nonstrict_bound,
    quantified_bound,
)
from betti_bounds.complexity import degree_measure
from betti_bounds.formula import AbstractFunction


def main() -> int:
    ap = argparse.ArgumentParser(description="Growth of the Betti-number bounds.")
    ap.add_argument("--max-bits", type=int, default=1 << 20)
    args = ap.parse_args()
    deg = degree_measure()

    print("single equation of degree d / three closed atoms of degree d, in R^n")
    print(f"{'n':>3} " + " ".join(f"{'d=' + str(d):>18}" for d in (2, 4, 8)))
    for n in range(1, 7):
        eq = [equalities_bound(deg, n, [AbstractFunction((d,))]).value for d in (2, 4, 8)]
        ns = [nonstrict_bound(deg, n, [AbstractFunction((d,))] * 3).value for d in (2, 4, 8)]
        print(f"{n:>3} " + " ".join(f"{f'{a}/{b}':>18}" for a, b in zip(eq, ns)))

    print("\nquantified bound, one atom of degree 2, free dimension 1")
    print(f"{'widths':<18} {'t_nu':>6} {'bits':>12}")
    for nu in range(1, 5):
        for w in (1, 2):
            widths = (1,) + (w,) * nu
            try:
                b = quantified_bound(deg, QuantifierProfile(widths), 1, (2,), max_bits=args.max_bits)
                print(f"{str(widths):<18} {b.inputs['t_nu']:>6} {b.value.bit_length():>12}")
            except BoundTooLargeError as exc:
                print(f"{str(widths):<18} {'':>6} {'too large':>12}  ({exc})")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
