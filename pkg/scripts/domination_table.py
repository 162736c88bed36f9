"""Bound versus grid-computed Betti numbers for every corpus formula.

Usage: python scripts/domination_table.py [--field GF2|GF(p)] [--json]
"""

import argparse
import json
import time

from betti_bounds.lab.corpus import DOMINATION_CORPUS
from betti_bounds.lab.verify import verify_domination


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--field", default="GF2")
    ap.add_argument("--json", action="store_true", help="print JSON rows instead of a table")
    args = ap.parse_args()

    rows, failed = [], 0
    for case in DOMINATION_CORPUS:
        start = time.perf_counter()
        rep = verify_domination(case.formula, box=case.box, resolution=case.res, field_name=args.field)
        row = rep.as_dict()
        row.update(name=case.name, expected=case.expected, seconds=round(time.perf_counter() - start, 3))
        rows.append(row)
        failed += not rep.passed

    if args.json:
        print(json.dumps(rows, indent=2, default=list))
    else:
        print(f"{'case':<22} {'theorem':<11} {'betti':<12} {'sum':>4} {'bound':>22}  ok  stable")
        for r in rows:
            bound = r["bound"] if len(r["bound"]) <= 22 else r["bound"][:9] + "..(" + str(len(r["bound"])) + "d)"
            betti = str(tuple(r["betti"]))
            stable = "warn" if r.get("stability_warning") else "yes"
            print(f"{r['name']:<22} {r['theorem']:<11} {betti:<12} {r['betti_sum']:>4} {bound:>22}  "
                  f"{'yes' if r['passed'] else 'NO ':<3} {stable}")
        print(f"{len(rows) - failed}/{len(rows)} dominated")
    return 1 if failed else 0


if __name__ == "__main__":
    raise SystemExit(main())
