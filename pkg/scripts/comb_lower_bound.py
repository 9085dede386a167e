"""Show that combs need one guard per tooth: guard counts and leave-one-out coverage.

    python scripts/comb_lower_bound.py [--max-k 8]
"""

from __future__ import annotations

import argparse
from fractions import Fraction

from reflexguard.boxes import polyhedron_from_boxes
from reflexguard.gen import comb_apexes, comb_boxes
from reflexguard.guard import place_guards
from reflexguard.verify import coverage_check, guard_sees_point


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--max-k", type=int, default=8)
    args = ap.parse_args()

    print(f"{'k':>3}{'r':>4}{'guards':>8}{'floor(r/2)+1':>14}  leave-one-out")
    for k in range(2, args.max_k + 1):
        gs = place_guards(polyhedron_from_boxes(comb_boxes(k)))
        bricks, guards = gs.decomposition.bricks_in_input_frame(), gs.segments()
        apexes = [tuple(Fraction(c).limit_denominator(10) for c in q) for q in comb_apexes(k)]
        outcome = []
        for i in range(len(guards)):
            rest = guards[:i] + guards[i + 1:]
            rep = coverage_check(bricks, rest)
            hidden = sum(not any(guard_sees_point(g, q, bricks) for g in rest) for q in apexes)
            outcome.append(f"{'fail' if not rep.passed else 'PASS'}({hidden} apex)")
        r = gs.certificate.r
        print(f"{k:>3}{r:>4}{gs.count:>8}{r // 2 + 1:>14}  {' '.join(outcome)}")


if __name__ == "__main__":
    main()
