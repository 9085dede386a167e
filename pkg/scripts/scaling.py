"""Time the guard pipeline and the coverage check on stacks of growing size.

    python scripts/scaling.py [--sizes 100 200 400 800] [--seeds 3]
"""

from __future__ import annotations

import argparse
import time

from reflexguard.boxes import polyhedron_from_boxes
from reflexguard.gen import stack_boxes
from reflexguard.guard import place_guards
from reflexguard.verify import coverage_check


def best_of(fn, repeats: int = 3) -> float:
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--sizes", type=int, nargs="+", default=[100, 200, 400, 800])
    ap.add_argument("--seeds", type=int, default=3)
    args = ap.parse_args()

    print(f"{'bricks':>7}{'pipeline s':>12}{'ratio':>7}{'coverage s':>12}")
    prev = None
    for n in args.sizes:
        polys = [polyhedron_from_boxes(stack_boxes(seed, n)) for seed in range(args.seeds)]
        pipe = sum(best_of(lambda p=p: place_guards(p)) for p in polys)
        cov = 0.0
        for p in polys:
            gs = place_guards(p)
            t0 = time.perf_counter()
            coverage_check(gs.decomposition.bricks_in_input_frame(), gs.segments())
            cov += time.perf_counter() - t0
        ratio = f"{pipe / prev:.2f}" if prev else "-"
        print(f"{n:>7}{pipe:>12.3f}{ratio:>7}{cov:>12.2f}")
        prev = pipe


if __name__ == "__main__":
    main()
