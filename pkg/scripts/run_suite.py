"""Run the seeded benchmark suite and print a per-family table of guard counts and bounds.

    python scripts/run_suite.py [--no-coverage] [--csv out.csv]
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
from collections import defaultdict

from reflexguard.suite import SuiteConfig, evaluate, suite_instances


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--no-coverage", action="store_true", help="skip the sampled coverage check")
    ap.add_argument("--csv", help="write one row per instance")
    args = ap.parse_args()

    records = [evaluate(label, boxes, coverage=not args.no_coverage) for label, boxes in suite_instances(SuiteConfig())]
    by_family = defaultdict(list)
    for rec in records:
        by_family[rec.label.split("/")[0]].append(rec)

    header = f"{'family':<13}{'count':>6}{'max r':>7}{'guards':>8}{'boundR':>8}{'boundM':>8}{'slack':>7}{'covered':>9}{'guard s':>9}"
    print(header)
    print("-" * len(header))
    for family, recs in by_family.items():
        covered = "n/a" if args.no_coverage else f"{sum(r.coverage_passed for r in recs)}/{len(recs)}"
        print(f"{family:<13}{len(recs):>6}{max(r.r for r in recs):>7}{sum(r.guards for r in recs):>8}"
              f"{sum(r.bound_r for r in recs):>8}{sum(r.bound_m for r in recs):>8}"
              f"{min(r.bound_r - r.guards for r in recs):>7}{covered:>9}{sum(r.guard_seconds for r in recs):>9.2f}")
    violations = [r.label for r in records if r.r and (r.guards > r.bound_r or r.guards > r.bound_m)]
    print(f"\n{len(records)} instances, {len(violations)} bound violations")

    if args.csv:
        with open(args.csv, "w", newline="") as fh:
            fields = [f.name for f in dataclasses.fields(records[0])]
            w = csv.DictWriter(fh, fieldnames=fields)
            w.writeheader()
            for rec in records:
                w.writerow(dataclasses.asdict(rec))


if __name__ == "__main__":
    main()
