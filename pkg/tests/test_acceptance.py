"""End-to-end acceptance checks, one test per criterion.

Each test prints a single PASS/FAIL line; the lines are also repeated in the
terminal summary (see conftest.py).
"""

from __future__ import annotations

import time
from fractions import Fraction

import pytest

from contact_types import TYPES, two_boxes
from reflexguard.boxes import polyhedron_from_boxes
from reflexguard.classify import classify_all
from reflexguard.decomp import decompose
from reflexguard.gen import comb_apexes, comb_boxes, figure2_boxes, monotone_prism_boxes, rng_for, stack_boxes
from reflexguard.guard import place_guards
from reflexguard.model import build_adjacency, classify_edges
from reflexguard.suite import evaluate, suite_instances
from reflexguard.verify import coverage_check, guard_sees_point, points_seen, sample_points

RESULTS: list = []


def report(n: int, ok: bool, detail: str) -> None:
    line = f"criterion {n:>2}: {'PASS' if ok else 'FAIL'}  {detail}"
    print(line)
    RESULTS.append(line)
    assert ok, line


def edge_counts(boxes):
    p = polyhedron_from_boxes(boxes)
    e = classify_edges(p, build_adjacency(p))
    return e.m, e.r


def counts_apart(boxes):
    """Totals over the bricks taken one by one."""
    parts = [edge_counts([b]) for b in boxes]
    return sum(m for m, _ in parts), sum(r for _, r in parts)


# -- 1, 2: literal examples --------------------------------------------------------

def test_criterion_1_figure2_cut():
    t0 = time.perf_counter()
    boxes = figure2_boxes()
    m, r = edge_counts(boxes)
    d = decompose(polyhedron_from_boxes(boxes))
    (cls,) = classify_all(d.bricks, d.contacts)
    # the contact is not primitive, so the pipeline cuts it
    cut_bricks = [(b.lo, b.hi) for b in d.bricks]
    m2, r2 = counts_apart(cut_bricks)
    dt = time.perf_counter() - t0
    ok = (m, r, m2, r2) == (23, 2, 24, 0) and not cls.primitive and dt < 1
    report(1, ok, f"m={m} r={r}, after cutting m'={m2} r'={r2}, {dt:.3f}s")


def test_criterion_2_contact_type_deltas():
    t0 = time.perf_counter()
    wrong = []
    for letter, (pattern, expected) in sorted(TYPES.items()):
        boxes = two_boxes(pattern)
        m, r = edge_counts(boxes)
        m2, r2 = counts_apart(boxes)
        if (m - m2, r - r2) != expected:
            wrong.append((letter, (m - m2, r - r2), expected))
    dt = time.perf_counter() - t0
    report(2, not wrong and len(TYPES) == 20 and dt < 1,
           f"{20 - len(wrong)}/20 contact types match, e.g. (d) gives {TYPES['d'][1]}, {dt:.3f}s" + (f", wrong {wrong}" if wrong else ""))


# -- 3 to 6 and 8: one seeded suite ---------------------------------------------------

@pytest.fixture(scope="module")
def suite():
    return [evaluate(label, boxes) for label, boxes in suite_instances()]


def test_criterion_3_reflex_bound(suite):
    bad = [r.label for r in suite if r.guards > r.bound_r or not r.on_reflex]
    secs = sum(r.guard_seconds for r in suite)
    report(3, len(suite) >= 500 and not bad and max(r.bricks for r in suite) <= 200 and secs < 60,
           f"{len(suite)} instances, guards <= floor((r-g)/2)-b+1 on all but {len(bad)}, pipeline {secs:.1f}s" + (f", violations {bad[:5]}" if bad else ""))


def test_criterion_4_edge_bound(suite):
    nonconvex = [r for r in suite if r.r > 0]
    bad = [r.label for r in nonconvex if r.guards > r.bound_m]
    report(4, not bad, f"{len(nonconvex)} non-convex instances, guards <= floor((m-4)/8)+g on all but {len(bad)}" + (f", violations {bad[:5]}" if bad else ""))


def test_criterion_5_edge_count_identities(suite):
    stacks = [r for r in suite if r.stack]
    generated_stacks = [r for r in suite if r.label.startswith("stack/") and r.bricks > 1]
    bad_stack = [r.label for r in stacks if r.m != 6 * r.r - 12 * r.g_graph + 12]
    bad_ineq = [r.label for r in suite
                if r.m < 4 * r.r - 12 * r.g_graph - 4 * r.b + 12 or r.m < 3 * r.r - 12 * r.g_graph + 12]
    ok = not bad_stack and not bad_ineq and all(r.stack for r in generated_stacks)
    report(5, ok, f"{len(stacks)} stacks with m=6r-12g+12, {len(suite)} instances meet both lower bounds"
           + (f", failures {bad_stack[:3] + bad_ineq[:3]}" if not ok else ""))


def test_criterion_6_sampled_coverage(suite):
    bad = [(r.label, r.covered, r.samples) for r in suite if not r.coverage_passed]
    secs = sum(r.coverage_seconds for r in suite)
    samples = sum(r.samples for r in suite)
    report(6, not bad and secs < 120,
           f"open guards, K=16, d=3: {len(suite) - len(bad)}/{len(suite)} instances fully covered ({samples} points), {secs:.1f}s"
           + (f", uncovered {bad[:5]}" if bad else ""))


def test_criterion_8_genus_agreement(suite):
    bad = [r.label for r in suite if r.g_euler != r.g_graph]
    ring_genera = sorted({r.g_graph for r in suite if r.label.startswith("ring/")})
    report(8, not bad and ring_genera == [1, 2, 3],
           f"surface genus equals brick-graph cycle rank on {len(suite) - len(bad)}/{len(suite)}, ring genera {ring_genera}")


# -- 7: comb witness ------------------------------------------------------------------

def test_criterion_7_comb_needs_every_guard():
    t0 = time.perf_counter()
    problems = []
    for k in range(2, 9):
        gs = place_guards(polyhedron_from_boxes(comb_boxes(k)))
        bricks, guards = gs.decomposition.bricks_in_input_frame(), gs.segments()
        r = gs.certificate.r
        if not (gs.count == k == r // 2 + 1):
            problems.append(f"k={k}: {gs.count} guards for r={r}")
        apexes = [tuple(Fraction(c).limit_denominator(10) for c in q) for q in comb_apexes(k)]
        for i in range(len(guards)):
            rest = guards[:i] + guards[i + 1:]
            hidden = [q for q in apexes if not any(guard_sees_point(g, q, bricks) for g in rest)]
            if not hidden or coverage_check(bricks, rest).passed:
                problems.append(f"k={k}: dropping guard {i} leaves coverage intact")
    dt = time.perf_counter() - t0
    report(7, not problems and dt < 10, f"k=2..8 get exactly k guards, each one needed for a tooth apex, {dt:.2f}s"
           + (f", {problems}" if problems else ""))


# -- 9: monotone prisms -----------------------------------------------------------------

def test_criterion_9_monotone_slabs():
    t0 = time.perf_counter()
    rng = rng_for(9)
    checked = 0
    problems = []
    for i in range(50):
        boxes = monotone_prism_boxes(int(rng.integers(1 << 31)), int(rng.integers(2, 13)), int(rng.integers(1, 4)))
        d = decompose(polyhedron_from_boxes(boxes))
        e = d.edges
        bricks = d.bricks_in_input_frame()
        reflex = sorted(e.reflex_ids(), key=lambda j: (e.edges[j].p0[0], e.edges[j].p0[2]))
        xs = [min(b.lo[0] for b in bricks)] + [e.edges[j].p0[0] for j in reflex] + [max(b.hi[0] for b in bricks)]
        pts = sample_points(bricks, 3)
        for pos, j in enumerate(reflex, start=1):
            slab = [q for q in pts if xs[pos - 1] <= q[0] <= xs[pos + 1]]
            seen = points_seen(bricks, [d.edge_in_input_frame(j)], slab, "open", 16)
            checked += len(slab)
            if not seen.all():
                problems.append((i, pos, int((~seen).sum())))
    dt = time.perf_counter() - t0
    report(9, not problems and dt < 10, f"50 monotone prisms, {checked} slab samples each seen by their reflex edge, {dt:.2f}s"
           + (f", misses {problems[:5]}" if problems else ""))


# -- 10: scaling ------------------------------------------------------------------------

def test_criterion_10_pipeline_scaling():
    sizes = (100, 200, 400)
    times = []
    for n in sizes:
        polys = [polyhedron_from_boxes(stack_boxes(seed, n)) for seed in range(3)]
        total = 0.0
        for p in polys:
            best = float("inf")
            for _ in range(3):
                t0 = time.perf_counter()
                place_guards(p)
                best = min(best, time.perf_counter() - t0)
            total += best
        times.append(total)
    ratios = [b / a for a, b in zip(times, times[1:])]
    report(10, all(x <= 2.4 for x in ratios),
           "stacks of " + "/".join(map(str, sizes)) + " bricks: " + ", ".join(f"{t:.3f}s" for t in times)
           + ", per doubling " + ", ".join(f"{x:.2f}x" for x in ratios) + " (threshold about 2.4x)")
