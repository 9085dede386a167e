"""A fixed, seeded benchmark suite and a per-instance evaluation record.

The suite mixes every structural family the guard pipeline distinguishes:
stacks of primitive contacts, castles, double castles, composites joined
through collars, wedding cakes and fused rings of genus one to three.
"""

from __future__ import annotations

import time
from dataclasses import dataclass
from typing import Iterator, List, Optional, Tuple

from .boxes import Box, polyhedron_from_boxes
from .classify import classify_all
from .decomp import graph_genus
from .gen import cake_boxes, castle_boxes, composite_boxes, double_castle_boxes, ring_boxes, stack_boxes
from .guard import place_guards
from .model import build_adjacency, euler_genus
from .verify import coverage_check


@dataclass(frozen=True)
class SuiteConfig:
    stacks: int = 170
    castles: int = 90
    double_castles: int = 90
    composites: int = 100
    cakes: int = 30
    rings: int = 20
    max_bricks: int = 200
    # deeper castles grow leaves thinner than the open-mode viewpoint spacing
    # of their longest guard at sixteen samples per edge
    castle_levels: int = 4
    double_castle_levels: int = 3
    base_seed: int = 20240601


def suite_instances(cfg: SuiteConfig = SuiteConfig()) -> Iterator[Tuple[str, List[Box]]]:
    """Yield (label, boxes) pairs; the same config always yields the same instances."""
    s = cfg.base_seed
    for i in range(cfg.stacks):
        # mostly small stacks, with every tenth one large
        n = 2 + (i * 7) % 40 if i % 10 else min(cfg.max_bricks, 20 * (1 + i // 10))
        yield f"stack/{i}/n={n}", stack_boxes(s + i, n)
    for i in range(cfg.castles):
        levels = 1 + i % cfg.castle_levels
        yield f"castle/{i}/levels={levels}", castle_boxes(s + 1000 + i, levels)
    for i in range(cfg.double_castles):
        levels = 1 + i % cfg.double_castle_levels
        yield f"doubleCastle/{i}/levels={levels}", double_castle_boxes(s + 2000 + i, levels)
    for i in range(cfg.composites):
        n = 5 + (i * 13) % 90
        boxes = composite_boxes(s + 3000 + i, n)
        if len(boxes) <= cfg.max_bricks:
            yield f"composite/{i}/n={n}", boxes
    for i in range(cfg.cakes):
        tiers = 1 + i % 6
        yield f"cake/{i}/tiers={tiers}", cake_boxes(s + 4000 + i, tiers)
    for i in range(cfg.rings):
        rings = 1 + i % 3
        arm = 3 + (i // 3) % 4
        yield f"ring/{i}/g={rings}", ring_boxes(arm, rings)


@dataclass
class Record:
    label: str
    bricks: int
    n: int
    m: int
    r: int
    g_euler: int
    g_graph: int
    b: int
    stack: bool
    guards: int
    on_reflex: bool
    bound_r: int
    bound_m: int
    guard_seconds: float
    covered: Optional[int] = None
    samples: Optional[int] = None
    coverage_seconds: float = 0.0

    @property
    def coverage_passed(self) -> bool:
        return self.samples is not None and self.covered == self.samples


def evaluate(label: str, boxes: List[Box], coverage: bool = True, d: int = 3, k: int = 16) -> Record:
    p = polyhedron_from_boxes(boxes)
    t0 = time.perf_counter()
    gs = place_guards(p)
    t1 = time.perf_counter()
    dec = gs.decomposition
    e = dec.edges
    classes = classify_all(dec.bricks, dec.contacts)
    c = gs.certificate
    rec = Record(
        label=label, bricks=len(dec.bricks), n=p.n, m=e.m, r=e.r,
        g_euler=euler_genus(p, build_adjacency(p)), g_graph=graph_genus(dec.graph), b=c.b,
        stack=bool(classes) and all(x.primitive for x in classes),
        guards=gs.count, on_reflex=all(e.edges[i].reflex for i in gs.guards),
        bound_r=c.bound_r, bound_m=c.bound_m, guard_seconds=t1 - t0,
    )
    if coverage:
        rep = coverage_check(dec.bricks_in_input_frame(), gs.segments(), "open", d, k, convex=gs.status == "Convex")
        rec.covered, rec.samples = rep.covered, rep.samples
        rec.coverage_seconds = time.perf_counter() - t1
    return rec
