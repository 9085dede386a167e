"""Seeded generators for the structural families the guarding bounds talk about.

Random families draw from numpy's PCG64 bit generator seeded with the given
integer, so a (family, parameters, seed) triple always yields the same ORP
document.  Every family is assembled from interior-disjoint boxes; boxes
that are not meant to be in contact never touch, not even at a corner.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from shapely.geometry import Point, Polygon

from .boxes import Box, box_volume, boxes_touch, polyhedron_from_boxes
from .model import Polyhedron

FAMILIES = ("cuboid", "extrude", "comb", "stack", "castle", "doubleCastle", "ring", "figure2", "cake", "composite", "monotone")


def rng_for(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(seed))


@dataclass(frozen=True)
class GenSpec:
    family: str
    seed: int = 0
    n: int = 5  # bricks for stacks, tiers for cakes, slabs for monotone prisms
    levels: int = 2
    k: int = 3
    arm_length: int = 3
    rings: int = 1
    depth: int = 1
    size: Tuple[int, int, int] = (1, 1, 1)
    polygon: Tuple[Tuple[int, int], ...] = field(default_factory=tuple)

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValueError(f"unknown family {self.family!r}")


def generate(spec: GenSpec) -> Polyhedron:
    return polyhedron_from_boxes(generate_boxes(spec))


def generate_boxes(spec: GenSpec) -> List[Box]:
    f = spec.family
    if f == "cuboid":
        return [((0, 0, 0), tuple(spec.size))]
    if f == "extrude":
        return extrude_boxes(spec.polygon, spec.depth)
    if f == "comb":
        return comb_boxes(spec.k)
    if f == "stack":
        return stack_boxes(spec.seed, spec.n)
    if f == "castle":
        return castle_boxes(spec.seed, spec.levels)
    if f == "doubleCastle":
        return double_castle_boxes(spec.seed, spec.levels)
    if f == "ring":
        return ring_boxes(spec.arm_length, spec.rings)
    if f == "figure2":
        return figure2_boxes()
    if f == "cake":
        return cake_boxes(spec.seed, spec.n)
    if f == "composite":
        return composite_boxes(spec.seed, spec.n)
    return monotone_prism_boxes(spec.seed, spec.n, spec.depth)


# ---------------------------------------------------------------------------
# Deterministic families
# ---------------------------------------------------------------------------

def extrude_boxes(polygon: Sequence[Tuple[int, int]], depth: int) -> List[Box]:
    """Columns of a simple orthogonal polygon in the x-z plane, extruded along y."""
    if depth < 1:
        raise ValueError("depth must be positive")
    pts = [tuple(map(int, q)) for q in polygon]
    for a, b in zip(pts, pts[1:] + pts[:1]):
        if a[0] != b[0] and a[1] != b[1]:
            raise ValueError("polygon edges must be axis-parallel")
    poly = Polygon(pts)
    if not poly.is_valid or poly.area == 0:
        raise ValueError("polygon is not simple")
    xs = sorted({q[0] for q in pts})
    zs = sorted({q[1] for q in pts})
    boxes = []
    for x0, x1 in zip(xs, xs[1:]):
        run = None
        for z0, z1 in zip(zs, zs[1:]):
            inside = poly.contains(Point((x0 + x1) / 2, (z0 + z1) / 2))
            if inside and run is None:
                run = z0
            if not inside and run is not None:
                boxes.append(((x0, 0, run), (x1, depth, z0)))
                run = None
        if run is not None:
            boxes.append(((x0, 0, run), (x1, depth, zs[-1])))
    return boxes


def gen_extrude(polygon: Sequence[Tuple[int, int]], depth: int) -> Polyhedron:
    return polyhedron_from_boxes(extrude_boxes(polygon, depth))


def comb_polygon(k: int) -> List[Tuple[int, int]]:
    """Spine [0, 2k-1] x [0, 1] with teeth [2i, 2i+1] x [1, 2], counter-clockwise."""
    if k < 1:
        raise ValueError("comb needs at least one tooth")
    pts = [(0, 0), (2 * k - 1, 0)]
    for i in reversed(range(k)):
        if i < k - 1:
            pts.append((2 * i + 1, 1))
        pts += [(2 * i + 1, 2), (2 * i, 2)]
        if i > 0:
            pts.append((2 * i, 1))
    return pts


def comb_boxes(k: int) -> List[Box]:
    if k < 2:
        raise ValueError("comb needs k >= 2")
    boxes = [((0, 0, 0), (2 * k - 1, 1, 1))]
    boxes += [((2 * i, 0, 1), (2 * i + 1, 1, 2)) for i in range(k)]
    return boxes


def gen_comb(k: int) -> Polyhedron:
    return polyhedron_from_boxes(comb_boxes(k))


def comb_apexes(k: int) -> List[Tuple[float, float, float]]:
    """One witness point near the top of every tooth."""
    return [(2 * i + 0.5, 0.5, 1.9) for i in range(k)]


def figure2_boxes() -> List[Box]:
    return [((0, 0, 0), (2, 1, 1)), ((0, 0, 1), (1, 2, 2))]


def gen_figure2() -> Polyhedron:
    return polyhedron_from_boxes(figure2_boxes())


def ring_boxes(arm_length: int, rings: int = 1) -> List[Box]:
    """Two parallel bars with rings+1 crossbars on top: one tunnel per pair of neighbouring crossbars."""
    if arm_length < 3 or rings < 1:
        raise ValueError("need arm_length >= 3 and rings >= 1")
    L = arm_length
    span = rings * (L - 1) + 1
    boxes = [((0, 0, 0), (span, 1, 1)), ((0, L - 1, 0), (span, L, 1))]
    boxes += [((i * (L - 1), 0, 1), (i * (L - 1) + 1, L, 2)) for i in range(rings + 1)]
    return boxes


def gen_ring(arm_length: int, rings: int = 1) -> Polyhedron:
    return polyhedron_from_boxes(ring_boxes(arm_length, rings))


# ---------------------------------------------------------------------------
# Random families
# ---------------------------------------------------------------------------

class _Placer:
    """Accepts a new box only if it touches nothing except its intended partner."""

    def __init__(self):
        self.lo = np.zeros((0, 3), dtype=np.int64)
        self.hi = np.zeros((0, 3), dtype=np.int64)

    @property
    def boxes(self) -> List[Box]:
        return [self.box(i) for i in range(len(self.lo))]

    def box(self, i: int) -> Box:
        return tuple(map(int, self.lo[i])), tuple(map(int, self.hi[i]))

    def fits(self, box: Box, partner: Optional[int]) -> bool:
        lo, hi = np.array(box[0]), np.array(box[1])
        touch = ((self.lo <= hi) & (lo <= self.hi)).all(axis=1)
        if partner is not None:
            touch[partner] = False
        return not touch.any()

    def add(self, box: Box) -> int:
        self.lo = np.vstack([self.lo, box[0]])
        self.hi = np.vstack([self.hi, box[1]])
        return len(self.lo) - 1


def _primitive_partner(rng, b: Box, up: bool, smaller: bool, h: int) -> Optional[Box]:
    """A box on top of (or below) b sharing three footprint sides with it."""
    lo, hi = list(b[0]), list(b[1])
    axis = int(rng.integers(2))
    end = int(rng.integers(2))
    ext = hi[axis] - lo[axis]
    nlo, nhi = lo[:], hi[:]
    if smaller:
        if ext < 2:
            return None
        # keep slivers out: thin boxes beside long edges starve sampled verification
        w = int(rng.integers(max(1, ext // 3), ext - max(1, ext // 3) + 1))
        if end == 0:
            nhi[axis] = lo[axis] + w
        else:
            nlo[axis] = hi[axis] - w
    else:
        if ext > 12:
            return None
        w = int(rng.integers(1, 4))
        if end == 0:
            nlo[axis] = lo[axis] - w
        else:
            nhi[axis] = hi[axis] + w
    if up:
        nlo[2], nhi[2] = hi[2], hi[2] + h
    else:
        nlo[2], nhi[2] = lo[2] - h, lo[2]
    return (tuple(nlo), tuple(nhi))


def stack_boxes(seed: int, n: int, max_tries: Optional[int] = None) -> List[Box]:
    """A tree of bricks where every contact is primitive: flush on three sides, overhanging on one."""
    if n < 1:
        raise ValueError("need at least one brick")
    rng = rng_for(seed)
    pl = _Placer()
    pl.add(((0, 0, 0), (int(rng.integers(3, 9)), int(rng.integers(3, 9)), int(rng.integers(1, 4)))))
    limit = max_tries if max_tries is not None else 20000 + 100 * n
    tries = 0
    while len(pl.lo) < n:
        tries += 1
        if tries > limit:
            raise RuntimeError("stack generator could not place another brick")
        parent = int(rng.integers(len(pl.lo)))
        b = pl.box(parent)
        cand = _primitive_partner(rng, b, bool(rng.integers(2)), bool(rng.random() < 0.6), int(rng.integers(1, 4)))
        if cand is not None and pl.fits(cand, parent):
            pl.add(cand)
    return pl.boxes


def gen_stack(seed: int, n: int) -> Polyhedron:
    return polyhedron_from_boxes(stack_boxes(seed, n))


def _castle(rng, base: Box, levels: int, out: List[Box], down: bool = False) -> None:
    """Grow a castle on base: each brick carries zero or two children at opposite ends."""
    out.append(base)
    stack = [(base, 1)]
    while stack:
        b, depth = stack.pop()
        if depth >= levels:
            continue
        if depth > 1 and rng.random() < 0.35:
            continue
        lo, hi = b
        axes = [a for a in (0, 1) if hi[a] - lo[a] >= 3]
        if not axes:
            continue
        axis = axes[int(rng.integers(len(axes)))]
        ext = hi[axis] - lo[axis]
        # each child spans between a third and a half of the parent
        w1 = int(rng.integers(max(1, ext // 3), (ext - 1) // 2 + 1))
        w2 = int(rng.integers(max(1, ext // 3), (ext - 1) // 2 + 1))
        for start, stop in ((lo[axis], lo[axis] + w1), (hi[axis] - w2, hi[axis])):
            nlo, nhi = list(lo), list(hi)
            nlo[axis], nhi[axis] = start, stop
            h = int(rng.integers(1, 4))
            if down:
                nlo[2], nhi[2] = lo[2] - h, lo[2]
            else:
                nlo[2], nhi[2] = hi[2], hi[2] + h
            child = (tuple(nlo), tuple(nhi))
            out.append(child)
            stack.append((child, depth + 1))


def _castle_base(rng, levels: int) -> Tuple[int, int]:
    side = 3 * 2 ** (levels - 1)
    return side + int(rng.integers(0, side)), side + int(rng.integers(0, side))


def castle_boxes(seed: int, levels: int) -> List[Box]:
    if levels < 1:
        raise ValueError("levels must be positive")
    rng = rng_for(seed)
    w, d = _castle_base(rng, levels)
    out: List[Box] = []
    _castle(rng, ((0, 0, 0), (w, d, int(rng.integers(1, 4)))), levels, out)
    return out


def gen_castle(seed: int, levels: int) -> Polyhedron:
    return polyhedron_from_boxes(castle_boxes(seed, levels))


def double_castle_boxes(seed: int, levels: int) -> List[Box]:
    """A castle on top of an upside-down castle, bases joined by one primitive contact."""
    if levels < 1:
        raise ValueError("levels must be positive")
    rng = rng_for(seed)
    w, d = _castle_base(rng, levels)
    upper = ((0, 0, 0), (w, d, int(rng.integers(1, 4))))
    delta = int(rng.integers(1, 4))
    lower_w = w + delta if rng.random() < 0.5 else w - delta
    lower = ((0, 0, -int(rng.integers(1, 4))), (lower_w, d, 0))
    out: List[Box] = []
    _castle(rng, upper, levels, out)
    _castle(rng, lower, levels, out, down=True)
    return out


def gen_double_castle(seed: int, levels: int) -> Polyhedron:
    return polyhedron_from_boxes(double_castle_boxes(seed, levels))


def cake_boxes(seed: int, tiers: int) -> List[Box]:
    """Each tier strictly inside the one below: every contact is a collar."""
    rng = rng_for(seed)
    inset = [[int(rng.integers(1, 3)) for _ in range(4)] for _ in range(tiers)]
    w = sum(i[0] + i[1] for i in inset) + 1
    d = sum(i[2] + i[3] for i in inset) + 1
    lo, hi, z = [0, 0], [w, d], 0
    out = []
    for t in range(tiers):
        h = int(rng.integers(1, 3))
        out.append(((lo[0], lo[1], z), (hi[0], hi[1], z + h)))
        z += h
        lo = [lo[0] + inset[t][0], lo[1] + inset[t][2]]
        hi = [hi[0] - inset[t][1], hi[1] - inset[t][3]]
    return out


def composite_boxes(seed: int, n: int) -> List[Box]:
    """A platform carrying random sub-solids above and below it, each resting on it through collars.

    A sub-solid that rests on the platform with several bricks closes loops,
    so composites also exercise positive genus.
    """
    rng = rng_for(seed)
    parts: List[List[Box]] = []
    remaining = max(n - 1, 1)
    while remaining > 0:
        kind = int(rng.integers(3))
        sub_seed = int(rng.integers(1 << 31))
        if kind == 0:
            size = int(min(remaining, rng.integers(1, 9)))
            boxes = stack_boxes(sub_seed, size)
        elif kind == 1:
            boxes = castle_boxes(sub_seed, int(rng.integers(1, 4)))
        else:
            boxes = cake_boxes(sub_seed, int(rng.integers(1, 4)))
        parts.append(boxes)
        remaining -= len(boxes)
    placed: List[Box] = []
    cursor, depth = 1, 2
    for i, boxes in enumerate(parts):
        if i % 2 == 1:
            # hang this part under the platform, mirrored in z
            boxes = [((lo[0], lo[1], -hi[2]), (hi[0], hi[1], -lo[2])) for lo, hi in boxes]
        lo = np.min([b[0] for b in boxes], axis=0)
        hi = np.max([b[1] for b in boxes], axis=0)
        dz = -int(lo[2]) if i % 2 == 0 else -1 - int(hi[2])
        shift = (cursor - int(lo[0]), 1 - int(lo[1]), dz)
        placed += [(tuple(a + s for a, s in zip(b0, shift)), tuple(a + s for a, s in zip(b1, shift))) for b0, b1 in boxes]
        cursor += int(hi[0] - lo[0]) + 1
        depth = max(depth, int(hi[1] - lo[1]) + 2)
    return [((0, 0, -1), (cursor, depth, 0))] + placed


def monotone_prism_boxes(seed: int, slabs: int, depth: int = 1) -> List[Box]:
    """Columns whose vertical extents overlap their neighbours': every vertical line meets one segment."""
    rng = rng_for(seed)
    out = []
    x = 0
    prev = None
    for _ in range(max(slabs, 1)):
        w = int(rng.integers(1, 4))
        while True:
            lo = int(rng.integers(0, 5))
            hi = lo + int(rng.integers(1, 5))
            if prev is None or (lo < prev[1] and prev[0] < hi and (lo, hi) != prev):
                break
        out.append(((x, 0, lo), (x + w, max(depth, 1), hi)))
        x += w
        prev = (lo, hi)
    return out


def gen_monotone_prism(seed: int, slabs: int, depth: int = 1) -> Polyhedron:
    return polyhedron_from_boxes(monotone_prism_boxes(seed, slabs, depth))


def total_volume(boxes: Sequence[Box]) -> int:
    return sum(box_volume(b) for b in boxes)


def check_disjoint(boxes: Sequence[Box], contacts: Sequence[Tuple[int, int]] = ()) -> bool:
    """No two boxes touch unless listed as a contact pair."""
    allowed = {tuple(sorted(c)) for c in contacts}
    for i in range(len(boxes)):
        for j in range(i + 1, len(boxes)):
            if (i, j) not in allowed and boxes_touch(boxes[i], boxes[j]):
                return False
    return True
