"""Contact typing and structural predicates on brick-graph components."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, Iterable, List, Optional, Sequence, Set, Tuple

from .decomp import Brick, ContactRectangle
from .model import EdgeSet

PRIMITIVE_D = "primitive_d"
PRIMITIVE_I = "primitive_i"
COLLAR = "collar"
OTHER = "other"

# how the lower brick's footprint side compares with the upper one
LOWER_EXTENDS, UPPER_EXTENDS, FLUSH = "L", "U", "F"


@dataclass(frozen=True)
class ContactClass:
    kind: str
    reflex_edge_count: int

    @property
    def primitive(self) -> bool:
        return self.kind in (PRIMITIVE_D, PRIMITIVE_I)


def side_pattern(lower: Brick, upper: Brick) -> Tuple[str, str, str, str]:
    """Per footprint side (x-min, y-min, x-max, y-max, counter-clockwise): which brick reaches further out."""
    lf, uf = lower.footprint, upper.footprint
    out = []
    for k, outward in ((0, -1), (2, -1), (1, 1), (3, 1)):
        d = (lf[k] - uf[k]) * outward
        out.append(LOWER_EXTENDS if d > 0 else UPPER_EXTENDS if d < 0 else FLUSH)
    return (out[0], out[1], out[2], out[3])


def classify_contact(c: ContactRectangle, lower: Brick, upper: Brick) -> ContactClass:
    pat = side_pattern(lower, upper)
    count = len(c.reflex_edges)
    if all(s == UPPER_EXTENDS for s in pat) or all(s == LOWER_EXTENDS for s in pat):
        return ContactClass(COLLAR, count)
    if count == 1:
        # the single non-flush side tells which brick overhangs
        return ContactClass(PRIMITIVE_D if UPPER_EXTENDS in pat else PRIMITIVE_I, count)
    return ContactClass(OTHER, count)


def classify_all(bricks: Sequence[Brick], contacts: Sequence[ContactRectangle]) -> List[ContactClass]:
    return [classify_contact(c, bricks[c.lower], bricks[c.upper]) for c in contacts]


def count_collars(classes: Iterable[ContactClass]) -> int:
    return sum(1 for c in classes if c.kind == COLLAR)


@dataclass(frozen=True)
class ShapeInfo:
    is_stack: bool
    is_castle: bool
    is_double_castle: bool
    is_prism: bool
    prism_axis: Optional[int]  # None when there are no reflex edges
    monotone: Optional[int]  # prism axis when the prism is monotone
    base_brick: Optional[int]
    central_contact: Optional[int] = None  # base-to-base contact of a double castle


@dataclass
class Component:
    """A connected piece of the brick graph: node ids plus the contact ids kept inside it."""

    nodes: List[int]
    contacts: List[int]
    bricks: Sequence[Brick]
    all_contacts: Sequence[ContactRectangle]

    def up_down(self) -> Tuple[Dict[int, List[Tuple[int, int]]], Dict[int, List[Tuple[int, int]]]]:
        up = {v: [] for v in self.nodes}
        down = {v: [] for v in self.nodes}
        for cid in self.contacts:
            c = self.all_contacts[cid]
            up[c.lower].append((c.upper, cid))
            down[c.upper].append((c.lower, cid))
        for d in (up, down):
            for v in d:
                d[v].sort()
        return up, down

    def reflex_edges(self) -> List[int]:
        return sorted(i for cid in self.contacts for i in self.all_contacts[cid].reflex_edges)


def _grows(root: int, step: Dict[int, List[Tuple[int, int]]], back: Dict[int, List[Tuple[int, int]]], skip: Optional[int]) -> Optional[Set[int]]:
    """Nodes of a castle grown from root along `step`; None if the castle shape is violated."""
    seen = {root}
    stack = [root]
    while stack:
        v = stack.pop()
        kids = [(w, cid) for w, cid in step[v] if cid != skip]
        parents = [(w, cid) for w, cid in back[v] if cid != skip]
        if len(kids) not in (0, 2):
            return None
        if v != root and len(parents) != 1:
            return None
        if v == root and parents:
            return None
        for w, _ in kids:
            if w in seen:
                return None
            seen.add(w)
            stack.append(w)
    return seen


def _prism(comp: Component, e: EdgeSet) -> Tuple[bool, Optional[int]]:
    axes = {e.edges[i].axis for i in comp.reflex_edges()}
    if len(axes) > 1:
        return False, None
    return True, (axes.pop() if axes else None)


def monotone_prism(comp: Component, axis: Optional[int]) -> bool:
    """Every vertical line meets the prism's cross-section in one segment (or not at all)."""
    if axis is None:
        return len(comp.nodes) == 1
    u = 1 - axis  # perpendicular horizontal axis
    rects = [(comp.bricks[v].lo[u], comp.bricks[v].hi[u], comp.bricks[v].lo[2], comp.bricks[v].hi[2]) for v in comp.nodes]
    cuts = sorted({c for r in rects for c in r[:2]})
    for a, b in zip(cuts, cuts[1:]):
        spans = sorted((r[2], r[3]) for r in rects if r[0] <= a and b <= r[1])
        for (_, top), (bot, _) in zip(spans, spans[1:]):
            if bot > top:
                return False
    return True


def shape_info(comp: Component, classes: Sequence[ContactClass], e: EdgeSet) -> ShapeInfo:
    is_stack = all(classes[cid].primitive for cid in comp.contacts)
    is_tree = len(comp.contacts) == len(comp.nodes) - 1
    is_prism, axis = _prism(comp, e)
    monotone = axis if is_prism and axis is not None and monotone_prism(comp, axis) else None
    is_castle = is_double = False
    base = central = None
    if is_stack and is_tree:
        up, down = comp.up_down()
        roots = [v for v in comp.nodes if not down[v]]
        if len(roots) == 1:
            grown = _grows(roots[0], up, down, None)
            if grown is not None and len(grown) == len(comp.nodes):
                is_castle, base = True, roots[0]
        central = find_central_contact(comp, up, down)
        is_double = central is not None
    return ShapeInfo(is_stack, is_castle, is_double, is_prism, axis, monotone, base, central)


def find_central_contact(comp: Component, up=None, down=None) -> Optional[int]:
    """The contact joining an upside-down castle below to a castle above, if any."""
    if up is None:
        up, down = comp.up_down()
    for cid in sorted(comp.contacts):
        c = comp.all_contacts[cid]
        top = _grows(c.upper, up, down, cid)
        if top is None:
            continue
        bottom = _grows(c.lower, down, up, cid)
        if bottom is None:
            continue
        if len(top) + len(bottom) == len(comp.nodes) and not top & bottom:
            return cid
    return None


@dataclass(frozen=True)
class PrismInfo:
    is_prism: bool
    axis: Optional[int]


def prism_info_precompute(
    root: int,
    children: Dict[int, List[Tuple[int, int]]],
    contacts: Sequence[ContactRectangle],
    e: EdgeSet,
) -> Dict[int, PrismInfo]:
    """Bottom-up prism test for every sub-castle hanging from a node."""
    info: Dict[int, PrismInfo] = {}
    order, stack = [], [root]
    while stack:
        v = stack.pop()
        order.append(v)
        stack.extend(w for w, _ in children.get(v, ()))
    for v in reversed(order):
        kids = children.get(v, ())
        if not kids:
            info[v] = PrismInfo(True, None)
            continue
        axes = {e.edges[i].axis for _, cid in kids for i in contacts[cid].reflex_edges}
        ok = len(axes) == 1 and all(info[w].is_prism for w, _ in kids)
        a = next(iter(axes)) if len(axes) == 1 else None
        ok = ok and all(info[w].axis in (None, a) for w, _ in kids)
        info[v] = PrismInfo(True, a) if ok else PrismInfo(False, None)
    return info
