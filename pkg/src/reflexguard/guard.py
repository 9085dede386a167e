"""Reflex-edge guard placement for 2-reflex orthogonal polyhedra.

The brick graph is reduced by deleting edges: non-primitive contacts,
cycle edges, leaf edges of odd trees and odd cuts.  What remains is a set
of double castles, each guarded recursively; bricks isolated along the way
get one guard on a bordering reflex edge.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Set, Tuple

from .classify import (
    Component,
    ContactClass,
    PrismInfo,
    classify_all,
    count_collars,
    find_central_contact,
    prism_info_precompute,
)
from .decomp import BrickGraph, Decomposition, decompose, graph_genus
from .model import EdgeSet, InvalidPolyhedron, Polyhedron, Y, validate

OPEN, CLOSED = "open", "closed"
MODES = (OPEN, CLOSED)


class IsolatedConvexBrick(RuntimeError):
    pass


class ComponentNotDoubleCastle(RuntimeError):
    pass


@dataclass(frozen=True)
class Certificate:
    r: int
    g: int
    b: int
    m: int

    @property
    def bound_r(self) -> int:
        return (self.r - self.g) // 2 - self.b + 1

    @property
    def bound_m(self) -> int:
        return (self.m - 4) // 8 + self.g

    def as_dict(self, count: int) -> dict:
        return {"r": self.r, "g": self.g, "b": self.b, "m": self.m,
                "boundR": self.bound_r, "boundM": self.bound_m, "count": count}


@dataclass
class GuardSet:
    guards: List[int]  # edge ids in the normalised frame
    mode: str
    certificate: Certificate
    status: str  # "Convex" or "Guarded"
    decomposition: Optional[Decomposition] = None

    @property
    def count(self) -> int:
        return len(self.guards)

    def segments(self):
        """Guard edges as endpoint pairs in the input frame."""
        d = self.decomposition
        return [d.edge_in_input_frame(i) for i in self.guards]


@dataclass
class PipelineState:
    graph: BrickGraph
    alive: Set[int]
    cuts: Dict[str, Set[int]] = field(default_factory=lambda: {
        "nonPrimitiveCut": set(), "forestCut": set(), "parityCut": set(), "oddCut": set()})
    direct_guards: List[int] = field(default_factory=list)

    def cut(self, flag: str, cid: int) -> None:
        self.alive.discard(cid)
        self.cuts[flag].add(cid)

    def neighbours(self, v: int) -> List[Tuple[int, int]]:
        return [(w, cid) for w, cid in self.graph.adjacency[v] if cid in self.alive]


# ---------------------------------------------------------------------------
# Guarding procedures
# ---------------------------------------------------------------------------

def _edge_sort_key(e: EdgeSet, eid: int):
    ed = e.edges[eid]
    perp = 0 if ed.axis == Y else 1  # x for edges along Y, y for edges along X
    return (ed.p0[perp], ed.p0, ed.p1, eid)


def guard_monotone(edge_ids: Sequence[int], e: EdgeSet) -> List[int]:
    """Odd-indexed edges in sweep order, plus the last one when the count is even."""
    if not edge_ids:
        raise ValueError("monotone guarding needs at least one reflex edge")
    order = sorted(set(edge_ids), key=lambda i: _edge_sort_key(e, i))
    picks = order[::2]
    if len(order) % 2 == 0:
        picks.append(order[-1])
    return picks


@dataclass
class _Castle:
    """A castle growing away from `root` (upward or, for an inverted one, downward)."""

    root: int
    children: Dict[int, List[Tuple[int, int]]]
    contacts: Sequence
    e: EdgeSet
    info: Dict[int, PrismInfo] = field(default_factory=dict)

    def __post_init__(self):
        self.info = prism_info_precompute(self.root, self.children, self.contacts, self.e)

    def edge_of(self, cid: int) -> int:
        (eid,) = self.contacts[cid].reflex_edges
        return eid

    def subtree_edges(self, v: int) -> List[int]:
        out, stack = [], [v]
        while stack:
            u = stack.pop()
            for w, cid in self.children.get(u, ()):
                out.append(self.edge_of(cid))
                stack.append(w)
        return out

    def along(self, v: int, eid: int) -> bool:
        """The sub-castle at v is a prism whose reflex edges (if any) run parallel to eid."""
        inf = self.info[v]
        return inf.is_prism and inf.axis in (None, self.e.edges[eid].axis)

    def guard(self, v: int) -> List[int]:
        """Guards for the non-prism sub-castle rooted at v."""
        (c1, k1), (c2, k2) = self.children[v]
        e1, e2 = self.edge_of(k1), self.edge_of(k2)
        p1, p2 = self.info[c1].is_prism, self.info[c2].is_prism
        if not p1 and not p2:
            return self.guard(c1) + self.guard(c2) + [e1]
        if p1 != p2:
            if p2:
                (c1, e1), (c2, e2) = (c2, e2), (c1, e1)
            # c1 is the prism child
            side = guard_monotone(self.subtree_edges(c1) + [e1], self.e) if self.along(c1, e1) else [e1]
            return self.guard(c2) + side
        # both prisms: the one crossing its contact edge is seen whole from that edge
        if self.along(c1, e1) and not self.along(c2, e2):
            (c1, e1), (c2, e2) = (c2, e2), (c1, e1)
        if not self.along(c2, e2):
            return [e1, e2]
        return [e1] + guard_monotone(self.subtree_edges(c2) + [e2], self.e)


def guard_castle(castle: _Castle) -> List[int]:
    if castle.info[castle.root].is_prism:
        raise ValueError("castle is a prism: guard it monotonically")
    return castle.guard(castle.root)


def guard_double_castle(comp: Component, e: EdgeSet, central: Optional[int] = None) -> List[int]:
    if central is None:
        central = find_central_contact(comp)
    if central is None:
        raise ComponentNotDoubleCastle(f"component {comp.nodes} is not a double castle")
    up, down = comp.up_down()
    c = comp.all_contacts[central]
    (ec,) = c.reflex_edges
    ups = {v: [x for x in up[v] if x[1] != central] for v in comp.nodes}
    downs = {v: [x for x in down[v] if x[1] != central] for v in comp.nodes}
    halves = [_Castle(c.upper, ups, comp.all_contacts, e), _Castle(c.lower, downs, comp.all_contacts, e)]
    prism = [h.info[h.root].is_prism for h in halves]
    if not any(prism):
        return guard_castle(halves[0]) + guard_castle(halves[1])
    if prism[0] != prism[1]:
        hp, hn = (halves[0], halves[1]) if prism[0] else (halves[1], halves[0])
        edges = hp.subtree_edges(hp.root)
        return guard_castle(hn) + (guard_monotone(edges, e) if edges else [ec])
    par = [h.along(h.root, ec) for h in halves]
    if all(par):
        return guard_monotone(halves[0].subtree_edges(halves[0].root) + halves[1].subtree_edges(halves[1].root) + [ec], e)
    if any(par):
        hpar = halves[0] if par[0] else halves[1]
        edges = hpar.subtree_edges(hpar.root)
        return [ec] + (guard_monotone(edges, e) if edges else [])
    return [ec]


# ---------------------------------------------------------------------------
# Graph reduction phases
# ---------------------------------------------------------------------------

def resolve_nonprimitive(state: PipelineState, classes: Sequence[ContactClass]) -> None:
    for cid in sorted(state.alive):
        if not classes[cid].primitive:
            state.cut("nonPrimitiveCut", cid)


def spanning_forest(state: PipelineState) -> None:
    """Iterative depth-first search; edges leading to visited nodes are deleted."""
    n = state.graph.n_nodes
    seen = [False] * n
    tree: Set[int] = set()
    for s in range(n):
        if seen[s]:
            continue
        seen[s] = True
        stack = [(s, iter(state.neighbours(s)))]
        while stack:
            v, it = stack[-1]
            for w, cid in it:
                if not seen[w]:
                    seen[w] = True
                    tree.add(cid)
                    stack.append((w, iter(state.neighbours(w))))
                    break
            else:
                stack.pop()
    for cid in sorted(state.alive - tree):
        state.cut("forestCut", cid)


def _bordering_edges(g: BrickGraph, contacts, v: int) -> List[int]:
    return sorted({i for _, cid in g.adjacency[v] for i in contacts[cid].reflex_edges})


def parity_adjust(state: PipelineState, contacts, e: EdgeSet) -> None:
    """Make every tree even: drop one leaf edge from odd trees, guard isolated bricks directly."""
    for comp in state.graph.components(state.alive):
        if len(comp) >= 3 and len(comp) % 2 == 1:
            leaf = min(v for v in comp if len(state.neighbours(v)) == 1)
            (_, cid), = state.neighbours(leaf)
            state.cut("parityCut", cid)
    for comp in state.graph.components(state.alive):
        if len(comp) == 1:
            v = comp[0]
            cands = _bordering_edges(state.graph, contacts, v)
            if not cands:
                raise IsolatedConvexBrick(f"brick {v} borders no contact rectangle")
            # a bordering edge that already carries a guard sees this brick too
            free = [i for i in cands if i not in state.direct_guards]
            if free:
                state.direct_guards.append(min(free, key=lambda i: (e.edges[i].p0, e.edges[i].p1, i)))


def odd_cut_partition(state: PipelineState) -> List[List[int]]:
    """Cut every tree edge whose lower-side subtree has even size; return the pieces."""
    for comp in state.graph.components(state.alive):
        if len(comp) < 2:
            continue
        root = comp[0]
        parent = {root: (None, None)}
        order, stack = [], [root]
        while stack:
            v = stack.pop()
            order.append(v)
            for w, cid in state.neighbours(v):
                if w not in parent:
                    parent[w] = (v, cid)
                    stack.append(w)
        size = {v: 1 for v in comp}
        for v in reversed(order):
            p, cid = parent[v]
            if p is not None:
                size[p] += size[v]
        for v in order:
            p, cid = parent[v]
            if p is not None and size[v] % 2 == 0:
                state.cut("oddCut", cid)
    return [c for c in state.graph.components(state.alive) if len(c) > 1]


# ---------------------------------------------------------------------------
# Pipeline
# ---------------------------------------------------------------------------

def place_guards(p: Polyhedron, mode: str = OPEN, decomposition: Optional[Decomposition] = None) -> GuardSet:
    if mode not in MODES:
        raise ValueError(f"mode must be one of {MODES}")
    if decomposition is None:
        report = validate(p)
        if not report.ok:
            raise InvalidPolyhedron("; ".join(f"{v.code}: {v.message}" for v in report.violations))
        decomposition = decompose(p)
    d = decomposition
    e = d.edges
    classes = classify_all(d.bricks, d.contacts)
    cert = Certificate(e.r, graph_genus(d.graph), count_collars(classes), e.m)
    if e.r == 0:
        return GuardSet([], mode, cert, "Convex", d)

    state = PipelineState(d.graph, set(range(len(d.contacts))))
    resolve_nonprimitive(state, classes)
    spanning_forest(state)
    parity_adjust(state, d.contacts, e)
    pieces = odd_cut_partition(state)

    guards = list(state.direct_guards)
    for nodes in pieces:
        kept = sorted({cid for v in nodes for _, cid in state.neighbours(v)})
        comp = Component(nodes, kept, d.bricks, d.contacts)
        guards.extend(guard_double_castle(comp, e))
    out = sorted(set(guards), key=lambda i: (e.edges[i].p0, e.edges[i].p1, i))
    if len(out) != len(guards):
        raise AssertionError("guard placed twice")
    return GuardSet(out, mode, cert, "Guarded", d)
