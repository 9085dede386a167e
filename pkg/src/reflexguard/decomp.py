"""Brick partition, contact rectangles, contact lines and the brick graph.

Inputs are expected in normalised orientation: no vertical reflex edges,
so every horizontal cross-section of the solid is a set of disjoint
rectangles and bricks only touch along horizontal faces.
"""

from __future__ import annotations

import heapq
from bisect import bisect_left, insort
from collections import defaultdict
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Optional, Sequence, Set, Tuple

import numpy as np
from scipy import ndimage

from .model import (
    X,
    Y,
    Z,
    AdjacencyTables,
    EdgeSet,
    InvalidPolyhedron,
    Point3,
    Polyhedron,
)


class BrickNotBox(InvalidPolyhedron):
    pass


@dataclass(frozen=True)
class Brick:
    lo: Point3
    hi: Point3

    @property
    def volume(self) -> int:
        return (self.hi[0] - self.lo[0]) * (self.hi[1] - self.lo[1]) * (self.hi[2] - self.lo[2])

    @property
    def footprint(self) -> Tuple[int, int, int, int]:
        return (self.lo[0], self.hi[0], self.lo[1], self.hi[1])


@dataclass(frozen=True)
class ContactRectangle:
    z: int
    x0: int
    x1: int
    y0: int
    y1: int
    lower: int
    upper: int
    reflex_edges: Tuple[int, ...] = ()

    @property
    def rect(self) -> Tuple[int, int, int, int]:
        return (self.x0, self.x1, self.y0, self.y1)


@dataclass
class BrickGraph:
    n_nodes: int
    edges: List[Tuple[int, int]]  # contact id -> (lower brick, upper brick)
    adjacency: List[List[Tuple[int, int]]] = field(default_factory=list)  # node -> [(neighbour, contact id)]

    def __post_init__(self):
        if not self.adjacency:
            self.adjacency = [[] for _ in range(self.n_nodes)]
            for cid, (a, b) in enumerate(self.edges):
                self.adjacency[a].append((b, cid))
                self.adjacency[b].append((a, cid))
            for lst in self.adjacency:
                lst.sort()

    def degree(self, node: int) -> int:
        return len(self.adjacency[node])

    def components(self, alive: Optional[Set[int]] = None) -> List[List[int]]:
        """Connected components over the contacts in `alive` (all when None)."""
        seen = [False] * self.n_nodes
        comps = []
        for s in range(self.n_nodes):
            if seen[s]:
                continue
            seen[s] = True
            stack, comp = [s], []
            while stack:
                u = stack.pop()
                comp.append(u)
                for v, cid in self.adjacency[u]:
                    if (alive is None or cid in alive) and not seen[v]:
                        seen[v] = True
                        stack.append(v)
            comps.append(sorted(comp))
        return comps


# ---------------------------------------------------------------------------
# Bricks and contact rectangles by a vertical sweep over horizontal faces
# ---------------------------------------------------------------------------

def _horizontal_faces(p: Polyhedron) -> Dict[int, List[Tuple[int, List[List[Tuple[int, int]]]]]]:
    out = defaultdict(list)
    for face, plane in zip(p.faces, p.planes):
        if plane.axis == Z:
            loops = [[(q[0], q[1]) for q in p.loop_points(loop)] for loop in face.loops]
            out[plane.offset].append((plane.sign, loops))
    return out


def _parity_mask(loops: Iterable[List[Tuple[int, int]]], xi, yi, nx, ny) -> np.ndarray:
    """Cells of the compressed grid enclosed by the loops (even-odd rule)."""
    d = np.zeros((nx, ny - 1), dtype=np.int8)
    for loop in loops:
        for a, b in zip(loop, loop[1:] + loop[:1]):
            if a[0] == b[0]:
                j0, j1 = sorted((yi[a[1]], yi[b[1]]))
                d[xi[a[0]], j0:j1] ^= 1
    return (np.cumsum(d, axis=0) % 2)[: nx - 1].astype(bool)


def extract_bricks_and_contacts(
    p: Polyhedron,
    adj: AdjacencyTables,
    e: EdgeSet,
    contact_lines: Optional[Sequence["ContactLine"]] = None,
) -> Tuple[List[Brick], List[ContactRectangle]]:
    """Maximal cuboid partition and the contact rectangles between bricks.

    The cross-section is swept upward level by level.  At each level only the
    rectangles touching a horizontal face at that level can change; they are
    recomputed on a small compressed grid and matched against the old ones.
    """
    if any(ed.reflex and ed.axis == Z for ed in e.edges):
        raise InvalidPolyhedron("vertical reflex edge: normalise orientation first")
    hfaces = _horizontal_faces(p)
    # brick records: [x0, x1, y0, y1, zbottom, ztop]
    recs: List[List[int]] = []
    active: Dict[int, Tuple[int, int, int, int]] = {}
    raw_contacts: List[Tuple[int, int, int, int, int, int, int]] = []

    for z in sorted(hfaces):
        fl = hfaces[z]
        fb = np.array([[min(q[0] for q in lp[0]), max(q[0] for q in lp[0]),
                        min(q[1] for q in lp[0]), max(q[1] for q in lp[0])] for _, lp in fl])
        if active:
            ids = list(active)
            ar = np.array([active[i] for i in ids])
            hit = ((ar[:, None, 0] <= fb[None, :, 1]) & (fb[None, :, 0] <= ar[:, None, 1])
                   & (ar[:, None, 2] <= fb[None, :, 3]) & (fb[None, :, 2] <= ar[:, None, 3])).any(axis=1)
            changed = [ids[k] for k in np.nonzero(hit)[0]]
        else:
            changed = []

        xs = sorted({c for i in changed for c in active[i][:2]} | {q[0] for _, lps in fl for lp in lps for q in lp})
        ys = sorted({c for i in changed for c in active[i][2:]} | {q[1] for _, lps in fl for lp in lps for q in lp})
        xi = {c: k for k, c in enumerate(xs)}
        yi = {c: k for k, c in enumerate(ys)}
        nx, ny = len(xs), len(ys)

        below = np.zeros((nx - 1, ny - 1), dtype=np.int64)
        for i in changed:
            x0, x1, y0, y1 = active[i]
            below[xi[x0]:xi[x1], yi[y0]:yi[y1]] = i + 1
        tops = _parity_mask((lp for s, lps in fl if s > 0 for lp in lps), xi, yi, nx, ny)
        bottoms = _parity_mask((lp for s, lps in fl if s < 0 for lp in lps), xi, yi, nx, ny)
        solid_below = below > 0
        if (tops & ~solid_below).any() or (bottoms & solid_below).any():
            raise InvalidPolyhedron(f"inconsistent horizontal faces at z={z}")
        above = (solid_below & ~tops) | bottoms

        labels, count = ndimage.label(above)
        new_ids = np.zeros_like(below)
        continued = set()
        for k, sl in enumerate(ndimage.find_objects(labels), start=1):
            sx, sy = sl
            if not (labels[sx, sy] == k).all():
                raise BrickNotBox(f"cross-section component above z={z} is not a rectangle")
            rect = (xs[sx.start], xs[sx.stop], ys[sy.start], ys[sy.stop])
            same = [i for i in changed if active[i] == rect]
            if same:
                continued.add(same[0])
                new_ids[sx, sy] = same[0] + 1
                continue
            rid = len(recs)
            recs.append([rect[0], rect[1], rect[2], rect[3], z, z])
            new_ids[sx, sy] = rid + 1

        ended = [i for i in changed if i not in continued]
        for i in ended:
            recs[i][5] = z
            del active[i]
        both = (below > 0) & (new_ids > 0) & (below != new_ids)
        if both.any():
            pairs = np.unique(np.stack([below[both], new_ids[both]], axis=1), axis=0)
            for lo_id, up_id in pairs:
                a, b = recs[lo_id - 1], recs[up_id - 1]
                raw_contacts.append((z, max(a[0], b[0]), min(a[1], b[1]), max(a[2], b[2]), min(a[3], b[3]),
                                     int(lo_id - 1), int(up_id - 1)))
        for rid in np.unique(new_ids[new_ids > 0]):
            rid = int(rid) - 1
            if rid not in active:
                r = recs[rid]
                active[rid] = (r[0], r[1], r[2], r[3])
    if active:
        raise InvalidPolyhedron("solid is not closed from above")

    bricks = [Brick((r[0], r[2], r[4]), (r[1], r[3], r[5])) for r in recs]
    contacts = _attach_reflex_edges(raw_contacts, e)
    if contact_lines is not None:
        check_contact_sides(contacts, e, contact_lines)
    return bricks, contacts


def _attach_reflex_edges(raw, e: EdgeSet) -> List[ContactRectangle]:
    sides: Dict[tuple, List[int]] = defaultdict(list)
    for k, (z, x0, x1, y0, y1, _, _) in enumerate(raw):
        sides[(X, z, y0)].append(k)
        sides[(X, z, y1)].append(k)
        sides[(Y, z, x0)].append(k)
        sides[(Y, z, x1)].append(k)
    owned: Dict[int, List[int]] = defaultdict(list)
    for eid, ed in enumerate(e.edges):
        if not ed.reflex:
            continue
        z = ed.p0[2]
        if ed.axis == X:
            key, lo, hi = (X, z, ed.p0[1]), 0, 1
        else:
            key, lo, hi = (Y, z, ed.p0[0]), 2, 3
        hits = [k for k in sides.get(key, ())
                if raw[k][1 + lo] <= ed.p0[ed.axis] and ed.p1[ed.axis] <= raw[k][1 + hi]]
        if len(hits) != 1:
            raise InvalidPolyhedron(f"reflex edge {ed.p0}-{ed.p1} borders {len(hits)} contact rectangles")
        owned[hits[0]].append(eid)
    out = []
    for k, (z, x0, x1, y0, y1, lo_id, up_id) in enumerate(raw):
        if not owned[k]:
            raise InvalidPolyhedron(f"contact rectangle at z={z} has no reflex edge (bricks not maximal)")
        out.append(ContactRectangle(z, x0, x1, y0, y1, lo_id, up_id, tuple(sorted(owned[k]))))
    return out


def build_brick_graph(bricks: Sequence[Brick], contacts: Sequence[ContactRectangle]) -> BrickGraph:
    return BrickGraph(len(bricks), [(c.lower, c.upper) for c in contacts])


def graph_genus(g: BrickGraph, alive: Optional[Set[int]] = None) -> int:
    """Cycle rank: independent cycles of the brick graph."""
    n_edges = len(g.edges) if alive is None else len(alive)
    return n_edges - g.n_nodes + len(g.components(alive))


# ---------------------------------------------------------------------------
# Contact lines on vertical faces
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ContactLine:
    a: Point3
    b: Point3
    origin: Point3
    kind: str  # "reflex_vertex", "dummy" or "extension"

    @property
    def key(self) -> Tuple[Point3, Point3]:
        return (min(self.a, self.b), max(self.a, self.b))


class _FaceFrame:
    """A vertical face flattened to (h, z) with its vertical boundary edges."""

    def __init__(self, p: Polyhedron, fi: int, adj: AdjacencyTables):
        plane = p.planes[fi]
        self.plane = plane
        self.h = Y if plane.axis == X else X
        self.vertical = []  # (h, zlo, zhi) of atomic vertical segments
        self.horizontal = []  # (z, hlo, hhi)
        self.points: Set[Tuple[int, int]] = set()
        for (a, b), f in adj.segment_face.items():
            if f != fi:
                continue
            pa, pb = (a[self.h], a[Z]), (b[self.h], b[Z])
            self.points.add(pa)
            self.points.add(pb)
            if pa[0] == pb[0]:
                self.vertical.append((pa[0], min(pa[1], pb[1]), max(pa[1], pb[1])))
            else:
                self.horizontal.append((pa[1], min(pa[0], pb[0]), max(pa[0], pb[0])))
        self.vertical.sort(key=lambda t: (-t[2], t[0]))

    def lift(self, h: int, z: int) -> Point3:
        q = [0, 0, 0]
        q[self.plane.axis] = self.plane.offset
        q[self.h] = h
        q[Z] = z
        return tuple(q)

    def is_reflex_corner(self, h: int, z: int) -> bool:
        quads = [self._inside(h, d, z, up) for d in (1, -1) for up in (True, False)]
        return sum(quads) == 3

    def _inside(self, h: int, d: int, z: int, up: bool, status=None) -> bool:
        edges = status if status is not None else self.vertical
        count = 0
        for eh, zlo, zhi in edges:
            if not (zlo <= z < zhi if up else zlo < z <= zhi):
                continue
            if (eh <= h) if d > 0 else (eh < h):
                count += 1
        return count % 2 == 1

    def shoot(self, queries: Sequence[Tuple[int, int]], reflex_spans) -> List[Tuple[Tuple[int, int], Tuple[int, int], Tuple[int, int]]]:
        """Sweep top-down, drawing horizontal lines from each query point into the face.

        Returns (origin, end, end) triples as (h, z) pairs; reflex_spans maps a
        height to the (hlo, hhi) spans of reflex edges lying on this face's boundary.
        """
        out = []
        pending = list(self.vertical)  # sorted by upper z, descending
        status: List[Tuple[int, int, int]] = []
        expiry: List[Tuple[int, Tuple[int, int, int]]] = []
        k = 0
        for h, z in sorted(set(queries), key=lambda q: (-q[1], q[0])):
            while k < len(pending) and pending[k][2] >= z:
                insort(status, pending[k])
                heapq.heappush(expiry, (-pending[k][1], pending[k]))
                k += 1
            while expiry and -expiry[0][0] > z:
                _, edge = heapq.heappop(expiry)
                del status[bisect_left(status, edge)]
            for d in (1, -1):
                up = self._inside(h, d, z, True, status)
                down = self._inside(h, d, z, False, status)
                if up and down:
                    hits = [eh for eh, zlo, zhi in status if (eh - h) * d > 0]
                    end = min(hits) if d > 0 else max(hits)
                    out.append(((h, z), (end, z)))
                elif up != down:
                    for lo, hi in reflex_spans.get(z, ()):
                        if d > 0 and lo <= h < hi:
                            out.append(((h, z), (hi, z)))
                        elif d < 0 and lo < h <= hi:
                            out.append(((h, z), (lo, z)))
        return out


def _reflex_spans(frame: _FaceFrame, e: EdgeSet) -> Dict[int, List[Tuple[int, int]]]:
    spans = defaultdict(list)
    ax = frame.plane.axis
    for ed in e.edges:
        if ed.reflex and ed.axis == frame.h and ed.p0[ax] == frame.plane.offset:
            spans[ed.p0[Z]].append((ed.p0[frame.h], ed.p1[frame.h]))
    return spans


def _on_reflex_edge(q: Point3, e: EdgeSet) -> bool:
    return any(ed.reflex and ed.contains_segment(q, q) for ed in e.edges)


def sweep_face(
    p: Polyhedron,
    fi: int,
    adj: AdjacencyTables,
    e: EdgeSet,
    extra: Iterable[Point3] = (),
) -> Tuple[List[ContactLine], List[Point3]]:
    """Contact lines of one vertical face and the dummy vertices they create.

    Lines start at vertices that are reflex in the face, at vertices lying on
    a reflex edge of the polyhedron, and at the `extra` (dummy) points.
    """
    frame = _FaceFrame(p, fi, adj)
    if frame.plane.axis == Z:
        raise ValueError("sweep_face expects a vertical face")
    spans = _reflex_spans(frame, e)
    reflex_pts = {q for ed in e.edges if ed.reflex for q in (ed.p0, ed.p1)}
    starts = {}
    for h, z in frame.points:
        q = frame.lift(h, z)
        if frame.is_reflex_corner(h, z) or q in reflex_pts or _on_reflex_edge(q, e):
            starts[(h, z)] = "reflex_vertex"
    for q in extra:
        starts.setdefault((q[frame.h], q[Z]), "dummy")
    lines: Dict[Tuple[Point3, Point3], ContactLine] = {}
    dummies = []
    for (h, z), end in frame.shoot(list(starts), spans):
        a, b = frame.lift(h, z), frame.lift(*end)
        ln = ContactLine(a, b, a, starts[(h, z)])
        lines.setdefault(ln.key, ln)  # a line reached from both ends is drawn once
        if end not in frame.points and b not in dummies:
            dummies.append(b)
    return list(lines.values()), dummies


def extend_contact_line(
    p: Polyhedron, w: Point3, fj: int, adj: AdjacencyTables, e: EdgeSet
) -> Optional[Tuple[ContactLine, Optional[Point3]]]:
    """Single extension of a contact line into face fj at dummy vertex w (never recursive)."""
    frame = _FaceFrame(p, fj, adj)
    res = frame.shoot([(w[frame.h], w[Z])], {})
    if not res:
        return None
    (h, z), end = res[0]
    b = frame.lift(*end)
    return ContactLine(w, b, w, "extension"), (None if end in frame.points else b)


def _face_of_dummy(w: Point3, fi: int, adj: AdjacencyTables, frame_cache) -> Optional[int]:
    """The other face sharing the vertical boundary edge on which w lies."""
    for (a, b), f in adj.segment_face.items():
        if f != fi or a[Z] == b[Z]:
            continue
        if all(a[k] == w[k] for k in (X, Y)) and min(a[Z], b[Z]) < w[Z] < max(a[Z], b[Z]):
            return adj.segment_face[(b, a)]
    return None


def contact_lines(p: Polyhedron, adj: AdjacencyTables, e: EdgeSet, order: Optional[Sequence[int]] = None) -> List[ContactLine]:
    """All contact lines: per-face sweeps followed by the extension closure.

    The result is a set (sorted for determinism) and does not depend on the
    order in which faces are swept.
    """
    vertical = [fi for fi, pl in enumerate(p.planes) if pl.axis != Z]
    if order is not None:
        vertical = [fi for fi in order if p.planes[fi].axis != Z]
    found: Dict[Tuple[Point3, Point3], ContactLine] = {}
    work = []
    for fi in vertical:
        lines, dummies = sweep_face(p, fi, adj, e)
        for ln in lines:
            found.setdefault(ln.key, ln)
        work.extend((w, fi) for w in dummies)
    done = set()
    while work:
        w, fi = work.pop()
        fj = _face_of_dummy(w, fi, adj, None)
        if fj is None or (w, fj) in done:
            continue
        done.add((w, fj))
        res = extend_contact_line(p, w, fj, adj, e)
        if res is None:
            continue
        ln, dummy = res
        if ln.a != ln.b:
            found.setdefault(ln.key, ln)
        if dummy is not None:
            work.append((dummy, fj))
    return sorted((ln for ln in found.values() if ln.a != ln.b), key=lambda ln: ln.key)


def check_contact_sides(contacts: Sequence[ContactRectangle], e: EdgeSet, lines: Sequence[ContactLine]) -> None:
    """Every side of every contact rectangle lies on a reflex edge or on a contact line."""
    spans = defaultdict(list)
    for ln in lines:
        a, b = ln.key
        axis = X if a[X] != b[X] else Y
        spans[(axis, a[Z], a[1 - axis])].append((a[axis], b[axis]))
    for eid in {i for c in contacts for i in c.reflex_edges}:
        ed = e.edges[eid]
        spans[(ed.axis, ed.p0[Z], ed.p0[1 - ed.axis])].append((ed.p0[ed.axis], ed.p1[ed.axis]))
    for c in contacts:
        for axis, fixed, lo, hi in ((X, c.y0, c.x0, c.x1), (X, c.y1, c.x0, c.x1), (Y, c.x0, c.y0, c.y1), (Y, c.x1, c.y0, c.y1)):
            if not _covered(lo, hi, spans.get((axis, c.z, fixed), [])):
                raise InvalidPolyhedron(f"contact side at z={c.z} not covered by edges or contact lines")


def _covered(lo: int, hi: int, spans: List[Tuple[int, int]]) -> bool:
    reach = lo
    for a, b in sorted(spans):
        if a > reach:
            break
        reach = max(reach, b)
    return reach >= hi


# ---------------------------------------------------------------------------
# Whole-polyhedron convenience
# ---------------------------------------------------------------------------

@dataclass
class Decomposition:
    polyhedron: Polyhedron  # normalised
    rotation: Tuple[int, int, int]
    adjacency: AdjacencyTables
    edges: EdgeSet
    bricks: List[Brick]
    contacts: List[ContactRectangle]
    graph: BrickGraph

    def bricks_in_input_frame(self) -> List[Brick]:
        from .model import inverse_rotation, rotate_point

        inv = inverse_rotation(self.rotation)
        return [Brick(rotate_point(b.lo, inv), rotate_point(b.hi, inv)) for b in self.bricks]

    def edge_in_input_frame(self, eid: int) -> Tuple[Point3, Point3]:
        from .model import inverse_rotation, rotate_point

        inv = inverse_rotation(self.rotation)
        ed = self.edges.edges[eid]
        return tuple(sorted((rotate_point(ed.p0, inv), rotate_point(ed.p1, inv))))


def decompose(p: Polyhedron) -> Decomposition:
    from .model import build_adjacency, classify_edges, normalize_orientation

    adj = build_adjacency(p)
    e = classify_edges(p, adj)
    q, rot = normalize_orientation(p, e)
    if q is not p:
        adj = build_adjacency(q)
        e = classify_edges(q, adj)
    bricks, contacts = extract_bricks_and_contacts(q, adj, e)
    return Decomposition(q, rot, adj, e, bricks, contacts, build_brick_graph(bricks, contacts))
