"""Boundary representation of orthogonal polyhedra.

A polyhedron is a vertex array plus a face array; every face is a list of
loops of vertex indices (outer loop counterclockwise seen from the outward
normal, holes clockwise).  Everything here is exact integer arithmetic.
"""

from __future__ import annotations

import bisect
from collections import defaultdict
from dataclasses import dataclass, field
from functools import cached_property
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

Point3 = Tuple[int, int, int]
Segment = Tuple[Point3, Point3]

X, Y, Z = 0, 1, 2
AXIS_NAMES = "XYZ"

# in-plane (u, v) axes for a face perpendicular to each axis, with u x v = +axis
PLANE_AXES = {X: (Y, Z), Y: (Z, X), Z: (X, Y)}


class OrpSyntaxError(ValueError):
    def __init__(self, message: str, line: int, column: int = 1):
        super().__init__(f"line {line}, column {column}: {message}")
        self.line = line
        self.column = column


class NonManifoldError(ValueError):
    pass


class ThreeReflexDirections(ValueError):
    pass


class InvalidPolyhedron(ValueError):
    pass


@dataclass(frozen=True)
class Face:
    loops: Tuple[Tuple[int, ...], ...]

    @property
    def outer(self) -> Tuple[int, ...]:
        return self.loops[0]

    @property
    def holes(self) -> Tuple[Tuple[int, ...], ...]:
        return self.loops[1:]


@dataclass(frozen=True)
class Plane:
    """Supporting plane of a face together with the side its outward normal points to."""

    axis: int
    offset: int
    sign: int

    @property
    def normal(self) -> Point3:
        n = [0, 0, 0]
        n[self.axis] = self.sign
        return tuple(n)


@dataclass(frozen=True)
class Polyhedron:
    vertices: Tuple[Point3, ...]
    faces: Tuple[Face, ...]

    @property
    def n(self) -> int:
        return len(self.vertices)

    def loop_points(self, loop: Sequence[int]) -> List[Point3]:
        return [self.vertices[i] for i in loop]

    @cached_property
    def planes(self) -> Tuple[Optional[Plane], ...]:
        return tuple(face_plane(self, f) for f in self.faces)

    def bounds(self) -> Tuple[Point3, Point3]:
        lo = tuple(min(v[k] for v in self.vertices) for k in range(3))
        hi = tuple(max(v[k] for v in self.vertices) for k in range(3))
        return lo, hi


def loop_area2(points: Sequence[Point3], axis: int) -> int:
    """Twice the signed area of a planar loop, measured against the +axis normal."""
    u, v = PLANE_AXES[axis]
    s = 0
    for i, p in enumerate(points):
        q = points[(i + 1) % len(points)]
        s += p[u] * q[v] - q[u] * p[v]
    return s


def face_plane(p: Polyhedron, face: Face) -> Optional[Plane]:
    """Plane of an axis-aligned face, or None when the face is not planar/axis-aligned."""
    pts = [p.vertices[i] for loop in face.loops for i in loop]
    if not pts:
        return None
    for axis in range(3):
        c = pts[0][axis]
        if all(q[axis] == c for q in pts):
            area = loop_area2(p.loop_points(face.outer), axis)
            if area == 0:
                return None
            return Plane(axis, c, 1 if area > 0 else -1)
    return None


def signed_volume(p: Polyhedron) -> int:
    """Volume by the divergence theorem with the field (x, y, z); positive for outward input."""
    twice = 0
    for face, plane in zip(p.faces, p.planes):
        if plane is None:
            continue
        area2 = sum(loop_area2(p.loop_points(loop), plane.axis) for loop in face.loops)
        twice += plane.offset * area2
    return twice // 6  # each axis contributes the volume once


# ---------------------------------------------------------------------------
# ORP text format
# ---------------------------------------------------------------------------

def parse_orp(text: str) -> Polyhedron:
    lines = [
        (no, raw.strip())
        for no, raw in enumerate(text.splitlines(), start=1)
        if raw.strip() and not raw.lstrip().startswith("#")
    ]
    pos = 0

    def take() -> Tuple[int, List[str]]:
        nonlocal pos
        if pos >= len(lines):
            last = lines[-1][0] if lines else 1
            raise OrpSyntaxError("unexpected end of document", last + 1)
        no, content = lines[pos]
        pos += 1
        return no, content.split(" ")

    def integer(tok: str, no: int, col: int, what: str) -> int:
        try:
            return int(tok)
        except ValueError:
            raise OrpSyntaxError(f"expected integer {what}, got {tok!r}", no, col) from None

    def column(tokens: List[str], k: int) -> int:
        return sum(len(t) + 1 for t in tokens[:k]) + 1

    no, tok = take()
    if tok != ["ORP", "1"]:
        raise OrpSyntaxError("header must be 'ORP 1'", no)

    no, tok = take()
    if len(tok) != 2 or tok[0] != "vertices":
        raise OrpSyntaxError("expected 'vertices N'", no)
    nv = integer(tok[1], no, column(tok, 1), "vertex count")
    vertices = []
    for _ in range(nv):
        no, tok = take()
        if len(tok) != 3:
            raise OrpSyntaxError("vertex line needs three coordinates", no)
        vertices.append(tuple(integer(t, no, column(tok, k), "coordinate") for k, t in enumerate(tok)))

    no, tok = take()
    if len(tok) != 2 or tok[0] != "faces":
        raise OrpSyntaxError("expected 'faces F'", no)
    nf = integer(tok[1], no, column(tok, 1), "face count")
    faces = []
    for _ in range(nf):
        no, tok = take()
        if len(tok) != 2 or tok[0] != "face":
            raise OrpSyntaxError("expected 'face L'", no)
        nl = integer(tok[1], no, column(tok, 1), "loop count")
        if nl < 1:
            raise OrpSyntaxError("a face needs at least one loop", no, column(tok, 1))
        loops = []
        for _ in range(nl):
            no, tok = take()
            if len(tok) < 2 or tok[0] != "loop":
                raise OrpSyntaxError("expected 'loop k i1 ... ik'", no)
            k = integer(tok[1], no, column(tok, 1), "loop length")
            if len(tok) != k + 2:
                raise OrpSyntaxError(f"loop declares {k} indices but has {len(tok) - 2}", no)
            idx = []
            for j, t in enumerate(tok[2:], start=2):
                i = integer(t, no, column(tok, j), "vertex index")
                if not 0 <= i < nv:
                    raise OrpSyntaxError(f"vertex index {i} out of range (0..{nv - 1})", no, column(tok, j))
                idx.append(i)
            loops.append(tuple(idx))
        faces.append(Face(tuple(loops)))
    if pos != len(lines):
        raise OrpSyntaxError("trailing content after last face", lines[pos][0])
    return Polyhedron(tuple(vertices), tuple(faces))


def format_orp(p: Polyhedron) -> str:
    out = ["ORP 1", f"vertices {len(p.vertices)}"]
    out += [f"{x} {y} {z}" for x, y, z in p.vertices]
    out.append(f"faces {len(p.faces)}")
    for face in p.faces:
        out.append(f"face {len(face.loops)}")
        for loop in face.loops:
            out.append(f"loop {len(loop)} " + " ".join(str(i) for i in loop))
    return "\n".join(out) + "\n"


# ---------------------------------------------------------------------------
# Adjacency
# ---------------------------------------------------------------------------

def _axis_of(a: Point3, b: Point3) -> Optional[int]:
    diff = [k for k in range(3) if a[k] != b[k]]
    return diff[0] if len(diff) == 1 else None


def _line_key(a: Point3, axis: int) -> Tuple[int, int, int]:
    return (axis,) + tuple(a[k] for k in range(3) if k != axis)


@dataclass
class AdjacencyTables:
    """Surface navigation tables over atomic edge segments.

    Face edges are split at every polyhedron vertex lying on them, so a
    degenerate vertex in the middle of a neighbour's edge yields two segments.
    """

    vertex_faces: Dict[Point3, List[int]]
    segment_face: Dict[Segment, int]
    twin: Dict[Segment, Segment]
    # polyhedron vertices on each axis-parallel line, sorted along the line
    line_points: Dict[Tuple[int, int, int], List[int]] = field(repr=False)

    @property
    def segments(self) -> List[Segment]:
        return list(self.segment_face)


def _points_on_lines(points: Iterable[Point3]) -> Dict[Tuple[int, int, int], List[int]]:
    lines: Dict[Tuple[int, int, int], set] = defaultdict(set)
    for q in points:
        for axis in range(3):
            lines[_line_key(q, axis)].add(q[axis])
    return {k: sorted(v) for k, v in lines.items()}


def split_loop_edges(p: Polyhedron, loop: Sequence[int], line_points) -> List[Segment]:
    pts = p.loop_points(loop)
    out = []
    for i, a in enumerate(pts):
        b = pts[(i + 1) % len(pts)]
        axis = _axis_of(a, b)
        if axis is None:
            raise InvalidPolyhedron(f"loop edge {a}->{b} is not axis-parallel")
        coords = line_points[_line_key(a, axis)]
        lo, hi = sorted((a[axis], b[axis]))
        inner = coords[bisect.bisect_right(coords, lo): bisect.bisect_left(coords, hi)]
        if a[axis] > b[axis]:
            inner = inner[::-1]
        chain = [a]
        for c in inner:
            q = list(a)
            q[axis] = c
            chain.append(tuple(q))
        chain.append(b)
        out.extend(zip(chain, chain[1:]))
    return out


def _directed_segments(p: Polyhedron):
    """Yield (segment, face index) for every atomic directed segment; may raise InvalidPolyhedron."""
    line_points = _points_on_lines(p.vertices)
    for fi, face in enumerate(p.faces):
        for loop in face.loops:
            for seg in split_loop_edges(p, loop, line_points):
                yield seg, fi


def build_adjacency(p: Polyhedron) -> AdjacencyTables:
    segment_face: Dict[Segment, int] = {}
    vertex_faces: Dict[Point3, List[int]] = defaultdict(list)
    for seg, fi in _directed_segments(p):
        if seg in segment_face:
            raise NonManifoldError(f"segment {seg[0]}->{seg[1]} used by faces {segment_face[seg]} and {fi}")
        segment_face[seg] = fi
        for q in seg:
            if fi not in vertex_faces[q]:
                vertex_faces[q].append(fi)
    twin = {}
    for a, b in segment_face:
        if (b, a) not in segment_face:
            raise NonManifoldError(f"segment {a}->{b} has no twin")
        twin[(a, b)] = (b, a)
    return AdjacencyTables(dict(vertex_faces), segment_face, twin, _points_on_lines(p.vertices))


# ---------------------------------------------------------------------------
# Validation
# ---------------------------------------------------------------------------

@dataclass
class Violation:
    code: str
    location: str
    message: str


@dataclass
class ValidationReport:
    violations: List[Violation] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def add(self, code: str, location: str, message: str) -> None:
        self.violations.append(Violation(code, location, message))


def _check_loop(pts: List[Point3]) -> Optional[str]:
    if len(pts) < 4:
        return "loop has fewer than four vertices"
    axes = []
    for i, a in enumerate(pts):
        b = pts[(i + 1) % len(pts)]
        axis = _axis_of(a, b)
        if axis is None:
            return f"edge {a}->{b} is not axis-parallel"
        axes.append(axis)
    for i, axis in enumerate(axes):
        if axis == axes[(i + 1) % len(axes)]:
            return f"consecutive collinear edges at {pts[(i + 1) % len(pts)]}"
    return None


def validate(p: Polyhedron) -> ValidationReport:
    rep = ValidationReport()
    if not p.faces:
        rep.add("empty", "document", "no faces")
        return rep
    for fi, face in enumerate(p.faces):
        plane = p.planes[fi]
        if plane is None:
            rep.add("face-plane", f"face {fi}", "face is not planar and axis-aligned")
            continue
        for li, loop in enumerate(face.loops):
            msg = _check_loop(p.loop_points(loop))
            if msg:
                rep.add("loop-shape", f"face {fi} loop {li}", msg)
                continue
            area = loop_area2(p.loop_points(loop), plane.axis) * plane.sign
            if li > 0 and area >= 0:
                rep.add("loop-orientation", f"face {fi} loop {li}", "hole must be clockwise")
    if not rep.ok:
        return rep

    seen: Dict[Segment, int] = {}
    for seg, fi in _directed_segments(p):
        if seg in seen:
            rep.add("non-manifold", f"faces {seen[seg]},{fi}", f"segment {seg[0]}->{seg[1]} traversed twice in the same direction")
        seen[seg] = fi
    for (a, b), fi in seen.items():
        if (b, a) not in seen:
            rep.add("open", f"face {fi}", f"open surface: unmatched edge segment {a}->{b}")
    if not rep.ok:
        return rep

    for (a, b), fi in seen.items():
        pa, pb = p.planes[fi], p.planes[seen[(b, a)]]
        if pa.axis == pb.axis and pa.sign != pb.sign:
            rep.add("fold", f"faces {fi},{seen[(b, a)]}", f"zero-thickness fold along {a}->{b}")

    # connectivity over faces through shared segments
    parent = list(range(len(p.faces)))

    def find(i: int) -> int:
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for (a, b), fi in seen.items():
        ra, rb = find(fi), find(seen[(b, a)])
        if ra != rb:
            parent[ra] = rb
    if len({find(i) for i in range(len(p.faces))}) > 1:
        rep.add("disconnected", "document", "not connected")
        return rep

    if signed_volume(p) <= 0:
        rep.add("orientation", "document", "faces are oriented inward (non-positive volume)")
    return rep


# ---------------------------------------------------------------------------
# Edges
# ---------------------------------------------------------------------------

def _cross(a: Point3, b: Point3) -> Point3:
    return (a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0])


@dataclass(frozen=True)
class Edge:
    p0: Point3
    p1: Point3
    axis: int
    reflex: bool
    planes: Tuple[Plane, Plane]

    @property
    def length(self) -> int:
        return self.p1[self.axis] - self.p0[self.axis]

    def contains_segment(self, a: Point3, b: Point3) -> bool:
        return _line_key(a, self.axis) == _line_key(self.p0, self.axis) and self.p0[self.axis] <= min(a[self.axis], b[self.axis]) and max(a[self.axis], b[self.axis]) <= self.p1[self.axis]


@dataclass
class EdgeSet:
    edges: List[Edge]

    @property
    def m(self) -> int:
        return len(self.edges)

    @property
    def r(self) -> int:
        return sum(e.reflex for e in self.edges)

    @property
    def reflex_axes(self) -> frozenset:
        return frozenset(e.axis for e in self.edges if e.reflex)

    def reflex_ids(self) -> List[int]:
        return [i for i, e in enumerate(self.edges) if e.reflex]


def classify_edges(p: Polyhedron, adj: AdjacencyTables) -> EdgeSet:
    """Merge atomic segments into maximal edges and label them convex or reflex."""
    groups: Dict[tuple, List[Tuple[int, int]]] = defaultdict(list)
    info = {}
    for (a, b), fa in adj.segment_face.items():
        if a > b:
            continue
        fb = adj.segment_face[(b, a)]
        pa, pb = p.planes[fa], p.planes[fb]
        if pa.axis == pb.axis:
            continue  # flat seam between coplanar faces
        axis = _axis_of(a, b)
        d = [0, 0, 0]
        d[axis] = 1  # a < b along the axis
        inward = _cross(pa.normal, tuple(d))  # points into face A, away from the edge
        reflex = pb.normal == inward
        # the same plane pair can meet along one line both convexly and reflexly
        key = (_line_key(a, axis), frozenset((pa, pb)), reflex)
        groups[key].append((a[axis], b[axis]))
        info[key] = (axis, reflex, tuple(sorted((pa, pb), key=lambda q: (q.axis, q.offset, q.sign))))
    edges = []
    for key, spans in groups.items():
        axis, reflex, planes = info[key]
        line = key[0]
        spans.sort()
        runs = [list(spans[0])]
        for lo, hi in spans[1:]:
            if lo == runs[-1][1]:
                runs[-1][1] = hi
            else:
                runs.append([lo, hi])
        for lo, hi in runs:
            p0 = [0, 0, 0]
            others = [k for k in range(3) if k != axis]
            p0[others[0]], p0[others[1]] = line[1], line[2]
            p1 = list(p0)
            p0[axis], p1[axis] = lo, hi
            edges.append(Edge(tuple(p0), tuple(p1), axis, reflex, planes))
    edges.sort(key=lambda e: (e.p0, e.p1))
    return EdgeSet(edges)


# ---------------------------------------------------------------------------
# Orientation normalisation and genus
# ---------------------------------------------------------------------------

Rotation = Tuple[int, int, int]
IDENTITY: Rotation = (0, 1, 2)


def rotate_point(q: Sequence, rot: Rotation) -> tuple:
    """New coordinate k is old coordinate rot[k]; rot is always cyclic, hence a proper rotation."""
    return tuple(q[rot[k]] for k in range(3))


def inverse_rotation(rot: Rotation) -> Rotation:
    inv = [0, 0, 0]
    for k, src in enumerate(rot):
        inv[src] = k
    return tuple(inv)


def rotate_polyhedron(p: Polyhedron, rot: Rotation) -> Polyhedron:
    if rot == IDENTITY:
        return p
    return Polyhedron(tuple(rotate_point(v, rot) for v in p.vertices), p.faces)


def normalize_orientation(p: Polyhedron, e: EdgeSet) -> Tuple[Polyhedron, Rotation]:
    axes = e.reflex_axes
    if len(axes) == 3:
        raise ThreeReflexDirections("reflex edges run along X, Y and Z")
    if Z not in axes:
        return p, IDENTITY
    # cyclic relabelling that makes a reflex-free axis vertical
    rot = (1, 2, 0) if Y in axes else (2, 0, 1)
    return rotate_polyhedron(p, rot), rot


def euler_characteristic(p: Polyhedron, adj: AdjacencyTables) -> int:
    v = len(adj.vertex_faces)
    e = len(adj.segment_face) // 2
    f = sum(1 - len(face.holes) for face in p.faces)
    return v - e + f


def euler_genus(p: Polyhedron, adj: AdjacencyTables) -> int:
    chi = euler_characteristic(p, adj)
    if chi % 2 or chi > 2:
        raise InvalidPolyhedron(f"Euler characteristic {chi} does not describe a closed orientable surface")
    return (2 - chi) // 2
