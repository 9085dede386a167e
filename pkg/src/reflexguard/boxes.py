"""Boundary of a union of interior-disjoint integer boxes, as a Polyhedron."""

from __future__ import annotations

from collections import defaultdict
from typing import Dict, List, Sequence, Tuple

import numpy as np
from scipy import ndimage

from .model import PLANE_AXES, Face, Point3, Polyhedron

Box = Tuple[Point3, Point3]  # (min corner, max corner)

# left turn first, then straight, then right: keeps 4-connected regions apart at pinch points
_DIRS = [(1, 0), (0, 1), (-1, 0), (0, -1)]


def box_volume(box: Box) -> int:
    lo, hi = box
    return (hi[0] - lo[0]) * (hi[1] - lo[1]) * (hi[2] - lo[2])


def boxes_touch(a: Box, b: Box) -> bool:
    """Closed boxes share at least one point."""
    return all(a[0][k] <= b[1][k] and b[0][k] <= a[1][k] for k in range(3))


def boxes_overlap(a: Box, b: Box) -> bool:
    """Open interiors intersect."""
    return all(a[0][k] < b[1][k] and b[0][k] < a[1][k] for k in range(3))


def _trace_loops(mask: np.ndarray) -> List[List[Tuple[int, int]]]:
    """Boundary loops of a 4-connected cell region, region on the left (outer CCW, holes CW)."""
    nu, nv = mask.shape
    pad = np.zeros((nu + 2, nv + 2), dtype=bool)
    pad[1:-1, 1:-1] = mask
    inner = pad[1:-1, 1:-1]
    out: Dict[Tuple[int, int], List[Tuple[int, int]]] = defaultdict(list)
    # bottom sides: (i,j)->(i+1,j)
    for i, j in zip(*np.nonzero(inner & ~pad[1:-1, :-2])):
        out[(i, j)].append((i + 1, j))
    # right sides: (i+1,j)->(i+1,j+1)
    for i, j in zip(*np.nonzero(inner & ~pad[2:, 1:-1])):
        out[(i + 1, j)].append((i + 1, j + 1))
    # top sides: (i+1,j+1)->(i,j+1)
    for i, j in zip(*np.nonzero(inner & ~pad[1:-1, 2:])):
        out[(i + 1, j + 1)].append((i, j + 1))
    # left sides: (i,j+1)->(i,j)
    for i, j in zip(*np.nonzero(inner & ~pad[:-2, 1:-1])):
        out[(i, j + 1)].append((i, j))

    loops = []
    while out:
        start = min(out)  # lexicographic minimum is never a pinch vertex
        prev, cur = None, start
        pts = []
        while True:
            cands = out[cur]
            if prev is None or len(cands) == 1:
                nxt = cands[0]
            else:
                k = _DIRS.index((cur[0] - prev[0], cur[1] - prev[1]))
                for dd in (_DIRS[(k + 1) % 4], _DIRS[k], _DIRS[(k + 3) % 4]):
                    nxt = (cur[0] + dd[0], cur[1] + dd[1])
                    if nxt in cands:
                        break
            cands.remove(nxt)
            if not cands:
                del out[cur]
            pts.append(cur)
            prev, cur = cur, nxt
            if cur == start:
                break
        loops.append(_simplify(pts))
    return loops


def _simplify(pts: List[Tuple[int, int]]) -> List[Tuple[int, int]]:
    n = len(pts)
    keep = []
    for i in range(n):
        a, b, c = pts[i - 1], pts[i], pts[(i + 1) % n]
        if (b[0] - a[0]) * (c[1] - b[1]) - (b[1] - a[1]) * (c[0] - b[0]) != 0:
            keep.append(b)
    return keep


def _plane_regions(rects_pos: Sequence[Tuple[int, int, int, int]], rects_neg: Sequence[Tuple[int, int, int, int]]):
    """Cells covered by rects_pos but not rects_neg on a compressed grid."""
    us = sorted({c for r in list(rects_pos) + list(rects_neg) for c in (r[0], r[1])})
    vs = sorted({c for r in list(rects_pos) + list(rects_neg) for c in (r[2], r[3])})
    ui = {c: i for i, c in enumerate(us)}
    vi = {c: i for i, c in enumerate(vs)}

    def paint(rects):
        m = np.zeros((len(us) - 1, len(vs) - 1), dtype=bool)
        for u0, u1, v0, v1 in rects:
            m[ui[u0]:ui[u1], vi[v0]:vi[v1]] = True
        return m

    return paint(rects_pos) & ~paint(rects_neg), us, vs


def polyhedron_from_boxes(boxes: Sequence[Box]) -> Polyhedron:
    """Boundary of the union of interior-disjoint boxes.

    Loops contain turning vertices only; vertices of neighbouring faces that
    fall inside an edge are left to the adjacency splitter.
    """
    by_plane = defaultdict(lambda: ([], []))  # (axis, c) -> (ending, starting)
    for lo, hi in boxes:
        for axis in range(3):
            u, v = PLANE_AXES[axis]
            rect = (lo[u], hi[u], lo[v], hi[v])
            by_plane[(axis, hi[axis])][0].append(rect)
            by_plane[(axis, lo[axis])][1].append(rect)

    index: Dict[Point3, int] = {}
    vertices: List[Point3] = []
    faces: List[Face] = []

    def vid(q: Point3) -> int:
        if q not in index:
            index[q] = len(vertices)
            vertices.append(q)
        return index[q]

    for (axis, c) in sorted(by_plane):
        ending, starting = by_plane[(axis, c)]
        u, v = PLANE_AXES[axis]
        for sign, pos, neg in ((1, ending, starting), (-1, starting, ending)):
            if not pos:
                continue
            region, us, vs = _plane_regions(pos, neg)
            labels, count = ndimage.label(region)
            for lab in range(1, count + 1):
                loops2d = _trace_loops(labels == lab)
                loops2d.sort(key=lambda lp: -_area2(lp))  # outer (CCW) first
                loops = []
                for lp in loops2d:
                    pts = []
                    for i, j in lp:
                        q = [0, 0, 0]
                        q[axis], q[u], q[v] = c, us[i], vs[j]
                        pts.append(tuple(q))
                    if sign < 0:
                        pts = pts[::-1]
                    loops.append(tuple(vid(q) for q in pts))
                faces.append(Face(tuple(loops)))
    return Polyhedron(tuple(vertices), tuple(faces))


def _area2(lp: Sequence[Tuple[int, int]]) -> int:
    return sum(a[0] * b[1] - b[0] * a[1] for a, b in zip(lp, list(lp[1:]) + [lp[0]]))
