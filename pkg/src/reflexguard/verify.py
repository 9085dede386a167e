"""Sampled coverage certification of edge guards.

Visibility is decided exactly: a segment is inside the closed solid iff its
parameter intervals inside the closed bricks cover [0, 1].  Only the choice
of viewpoints on a guard edge is sampled, so a reported hit is always a true
hit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple

import numpy as np

from .decomp import Brick

OPEN, CLOSED = "open", "closed"
Q3 = Tuple[Fraction, Fraction, Fraction]

# integer-scaled coordinates below this stay exact as float64 quotients
_FLOAT_SAFE = 1 << 24


def _interval(a, b, lo, hi) -> Optional[Tuple[Fraction, Fraction]]:
    """Parameter range of a+t(b-a) inside the closed box, clipped to [0, 1]."""
    t0, t1 = Fraction(0), Fraction(1)
    for k in range(3):
        d = b[k] - a[k]
        if d == 0:
            if not lo[k] <= a[k] <= hi[k]:
                return None
            continue
        u, v = Fraction(lo[k] - a[k]) / d, Fraction(hi[k] - a[k]) / d
        if u > v:
            u, v = v, u
        t0, t1 = max(t0, u), min(t1, v)
        if t0 > t1:
            return None
    return t0, t1


def segment_inside(a: Sequence, b: Sequence, bricks: Sequence[Brick]) -> bool:
    """Every point of segment [a, b] lies in the union of the closed bricks (exact)."""
    a = tuple(Fraction(c) for c in a)
    b = tuple(Fraction(c) for c in b)
    spans = sorted(s for br in bricks if (s := _interval(a, b, br.lo, br.hi)) is not None)
    reach = Fraction(0)
    first = True
    for t0, t1 in spans:
        if t0 > reach or (first and t0 > 0):
            return False
        first = False
        reach = max(reach, t1)
        if reach >= 1:
            return True
    return False


def edge_samples(p0: Sequence[int], p1: Sequence[int], mode: str, k: int) -> List[Q3]:
    """Viewpoints on a guard edge: interior only when open, endpoints included when closed."""
    if k < 2:
        raise ValueError("need at least two samples per edge")
    if mode == OPEN:
        ts = [Fraction(i, k + 1) for i in range(1, k + 1)]
    elif mode == CLOSED:
        ts = [Fraction(i, k - 1) for i in range(k)]
    else:
        raise ValueError(f"unknown mode {mode!r}")
    return [tuple(Fraction(p0[j]) + t * (p1[j] - p0[j]) for j in range(3)) for t in ts]


def guard_sees_point(guard: Tuple[Sequence[int], Sequence[int]], q: Sequence, bricks: Sequence[Brick], mode: str = OPEN, k: int = 16) -> bool:
    return any(segment_inside(s, q, bricks) for s in edge_samples(guard[0], guard[1], mode, k))


def sample_points(bricks: Sequence[Brick], d: int) -> List[Q3]:
    """Half-step d*d*d lattice inside every brick plus its centre, duplicates dropped."""
    if d < 1:
        raise ValueError("density must be at least 1")
    out, seen = [], set()
    for br in bricks:
        axes = [[br.lo[k] + Fraction(2 * j + 1, 2 * d) * (br.hi[k] - br.lo[k]) for j in range(d)] for k in range(3)]
        pts = [(x, y, z) for x in axes[0] for y in axes[1] for z in axes[2]]
        pts.append(tuple(Fraction(br.lo[k] + br.hi[k], 2) for k in range(3)))
        for q in pts:
            if q not in seen:
                seen.add(q)
                out.append(q)
    return out


@dataclass
class CoverageReport:
    samples: int
    covered: int
    mode: str
    failures: List[Tuple[Q3, float]] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.failures

    def as_dict(self) -> dict:
        return {
            "mode": self.mode, "samples": self.samples, "covered": self.covered, "pass": self.passed,
            "failures": [{"point": [str(c) for c in q], "nearestGuardDistance": dist} for q, dist in self.failures],
        }


class _Scaled:
    """Bricks and points on a common integer grid so visibility tests run batched in numpy."""

    def __init__(self, bricks: Sequence[Brick], scale: int):
        self.scale = scale
        self.lo = np.array([b.lo for b in bricks], dtype=np.int64) * scale
        self.hi = np.array([b.hi for b in bricks], dtype=np.int64) * scale

    def to_int(self, q: Sequence[Fraction]) -> Tuple[int, int, int]:
        out = []
        for c in q:
            v = c * self.scale
            if v.denominator != 1:
                raise ValueError("point is off the sampling grid")
            out.append(int(v))
        return tuple(out)

    def lattice(self, d: int) -> np.ndarray:
        """The sample_points lattice in grid units, same order, duplicates dropped."""
        step = self.scale // (2 * d)
        size = (self.hi - self.lo) // self.scale  # brick extents in input units
        odd = np.arange(1, 2 * d, 2)
        axes = [self.lo[:, k, None] + odd[None, :] * size[:, k, None] * step for k in range(3)]
        grid = np.stack([
            np.repeat(axes[0], d * d, axis=1),
            np.tile(np.repeat(axes[1], d, axis=1), (1, d)),
            np.tile(axes[2], (1, d * d)),
        ], axis=2)
        centre = ((self.lo + self.hi) // 2)[:, None, :]
        pts = np.concatenate([grid, centre], axis=1).reshape(-1, 3)
        _, first = np.unique(pts, axis=0, return_index=True)
        return pts[np.sort(first)]

    def inside(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        """Row-wise segment containment for integer endpoint arrays of shape (M, 3)."""
        m = len(a)
        d = (b - a).astype(np.float64)
        lo = self.lo[None, :, :] - a[:, None, :]
        hi = self.hi[None, :, :] - a[:, None, :]
        zero = d[:, None, :] == 0
        with np.errstate(divide="ignore", invalid="ignore"):
            u = lo / d[:, None, :]
            v = hi / d[:, None, :]
        t_lo = np.where(zero, np.where((lo <= 0) & (hi >= 0), -np.inf, np.inf), np.minimum(u, v))
        t_hi = np.where(zero, np.where((lo <= 0) & (hi >= 0), np.inf, -np.inf), np.maximum(u, v))
        start = np.maximum(t_lo.max(axis=2), 0.0)
        end = np.minimum(t_hi.min(axis=2), 1.0)
        valid = start <= end
        start = np.where(valid, start, np.inf)
        order = np.argsort(start, axis=1, kind="stable")
        s = np.take_along_axis(start, order, axis=1)
        e = np.take_along_axis(np.where(valid, end, -np.inf), order, axis=1)
        reach = np.maximum.accumulate(e, axis=1)
        prev = np.concatenate([np.zeros((m, 1)), reach[:, :-1]], axis=1)
        gap = (s > prev) & np.isfinite(s)
        ok_prefix = np.cumsum(gap, axis=1) == 0
        return ((reach >= 1.0) & ok_prefix).any(axis=1)


def coverage_check(
    bricks: Sequence[Brick],
    guards: Sequence[Tuple[Sequence[int], Sequence[int]]],
    mode: str = OPEN,
    d: int = 3,
    k: int = 16,
    convex: bool = False,
    chunk: Optional[int] = None,
) -> CoverageReport:
    """Test every sample point against guard viewpoints until one sees it."""
    if d < 1:
        raise ValueError("density must be at least 1")
    denom = k + 1 if mode == OPEN else k - 1
    scale = math.lcm(2 * d, 2, denom)
    grid = _Scaled(bricks, scale)
    coords = np.abs(np.concatenate([grid.lo, grid.hi])).max()
    if coords >= _FLOAT_SAFE:
        pts = sample_points(bricks, d)
        if convex or not guards:
            return CoverageReport(len(pts), len(pts) if convex else 0, mode, [] if convex else [(q, math.inf) for q in pts])
        return _coverage_exact(bricks, guards, pts, mode, k)

    P = grid.lattice(d)
    as_point = lambda row: tuple(Fraction(int(c), scale) for c in row)
    if convex:
        return CoverageReport(len(P), len(P), mode)
    if not guards:
        return CoverageReport(len(P), 0, mode, [(as_point(row), math.inf) for row in P])

    seen, dist = _seen_mask(grid, P, guards, mode, k, chunk)
    failures = [(as_point(P[i]), float(dist[i].min()) / scale) for i in np.nonzero(~seen)[0]]
    return CoverageReport(len(P), int(seen.sum()), mode, failures)


def _seen_mask(grid: _Scaled, P: np.ndarray, guards, mode: str, k: int, chunk: Optional[int]):
    """Which grid points some guard viewpoint sees, plus point-to-guard-midpoint distances."""
    chunk = chunk or max(64, 1_000_000 // len(grid.lo))
    views = [[grid.to_int(s) for s in edge_samples(g0, g1, mode, k)] for g0, g1 in guards]
    V = np.array(views, dtype=np.int64)  # (G, K, 3)
    G, K = V.shape[0], V.shape[1]
    mid = V.mean(axis=1)
    dist = np.linalg.norm(P[:, None, :] - mid[None, :, :], axis=2)  # (N, G)
    guard_rank = np.argsort(dist, axis=1, kind="stable")
    axis_of = np.array([int(np.nonzero(np.array(g1) - np.array(g0))[0][0]) for g0, g1 in guards])

    # per (point, guard): viewpoints ordered by closeness along the guard's axis
    along = V[np.arange(G), :, axis_of]  # (G, K)
    seen = np.zeros(len(P), dtype=bool)
    pending = np.arange(len(P))
    for j in range(K):
        for gi in range(G):
            if not len(pending):
                break
            g = guard_rank[pending, gi]
            target = P[pending, axis_of[g]]
            sample_order = np.argsort(np.abs(along[g] - target[:, None]), axis=1, kind="stable")
            s_idx = sample_order[:, j]
            a = V[g, s_idx]
            hit = np.zeros(len(pending), dtype=bool)
            for c0 in range(0, len(pending), chunk):
                hit[c0:c0 + chunk] = grid.inside(a[c0:c0 + chunk], P[pending[c0:c0 + chunk]])
            seen[pending[hit]] = True
            pending = pending[~hit]
    return seen, dist


def points_seen(
    bricks: Sequence[Brick],
    guards: Sequence[Tuple[Sequence[int], Sequence[int]]],
    points: Sequence[Sequence],
    mode: str = OPEN,
    k: int = 16,
) -> np.ndarray:
    """Boolean mask: is each rational point seen from some viewpoint of some guard?"""
    if not points or not guards:
        return np.zeros(len(points), dtype=bool)
    denom = k + 1 if mode == OPEN else k - 1
    scale = math.lcm(2, denom, *(Fraction(c).denominator for q in points for c in q))
    grid = _Scaled(bricks, scale)
    P = np.array([grid.to_int([Fraction(c) for c in q]) for q in points], dtype=np.int64)
    if max(np.abs(np.concatenate([grid.lo, grid.hi])).max(), np.abs(P).max()) >= _FLOAT_SAFE:
        return np.array([any(guard_sees_point(g, q, bricks, mode, k) for g in guards) for q in points])
    return _seen_mask(grid, P, guards, mode, k, None)[0]


def _coverage_exact(bricks, guards, pts, mode, k) -> CoverageReport:
    failures = []
    for q in pts:
        if not any(guard_sees_point(g, q, bricks, mode, k) for g in guards):
            mids = [tuple((g0[j] + g1[j]) / 2 for j in range(3)) for g0, g1 in guards]
            failures.append((q, min(math.dist([float(c) for c in q], m) for m in mids)))
    return CoverageReport(len(pts), len(pts) - len(failures), mode, failures)
