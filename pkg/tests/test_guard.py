from __future__ import annotations

import pytest
from hypothesis import given, settings, strategies as st

from conftest import CUBE, FIGURE2, RING, TOWER3
from reflexguard.boxes import polyhedron_from_boxes
from reflexguard.classify import Component, classify_all
from reflexguard.decomp import decompose
from reflexguard.gen import (
    cake_boxes,
    castle_boxes,
    comb_boxes,
    composite_boxes,
    double_castle_boxes,
    ring_boxes,
    stack_boxes,
)
from reflexguard.guard import (
    PipelineState,
    _Castle,
    guard_castle,
    guard_double_castle,
    guard_monotone,
    odd_cut_partition,
    parity_adjust,
    place_guards,
    resolve_nonprimitive,
    spanning_forest,
)
from reflexguard.verify import coverage_check


def dec(boxes):
    return decompose(polyhedron_from_boxes(boxes))


def state_of(d):
    return PipelineState(d.graph, set(range(len(d.contacts))))


def upward_castle(d, root):
    kids = {v: [] for v in range(len(d.bricks))}
    for cid, c in enumerate(d.contacts):
        kids[c.lower].append((c.upper, cid))
    for v in kids:
        kids[v].sort()
    return _Castle(root, kids, d.contacts, d.edges)


def brick_id(d, lo):
    (i,) = [k for k, b in enumerate(d.bricks) if b.lo == lo]
    return i


def covers(d, guards):
    segs = [d.edge_in_input_frame(i) for i in guards]
    return coverage_check(d.bricks_in_input_frame(), segs, "open").passed


# -- monotone guarding ------------------------------------------------------------

def test_monotone_picks_odd_positions_plus_last_when_even():
    d = dec(comb_boxes(3))  # reflex edges at x = 1, 2, 3, 4
    e = d.edges
    ids = sorted(e.reflex_ids(), key=lambda i: e.edges[i].p0[0])
    xs = lambda picks: [e.edges[i].p0[0] for i in picks]
    assert xs(guard_monotone(ids, e)) == [1, 3, 4]
    assert xs(guard_monotone(ids[:3], e)) == [1, 3]
    assert xs(guard_monotone(ids[:1], e)) == [1]
    with pytest.raises(ValueError):
        guard_monotone([], e)


@pytest.mark.parametrize("r", range(1, 9))
def test_monotone_count(r):
    d = dec(comb_boxes(5))
    ids = d.edges.reflex_ids()[:r]
    assert len(guard_monotone(ids, d.edges)) == r // 2 + 1


# -- castles ------------------------------------------------------------------------

def _nonprism_half(x0, x1, z):
    """A sub-castle at [x0,x1] whose children split along y and grandchildren along x."""
    mid = (x0 + x1) // 2
    return [
        ((x0, 0, z), (x1, 20, z + 1)),
        ((x0, 0, z + 1), (x1, 9, z + 2)), ((x0, 11, z + 1), (x1, 20, z + 2)),
        ((x0, 0, z + 2), (mid - 1, 9, z + 3)), ((mid, 0, z + 2), (x1, 9, z + 3)),
    ]


def _prism_half(x0, x1, z):
    """A sub-castle at [x0,x1] with two children split along y (reflex edges along x)."""
    return [((x0, 0, z), (x1, 20, z + 1)), ((x0, 0, z + 1), (x1, 9, z + 2)), ((x0, 11, z + 1), (x1, 20, z + 2))]


BASE = ((0, 0, 0), (20, 20, 1))


def test_castle_with_two_non_prism_children():
    d = dec([BASE] + _nonprism_half(0, 9, 1) + _nonprism_half(11, 20, 1))
    castle = upward_castle(d, brick_id(d, (0, 0, 0)))
    guards = guard_castle(castle)
    assert d.edges.r == 10
    # each child needs two guards, plus one base edge
    assert len(guards) == 5 <= d.edges.r // 2
    assert covers(d, guards)


def test_castle_with_one_orthogonal_prism_child():
    d = dec([BASE] + _prism_half(0, 9, 1) + _nonprism_half(11, 20, 1))
    castle = upward_castle(d, brick_id(d, (0, 0, 0)))
    guards = guard_castle(castle)
    prism_child = brick_id(d, (0, 0, 1))
    (cid,) = [c for kid, c in castle.children[castle.root] if kid == prism_child]
    (e1,) = d.contacts[cid].reflex_edges
    assert e1 in guards
    assert len(guards) <= d.edges.r // 2
    assert covers(d, guards)


def test_castle_with_orthogonal_and_parallel_prism_children():
    d = dec([BASE] + _prism_half(0, 9, 1) + [((11, 0, 1), (20, 20, 2))])
    castle = upward_castle(d, brick_id(d, (0, 0, 0)))
    guards = guard_castle(castle)
    assert d.edges.r == 4 and len(guards) == 2
    assert covers(d, guards)


def test_prism_castle_is_refused():
    d = dec(castle_boxes(1, 2))
    with pytest.raises(ValueError):
        guard_castle(upward_castle(d, 0))


# -- double castles ---------------------------------------------------------------------

def whole(d):
    return Component(list(range(len(d.bricks))), list(range(len(d.contacts))), d.bricks, d.contacts)


def test_two_cuboids_get_the_central_edge():
    d = dec([((0, 0, 0), (2, 1, 1)), ((0, 0, 1), (1, 1, 2))])
    assert guard_double_castle(whole(d), d.edges) == d.edges.reflex_ids()


def test_parallel_prism_halves_are_guarded_monotonically():
    boxes = [((0, 0, 0), (7, 2, 1)), ((0, 0, 1), (3, 2, 2)), ((4, 0, 1), (7, 2, 2)),
             ((0, 0, -1), (8, 2, 0)), ((0, 0, -2), (3, 2, -1)), ((5, 0, -2), (8, 2, -1))]
    d = dec(boxes)
    guards = guard_double_castle(whole(d), d.edges)
    assert d.edges.r == 5 and len(guards) == 3
    assert covers(d, guards)


def test_non_prism_half_over_a_cuboid():
    upper = _nonprism_half(0, 9, 0)
    d = dec(upper + [((0, 0, -1), (12, 20, 0))])
    guards = guard_double_castle(whole(d), d.edges)
    r2 = (d.edges.r - 1) // 2
    assert len(guards) == r2 + 1
    assert covers(d, guards)


# -- graph phases ---------------------------------------------------------------------

def test_figure2_contact_is_cut_as_non_primitive():
    d = dec(FIGURE2)
    st_ = state_of(d)
    resolve_nonprimitive(st_, classify_all(d.bricks, d.contacts))
    assert st_.alive == set() and len(d.graph.components(st_.alive)) == 2


def test_wedding_cake_falls_apart_into_single_bricks():
    d = dec(cake_boxes(0, 3))
    st_ = state_of(d)
    resolve_nonprimitive(st_, classify_all(d.bricks, d.contacts))
    assert len(d.graph.components(st_.alive)) == 3


def test_stack_keeps_all_contacts():
    d = dec(stack_boxes(3, 6))
    st_ = state_of(d)
    resolve_nonprimitive(st_, classify_all(d.bricks, d.contacts))
    assert st_.alive == set(range(5))


def test_spanning_forest_breaks_ring_into_a_path():
    d = dec(RING)
    st_ = state_of(d)
    spanning_forest(st_)
    assert len(st_.cuts["forestCut"]) == 1 and len(st_.alive) == 3


@pytest.mark.parametrize("rings", [2, 3])
def test_spanning_forest_deletes_one_edge_per_cycle(rings):
    d = dec(ring_boxes(3, rings))
    st_ = state_of(d)
    spanning_forest(st_)
    assert len(st_.cuts["forestCut"]) == rings


def test_odd_path_loses_a_leaf_edge_and_guards_the_leaf():
    d = dec(TOWER3)
    st_ = state_of(d)
    parity_adjust(st_, d.contacts, d.edges)
    assert len(st_.cuts["parityCut"]) == 1 and len(st_.direct_guards) == 1
    assert sorted(map(len, d.graph.components(st_.alive))) == [1, 2]


def test_even_path_is_left_alone():
    d = dec([((0, 0, 0), (2, 1, 1)), ((0, 0, 1), (1, 1, 2))])
    st_ = state_of(d)
    parity_adjust(st_, d.contacts, d.edges)
    assert st_.direct_guards == [] and st_.alive == {0}


def test_four_path_is_cut_in_the_middle():
    tower = [((0, 0, 0), (4, 1, 1)), ((0, 0, 1), (3, 1, 2)), ((0, 0, 2), (2, 1, 3)), ((0, 0, 3), (1, 1, 4))]
    d = dec(tower)
    st_ = state_of(d)
    pieces = odd_cut_partition(st_)
    assert sorted(map(len, pieces)) == [2, 2]
    (cut,) = st_.cuts["oddCut"]
    assert d.contacts[cut].z == 2


# -- whole pipeline ---------------------------------------------------------------------

def test_cube_is_convex():
    gs = place_guards(polyhedron_from_boxes(CUBE))
    assert gs.status == "Convex" and gs.guards == []


def test_figure2_gets_two_direct_guards():
    gs = place_guards(polyhedron_from_boxes(FIGURE2))
    assert gs.count == 2 == gs.certificate.bound_r


@pytest.mark.parametrize("k", [2, 3, 4, 5])
def test_comb_gets_one_guard_per_tooth(k):
    gs = place_guards(polyhedron_from_boxes(comb_boxes(k)))
    assert gs.count == k == (2 * k - 2) // 2 + 1


def _family(seed):
    kind = seed % 6
    if kind == 0:
        return stack_boxes(seed, 1 + seed % 30)
    if kind == 1:
        return castle_boxes(seed, 1 + seed % 4)
    if kind == 2:
        return double_castle_boxes(seed, 1 + seed % 4)
    if kind == 3:
        return composite_boxes(seed, 3 + seed % 30)
    if kind == 4:
        return cake_boxes(seed, 1 + seed % 4)
    return ring_boxes(3 + seed % 3, 1 + seed % 3)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 1_000_000))
def test_guard_count_respects_both_bounds(seed):
    gs = place_guards(polyhedron_from_boxes(_family(seed)))
    c = gs.certificate
    e = gs.decomposition.edges
    assert all(e.edges[i].reflex for i in gs.guards)
    assert len(set(gs.guards)) == gs.count
    if c.r > 0:
        assert gs.count <= c.bound_r
        assert gs.count <= c.bound_m


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 1_000_000), st.integers(1, 40))
def test_stack_bound(seed, n):
    gs = place_guards(polyhedron_from_boxes(stack_boxes(seed, n)))
    c = gs.certificate
    if c.r > 0:
        assert gs.count <= (c.m + 6 * c.g) // 12


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 1_000_000))
def test_modes_and_reruns_agree(seed):
    p = polyhedron_from_boxes(_family(seed))
    a = place_guards(p, "open")
    b = place_guards(p, "closed")
    c = place_guards(p, "open")
    assert a.segments() == b.segments() == c.segments()
