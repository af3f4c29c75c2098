from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rectgraph.algebra import EdgeLabel, GroupElement, SiteSet, compose, dot, k_energy, vsub
from rectgraph.combinatorial import preimage
from rectgraph.geometry import (
    Box,
    GeoEdge,
    Hyperplane,
    Sphere,
    black_edge_holds,
    candidate_points,
    components_in_box,
    edge_target,
    is_rectangle,
    label_of_step,
    locus_data,
    neighbors,
    rectangle_of,
    red_edge_holds,
    special_component,
    start_locus,
    step_element,
)
from rectgraph.sites import sample_generic

F = Fraction
UNIT = SiteSet.of((1, 0), (0, 1))
# four sites in the pattern of the failure example: x = (1, 3) completes rectangles with S
RIGHT_ANGLE_SITES = SiteSet.of((-1, 3), (1, 1), (5, 1), (5, 3))


def test_black_edge_examples():
    assert black_edge_holds(UNIT, UNIT.v(2), 1, 2)
    assert edge_target(UNIT, UNIT.v(2), EdgeLabel.black(1, 2)) == UNIT.v(1)
    p = (1, 2)
    assert black_edge_holds(UNIT, p, 1, 2)
    q = edge_target(UNIT, p, EdgeLabel.black(1, 2))
    assert q == (2, 1)
    assert dot(p, p) + dot(UNIT.v(1), UNIT.v(1)) == dot(q, q) + dot(UNIT.v(2), UNIT.v(2))
    assert not black_edge_holds(UNIT, (0, 0), 1, 2)
    with pytest.raises(ValueError):
        black_edge_holds(UNIT, p, 1, 1)


def test_red_edge_examples():
    assert red_edge_holds(UNIT, UNIT.v(1), 1, 2)
    assert edge_target(UNIT, UNIT.v(1), EdgeLabel.red(1, 2)) == UNIT.v(2)
    assert red_edge_holds(UNIT, (1, 1), 1, 2)
    assert edge_target(UNIT, (1, 1), EdgeLabel.red(1, 2)) == (0, 0)
    assert not red_edge_holds(UNIT, (2, 0), 1, 2)


def test_neighbors_examples():
    assert neighbors(UNIT, (F(1, 3), F(1, 7))) == []
    assert ((2, 1), EdgeLabel.black(1, 2)) in neighbors(UNIT, (1, 2))
    generic = sample_generic(2, 4, (-20, 20), 0)
    for v in generic.sites:
        assert all(q in generic.sites for q, _ in neighbors(generic, v))


def test_locus_examples():
    sphere = locus_data(UNIT, EdgeLabel.red(1, 2))
    assert sphere == Sphere((F(1, 2), F(1, 2)), F(1, 2))
    plane = locus_data(UNIT, EdgeLabel.black(1, 2))
    assert plane == Hyperplane((1, -1), 1)
    with pytest.raises(ValueError):
        EdgeLabel.black(1, 1)


def test_start_locus_holds_exactly_the_edge_starts():
    s = SiteSet.of((3, 1), (-2, 5), (4, -3))
    box = Box.cube(2, -12, 12, 2)
    for label in (EdgeLabel.black(1, 2), EdgeLabel.black(3, 1), EdgeLabel.red(2, 3)):
        locus = start_locus(s, label)
        for p in box.points():
            holds = black_edge_holds(s, p, label.i, label.j) if not label.is_red else red_edge_holds(s, p, 2, 3)
            assert holds == locus.contains(p)


def test_failure_example_point_meets_sites_three_times():
    x = (1, 3)
    hits = [(q, lab) for q, lab in neighbors(RIGHT_ANGLE_SITES, x) if q in RIGHT_ANGLE_SITES.sites]
    assert len(hits) == 3
    comps = components_in_box(RIGHT_ANGLE_SITES, Box.cube(2, -10, 10))
    special = special_component(comps)
    assert (1, 3) in special.vertices


def test_points_off_every_locus_are_isolated():
    s = SiteSet.of((3, 1), (-2, 5), (4, -3))
    box = Box.cube(2, -6, 6)
    assert all(c.edges or c.touches_boundary or c.is_special for c in components_in_box(s, box))
    cands = candidate_points(s, box)
    off = [p for p in box.points() if p not in cands]
    assert off
    assert all(neighbors(s, p) == [] for p in off)


def test_box_must_contain_sites():
    with pytest.raises(ValueError):
        components_in_box(SiteSet.of((30, 0), (0, 1)), Box.cube(2, -5, 5))


def test_special_component_is_exactly_the_sites():
    s = sample_generic(2, 4, (-20, 20), 2)
    comps = components_in_box(s, Box.cube(2, -40, 40))
    special = special_component(comps)
    assert special.vertices == frozenset(s.sites)


def test_step_element_round_trip():
    for label in (EdgeLabel.black(2, 3), EdgeLabel.red(1, 3)):
        assert label_of_step(step_element(label, 3)) == label


def test_candidate_points_cover_all_edge_starts():
    s = SiteSet.of((3, 1), (-2, 5), (4, -3))
    box = Box.cube(2, -9, 9)
    cands = candidate_points(s, box)
    for p in box.points():
        if neighbors(s, p):
            assert p in cands


coords = st.integers(min_value=-9, max_value=9)


@st.composite
def generic_triples(draw):
    pts = draw(st.lists(st.tuples(coords, coords), min_size=3, max_size=3, unique=True))
    return SiteSet.of(*pts)


@settings(max_examples=60, deadline=None)
@given(generic_triples())
def test_edges_are_symmetric_rectangles_and_conserve_energy(sites):
    from rectgraph.linalg import rank

    box = Box.cube(2, -20, 20)
    if not all(box.contains(v) for v in sites.sites):
        return
    for p in sorted(candidate_points(sites, box))[:40]:
        for q, label in neighbors(sites, p):
            assert (p, label.inverse()) in neighbors(sites, q)
            assert is_rectangle(*rectangle_of(sites, GeoEdge(p, q, label)))
            if rank(sites.sites) == 2:
                # the group step preserves K at any preimage of p
                pre = GroupElement(preimage(sites, p))
                step = step_element(label, sites.m)
                assert k_energy(sites, compose(step, pre)) == k_energy(sites, pre)
                assert vsub(q, p) == vsub(edge_target(sites, p, label), p)
