"""The rectangle graph on points of Q^n: edges, neighbors and components in a box.

black(i, j) on p -> q means q = p + v_i - v_j with
(p, v_i - v_j) = (v_i, v_j) - |v_j|^2. red(i, j) means q = -p + v_i + v_j with
|p|^2 - (p, v_i + v_j) = -(v_i, v_j).
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations, product
from math import isqrt
from typing import Iterable, Iterator, Optional, Sequence, Union

from .algebra import (
    BLACK,
    RED,
    EdgeLabel,
    GroupElement,
    Point,
    SiteSet,
    dot,
    point,
    unit,
    vadd,
    vscale,
    vsub,
)


def black_edge_holds(sites: SiteSet, p: Sequence, i: int, j: int) -> bool:
    if i == j:
        raise ValueError("black edge needs i != j")
    g = sites.gram
    return dot(p, vsub(sites.v(i), sites.v(j))) == g[i - 1][j - 1] - g[j - 1][j - 1]


def red_edge_holds(sites: SiteSet, p: Sequence, i: int, j: int) -> bool:
    if i == j:
        raise ValueError("red edge needs i != j")
    return dot(p, p) - dot(p, vadd(sites.v(i), sites.v(j))) == -sites.gram[i - 1][j - 1]


def edge_target(sites: SiteSet, p: Sequence, label: EdgeLabel) -> Point:
    if label.is_red:
        return vsub(vadd(sites.v(label.i), sites.v(label.j)), p)
    return vadd(p, vsub(sites.v(label.i), sites.v(label.j)))


def edge_holds(sites: SiteSet, p: Sequence, label: EdgeLabel) -> bool:
    if label.is_red:
        return red_edge_holds(sites, p, label.i, label.j)
    return black_edge_holds(sites, p, label.i, label.j)


def step_element(label: EdgeLabel, m: int) -> GroupElement:
    """Group element g with g p = q for a geometric edge p -> q of this label."""
    if label.is_red:
        return label.element(m)
    return GroupElement(vsub(unit(m, label.j), unit(m, label.i)), BLACK)


def label_of_step(g: GroupElement) -> EdgeLabel:
    """Inverse of step_element."""
    pos = [k + 1 for k, c in enumerate(g.vector) if c == 1]
    neg = [k + 1 for k, c in enumerate(g.vector) if c == -1]
    if g.sign == RED:
        return EdgeLabel.red(*neg)
    return EdgeLabel.black(neg[0], pos[0])


@dataclass(frozen=True, order=True)
class GeoEdge:
    source: Point
    target: Point
    label: EdgeLabel

    def step(self, m: int) -> GroupElement:
        return step_element(self.label, m)

    def reversed(self) -> "GeoEdge":
        return GeoEdge(self.target, self.source, self.label.inverse())


def neighbors(sites: SiteSet, p: Sequence) -> list[tuple[Point, EdgeLabel]]:
    """All (q, label) with an edge p -> q, scanning every ordered pair of sites."""
    p = point(p)
    m = sites.m
    out: list[tuple[Point, EdgeLabel]] = []
    seen = set()
    for i in range(1, m + 1):
        for j in range(1, m + 1):
            if i == j:
                continue
            candidates = [EdgeLabel.black(i, j)]
            if i < j:
                candidates.append(EdgeLabel.red(i, j))
            for label in candidates:
                if edge_holds(sites, p, label):
                    item = (edge_target(sites, p, label), label)
                    if item not in seen:
                        seen.add(item)
                        out.append(item)
    return out


@dataclass(frozen=True)
class Hyperplane:
    """{p : (p, normal) = offset}."""

    normal: Point
    offset: Fraction

    def contains(self, p: Sequence) -> bool:
        return dot(p, self.normal) == self.offset


@dataclass(frozen=True)
class Sphere:
    """{p : |p - center|^2 = radius_squared}."""

    center: Point
    radius_squared: Fraction

    def contains(self, p: Sequence) -> bool:
        d = vsub(p, self.center)
        return dot(d, d) == self.radius_squared


def locus_data(sites: SiteSet, label: EdgeLabel) -> Union[Hyperplane, Sphere]:
    """red(i, j): the sphere on diameter v_i v_j. black(i, j): the plane of targets q.

    The start points of black(i, j) lie on the parallel plane through v_j;
    see start_locus.
    """
    vi, vj = sites.v(label.i), sites.v(label.j)
    if label.is_red:
        d = vsub(vi, vj)
        return Sphere(vscale(Fraction(1, 2), vadd(vi, vj)), dot(d, d) / 4)
    normal = vsub(vi, vj)
    return Hyperplane(normal, dot(vi, normal))


def start_locus(sites: SiteSet, label: EdgeLabel) -> Union[Hyperplane, Sphere]:
    """The set of points p where an edge with this label starts."""
    if label.is_red:
        return locus_data(sites, label)
    vi, vj = sites.v(label.i), sites.v(label.j)
    normal = vsub(vi, vj)
    return Hyperplane(normal, dot(vj, normal))


@dataclass(frozen=True)
class Box:
    """Points k / denominator with lower <= k <= upper coordinatewise."""

    lower: tuple[int, ...]
    upper: tuple[int, ...]
    denominator: int = 1

    @staticmethod
    def cube(n: int, lo: int, hi: int, denominator: int = 1) -> "Box":
        return Box((lo,) * n, (hi,) * n, denominator)

    @property
    def n(self) -> int:
        return len(self.lower)

    def contains(self, p: Sequence) -> bool:
        d = self.denominator
        for c, lo, hi in zip(p, self.lower, self.upper):
            scaled = Fraction(c) * d
            if scaled.denominator != 1 or not lo <= scaled <= hi:
                return False
        return True

    def points(self) -> Iterator[Point]:
        d = self.denominator
        for ks in product(*(range(lo, hi + 1) for lo, hi in zip(self.lower, self.upper))):
            yield tuple(Fraction(k, d) for k in ks)


@dataclass(frozen=True)
class Component:
    vertices: frozenset
    edges: tuple[GeoEdge, ...]
    touches_boundary: bool
    is_special: bool

    def sorted_vertices(self) -> list[Point]:
        return sorted(self.vertices)

    def to_json(self) -> dict:
        return {
            "vertices": [[str(c) for c in v] for v in self.sorted_vertices()],
            "edges": [
                {"source": [str(c) for c in e.source], "target": [str(c) for c in e.target], "label": str(e.label)}
                for e in self.edges
            ],
            "touches_boundary": self.touches_boundary,
            "is_special": self.is_special,
        }


def _rational_sqrt(value: Fraction) -> Optional[Fraction]:
    if value < 0:
        return None
    num, den = value.numerator, value.denominator
    rn, rd = isqrt(num), isqrt(den)
    if rn * rn == num and rd * rd == den:
        return Fraction(rn, rd)
    return None


def _points_on_hyperplane(plane: Hyperplane, box: Box) -> Iterator[Point]:
    n = box.n
    d = box.denominator
    solve_axis = next((k for k in range(n - 1, -1, -1) if plane.normal[k] != 0), None)
    if solve_axis is None:
        if plane.offset == 0:
            yield from box.points()
        return
    others = [k for k in range(n) if k != solve_axis]
    for ks in product(*(range(box.lower[k], box.upper[k] + 1) for k in others)):
        p = [Fraction(0)] * n
        for k, val in zip(others, ks):
            p[k] = Fraction(val, d)
        rest = plane.offset - sum(p[k] * plane.normal[k] for k in others)
        t = rest / plane.normal[solve_axis]
        p[solve_axis] = t
        if box.contains(p):
            yield tuple(p)


def _points_on_sphere(sphere: Sphere, box: Box) -> Iterator[Point]:
    n = box.n
    d = box.denominator
    axis = n - 1
    others = list(range(n - 1))
    for ks in product(*(range(box.lower[k], box.upper[k] + 1) for k in others)):
        p = [Fraction(0)] * n
        for k, val in zip(others, ks):
            p[k] = Fraction(val, d)
        rest = sphere.radius_squared - sum((p[k] - sphere.center[k]) ** 2 for k in others)
        root = _rational_sqrt(rest)
        if root is None:
            continue
        for t in {sphere.center[axis] + root, sphere.center[axis] - root}:
            p[axis] = t
            if box.contains(p):
                yield tuple(p)


def candidate_points(sites: SiteSet, box: Box) -> set[Point]:
    """Box points that can carry an edge, plus the sites inside the box."""
    out = {v for v in sites.sites if box.contains(v)}
    m = sites.m
    for i, j in combinations(range(1, m + 1), 2):
        out.update(_points_on_sphere(start_locus(sites, EdgeLabel.red(i, j)), box))
        for a, b in ((i, j), (j, i)):
            out.update(_points_on_hyperplane(start_locus(sites, EdgeLabel.black(a, b)), box))
    return out


def components_in_box(sites: SiteSet, box: Box, include_isolated: bool = False) -> list[Component]:
    """Connected components met by the box, grown by BFS inside the box.

    Components containing a point of S are marked special. Isolated
    candidate points are dropped unless include_isolated is set.
    """
    if box.n != sites.n:
        raise ValueError("box dimension must equal n")
    if not all(box.contains(v) for v in sites.sites):
        raise ValueError("box does not contain S")
    site_set = set(sites.sites)
    seeds = sorted(candidate_points(sites, box))
    visited: set[Point] = set()
    components = []
    for seed in seeds:
        if seed in visited:
            continue
        visited.add(seed)
        queue = deque([seed])
        verts = {seed}
        edges: set[GeoEdge] = set()
        boundary = False
        while queue:
            p = queue.popleft()
            for q, label in neighbors(sites, p):
                if not box.contains(q):
                    boundary = True
                    continue
                edge = GeoEdge(p, q, label)
                rev = edge.reversed()
                edges.add(min(edge, rev))
                if q not in visited:
                    visited.add(q)
                    verts.add(q)
                    queue.append(q)
        if len(verts) == 1 and not edges and not boundary and seed not in site_set and not include_isolated:
            continue
        components.append(
            Component(
                vertices=frozenset(verts),
                edges=tuple(sorted(edges)),
                touches_boundary=boundary,
                is_special=bool(verts & site_set),
            )
        )
    return components


def special_component(components: Iterable[Component]) -> Optional[Component]:
    specials = [c for c in components if c.is_special]
    if len(specials) == 1:
        return specials[0]
    if not specials:
        return None
    merged = frozenset().union(*(c.vertices for c in specials))
    return Component(merged, tuple(e for c in specials for e in c.edges), any(c.touches_boundary for c in specials), True)


def is_rectangle(a: Sequence, b: Sequence, c: Sequence, d: Sequence) -> bool:
    """a + c = b + d and |a|^2 + |c|^2 = |b|^2 + |d|^2."""
    return vadd(a, c) == vadd(b, d) and dot(a, a) + dot(c, c) == dot(b, b) + dot(d, d)


def rectangle_of(sites: SiteSet, edge: GeoEdge) -> tuple[Point, Point, Point, Point]:
    """The four rectangle vertices, in cyclic order, certifying an edge."""
    vi, vj = sites.v(edge.label.i), sites.v(edge.label.j)
    if edge.label.is_red:
        return (edge.source, vi, edge.target, vj)
    return (edge.source, edge.target, vi, vj)
