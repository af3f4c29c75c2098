"""Realization equations of combinatorial graphs and their exact solution.

A non-root vertex h = (L, s) of a graph rooted at x imposes
  black: (x, pi(L)) = K(h)
  red:   |x|^2 + (x, pi(L)) = K(h)
with K(h) kept symbolic as the form C(h).
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from functools import lru_cache
from itertools import permutations
from fractions import Fraction
from typing import Optional, Sequence, Union

from .algebra import (
    RED,
    IntVector,
    Point,
    QuadForm,
    SiteSet,
    c_form,
    dot,
    element_from_vertex,
    pi_map,
    quad_eval,
    unit,
    vadd,
    vscale,
    vsub,
)
from .combinatorial import CombGraph, enumerate_graphs, permute_indices
from .linalg import AffineSolution, Inconsistent, left_nullspace, rank, solve_affine


@dataclass(frozen=True)
class EquationRow:
    """(x, pi(coefficient)) [+ |x|^2 if quadratic] = quad_eval(energy)."""

    vertex: IntVector
    coefficient: IntVector
    energy: QuadForm
    quadratic: bool

    def residual(self, sites: SiteSet, x: Sequence) -> Fraction:
        lhs = dot(x, pi_map(sites, self.coefficient))
        if self.quadratic:
            lhs += dot(x, x)
        return lhs - quad_eval(sites, self.energy)


@dataclass(frozen=True)
class EquationSystem:
    m: int
    rows: tuple[EquationRow, ...]

    @property
    def linear_rows(self) -> tuple[EquationRow, ...]:
        return tuple(r for r in self.rows if not r.quadratic)

    @property
    def quadratic_rows(self) -> tuple[EquationRow, ...]:
        return tuple(r for r in self.rows if r.quadratic)

    def residuals(self, sites: SiteSet, x: Sequence) -> list[Fraction]:
        return [r.residual(sites, x) for r in self.rows]

    def satisfied_by(self, sites: SiteSet, x: Sequence) -> bool:
        return all(r == 0 for r in self.residuals(sites, x))


def build_system(graph: CombGraph, allow_disconnected: bool = False) -> EquationSystem:
    """One row per non-root vertex h: the condition that h x lies at K-distance zero from x.

    The rows make sense for any vertex set containing 0; allow_disconnected
    admits sets such as {0, -2e_1} that are not joined by Cayley edges.
    """
    if not graph.has_root:
        raise ValueError("graph must contain its root 0")
    if not allow_disconnected and not graph.is_connected():
        raise ValueError("graph is disconnected")
    rows = []
    for v in graph.non_root():
        g = element_from_vertex(v)
        rows.append(EquationRow(v, v, c_form(g), g.sign == RED))
    return EquationSystem(graph.m, tuple(rows))


@dataclass(frozen=True)
class NoSolution:
    """The rows are incompatible; residual is the nonzero value of a vanishing combination."""

    residual: Fraction
    rows: tuple[IntVector, ...]
    combination: tuple[Fraction, ...]


@dataclass(frozen=True)
class Unique:
    x: Point


@dataclass(frozen=True)
class SpecialSolution:
    x: Point
    index: int


@dataclass(frozen=True)
class Underdetermined:
    """Solutions: particular + span(directions), intersected with a sphere when present.

    The sphere lives in the affine space: points y with |y - center|^2 = radius_squared.
    """

    particular: Point
    directions: tuple[Point, ...]
    sphere_center: Optional[Point] = None
    sphere_radius_squared: Optional[Fraction] = None

    def contains(self, x: Sequence) -> bool:
        x = tuple(Fraction(c) for c in x)
        diff = vsub(x, self.particular)
        if self.directions:
            if rank(list(self.directions) + [diff]) != rank(list(self.directions)):
                return False
        elif any(diff):
            return False
        if self.sphere_center is None:
            return True
        d = vsub(x, self.sphere_center)
        return dot(d, d) == self.sphere_radius_squared


@dataclass(frozen=True)
class NonGenericSites:
    """A determinant of the linear part vanished at these sites.

    rows lists formally independent coefficient vectors whose images under
    pi are dependent; combination is a vanishing combination of those images.
    """

    rows: tuple[IntVector, ...]
    combination: tuple[Fraction, ...]


RealizationResult = Union[NoSolution, Unique, SpecialSolution, Underdetermined, NonGenericSites]


def _special_index(sites: SiteSet, x: Point) -> Optional[int]:
    for i, v in enumerate(sites.sites, start=1):
        if v == x:
            return i
    return None


def _point_result(sites: SiteSet, x: Point) -> Union[Unique, SpecialSolution]:
    idx = _special_index(sites, x)
    return SpecialSolution(x, idx) if idx is not None else Unique(x)


def _independent_subset(vectors: Sequence[Sequence]) -> list[int]:
    chosen: list[int] = []
    for i, v in enumerate(vectors):
        if rank([vectors[j] for j in chosen] + [v]) > len(chosen):
            chosen.append(i)
    return chosen


def solve_numeric(sites: SiteSet, system: EquationSystem) -> RealizationResult:
    """Exact solution of a realization system at the given sites."""
    n = sites.n
    quads = sorted(system.quadratic_rows, key=lambda r: r.vertex)
    pivot = quads[0] if quads else None
    linear: list[tuple[IntVector, IntVector, QuadForm]] = []
    for r in system.linear_rows:
        linear.append((r.vertex, r.coefficient, r.energy))
    for r in quads[1:]:
        linear.append((r.vertex, vsub(r.coefficient, pivot.coefficient), r.energy - pivot.energy))

    formal = [c for _, c, _ in linear]
    if formal:
        chosen = _independent_subset(formal)
        target = min(len(chosen), n)
        images = [pi_map(sites, formal[i]) for i in chosen]
        if rank(images) < target:
            sub = chosen[:target]
            sub_images = [images[chosen.index(i)] for i in sub]
            combo = left_nullspace(sub_images)[0]
            return NonGenericSites(tuple(formal[i] for i in sub), tuple(combo))

    matrix = [pi_map(sites, c) for _, c, _ in linear]
    rhs = [quad_eval(sites, e) for _, _, e in linear]
    sol = solve_affine(matrix, rhs, n)
    if isinstance(sol, Inconsistent):
        return NoSolution(sol.residual, tuple(v for v, _, _ in linear), sol.combination)

    if pivot is None:
        if not sol.directions:
            return _point_result(sites, sol.particular)
        return Underdetermined(sol.particular, sol.directions)

    # |x - z|^2 = R^2 with z = -pi(L0)/2, R^2 = K0 + |pi(L0)|^2 / 4
    c0 = pi_map(sites, pivot.coefficient)
    center = vscale(Fraction(-1, 2), c0)
    radius2 = quad_eval(sites, pivot.energy) + dot(c0, c0) / 4
    if not sol.directions:
        x = sol.particular
        res = pivot.residual(sites, x)
        if res != 0:
            return NoSolution(res, (pivot.vertex,), (Fraction(1),))
        return _point_result(sites, x)
    closest = _project(center, sol)
    d = vsub(closest, center)
    slack = radius2 - dot(d, d)
    if slack < 0:
        return NoSolution(slack, (pivot.vertex,), (Fraction(1),))
    if slack == 0:
        return _point_result(sites, closest)
    return Underdetermined(sol.particular, sol.directions, closest, slack)


def _project(z: Point, space: AffineSolution) -> Point:
    """Orthogonal projection of z onto particular + span(directions)."""
    dirs = space.directions
    gram = [[dot(a, b) for b in dirs] for a in dirs]
    rhs = [dot(a, vsub(z, space.particular)) for a in dirs]
    coeffs = solve_affine(gram, rhs, len(dirs))
    assert isinstance(coeffs, AffineSolution)
    out = space.particular
    for c, a in zip(coeffs.particular, dirs):
        out = vadd(out, vscale(c, a))
    return out


@dataclass(frozen=True)
class RankInfo:
    dimension: int
    rank: int
    black_rank: int
    red_rank: int

    def as_tuple(self) -> tuple[int, int, int, int]:
        return (self.dimension, self.rank, self.black_rank, self.red_rank)


def rank_info(graph: CombGraph) -> RankInfo:
    return RankInfo(
        len(graph.vertices) - 1,
        rank(graph.non_root()),
        rank(graph.black_vertices()),
        rank(graph.red_vertices()),
    )


def is_degenerate(graph: CombGraph) -> bool:
    return rank(graph.non_root()) < len(graph.non_root())


def is_color_degenerate(graph: CombGraph) -> bool:
    """Some color has more non-root vertices than its rank."""
    info = rank_info(graph)
    return len(graph.black_vertices()) > info.black_rank or len(graph.red_vertices()) > info.red_rank


@dataclass(frozen=True)
class ResonanceCertificate:
    poly: QuadForm
    relation: tuple[int, ...]
    vertices: tuple[IntVector, ...]

    def value(self, sites: SiteSet) -> Fraction:
        return quad_eval(sites, self.poly)

    def to_json(self) -> dict:
        return {
            "poly": self.poly.to_json(),
            "text": str(self.poly),
            "relation": list(self.relation),
            "vertices": [list(v) for v in self.vertices],
        }


def relation_form(vertices: Sequence[IntVector], relation: Sequence[int]) -> QuadForm:
    m = len(vertices[0])
    total = QuadForm.zero(m)
    for c, v in zip(relation, vertices):
        if c:
            total = total + c_form(element_from_vertex(v)).scale(c)
    return total


def resonance_from_relation(
    graph: CombGraph, relation: Sequence[int], vertices: Optional[Sequence[IntVector]] = None
) -> Optional[ResonanceCertificate]:
    """sum n_a C(a) over a relation sum n_a a = 0; None when the form vanishes.

    vertices defaults to the non-root vertices in graph order.
    """
    verts = list(vertices) if vertices is not None else graph.non_root()
    if len(relation) != len(verts):
        raise ValueError("relation length must match the vertex list")
    if not any(relation):
        raise ValueError("the trivial relation certifies nothing")
    m = graph.m
    if any(sum(c * v[k] for c, v in zip(relation, verts)) != 0 for k in range(m)):
        raise ValueError("not a relation among the vertices")
    form = relation_form(verts, relation)
    if form.is_zero():
        return None
    return ResonanceCertificate(form, tuple(relation), tuple(verts))


@dataclass(frozen=True)
class AvoidableResonance:
    certificates: tuple[ResonanceCertificate, ...] = ()
    residual_samples: tuple[Fraction, ...] = ()
    reason: str = ""


@dataclass(frozen=True)
class SpecialOnly:
    index: Optional[int] = None
    reason: str = ""


@dataclass(frozen=True)
class GenericallyRealizable:
    reason: str = ""


GenericOutcome = Union[AvoidableResonance, SpecialOnly, GenericallyRealizable]


class TheoremCounterexample(RuntimeError):
    """A degenerate-resonant graph turned out allowable."""


class VertexBudgetExceeded(ValueError):
    pass


def special_row_form(row: EquationRow, index: int) -> QuadForm:
    """The row with x replaced by v_index, as a form that must vanish identically."""
    m = len(row.coefficient)
    e = unit(m, index)
    value = QuadForm.product(e, row.coefficient)
    if row.quadratic:
        value = value + QuadForm.product(e, e)
    return value - row.energy


def solves_symbolically(system: EquationSystem, index: int) -> bool:
    """x = v_index satisfies every row for all sites."""
    return all(special_row_form(r, index).is_zero() for r in system.rows)


def random_sites(n: int, m: int, rng: random.Random, spread: int = 10**6) -> SiteSet:
    return SiteSet(tuple(tuple(rng.randint(-spread, spread) for _ in range(n)) for _ in range(m)))


def generic_realization(
    graph: CombGraph,
    n: int,
    samples: int = 3,
    seed: int = 0,
    budget: Optional[int] = None,
) -> GenericOutcome:
    """Decide the generic behaviour of a graph's realization system."""
    from .degeneracy import find_relations, is_allowable

    if budget is None:
        budget = 2 * n + 2
    if len(graph.vertices) > budget:
        raise VertexBudgetExceeded(f"{len(graph.vertices)} vertices exceed the budget {budget}")
    system = build_system(graph)
    nonroot = graph.non_root()

    if is_degenerate(graph):
        certs = []
        for rel in find_relations(graph).basis:
            cert = resonance_from_relation(graph, rel)
            if cert is not None:
                certs.append(cert)
        if certs:
            return AvoidableResonance(tuple(certs), reason="relation with nonzero resonance")
        allowable, _ = is_allowable(graph)
        if allowable:
            raise TheoremCounterexample(f"degenerate-resonant allowable graph {graph.vertices}")
        return SpecialOnly(_symbolic_special(system, graph.m), reason="degenerate-resonant, not allowable")

    allowable, _ = is_allowable(graph)
    if not allowable:
        return SpecialOnly(_symbolic_special(system, graph.m), reason="not allowable")

    if len(nonroot) >= n + 1:
        idx = _symbolic_special(system, graph.m)
        if idx is not None:
            return SpecialOnly(idx, reason="root is a site for all sites")
        rng = random.Random(seed)
        values = []
        for _ in range(samples):
            sites = random_sites(n, graph.m, rng)
            result = solve_numeric(sites, system)
            if isinstance(result, NoSolution):
                values.append(result.residual)
            elif isinstance(result, (Unique, SpecialSolution, Underdetermined)):
                return GenericallyRealizable(reason="sampled sites realize the graph")
            else:
                values.append(Fraction(0))
        return AvoidableResonance(residual_samples=tuple(values), reason="overdetermined system")
    return GenericallyRealizable(reason="rank below n + 1")


def _symbolic_special(system: EquationSystem, m: int) -> Optional[int]:
    for i in range(1, m + 1):
        if solves_symbolically(system, i):
            return i
    return None


@dataclass(frozen=True)
class AffineIndependence:
    independent: bool
    combination: tuple[Fraction, ...] = ()


def affine_independence(points: Sequence[Sequence]) -> AffineIndependence:
    """Exact affine independence; the witness is a vanishing affine combination."""
    pts = [tuple(Fraction(c) for c in p) for p in points]
    if len(pts) <= 1:
        return AffineIndependence(True)
    lifted = [p + (Fraction(1),) for p in pts]
    kernel = left_nullspace(lifted)
    if not kernel:
        return AffineIndependence(True)
    return AffineIndependence(False, tuple(kernel[0]))


RESONANCE = "resonance"


@lru_cache(maxsize=None)
def screen_graphs(n: int, m: int) -> tuple[CombGraph, ...]:
    """Every graph with n + 2 vertices under every labelling of the indices.

    One root per class suffices since a root change moves a realization
    by a group element.
    """
    out = {}
    for g in enumerate_graphs(m, n + 2):
        if len(g.vertices) != n + 2:
            continue
        for perm in permutations(range(m)):
            h = permute_indices(g, perm)
            out.setdefault(h.vertices, h)
    return tuple(out[k] for k in sorted(out))


def screen_realizations(sites: SiteSet):
    """Sites at which some graph with n + 2 vertices realizes outside S.

    A component with n + 2 vertices contains such a graph, so generic sites
    must leave every one of these systems unsolvable except at a site. The
    failing graph and the kind of solution found are the witness.
    """
    from .sites import ConstraintReport, Violation

    violations = []
    for graph in screen_graphs(sites.n, sites.m):
        result = solve_numeric(sites, build_system(graph))
        if isinstance(result, (NoSolution, SpecialSolution)):
            continue
        witness = {"graph": [list(v) for v in graph.vertices], "result": type(result).__name__}
        if isinstance(result, Unique):
            witness["point"] = [str(c) for c in result.x]
        violations.append(Violation(RESONANCE, witness))
    return ConstraintReport(tuple(violations))
