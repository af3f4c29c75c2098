"""Combinatorial graphs in G_2: Cayley adjacency, root changes, canonical keys,
enumeration, and lifting of geometric components."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import permutations
from typing import Iterable, Iterator, Optional, Sequence, Union

from .algebra import (
    EdgeLabel,
    GroupElement,
    IntVector,
    Point,
    SiteSet,
    act_point,
    compose,
    edge_set,
    element_from_vertex,
    identity,
    invert,
    k_energy,
    mass,
    vadd,
    vsub,
    zero,
)
from .linalg import AffineSolution, solve_affine, transpose


def cayley_adjacent(a: Sequence[int], b: Sequence[int]) -> Optional[EdgeLabel]:
    """The label l with b = l o a, if any."""
    ma, mb = mass(a), mass(b)
    if ma not in (0, -2) or mb not in (0, -2):
        return None
    if ma == mb:
        diff = vsub(b, a)
        pos = [k for k, c in enumerate(diff) if c == 1]
        neg = [k for k, c in enumerate(diff) if c == -1]
        if len(pos) == 1 and len(neg) == 1 and sum(abs(c) for c in diff) == 2:
            return EdgeLabel.black(pos[0] + 1, neg[0] + 1)
        return None
    total = vadd(a, b)
    neg = [k for k, c in enumerate(total) if c == -1]
    if len(neg) == 2 and sum(abs(c) for c in total) == 2:
        return EdgeLabel.red(neg[0] + 1, neg[1] + 1)
    return None


@dataclass(frozen=True)
class CombEdge:
    source: IntVector
    target: IntVector
    label: EdgeLabel


@dataclass(frozen=True)
class CombGraph:
    """Full subgraph of the Cayley graph of G_2 on the given vertices (rooted at 0)."""

    m: int
    vertices: tuple[IntVector, ...]
    edges: tuple[CombEdge, ...] = field(init=False, compare=False, repr=False)

    def __post_init__(self):
        verts = tuple(sorted({tuple(int(c) for c in v) for v in self.vertices}))
        for v in verts:
            if len(v) != self.m:
                raise ValueError(f"vertex {v} has wrong length")
            if mass(v) not in (0, -2):
                raise ValueError(f"vertex {v} has mass {mass(v)}, expected 0 or -2")
        object.__setattr__(self, "vertices", verts)
        edges = []
        for idx, a in enumerate(verts):
            for b in verts[idx + 1:]:
                label = cayley_adjacent(a, b)
                if label is not None:
                    edges.append(CombEdge(a, b, label))
        object.__setattr__(self, "edges", tuple(edges))

    @property
    def root(self) -> IntVector:
        return zero(self.m)

    @property
    def has_root(self) -> bool:
        return self.root in self.vertices

    def element(self, v: Sequence[int]) -> GroupElement:
        return element_from_vertex(v)

    def non_root(self) -> list[IntVector]:
        return [v for v in self.vertices if any(v)]

    def black_vertices(self) -> list[IntVector]:
        return [v for v in self.non_root() if mass(v) == 0]

    def red_vertices(self) -> list[IntVector]:
        return [v for v in self.non_root() if mass(v) == -2]

    def adjacency(self) -> dict[IntVector, list[tuple[IntVector, EdgeLabel]]]:
        adj: dict[IntVector, list] = {v: [] for v in self.vertices}
        for e in self.edges:
            adj[e.source].append((e.target, e.label))
            adj[e.target].append((e.source, e.label))
        return adj

    def is_connected(self) -> bool:
        if not self.vertices:
            return False
        adj = self.adjacency()
        seen = {self.vertices[0]}
        queue = deque(seen)
        while queue:
            v = queue.popleft()
            for w, _ in adj[v]:
                if w not in seen:
                    seen.add(w)
                    queue.append(w)
        return len(seen) == len(self.vertices)

    def to_json(self) -> dict:
        return {"m": self.m, "vertices": [list(v) for v in self.vertices]}

    @staticmethod
    def from_json(data: dict) -> "CombGraph":
        return full_subgraph(data["m"], [tuple(v) for v in data["vertices"]])


def full_subgraph(m: int, vertices: Iterable[Sequence[int]]) -> CombGraph:
    g = CombGraph(m, tuple(tuple(v) for v in vertices))
    if not g.has_root:
        raise ValueError("a combinatorial graph must contain 0")
    return g


def translate_root(graph: CombGraph, g: Sequence[int]) -> CombGraph:
    """The equivalent graph with root moved to vertex g: a -> a o g^-1."""
    g = tuple(g)
    if g not in graph.vertices:
        raise ValueError("new root must be a vertex")
    ginv = invert(element_from_vertex(g))
    return CombGraph(graph.m, tuple(compose(element_from_vertex(a), ginv).vector for a in graph.vertices))


def permute_indices(graph: CombGraph, perm: Sequence[int]) -> CombGraph:
    """Relabel e_i -> e_perm[i] (0-based perm)."""
    m = graph.m
    out = []
    for v in graph.vertices:
        w = [0] * m
        for i, c in enumerate(v):
            w[perm[i]] = c
        out.append(tuple(w))
    return CombGraph(m, tuple(out))


def canonical_key(graph: CombGraph) -> tuple:
    """Minimal sorted vertex tuple over root changes and index permutations."""
    m = graph.m
    best = None
    perms = list(permutations(range(m)))
    for r in graph.vertices:
        rooted = translate_root(graph, r) if any(r) else graph
        verts = rooted.vertices
        for perm in perms:
            cand = tuple(sorted(tuple(v[perm.index(k)] for k in range(m)) for v in verts))
            if best is None or cand < best:
                best = cand
    return (m, best)


def _fast_key(m: int, verts: Sequence[IntVector], perms) -> tuple:
    """canonical_key on raw vertex tuples, avoiding graph construction."""
    best = None
    elements = [element_from_vertex(v) for v in verts]
    for r in elements:
        rinv = invert(r)
        rooted = [compose(a, rinv).vector for a in elements]
        for perm in perms:
            cand = tuple(sorted(tuple(v[k] for k in perm) for v in rooted))
            if best is None or cand < best:
                best = cand
    return best


def enumerate_graphs(
    m: int, max_vertices: int, coeff_bound: Optional[int] = None
) -> Iterator[CombGraph]:
    """Every connected combinatorial graph up to equivalence with <= max_vertices vertices.

    Level-wise growth: each class with k + 1 vertices contains a class with k
    vertices (drop a non-cut vertex and re-root), so extending all canonical
    representatives by one Cayley neighbor reaches every class.
    """
    if max_vertices < 1:
        return
    if coeff_bound is None:
        coeff_bound = 2 * (max_vertices - 1)
    # inverse permutations so that v[k] for k in perm realizes e_i -> e_perm[i]
    perms = [tuple(p.index(k) for k in range(m)) for p in permutations(range(m))]
    labels = [lab.element(m) for lab in edge_set(m)]
    level = {(zero(m),)}
    yield CombGraph(m, (zero(m),))
    for size in range(2, max_vertices + 1):
        seen_raw: set[frozenset] = set()
        nxt: dict[tuple, tuple] = {}
        for verts in sorted(level):
            vset = set(verts)
            for a in verts:
                ea = element_from_vertex(a)
                for lab in labels:
                    b = compose(lab, ea).vector
                    if b in vset or sum(abs(c) for c in b) > coeff_bound:
                        continue
                    raw = frozenset(vset | {b})
                    if raw in seen_raw:
                        continue
                    seen_raw.add(raw)
                    key = _fast_key(m, tuple(raw), perms)
                    if key not in nxt:
                        nxt[key] = key
        level = set(nxt)
        for key in sorted(level):
            yield CombGraph(m, key)


def path_element(labels: Sequence[EdgeLabel], m: Optional[int] = None) -> GroupElement:
    """l_k o ... o l_1 for the path l_1, ..., l_k."""
    if m is None:
        m = max(max(lab.i, lab.j) for lab in labels) if labels else 0
    g = identity(m)
    for lab in labels:
        g = compose(lab.element(m), g)
    return g


def preimage(sites: SiteSet, x: Sequence) -> tuple[Fraction, ...]:
    """Some rational p with -pi(p) = x."""
    matrix = transpose(sites.sites)
    sol = solve_affine(matrix, [-Fraction(c) for c in x], sites.m)
    if not isinstance(sol, AffineSolution):
        raise ValueError("x has no rational preimage; the sites do not span")
    return sol.particular


@dataclass(frozen=True)
class Lifted:
    graph: CombGraph
    vertex_map: dict

    def image_points(self) -> set[Point]:
        return set(self.vertex_map.values())


@dataclass(frozen=True)
class CircuitUnravel:
    witness: GroupElement
    first: GroupElement
    second: GroupElement
    point: Point


@dataclass(frozen=True)
class BudgetExceeded:
    budget: int
    explored: int


LiftOutcome = Union[Lifted, CircuitUnravel, BudgetExceeded]


def default_budget(n: int) -> int:
    return 2 * n + 2


def lift_component(sites: SiteSet, x: Sequence, budget: Optional[int] = None) -> LiftOutcome:
    """BFS in G_2 from the identity along K-preserving steps.

    A step l from g is kept when K(l o g o p) = K(g o p) with -pi(p) = x;
    vertex g maps to the point g x.
    """
    if budget is None:
        budget = default_budget(sites.n)
    m = sites.m
    x = tuple(Fraction(c) for c in x)
    p = GroupElement(preimage(sites, x))
    labels = [lab.element(m) for lab in edge_set(m)]
    start = identity(m)
    energy = k_energy(sites, p)
    by_point: dict[Point, GroupElement] = {x: start}
    order = [start]
    queue = deque([start])
    while queue:
        g = queue.popleft()
        for lab in labels:
            h = compose(lab, g)
            if k_energy(sites, compose(h, p)) != energy:
                continue
            q = act_point(h, x, sites)
            known = by_point.get(q)
            if known is not None:
                if known != h:
                    return CircuitUnravel(compose(invert(known), h), known, h, q)
                continue
            by_point[q] = h
            order.append(h)
            if len(order) > budget:
                return BudgetExceeded(budget, len(order))
            queue.append(h)
    graph = CombGraph(m, tuple(g.vector for g in order))
    return Lifted(graph, {g.vector: act_point(g, x, sites) for g in order})


def geometric_image(sites: SiteSet, graph: CombGraph, x: Sequence) -> tuple[set[Point], set[tuple]]:
    """Points g x and edge pairs of a combinatorial graph mapped at root x."""
    x = tuple(Fraction(c) for c in x)
    pts = {v: act_point(element_from_vertex(v), x, sites) for v in graph.vertices}
    edges = set()
    for e in graph.edges:
        a, b = pts[e.source], pts[e.target]
        edges.add((min(a, b), max(a, b)))
    return set(pts.values()), edges
