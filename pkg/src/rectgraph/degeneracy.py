"""Relations among graph vertices, degenerate-resonant graphs, encoding graphs,
index typing and an exhaustive allowability check.

Sign conventions for a tree edge l with endpoints near (root side) and far:
a and b are the endpoints with a + b = l when l is red (a the red one) and
a = b + l when l is black; lambda = 1 when far - near = l (always 1 for
red edges); sigma of an edge is the color of its far endpoint.
"""

from __future__ import annotations

import os
from collections import Counter, deque
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations, product
from typing import Iterable, Optional, Sequence, Union

from .algebra import (
    BLACK,
    RED,
    EdgeLabel,
    IntVector,
    QuadForm,
    c_form,
    compose,
    element_from_vertex,
    format_vector,
    invert,
    mass,
    unit,
    vadd,
    vscale,
    vsub,
    zero,
)
from .combinatorial import CombGraph, cayley_adjacent, enumerate_graphs, translate_root
from .linalg import integer_kernel, lattice_index, rank
from .realization import ResonanceCertificate, rank_info, resonance_from_relation


# relation lattices and resonance


@dataclass(frozen=True)
class RelationLattice:
    """Integer relations sum n_a a = 0 among the listed vertices."""

    vertices: tuple[IntVector, ...]
    basis: tuple[tuple[int, ...], ...]

    @property
    def is_empty(self) -> bool:
        return not self.basis

    @property
    def rank(self) -> int:
        return len(self.basis)

    def to_json(self) -> dict:
        return {"vertices": [list(v) for v in self.vertices], "basis": [list(b) for b in self.basis]}


def find_relations(graph: CombGraph, vertices: Optional[Sequence[IntVector]] = None) -> RelationLattice:
    """Kernel basis of the vertex matrix; vertices default to the non-root ones."""
    verts = tuple(tuple(v) for v in (vertices if vertices is not None else graph.non_root()))
    return RelationLattice(verts, tuple(integer_kernel(verts)))


def resonance_certificates(graph: CombGraph) -> list[ResonanceCertificate]:
    """Nonzero forms sum n_a C(a) over the kernel basis."""
    lattice = find_relations(graph)
    out = []
    for rel in lattice.basis:
        cert = resonance_from_relation(graph, rel, lattice.vertices)
        if cert is not None:
            out.append(cert)
    return out


def is_degenerate_resonant(graph: CombGraph) -> bool:
    """Some relation exists and every relation has zero resonance form.

    The map n -> sum n_a C(a) is linear, so checking a basis suffices.
    """
    lattice = find_relations(graph)
    if lattice.is_empty:
        return False
    return all(resonance_from_relation(graph, rel, lattice.vertices) is None for rel in lattice.basis)


def _forbidden_vertex(v: IntVector) -> bool:
    """v = -2e_i or v = -3e_i + e_j."""
    nonzero = sorted(c for c in v if c)
    return nonzero == [-2] or nonzero == [-3, 1]


def is_allowable(graph: CombGraph) -> tuple[bool, Optional[tuple[IntVector, IntVector]]]:
    """False with (root, vertex) when some root change shows -2e_i or -3e_i + e_j."""
    for r in graph.vertices:
        rooted = translate_root(graph, r) if any(r) else graph
        for v in rooted.vertices:
            if _forbidden_vertex(v):
                return False, (r, v)
    return True, None


# rooted trees


def _color(v: Sequence[int]) -> int:
    return BLACK if mass(v) == 0 else RED


@dataclass(frozen=True)
class TreeEdge:
    """far = label o near."""

    near: IntVector
    far: IntVector
    label: EdgeLabel

    @property
    def theta(self) -> int:
        return -1 if self.label.is_red else 1

    @property
    def sigma(self) -> int:
        return _color(self.far)

    def step(self) -> IntVector:
        """lambda l for any orientation of l: far - near if black, l if red."""
        if self.label.is_red:
            return self.label.vector(len(self.near))
        return vsub(self.far, self.near)

    def ends(self, ell: Sequence[int]) -> tuple[IntVector, IntVector, int]:
        """(a, b, lambda) with respect to the oriented edge vector ell."""
        ell = tuple(ell)
        if self.label.is_red:
            if ell != self.label.vector(len(ell)):
                raise ValueError("red edge vector mismatch")
            a, b = (self.near, self.far) if _color(self.near) == RED else (self.far, self.near)
            return a, b, 1
        d = vsub(self.far, self.near)
        if d == ell:
            return self.far, self.near, 1
        if vscale(-1, d) == ell:
            return self.near, self.far, -1
        raise ValueError("black edge vector mismatch")


@dataclass(frozen=True)
class RootedTree:
    """A spanning tree with the root translated to 0 and edges oriented away from it."""

    m: int
    edges: tuple[TreeEdge, ...]
    parent: dict = field(init=False, compare=False, repr=False)

    def __post_init__(self):
        parent = {}
        for e in self.edges:
            if e.far in parent:
                raise ValueError("vertex reached twice; not a tree")
            parent[e.far] = e
        if self.root in parent:
            raise ValueError("root has a parent")
        object.__setattr__(self, "parent", parent)

    @property
    def root(self) -> IntVector:
        return zero(self.m)

    @property
    def vertices(self) -> list[IntVector]:
        return [self.root] + [e.far for e in self.edges]

    def color(self, v: Sequence[int]) -> int:
        return _color(v)

    def path(self, v: Sequence[int]) -> list[TreeEdge]:
        """Edges from the root to v."""
        out = []
        v = tuple(v)
        while v != self.root:
            e = self.parent[v]
            out.append(e)
            v = e.near
        return out[::-1]

    def labels(self) -> list[EdgeLabel]:
        return [e.label for e in self.edges]

    def edge_with(self, label: EdgeLabel) -> TreeEdge:
        for e in self.edges:
            if e.label == label or (not label.is_red and e.label == label.inverse()):
                return e
        raise KeyError(f"no tree edge labelled {label}")

    def reroot(self, v: Sequence[int]) -> "RootedTree":
        """The same tree seen from vertex v (vertices a -> a o v^-1)."""
        v = tuple(v)
        if v not in set(self.vertices):
            raise ValueError("new root must be a tree vertex")
        vinv = invert(element_from_vertex(v))
        pairs = [
            (compose(element_from_vertex(e.near), vinv).vector, compose(element_from_vertex(e.far), vinv).vector)
            for e in self.edges
        ]
        return tree_from_pairs(self.m, pairs)

    def vertex_formula(self, v: Sequence[int]) -> IntVector:
        """sigma_v times the sum over the root path of sigma_l lambda_l l."""
        total = zero(self.m)
        for e in self.path(v):
            total = vadd(total, vscale(e.sigma, e.step()))
        return vscale(_color(v), total)

    def encoding_graph(self) -> "EncodingGraph":
        return encoding_graph(self.labels())

    def to_json(self) -> dict:
        return {
            "m": self.m,
            "edges": [{"near": list(e.near), "far": list(e.far), "label": str(e.label)} for e in self.edges],
        }


def tree_from_pairs(m: int, pairs: Iterable[tuple[Sequence[int], Sequence[int]]]) -> RootedTree:
    """Orient the undirected edges (a, b) away from 0 by BFS, lowest vertex first."""
    adj: dict[IntVector, list[IntVector]] = {}
    for a, b in pairs:
        a, b = tuple(a), tuple(b)
        if cayley_adjacent(a, b) is None:
            raise ValueError(f"{a} and {b} are not adjacent")
        adj.setdefault(a, []).append(b)
        adj.setdefault(b, []).append(a)
    root = zero(m)
    if adj and root not in adj:
        raise ValueError("the tree must contain 0")
    seen = {root}
    queue = deque([root])
    edges = []
    while queue:
        v = queue.popleft()
        for w in sorted(adj.get(v, [])):
            if w in seen:
                continue
            seen.add(w)
            edges.append(TreeEdge(v, w, cayley_adjacent(v, w)))
            queue.append(w)
    if len(seen) != len(adj) and adj:
        raise ValueError("edges do not form a connected graph")
    if len(edges) != sum(len(x) for x in adj.values()) // 2:
        raise ValueError("edges contain a cycle")
    return RootedTree(m, tuple(edges))


def maximal_tree(graph: CombGraph, root: Optional[Sequence[int]] = None) -> RootedTree:
    """Deterministic BFS spanning tree from root (default 0), lowest vertex first."""
    g = graph
    if root is not None and any(root):
        g = translate_root(graph, root)
    if not g.is_connected():
        raise ValueError("graph is not connected")
    adj = g.adjacency()
    start = zero(g.m)
    seen = {start}
    queue = deque([start])
    edges = []
    while queue:
        v = queue.popleft()
        for w, _ in sorted(adj[v]):
            if w in seen:
                continue
            seen.add(w)
            edges.append(TreeEdge(v, w, cayley_adjacent(v, w)))
            queue.append(w)
    return RootedTree(g.m, tuple(edges))


# encoding graphs


@dataclass(frozen=True, order=True)
class EncodingEdge:
    """black (i, j) stands for e_i - e_j, red (i, j) for -e_i - e_j with i < j."""

    i: int
    j: int
    color: str

    def __post_init__(self):
        if self.color not in ("black", "red"):
            raise ValueError(f"unknown color {self.color!r}")
        if self.i == self.j:
            raise ValueError("edge indices must differ")
        if self.color == "red" and self.i > self.j:
            i, j = self.j, self.i
            object.__setattr__(self, "i", i)
            object.__setattr__(self, "j", j)

    @property
    def theta(self) -> int:
        return -1 if self.color == "red" else 1

    def vector(self, m: int) -> IntVector:
        return self.label().vector(m)

    def label(self) -> EdgeLabel:
        return EdgeLabel(self.color, self.i, self.j)

    def undirected(self) -> tuple[int, int, str]:
        return (min(self.i, self.j), max(self.i, self.j), self.color)


@dataclass(frozen=True)
class EncodingGraph:
    edges: tuple[EncodingEdge, ...]

    @property
    def indices(self) -> list[int]:
        return sorted({k for e in self.edges for k in (e.i, e.j)})

    @property
    def m(self) -> int:
        return max(self.indices, default=0)

    def valency(self, i: int) -> int:
        return sum((e.i == i) + (e.j == i) for e in self.edges)

    def vectors(self, m: Optional[int] = None) -> list[IntVector]:
        m = self.m if m is None else m
        return [e.vector(m) for e in self.edges]

    def neighbors(self, i: int) -> list[tuple[int, EncodingEdge]]:
        out = []
        for e in self.edges:
            if e.i == i:
                out.append((e.j, e))
            elif e.j == i:
                out.append((e.i, e))
        return out

    def is_connected(self, skip: Optional[int] = None) -> bool:
        """Connectivity of the index graph, optionally without edge number skip."""
        idx = self.indices
        if not idx:
            return True
        seen = {idx[0]}
        queue = deque(seen)
        while queue:
            v = queue.popleft()
            for k, e in enumerate(self.edges):
                if k == skip or v not in (e.i, e.j):
                    continue
                w = e.j if e.i == v else e.i
                if w not in seen:
                    seen.add(w)
                    queue.append(w)
        return len(seen) == len(idx)

    def cyclomatic_number(self) -> int:
        return len(self.edges) - len(self.indices) + 1 if self.is_connected() else -1

    def has_repeated_edge(self) -> bool:
        keys = [e.undirected() for e in self.edges]
        return len(keys) != len(set(keys))

    def subgraph(self, keep: Iterable[int]) -> "EncodingGraph":
        keep = set(keep)
        return EncodingGraph(tuple(e for k, e in enumerate(self.edges) if k in keep))

    def to_dot(self, name: str = "encoding") -> str:
        lines = [f"graph {name} {{"]
        for i in self.indices:
            lines.append(f'  {i} [label="{i}"];')
        for e in self.edges:
            if e.color == "red":
                lines.append(f'  {e.i} -- {e.j} [color=red, style=bold, label="="];')
            else:
                lines.append(f'  {e.i} -- {e.j} [label="e{e.i}-e{e.j}"];')
        lines.append("}")
        return "\n".join(lines)

    def to_json(self) -> dict:
        return {"edges": [[e.i, e.j, e.color] for e in self.edges]}


def encoding_graph(edges: Iterable[Union[EdgeLabel, EncodingEdge]]) -> EncodingGraph:
    out = []
    for e in edges:
        if isinstance(e, EncodingEdge):
            out.append(e)
        else:
            out.append(EncodingEdge(e.i, e.j, e.kind))
    return EncodingGraph(tuple(out))


def circuit_parity(circuit: Iterable[Union[EdgeLabel, EncodingEdge]]) -> str:
    """'even' or 'odd' by the number of red edges of a closed walk."""
    graph = encoding_graph(circuit)
    if not graph.edges:
        raise ValueError("empty circuit")
    if any(graph.valency(i) % 2 for i in graph.indices) or not graph.is_connected():
        raise ValueError("edges do not form a closed walk")
    reds = sum(e.color == "red" for e in graph.edges)
    return "even" if reds % 2 == 0 else "odd"


# signed relations


@dataclass(frozen=True)
class SignedRelation:
    """sum delta_i l_i = target with delta_i in {+-1, +-2}."""

    edges: tuple[IntVector, ...]
    coefficients: tuple[int, ...]
    target: IntVector

    def __post_init__(self):
        if len(self.edges) != len(self.coefficients):
            raise ValueError("one coefficient per edge")
        if any(c not in (1, -1, 2, -2) for c in self.coefficients):
            raise ValueError(f"coefficients must be +-1 or +-2, got {self.coefficients}")
        total = zero(len(self.target))
        for c, e in zip(self.coefficients, self.edges):
            total = vadd(total, vscale(c, e))
        if total != tuple(self.target):
            raise ValueError("sum delta_i l_i differs from the target")

    def to_json(self) -> dict:
        return {
            "edges": [format_vector(e) for e in self.edges],
            "coefficients": list(self.coefficients),
            "target": format_vector(self.target),
        }


def _check_support(graph: EncodingGraph):
    if not graph.edges:
        raise ValueError("empty encoding graph")
    if not graph.is_connected():
        raise ValueError("encoding graph is not connected")
    low = [i for i in graph.indices if graph.valency(i) < 2]
    if low:
        raise ValueError(f"indices {low} have valency < 2")


def minimal_relation(graph: EncodingGraph) -> Optional[SignedRelation]:
    """The unique relation among the edge vectors, or None when they are independent.

    Computed from the integer kernel; the sign makes the first coefficient positive.
    """
    _check_support(graph)
    m = graph.m
    vectors = graph.vectors(m)
    kernel = integer_kernel(vectors)
    if not kernel:
        return None
    if len(kernel) > 1:
        raise ValueError("edges carry more than one independent relation")
    coeffs = list(kernel[0])
    first = next(c for c in coeffs if c)
    if first < 0:
        coeffs = [-c for c in coeffs]
    if any(c == 0 for c in coeffs):
        raise ValueError("some edge is not in the relation; the graph is not minimal")
    return SignedRelation(tuple(vectors), tuple(coeffs), zero(m))


def circuit_order(graph: EncodingGraph) -> list[tuple[int, int, int]]:
    """Walk a single circuit from its lowest index: (edge number, from, to) per step."""
    _check_support(graph)
    if any(graph.valency(i) != 2 for i in graph.indices):
        raise ValueError("not a single circuit")
    start = graph.indices[0]
    used: set[int] = set()
    walk = []
    v = start
    while len(used) < len(graph.edges):
        options = [k for k, e in enumerate(graph.edges) if k not in used and v in (e.i, e.j)]
        k = min(options)
        e = graph.edges[k]
        w = e.j if e.i == v else e.i
        walk.append((k, v, w))
        used.add(k)
        v = w
    if v != start:
        raise ValueError("not a single circuit")
    return walk


def circuit_combination(graph: EncodingGraph) -> SignedRelation:
    """Telescoping signs along a circuit: delta_1 = 1, delta_{i+1} = theta_{i+1} delta_i.

    Writing each step as theta_i e_{c_i} - e_{c_{i+1}} the sum collapses to
    0 for an even circuit and to 2 theta_1 e_{c_1} for an odd one.
    """
    m = graph.m
    walk = circuit_order(graph)
    coeffs = [0] * len(graph.edges)
    delta = None
    total = zero(m)
    for k, a, b in walk:
        e = graph.edges[k]
        theta = e.theta
        step = vsub(vscale(theta, unit(m, a)), unit(m, b))
        delta = 1 if delta is None else theta * delta
        total = vadd(total, vscale(delta, step))
        # express delta * step through the stored edge vector
        sign = 1 if e.vector(m) == step else -1
        coeffs[k] = delta * sign
    return SignedRelation(tuple(graph.vectors(m)), tuple(coeffs), total)


def odd_circuit_combination(graph: EncodingGraph) -> SignedRelation:
    """sum delta_i l_i = +-2 e_i for an odd circuit."""
    if circuit_parity(graph.edges) != "odd":
        raise ValueError("circuit is even")
    return circuit_combination(graph)


@dataclass(frozen=True)
class ZetaMap:
    zeta: dict
    case: int
    rank: int
    index: int


def zeta_map(graph: EncodingGraph) -> ZetaMap:
    """zeta(e_first) = 1 and zeta(e_j) = theta zeta(e_i) along edges.

    Case 1: zeta is consistent and the edges span its kernel.
    Case 2: some circuit is odd; the edges then have full rank and span an
    index-2 sublattice.
    """
    if not graph.is_connected():
        raise ValueError("encoding graph is not connected")
    idx = graph.indices
    zeta = {idx[0]: 1}
    consistent = True
    queue = deque([idx[0]])
    while queue:
        v = queue.popleft()
        for w, e in graph.neighbors(v):
            val = e.theta * zeta[v]
            if w not in zeta:
                zeta[w] = val
                queue.append(w)
            elif zeta[w] != val:
                consistent = False
    vectors = [tuple(vec[i - 1] for i in idx) for vec in graph.vectors()]
    r = rank(vectors)
    return ZetaMap(zeta, 1 if consistent else 2, r, lattice_index(vectors))


# the C_u operator and index typing


def cu_extract(form: QuadForm, u: int) -> tuple[Fraction, ...]:
    """Coefficients of the monomials e_u e_h, h != u, as a vector over h."""
    out = [Fraction(0)] * form.m
    k = u - 1
    for (h, l), c in form.terms:
        if h == l:
            continue
        if h == k:
            out[l] += c
        elif l == k:
            out[h] += c
    return tuple(out)


def edge_term(edge: TreeEdge, ell: Sequence[int]) -> QuadForm:
    """C(a) - theta C(b) for a tree edge and its oriented vector."""
    a, b, _ = edge.ends(ell)
    return c_form(element_from_vertex(a)) - c_form(element_from_vertex(b)).scale(edge.theta)


# (theta_{u-1}, theta_u, sigma_{u-1}, lambda_{u-1}, lambda_u) -> (case, coefficient, neighbor)
# bar L_u = coefficient * delta_u * e_neighbor, neighbor -1 for u - 1 and +1 for u + 1
INDEX_CASES: dict[tuple[int, int, int, int, int], tuple[int, int, int]] = {
    (-1, -1, 1, 1, 1): (1, 0, 0),
    (-1, -1, -1, 1, 1): (2, 2, -1),
    (-1, 1, 1, 1, 1): (3, 0, 0),
    (-1, 1, -1, 1, 1): (4, -2, -1),
    (-1, 1, 1, 1, -1): (5, 2, -1),
    (-1, 1, -1, 1, -1): (6, 0, 0),
    (1, -1, 1, 1, 1): (7, 0, 0),
    (1, -1, -1, 1, 1): (8, -2, -1),
    (1, -1, 1, -1, 1): (9, -2, -1),
    (1, -1, -1, -1, 1): (10, 0, 0),
    (1, 1, 1, 1, 1): (11, 0, 0),
    (1, 1, -1, 1, 1): (12, 2, -1),
    (1, 1, 1, -1, 1): (13, 2, -1),
    (1, 1, -1, -1, 1): (14, 0, 0),
    (1, 1, 1, 1, -1): (15, -2, -1),
    (1, 1, -1, 1, -1): (16, 0, 0),
    (1, 1, 1, -1, -1): (17, 0, 0),
    (1, 1, -1, -1, -1): (18, -2, -1),
}


@dataclass(frozen=True)
class IndexType:
    kind: str
    case: int
    config: tuple[int, int, int, int, int]
    value: tuple[Fraction, ...]

    def to_json(self) -> dict:
        return {"kind": self.kind, "case": self.case, "config": list(self.config), "value": [str(c) for c in self.value]}


@dataclass(frozen=True)
class IndexData:
    """Everything the index typing needs, in the rooting where l_u starts at the root."""

    tree: RootedTree
    prev: int
    next: int
    ell_prev: IntVector
    ell_u: IntVector
    edge_prev: TreeEdge
    edge_u: TreeEdge
    delta_prev: int
    delta_u: int

    @property
    def config(self) -> tuple[int, int, int, int, int]:
        _, _, lam_prev = self.edge_prev.ends(self.ell_prev)
        _, _, lam_u = self.edge_u.ends(self.ell_u)
        return (self.edge_prev.theta, self.edge_u.theta, self.edge_prev.sigma, lam_prev, lam_u)


def _flip_to(vec: IntVector, coeff: int, index: int, value: int) -> tuple[IntVector, int]:
    """Rewrite coeff * vec as delta * l with l having entry value at index."""
    if vec[index - 1] == value:
        return vec, coeff
    flipped = vscale(-1, vec)
    if flipped[index - 1] != value or mass(flipped) not in (0, -2):
        raise ValueError(f"cannot orient {format_vector(vec)}")
    return flipped, -coeff


def index_data(tree: RootedTree, rel: SignedRelation, u: int, previous: Optional[int] = None) -> IndexData:
    """Locate l_{u-1} = theta e_prev - e_u and l_u = theta e_u - e_next and re-root at the far end of l_u."""
    m = tree.m
    at_u = [(vec, c) for vec, c in zip(rel.edges, rel.coefficients) if vec[u - 1] != 0]
    if len(at_u) != 2:
        raise ValueError(f"index {u} must have valency 2 in the relation")
    others = []
    for vec, _ in at_u:
        other = [k + 1 for k, c in enumerate(vec) if c and k != u - 1]
        if len(other) != 1:
            raise ValueError("relation edges must be black or red labels")
        others.append(other[0])
    if previous is None:
        previous = min(others)
    if previous not in others:
        raise ValueError(f"{previous} is not adjacent to {u}")
    k_prev = others.index(previous)
    (vp, cp), (vu, cu_) = at_u[k_prev], at_u[1 - k_prev]
    nxt = others[1 - k_prev]
    ell_prev, d_prev = _flip_to(vp, cp, u, -1)
    if mass(vu) == -2:
        ell_u, d_u = vu, cu_
    else:
        ell_u, d_u = _flip_to(vu, cu_, u, 1)
    lab_prev = cayley_adjacent(zero(m), ell_prev)
    lab_u = cayley_adjacent(zero(m), ell_u)
    e_prev = tree.edge_with(lab_prev)
    e_u = tree.edge_with(lab_u)
    # root at the endpoint of l_u away from l_{u-1}
    dist = _tree_distances(tree, e_prev.near)
    far_end = max((e_u.near, e_u.far), key=lambda v: dist[v])
    rerooted = tree.reroot(far_end)
    return IndexData(
        rerooted,
        previous,
        nxt,
        ell_prev,
        ell_u,
        rerooted.edge_with(lab_prev),
        rerooted.edge_with(lab_u),
        d_prev,
        d_u,
    )


def _tree_distances(tree: RootedTree, start: IntVector) -> dict:
    adj: dict = {}
    for e in tree.edges:
        adj.setdefault(e.near, []).append(e.far)
        adj.setdefault(e.far, []).append(e.near)
    dist = {start: 0}
    queue = deque([start])
    while queue:
        v = queue.popleft()
        for w in adj.get(v, []):
            if w not in dist:
                dist[w] = dist[v] + 1
                queue.append(w)
    return dist


def classify_index_type(
    tree: RootedTree, rel: SignedRelation, u: int, previous: Optional[int] = None
) -> IndexType:
    """TypeI iff sigma_{u-1} = lambda_{u-1} lambda_u; otherwise the table's +-2 delta_u e_{u+-1}."""
    data = index_data(tree, rel, u, previous)
    config = data.config
    case, coef, side = INDEX_CASES[config]
    value = [Fraction(0)] * tree.m
    if coef:
        target = data.prev if side == -1 else data.next
        value[target - 1] = Fraction(coef * data.delta_u)
    _, _, sigma, lam_p, lam_u = config
    kind = "I" if sigma == lam_p * lam_u else "II"
    return IndexType(kind, case, config, tuple(value))


def direct_bar_l(tree: RootedTree, rel: SignedRelation, u: int, previous: Optional[int] = None) -> tuple[Fraction, ...]:
    """bar L_u from the resonance terms of l_{u-1} and l_u, without the table.

    L_u = C_u(delta_{u-1} term_{u-1} + delta_u term_u) and
    bar L_u = L_u + gamma_{u-1} bar a_{u-1}, where bar a_{u-1} collects the
    path edges strictly between l_u and l_{u-1}.
    """
    data = index_data(tree, rel, u, previous)
    t = data.tree
    total = edge_term(data.edge_prev, data.ell_prev).scale(data.delta_prev) + edge_term(data.edge_u, data.ell_u).scale(
        data.delta_u
    )
    l_u = cu_extract(total, u)
    a_prev, _, _ = data.edge_prev.ends(data.ell_prev)
    path = t.path(data.edge_prev.far)
    middle = [e for e in path if e not in (data.edge_prev, data.edge_u)]
    bar_a = zero(t.m)
    for e in middle:
        bar_a = vadd(bar_a, vscale(e.sigma, e.step()))
    bar_a = vscale(_color(a_prev), bar_a)
    gamma = -data.delta_prev if data.edge_prev.theta == -1 else data.edge_prev.sigma * data.delta_prev
    return tuple(x + gamma * y for x, y in zip(l_u, bar_a))


@dataclass(frozen=True)
class CaseCheck:
    case: int
    config: tuple[int, int, int, int, int]
    delta: int
    middle: str
    table: tuple[Fraction, ...]
    direct: tuple[Fraction, ...]

    @property
    def agrees(self) -> bool:
        return self.table == self.direct


def _middle_paths() -> list[tuple[str, list[tuple[EdgeLabel, int]]]]:
    """Middle segments on indices 4, 5: (name, [(label, lambda)])."""
    return [
        ("none", []),
        ("red", [(EdgeLabel.red(4, 5), 1)]),
        ("black+", [(EdgeLabel.black(4, 5), 1)]),
        ("black-", [(EdgeLabel.black(4, 5), -1)]),
        ("red,black", [(EdgeLabel.red(4, 5), 1), (EdgeLabel.black(4, 5), 1)]),
    ]


def _walk(v: IntVector, vec: IntVector, red: bool, lam: int) -> IntVector:
    if red:
        return vsub(vec, v)
    return vadd(v, vscale(lam, vec))


def sweep_index_cases(deltas: Sequence[int] = (1, -1, 2, -2)) -> list[CaseCheck]:
    """Every color/orientation configuration on explicit trees, table against direct computation.

    Indices u - 1, u, u + 1 are 1, 2, 3 and the middle segment uses 4, 5.
    """
    m = 5
    out = []
    for theta_p, theta_u, lam_p, lam_u in product((1, -1), repeat=4):
        if (theta_p == -1 and lam_p == -1) or (theta_u == -1 and lam_u == -1):
            continue
        ell_prev = vsub(vscale(theta_p, unit(m, 1)), unit(m, 2))
        ell_u = vsub(vscale(theta_u, unit(m, 2)), unit(m, 3))
        for name, middle in _middle_paths():
            for delta_prev in deltas:
                root = zero(m)
                s = _walk(root, ell_u, theta_u == -1, lam_u)
                pairs = [(root, s)]
                y = s
                mid_edges = []
                for label, lam in middle:
                    nxt = _walk(y, label.vector(m), label.is_red, lam)
                    pairs.append((y, nxt))
                    mid_edges.append(vsub(nxt, y) if not label.is_red else label.vector(m))
                    y = nxt
                x = _walk(y, ell_prev, theta_p == -1, lam_p)
                pairs.append((y, x))
                tree = tree_from_pairs(m, pairs)
                delta_u = theta_u * delta_prev
                edges = [ell_prev, ell_u] + mid_edges
                coeffs = [delta_prev, delta_u] + [1] * len(mid_edges)
                target = zero(m)
                for c, e in zip(coeffs, edges):
                    target = vadd(target, vscale(c, e))
                rel = SignedRelation(tuple(edges), tuple(coeffs), target)
                typed = classify_index_type(tree, rel, 2, previous=1)
                direct = direct_bar_l(tree, rel, 2, previous=1)
                out.append(CaseCheck(typed.case, typed.config, delta_prev, name, typed.value, direct))
    return out


# exhaustive check that degenerate-resonant graphs are not allowable


@dataclass(frozen=True)
class GraphClass:
    vertices: tuple[IntVector, ...]
    rank: int
    degenerate: bool
    resonant: bool
    allowable: bool
    witness: Optional[tuple[IntVector, IntVector]]

    @property
    def key(self) -> tuple[int, int, bool, bool, bool]:
        return (len(self.vertices), self.rank, self.degenerate, self.resonant, self.allowable)

    @property
    def degenerate_resonant(self) -> bool:
        return self.degenerate and self.resonant


def classify_graph(m: int, vertices: Sequence[IntVector]) -> GraphClass:
    """Rank, degeneracy, resonance (vacuous without relations) and allowability."""
    graph = CombGraph(m, tuple(vertices))
    lattice = find_relations(graph)
    degenerate = not lattice.is_empty
    resonant = all(resonance_from_relation(graph, r, lattice.vertices) is None for r in lattice.basis)
    allowable, witness = is_allowable(graph)
    return GraphClass(graph.vertices, rank_info(graph).rank, degenerate, resonant, allowable, witness)


def _classify_chunk(args: tuple[int, list[tuple[IntVector, ...]]]) -> list[GraphClass]:
    m, chunk = args
    return [classify_graph(m, verts) for verts in chunk]


def _connected(vertices: Sequence[IntVector]) -> bool:
    verts = list(vertices)
    seen = {verts[0]}
    queue = deque(seen)
    while queue:
        v = queue.popleft()
        for w in verts:
            if w not in seen and cayley_adjacent(v, w) is not None:
                seen.add(w)
                queue.append(w)
    return len(seen) == len(verts)


def is_minimal_degenerate_resonant(m: int, vertices: Sequence[IntVector]) -> bool:
    """Degenerate-resonant with no proper connected degenerate-resonant subgraph."""
    verts = list(vertices)
    if not classify_graph(m, verts).degenerate_resonant:
        return False
    for size in range(2, len(verts)):
        for subset in combinations(verts, size):
            if not _connected(subset):
                continue
            anchor = element_from_vertex(subset[0])
            rooted = [compose(element_from_vertex(v), invert(anchor)).vector for v in subset]
            if classify_graph(m, rooted).degenerate_resonant:
                return False
    return True


def _has_opposite_pair(graph: CombGraph) -> bool:
    """Two vertices of different colors with a + b = -2e_i."""
    for a, b in combinations(graph.vertices, 2):
        if mass(a) != mass(b) and sorted(c for c in vadd(a, b) if c) == [-2]:
            return True
    return False


def relation_support(tree: RootedTree) -> EncodingGraph:
    """Encoding graph of the tree edges carrying the (unique) edge relation."""
    enc = tree.encoding_graph()
    kernel = integer_kernel(enc.vectors(tree.m))
    if len(kernel) != 1:
        return enc.subgraph(k for k in range(len(enc.edges)) if any(r[k] for r in kernel))
    return enc.subgraph(k for k, c in enumerate(kernel[0]) if c)


def relation_shape(graph: EncodingGraph) -> str:
    """'two-odd-circuits' (joined by a path, possibly of length 0), 'circuit-with-chord',
    'even-circuit', 'odd-circuit' or 'other'."""
    if not graph.edges or not graph.is_connected():
        return "other"
    c = graph.cyclomatic_number()
    if c == 1:
        return "even-circuit" if circuit_parity(graph.edges) == "even" else "odd-circuit"
    if c != 2 or any(graph.valency(i) < 2 for i in graph.indices):
        return "other"
    bridge = any(not graph.is_connected(skip=k) for k in range(len(graph.edges)))
    pinch = any(graph.valency(i) == 4 for i in graph.indices)
    if bridge or pinch:
        return "two-odd-circuits" if zeta_map(graph).case == 2 else "other"
    return "circuit-with-chord"


def spanning_trees(graph: CombGraph) -> list[RootedTree]:
    """Every spanning tree of the graph, rooted at 0, in edge-subset order."""
    k = len(graph.vertices)
    index = {v: i for i, v in enumerate(graph.vertices)}
    out = []
    for subset in combinations(graph.edges, k - 1):
        parent = list(range(k))

        def find(i):
            while parent[i] != i:
                parent[i] = parent[parent[i]]
                i = parent[i]
            return i

        ok = True
        for e in subset:
            a, b = find(index[e.source]), find(index[e.target])
            if a == b:
                ok = False
                break
            parent[a] = b
        if ok:
            out.append(tree_from_pairs(graph.m, [(e.source, e.target) for e in subset]))
    return out


# repeated-edge: every spanning tree relates some l to -l
PATTERN_SHAPES = ("two-odd-circuits", "circuit-with-chord", "repeated-edge")


@dataclass(frozen=True)
class MinimalGraph:
    """A minimal degenerate-resonant graph with the edge-relation shapes of its spanning trees.

    tree is the first spanning tree whose relation support has no repeated
    edge and a recognised shape, falling back to the BFS tree.
    """

    vertices: tuple[IntVector, ...]
    tree: RootedTree
    support: EncodingGraph
    shape: str
    shapes: tuple[str, ...]
    repeated_edge_trees: int
    opposite_pair: bool

    @property
    def matches_pattern(self) -> bool:
        return self.shape in PATTERN_SHAPES

    def to_json(self) -> dict:
        return {
            "vertices": [format_vector(v) for v in self.vertices],
            "tree": [str(l) for l in self.tree.labels()],
            "support": self.support.to_json(),
            "shape": self.shape,
            "shapes": list(self.shapes),
            "repeated_edge_trees": self.repeated_edge_trees,
            "opposite_pair": self.opposite_pair,
            "matches_pattern": self.matches_pattern,
        }


def describe_minimal(graph: CombGraph) -> MinimalGraph:
    chosen = None
    shapes = Counter()
    repeated = 0
    for tree in spanning_trees(graph):
        support = relation_support(tree)
        if support.has_repeated_edge():
            repeated += 1
            shapes["repeated-edge"] += 1
            continue
        shape = relation_shape(support)
        shapes[shape] += 1
        if chosen is None and shape in PATTERN_SHAPES:
            chosen = (tree, support, shape)
    if chosen is None:
        tree = maximal_tree(graph)
        support = relation_support(tree)
        chosen = (tree, support, "repeated-edge" if support.has_repeated_edge() else relation_shape(support))
    return MinimalGraph(
        graph.vertices, chosen[0], chosen[1], chosen[2], tuple(sorted(shapes)), repeated, _has_opposite_pair(graph)
    )


@dataclass(frozen=True)
class MMReport:
    m: int
    max_vertices: int
    total: int
    counts: dict
    counterexamples: tuple[GraphClass, ...]
    minimal: tuple[MinimalGraph, ...]

    @property
    def holds(self) -> bool:
        return not self.counterexamples

    def degenerate_resonant_count(self) -> int:
        return sum(n for (v, r, d, res, a), n in self.counts.items() if d and res)

    def to_json(self) -> dict:
        return {
            "m": self.m,
            "max_vertices": self.max_vertices,
            "total": self.total,
            "holds": self.holds,
            "counts": [
                {"vertices": v, "rank": r, "degenerate": d, "resonant": res, "allowable": a, "count": n}
                for (v, r, d, res, a), n in sorted(self.counts.items())
            ],
            "counterexamples": [[list(v) for v in g.vertices] for g in self.counterexamples],
            "minimal": [g.to_json() for g in self.minimal],
        }


class BudgetExhausted(RuntimeError):
    pass


def default_workers() -> int:
    value = os.environ.get("RGE_WORKERS", "1")
    try:
        return max(1, int(value))
    except ValueError:
        return 1


def verify_theorem_mm(
    m: int,
    max_vertices: int,
    workers: Optional[int] = None,
    max_graphs: Optional[int] = None,
    chunk_size: int = 64,
) -> MMReport:
    """Classify every combinatorial graph up to max_vertices and collect degenerate-resonant ones.

    Every degenerate-resonant graph must be non-allowable; the allowable
    ones are returned as counterexamples. Minimal degenerate-resonant graphs
    get a maximal tree and the shape of their edge relation.
    """
    if workers is None:
        workers = default_workers()
    graphs = []
    for g in enumerate_graphs(m, max_vertices):
        graphs.append(g.vertices)
        if max_graphs is not None and len(graphs) > max_graphs:
            raise BudgetExhausted(f"more than {max_graphs} graphs for m={m}, max_vertices={max_vertices}")
    chunks = [(m, graphs[i : i + chunk_size]) for i in range(0, len(graphs), chunk_size)]
    if workers > 1 and len(chunks) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = [c for part in pool.map(_classify_chunk, chunks) for c in part]
    else:
        results = [c for chunk in chunks for c in _classify_chunk(chunk)]
    counts = Counter(c.key for c in results)
    counterexamples = tuple(c for c in results if c.degenerate_resonant and c.allowable)
    minimal = [
        describe_minimal(CombGraph(m, c.vertices))
        for c in results
        if c.degenerate_resonant and is_minimal_degenerate_resonant(m, c.vertices)
    ]
    return MMReport(m, max_vertices, len(results), dict(counts), counterexamples, tuple(minimal))
