"""Genericity checks on site sets and a seeded rejection sampler."""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from itertools import combinations
from math import lcm
from typing import Any, Iterator, Optional

from .algebra import SiteSet, dot, vadd, vsub
from .linalg import rank

SPAN = "span"
RIGHT_ANGLE = "right-angle"
EDGE_COLLISION = "edge-collision"
SMALL_RELATION = "small-relation"
SPHERE = "sphere"
CONSTRAINT_IDS = (SPAN, RIGHT_ANGLE, EDGE_COLLISION, SMALL_RELATION, SPHERE)


@dataclass(frozen=True)
class Violation:
    constraint: str
    witness: dict[str, Any]

    def to_json(self) -> dict:
        return {"constraint": self.constraint, "witness": _jsonable(self.witness)}


@dataclass(frozen=True)
class ConstraintReport:
    violations: tuple[Violation, ...] = field(default_factory=tuple)

    @property
    def passed(self) -> bool:
        return not self.violations

    def merge(self, other: "ConstraintReport") -> "ConstraintReport":
        return ConstraintReport(self.violations + other.violations)

    def ids(self) -> set[str]:
        return {v.constraint for v in self.violations}

    def to_json(self) -> dict:
        return {"passed": self.passed, "violations": [v.to_json() for v in self.violations]}


def _jsonable(obj):
    if isinstance(obj, Fraction):
        return str(obj)
    if isinstance(obj, (list, tuple)):
        return [_jsonable(x) for x in obj]
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    return obj


def default_bound(n: int) -> int:
    return 4 * (n + 1)


def check_span(sites: SiteSet) -> ConstraintReport:
    r = rank(sites.sites)
    if r == sites.n:
        return ConstraintReport()
    return ConstraintReport((Violation(SPAN, {"rank": r, "n": sites.n}),))


def check_no_right_angles(sites: SiteSet) -> ConstraintReport:
    """No vanishing (v_a - v_b, v_a - v_c) over triples and no vanishing (v_i, v_j)."""
    g = sites.gram
    out = []
    for a, b, c in combinations(range(sites.m), 3):
        for apex, p, q in ((a, b, c), (b, a, c), (c, a, b)):
            # (v_apex - v_p, v_apex - v_q) expanded through the Gram matrix
            if g[apex][apex] - g[apex][q] - g[p][apex] + g[p][q] == 0:
                out.append(Violation(RIGHT_ANGLE, {"apex": apex + 1, "triple": [p + 1, apex + 1, q + 1]}))
    for i, j in combinations(range(sites.m), 2):
        if g[i][j] == 0:
            out.append(Violation(RIGHT_ANGLE, {"pair": [i + 1, j + 1]}))
    return ConstraintReport(tuple(out))


def check_distinct_edges(sites: SiteSet) -> ConstraintReport:
    """Distinct formal differences and distinct formal sums have distinct values."""
    out = []
    seen: dict[tuple, tuple[int, int]] = {}
    for i in range(sites.m):
        for j in range(sites.m):
            if i == j:
                continue
            key = vsub(sites.sites[i], sites.sites[j])
            if key in seen:
                h, k = seen[key]
                out.append(Violation(EDGE_COLLISION, {"kind": "difference", "pairs": [[h + 1, k + 1], [i + 1, j + 1]]}))
            else:
                seen[key] = (i, j)
    seen = {}
    for i, j in combinations(range(sites.m), 2):
        key = vadd(sites.sites[i], sites.sites[j])
        if key in seen:
            h, k = seen[key]
            out.append(Violation(EDGE_COLLISION, {"kind": "sum", "pairs": [[h + 1, k + 1], [i + 1, j + 1]]}))
        else:
            seen[key] = (i, j)
    return ConstraintReport(tuple(out))


def _integer_sites(sites: SiteSet) -> list[tuple[int, ...]]:
    """Sites scaled by a common denominator; relations are scale invariant."""
    den = lcm(*(c.denominator for v in sites.sites for c in v))
    return [tuple(int(c * den) for c in v) for v in sites.sites]


def l1_ball(m: int, bound: int, total: Optional[int] = None, positive_first: bool = False) -> Iterator[tuple[int, ...]]:
    """Nonzero integer vectors with l1 norm <= bound.

    With total set, only vectors with that coordinate sum. With
    positive_first, only one of each pair +-nu (first nonzero entry > 0).
    """

    def rec(prefix: list[int], budget: int, started: bool):
        k = len(prefix)
        if k == m:
            if total is not None and sum(prefix) != total:
                return
            if any(prefix):
                yield tuple(prefix)
            return
        lo = 0 if (positive_first and not started) else -budget
        for c in range(lo, budget + 1):
            prefix.append(c)
            yield from rec(prefix, budget - abs(c), started or c != 0)
            prefix.pop()

    yield from rec([], bound, False)


@lru_cache(maxsize=32)
def _relation_candidates(m: int, bound: int) -> tuple[tuple[int, ...], ...]:
    """One of each pair +-nu in the l1 ball, shortest first."""
    return tuple(sorted(l1_ball(m, bound, positive_first=True), key=lambda nu: (sum(map(abs, nu)), nu)))


def check_no_small_relations(sites: SiteSet, bound: Optional[int] = None) -> ConstraintReport:
    """No nonzero integer nu with |nu|_1 <= bound and sum nu_i v_i = 0.

    The witness is a shortest relation.
    """
    if bound is None:
        bound = default_bound(sites.n)
    vs = _integer_sites(sites)
    n = sites.n
    for nu in _relation_candidates(sites.m, bound):
        if all(sum(c * v[k] for c, v in zip(nu, vs)) == 0 for k in range(n)):
            return ConstraintReport((Violation(SMALL_RELATION, {"relation": list(nu), "bound": bound}),))
    return ConstraintReport()


def sphere_identity_case(nu: tuple[int, ...], i: int, j: int) -> bool:
    """Supports inside {i, j} with entries in {0, -2} make the equation an identity."""
    return all(c == 0 for h, c in enumerate(nu) if h not in (i, j)) and nu[i] in (0, -2) and nu[j] in (0, -2)


def check_sphere_constraints(sites: SiteSet, bound: Optional[int] = None) -> ConstraintReport:
    """For mass -2 vectors nu with |nu|_1 <= bound, x = -w/2 (w = sum nu_h v_h) avoids every red sphere.

    The tested equation is |w|^2 + 2(w, v_i + v_j) = -4(v_i, v_j),
    i.e. |w + v_i + v_j|^2 = |v_i - v_j|^2.
    """
    if bound is None:
        bound = default_bound(sites.n)
    vs = _integer_sites(sites)
    n, m = sites.n, sites.m
    out = []
    pair_data = []
    for i, j in combinations(range(m), 2):
        s = tuple(vs[i][k] + vs[j][k] for k in range(n))
        d = tuple(vs[i][k] - vs[j][k] for k in range(n))
        pair_data.append((i, j, s, sum(x * x for x in d)))
    for nu in l1_ball(m, bound, total=-2):
        w = tuple(sum(c * v[k] for c, v in zip(nu, vs)) for k in range(n))
        for i, j, s, rhs in pair_data:
            shifted = [wk + sk for wk, sk in zip(w, s)]
            if sum(x * x for x in shifted) == rhs and not sphere_identity_case(nu, i, j):
                out.append(Violation(SPHERE, {"relation": list(nu), "pair": [i + 1, j + 1]}))
    return ConstraintReport(tuple(out))


def check_all(sites: SiteSet, bound: Optional[int] = None, stop_early: bool = False) -> ConstraintReport:
    checks = (
        check_span,
        check_no_right_angles,
        check_distinct_edges,
        lambda s: check_no_small_relations(s, bound),
        lambda s: check_sphere_constraints(s, bound),
    )
    report = ConstraintReport()
    for check in checks:
        report = report.merge(check(sites))
        if stop_early and not report.passed:
            break
    return report


class SamplingExhausted(RuntimeError):
    pass


def sample_generic(
    n: int,
    m: int,
    box: tuple[int, int],
    seed: int,
    max_tries: int = 1000,
    bound: Optional[int] = None,
    screen: bool = False,
) -> SiteSet:
    """First seeded integer site set in box passing every check.

    With screen set, candidates must also pass the per-graph determinantal
    screen of the realization module.
    """
    lo, hi = box
    rng = random.Random(seed)
    for _ in range(max_tries):
        candidate = SiteSet(tuple(tuple(rng.randint(lo, hi) for _ in range(n)) for _ in range(m)))
        if not check_all(candidate, bound, stop_early=True).passed:
            continue
        if screen:
            from .realization import screen_realizations

            if not screen_realizations(candidate).passed:
                continue
        return candidate
    raise SamplingExhausted(f"no generic site set found in [{lo},{hi}] after {max_tries} tries")


def verify_witness(sites: SiteSet, violation: Violation) -> bool:
    """Re-evaluate a violation witness and confirm the equation it names."""
    w = violation.witness
    g = sites.gram
    if violation.constraint == SPAN:
        return rank(sites.sites) == w["rank"] < sites.n
    if violation.constraint == RIGHT_ANGLE:
        if "pair" in w:
            i, j = w["pair"]
            return g[i - 1][j - 1] == 0
        p, apex, q = w["triple"]
        va, vp, vq = sites.v(apex), sites.v(p), sites.v(q)
        return dot(vsub(va, vp), vsub(va, vq)) == 0
    if violation.constraint == EDGE_COLLISION:
        (h, k), (i, j) = w["pairs"]
        op = vsub if w["kind"] == "difference" else vadd
        return (h, k) != (i, j) and op(sites.v(h), sites.v(k)) == op(sites.v(i), sites.v(j))
    if violation.constraint == SMALL_RELATION:
        nu = w["relation"]
        return any(nu) and all(sum(c * v[k] for c, v in zip(nu, sites.sites)) == 0 for k in range(sites.n))
    if violation.constraint == SPHERE:
        nu = w["relation"]
        i, j = w["pair"]
        wv = tuple(sum(c * v[k] for c, v in zip(nu, sites.sites)) for k in range(sites.n))
        lhs = dot(wv, wv) + 2 * dot(wv, vadd(sites.v(i), sites.v(j)))
        return sum(nu) == -2 and lhs == -4 * g[i - 1][j - 1]
    if violation.constraint == "resonance":
        from .combinatorial import CombGraph
        from .realization import NoSolution, SpecialSolution, build_system, solve_numeric

        verts = [tuple(v) for v in w["graph"]]
        result = solve_numeric(sites, build_system(CombGraph(sites.m, tuple(verts))))
        return not isinstance(result, (NoSolution, SpecialSolution))
    raise ValueError(f"unknown constraint {violation.constraint}")
