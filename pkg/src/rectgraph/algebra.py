"""Exact scalars, the group Z^m x| Z/2, its action on Q^n and the energy forms.

Conventions used throughout the package:

* a group element is ``GroupElement(vector, sign)`` with ``sign`` = +1 for
  a plain translation and -1 for ``tau`` (the reflection);
* composition is ``(b, r) o (a, s) = (b + r a, r s)``;
* the action on points is ``(a, +) x = x - pi(a)`` and
  ``(a, tau) x = -pi(a) - x`` where ``pi(a) = sum a_i v_i``;
* site indices in public APIs (edge labels, witnesses) are 1-based.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Iterator, Sequence, Union

Scalar = Fraction
Number = Union[int, Fraction, str, float]
Point = tuple[Fraction, ...]
IntVector = tuple[int, ...]

BLACK = 1
RED = -1


def scalar(value: Number) -> Fraction:
    """Parse an int, Fraction, "p/q" string or decimal literal exactly."""
    if isinstance(value, bool):
        raise TypeError("booleans are not scalars")
    if isinstance(value, float):
        return Fraction(repr(value))
    return Fraction(value)


def scalar_str(value: Fraction) -> str:
    return str(value)


def point(coords: Iterable[Number]) -> Point:
    return tuple(scalar(c) for c in coords)


def unit(m: int, i: int) -> IntVector:
    """The basis vector e_i (1-based)."""
    return tuple(int(k == i - 1) for k in range(m))


def zero(m: int) -> IntVector:
    return (0,) * m


def vadd(a: Sequence, b: Sequence) -> tuple:
    return tuple(x + y for x, y in zip(a, b))


def vsub(a: Sequence, b: Sequence) -> tuple:
    return tuple(x - y for x, y in zip(a, b))


def vneg(a: Sequence) -> tuple:
    return tuple(-x for x in a)


def vscale(c, a: Sequence) -> tuple:
    return tuple(c * x for x in a)


def dot(a: Sequence, b: Sequence):
    return sum((x * y for x, y in zip(a, b)), Fraction(0))


def mass(a: Sequence[int]) -> int:
    """Coordinate sum of a vector of Z^m."""
    return sum(a)


def format_vector(a: Sequence[int]) -> str:
    """Render an integer vector as a combination like ``e1 - 3e2 + e3``."""
    parts = []
    for i, c in enumerate(a, start=1):
        if c == 0:
            continue
        mag = abs(c)
        term = f"e{i}" if mag == 1 else f"{mag}e{i}"
        if not parts:
            parts.append(term if c > 0 else f"-{term}")
        else:
            parts.append(f"+ {term}" if c > 0 else f"- {term}")
    return " ".join(parts) if parts else "0"


@dataclass(frozen=True, order=True)
class GroupElement:
    """Element (a, sign) of Z^m x| Z/2; sign -1 stands for tau.

    The vector may hold Fractions for elements of the rational extension.
    """

    vector: tuple
    sign: int = BLACK

    def __post_init__(self):
        if self.sign not in (BLACK, RED):
            raise ValueError("sign must be +1 or -1")

    @property
    def m(self) -> int:
        return len(self.vector)

    @property
    def is_red(self) -> bool:
        return self.sign == RED

    def __str__(self) -> str:
        body = format_vector(self.vector)
        return f"({body})tau" if self.is_red else body


def identity(m: int) -> GroupElement:
    return GroupElement(zero(m), BLACK)


def element_from_vertex(a: Sequence[int]) -> GroupElement:
    """Group element of a mass-0 (black) or mass-(-2) (red) vector."""
    eta = mass(a)
    if eta == 0:
        return GroupElement(tuple(a), BLACK)
    if eta == -2:
        return GroupElement(tuple(a), RED)
    raise ValueError(f"vertex {tuple(a)} has mass {eta}, expected 0 or -2")


def compose(g: GroupElement, h: GroupElement) -> GroupElement:
    """g o h."""
    if g.m != h.m:
        raise ValueError("dimension mismatch")
    vec = tuple(b + g.sign * a for b, a in zip(g.vector, h.vector))
    return GroupElement(vec, g.sign * h.sign)


def compose_all(elements: Iterable[GroupElement], m: int) -> GroupElement:
    """Left-to-right product g1 o g2 o ... ."""
    out = identity(m)
    for g in elements:
        out = compose(out, g)
    return out


def invert(g: GroupElement) -> GroupElement:
    if g.sign == BLACK:
        return GroupElement(vneg(g.vector), BLACK)
    return g


def compose_vertices(a: Sequence[int], b: Sequence[int]) -> IntVector:
    """Composition on mass-0/-2 vectors: a o b = a + (mass(a) + 1) b."""
    k = mass(a) + 1
    return tuple(x + k * y for x, y in zip(a, b))


@dataclass(frozen=True, order=True)
class EdgeLabel:
    """black(i, j) is e_i - e_j; red(i, j) is (-e_i - e_j) tau. Indices are 1-based."""

    kind: str
    i: int
    j: int

    def __post_init__(self):
        if self.kind not in ("black", "red"):
            raise ValueError(f"unknown edge kind {self.kind!r}")
        if self.i == self.j:
            raise ValueError("edge indices must differ")
        if self.i < 1 or self.j < 1:
            raise ValueError("edge indices are 1-based")
        if self.kind == "red" and self.i > self.j:
            i, j = self.j, self.i
            object.__setattr__(self, "i", i)
            object.__setattr__(self, "j", j)

    @staticmethod
    def black(i: int, j: int) -> "EdgeLabel":
        return EdgeLabel("black", i, j)

    @staticmethod
    def red(i: int, j: int) -> "EdgeLabel":
        return EdgeLabel("red", i, j)

    @property
    def is_red(self) -> bool:
        return self.kind == "red"

    def inverse(self) -> "EdgeLabel":
        return EdgeLabel.black(self.j, self.i) if self.kind == "black" else self

    def vector(self, m: int) -> IntVector:
        if max(self.i, self.j) > m:
            raise ValueError("edge index exceeds m")
        if self.kind == "black":
            return vsub(unit(m, self.i), unit(m, self.j))
        return vneg(vadd(unit(m, self.i), unit(m, self.j)))

    def element(self, m: int) -> GroupElement:
        return GroupElement(self.vector(m), RED if self.is_red else BLACK)

    def __str__(self) -> str:
        return f"{self.kind}({self.i},{self.j})"


def edge_set(m: int) -> list[EdgeLabel]:
    """All labels of X: black(i, j) for i != j and red(i, j) for i < j."""
    labels = [EdgeLabel.black(i, j) for i in range(1, m + 1) for j in range(1, m + 1) if i != j]
    labels += [EdgeLabel.red(i, j) for i in range(1, m + 1) for j in range(i + 1, m + 1)]
    return labels


@dataclass(frozen=True)
class QuadForm:
    """Quadratic form sum q_hk e_h e_k over h <= k (0-based keys internally).

    The coefficient of e_h e_k for h < k is the combined coefficient, so
    a^2 for a = e1 + e2 reads e1^2 + 2e1e2 + e2^2.
    """

    m: int
    terms: tuple[tuple[tuple[int, int], Fraction], ...] = ()

    @staticmethod
    def from_dict(m: int, coeffs: dict) -> "QuadForm":
        merged: dict[tuple[int, int], Fraction] = {}
        for (h, k), c in coeffs.items():
            key = (h, k) if h <= k else (k, h)
            merged[key] = merged.get(key, Fraction(0)) + Fraction(c)
        return QuadForm(m, tuple(sorted((k, c) for k, c in merged.items() if c != 0)))

    @staticmethod
    def zero(m: int) -> "QuadForm":
        return QuadForm(m, ())

    @staticmethod
    def product(a: Sequence, b: Sequence) -> "QuadForm":
        """The product of the linear forms sum a_i e_i and sum b_i e_i."""
        m = len(a)
        coeffs: dict[tuple[int, int], Fraction] = {}
        for h in range(m):
            if a[h] == 0:
                continue
            for k in range(m):
                if b[k] == 0:
                    continue
                key = (min(h, k), max(h, k))
                coeffs[key] = coeffs.get(key, Fraction(0)) + Fraction(a[h]) * Fraction(b[k])
        return QuadForm.from_dict(m, coeffs)

    def as_dict(self) -> dict[tuple[int, int], Fraction]:
        return dict(self.terms)

    def coefficient(self, h: int, k: int) -> Fraction:
        """Coefficient of e_h e_k with 1-based indices."""
        key = (min(h, k) - 1, max(h, k) - 1)
        return self.as_dict().get(key, Fraction(0))

    def is_zero(self) -> bool:
        return not self.terms

    def _check(self, other: "QuadForm"):
        if self.m != other.m:
            raise ValueError("quadratic forms over different m")

    def __add__(self, other: "QuadForm") -> "QuadForm":
        self._check(other)
        d = self.as_dict()
        for k, c in other.terms:
            d[k] = d.get(k, Fraction(0)) + c
        return QuadForm.from_dict(self.m, d)

    def __neg__(self) -> "QuadForm":
        return QuadForm(self.m, tuple((k, -c) for k, c in self.terms))

    def __sub__(self, other: "QuadForm") -> "QuadForm":
        return self + (-other)

    def scale(self, c) -> "QuadForm":
        c = Fraction(c)
        if c == 0:
            return QuadForm.zero(self.m)
        return QuadForm(self.m, tuple((k, c * v) for k, v in self.terms))

    def __rmul__(self, c) -> "QuadForm":
        return self.scale(c)

    def is_integral(self) -> bool:
        return all(c.denominator == 1 for _, c in self.terms)

    def evaluate(self, gram: Sequence[Sequence]) -> Fraction:
        return sum((c * gram[h][k] for (h, k), c in self.terms), Fraction(0))

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for (h, k), c in self.terms:
            mono = f"e{h + 1}^2" if h == k else f"e{h + 1}e{k + 1}"
            mag = abs(c)
            coef = "" if mag == 1 else (f"{mag}" if mag.denominator == 1 else f"({mag})")
            term = coef + mono
            if not parts:
                parts.append(term if c > 0 else f"-{term}")
            else:
                parts.append(f"+ {term}" if c > 0 else f"- {term}")
        return " ".join(parts)

    def to_json(self) -> dict[str, str]:
        return {f"{h + 1},{k + 1}": str(c) for (h, k), c in self.terms}

    @staticmethod
    def from_json(m: int, data: dict[str, str]) -> "QuadForm":
        coeffs = {}
        for key, val in data.items():
            h, k = (int(t) - 1 for t in key.split(","))
            coeffs[(h, k)] = scalar(val)
        return QuadForm.from_dict(m, coeffs)


@dataclass(frozen=True)
class SiteSet:
    """The sites v_1..v_m in Q^n with a cached Gram matrix."""

    sites: tuple[Point, ...]
    gram: tuple[tuple[Fraction, ...], ...] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        sites = tuple(point(v) for v in self.sites)
        if not sites:
            raise ValueError("a site set needs at least one site")
        n = len(sites[0])
        if n < 1 or any(len(v) != n for v in sites):
            raise ValueError("all sites must share a positive dimension")
        object.__setattr__(self, "sites", sites)
        object.__setattr__(self, "gram", tuple(tuple(dot(u, v) for v in sites) for u in sites))

    @staticmethod
    def of(*sites: Iterable[Number]) -> "SiteSet":
        return SiteSet(tuple(point(v) for v in sites))

    @property
    def n(self) -> int:
        return len(self.sites[0])

    @property
    def m(self) -> int:
        return len(self.sites)

    def v(self, i: int) -> Point:
        """The site v_i (1-based)."""
        return self.sites[i - 1]

    def to_json(self) -> dict:
        return {"n": self.n, "m": self.m, "sites": [[str(c) for c in v] for v in self.sites]}

    @staticmethod
    def from_json(data: dict) -> "SiteSet":
        s = SiteSet(tuple(point(v) for v in data["sites"]))
        if "n" in data and data["n"] != s.n:
            raise ValueError("declared n does not match the sites")
        if "m" in data and data["m"] != s.m:
            raise ValueError("declared m does not match the sites")
        return s


def pi_map(sites: SiteSet, a: Sequence) -> Point:
    """pi(a) = sum a_i v_i."""
    if len(a) != sites.m:
        raise ValueError("vector length must equal m")
    out = [Fraction(0)] * sites.n
    for c, v in zip(a, sites.sites):
        if c:
            for k in range(sites.n):
                out[k] += c * v[k]
    return tuple(out)


def act_point(g: GroupElement, x: Sequence, sites: SiteSet) -> Point:
    """(a, +) x = x - pi(a); (a, tau) x = -pi(a) - x."""
    if g.m != sites.m or len(x) != sites.n:
        raise ValueError("dimension mismatch")
    shift = pi_map(sites, g.vector)
    return tuple(g.sign * Fraction(xi) - s for xi, s in zip(x, shift))


def square_form(a: Sequence) -> QuadForm:
    """a^2 = (sum a_i e_i)^2."""
    return QuadForm.product(a, a)


def l2_form(a: Sequence) -> QuadForm:
    """a^(2) = sum a_i e_i^2."""
    return QuadForm.from_dict(len(a), {(i, i): c for i, c in enumerate(a) if c})


def c_form(g: GroupElement) -> QuadForm:
    """C(a, s) = (s/2)(a^2 + a^(2))."""
    return (square_form(g.vector) + l2_form(g.vector)).scale(Fraction(g.sign, 2))


def quad_eval(sites: SiteSet, form: QuadForm) -> Fraction:
    """Substitute e_i e_j -> (v_i, v_j)."""
    if form.m != sites.m:
        raise ValueError("form size must equal m")
    return form.evaluate(sites.gram)


def k_energy(sites: SiteSet, g: GroupElement) -> Fraction:
    """K(a, s) = (s/2)(|pi(a)|^2 + sum a_i |v_i|^2); valid for rational a."""
    p = pi_map(sites, g.vector)
    weighted = sum((c * sites.gram[i][i] for i, c in enumerate(g.vector)), Fraction(0))
    return Fraction(g.sign, 2) * (dot(p, p) + weighted)


def k_composition_check(sites: SiteSet, g: GroupElement, u: GroupElement) -> tuple[Fraction, Fraction]:
    """Both sides of the composition rule for K, for g = (b, r) and u = (a, s).

    K(g o u) = s K(g) + K(u) + (r - 1)(s/2)|pi(a)|^2 + s (pi(a), pi(b)).
    """
    r, s = g.sign, u.sign
    pa = pi_map(sites, u.vector)
    pb = pi_map(sites, g.vector)
    lhs = k_energy(sites, compose(g, u))
    rhs = s * k_energy(sites, g) + k_energy(sites, u) + Fraction((r - 1) * s, 2) * dot(pa, pa) + s * dot(pa, pb)
    return lhs, rhs


def iter_group_elements(m: int, radius: int) -> Iterator[GroupElement]:
    """All elements of G_2 (mass 0 black, mass -2 red) with l1 norm <= radius."""
    from itertools import product

    for vec in product(range(-radius, radius + 1), repeat=m):
        if sum(abs(c) for c in vec) > radius:
            continue
        eta = sum(vec)
        if eta == 0:
            yield GroupElement(vec, BLACK)
        elif eta == -2:
            yield GroupElement(vec, RED)
