from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rectgraph.algebra import (
    BLACK,
    RED,
    EdgeLabel,
    GroupElement,
    QuadForm,
    SiteSet,
    act_point,
    c_form,
    compose,
    compose_vertices,
    element_from_vertex,
    identity,
    invert,
    k_composition_check,
    k_energy,
    l2_form,
    mass,
    pi_map,
    quad_eval,
    scalar,
    square_form,
    unit,
)


def vec(m, **coeffs):
    out = [0] * m
    for key, c in coeffs.items():
        out[int(key[1:]) - 1] = c
    return tuple(out)


def q(m, **coeffs):
    """QuadForm from keywords like e1e2=3, e1e1=1."""
    d = {}
    for key, c in coeffs.items():
        h, k = key[1:].split("e")
        d[(int(h) - 1, int(k) - 1)] = c
    return QuadForm.from_dict(m, d)


ints = st.integers(min_value=-6, max_value=6)


@st.composite
def elements(draw, m):
    """Random element of G_2: mass 0 black or mass -2 red."""
    head = draw(st.lists(ints, min_size=m - 1, max_size=m - 1))
    red = draw(st.booleans())
    last = (-2 if red else 0) - sum(head)
    return GroupElement(tuple(head) + (last,), RED if red else BLACK)


@st.composite
def site_sets(draw, n, m):
    coords = st.integers(min_value=-30, max_value=30)
    return SiteSet(tuple(tuple(draw(coords) for _ in range(n)) for _ in range(m)))


def test_scalar_is_reduced_and_exact():
    assert scalar("6/4") == Fraction(3, 2)
    assert scalar(Fraction(-2, -4)).denominator == 2
    assert scalar(0.1) == Fraction(1, 10)
    with pytest.raises(TypeError):
        scalar(True)


def test_mass_examples():
    assert mass(vec(2, e1=1, e2=-1)) == 0
    assert mass(vec(2, e1=-1, e2=-1)) == -2
    assert mass((1, -3, 1, 1)) == 0


def test_compose_examples():
    m = 4
    g = GroupElement(vec(m, e1=1, e2=-1), BLACK)
    h = GroupElement(vec(m, e2=1, e3=-1), BLACK)
    assert compose(g, h) == GroupElement(vec(m, e1=1, e3=-1), BLACK)
    r = GroupElement(vec(m, e1=-1, e2=-1), RED)
    b = GroupElement(vec(m, e3=1, e4=-1), BLACK)
    assert compose(r, b) == GroupElement(vec(m, e1=-1, e2=-1, e3=-1, e4=1), RED)
    assert compose(r, r) == identity(m)


def test_compose_mass_view_matches_group_law():
    a, b = vec(3, e1=-1, e2=-1), vec(3, e2=1, e3=-1)
    assert compose_vertices(a, b) == compose(element_from_vertex(a), element_from_vertex(b)).vector


def test_invert_examples():
    a = vec(3, e1=2, e2=-1, e3=-1)
    assert invert(GroupElement(a, BLACK)) == GroupElement(tuple(-c for c in a), BLACK)
    r = GroupElement(vec(3, e1=-1, e2=-1), RED)
    assert invert(r) == r
    assert EdgeLabel.black(1, 2).inverse() == EdgeLabel.black(2, 1)
    assert EdgeLabel.red(2, 1) == EdgeLabel.red(1, 2)


def test_edge_label_rejects_equal_indices():
    with pytest.raises(ValueError):
        EdgeLabel.black(1, 1)


def test_act_point_examples():
    s = SiteSet.of((1, 2), (3, -1))
    x = (Fraction(1, 2), 5)
    assert act_point(GroupElement((1, -1), BLACK), x, s) == (Fraction(1, 2) - 1 + 3, 5 - 2 - 1)
    assert act_point(GroupElement((-1, -1), RED), x, s) == (4 - Fraction(1, 2), 1 - 5)
    assert act_point(identity(2), x, s) == (Fraction(1, 2), 5)


def test_pi_map_examples():
    s = SiteSet.of((1, 0), (0, 1))
    assert pi_map(s, (1, 0)) == (1, 0)
    assert pi_map(s, (0, 0)) == (0, 0)
    assert pi_map(s, (1, 2)) == (1, 2)


def test_square_and_l2_forms():
    assert square_form((1, 1)) == q(2, e1e1=1, e2e2=1, e1e2=2)
    assert l2_form((1, 1)) == q(2, e1e1=1, e2e2=1)
    assert square_form(unit(3, 2)) == l2_form(unit(3, 2)) == q(3, e2e2=1)
    assert square_form((-2, 0)) == q(2, e1e1=4)
    assert l2_form((-2, 0)) == q(2, e1e1=-2)


def test_c_form_examples():
    assert c_form(GroupElement((1, 1, -2), BLACK)).coefficient(1, 2) == 1
    # C makes sense for any integer vector, whatever its mass
    assert c_form(GroupElement((1, 1), BLACK)) == q(2, e1e1=1, e2e2=1, e1e2=1)
    assert c_form(GroupElement((1, -1, 0), BLACK)) == q(3, e1e1=1, e1e2=-1)
    assert c_form(GroupElement((-2, 0, 0), RED)) == q(3, e1e1=-1)
    assert c_form(GroupElement((-1, 0, -1), RED)) == q(3, e1e3=-1)


def test_quad_eval_examples():
    s = SiteSet.of((3, 4), (1, 1), (2, -5))
    assert quad_eval(s, q(3, e1e1=1)) == 25
    d = (3 - 2, 4 + 5)
    assert quad_eval(s, q(3, e1e1=1, e1e3=-2, e3e3=1)) == d[0] ** 2 + d[1] ** 2
    assert quad_eval(s, QuadForm.zero(3)) == 0


def test_k_energy_examples():
    s = SiteSet.of((1, 0), (0, 1))
    assert k_energy(s, EdgeLabel.black(1, 2).element(2)) == 1
    assert k_energy(s, EdgeLabel.red(1, 2).element(2)) == 0
    # q with pi(q) = 0 gives half the weighted square norms
    t = SiteSet.of((1, 0), (0, 1), (1, 1))
    qv = GroupElement((1, 1, -1), BLACK)
    assert pi_map(t, qv.vector) == (0, 0)
    assert k_energy(t, qv) == Fraction(1 + 1 - 2, 2)


def test_k_composition_examples():
    s = SiteSet.of((1, 2), (3, 1), (2, -1), (-1, -1))
    u = GroupElement((1, -1, -1, -1), RED)
    lhs, rhs = k_composition_check(s, identity(4), u)
    assert lhs == rhs == k_energy(s, u)
    t = SiteSet.of((1, 0), (0, 1), (1, 1), (2, 5))
    qv = GroupElement((1, 1, -1, 0), BLACK)
    p = GroupElement((0, 2, 0, -2), BLACK)
    assert k_energy(t, compose(qv, p)) == k_energy(t, p) + k_energy(t, qv)


def test_quadform_json_round_trip():
    form = q(3, e1e1=Fraction(1, 2), e2e3=-3)
    assert QuadForm.from_json(3, form.to_json()) == form
    assert str(form) == "(1/2)e1^2 - 3e2e3"


def test_site_set_json_round_trip():
    s = SiteSet.of((1, Fraction(2, 3)), (0, -4))
    assert SiteSet.from_json(s.to_json()) == s
    with pytest.raises(ValueError):
        SiteSet.from_json({"n": 3, "sites": [[1, 2]]})


@settings(max_examples=300, deadline=None)
@given(st.data())
def test_group_laws(data):
    m = data.draw(st.integers(min_value=2, max_value=5))
    g, h, k = (data.draw(elements(m)) for _ in range(3))
    assert compose(compose(g, h), k) == compose(g, compose(h, k))
    assert compose(g, invert(g)) == identity(m) == compose(invert(g), g)


@settings(max_examples=300, deadline=None)
@given(st.data())
def test_action_is_compatible_with_composition(data):
    m = data.draw(st.integers(min_value=2, max_value=4))
    n = data.draw(st.integers(min_value=1, max_value=3))
    s = data.draw(site_sets(n, m))
    g, h = data.draw(elements(m)), data.draw(elements(m))
    x = tuple(Fraction(data.draw(ints), data.draw(st.integers(1, 5))) for _ in range(n))
    assert act_point(compose(g, h), x, s) == act_point(g, act_point(h, x, s), s)


@settings(max_examples=1000, deadline=None)
@given(st.data())
def test_energy_composition_identity(data):
    m = data.draw(st.integers(min_value=2, max_value=6))
    n = data.draw(st.integers(min_value=1, max_value=3))
    s = data.draw(site_sets(n, m))
    lhs, rhs = k_composition_check(s, data.draw(elements(m)), data.draw(elements(m)))
    assert lhs == rhs


@settings(max_examples=1000, deadline=None)
@given(st.data())
def test_energy_flips_under_tau(data):
    m = data.draw(st.integers(min_value=2, max_value=6))
    s = data.draw(site_sets(2, m))
    g = data.draw(elements(m))
    flipped = compose(g, GroupElement((0,) * m, RED))
    assert flipped.vector == g.vector and flipped.sign == -g.sign
    assert k_energy(s, flipped) == -k_energy(s, g)


@settings(max_examples=1000, deadline=None)
@given(st.data())
def test_c_composition_rules(data):
    m = data.draw(st.integers(min_value=2, max_value=6))
    u, v = data.draw(elements(m)), data.draw(elements(m))
    cu, cv = c_form(u), c_form(v)
    uv = QuadForm.product(u.vector, v.vector)
    add = tuple(a + b for a, b in zip(u.vector, v.vector))
    sub = tuple(a - b for a, b in zip(u.vector, v.vector))
    if not u.is_red and not v.is_red:
        assert c_form(element_from_vertex(add)) == cu + cv + uv
    if not u.is_red and v.is_red:
        assert c_form(element_from_vertex(add)) == -cu + cv - uv
    if u.is_red and v.is_red:
        assert c_form(element_from_vertex(sub)) == -cu + cv + square_form(v.vector) - uv
    if not u.is_red:
        neg = GroupElement(tuple(-c for c in u.vector), BLACK)
        assert c_form(neg) == cu - l2_form(u.vector)


@settings(max_examples=300, deadline=None)
@given(st.data())
def test_c_form_is_integral_and_evaluates_to_energy(data):
    m = data.draw(st.integers(min_value=2, max_value=6))
    s = data.draw(site_sets(2, m))
    g = data.draw(elements(m))
    assert c_form(g).is_integral()
    assert quad_eval(s, c_form(g)) == k_energy(s, g)
