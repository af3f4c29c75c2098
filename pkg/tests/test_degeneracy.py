import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rectgraph.algebra import EdgeLabel, QuadForm, element_from_vertex, c_form
from rectgraph.combinatorial import enumerate_graphs, full_subgraph, translate_root
from rectgraph.degeneracy import (
    INDEX_CASES,
    EncodingEdge,
    SignedRelation,
    circuit_combination,
    circuit_parity,
    classify_graph,
    classify_index_type,
    cu_extract,
    describe_minimal,
    direct_bar_l,
    encoding_graph,
    find_relations,
    is_allowable,
    is_degenerate_resonant,
    is_minimal_degenerate_resonant,
    maximal_tree,
    minimal_relation,
    odd_circuit_combination,
    relation_shape,
    resonance_certificates,
    sweep_index_cases,
    tree_from_pairs,
    verify_theorem_mm,
    zeta_map,
)
from rectgraph.realization import relation_form

ZERO_FORM_GRAPH = [(0, 0, 0), (1, 0, -1), (1, -1, 0), (-2, 0, 0), (-1, 0, -1)]
SQUARE_FORM_VERTICES = [(1, -1, 0), (-1, 0, -1), (0, 0, -2), (-1, -1, 0)]
SIX_VERTEX_MINIMAL = [(0, 0, 0, 0), (-1, 1, 0, 0), (-1, -1, 0, 0), (0, -1, 1, 0), (0, -1, 2, -1), (0, 1, -2, -1)]
MINUS_THREE_GRAPH = [(0, 0, 0, 0), (1, -1, 0, 0), (2, -1, 0, -1), (-3, 1, 0, 0), (0, 1, -1, 0), (0, -1, -1, 0)]
SMALLEST = [(-2, 0, 0), (-1, -1, 0), (0, 0, 0), (1, -1, 0)]


def test_find_relations_examples():
    zero_form = find_relations(full_subgraph(3, ZERO_FORM_GRAPH))
    assert zero_form.basis == ((1, -1, 0, 1),)
    assert zero_form.vertices == ((-2, 0, 0), (-1, 0, -1), (1, -1, 0), (1, 0, -1))
    square_form_graph = find_relations(full_subgraph(3, [(0, 0, 0)] + SQUARE_FORM_VERTICES), SQUARE_FORM_VERTICES)
    assert square_form_graph.basis == ((1, 2, -1, -1),)
    assert find_relations(full_subgraph(2, [(0, 0), (1, -1)])).is_empty


def test_zero_form_relation_kills_the_forms():
    lattice = find_relations(full_subgraph(3, ZERO_FORM_GRAPH))
    assert relation_form(lattice.vertices, lattice.basis[0]) == QuadForm.zero(3)
    # the same sum done by hand
    total = QuadForm.zero(3)
    for n, v in zip(lattice.basis[0], lattice.vertices):
        total = total + c_form(element_from_vertex(v)).scale(n)
    assert total == QuadForm.zero(3)


def test_degenerate_resonant_examples():
    assert is_degenerate_resonant(full_subgraph(3, ZERO_FORM_GRAPH))
    square_form_graph = full_subgraph(3, [(0, 0, 0)] + SQUARE_FORM_VERTICES)
    assert not is_degenerate_resonant(square_form_graph)
    assert [str(c.poly) for c in resonance_certificates(square_form_graph)] == ["-e1^2 + 2e1e3 - e3^2"]
    # no relations: not degenerate, so not degenerate-resonant
    assert not is_degenerate_resonant(full_subgraph(2, [(0, 0), (1, -1)]))


def test_allowability_examples():
    ok, witness = is_allowable(full_subgraph(3, ZERO_FORM_GRAPH))
    assert not ok and witness == ((-2, 0, 0), (-2, 0, 0))
    assert is_allowable(full_subgraph(2, [(0, 0), (1, -1)])) == (True, None)
    ok, witness = is_allowable(full_subgraph(4, MINUS_THREE_GRAPH))
    assert not ok and witness[1] == (-3, 1, 0, 0)


def test_known_degenerate_resonant_graphs():
    for m, verts, minimal in ((4, SIX_VERTEX_MINIMAL, True), (4, MINUS_THREE_GRAPH, True), (3, ZERO_FORM_GRAPH, False), (3, SMALLEST, True)):
        cls = classify_graph(m, verts)
        assert cls.degenerate_resonant and not cls.allowable
        assert is_minimal_degenerate_resonant(m, verts) is minimal


def test_maximal_tree_of_zero_form_graph():
    tree = maximal_tree(full_subgraph(3, ZERO_FORM_GRAPH))
    assert [str(l) for l in tree.labels()] == ["red(1,3)", "black(1,2)", "black(1,3)", "black(3,1)"]
    assert tree.encoding_graph().has_repeated_edge()
    for v in tree.vertices:
        assert tree.vertex_formula(v) == v


def test_tree_rejects_cycles():
    with pytest.raises(ValueError):
        tree_from_pairs(2, [((0, 0), (1, -1)), ((1, -1), (0, 0))])


def test_circuit_parity_examples():
    assert circuit_parity([EdgeLabel.black(1, 2), EdgeLabel.red(2, 3), EdgeLabel.red(3, 1)]) == "even"
    assert circuit_parity([EdgeLabel.black(1, 2), EdgeLabel.red(1, 2)]) == "odd"
    with pytest.raises(ValueError):
        circuit_parity([EdgeLabel.black(1, 2), EdgeLabel.black(2, 3)])


def test_even_circuit_relation_two_ways():
    graph = encoding_graph([EdgeLabel.black(1, 2), EdgeLabel.black(2, 3), EdgeLabel.black(3, 1)])
    kernel = minimal_relation(graph)
    telescoped = circuit_combination(graph)
    assert kernel.coefficients == telescoped.coefficients == (1, 1, 1)
    assert telescoped.target == (0, 0, 0)


def test_odd_circuit_gives_twice_a_unit():
    graph = encoding_graph([EdgeLabel.black(1, 2), EdgeLabel.red(1, 2)])
    assert minimal_relation(graph) is None
    rel = odd_circuit_combination(graph)
    assert rel.target == (2, 0)
    z = zeta_map(graph)
    assert (z.case, z.rank, z.index) == (2, 2, 2)
    assert zeta_map(encoding_graph([EdgeLabel.black(1, 2), EdgeLabel.black(2, 3)])).case == 1


def test_doubly_odd_relation_has_unit_and_double_coefficients():
    # two odd triangles sharing vertex 3
    first = [EdgeLabel.red(1, 2), EdgeLabel.black(2, 3), EdgeLabel.black(3, 1)]
    second = [EdgeLabel.red(3, 4), EdgeLabel.black(4, 5), EdgeLabel.black(5, 3)]
    both = encoding_graph(first + second)
    assert relation_shape(both) == "two-odd-circuits"
    kernel = minimal_relation(both)
    a = circuit_combination(encoding_graph(first))
    b = circuit_combination(encoding_graph(second))
    # each odd circuit sums to +-2 times a unit vector
    for rel in (a, b):
        assert sorted(c for c in rel.target if c) in ([2], [-2])
    assert kernel is not None
    assert all(abs(c) in (1, 2) for c in kernel.coefficients)
    assert sum(map(abs, kernel.coefficients)) == 6


def test_signed_relation_validates_the_sum():
    with pytest.raises(ValueError):
        SignedRelation(((1, -1),), (1,), (0, 0))
    with pytest.raises(ValueError):
        SignedRelation(((1, -1),), (3,), (3, -3))


def test_encoding_edge_rejects_loops():
    with pytest.raises(ValueError):
        EncodingEdge(1, 1, "black")


def test_cu_extract_examples():
    form = QuadForm.from_dict(3, {(0, 1): 2, (0, 2): -1, (1, 1): 5, (1, 2): 7})
    assert cu_extract(form, 1) == (0, 2, -1)
    assert cu_extract(form, 2) == (2, 0, 7)
    assert cu_extract(QuadForm.zero(3), 3) == (0, 0, 0)


def test_cu_vanishes_on_resonance_expressions():
    lattice = find_relations(full_subgraph(3, ZERO_FORM_GRAPH))
    form = relation_form(lattice.vertices, lattice.basis[0])
    assert all(cu_extract(form, u) == (0, 0, 0) for u in (1, 2, 3))


def test_index_type_examples():
    m = 3
    # l_1 = e1 - e2 black, l_2 = e2 - e3 black, tree 0 -> l_2 -> l_2 + l_1
    tree = tree_from_pairs(m, [((0, 0, 0), (0, 1, -1)), ((0, 1, -1), (1, 0, -1))])
    rel = SignedRelation(((1, -1, 0), (0, 1, -1)), (1, 1), (1, 0, -1))
    typed = classify_index_type(tree, rel, 2, previous=1)
    assert typed.kind == "I" and typed.case == 11
    assert typed.value == direct_bar_l(tree, rel, 2, previous=1) == (0, 0, 0)


def test_index_table_has_eighteen_rows():
    assert len(INDEX_CASES) == 18
    assert sorted(c for c, _, _ in INDEX_CASES.values()) == list(range(1, 19))
    for (tp, tu, sigma, lp, lu), (case, coef, _) in INDEX_CASES.items():
        assert (coef == 0) == (sigma == lp * lu)


def test_index_sweep_agrees_everywhere():
    checks = sweep_index_cases()
    assert len(checks) == 180
    assert {c.case for c in checks} == set(range(1, 19))
    bad = [c for c in checks if not c.agrees]
    assert bad == []


@pytest.mark.parametrize("m,k,total,dr", [(3, 4, 46, 1), (3, 5, 239, 5), (4, 4, 109, 1)])
def test_verify_theorem_mm_small(m, k, total, dr):
    report = verify_theorem_mm(m, k, workers=1)
    assert report.total == total
    assert report.holds
    assert report.degenerate_resonant_count() == dr
    assert [g.vertices for g in report.minimal] == [tuple(SMALLEST if m == 3 else [v + (0,) for v in SMALLEST])]


def test_minimal_description_of_smallest():
    desc = describe_minimal(full_subgraph(3, SMALLEST))
    assert desc.shape == "repeated-edge" and desc.opposite_pair and desc.matches_pattern
    assert desc.repeated_edge_trees == 4


@settings(max_examples=40, deadline=None)
@given(st.sampled_from(list(enumerate_graphs(3, 4))))
def test_vertex_formula_recovers_every_vertex(graph):
    tree = maximal_tree(graph)
    assert sorted(tree.vertices) == sorted(graph.vertices)
    for v in tree.vertices:
        assert tree.vertex_formula(v) == v
        moved = tree.reroot(v)
        assert sorted(moved.vertices) == sorted(translate_root(graph, v).vertices)
        assert all(moved.vertex_formula(w) == w for w in moved.vertices)


@settings(max_examples=40, deadline=None)
@given(st.sampled_from(list(enumerate_graphs(3, 4))))
def test_relation_forms_match_certificates(graph):
    lattice = find_relations(graph)
    certs = resonance_certificates(graph)
    forms = [relation_form(lattice.vertices, r) for r in lattice.basis]
    assert [c.poly for c in certs] == [f for f in forms if f != QuadForm.zero(3)]
    assert is_degenerate_resonant(graph) == (not lattice.is_empty and not certs)
