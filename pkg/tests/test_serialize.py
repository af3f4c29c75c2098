from fractions import Fraction

from rectgraph.algebra import SiteSet
from rectgraph.combinatorial import full_subgraph, lift_component
from rectgraph.geometry import Box, components_in_box
from rectgraph.realization import (
    NoSolution,
    SpecialSolution,
    Underdetermined,
    Unique,
    build_system,
    generic_realization,
    solve_numeric,
)
from rectgraph.serialize import (
    component_from_json,
    components_to_dot,
    dumps,
    graph_to_dot,
    lift_to_json,
    outcome_to_json,
    parse_label,
    report_from_json,
    result_from_json,
    result_to_json,
)
from rectgraph.sites import check_all, sample_generic

F = Fraction


def test_dumps_is_canonical():
    assert dumps({"b": 1, "a": [1, 2]}) == '{\n  "a": [\n    1,\n    2\n  ],\n  "b": 1\n}\n'


def test_label_round_trip():
    for text in ("black(1,2)", "red(2,3)", "black(4,1)"):
        assert str(parse_label(text)) == text


def test_report_round_trip():
    report = check_all(SiteSet.of((-1, 3), (1, 1), (5, 1), (5, 3)))
    assert report_from_json(report.to_json()) == report


def test_component_round_trip():
    s = sample_generic(2, 4, (-20, 20), 0)
    for comp in components_in_box(s, Box.cube(2, -25, 25))[:50]:
        assert component_from_json(comp.to_json()) == comp


def test_result_round_trips():
    results = [
        Unique((F(1, 2), F(-3))),
        SpecialSolution((F(4), F(6)), 1),
        Underdetermined((F(0), F(1)), ((F(1), F(1)),)),
    ]
    s = sample_generic(2, 3, (-20, 20), 0)
    overdetermined = solve_numeric(s, build_system(full_subgraph(3, [(0, 0, 0), (1, 0, -1), (0, -1, 1), (-1, -1, 0)])))
    assert isinstance(overdetermined, NoSolution)
    results.append(overdetermined)
    for r in results:
        assert result_from_json(result_to_json(r)) == r


def test_outcome_and_lift_json_kinds():
    outcome = generic_realization(full_subgraph(2, [(0, 0), (1, -1)]), 1)
    assert outcome_to_json(outcome)["kind"] == "generically-realizable"
    s = SiteSet.of((1, 0), (0, 1), (-1, 0), (0, -1))
    assert lift_to_json(lift_component(s, (F(1, 2), F(1, 2)), budget=40))["kind"] == "circuit-unravel"
    assert lift_to_json(lift_component(s, (0, 0), budget=2))["kind"] == "budget-exceeded"
    lifted = lift_to_json(lift_component(s, (0, 0), budget=40))
    assert lifted["kind"] == "lifted" and len(lifted["points"]) == 5


def test_dot_output():
    g = full_subgraph(2, [(0, 0), (1, -1), (-1, -1)])
    dot = graph_to_dot(g)
    assert dot.startswith('graph "graph" {') and dot.endswith("}\n")
    assert 'color="red:invis:red"' in dot and "doublecircle" in dot
    s = SiteSet.of((3, 1), (-2, 5), (4, -3))
    comps = components_in_box(s, Box.cube(2, -6, 6))
    text = components_to_dot(s, comps)
    assert text.count("subgraph") == len(comps)
    assert "shape=box" in text
