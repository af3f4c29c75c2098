"""JSON and DOT encodings of sites, graphs, components and solver results.

Rationals are written as strings ("3/4") so that every artifact is exact.
"""

from __future__ import annotations

import json
from fractions import Fraction
from typing import Any

from .algebra import EdgeLabel, SiteSet, format_vector
from .combinatorial import BudgetExceeded, CircuitUnravel, CombGraph, Lifted, LiftOutcome
from .geometry import Component, GeoEdge
from .realization import (
    AvoidableResonance,
    GenericallyRealizable,
    GenericOutcome,
    NonGenericSites,
    NoSolution,
    RealizationResult,
    SpecialOnly,
    SpecialSolution,
    Underdetermined,
    Unique,
)
from .sites import ConstraintReport, Violation


def dumps(obj: Any) -> str:
    """Deterministic JSON text: sorted keys, fixed indentation, trailing newline."""
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def rat_list(p) -> list[str]:
    return [str(Fraction(c)) for c in p]


def parse_point(data) -> tuple[Fraction, ...]:
    return tuple(Fraction(c) for c in data)


def parse_label(text: str) -> EdgeLabel:
    kind, rest = text.split("(", 1)
    i, j = rest.rstrip(")").split(",")
    return EdgeLabel(kind, int(i), int(j))


def report_from_json(data: dict) -> ConstraintReport:
    return ConstraintReport(tuple(Violation(v["constraint"], v["witness"]) for v in data["violations"]))


def component_from_json(data: dict) -> Component:
    edges = tuple(
        GeoEdge(parse_point(e["source"]), parse_point(e["target"]), parse_label(e["label"])) for e in data["edges"]
    )
    return Component(
        frozenset(parse_point(v) for v in data["vertices"]),
        edges,
        bool(data["touches_boundary"]),
        bool(data["is_special"]),
    )


def result_to_json(result: RealizationResult) -> dict:
    if isinstance(result, Unique):
        return {"kind": "unique", "x": rat_list(result.x)}
    if isinstance(result, SpecialSolution):
        return {"kind": "special", "x": rat_list(result.x), "index": result.index}
    if isinstance(result, NoSolution):
        return {
            "kind": "none",
            "residual": str(result.residual),
            "rows": [list(r) for r in result.rows],
            "combination": rat_list(result.combination),
        }
    if isinstance(result, Underdetermined):
        out = {
            "kind": "underdetermined",
            "particular": rat_list(result.particular),
            "directions": [rat_list(d) for d in result.directions],
        }
        if result.sphere_center is not None:
            out["sphere_center"] = rat_list(result.sphere_center)
            out["sphere_radius_squared"] = str(result.sphere_radius_squared)
        return out
    if isinstance(result, NonGenericSites):
        return {"kind": "nongeneric", "rows": [list(r) for r in result.rows], "combination": rat_list(result.combination)}
    raise TypeError(f"not a realization result: {result!r}")


def result_from_json(data: dict) -> RealizationResult:
    kind = data["kind"]
    if kind == "unique":
        return Unique(parse_point(data["x"]))
    if kind == "special":
        return SpecialSolution(parse_point(data["x"]), int(data["index"]))
    if kind == "none":
        return NoSolution(
            Fraction(data["residual"]),
            tuple(tuple(r) for r in data["rows"]),
            parse_point(data["combination"]),
        )
    if kind == "underdetermined":
        center = data.get("sphere_center")
        radius = data.get("sphere_radius_squared")
        return Underdetermined(
            parse_point(data["particular"]),
            tuple(parse_point(d) for d in data["directions"]),
            parse_point(center) if center is not None else None,
            Fraction(radius) if radius is not None else None,
        )
    if kind == "nongeneric":
        return NonGenericSites(tuple(tuple(r) for r in data["rows"]), parse_point(data["combination"]))
    raise ValueError(f"unknown result kind {kind!r}")


def outcome_to_json(outcome: GenericOutcome) -> dict:
    if isinstance(outcome, AvoidableResonance):
        return {
            "kind": "avoidable-resonance",
            "reason": outcome.reason,
            "certificates": [c.to_json() for c in outcome.certificates],
            "residual_samples": rat_list(outcome.residual_samples),
        }
    if isinstance(outcome, SpecialOnly):
        return {"kind": "special-only", "reason": outcome.reason, "index": outcome.index}
    if isinstance(outcome, GenericallyRealizable):
        return {"kind": "generically-realizable", "reason": outcome.reason}
    raise TypeError(f"not a generic outcome: {outcome!r}")


def lift_to_json(outcome: LiftOutcome) -> dict:
    if isinstance(outcome, Lifted):
        return {
            "kind": "lifted",
            "graph": outcome.graph.to_json(),
            "points": [
                {"vertex": list(v), "point": rat_list(outcome.vertex_map[v])} for v in outcome.graph.vertices
            ],
        }
    if isinstance(outcome, CircuitUnravel):
        return {
            "kind": "circuit-unravel",
            "witness": {"vector": list(outcome.witness.vector), "sign": outcome.witness.sign},
            "first": {"vector": list(outcome.first.vector), "sign": outcome.first.sign},
            "second": {"vector": list(outcome.second.vector), "sign": outcome.second.sign},
            "point": rat_list(outcome.point),
        }
    if isinstance(outcome, BudgetExceeded):
        return {"kind": "budget-exceeded", "budget": outcome.budget, "explored": outcome.explored}
    raise TypeError(f"not a lift outcome: {outcome!r}")


def _quote(text: str) -> str:
    return '"' + text.replace('"', '\\"') + '"'


def _point_name(p) -> str:
    return "(" + ", ".join(str(c) for c in p) + ")"


def graph_to_dot(graph: CombGraph, name: str = "graph") -> str:
    """Red edges are drawn doubled, as in the usual pictures."""
    lines = [f"graph {_quote(name)} {{"]
    for v in graph.vertices:
        shape = "doublecircle" if not any(v) else "circle"
        lines.append(f"  {_quote(format_vector(v))} [shape={shape}];")
    for e in graph.edges:
        style = ' color="red:invis:red"' if e.label.is_red else ""
        lines.append(
            f"  {_quote(format_vector(e.source))} -- {_quote(format_vector(e.target))}"
            f" [label={_quote(str(e.label))}{style}];"
        )
    lines.append("}")
    return "\n".join(lines) + "\n"


def components_to_dot(sites: SiteSet, components: list[Component], name: str = "components") -> str:
    site_set = set(sites.sites)
    lines = [f"graph {_quote(name)} {{"]
    for k, comp in enumerate(components):
        lines.append(f"  subgraph {_quote(f'cluster_{k}')} {{")
        for v in comp.sorted_vertices():
            shape = "box" if v in site_set else "circle"
            lines.append(f"    {_quote(_point_name(v))} [shape={shape}];")
        for e in comp.edges:
            style = ' color="red:invis:red"' if e.label.is_red else ""
            lines.append(
                f"    {_quote(_point_name(e.source))} -- {_quote(_point_name(e.target))}"
                f" [label={_quote(str(e.label))}{style}];"
            )
        lines.append("  }")
    lines.append("}")
    return "\n".join(lines) + "\n"
