"""Command line front door: sampling, checking, components, lifting, realization and enumeration.

Exit codes: 0 pass, 2 constraint violation, 3 theorem-check counterexample,
4 budget exhausted, 64 usage error, 65 malformed input, 74 I/O error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass
from typing import Optional, Sequence

from .algebra import SiteSet, format_vector
from .combinatorial import BudgetExceeded, CombGraph, enumerate_graphs, lift_component
from .degeneracy import (
    BudgetExhausted,
    find_relations,
    is_allowable,
    is_degenerate_resonant,
    is_minimal_degenerate_resonant,
    maximal_tree,
    resonance_certificates,
    verify_theorem_mm,
)
from .geometry import Box, components_in_box
from .realization import (
    TheoremCounterexample,
    VertexBudgetExceeded,
    affine_independence,
    build_system,
    generic_realization,
    rank_info,
    screen_realizations,
    solve_numeric,
)
from .serialize import components_to_dot, dumps, graph_to_dot, lift_to_json, outcome_to_json, rat_list, result_to_json
from .sites import SamplingExhausted, check_all, sample_generic

EXIT_OK = 0
EXIT_VIOLATION = 2
EXIT_COUNTEREXAMPLE = 3
EXIT_BUDGET = 4
EXIT_USAGE = 64
EXIT_MALFORMED = 65
EXIT_IO = 74

COMMANDS = ("sample-sites", "check-generic", "components", "lift", "realize", "enumerate", "classify", "verify-mm")
DOT_COMMANDS = ("components", "realize", "enumerate", "classify")


class UsageError(Exception):
    pass


class MalformedInput(Exception):
    pass


@dataclass(frozen=True)
class RunConfig:
    command: str
    sites_path: Optional[str] = None
    graph_path: Optional[str] = None
    n: int = 2
    m: int = 4
    box: tuple[int, int] = (-20, 20)
    seed: int = 0
    search_box: Optional[tuple[int, int]] = None
    budget: Optional[int] = None
    bound: Optional[int] = None
    screen: bool = False
    out: Optional[str] = None
    format: str = "json"
    workers: Optional[int] = None


def parse_range(text: str) -> tuple[int, int]:
    try:
        lo, hi = (int(part) for part in text.split(":"))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected LO:HI, got {text!r}")
    if lo > hi:
        raise argparse.ArgumentTypeError(f"empty range {text!r}")
    return lo, hi


def resolve_workers(flag: Optional[int]) -> int:
    if flag is not None:
        return max(1, flag)
    env = os.environ.get("RGE_WORKERS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            raise UsageError(f"RGE_WORKERS must be an integer, got {env!r}")
    return os.cpu_count() or 1


def _read_json(path: str) -> dict:
    with open(path, encoding="utf-8") as fh:
        text = fh.read()
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise MalformedInput(f"{path}: {exc}")
    if not isinstance(data, dict):
        raise MalformedInput(f"{path}: expected a JSON object")
    return data


def load_sites(path: str) -> SiteSet:
    data = _read_json(path)
    try:
        return SiteSet.from_json(data)
    except (KeyError, TypeError, ValueError, ZeroDivisionError) as exc:
        raise MalformedInput(f"{path}: not a site set ({exc})")


def load_graph(path: str) -> CombGraph:
    data = _read_json(path)
    try:
        return CombGraph.from_json(data)
    except (KeyError, TypeError, ValueError) as exc:
        raise MalformedInput(f"{path}: not a combinatorial graph ({exc})")


def _sites(config: RunConfig) -> tuple[SiteSet, dict]:
    """Sites from the file or the seeded sampler, with a provenance record."""
    if config.sites_path is not None:
        return load_sites(config.sites_path), {"sites_file": config.sites_path}
    sites = sample_generic(config.n, config.m, config.box, config.seed, bound=config.bound, screen=config.screen)
    return sites, {"sampler": {"n": config.n, "m": config.m, "box": list(config.box), "seed": config.seed}}


def _search_box(config: RunConfig, sites: SiteSet) -> Box:
    if config.search_box is not None:
        lo, hi = config.search_box
    else:
        lo, hi = 3 * config.box[0], 3 * config.box[1]
    return Box.cube(sites.n, lo, hi)


def _component_records(sites: SiteSet, box: Box) -> tuple[list, list[dict]]:
    comps = sorted(components_in_box(sites, box), key=lambda c: c.sorted_vertices())
    records = []
    for comp in comps:
        rec = comp.to_json()
        aff = affine_independence(comp.sorted_vertices())
        rec["size"] = len(comp.vertices)
        rec["affinely_independent"] = aff.independent
        if not aff.independent:
            rec["affine_relation"] = rat_list(aff.combination)
        rec["within_bound"] = len(comp.vertices) <= sites.n + 1
        records.append(rec)
    return comps, records


def cmd_sample_sites(config: RunConfig) -> tuple[int, str]:
    sites, origin = _sites(config)
    return EXIT_OK, dumps({"sites": sites.to_json(), **origin})


def cmd_check_generic(config: RunConfig) -> tuple[int, str]:
    sites, origin = _sites(config)
    report = check_all(sites, config.bound)
    if config.screen:
        report = report.merge(screen_realizations(sites))
    status = EXIT_OK if report.passed else EXIT_VIOLATION
    return status, dumps({"sites": sites.to_json(), "report": report.to_json(), **origin})


def cmd_components(config: RunConfig) -> tuple[int, str]:
    sites, origin = _sites(config)
    box = _search_box(config, sites)
    comps, records = _component_records(sites, box)
    if config.format == "dot":
        return EXIT_OK, components_to_dot(sites, comps)
    special = [set(c.vertices) for c in comps if c.is_special]
    interior = [r for r in records if not r["is_special"] and not r["touches_boundary"]]
    summary = {
        "special_is_sites": len(special) == 1 and special[0] == set(sites.sites),
        "interior_components": len(interior),
        "interior_all_small_and_independent": all(r["within_bound"] and r["affinely_independent"] for r in interior),
    }
    payload = {
        "sites": sites.to_json(),
        "box": [list(box.lower), list(box.upper)],
        "components": records,
        "summary": summary,
        **origin,
    }
    return EXIT_OK, dumps(payload)


def cmd_lift(config: RunConfig) -> tuple[int, str]:
    sites, origin = _sites(config)
    box = _search_box(config, sites)
    comps, _ = _component_records(sites, box)
    status = EXIT_OK
    lifts = []
    for comp in comps:
        if comp.is_special or comp.touches_boundary:
            continue
        root = comp.sorted_vertices()[0]
        outcome = lift_component(sites, root, config.budget)
        if isinstance(outcome, BudgetExceeded):
            status = EXIT_BUDGET
        lifts.append({"root": rat_list(root), "size": len(comp.vertices), "lift": lift_to_json(outcome)})
    return status, dumps({"sites": sites.to_json(), "lifts": lifts, **origin})


def _require_graph(config: RunConfig) -> CombGraph:
    if config.graph_path is None:
        raise UsageError(f"{config.command} needs --graph FILE")
    return load_graph(config.graph_path)


def cmd_realize(config: RunConfig) -> tuple[int, str]:
    graph = _require_graph(config)
    if config.format == "dot":
        return EXIT_OK, graph_to_dot(graph)
    sites, origin = _sites(config)
    if sites.m != graph.m:
        raise MalformedInput(f"graph has m={graph.m} but the sites have m={sites.m}")
    result = solve_numeric(sites, build_system(graph))
    return EXIT_OK, dumps({"sites": sites.to_json(), "graph": graph.to_json(), "result": result_to_json(result), **origin})


def cmd_enumerate(config: RunConfig) -> tuple[int, str]:
    max_vertices = config.budget if config.budget is not None else 4
    graphs = list(enumerate_graphs(config.m, max_vertices))
    if config.format == "dot":
        return EXIT_OK, "".join(graph_to_dot(g, f"graph_{k}") for k, g in enumerate(graphs))
    records = []
    for g in graphs:
        info = rank_info(g)
        records.append(
            {
                "vertices": [list(v) for v in g.vertices],
                "rank": info.rank,
                "black_rank": info.black_rank,
                "red_rank": info.red_rank,
            }
        )
    return EXIT_OK, dumps({"m": config.m, "max_vertices": max_vertices, "count": len(records), "graphs": records})


def cmd_classify(config: RunConfig) -> tuple[int, str]:
    graph = _require_graph(config)
    tree = maximal_tree(graph)
    if config.format == "dot":
        return EXIT_OK, tree.encoding_graph().to_dot()
    allowable, witness = is_allowable(graph)
    payload = {
        "graph": graph.to_json(),
        "rank": rank_info(graph).__dict__,
        "relations": find_relations(graph).to_json(),
        "certificates": [c.to_json() for c in resonance_certificates(graph)],
        "degenerate_resonant": is_degenerate_resonant(graph),
        "minimal": is_minimal_degenerate_resonant(graph.m, graph.vertices),
        "allowable": allowable,
        "allowability_witness": None
        if witness is None
        else {"root": format_vector(witness[0]), "vertex": format_vector(witness[1])},
        "tree": tree.to_json(),
    }
    status = EXIT_OK
    try:
        outcome = generic_realization(graph, config.n, seed=config.seed, budget=config.budget)
        payload["generic"] = outcome_to_json(outcome)
    except TheoremCounterexample as exc:
        payload["generic"] = {"kind": "counterexample", "reason": str(exc)}
        status = EXIT_COUNTEREXAMPLE
    except VertexBudgetExceeded as exc:
        payload["generic"] = {"kind": "budget-exceeded", "reason": str(exc)}
        status = EXIT_BUDGET
    return status, dumps(payload)


def cmd_verify_mm(config: RunConfig) -> tuple[int, str]:
    max_vertices = config.budget if config.budget is not None else 4
    report = verify_theorem_mm(config.m, max_vertices, workers=resolve_workers(config.workers))
    status = EXIT_OK if report.holds else EXIT_COUNTEREXAMPLE
    return status, dumps(report.to_json())


HANDLERS = {
    "sample-sites": cmd_sample_sites,
    "check-generic": cmd_check_generic,
    "components": cmd_components,
    "lift": cmd_lift,
    "realize": cmd_realize,
    "enumerate": cmd_enumerate,
    "classify": cmd_classify,
    "verify-mm": cmd_verify_mm,
}


def run(config: RunConfig) -> tuple[int, str]:
    """Execute one command; returns the exit status and the artifact text."""
    if config.command not in HANDLERS:
        raise UsageError(f"unknown command {config.command!r}")
    if config.format not in ("json", "dot"):
        raise UsageError(f"unknown format {config.format!r}")
    if config.format == "dot" and config.command not in DOT_COMMANDS:
        raise UsageError(f"{config.command} has no DOT output")
    try:
        return HANDLERS[config.command](config)
    except SamplingExhausted as exc:
        return EXIT_BUDGET, dumps({"error": "sampling-exhausted", "message": str(exc)})
    except BudgetExhausted as exc:
        return EXIT_BUDGET, dumps({"error": "budget-exhausted", "message": str(exc)})


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--sites", metavar="FILE", help="site set JSON; otherwise sites are sampled")
    common.add_argument("--graph", metavar="FILE", help="combinatorial graph JSON (realize, classify)")
    common.add_argument("--n", type=int, default=2, help="dimension of the sampled sites")
    common.add_argument("--m", type=int, default=4, help="number of sites / indices")
    common.add_argument("--box", type=parse_range, default=(-20, 20), metavar="LO:HI", help="sampling range, e.g. --box=-20:20")
    common.add_argument("--search-box", type=parse_range, metavar="LO:HI", help="component search range, e.g. --search-box=-60:60")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--budget", type=int, help="vertex budget")
    common.add_argument("--bound", type=int, help="l1 bound of the relation checks")
    common.add_argument("--screen", action="store_true", help="also screen sites against small-graph realizations")
    common.add_argument("--out", metavar="FILE", help="write the artifact here instead of stdout")
    common.add_argument("--format", choices=("json", "dot"), default="json")
    common.add_argument("--workers", type=int, help="worker processes (default RGE_WORKERS, then CPU count)")
    parser = _Parser(prog="rectgraph", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    for name in COMMANDS:
        sub.add_parser(name, parents=[common])
    return parser


def config_from_args(args: argparse.Namespace) -> RunConfig:
    return RunConfig(
        command=args.command,
        sites_path=args.sites,
        graph_path=args.graph,
        n=args.n,
        m=args.m,
        box=args.box,
        seed=args.seed,
        search_box=args.search_box,
        budget=args.budget,
        bound=args.bound,
        screen=args.screen,
        out=args.out,
        format=args.format,
        workers=args.workers,
    )


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    config = config_from_args(args)
    try:
        status, text = run(config)
    except UsageError as exc:
        print(f"rectgraph: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except MalformedInput as exc:
        print(f"rectgraph: malformed input: {exc}", file=sys.stderr)
        return EXIT_MALFORMED
    except OSError as exc:
        print(f"rectgraph: {exc}", file=sys.stderr)
        return EXIT_IO
    try:
        if config.out is None:
            sys.stdout.write(text)
        else:
            with open(config.out, "w", encoding="utf-8") as fh:
                fh.write(text)
    except OSError as exc:
        print(f"rectgraph: {exc}", file=sys.stderr)
        return EXIT_IO
    return status


if __name__ == "__main__":
    sys.exit(main())
