"""Command-line front end. Exit codes: 0 ok, 1 verification failure, 2 bad input or precondition."""

from __future__ import annotations

import argparse
import os
import sys
import time
from typing import Callable, Dict, List, Optional

from .coloring import Coloring, ColoringError, merge_across_cut, verify_clustering
from .graph import GraphError, edge_cut
from .io import (ParseError, coloring_from_json, coloring_to_json, dumps, graph_from_json, graph_to_json,
                 load_json)
from .lift import ClaimViolation, ContractViolation, PreconditionError, canonical_provider, lift, lift_bound
from .oracles import (CapExceeded, DEFAULT_COLOR_CAP, check_immersion_witness, find_clustered_coloring,
                      gen_apex_blocker, gen_layered_blocker, has_immersion, min_clustered_colors)
from .treecut import DecompositionError, decomposition_from_json, decomposition_to_json, validate_tcd
from .treedecomp import (PipelineResult, lift_from_bag_colorings, lift_from_torso_colorings, simplify,
                         td_from_json, td_to_json, to_tree_cut)

EXIT_OK, EXIT_FAIL, EXIT_INPUT = 0, 1, 2


class _Timer:
    def __init__(self) -> None:
        self.stages: Dict[str, float] = {}

    def run(self, name: str, fn: Callable):
        start = time.perf_counter()
        try:
            return fn()
        finally:
            self.stages[name] = round(time.perf_counter() - start, 6)


def _emit(data, path: Optional[str]) -> None:
    text = dumps(data)
    if path:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _run_report(g, col: Coloring, palette: int, bound: int, timer: _Timer, args) -> dict:
    rep = verify_clustering(g, col, palette, bound)
    out = {
        "ok": rep.ok,
        "declaredBound": bound,
        "declaredPalette": palette,
        "measuredWorst": rep.worst,
        "paletteUsed": rep.palette_used,
    }
    if args.timings:
        out["stageTimings"] = timer.stages
    return out


def _finish(report: dict, col: Coloring, args) -> int:
    if args.out:
        _emit(coloring_to_json(col), args.out)
    else:
        report = dict(report, coloring=coloring_to_json(col))
    _emit(report, None)
    return EXIT_OK if report["ok"] else EXIT_FAIL


def _int_map(data, what: str) -> Dict[int, int]:
    if not isinstance(data, dict):
        raise ParseError(f"{what} must be a JSON object")
    try:
        return {int(k): int(v) for k, v in data.items()}
    except (TypeError, ValueError):
        raise ParseError(f"{what} must map integer keys to integers") from None


# -- commands ---------------------------------------------------------------------


def cmd_lift(args) -> int:
    timer = _Timer()
    g = timer.run("parse", lambda: graph_from_json(load_json(args.graph)))
    tcd = decomposition_from_json(load_json(args.tcd))
    k_map = _int_map(load_json(args.kmap), "kMap")
    rep = validate_tcd(g, tcd)
    if not rep.ok:
        raise PreconditionError(f"invalid tree-cut decomposition: {rep.reason}")
    xi = args.xi if args.xi is not None else max(rep.adhesion, 1)
    provider = canonical_provider(args.n, cap=args.cap_vertices)
    col = timer.run("lift", lambda: lift(g, tcd, k_map, provider, args.n, xi))
    bound = lift_bound(args.n, xi, rep.max_bag)
    report = _run_report(g, col, col.k, bound, timer, args)
    report["nStar"] = lift_bound(args.n, xi, 1)
    report["xi"] = xi
    return _finish(report, col, args)


def cmd_td_lift(args) -> int:
    timer = _Timer()
    g = timer.run("parse", lambda: graph_from_json(load_json(args.graph)))
    td = td_from_json(load_json(args.td))
    cap = args.cap_vertices

    def colorer(h, k):
        if len(h) > cap:
            raise CapExceeded(f"graph with {len(h)} vertices exceeds the vertex cap {cap}")
        c = find_clustered_coloring(h, k, args.n)
        if c is None:
            raise ContractViolation(f"a {len(h)}-vertex piece has no {k}-coloring with clustering {args.n}")
        return c

    if args.dump_stages:
        os.makedirs(args.dump_stages, exist_ok=True)
        td1 = timer.run("simplify", lambda: simplify(g, td, args.d, args.eta))
        base = "torso" if args.mode == "torso" else "bag"
        conv = timer.run("to_tree_cut", lambda: to_tree_cut(g, td, args.d, args.eta, base=base))
        _emit(td_to_json(td1), os.path.join(args.dump_stages, "simplify.json"))
        _emit(dict(decomposition_to_json(conv.tcd), report=conv.report()),
              os.path.join(args.dump_stages, "tree_cut.json"))
    if args.mode == "torso":
        res: PipelineResult = timer.run(
            "lift", lambda: lift_from_torso_colorings(g, td, args.k, colorer, args.d, args.eta, args.n))
    else:
        res = timer.run(
            "lift", lambda: lift_from_bag_colorings(g, td, args.k, colorer, args.d, args.eta, args.n))
    report = _run_report(g, res.coloring, res.palette, res.bound, timer, args)
    report["treeCut"] = res.conversion.report()
    return _finish(report, res.coloring, args)


def cmd_merge_cut(args) -> int:
    g = graph_from_json(load_json(args.graph))
    cut_data = load_json(args.cut)
    if not isinstance(cut_data, dict) or not isinstance(cut_data.get("sideA"), list):
        raise ParseError('cut JSON needs a "sideA" list')
    try:
        cut = edge_cut(g, cut_data["sideA"])
    except GraphError as exc:
        raise ParseError(str(exc)) from None
    c_a = coloring_from_json(load_json(args.coloring_a), g, cut.side_a)
    c_b = coloring_from_json(load_json(args.coloring_b), g, cut.side_b)
    try:
        merged = merge_across_cut(g, cut, c_a, c_b, args.k, args.n)
    except ColoringError as exc:
        raise PreconditionError(str(exc)) from None
    report = _run_report(g, merged, args.k, args.n, _Timer(), args)
    report["cutOrder"] = cut.order
    return _finish(report, merged, args)


def cmd_verify(args) -> int:
    g = graph_from_json(load_json(args.graph))
    col = coloring_from_json(load_json(args.coloring), g)
    rep = verify_clustering(g, col, args.k, args.n)
    _emit(rep.to_json(), None)
    return EXIT_OK if rep.ok else EXIT_FAIL


def cmd_oracle(args) -> int:
    g = graph_from_json(load_json(args.graph))
    if args.oracle == "min-colors":
        k = min_clustered_colors(g, args.n, cap=args.cap_vertices)
        _emit({"minColors": k, "n": args.n}, None)
        return EXIT_OK
    h = graph_from_json(load_json(args.pattern))
    caps = {"vertex_cap": args.cap_vertices} if args.cap_vertices_given else {}
    w = has_immersion(g, h, strong=args.strong, jobs=args.jobs, **caps)
    if w is not None and not check_immersion_witness(g, h, w):  # pragma: no cover
        raise AssertionError("immersion witness failed independent validation")
    _emit({"found": w is not None, "witness": w.to_json() if w else None}, None)
    return EXIT_OK


def cmd_gen(args) -> int:
    l = graph_from_json(load_json(args.base))
    g = gen_apex_blocker(l, args.eta) if args.gen == "apex-blocker" else gen_layered_blocker(l, args.n)
    _emit(graph_to_json(g), args.out)
    return EXIT_OK


# -- parser -------------------------------------------------------------------------


def _positive(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"{text!r} is not an integer") from None
    if v < 1:
        raise argparse.ArgumentTypeError(f"{v} must be at least 1")
    return v


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--jobs", type=_positive, default=1, help="worker processes for the oracles")
    common.add_argument("--cap-vertices", type=_positive, default=None,
                        help="vertex cap for brute-force searches")
    common.add_argument("--timings", action="store_true", help="add stage timings to the report")

    p = argparse.ArgumentParser(prog="clustercolor", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("lift", parents=[common], help="greedy lift over a tree-cut decomposition")
    s.add_argument("--graph", required=True)
    s.add_argument("--tcd", required=True)
    s.add_argument("--kmap", required=True)
    s.add_argument("--n", type=_positive, required=True, help="torso clustering")
    s.add_argument("--xi", type=_positive, help="declared adhesion bound (default: measured)")
    s.add_argument("--out")
    s.set_defaults(func=cmd_lift, cap_default=12)

    s = sub.add_parser("td-lift", parents=[common], help="lift over a tree-decomposition")
    s.add_argument("--graph", required=True)
    s.add_argument("--td", required=True)
    s.add_argument("--mode", choices=("torso", "bag"), default="torso")
    s.add_argument("--k", type=_positive, required=True)
    s.add_argument("--n", type=_positive, required=True)
    s.add_argument("--d", type=int, required=True, help="maximum degree")
    s.add_argument("--eta", type=int, required=True, help="adhesion")
    s.add_argument("--out")
    s.add_argument("--dump-stages", metavar="DIR", help="write simplify and tree-cut stages into DIR")
    s.set_defaults(func=cmd_td_lift, cap_default=14)

    s = sub.add_parser("merge-cut", parents=[common], help="merge side colorings across a small edge-cut")
    s.add_argument("--graph", required=True)
    s.add_argument("--cut", required=True, help='JSON {"sideA": [vertex]}')
    s.add_argument("--coloring-a", required=True)
    s.add_argument("--coloring-b", required=True)
    s.add_argument("--k", type=_positive, required=True)
    s.add_argument("--n", type=_positive, required=True)
    s.add_argument("--out")
    s.set_defaults(func=cmd_merge_cut, cap_default=None)

    s = sub.add_parser("verify", parents=[common], help="check palette and clustering of a coloring")
    s.add_argument("--graph", required=True)
    s.add_argument("--coloring", required=True)
    s.add_argument("--k", type=int, required=True)
    s.add_argument("--n", type=int, required=True)
    s.set_defaults(func=cmd_verify, cap_default=None)

    s = sub.add_parser("oracle", help="brute-force oracles")
    osub = s.add_subparsers(dest="oracle", required=True)
    o = osub.add_parser("min-colors", parents=[common])
    o.add_argument("--graph", required=True)
    o.add_argument("--n", type=_positive, required=True)
    o.set_defaults(func=cmd_oracle, cap_default=DEFAULT_COLOR_CAP)
    o = osub.add_parser("immersion", parents=[common])
    o.add_argument("--graph", required=True)
    o.add_argument("--pattern", required=True, help="graph H to look for")
    o.add_argument("--strong", action="store_true")
    o.set_defaults(func=cmd_oracle, cap_default=None)

    s = sub.add_parser("gen", help="lower-bound constructions")
    gsub = s.add_subparsers(dest="gen", required=True)
    o = gsub.add_parser("apex-blocker", parents=[common])
    o.add_argument("--base", required=True, help="graph L")
    o.add_argument("--eta", type=_positive, required=True)
    o.add_argument("--out")
    o.set_defaults(func=cmd_gen, cap_default=None)
    o = gsub.add_parser("layered-blocker", parents=[common])
    o.add_argument("--base", required=True, help="graph L")
    o.add_argument("--n", type=_positive, required=True)
    o.add_argument("--out")
    o.set_defaults(func=cmd_gen, cap_default=None)
    return p


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    args.cap_vertices_given = args.cap_vertices is not None
    if args.cap_vertices is None:
        args.cap_vertices = args.cap_default
    try:
        return args.func(args)
    except (ParseError, DecompositionError, GraphError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (PreconditionError, ContractViolation, CapExceeded, ColoringError, ValueError) as exc:
        print(f"precondition failed: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except ClaimViolation as exc:  # pragma: no cover
        print(f"internal bound violated: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
