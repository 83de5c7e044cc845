"""JSON and DOT serialization."""

from __future__ import annotations

import json
from typing import Any, Mapping

from .coloring import Coloring, ColoringError
from .graph import Edge, GraphError, Multigraph


class ParseError(ValueError):
    pass


def dumps(data: Any) -> str:
    """Canonical JSON: sorted keys, fixed separators, trailing newline."""
    return json.dumps(data, sort_keys=True, indent=2) + "\n"


def load_json(path: str) -> Any:
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as exc:
        raise ParseError(f"{path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: invalid JSON at line {exc.lineno} column {exc.colno}: {exc.msg}") from None


def _int(x: Any, what: str) -> int:
    if isinstance(x, bool) or not isinstance(x, int):
        raise ParseError(f"{what} must be an integer, got {x!r}")
    return x


def graph_from_json(data: Mapping) -> Multigraph:
    if not isinstance(data, Mapping) or "vertices" not in data or "edges" not in data:
        raise ParseError('graph JSON needs "vertices" and "edges"')
    vs = [_int(v, "vertex id") for v in data["vertices"]]
    if len(set(vs)) != len(vs):
        raise ParseError("duplicate vertex id")
    edges = []
    for i, e in enumerate(data["edges"]):
        if not isinstance(e, list) or len(e) != 2:
            raise ParseError(f"edge {i} must be a pair of vertex ids")
        edges.append(Edge(i, _int(e[0], "edge end"), _int(e[1], "edge end")))
    try:
        return Multigraph(vs, edges)
    except GraphError as exc:
        raise ParseError(str(exc)) from None


def graph_to_json(g: Multigraph) -> dict:
    """Edges are listed by ascending id; the list position becomes the id on reload."""
    return {"vertices": list(g.vertices), "edges": [[e.u, e.v] for e in sorted(g.edges, key=lambda e: e.idx)]}


def coloring_from_json(data: Mapping, g: Multigraph, vertices=None) -> Coloring:
    """Read colors for ``vertices`` (default: all of ``g``); other entries are ignored."""
    if not isinstance(data, Mapping) or "k" not in data or "colors" not in data:
        raise ParseError('coloring JSON needs "k" and "colors"')
    k = _int(data["k"], "k")
    cols = data["colors"]
    if not isinstance(cols, list) or (g.vertices and len(cols) <= g.max_vertex()):
        raise ParseError("colors must be a list indexed by vertex id")
    try:
        return Coloring({v: _int(cols[v], f"color of vertex {v}")
                         for v in (g.vertices if vertices is None else sorted(vertices))}, k)
    except ColoringError as exc:
        raise ParseError(str(exc)) from None


def coloring_to_json(c: Coloring) -> dict:
    """Colors listed by vertex id; ids absent from the graph get 0."""
    size = max(c.colors, default=-1) + 1
    return {"k": c.k, "colors": [c.colors.get(v, 0) for v in range(size)]}


def to_dot(g: Multigraph, c: Coloring | None = None) -> str:
    lines = ["graph G {"]
    for v in g.vertices:
        lines.append(f"  {v} [label=\"{v}:{c[v]}\"];" if c is not None else f"  {v};")
    for e in sorted(g.edges, key=lambda e: e.idx):
        style = " [style=dashed]" if e.virtual else ""
        lines.append(f"  {e.u} -- {e.v}{style};")
    lines.append("}")
    return "\n".join(lines) + "\n"
