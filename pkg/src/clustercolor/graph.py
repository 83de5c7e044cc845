"""Multigraphs with loops and parallel edges, degrees, components and edge-cuts."""

from __future__ import annotations

import dataclasses
from collections import deque
from typing import Dict, FrozenSet, Iterable, List, Optional, Sequence, Tuple


class GraphError(ValueError):
    pass


@dataclasses.dataclass(frozen=True)
class Edge:
    idx: int
    u: int
    v: int
    virtual: bool = False  # clique-completion edges of tree-decomposition torsos

    @property
    def is_loop(self) -> bool:
        return self.u == self.v

    def other(self, x: int) -> int:
        return self.v if x == self.u else self.u


class Multigraph:
    """Immutable multigraph; vertex and edge ids are nonnegative integers.

    Edge ids are kept verbatim by :meth:`subgraph` and friends, so that edge sets
    computed on derived graphs (torsos, contractions, sides of a cut) still name
    edges of the original graph.
    """

    __slots__ = ("_vertices", "_vset", "_edges", "_by_id", "_inc")

    def __init__(self, vertices: Iterable[int], edges: Iterable[Edge | Tuple[int, int]] = ()):
        vs = sorted(set(vertices))
        vset = frozenset(vs)
        elist: List[Edge] = []
        for i, e in enumerate(edges):
            if not isinstance(e, Edge):
                a, b = e
                e = Edge(i, int(a), int(b))
            if e.u not in vset or e.v not in vset:
                raise GraphError(f"edge {e.idx} has an endpoint outside the vertex set: ({e.u}, {e.v})")
            elist.append(e)
        elist.sort(key=lambda e: e.idx)
        by_id = {e.idx: e for e in elist}
        if len(by_id) != len(elist):
            raise GraphError("duplicate edge ids")
        inc: Dict[int, List[Edge]] = {v: [] for v in vs}
        for e in elist:
            inc[e.u].append(e)
            if not e.is_loop:
                inc[e.v].append(e)
        self._vertices = tuple(vs)
        self._vset = vset
        self._edges = tuple(elist)
        self._by_id = by_id
        self._inc = {v: tuple(es) for v, es in inc.items()}

    @classmethod
    def from_edges(cls, n: int, pairs: Iterable[Tuple[int, int]]) -> "Multigraph":
        """Graph on vertices ``0..n-1``; edge ids follow the order of ``pairs``."""
        return cls(range(n), [Edge(i, a, b) for i, (a, b) in enumerate(pairs)])

    # -- accessors -------------------------------------------------------

    @property
    def vertices(self) -> Tuple[int, ...]:
        return self._vertices

    @property
    def vertex_set(self) -> FrozenSet[int]:
        return self._vset

    @property
    def edges(self) -> Tuple[Edge, ...]:
        return self._edges

    def edge(self, idx: int) -> Edge:
        try:
            return self._by_id[idx]
        except KeyError:
            raise GraphError(f"unknown edge id {idx}") from None

    def has_edge_id(self, idx: int) -> bool:
        return idx in self._by_id

    @property
    def edge_ids(self) -> FrozenSet[int]:
        return frozenset(self._by_id)

    def __len__(self) -> int:
        return len(self._vertices)

    def __contains__(self, v: object) -> bool:
        return v in self._vset

    @property
    def num_edges(self) -> int:
        return len(self._edges)

    def incident(self, v: int) -> Tuple[Edge, ...]:
        self._check(v)
        return self._inc[v]

    def neighbors(self, v: int) -> List[int]:
        """Distinct neighbours of ``v`` other than ``v`` itself, ascending."""
        self._check(v)
        return sorted({e.other(v) for e in self._inc[v] if not e.is_loop})

    def max_vertex(self) -> int:
        return self._vertices[-1] if self._vertices else -1

    def max_edge_id(self) -> int:
        return self._edges[-1].idx if self._edges else -1

    def _check(self, v: int) -> None:
        if v not in self._vset:
            raise GraphError(f"unknown vertex {v}")

    # -- derived graphs --------------------------------------------------

    def subgraph(self, vertices: Iterable[int]) -> "Multigraph":
        """Induced subgraph; edge ids are preserved."""
        keep = frozenset(vertices)
        missing = keep - self._vset
        if missing:
            raise GraphError(f"unknown vertices {sorted(missing)}")
        return Multigraph(keep, [e for e in self._edges if e.u in keep and e.v in keep])

    def without_edges(self, ids: Iterable[int]) -> "Multigraph":
        drop = set(ids)
        return Multigraph(self._vertices, [e for e in self._edges if e.idx not in drop])

    def without_vertices(self, vertices: Iterable[int]) -> "Multigraph":
        drop = set(vertices)
        return self.subgraph(v for v in self._vertices if v not in drop)

    def is_simple(self) -> bool:
        seen = set()
        for e in self._edges:
            if e.is_loop:
                return False
            key = (min(e.u, e.v), max(e.u, e.v))
            if key in seen:
                return False
            seen.add(key)
        return True

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Multigraph):
            return NotImplemented
        return self._vertices == other._vertices and self._edges == other._edges

    def __hash__(self) -> int:
        return hash((self._vertices, self._edges))

    def __repr__(self) -> str:
        return f"Multigraph(|V|={len(self._vertices)}, |E|={len(self._edges)})"


def degree(g: Multigraph, v: int) -> int:
    """Number of edge incidences at ``v``; a loop counts twice."""
    return sum(2 if e.is_loop else 1 for e in g.incident(v))


def max_degree(g: Multigraph) -> int:
    return max((degree(g, v) for v in g.vertices), default=0)


def components(g: Multigraph) -> List[List[int]]:
    """Connected components as sorted vertex lists, ordered by minimum vertex."""
    seen = set()
    out = []
    for s in g.vertices:
        if s in seen:
            continue
        comp = [s]
        seen.add(s)
        queue = deque([s])
        while queue:
            x = queue.popleft()
            for e in g.incident(x):
                y = e.other(x)
                if y not in seen:
                    seen.add(y)
                    comp.append(y)
                    queue.append(y)
        out.append(sorted(comp))
    return out


def is_connected(g: Multigraph) -> bool:
    return len(components(g)) <= 1


# -- edge-cuts ---------------------------------------------------------------


@dataclasses.dataclass(frozen=True)
class EdgeCut:
    side_a: FrozenSet[int]
    side_b: FrozenSet[int]
    crossing: FrozenSet[int]

    @property
    def order(self) -> int:
        return len(self.crossing)


def crossing_edges(g: Multigraph, side_a: Iterable[int]) -> FrozenSet[int]:
    a = frozenset(side_a)
    return frozenset(e.idx for e in g.edges if (e.u in a) != (e.v in a))


def edge_cut(g: Multigraph, side_a: Iterable[int]) -> EdgeCut:
    a = frozenset(side_a)
    if not a <= g.vertex_set:
        raise GraphError(f"side contains unknown vertices {sorted(a - g.vertex_set)}")
    return EdgeCut(a, g.vertex_set - a, crossing_edges(g, a))


def _flow_exceeds(g: Multigraph, sources: FrozenSet[int], sinks: FrozenSet[int], limit: int) -> int:
    """Max number of edge-disjoint source-sink paths, computed only up to ``limit + 1``."""
    # each undirected edge is a pair of unit arcs; flow[e] in {-1, 0, 1} oriented u->v
    flow: Dict[int, int] = {}
    total = 0
    while total <= limit:
        pred: Dict[int, Optional[Tuple[Edge, int]]] = {s: None for s in sources}
        queue = deque(sorted(sources))
        hit = None
        while queue and hit is None:
            x = queue.popleft()
            for e in g.incident(x):
                if e.is_loop:
                    continue
                y = e.other(x)
                if y in pred:
                    continue
                f = flow.get(e.idx, 0)
                sign = 1 if x == e.u else -1
                if f * sign >= 1:  # arc x->y saturated
                    continue
                pred[y] = (e, sign)
                if y in sinks:
                    hit = y
                    break
                queue.append(y)
        if hit is None:
            break
        y = hit
        while pred[y] is not None:
            e, sign = pred[y]
            flow[e.idx] = flow.get(e.idx, 0) + sign
            y = e.u if sign == 1 else e.v
        total += 1
    return total


def _feasible(g: Multigraph, forced_a: FrozenSet[int], forced_b: FrozenSet[int], order: int) -> bool:
    if forced_b:
        return _flow_exceeds(g, forced_a, forced_b, order) <= order
    return any(
        _flow_exceeds(g, forced_a, frozenset([t]), order) <= order
        for t in g.vertices
        if t not in forced_a
    )


def edge_connectivity(g: Multigraph) -> int:
    if len(g) < 2:
        raise GraphError("edge connectivity needs at least 2 vertices")
    s = g.vertices[0]
    best = g.num_edges
    for t in g.vertices[1:]:
        best = min(best, _flow_exceeds(g, frozenset([s]), frozenset([t]), best))
    return best


def min_edge_cut(g: Multigraph) -> EdgeCut:
    """Exact global minimum edge-cut with both sides nonempty.

    Among all minimum cuts the one whose sorted ``side_a`` is lexicographically
    smallest is returned; a disconnected graph yields a cut of order 0.
    """
    lam = edge_connectivity(g)
    vs = g.vertices
    chosen = [vs[0]]
    excluded: List[int] = []
    while True:
        a = frozenset(chosen)
        if len(a) < len(vs) and len(crossing_edges(g, a)) == lam:
            return edge_cut(g, a)
        last = chosen[-1]
        skipped: List[int] = []
        for x in vs:
            if x <= last:
                continue
            forced_b = frozenset(excluded + skipped)
            if _feasible(g, a | {x}, forced_b, lam):
                chosen.append(x)
                excluded.extend(skipped)
                break
            skipped.append(x)
        else:  # pragma: no cover - a minimum cut always extends the current prefix
            raise AssertionError("no minimum cut extends the current side")


def edge_count_between(g: Multigraph, a: Sequence[int], b: Sequence[int]) -> int:
    sa, sb = set(a), set(b)
    return sum(1 for e in g.edges if (e.u in sa and e.v in sb) or (e.u in sb and e.v in sa))
