"""Exhaustive oracles and generators for the lower-bound constructions.

Everything here is exponential and guarded by explicit size caps.
"""

from __future__ import annotations

import concurrent.futures
import dataclasses
import itertools
from typing import Dict, List, Mapping, Optional, Sequence, Set, Tuple

from .coloring import Coloring
from .graph import Edge, Multigraph, components, degree, max_degree

DEFAULT_COLOR_CAP = 10
DEFAULT_IMMERSION_VERTEX_CAP = 9
DEFAULT_IMMERSION_EDGE_CAP = 16


class CapExceeded(ValueError):
    pass


# -- clustered coloring search ---------------------------------------------------


def _search_order(g: Multigraph) -> List[int]:
    # BFS order per component so that partial components are checked early
    order: List[int] = []
    seen: Set[int] = set()
    for s in g.vertices:
        if s in seen:
            continue
        seen.add(s)
        queue = [s]
        while queue:
            x = queue.pop(0)
            order.append(x)
            for y in g.neighbors(x):
                if y not in seen:
                    seen.add(y)
                    queue.append(y)
    return order


def find_clustered_coloring(g: Multigraph, k: int, n: int) -> Optional[Coloring]:
    """First ``k``-coloring with clustering at most ``n`` in canonical search order.

    Colors are introduced in ascending order of first use, which removes the
    ``k!`` relabelings without changing the answer.
    """
    if k < 1:
        return Coloring({}, 0) if len(g) == 0 else None
    order = _search_order(g)
    nbrs = {v: g.neighbors(v) for v in g.vertices}
    colors: Dict[int, int] = {}

    def comp_size(v: int, col: int) -> int:
        seen = {v}
        stack = [v]
        while stack:
            x = stack.pop()
            for y in nbrs[x]:
                if y not in seen and colors.get(y) == col:
                    seen.add(y)
                    stack.append(y)
                    if len(seen) > n:
                        return len(seen)
        return len(seen)

    def rec(i: int, used: int) -> bool:
        if i == len(order):
            return True
        v = order[i]
        for col in range(1, min(used + 1, k) + 1):
            colors[v] = col
            if comp_size(v, col) <= n and rec(i + 1, max(used, col)):
                return True
            del colors[v]
        return False

    if rec(0, 0):
        return Coloring(colors, k)
    return None


def min_clustered_colors(g: Multigraph, n: int, cap: int = DEFAULT_COLOR_CAP) -> int:
    """Least ``k`` such that ``g`` has a ``k``-coloring with clustering at most ``n``."""
    if len(g) > cap:
        raise CapExceeded(f"graph has {len(g)} vertices, cap is {cap}")
    if n < 1:
        raise ValueError("clustering must be at least 1")
    if len(g) == 0:
        return 0
    for k in range(1, len(g) + 1):
        if find_clustered_coloring(g, k, n) is not None:
            return k
    raise AssertionError("a proper coloring always exists")  # pragma: no cover


def min_clustered_coloring(g: Multigraph, n: int, limit: Optional[int] = None) -> Optional[Coloring]:
    """Coloring with the least palette (up to ``limit``) and clustering at most ``n``."""
    if len(g) == 0:
        return Coloring({}, 0)
    top = len(g) if limit is None else min(limit, len(g))
    for k in range(1, top + 1):
        c = find_clustered_coloring(g, k, n)
        if c is not None:
            return c
    return None


# -- immersion ------------------------------------------------------------------


@dataclasses.dataclass(frozen=True)
class ImmersionWitness:
    vertex_map: Mapping[int, int]
    # H edge id -> (G vertices along the path/cycle, G edge ids used)
    path_map: Mapping[int, Tuple[Tuple[int, ...], Tuple[int, ...]]]
    strong: bool

    def to_json(self) -> dict:
        return {
            "vertexMap": {str(k): v for k, v in sorted(self.vertex_map.items())},
            "pathMap": {str(k): {"vertices": list(p[0]), "edges": list(p[1])}
                        for k, p in sorted(self.path_map.items())},
            "strong": self.strong,
        }


def check_immersion_witness(g: Multigraph, h: Multigraph, w: ImmersionWitness) -> bool:
    """Independent validation of a witness against the definition."""
    vm = w.vertex_map
    if set(vm) != set(h.vertices) or len(set(vm.values())) != len(vm):
        return False
    if not set(vm.values()) <= g.vertex_set or set(w.path_map) != set(h.edge_ids):
        return False
    used: Set[int] = set()
    for he in h.edges:
        verts, eids = w.path_map[he.idx]
        if not eids or used & set(eids) or len(set(eids)) != len(eids):
            return False
        used |= set(eids)
        # walk the edges
        if len(verts) != len(eids) + 1:
            return False
        for i, eid in enumerate(eids):
            if not g.has_edge_id(eid):
                return False
            ge = g.edge(eid)
            if {ge.u, ge.v} != {verts[i], verts[i + 1]}:
                return False
        if he.is_loop:
            if verts[0] != vm[he.u] or verts[-1] != vm[he.u] or len(set(verts[:-1])) != len(verts) - 1:
                return False
        else:
            if {verts[0], verts[-1]} != {vm[he.u], vm[he.v]} or len(set(verts)) != len(verts):
                return False
        if w.strong:
            ends = {vm[he.u], vm[he.v]}
            others = {vm[x] for x in h.vertices} - ends
            if others & set(verts):
                return False
    return True


def _paths(g: Multigraph, start: int, end: int, free: Set[int], avoid: Set[int], loop: bool):
    """Simple paths (or cycles through ``start`` when ``loop``) over unused edges."""
    if loop:
        for e in g.incident(start):
            if e.idx in free and e.is_loop:
                yield (start, start), (e.idx,)
    stack = [(start, (start,), ())]
    while stack:
        x, verts, eids = stack.pop()
        options = []
        for e in g.incident(x):
            if e.idx not in free or e.idx in eids or e.is_loop:
                continue
            y = e.other(x)
            if y == end and (not loop or len(eids) >= 1):
                if loop and len(eids) == 1 and eids[0] == e.idx:
                    continue
                options.append(("done", y, e.idx))
            elif y not in verts and y not in avoid and y != end:
                options.append(("go", y, e.idx))
        for kind, y, eid in reversed(options):
            if kind == "done":
                yield verts + (y,), eids + (eid,)
            else:
                stack.append((y, verts + (y,), eids + (eid,)))


def _ordered_paths(g, start, end, free, avoid, loop):
    found = list(_paths(g, start, end, free, avoid, loop))
    found.sort(key=lambda p: (len(p[1]), p[1]))
    return found


def _pack(g: Multigraph, hedges: Sequence[Edge], vm: Mapping[int, int], strong: bool) -> Optional[Dict[int, tuple]]:
    images = set(vm.values())
    out: Dict[int, tuple] = {}

    def rec(i: int, free: Set[int]) -> bool:
        if i == len(hedges):
            return True
        he = hedges[i]
        a, b = vm[he.u], vm[he.v]
        avoid = (images - {a, b}) if strong else set()
        for verts, eids in _ordered_paths(g, a, b, free, avoid, he.is_loop):
            out[he.idx] = (verts, eids)
            if rec(i + 1, free - set(eids)):
                return True
            del out[he.idx]
        return False

    return out if rec(0, set(g.edge_ids)) else None


def _pack_many(g, hedges, maps, strong):
    for vm in maps:
        found = _pack(g, hedges, vm, strong)
        if found is not None:
            return vm, found
    return None


def has_immersion(g: Multigraph, h: Multigraph, strong: bool = False,
                  vertex_cap: int = DEFAULT_IMMERSION_VERTEX_CAP,
                  edge_cap: int = DEFAULT_IMMERSION_EDGE_CAP, jobs: int = 1) -> Optional[ImmersionWitness]:
    """Exhaustive search for an (optionally strong) immersion of ``h`` in ``g``.

    Vertex maps are tried in lexicographic order and paths shortest-first, so
    the returned witness is canonical for the input. With ``jobs > 1`` blocks
    of vertex maps are packed in worker processes; the earliest block with a
    hit wins, which gives the same witness as the sequential scan.
    """
    if len(g) > vertex_cap or g.num_edges > edge_cap:
        raise CapExceeded(f"graph has {len(g)} vertices / {g.num_edges} edges, caps are {vertex_cap}/{edge_cap}")
    if len(h) > len(g) or h.num_edges > g.num_edges:
        return None
    hdeg = {x: degree(h, x) for x in h.vertices}
    gdeg = {v: degree(g, v) for v in g.vertices}
    # hardest demands first
    hedges = sorted(h.edges, key=lambda e: (-(hdeg[e.u] + hdeg[e.v]), e.idx))
    hverts = list(h.vertices)
    maps = (dict(zip(hverts, image)) for image in itertools.permutations(g.vertices, len(hverts)))
    maps = (vm for vm in maps if all(gdeg[vm[x]] >= hdeg[x] for x in hverts))

    if jobs <= 1:
        hit = _pack_many(g, hedges, maps, strong)
        return ImmersionWitness(hit[0], hit[1], strong) if hit else None

    block = 64
    with concurrent.futures.ProcessPoolExecutor(max_workers=jobs) as pool:
        while True:
            blocks = [list(itertools.islice(maps, block)) for _ in range(jobs)]
            blocks = [b for b in blocks if b]
            if not blocks:
                return None
            futures = [pool.submit(_pack_many, g, hedges, b, strong) for b in blocks]
            for fut in futures:  # in block order, so the earliest hit wins
                hit = fut.result()
                if hit is not None:
                    for other in futures:
                        other.cancel()
                    return ImmersionWitness(hit[0], hit[1], strong)


# -- lower-bound constructions ---------------------------------------------------


def _copy_into(l: Multigraph, offset: int, next_edge: int) -> Tuple[Dict[int, int], List[Edge]]:
    vmap = {x: offset + i for i, x in enumerate(l.vertices)}
    edges = []
    for e in l.edges:
        edges.append(Edge(next_edge, vmap[e.u], vmap[e.v]))
        next_edge += 1
    return vmap, edges


def gen_apex_blocker(l: Multigraph, eta: int) -> Multigraph:
    """``eta`` disjoint copies of ``l`` plus one apex joined to every other vertex.

    Copy ``i`` occupies ids ``i*|V(l)| ..``; the apex is the last vertex.
    """
    if eta < 1:
        raise ValueError("eta must be positive")
    size = len(l)
    edges: List[Edge] = []
    for i in range(eta):
        _, es = _copy_into(l, i * size, len(edges))
        edges.extend(es)
    apex = eta * size
    for v in range(apex):
        edges.append(Edge(len(edges), apex, v))
    return Multigraph(range(apex + 1), edges)


def gen_layered_blocker(l: Multigraph, n: int) -> Multigraph:
    """Path ``v_1..v_{n+1}`` (ids ``0..n``) with ``2n-1`` copies of ``l`` hung on each path edge."""
    if n < 1:
        raise ValueError("N must be positive")
    edges: List[Edge] = [Edge(i, i, i + 1) for i in range(n)]
    nxt = n + 1
    for i in range(n):
        for _ in range(2 * n - 1):
            vmap, es = _copy_into(l, nxt, len(edges))
            edges.extend(es)
            for x in l.vertices:
                edges.append(Edge(len(edges), i, vmap[x]))
                edges.append(Edge(len(edges), i + 1, vmap[x]))
            nxt += len(l)
    return Multigraph(range(nxt), edges)


def degree_one_bound(h: int) -> int:
    """Clustering of one color on graphs with no immersion of a max-degree-1 graph on ``h`` vertices."""
    if h < 1:
        raise ValueError("h must be positive")
    return (h - 1) ** h


def has_path_on(g: Multigraph, h: int) -> bool:
    """Whether ``g`` contains a (simple) path on ``h`` vertices."""
    if h <= 1:
        return len(g) >= h
    nbrs = {v: g.neighbors(v) for v in g.vertices}

    def rec(x: int, seen: Set[int]) -> bool:
        if len(seen) >= h:
            return True
        for y in nbrs[x]:
            if y not in seen:
                seen.add(y)
                if rec(y, seen):
                    return True
                seen.discard(y)
        return False

    return any(rec(v, {v}) for v in g.vertices)


@dataclasses.dataclass(frozen=True)
class DegreeOneReport:
    applicable: bool
    ok: bool
    worst: int
    bound: int


def check_degree_one(g: Multigraph, h: int) -> DegreeOneReport:
    """If ``g`` has no star ``K_{1,h}`` and no path on ``h`` vertices, components are small."""
    bound = degree_one_bound(h)
    star = any(len(g.neighbors(v)) >= h for v in g.vertices)
    applicable = not star and not has_path_on(g, h)
    worst = max((len(c) for c in components(g)), default=0)
    return DegreeOneReport(applicable, (not applicable) or worst <= bound, worst, bound)


def max_degree_vertices(h: Multigraph) -> Tuple[int, int]:
    """``(max degree, number of vertices attaining it)``."""
    d = max_degree(h)
    return d, sum(1 for v in h.vertices if degree(h, v) == d)


def all_graphs(n: int, max_edges: Optional[int] = None):
    """Every labelled simple graph on ``0..n-1`` (optionally with at most ``max_edges`` edges)."""
    pairs = list(itertools.combinations(range(n), 2))
    for mask in range(1 << len(pairs)):
        chosen = [p for i, p in enumerate(pairs) if mask >> i & 1]
        if max_edges is not None and len(chosen) > max_edges:
            continue
        yield Multigraph.from_edges(n, chosen)
