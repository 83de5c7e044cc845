"""Colorings, monochromatic components and the two clustering-preserving glue steps."""

from __future__ import annotations

import dataclasses
from collections import deque
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Set, Tuple

from .graph import EdgeCut, Multigraph


class ColoringError(ValueError):
    pass


@dataclasses.dataclass(frozen=True)
class Coloring:
    """Total map from vertices to colors ``1..k``."""

    colors: Mapping[int, int]
    k: int

    def __post_init__(self) -> None:
        object.__setattr__(self, "colors", dict(sorted(self.colors.items())))
        if self.k < 0:
            raise ColoringError("palette size must be nonnegative")
        for v, c in self.colors.items():
            if not 1 <= c <= self.k:
                raise ColoringError(f"vertex {v} has color {c} outside [1, {self.k}]")

    def __getitem__(self, v: int) -> int:
        return self.colors[v]

    def __len__(self) -> int:
        return len(self.colors)

    def used(self) -> Set[int]:
        return set(self.colors.values())

    def restrict(self, vertices: Iterable[int]) -> "Coloring":
        return Coloring({v: self.colors[v] for v in vertices}, self.k)

    def with_palette(self, k: int) -> "Coloring":
        return Coloring(self.colors, k)

    def check_total(self, g: Multigraph) -> None:
        missing = [v for v in g.vertices if v not in self.colors]
        if missing:
            raise ColoringError(f"coloring is partial; uncolored vertices {missing[:10]}")


def monochromatic_components(g: Multigraph, c: Coloring | Mapping[int, int]) -> List[List[int]]:
    """Components of every color class, each sorted, ordered by minimum vertex."""
    colors = c.colors if isinstance(c, Coloring) else c
    missing = [v for v in g.vertices if v not in colors]
    if missing:
        raise ColoringError(f"coloring is partial; uncolored vertices {missing[:10]}")
    seen: Set[int] = set()
    out = []
    for s in g.vertices:
        if s in seen:
            continue
        col = colors[s]
        comp = [s]
        seen.add(s)
        queue = deque([s])
        while queue:
            x = queue.popleft()
            for e in g.incident(x):
                y = e.other(x)
                if y not in seen and colors[y] == col:
                    seen.add(y)
                    comp.append(y)
                    queue.append(y)
        out.append(sorted(comp))
    return out


def clustering(g: Multigraph, c: Coloring | Mapping[int, int]) -> int:
    """Size of the largest monochromatic component (0 for the empty graph)."""
    return max((len(m) for m in monochromatic_components(g, c)), default=0)


@dataclasses.dataclass(frozen=True)
class ClusterReport:
    ok: bool
    worst: int
    witness: Optional[Tuple[int, ...]]
    palette_used: int
    reason: str = ""

    def to_json(self) -> dict:
        return {
            "ok": self.ok,
            "worst": self.worst,
            "witness": list(self.witness) if self.witness is not None else None,
            "paletteUsed": self.palette_used,
            "reason": self.reason,
        }


def verify_clustering(g: Multigraph, c: Coloring, k: int, n: int) -> ClusterReport:
    """Check that ``c`` uses at most ``k`` colors and has clustering at most ``n``."""
    missing = [v for v in g.vertices if v not in c.colors]
    if missing:
        return ClusterReport(False, 0, tuple(missing), 0, "partial coloring")
    comps = monochromatic_components(g, c)
    worst_comp = max(comps, key=len, default=[])
    used = max((c[v] for v in g.vertices), default=0)
    if used > k or c.k > k:
        bad = [v for v in g.vertices if c[v] > k]
        return ClusterReport(False, len(worst_comp), tuple(bad) or None, used, f"palette exceeds {k}")
    if len(worst_comp) > n:
        return ClusterReport(False, len(worst_comp), tuple(worst_comp), used, f"component larger than {n}")
    return ClusterReport(True, len(worst_comp), None, used)


# -- Hall merge across a small edge-cut ----------------------------------------


def complement_perfect_matching(k: int, conflicts: Iterable[Tuple[int, int]]) -> Optional[Dict[int, int]]:
    """Perfect matching ``i -> j`` of ``[k] x [k]`` avoiding the ``conflicts`` pairs.

    Each ``i`` in ascending order takes the smallest free allowed ``j``; only
    when none is free does it augment. With no conflicts this is the identity.
    Returns ``None`` when no perfect matching exists.
    """
    bad = set(conflicts)
    match_of_j: Dict[int, int] = {}

    def augment(i: int, seen: Set[int]) -> bool:
        for j in range(1, k + 1):
            if (i, j) not in bad and j not in match_of_j:
                match_of_j[j] = i
                return True
        for j in range(1, k + 1):
            if (i, j) in bad or j in seen:
                continue
            seen.add(j)
            if j not in match_of_j or augment(match_of_j[j], seen):
                match_of_j[j] = i
                return True
        return False

    for i in range(1, k + 1):
        if not augment(i, set()):
            return None
    return {i: j for j, i in match_of_j.items()}


def conflict_pairs(g: Multigraph, cut: EdgeCut, c_a: Coloring, c_b: Coloring) -> Set[Tuple[int, int]]:
    pairs = set()
    for eid in cut.crossing:
        e = g.edge(eid)
        a, b = (e.u, e.v) if e.u in cut.side_a else (e.v, e.u)
        pairs.add((c_a[a], c_b[b]))
    return pairs


def merge_across_cut(g: Multigraph, cut: EdgeCut, c_a: Coloring, c_b: Coloring, k: int, n: int) -> Coloring:
    """Glue colorings of the two sides of an edge-cut of order below ``k``.

    The colors of side A are permuted so that no crossing edge is
    monochromatic; every monochromatic component of the result therefore lies
    inside one side and the clustering does not grow.
    """
    if cut.side_a | cut.side_b != g.vertex_set or cut.side_a & cut.side_b:
        raise ColoringError("cut sides must partition the vertex set")
    if cut.order >= k:
        raise ColoringError(f"cut order {cut.order} must be at most k-1 = {k - 1}")
    for name, side, col in (("A", cut.side_a, c_a), ("B", cut.side_b, c_b)):
        sub = g.subgraph(side)
        rep = verify_clustering(sub, col.restrict(side) if set(col.colors) >= side else col, k, n)
        if not rep.ok:
            raise ColoringError(f"side {name} coloring invalid: {rep.reason}")
    sigma = complement_perfect_matching(k, conflict_pairs(g, cut, c_a, c_b))
    if sigma is None:  # pragma: no cover - excluded by the order bound
        raise AssertionError("no conflict-free permutation despite cut order < k")
    colors = {v: sigma[c_a[v]] for v in cut.side_a}
    colors.update({v: c_b[v] for v in cut.side_b})
    out = Coloring(colors, k)
    for eid in cut.crossing:
        e = g.edge(eid)
        assert out[e.u] != out[e.v], "crossing edge left monochromatic"
    return out


# -- rebound after putting back deleted edges -------------------------------------


def rebound_after_extra_edges(g: Multigraph, g_prime: Multigraph, c: Coloring, n: int) -> int:
    """Certified clustering of ``c`` on ``g`` when ``g_prime = g - Z``.

    Returns ``(|Z| + 1) * n`` after checking it on the instance.
    """
    if g.vertex_set != g_prime.vertex_set:
        raise ColoringError("graphs must share the vertex set")
    for e in g_prime.edges:
        if not g.has_edge_id(e.idx) or {g.edge(e.idx).u, g.edge(e.idx).v} != {e.u, e.v}:
            raise ColoringError(f"edge {e.idx} of the smaller graph is not an edge of the larger one")
    rep = verify_clustering(g_prime, c, c.k, n)
    if not rep.ok:
        raise ColoringError(f"coloring invalid on the smaller graph: {rep.reason}")
    extra = len(g.edge_ids - g_prime.edge_ids)
    bound = (extra + 1) * n
    measured = clustering(g, c)
    if measured > bound:  # pragma: no cover - each extra edge joins at most two components
        raise AssertionError(f"rebound bound {bound} violated by component of size {measured}")
    return bound


def relabel_into(c: Mapping[int, int], allowed: Sequence[int]) -> Dict[int, int]:
    """Order-preserving relabel of colors ``1..m`` onto the ascending ``allowed`` list."""
    allowed = sorted(allowed)
    out = {}
    for v, col in c.items():
        if col > len(allowed):
            raise ColoringError(f"color {col} does not fit into {len(allowed)} allowed colors")
        out[v] = allowed[col - 1]
    return out
