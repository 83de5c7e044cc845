"""Tree-decompositions of bounded-degree graphs reduced to tree-cut form.

Pipeline: :func:`simplify` trims redundant bag entries, :func:`to_tree_cut`
moves every vertex to a new leaf below its topmost bag, and the two
``lift_from_*`` functions color the resulting torsos from colorings of the
original torsos (or bags) before running the greedy lift.
"""

from __future__ import annotations

import dataclasses
import itertools
from typing import Callable, Dict, FrozenSet, Iterable, Mapping, Optional, Set, Tuple

from .coloring import Coloring, clustering, relabel_into, verify_clustering
from .graph import Edge, Multigraph, max_degree
from .lift import ContractViolation, PreconditionError, ProviderRequest, derived_constants, lift_unit_bags
from .treecut import DecompositionError, RootedTree, Tree, TreeCutDecomposition, torso_at, validate_tcd


@dataclasses.dataclass(frozen=True)
class TreeDecomposition:
    tree: Tree
    bags: Mapping[int, FrozenSet[int]]

    def __post_init__(self) -> None:
        extra = set(self.bags) - set(self.tree.nodes)
        if extra:
            raise DecompositionError(f"bags given for unknown nodes {sorted(extra)}")
        object.__setattr__(self, "bags", {t: frozenset(self.bags.get(t, ())) for t in self.tree.nodes})

    @classmethod
    def build(cls, tree_edges, bags: Mapping[int, Iterable[int]], nodes=None) -> "TreeDecomposition":
        ns = set(nodes or ()) | set(bags) | {x for e in tree_edges for x in e}
        return cls(Tree(ns, tree_edges), {t: frozenset(b) for t, b in bags.items()})

    def adhesion(self) -> int:
        return max((len(self.bags[a] & self.bags[b]) for a, b in self.tree.edges), default=0)

    def max_bag(self) -> int:
        return max((len(b) for b in self.bags.values()), default=0)


@dataclasses.dataclass(frozen=True)
class TdReport:
    ok: bool
    adhesion: int
    max_bag: int
    reason: str = ""


def validate_td(g: Multigraph, td: TreeDecomposition) -> TdReport:
    adh, mb = td.adhesion(), td.max_bag()
    if not td.tree.is_tree():
        return TdReport(False, adh, mb, "decomposition tree is not a tree")
    covered = set()
    for b in td.bags.values():
        covered |= b
    if covered - g.vertex_set:
        return TdReport(False, adh, mb, f"bags hold unknown vertices {sorted(covered - g.vertex_set)[:10]}")
    if g.vertex_set - covered:
        return TdReport(False, adh, mb, f"vertices {sorted(g.vertex_set - covered)[:10]} lie in no bag")
    for e in g.edges:
        if not any(e.u in b and e.v in b for b in td.bags.values()):
            return TdReport(False, adh, mb, f"no bag contains both ends of edge {e.idx} ({e.u}, {e.v})")
    for v in g.vertices:
        holders = {t for t, b in td.bags.items() if v in b}
        start = min(holders)
        seen, stack = {start}, [start]
        while stack:
            x = stack.pop()
            for y in td.tree.adj[x]:
                if y in holders and y not in seen:
                    seen.add(y)
                    stack.append(y)
        if seen != holders:
            return TdReport(False, adh, mb, f"bags holding vertex {v} are not connected in the tree")
    return TdReport(True, adh, mb)


def td_torso(g: Multigraph, td: TreeDecomposition, t: int) -> Multigraph:
    """``G[X_t]`` plus virtual edges completing every neighbour intersection to a clique."""
    bag = td.bags[t]
    sub = g.subgraph(bag)
    adjacent = {(min(e.u, e.v), max(e.u, e.v)) for e in sub.edges}
    edges = list(sub.edges)
    nxt = g.max_edge_id() + 1
    for s in td.tree.adj[t]:
        for a, b in itertools.combinations(sorted(bag & td.bags[s]), 2):
            if (a, b) not in adjacent:
                adjacent.add((a, b))
                edges.append(Edge(nxt, a, b, virtual=True))
                nxt += 1
    return Multigraph(bag, edges)


def _pairs(g: Multigraph) -> Set[Tuple[int, int]]:
    return {(min(e.u, e.v), max(e.u, e.v)) for e in g.edges}


def _check_bounded(g: Multigraph, td: TreeDecomposition, d: int, eta: int) -> TdReport:
    if d < 0 or eta < 1:
        raise PreconditionError("need d >= 0 and eta >= 1")
    rep = validate_td(g, td)
    if not rep.ok:
        raise PreconditionError(f"invalid tree-decomposition: {rep.reason}")
    if max_degree(g) > d:
        raise PreconditionError(f"maximum degree {max_degree(g)} exceeds d={d}")
    if rep.adhesion > eta:
        raise PreconditionError(f"adhesion {rep.adhesion} exceeds eta={eta}")
    return rep


def _tops(rt: RootedTree, bags: Mapping[int, FrozenSet[int]]) -> Dict[int, int]:
    top: Dict[int, int] = {}
    for t in rt.order:  # preorder visits ancestors first
        for v in bags[t]:
            top.setdefault(v, t)
    return top


def simplify(g: Multigraph, td: TreeDecomposition, d: int, eta: int) -> TreeDecomposition:
    """Keep ``v`` in a child bag only if the child's subtree holds a neighbour of ``v``."""
    rep = _check_bounded(g, td, d, eta)
    rt = td.tree.rooted()
    top = _tops(rt, td.bags)
    below: Dict[int, Set[int]] = {}
    for t in reversed(rt.order):
        acc = set(td.bags[t])
        for c in rt.children[t]:
            acc |= below[c]
        below[t] = acc
    nbrs = {v: set(g.neighbors(v)) for v in g.vertices}
    bags: Dict[int, FrozenSet[int]] = {}
    for t in rt.order:
        p = rt.parent[t]
        keep = set()
        for v in td.bags[t]:
            if top[v] == t:
                keep.add(v)
            elif p is not None and v in td.bags[p] and nbrs[v] & (below[t] - td.bags[p]):
                keep.add(v)
        bags[t] = frozenset(keep)
    out = TreeDecomposition(td.tree, bags)

    after = validate_td(g, out)
    assert after.ok, after.reason
    assert after.adhesion <= rep.adhesion
    cap = eta * d + eta - 1
    for t in td.tree.nodes:
        assert out.bags[t] <= td.bags[t]
        tor = td_torso(g, out, t)
        assert max_degree(tor) <= cap, f"simplified torso at {t} has degree {max_degree(tor)} > {cap}"
        assert _pairs(tor) <= _pairs(td_torso(g, td, t)), f"simplified torso at {t} gained an adjacency"
        for v in out.bags[t]:
            assert sum(1 for s in td.tree.adj[t] if v in out.bags[s]) <= d + 1
    return out


# -- conversion to a tree-cut decomposition -----------------------------------------


@dataclasses.dataclass(frozen=True)
class StableShape:
    """The graph ``R_t``: base graph with ``S`` identified into ``v_s`` plus a stable set ``I``."""

    base: Multigraph
    s: FrozenSet[int]
    v_s: Optional[int]
    i_set: FrozenSet[int]
    r_graph: Multigraph
    torso_map: Mapping[int, int]  # vertex of the tree-cut torso -> vertex of ``r_graph``


@dataclasses.dataclass(frozen=True)
class TreeCutConversion:
    tcd: TreeCutDecomposition
    simplified: TreeDecomposition
    leaf_of: Mapping[int, int]  # vertex -> leaf node carrying it
    adhesion: int
    adhesion_statement: int  # (d+1)^2 * eta + d
    adhesion_proof: int  # (d+1) * eta^2 + d
    r_degree: Mapping[int, int]
    shapes: Mapping[int, StableShape]

    @property
    def adhesion_bound(self) -> int:
        return max(self.adhesion_statement, self.adhesion_proof)

    def report(self) -> dict:
        return {
            "adhesion": self.adhesion,
            "adhesionStatementBound": self.adhesion_statement,
            "adhesionProofBound": self.adhesion_proof,
            "statementBoundHeld": self.adhesion <= self.adhesion_statement,
            "proofBoundHeld": self.adhesion <= self.adhesion_proof,
            "rDegree": {str(t): self.r_degree[t] for t in sorted(self.r_degree)},
        }


def _shape(g: Multigraph, base: Multigraph, s: FrozenSet[int], torso, t: int, rt: RootedTree,
           leaf_vertex: Mapping[int, int], check_cliques: bool, eta: int) -> StableShape:
    parent = rt.parent[t]
    v_s: Optional[int] = None
    torso_map: Dict[int, int] = {}
    i_set = set()
    for p, nb in torso.peripheral.items():
        if nb in leaf_vertex:
            torso_map[p] = leaf_vertex[nb]
        elif nb == parent:
            v_s = min(s) if s else p
            torso_map[p] = v_s
        else:
            torso_map[p] = p
            i_set.add(p)

    def ident(x: int) -> int:
        return v_s if x in s else x

    keep = (set(base.vertices) - set(s)) | ({v_s} if v_s is not None else set())
    edges = []
    for e in base.edges:
        a, b = ident(e.u), ident(e.v)
        if a != b:
            edges.append(Edge(e.idx, a, b, e.virtual))
    known = {e.idx for e in edges}
    for e in torso.graph.edges:
        a, b = torso_map[e.u], torso_map[e.v]
        if a in i_set or b in i_set:
            edges.append(Edge(e.idx, a, b))
        elif e.idx not in known:
            raise AssertionError(f"torso edge {e.idx} at node {t} has no counterpart in R_t")
    r_graph = Multigraph(keep | i_set, edges)
    for e in torso.graph.edges:
        re = r_graph.edge(e.idx)
        if {re.u, re.v} != {torso_map[e.u], torso_map[e.v]}:
            raise AssertionError(f"torso edge {e.idx} at node {t} maps to a different pair in R_t")
    for q in i_set:
        nq = r_graph.neighbors(q)
        if any(x in i_set for x in nq) or any(e.is_loop for e in r_graph.incident(q)):
            raise AssertionError(f"added set at node {t} is not stable")
        if check_cliques:
            if len(nq) > eta:
                raise AssertionError(f"neighbourhood of {q} at node {t} has {len(nq)} > {eta} vertices")
            for a, b in itertools.combinations(nq, 2):
                if b not in r_graph.neighbors(a):
                    raise AssertionError(f"neighbourhood of {q} at node {t} is not a clique")
    return StableShape(base, frozenset(s), v_s, frozenset(i_set), r_graph, torso_map)


def to_tree_cut(g: Multigraph, td: TreeDecomposition, d: int, eta: int,
                base: str = "torso") -> TreeCutConversion:
    """Tree-cut decomposition with singleton leaf bags and empty internal bags.

    ``base`` selects the graph ``R_t`` is built on: the simplified torso
    (``"torso"``) or the induced simplified bag (``"bag"``).
    """
    _check_bounded(g, td, d, eta)
    td1 = simplify(g, td, d, eta)
    rt = td.tree.rooted()
    top = _tops(rt, td1.bags)
    nxt = max(td.tree.nodes) + 1
    tree_edges = list(td.tree.edges)
    bags: Dict[int, FrozenSet[int]] = {t: frozenset() for t in td.tree.nodes}
    leaf_of: Dict[int, int] = {}
    leaf_vertex: Dict[int, int] = {}
    for t in td.tree.nodes:
        for v in sorted(x for x in td1.bags[t] if top[x] == t):
            tree_edges.append((t, nxt))
            bags[nxt] = frozenset([v])
            leaf_of[v] = nxt
            leaf_vertex[nxt] = v
            nxt += 1
    tcd = TreeCutDecomposition.build(tree_edges, bags, td.tree.nodes)
    rep = validate_tcd(g, tcd)
    assert rep.ok, rep.reason
    held = max((d + 1) ** 2 * eta + d, (d + 1) * eta * eta + d)
    assert rep.adhesion <= held, f"tree-cut adhesion {rep.adhesion} above {held}"

    prt = tcd.tree.rooted()
    node_of = tcd.node_of()
    r_degree: Dict[int, int] = {}
    shapes: Dict[int, StableShape] = {}
    for t in td.tree.nodes:
        p = rt.parent[t]
        s = td1.bags[t] & td1.bags[p] if p is not None else frozenset()
        torso = torso_at(g, tcd, t, prt, node_of)
        base_graph = td_torso(g, td1, t) if base == "torso" else g.subgraph(td1.bags[t])
        # the tree-cut tree roots at the same (minimum) node, so parents agree
        shape = _shape(g, base_graph, s, torso, t, prt, leaf_vertex, base == "torso", eta)
        shapes[t] = shape
        r_degree[t] = max_degree(shape.r_graph)
    return TreeCutConversion(
        tcd, td1, leaf_of, rep.adhesion, (d + 1) ** 2 * eta + d, (d + 1) * eta * eta + d, r_degree, shapes)


# -- coloring through identification and a stable set -----------------------------------


def stable_extension_bound(d: int, eta: int, n: int, d_prime: int) -> int:
    return (d_prime + 1) * (d * eta * n + 1)


def color_stable_extension(g_prime: Multigraph, base_graph: Multigraph, base: Coloring, s: Iterable[int],
                           v_s: Optional[int], i_set: Iterable[int], d: int, eta: int, n: int,
                           d_prime: int) -> Coloring:
    """Extend ``base`` to ``g_prime``: ``v_s`` and the stable set take color 1, the rest inherit.

    ``g_prime`` must be (a subgraph of) ``base_graph`` with ``s`` identified
    into ``v_s`` plus a stable set whose neighbourhoods are cliques of at most
    ``eta`` vertices. The clustering is checked against
    ``(d_prime + 1) * (d * eta * n + 1)``.
    """
    s, i_set = frozenset(s), frozenset(i_set)
    if len(s) > eta:
        raise PreconditionError(f"identified set has {len(s)} > eta={eta} vertices")
    if not s <= base_graph.vertex_set:
        raise PreconditionError("identified set is not inside the base graph")
    if s and v_s is None:
        raise PreconditionError("identified set needs a vertex to identify into")
    rest = set(base_graph.vertices) - s
    expected = rest | ({v_s} if v_s is not None else set())
    if i_set & expected or set(g_prime.vertices) != expected | i_set:
        raise PreconditionError("vertex set is not (base - S) + v_S + I")
    ident = {x: (v_s if x in s else x) for x in base_graph.vertices}
    for e in g_prime.edges:
        if e.u in i_set or e.v in i_set:
            continue
        if not base_graph.has_edge_id(e.idx):
            raise PreconditionError(f"edge {e.idx} is not an edge of the base graph")
        be = base_graph.edge(e.idx)
        if {ident[be.u], ident[be.v]} != {e.u, e.v}:
            raise PreconditionError(f"edge {e.idx} does not match the identified base graph")
    for q in i_set:
        nq = g_prime.neighbors(q)
        if any(x in i_set for x in nq) or any(e.is_loop for e in g_prime.incident(q)):
            raise PreconditionError("added set is not stable")
        if len(nq) > eta:
            raise PreconditionError(f"neighbourhood of {q} has more than eta={eta} vertices")
        for a, b in itertools.combinations(nq, 2):
            if b not in g_prime.neighbors(a):
                raise PreconditionError(f"neighbourhood of {q} is not a clique")
    if max_degree(base_graph) > d:
        raise PreconditionError(f"base graph has degree {max_degree(base_graph)} > d={d}")
    if max_degree(g_prime) > d_prime:
        raise PreconditionError(f"extended graph has degree {max_degree(g_prime)} > d'={d_prime}")
    rep = verify_clustering(base_graph, base, base.k, n)
    if not rep.ok:
        raise PreconditionError(f"base coloring invalid: {rep.reason}")

    colors = {v: base[v] for v in rest}
    if v_s is not None:
        colors[v_s] = 1
    for q in i_set:
        colors[q] = 1
    out = Coloring(colors, max(base.k, 1))
    bound = stable_extension_bound(d, eta, n, d_prime)
    worst = clustering(g_prime, out)
    if worst > bound:  # pragma: no cover - would contradict the component counting argument
        raise AssertionError(f"stable extension clustering {worst} exceeds {bound}")
    return out


# -- the two lifts ------------------------------------------------------------------


def pipeline_constants(d: int, eta: int, n: int) -> Dict[str, int]:
    """Intermediate degrees, clustering and adhesion bounds used by both lifts."""
    torso_degree = eta * d + eta - 1
    r_degree = (d + 1) * eta * eta + d
    n1 = stable_extension_bound(torso_degree, eta, n, r_degree)
    xi = max((d + 1) ** 2 * eta + d, r_degree)
    return {"torsoDegree": torso_degree, "rDegree": r_degree, "N1": n1, "xi": xi}


def pipeline_bound(d: int, eta: int, n: int) -> int:
    c = pipeline_constants(d, eta, n)
    return derived_constants(c["N1"], c["xi"]).n_star


@dataclasses.dataclass(frozen=True)
class PipelineResult:
    coloring: Coloring
    conversion: TreeCutConversion
    bound: int
    palette: int


def _leaf_or_internal(conv: TreeCutConversion, req: ProviderRequest) -> Optional[Coloring]:
    if req.node in conv.shapes:
        return None
    # leaf of the tree-cut tree: one peripheral vertex
    col = req.allowed[0]
    return Coloring({v: col for v in req.graph.vertices}, req.palette)


def _run(g: Multigraph, conv: TreeCutConversion, k_internal: int, node_coloring, n1: int) -> Coloring:
    k_map = {t: (k_internal if t in conv.shapes else 1) for t in conv.tcd.tree.nodes}

    def provide(req: ProviderRequest) -> Coloring:
        leaf = _leaf_or_internal(conv, req)
        if leaf is not None:
            return leaf
        colored = node_coloring(req.node)
        shape = conv.shapes[req.node]
        c = {p: colored[shape.torso_map[p]] for p in req.graph.vertices}
        return Coloring(relabel_into(c, req.allowed), req.palette)

    xi = max(conv.adhesion_bound, 1)
    if conv.adhesion > xi:  # pragma: no cover
        raise AssertionError("measured adhesion above both bounds")
    return lift_unit_bags(g, conv.tcd, k_map, provide, n1, xi)


def lift_from_torso_colorings(g: Multigraph, td: TreeDecomposition, k: int,
                              torso_colorer: Callable[[Multigraph, int], Coloring], d: int, eta: int,
                              n: int) -> PipelineResult:
    """``k``-coloring (``k >= 2``) from ``k``-colorings of the torsos with clustering ``n``."""
    if k < 2:
        raise PreconditionError("torso mode needs k >= 2")
    conv = to_tree_cut(g, td, d, eta, base="torso")
    consts = pipeline_constants(d, eta, n)
    for t, deg in conv.r_degree.items():
        if deg > consts["rDegree"]:  # pragma: no cover
            raise AssertionError(f"R_t at node {t} has degree {deg} > {consts['rDegree']}")

    def node_coloring(t: int) -> Mapping[int, int]:
        shape = conv.shapes[t]
        base = torso_colorer(shape.base, k)
        if set(base.colors) != shape.base.vertex_set:
            raise ContractViolation(f"torso colorer at node {t} returned a partial coloring")
        rep = verify_clustering(shape.base, base, k, n)
        if not rep.ok:
            raise ContractViolation(f"torso colorer at node {t}: {rep.reason}")
        ext = color_stable_extension(shape.r_graph, shape.base, base.with_palette(k), shape.s, shape.v_s,
                                     shape.i_set, consts["torsoDegree"], eta, n, consts["rDegree"])
        return ext.colors

    coloring = _run(g, conv, k, node_coloring, consts["N1"])
    bound = derived_constants(consts["N1"], consts["xi"]).n_star
    rep = verify_clustering(g, coloring, k, bound)
    if not rep.ok:  # pragma: no cover
        raise AssertionError(f"torso pipeline uncertified: {rep.reason}")
    return PipelineResult(coloring.with_palette(k), conv, bound, k)


def lift_from_bag_colorings(g: Multigraph, td: TreeDecomposition, k: int,
                            bag_colorer: Callable[[Multigraph, int], Coloring], d: int, eta: int,
                            n: int) -> PipelineResult:
    """``(k+1)``-coloring from ``k``-colorings of the induced bags with clustering ``n``."""
    if k < 1:
        raise PreconditionError("bag mode needs k >= 1")
    conv = to_tree_cut(g, td, d, eta, base="bag")
    consts = pipeline_constants(d, eta, n)
    n0 = d * eta * n + 1

    def node_coloring(t: int) -> Mapping[int, int]:
        shape = conv.shapes[t]
        base = bag_colorer(shape.base, k)
        if set(base.colors) != shape.base.vertex_set:
            raise ContractViolation(f"bag colorer at node {t} returned a partial coloring")
        rep = verify_clustering(shape.base, base, k, n)
        if not rep.ok:
            raise ContractViolation(f"bag colorer at node {t}: {rep.reason}")
        colors = {v: base[v] for v in shape.base.vertices if v not in shape.s}
        if shape.v_s is not None:
            colors[shape.v_s] = 1
        for q in shape.i_set:
            colors[q] = k + 1
        worst = clustering(shape.r_graph, colors)
        if worst > n0:  # pragma: no cover - identification grows one component by at most d*|S|*n
            raise AssertionError(f"identified bag at node {t} has clustering {worst} > {n0}")
        return colors

    coloring = _run(g, conv, k + 1, node_coloring, consts["N1"])
    bound = derived_constants(consts["N1"], consts["xi"]).n_star
    rep = verify_clustering(g, coloring, k + 1, bound)
    if not rep.ok:  # pragma: no cover
        raise AssertionError(f"bag pipeline uncertified: {rep.reason}")
    return PipelineResult(coloring.with_palette(k + 1), conv, bound, k + 1)


def td_from_json(data: Mapping) -> TreeDecomposition:
    try:
        edges = [tuple(int(x) for x in e) for e in data.get("treeEdges", [])]
        bags = {int(t): frozenset(int(v) for v in vs) for t, vs in data["bags"].items()}
    except (KeyError, TypeError, ValueError) as exc:
        raise DecompositionError(f"malformed decomposition: {exc}") from None
    return TreeDecomposition.build(edges, bags)


def td_to_json(td: TreeDecomposition) -> dict:
    return {
        "treeEdges": [list(e) for e in td.tree.edges],
        "bags": {str(t): sorted(td.bags[t]) for t in td.tree.nodes},
    }
