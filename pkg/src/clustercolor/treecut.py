"""Tree-cut decompositions: validation, adhesion sets, torsos and bag contraction."""

from __future__ import annotations

import dataclasses
from typing import Dict, FrozenSet, Iterable, List, Mapping, Optional, Sequence, Tuple

from .graph import Edge, Multigraph


class DecompositionError(ValueError):
    pass


def _tree_edge(a: int, b: int) -> Tuple[int, int]:
    return (a, b) if a <= b else (b, a)


class Tree:
    """Undirected tree on integer node ids with DFS helpers rooted anywhere."""

    def __init__(self, nodes: Iterable[int], edges: Iterable[Tuple[int, int]]):
        self.nodes: Tuple[int, ...] = tuple(sorted(set(nodes)))
        self.edges: Tuple[Tuple[int, int], ...] = tuple(sorted(_tree_edge(a, b) for a, b in edges))
        self.adj: Dict[int, List[int]] = {t: [] for t in self.nodes}
        for a, b in self.edges:
            if a not in self.adj or b not in self.adj:
                raise DecompositionError(f"tree edge ({a}, {b}) uses an unknown node")
            if a == b:
                raise DecompositionError(f"tree has a loop at {a}")
            self.adj[a].append(b)
            self.adj[b].append(a)
        for t in self.adj:
            self.adj[t].sort()

    def is_tree(self) -> bool:
        if not self.nodes:
            return False
        if len(self.edges) != len(self.nodes) - 1 or len(set(self.edges)) != len(self.edges):
            return False
        seen = {self.nodes[0]}
        stack = [self.nodes[0]]
        while stack:
            x = stack.pop()
            for y in self.adj[x]:
                if y not in seen:
                    seen.add(y)
                    stack.append(y)
        return len(seen) == len(self.nodes)

    def is_leaf(self, t: int) -> bool:
        return len(self.adj[t]) <= 1

    def rooted(self, root: Optional[int] = None) -> "RootedTree":
        return RootedTree(self, self.nodes[0] if root is None else root)

    def side(self, edge: Tuple[int, int], toward: int) -> FrozenSet[int]:
        """Nodes of the component of ``T - edge`` that contains ``toward``."""
        a, b = edge
        if toward not in (a, b):
            raise DecompositionError("toward must be an end of the edge")
        other = b if toward == a else a
        seen = {toward}
        stack = [toward]
        while stack:
            x = stack.pop()
            for y in self.adj[x]:
                if y not in seen and not (x == toward and y == other):
                    seen.add(y)
                    stack.append(y)
        return frozenset(seen)


class RootedTree:
    """DFS preorder (children ascending) with subtree index intervals."""

    def __init__(self, tree: Tree, root: int):
        self.tree = tree
        self.root = root
        self.parent: Dict[int, Optional[int]] = {root: None}
        self.children: Dict[int, List[int]] = {t: [] for t in tree.nodes}
        self.order: List[int] = []
        self.depth: Dict[int, int] = {root: 0}
        stack = [root]
        while stack:
            x = stack.pop()
            self.order.append(x)
            kids = [y for y in tree.adj[x] if y != self.parent[x]]
            self.children[x] = kids
            for y in kids:
                self.parent[y] = x
                self.depth[y] = self.depth[x] + 1
            stack.extend(reversed(kids))
        self.index: Dict[int, int] = {t: i for i, t in enumerate(self.order)}
        self.last: Dict[int, int] = {}
        for t in reversed(self.order):
            self.last[t] = max([self.index[t]] + [self.last[c] for c in self.children[t]])

    def in_subtree(self, node: int, top: int) -> bool:
        return self.index[top] <= self.index[node] <= self.last[top]

    def subtree(self, top: int) -> List[int]:
        return self.order[self.index[top]: self.last[top] + 1]

    def lca(self, a: int, b: int) -> int:
        while self.depth[a] > self.depth[b]:
            a = self.parent[a]
        while self.depth[b] > self.depth[a]:
            b = self.parent[b]
        while a != b:
            a, b = self.parent[a], self.parent[b]
        return a

    def path(self, a: int, b: int) -> List[int]:
        top = self.lca(a, b)
        left, right = [], []
        while a != top:
            left.append(a)
            a = self.parent[a]
        while b != top:
            right.append(b)
            b = self.parent[b]
        return left + [top] + right[::-1]

    def branch_of(self, t: int, node: int) -> int:
        """Neighbour of ``t`` on the side of ``T - t`` that holds ``node`` (``node != t``)."""
        if self.in_subtree(node, t):
            for c in self.children[t]:
                if self.in_subtree(node, c):
                    return c
            raise DecompositionError("node equals t")
        p = self.parent[t]
        assert p is not None
        return p


@dataclasses.dataclass(frozen=True)
class TreeCutDecomposition:
    tree: Tree
    bags: Mapping[int, FrozenSet[int]]

    def __post_init__(self) -> None:
        bags = {t: frozenset(self.bags.get(t, ())) for t in self.tree.nodes}
        extra = set(self.bags) - set(bags)
        if extra:
            raise DecompositionError(f"bags given for unknown nodes {sorted(extra)}")
        object.__setattr__(self, "bags", bags)

    @classmethod
    def build(cls, tree_edges: Sequence[Tuple[int, int]], bags: Mapping[int, Iterable[int]],
              nodes: Optional[Iterable[int]] = None) -> "TreeCutDecomposition":
        ns = set(nodes or ()) | set(bags) | {x for e in tree_edges for x in e}
        return cls(Tree(ns, tree_edges), {t: frozenset(b) for t, b in bags.items()})

    def node_of(self) -> Dict[int, int]:
        out = {}
        for t in self.tree.nodes:
            for v in self.bags[t]:
                out[v] = t
        return out

    def max_bag(self) -> int:
        return max((len(b) for b in self.bags.values()), default=0)


@dataclasses.dataclass(frozen=True)
class TcdReport:
    ok: bool
    adhesion: int
    max_bag: int
    reason: str = ""
    worst_edge: Optional[Tuple[int, int]] = None


def adhesion_sets(g: Multigraph, tcd: TreeCutDecomposition) -> Dict[Tuple[int, int], FrozenSet[int]]:
    """All adhesion sets at once: each graph edge crosses the tree edges on its tree path."""
    rt = tcd.tree.rooted()
    node_of = tcd.node_of()
    acc: Dict[Tuple[int, int], set] = {e: set() for e in tcd.tree.edges}
    for e in g.edges:
        p = rt.path(node_of[e.u], node_of[e.v])
        for a, b in zip(p, p[1:]):
            acc[_tree_edge(a, b)].add(e.idx)
    return {k: frozenset(v) for k, v in acc.items()}


def validate_tcd(g: Multigraph, tcd: TreeCutDecomposition) -> TcdReport:
    if not tcd.tree.is_tree():
        return TcdReport(False, 0, tcd.max_bag(), "decomposition tree is not a tree")
    seen: Dict[int, int] = {}
    for t in tcd.tree.nodes:
        for v in tcd.bags[t]:
            if v not in g.vertex_set:
                return TcdReport(False, 0, tcd.max_bag(), f"bag {t} holds unknown vertex {v}")
            if v in seen:
                return TcdReport(False, 0, tcd.max_bag(), f"vertex {v} lies in bags {seen[v]} and {t}")
            seen[v] = t
    missing = g.vertex_set - set(seen)
    if missing:
        return TcdReport(False, 0, tcd.max_bag(), f"vertices {sorted(missing)[:10]} lie in no bag")
    sets = adhesion_sets(g, tcd)
    worst = max(sets, key=lambda e: (len(sets[e]), [-x for x in e]), default=None)
    adh = len(sets[worst]) if worst is not None else 0
    return TcdReport(True, adh, tcd.max_bag(), "", worst)


def adhesion_set(g: Multigraph, tcd: TreeCutDecomposition, edge: Tuple[int, int]) -> FrozenSet[int]:
    """G-edges with one end on each side of ``T - edge`` (direct crossing scan)."""
    key = _tree_edge(*edge)
    if key not in set(tcd.tree.edges):
        raise DecompositionError(f"unknown tree edge {edge}")
    side = tcd.tree.side(key, key[0])
    inside = set()
    for t in side:
        inside |= tcd.bags[t]
    return frozenset(e.idx for e in g.edges if (e.u in inside) != (e.v in inside))


def check_adhesion(g: Multigraph, tcd: TreeCutDecomposition, bound: int) -> None:
    """Raise naming the first tree edge whose adhesion set exceeds ``bound``."""
    for edge, s in sorted(adhesion_sets(g, tcd).items()):
        if len(s) > bound:
            raise DecompositionError(
                f"adhesion set of tree edge {edge} has {len(s)} edges, more than the declared {bound}")


# -- torsos -----------------------------------------------------------------


@dataclasses.dataclass(frozen=True)
class Torso:
    graph: Multigraph
    core: FrozenSet[int]
    peripheral: Mapping[int, int]  # peripheral vertex -> neighbouring tree node of its component
    edge_map: Mapping[int, int]  # torso edge id -> G edge id

    @property
    def peripheral_of_node(self) -> Dict[int, int]:
        return {t: p for p, t in self.peripheral.items()}

    def minus_core(self) -> Multigraph:
        return self.graph.without_vertices(self.core)


def peripheral_base(g: Multigraph, tcd: TreeCutDecomposition) -> int:
    """Peripheral vertex for neighbour node ``t'`` is ``base + t'``, above every vertex id."""
    return g.max_vertex() + 1 - min(tcd.tree.nodes)


def torso_at(g: Multigraph, tcd: TreeCutDecomposition, t: int,
             rooted: Optional[RootedTree] = None, node_of: Optional[Mapping[int, int]] = None) -> Torso:
    if t not in tcd.tree.adj:
        raise DecompositionError(f"unknown tree node {t}")
    rt = rooted or tcd.tree.rooted()
    node_of = node_of or tcd.node_of()
    base = peripheral_base(g, tcd)
    nbrs = tcd.tree.adj[t]
    peripheral = {base + s: s for s in nbrs}

    def image(v: int) -> int:
        s = node_of[v]
        return v if s == t else base + rt.branch_of(t, s)

    edges = []
    for e in g.edges:
        a, b = image(e.u), image(e.v)
        if a == b and a in peripheral:
            continue
        edges.append(Edge(e.idx, a, b))
    core = tcd.bags[t]
    graph = Multigraph(set(core) | set(peripheral), edges)
    return Torso(graph, frozenset(core), peripheral, {e.idx: e.idx for e in edges})


# -- bag contraction ----------------------------------------------------------


@dataclasses.dataclass(frozen=True)
class Contraction:
    graph: Multigraph
    tcd: TreeCutDecomposition
    lift_map: Mapping[int, int]  # vertex of G -> vertex of the contracted graph


def contract_bags(g: Multigraph, tcd: TreeCutDecomposition) -> Contraction:
    """Identify each nonempty bag into its smallest vertex; edge ids are kept."""
    rep = validate_tcd(g, tcd)
    if not rep.ok:
        raise DecompositionError(f"invalid tree-cut decomposition: {rep.reason}")
    lift = {}
    bags = {}
    for t in tcd.tree.nodes:
        bag = tcd.bags[t]
        if bag:
            vt = min(bag)
            bags[t] = frozenset([vt])
            for v in bag:
                lift[v] = vt
        else:
            bags[t] = frozenset()
    gp = Multigraph(set(lift.values()), [Edge(e.idx, lift[e.u], lift[e.v]) for e in g.edges])
    return Contraction(gp, TreeCutDecomposition(tcd.tree, bags), lift)


def decomposition_from_json(data: Mapping) -> TreeCutDecomposition:
    try:
        edges = [tuple(int(x) for x in e) for e in data.get("treeEdges", [])]
        bags = {int(t): frozenset(int(v) for v in vs) for t, vs in data["bags"].items()}
        nodes = [int(t) for t in data.get("nodes", [])]
    except (KeyError, TypeError, ValueError) as exc:
        raise DecompositionError(f"malformed decomposition: {exc}") from None
    for e in edges:
        if len(e) != 2:
            raise DecompositionError(f"tree edge {list(e)} is not a pair")
    return TreeCutDecomposition.build(edges, bags, nodes)


def decomposition_to_json(tcd: TreeCutDecomposition) -> dict:
    return {
        "treeEdges": [list(e) for e in tcd.tree.edges],
        "bags": {str(t): sorted(tcd.bags[t]) for t in tcd.tree.nodes},
    }


__all__ = [
    "DecompositionError", "Tree", "RootedTree", "TreeCutDecomposition", "TcdReport", "Torso",
    "Contraction", "validate_tcd", "adhesion_set", "adhesion_sets", "check_adhesion", "torso_at",
    "contract_bags", "peripheral_base", "decomposition_from_json", "decomposition_to_json",
]
