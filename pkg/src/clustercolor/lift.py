"""Greedy lift of torso colorings to a clustered coloring of the whole graph.

``lift_unit_bags`` walks the decomposition tree in DFS order and, at every
node, colors the bag vertex and the still-uncolored ends of torso edges,
using a coloring of the torso (minus its bag) as default colors and steering
away from the oldest adjacent monochromatic component. Components are
compared by ``sigma = (gamma, tau)``, the DFS indices at which a component
first appears and first meets a bag.
"""

from __future__ import annotations

import bisect
import dataclasses
from typing import Callable, Dict, FrozenSet, List, Mapping, Optional, Set, Tuple

from .coloring import Coloring, ColoringError, clustering, merge_across_cut, rebound_after_extra_edges, \
    relabel_into, verify_clustering
from .graph import Multigraph, degree, max_degree, min_edge_cut
from .oracles import CapExceeded, min_clustered_coloring
from .treecut import (DecompositionError, Torso, TreeCutDecomposition, contract_bags, torso_at,
                      validate_tcd)


class PreconditionError(ValueError):
    pass


class ContractViolation(RuntimeError):
    """A supplied coloring routine returned something outside its contract."""


class ClaimViolation(AssertionError):
    pass


# -- constants ----------------------------------------------------------------


@dataclasses.dataclass(frozen=True)
class LiftParameters:
    n: int
    xi: int
    n0: int
    n1: int
    n2: int
    n_star: int
    _f: Tuple[int, ...] = dataclasses.field(repr=False, compare=False, default=())

    def f(self, x: int) -> int:
        if x < 1:
            raise ValueError("f is defined on positive integers")
        if x <= len(self._f):
            return self._f[x - 1]
        return _f_values(self.xi, self.n0, self.n2, x)[x - 1]


def _f_values(xi: int, n0: int, n2: int, upto: int) -> Tuple[int, ...]:
    vals = [n0]
    total = n0
    while len(vals) < upto:
        nxt = (xi + 1) * n2 * total
        vals.append(nxt)
        total += nxt
    return tuple(vals)


def derived_constants(n: int, xi: int) -> LiftParameters:
    if n < 1 or xi < 1:
        raise ValueError("N and xi must be positive")
    n0 = xi * xi + xi
    n1 = 2 * n0 * xi
    n2 = (1 + 2 * xi * xi * (xi + 1) * n) * n1 * n1 + n0
    fs = _f_values(xi, n0, n2, xi)
    n_star = 1 + (1 + n * xi) * (xi + 1) * n0 * fs[xi - 1]
    return LiftParameters(n, xi, n0, n1, n2, n_star, fs)


def lift_bound(n: int, xi: int, alpha: int = 1) -> int:
    """Clustering certified by :func:`lift` for torso clustering ``n``, adhesion ``xi``, bags ``alpha``."""
    return max(alpha, 1) * derived_constants(n, max(xi, 1)).n_star


# -- torso coloring providers ------------------------------------------------------


@dataclasses.dataclass(frozen=True)
class ProviderRequest:
    node: int
    graph: Multigraph  # torso at ``node`` minus its bag
    palette: int  # k_t + |X_t|
    forbidden: int  # 0 when nothing is forbidden
    k: int
    torso: Torso

    @property
    def allowed(self) -> List[int]:
        return [c for c in range(1, self.palette + 1) if c != self.forbidden]


Provider = Callable[[ProviderRequest], Coloring]


def canonical_provider(n: int, cap: int = 12) -> Provider:
    """Exhaustive smallest-palette coloring, relabelled into the allowed colors."""

    def provide(req: ProviderRequest) -> Coloring:
        if len(req.graph) > cap:
            raise CapExceeded(f"torso at node {req.node} has {len(req.graph)} vertices, cap is {cap}")
        c = min_clustered_coloring(req.graph, n, limit=req.k)
        if c is None:
            raise ContractViolation(f"torso at node {req.node} is not {req.k}-colorable with clustering {n}")
        return Coloring(relabel_into(c.colors, req.allowed), req.palette)

    return provide


def _checked(provider: Provider, req: ProviderRequest, n: int) -> Dict[int, int]:
    c = provider(req)
    colors = dict(c.colors if isinstance(c, Coloring) else c)
    if set(colors) != req.graph.vertex_set:
        raise ContractViolation(f"provider at node {req.node} did not color exactly the torso minus its bag")
    allowed = set(req.allowed)
    bad = sorted(v for v, col in colors.items() if col not in allowed)
    if bad:
        raise ContractViolation(
            f"provider at node {req.node} used colors outside {sorted(allowed)} (vertices {bad[:5]})")
    worst = clustering(req.graph, colors)
    if worst > n:
        raise ContractViolation(f"provider at node {req.node} produced clustering {worst} > {n}")
    return colors


# -- the greedy lift on unit bags ------------------------------------------------------


class _Components:
    """Union-find over colored vertices; roots carry color, gamma, tau and members."""

    def __init__(self, vidx: Mapping[int, int]):
        self.vidx = vidx
        self.parent: Dict[int, int] = {}
        self.color: Dict[int, int] = {}
        self.gamma: Dict[int, int] = {}
        self.tau: Dict[int, int] = {}
        self.members: Dict[int, List[int]] = {}
        self.keys: Dict[int, List[int]] = {}  # sorted DFS indices of member bags

    def find(self, v: int) -> int:
        root = v
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[v] != root:
            self.parent[v], v = root, self.parent[v]
        return root

    def colored(self, v: int) -> bool:
        return v in self.parent

    def sigma(self, root: int) -> Tuple[int, int]:
        return self.gamma[root], self.tau[root]

    def add(self, v: int, col: int, gamma: int) -> None:
        self.parent[v] = v
        self.color[v] = col
        self.gamma[v] = gamma
        self.tau[v] = self.vidx[v]
        self.members[v] = [v]
        self.keys[v] = [self.vidx[v]]

    def union(self, a: int, b: int, edge_gamma: int) -> None:
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            if len(self.members[ra]) < len(self.members[rb]):
                ra, rb = rb, ra
            self.parent[rb] = ra
            self.gamma[ra] = min(self.gamma[ra], self.gamma[rb])
            self.tau[ra] = min(self.tau[ra], self.tau[rb])
            self.members[ra].extend(self.members.pop(rb))
            self.keys[ra] = sorted(self.keys[ra] + self.keys.pop(rb))
            del self.gamma[rb], self.tau[rb]
        self.gamma[ra] = min(self.gamma[ra], edge_gamma)

    def count_in(self, root: int, lo: int, hi: int) -> int:
        ks = self.keys[root]
        return bisect.bisect_right(ks, hi) - bisect.bisect_left(ks, lo)

    def crosses(self, root: int, lo: int, hi: int) -> bool:
        inside = self.count_in(root, lo, hi)
        return 0 < inside < len(self.keys[root])


@dataclasses.dataclass
class LiftTrace:
    """Per-step measurements of the quantities bounded in the correctness argument."""

    w_sizes: List[int] = dataclasses.field(default_factory=list)
    growth: List[int] = dataclasses.field(default_factory=list)
    depth_checks: int = 0
    steps: int = 0


def _smallest_other(palette: int, avoid: int) -> int:
    return 1 if avoid != 1 else 2 if palette >= 2 else 1


def lift_unit_bags(g: Multigraph, tcd: TreeCutDecomposition, k_map: Mapping[int, int], provider: Provider,
                   n: int, xi: Optional[int] = None, check_claims: bool = True,
                   trace: Optional[LiftTrace] = None) -> Coloring:
    """Clustered coloring of ``g`` from torso colorings when every bag has at most one vertex.

    The result uses ``max_t(k_t + |X_t|)`` colors and has clustering at most
    ``derived_constants(n, xi).n_star``; both are checked before returning.
    """
    rep = validate_tcd(g, tcd)
    if not rep.ok:
        raise PreconditionError(f"invalid tree-cut decomposition: {rep.reason}")
    if any(len(b) > 1 for b in tcd.bags.values()):
        big = min(t for t, b in tcd.bags.items() if len(b) > 1)
        raise PreconditionError(f"bag at node {big} has more than one vertex")
    if xi is None:
        xi = max(rep.adhesion, 1)
    if rep.adhesion > xi:
        raise PreconditionError(
            f"adhesion set of tree edge {rep.worst_edge} has {rep.adhesion} edges, more than xi={xi}")
    for t in tcd.tree.nodes:
        if t not in k_map:
            raise PreconditionError(f"no k given for node {t}")
        if k_map[t] < 1 or k_map[t] + len(tcd.bags[t]) < 2:
            raise PreconditionError(f"node {t} needs k_t >= 1 and k_t + |X_t| >= 2, got k_t={k_map[t]}")
    params = derived_constants(n, xi)

    rt = tcd.tree.rooted()
    order = rt.order
    idx = rt.index
    node_of = tcd.node_of()
    vidx = {v: idx[node_of[v]] for v in g.vertices}
    last_of = {i: rt.last[t] for i, t in enumerate(order)}

    torso_edges: Dict[int, List[int]] = {t: [] for t in order}
    edge_gamma: Dict[int, int] = {}
    for e in g.edges:
        path = rt.path(node_of[e.u], node_of[e.v])
        for t in path:
            torso_edges[t].append(e.idx)
        edge_gamma[e.idx] = min(idx[t] for t in path)
    relevant: Dict[int, Set[int]] = {t: set() for t in order}
    for t in order:
        for eid in torso_edges[t]:
            e = g.edge(eid)
            relevant[t].update((e.u, e.v))
    loop_gamma = {v: vidx[v] for v in g.vertices}
    for e in g.edges:
        if e.is_loop:
            loop_gamma[e.u] = min(loop_gamma[e.u], edge_gamma[e.idx])
    special = {
        v: all(rt.in_subtree(node_of[w], node_of[v]) for w in g.neighbors(v))
        for v in g.vertices
    }
    nbrs = {v: g.neighbors(v) for v in g.vertices}
    incident = {v: [e for e in g.incident(v) if not e.is_loop] for v in g.vertices}

    comps = _Components(vidx)
    palette_max = max(k_map[t] + len(tcd.bags[t]) for t in order)

    def put(v: int, col: int) -> None:
        comps.add(v, col, loop_gamma[v])
        for e in incident[v]:
            w = e.other(v)
            if comps.colored(w) and comps.color[comps.find(w)] == col:
                comps.union(v, w, edge_gamma[e.idx])

    def sigma_min(roots: Set[int]) -> int:
        keyed = sorted((comps.sigma(r), r) for r in roots)
        if len(keyed) > 1 and keyed[0][0] == keyed[1][0]:
            raise ClaimViolation("sigma is not total on disjoint components")
        return keyed[0][1]

    depth_records: List[Tuple[int, int, int]] = []  # (step, rank, representative vertex)

    for i, t in enumerate(order):
        lo, hi = i, last_of[i]
        bag = sorted(tcd.bags[t])
        palette = k_map[t] + len(bag)

        crossing_before: List[int] = []
        if i > 0:
            crossing_before = sorted({comps.find(v) for v in comps.parent if lo <= vidx[v] <= hi})
            crossing_before = [r for r in crossing_before if comps.crosses(r, lo, hi)]
        if check_claims:
            w_size = sum(1 for v in comps.parent if lo <= vidx[v] <= hi)
            if trace is not None:
                trace.w_sizes.append(w_size)
            if w_size > params.n0:
                raise ClaimViolation(f"step {i}: {w_size} colored vertices below node {t}, bound {params.n0}")
            ranked = sorted(crossing_before, key=comps.sigma)
            for rank, r in enumerate(ranked, start=1):
                depth_records.append((i, rank, r))
        before_sizes = {r: len(comps.members[r]) for r in crossing_before}

        # forbidden color
        if not bag:
            forbidden = 0
        elif comps.colored(bag[0]):
            forbidden = comps.color[comps.find(bag[0])]
        else:
            cands: Set[int] = set()
            if i > 0:
                bag_set = set(bag)
                for eid in torso_edges[t]:
                    e = g.edge(eid)
                    if e.is_loop or e.u in bag_set or e.v in bag_set:
                        continue
                    for a, b in ((e.u, e.v), (e.v, e.u)):
                        if comps.colored(a) and not comps.colored(b):
                            r = comps.find(a)
                            if comps.crosses(r, lo, hi):
                                cands.add(r)
            forbidden = comps.color[sigma_min(cands)] if cands else 1

        torso = torso_at(g, tcd, t, rt, node_of)
        req = ProviderRequest(t, torso.minus_core(), palette, forbidden, k_map[t], torso)
        default = _checked(provider, req, n)
        periph = torso.peripheral_of_node

        # relevant uncolored vertices outside the bag, decided against c_{i-1}
        decisions: Dict[int, int] = {}
        for v in sorted(relevant[t]):
            if v in tcd.bags[t] or comps.colored(v):
                continue
            dflt = default[periph[rt.branch_of(t, node_of[v])]]
            roots = {comps.find(w) for w in nbrs[v] if comps.colored(w)}
            if not roots:
                decisions[v] = dflt
                continue
            cv = comps.color[sigma_min(roots)]
            decisions[v] = dflt if cv != dflt else _smallest_other(palette, cv)
        if bag and not comps.colored(bag[0]):
            put(bag[0], forbidden)
        for v, col in decisions.items():
            put(v, col)

        # special vertices below t adjacent to a relevant component, decided against c^1_i
        rel_roots = {comps.find(v) for v in relevant[t]}
        specials: Set[int] = set()
        for r in rel_roots:
            for u in comps.members[r]:
                for w in nbrs[u]:
                    if (not comps.colored(w) and special[w] and node_of[w] != t
                            and rt.in_subtree(node_of[w], t)):
                        specials.add(w)
        late: Dict[int, int] = {}
        for v in sorted(specials):
            roots = {comps.find(w) for w in nbrs[v] if comps.colored(w)} & rel_roots
            cv = comps.color[sigma_min(roots)]
            late[v] = _smallest_other(palette, cv)
        for v, col in late.items():
            put(v, col)

        if check_claims:
            for r, size in before_sizes.items():
                # any vertex of the old component identifies the new one
                grown = len(comps.members[comps.find(r)]) - size
                if trace is not None:
                    trace.growth.append(grown)
                if grown > params.n2:
                    raise ClaimViolation(f"step {i}: crossing component grew by {grown} > {params.n2}")
        if trace is not None:
            trace.steps += 1

    uncolored = [v for v in g.vertices if not comps.colored(v)]
    if uncolored:  # pragma: no cover - every bag vertex is colored at its own step
        raise AssertionError(f"vertices left uncolored: {uncolored[:10]}")

    if check_claims:
        for i, rank, r in depth_records:
            final = comps.find(r)
            depth = comps.count_in(final, i, last_of[i])
            if trace is not None:
                trace.depth_checks += 1
            if depth > params.f(rank):
                raise ClaimViolation(
                    f"component of rank {rank} at step {i} has {depth} vertices below, bound {params.f(rank)}")

    out = Coloring({v: comps.color[comps.find(v)] for v in g.vertices}, palette_max)
    report = verify_clustering(g, out, palette_max, params.n_star)
    if not report.ok:  # pragma: no cover - would contradict the correctness argument
        raise AssertionError(f"lift produced an uncertified coloring: {report.reason}")
    return out


def lift(g: Multigraph, tcd: TreeCutDecomposition, k_map: Mapping[int, int], provider: Provider, n: int,
         xi: Optional[int] = None, check_claims: bool = True) -> Coloring:
    """Bags of any size: contract every bag to a vertex, lift, pull back.

    Uses ``max_t(k_t + min(|X_t|, 1))`` colors with clustering at most
    ``max_bag * derived_constants(n, xi).n_star``.
    """
    rep = validate_tcd(g, tcd)
    if not rep.ok:
        raise PreconditionError(f"invalid tree-cut decomposition: {rep.reason}")
    if xi is None:
        xi = max(rep.adhesion, 1)
    if rep.adhesion > xi:
        raise PreconditionError(
            f"adhesion set of tree edge {rep.worst_edge} has {rep.adhesion} edges, more than xi={xi}")
    for t in tcd.tree.nodes:
        if t in k_map and k_map[t] + len(tcd.bags[t]) < 2:
            raise PreconditionError(f"node {t} needs k_t + |X_t| >= 2")
    con = contract_bags(g, tcd)
    cp = lift_unit_bags(con.graph, con.tcd, k_map, provider, n, xi, check_claims)
    palette = max(k_map[t] + min(len(tcd.bags[t]), 1) for t in tcd.tree.nodes)
    out = Coloring({v: cp[con.lift_map[v]] for v in g.vertices}, palette)
    bound = lift_bound(n, xi, rep.max_bag)
    report = verify_clustering(g, out, palette, bound)
    if not report.ok:  # pragma: no cover
        raise AssertionError(f"lift produced an uncertified coloring: {report.reason}")
    return out


# -- assembly from a structure certificate ---------------------------------------------


class CertificateError(ValueError):
    pass


@dataclasses.dataclass(frozen=True)
class StructureCertificate:
    """Decomposition plus per-node ``(Z_t, d_t)`` against the excluded graph ``h_prime``."""

    tcd: TreeCutDecomposition
    per_node: Mapping[int, Tuple[FrozenSet[int], int]]
    h_prime: Multigraph
    xi: int
    eta: int

    @property
    def d(self) -> int:
        return max_degree(self.h_prime)


@dataclasses.dataclass(frozen=True)
class CertificateReport:
    ok: bool
    violations: Tuple[str, ...]


def validate_certificate(g: Multigraph, cert: StructureCertificate) -> CertificateReport:
    """Recompute every torso and check the four structural conditions plus the size bounds."""
    bad: List[str] = []
    rep = validate_tcd(g, cert.tcd)
    if not rep.ok:
        return CertificateReport(False, (f"decomposition: {rep.reason}",))
    if rep.adhesion > cert.eta:
        bad.append(f"adhesion {rep.adhesion} at tree edge {rep.worst_edge} exceeds eta={cert.eta}")
    d = cert.d
    tree = cert.tcd.tree
    single = len(tree.nodes) == 1
    hdeg = [degree(cert.h_prime, x) for x in cert.h_prime.vertices]
    rt = tree.rooted()
    node_of = cert.tcd.node_of()
    for t in tree.nodes:
        if t not in cert.per_node:
            bad.append(f"node {t}: no (Z_t, d_t) given")
            continue
        z, dt = cert.per_node[t]
        if len(z) > cert.xi:
            bad.append(f"node {t}: |Z_t|={len(z)} exceeds xi={cert.xi}")
        if not 0 <= dt <= d:
            bad.append(f"node {t}: d_t={dt} outside [0, {d}]")
        unknown = [e for e in z if not g.has_edge_id(e)]
        if unknown:
            bad.append(f"node {t}: Z_t names unknown edges {sorted(unknown)}")
        torso = torso_at(g, cert.tcd, t, rt, node_of)
        gz = torso.graph.without_edges(z)
        deg = {v: degree(gz, v) for v in gz.vertices}
        high = [v for v in gz.vertices if deg[v] >= dt]
        h_high = sum(1 for x in hdeg if x >= dt)
        if len(high) >= h_high:
            bad.append(f"node {t} (i): {len(high)} torso vertices of degree >= {dt}, H' has {h_high}")
        periph_high = [v for v in high if v in torso.peripheral]
        if periph_high:
            bad.append(f"node {t} (ii): peripheral vertices {periph_high} have degree >= {dt}")
        if single or not tree.is_leaf(t):
            low = [v for v in cert.tcd.bags[t] if deg[v] < dt]
            if low:
                bad.append(f"node {t} (iii): bag vertices {sorted(low)} have degree < {dt}")
        elif len(cert.tcd.bags[t]) > 1:
            bad.append(f"node {t} (iv): leaf bag has {len(cert.tcd.bags[t])} vertices")
    return CertificateReport(not bad, tuple(bad))


BaseColorer = Callable[[Multigraph, int], Coloring]


def certificate_palette_and_bound(cert: StructureCertificate, chi: int, n_base: int) -> Tuple[int, int]:
    if len(cert.tcd.tree.nodes) == 1:
        return 1, len(cert.h_prime) - 1
    n_torso = (cert.xi + 1) * n_base
    return chi + 1, lift_bound(n_torso, cert.eta, cert.tcd.max_bag())


def certificate_k_map(cert: StructureCertificate, chi: int) -> Dict[int, int]:
    d = cert.d
    tree = cert.tcd.tree
    at_max = sum(1 for x in cert.h_prime.vertices if degree(cert.h_prime, x) == d)
    out = {}
    for t in tree.nodes:
        size = len(cert.tcd.bags[t])
        _, dt = cert.per_node[t]
        if at_max != 1:
            out[t] = max(chi, 2 - size)
        elif tree.is_leaf(t):
            out[t] = 2 - size
        elif dt == d:
            out[t] = chi + 1  # stands in for chi_*(d-1), which is at most chi_*(d-2) + 1
        else:
            out[t] = max(chi, 2 - size)
    return out


def color_from_certificate(g: Multigraph, cert: StructureCertificate, base_colorer: BaseColorer, chi: int,
                           n_base: int, check_claims: bool = True) -> Coloring:
    """Color a graph from a validated structure certificate.

    ``base_colorer(graph, k)`` must return a ``k``-coloring with clustering
    ``n_base`` of the low-degree graph ``(G_t - Z_t) - X_t``. In the mode where
    the excluded graph has one vertex of maximum degree ``chi`` is the palette
    for degree ``d - 2`` graphs; otherwise it is the palette for degree
    ``d - 1`` graphs. The result uses at most ``chi + 1`` colors.
    """
    rep = validate_certificate(g, cert)
    if not rep.ok:
        raise CertificateError("; ".join(rep.violations))
    if chi < 1 or n_base < 1:
        raise PreconditionError("chi and n_base must be positive")
    tree = cert.tcd.tree
    if len(tree.nodes) == 1:
        out = Coloring({v: 1 for v in g.vertices}, 1)
        bound = len(cert.h_prime) - 1
        if clustering(g, out) > bound:  # pragma: no cover - excluded by conditions (i) and (iii)
            raise AssertionError("single-node certificate with too many vertices")
        return out

    k_map = certificate_k_map(cert, chi)
    n_torso = (cert.xi + 1) * n_base

    def provide(req: ProviderRequest) -> Coloring:
        z, _ = cert.per_node[req.node]
        reduced = req.graph.without_edges(z)
        base = base_colorer(reduced, req.k)
        if set(base.colors) != reduced.vertex_set:
            raise ContractViolation(f"base colorer at node {req.node} returned a partial coloring")
        rep = verify_clustering(reduced, base, req.k, n_base)
        if not rep.ok:
            raise ContractViolation(f"base colorer at node {req.node}: {rep.reason}")
        rebound_after_extra_edges(req.graph, reduced, base, n_base)
        return Coloring(relabel_into(base.colors, req.allowed), req.palette)

    out = lift(g, cert.tcd, k_map, provide, n_torso, cert.eta, check_claims)
    palette, bound = certificate_palette_and_bound(cert, chi, n_base)
    report = verify_clustering(g, out, palette, bound)
    if not report.ok:  # pragma: no cover
        raise AssertionError(f"certificate assembly uncertified: {report.reason}")
    return out


# -- recursion over small edge-cuts ------------------------------------------------------


def color_via_small_cuts(g: Multigraph, certified_colorer: Callable[[Multigraph], Coloring], k: int,
                         n: int) -> Coloring:
    """Split along edge-cuts of order at most 3 and glue side colorings with the Hall merge."""
    if k < 4:
        raise PreconditionError("k must be at least 4 so that cuts of order 3 can be merged")

    def leaf(sub: Multigraph) -> Coloring:
        c = certified_colorer(sub)
        if set(c.colors) != sub.vertex_set:
            raise ContractViolation("certified colorer returned a partial coloring")
        rep = verify_clustering(sub, c, k, n)
        if not rep.ok:
            raise ContractViolation(f"certified colorer: {rep.reason}")
        return c.with_palette(k)

    def rec(sub: Multigraph) -> Coloring:
        if len(sub) < 2:
            return leaf(sub)
        cut = min_edge_cut(sub)
        if cut.order > 3:
            return leaf(sub)
        c_a = rec(sub.subgraph(cut.side_a))
        c_b = rec(sub.subgraph(cut.side_b))
        return merge_across_cut(sub, cut, c_a, c_b, k, n)

    return rec(g)


__all__ = [
    "PreconditionError", "ContractViolation", "ClaimViolation", "LiftParameters", "derived_constants",
    "lift_bound", "ProviderRequest", "canonical_provider", "lift_unit_bags", "lift", "LiftTrace",
    "StructureCertificate", "CertificateError", "CertificateReport", "validate_certificate",
    "color_from_certificate", "certificate_k_map", "certificate_palette_and_bound", "color_via_small_cuts",
    "ColoringError", "DecompositionError",
]
