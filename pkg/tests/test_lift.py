import itertools
import random

import pytest
from hypothesis import given, settings, strategies as st

from clustercolor.coloring import Coloring, clustering, verify_clustering
from clustercolor.graph import Multigraph
from clustercolor.lift import (CertificateError, ClaimViolation, ContractViolation, LiftTrace, PreconditionError,
                               StructureCertificate, canonical_provider, certificate_k_map,
                               color_from_certificate, color_via_small_cuts, derived_constants, lift, lift_bound,
                               lift_unit_bags, validate_certificate)
from clustercolor.oracles import find_clustered_coloring
from clustercolor.treecut import TreeCutDecomposition, contract_bags, validate_tcd

from _support import canonical_k_map, random_unit_tcd

P3 = Multigraph.from_edges(3, [(0, 1), (1, 2)])
P3_TCD = TreeCutDecomposition.build([(0, 1), (1, 2)], {0: [0], 1: [1], 2: [2]})


def by_formula(n, xi):
    # written out independently of the package
    n0 = xi * xi + xi
    n1 = 2 * n0 * xi
    n2 = (1 + 2 * xi * xi * (xi + 1) * n) * n1 * n1 + n0
    f = [n0]
    while len(f) < xi:
        f.append((xi + 1) * n2 * sum(f))
    n_star = 1 + (1 + n * xi) * (xi + 1) * n0 * f[xi - 1]
    return n0, n1, n2, f, n_star


def test_constants_examples():
    p = derived_constants(1, 1)
    assert (p.n0, p.n1, p.n2, p.f(1), p.n_star) == (2, 4, 82, 2, 17)
    p = derived_constants(1, 2)
    assert (p.n0, p.n1, p.n2, p.f(2)) == (6, 24, 14406, 259308)


@pytest.mark.parametrize("n,xi", [(n, xi) for n in range(1, 5) for xi in range(1, 6)])
def test_constants_match_formula(n, xi):
    n0, n1, n2, f, n_star = by_formula(n, xi)
    p = derived_constants(n, xi)
    assert (p.n0, p.n1, p.n2, p.n_star) == (n0, n1, n2, n_star)
    assert [p.f(x) for x in range(1, xi + 1)] == f
    assert p.n_star >= 2


def test_constants_f_beyond_xi():
    p = derived_constants(1, 1)
    assert p.f(2) == 2 * 82 * 2
    with pytest.raises(ValueError):
        p.f(0)


def test_constants_reject_zero():
    with pytest.raises(ValueError):
        derived_constants(0, 1)
    with pytest.raises(ValueError):
        derived_constants(1, 0)


def test_lift_p3_hand_example():
    c = lift_unit_bags(P3, P3_TCD, {0: 1, 1: 1, 2: 1}, canonical_provider(1), 1)
    assert c.colors == {0: 1, 1: 2, 2: 1}
    assert clustering(P3, c) == 1


def test_lift_single_vertex():
    g = Multigraph([0], [])
    c = lift_unit_bags(g, TreeCutDecomposition.build([], {0: [0]}), {0: 1}, canonical_provider(1), 1)
    assert c.colors == {0: 1}


def test_lift_edgeless_all_color_one():
    g = Multigraph(range(5), [])
    tcd = TreeCutDecomposition.build([(0, 1), (1, 2), (1, 3), (3, 4), (3, 5)],
                                     {0: [0], 1: [], 2: [1], 3: [2], 4: [3], 5: [4]})
    k = {t: 1 if tcd.bags[t] else 2 for t in tcd.tree.nodes}
    c = lift_unit_bags(g, tcd, k, canonical_provider(1), 1)
    assert set(c.colors.values()) == {1}


def test_lift_rejects_big_bag():
    with pytest.raises(PreconditionError):
        lift_unit_bags(P3, TreeCutDecomposition.build([(0, 1)], {0: [0, 1], 1: [2]}), {0: 1, 1: 1},
                       canonical_provider(1), 1)


def test_lift_rejects_k_map():
    tcd = TreeCutDecomposition.build([(0, 1), (1, 2), (2, 3)], {0: [0], 1: [1], 2: [2], 3: []})
    with pytest.raises(PreconditionError):
        lift_unit_bags(P3, tcd, {0: 1, 1: 1, 2: 1, 3: 1}, canonical_provider(1), 1)
    with pytest.raises(PreconditionError):
        lift_unit_bags(P3, P3_TCD, {0: 1, 1: 1}, canonical_provider(1), 1)


def test_lift_names_fat_tree_edge():
    g = Multigraph.from_edges(2, [(0, 1), (0, 1)])
    tcd = TreeCutDecomposition.build([(0, 1)], {0: [0], 1: [1]})
    with pytest.raises(PreconditionError, match=r"\(0, 1\)"):
        lift_unit_bags(g, tcd, {0: 1, 1: 1}, canonical_provider(2), 2, xi=1)


def test_provider_using_forbidden_color_is_caught():
    def cheat(req):
        return Coloring({v: max(req.forbidden, 1) for v in req.graph.vertices}, req.palette)

    with pytest.raises(ContractViolation):
        lift_unit_bags(P3, P3_TCD, {0: 1, 1: 1, 2: 1}, cheat, 1)


def test_provider_with_big_clustering_is_caught():
    g = Multigraph.from_edges(3, [(0, 1), (0, 2), (1, 2)])
    tcd = TreeCutDecomposition.build([(0, 1), (0, 2), (0, 3)], {0: [], 1: [0], 2: [1], 3: [2]})

    def lazy(req):
        return Coloring({v: req.allowed[0] for v in req.graph.vertices}, req.palette)

    with pytest.raises(ContractViolation):
        lift_unit_bags(g, tcd, {0: 2, 1: 1, 2: 1, 3: 1}, lazy, 1)


def test_lift_triangle_one_bag():
    g = Multigraph.from_edges(3, [(0, 1), (1, 2), (0, 2)])
    c = lift(g, TreeCutDecomposition.build([], {0: [0, 1, 2]}), {0: 1}, canonical_provider(1), 1)
    assert len(set(c.colors.values())) == 1
    assert clustering(g, c) == 3 <= 3 * derived_constants(1, 1).n_star


def test_lift_unit_bags_identical():
    k = {0: 1, 1: 1, 2: 1}
    assert lift(P3, P3_TCD, k, canonical_provider(1), 1).colors == \
        lift_unit_bags(P3, P3_TCD, k, canonical_provider(1), 1).colors


def test_lift_c4_two_bags():
    c4 = Multigraph.from_edges(4, [(0, 1), (1, 2), (2, 3), (3, 0)])
    tcd = TreeCutDecomposition.build([(0, 1)], {0: [0, 1], 1: [2, 3]})
    c = lift(c4, tcd, {0: 1, 1: 1}, canonical_provider(1), 1, xi=2)
    assert verify_clustering(c4, c, 2, lift_bound(1, 2, 2)).ok


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2 ** 32 - 1), st.integers(1, 3), st.integers(1, 2))
def test_lift_sound_and_claims_hold(seed, xi, n):
    rng = random.Random(seed)
    g, tcd = random_unit_tcd(rng, xi, max_nodes=25)
    k = canonical_k_map(g, tcd, n, rng)
    trace = LiftTrace()
    c = lift_unit_bags(g, tcd, k, canonical_provider(n), n, xi, trace=trace)
    params = derived_constants(n, xi)
    palette = max(k[t] + len(tcd.bags[t]) for t in tcd.tree.nodes)
    assert verify_clustering(g, c, palette, params.n_star).ok
    assert trace.steps == len(tcd.tree.nodes)
    assert all(w <= params.n0 for w in trace.w_sizes)
    assert all(x <= params.n2 for x in trace.growth)
    again = lift_unit_bags(g, tcd, k, canonical_provider(n), n, xi)
    assert again.colors == c.colors


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2 ** 32 - 1))
def test_general_lift_sound(seed):
    rng = random.Random(seed)
    m = rng.randint(1, 5)
    tedges = [(rng.randrange(i), i) for i in range(1, m)]
    nv = rng.randint(1, 8)
    bags = {t: [] for t in range(m)}
    for v in range(nv):
        bags[rng.randrange(m)].append(v)
    g = Multigraph.from_edges(nv, [(rng.randrange(nv), rng.randrange(nv)) for _ in range(rng.randint(0, 8))])
    tcd = TreeCutDecomposition.build(tedges, bags, range(m))
    rep = validate_tcd(g, tcd)
    con = contract_bags(g, tcd)
    k = canonical_k_map(con.graph, con.tcd, 1)
    xi = max(rep.adhesion, 1)
    c = lift(g, tcd, k, canonical_provider(1), 1, xi)
    palette = max(k[t] + min(len(bags[t]), 1) for t in range(m))
    assert verify_clustering(g, c, palette, lift_bound(1, xi, max(rep.max_bag, 1))).ok


# -- certificates -----------------------------------------------------------------------


def brute_colorer(n):
    def color(h, k):
        c = find_clustered_coloring(h, k, n)
        assert c is not None
        return c
    return color


TWO_TRIANGLES = Multigraph.from_edges(6, [(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5), (2, 3)])
STAR_TCD = TreeCutDecomposition.build([(0, t) for t in range(1, 7)],
                                      {0: [], **{t: [t - 1] for t in range(1, 7)}})


def star_cert(h_prime, dt=4, eta=3):
    return StructureCertificate(STAR_TCD, {t: (frozenset(), dt) for t in range(7)}, h_prime, xi=1, eta=eta)


K4 = Multigraph.from_edges(4, list(itertools.combinations(range(4), 2)))
K5 = Multigraph.from_edges(5, list(itertools.combinations(range(5), 2)))
STAR5 = Multigraph.from_edges(5, [(0, i) for i in range(1, 5)])


def test_certificate_single_node():
    tri = Multigraph.from_edges(3, [(0, 1), (1, 2), (0, 2)])
    cert = StructureCertificate(TreeCutDecomposition.build([], {0: [0, 1, 2]}), {0: (frozenset(), 2)}, K4, 1, 1)
    assert validate_certificate(tri, cert).ok
    c = color_from_certificate(tri, cert, brute_colorer(1), 1, 1)
    assert c.k == 1 and clustering(tri, c) == 3 <= len(K4) - 1


def test_certificate_multi_mode():
    cert = star_cert(K5)
    assert validate_certificate(TWO_TRIANGLES, cert).ok
    k = certificate_k_map(cert, 2)
    assert k[0] == 2 and all(k[t] == 2 for t in range(1, 7))
    c = color_from_certificate(TWO_TRIANGLES, cert, brute_colorer(2), 2, 2)
    assert verify_clustering(TWO_TRIANGLES, c, 3, lift_bound(4, 3, 1)).ok


def test_certificate_single_max_mode_leaves():
    cert = star_cert(STAR5)
    assert validate_certificate(TWO_TRIANGLES, cert).ok
    k = certificate_k_map(cert, 2)
    assert all(k[t] == 1 for t in range(1, 7))  # leaf with one vertex: 2 - |X_t|
    assert k[0] == 3
    c = color_from_certificate(TWO_TRIANGLES, cert, brute_colorer(2), 2, 2)
    assert c.k <= 3


def test_certificate_violations_reported():
    cert = star_cert(K5, dt=2)
    rep = validate_certificate(TWO_TRIANGLES, cert)
    assert not rep.ok and any("(ii)" in v for v in rep.violations)
    with pytest.raises(CertificateError):
        color_from_certificate(TWO_TRIANGLES, cert, brute_colorer(2), 2, 2)


def test_certificate_adhesion_and_z_size():
    bad = StructureCertificate(STAR_TCD, {t: (frozenset({0, 1}), 4) for t in range(7)}, K5, xi=1, eta=1)
    rep = validate_certificate(TWO_TRIANGLES, bad)
    assert any("adhesion" in v for v in rep.violations)
    assert any("|Z_t|" in v for v in rep.violations)


def test_certificate_leaf_bag_size():
    tcd = TreeCutDecomposition.build([(0, 1)], {0: [0, 1, 2], 1: [3, 4, 5]})
    cert = StructureCertificate(tcd, {0: (frozenset(), 1), 1: (frozenset(), 1)}, K5, 1, 1)
    assert any("(iv)" in v for v in validate_certificate(TWO_TRIANGLES, cert).violations)


# -- small cuts -------------------------------------------------------------------


def test_small_cuts_passthrough():
    c = color_via_small_cuts(K5, lambda h: find_clustered_coloring(h, 4, 2), 4, 2)
    assert c.colors == find_clustered_coloring(K5, 4, 2).colors


def test_small_cuts_two_k5():
    pairs = list(itertools.combinations(range(5), 2)) + [(a + 5, b + 5) for a, b in itertools.combinations(range(5), 2)]
    g = Multigraph.from_edges(10, pairs + [(4, 5)])
    seen = []

    def colorer(h):
        seen.append(sorted(h.vertices))
        return find_clustered_coloring(h, 4, 2)

    c = color_via_small_cuts(g, colorer, 4, 2)
    assert seen == [list(range(5)), list(range(5, 10))]
    assert clustering(g, c) == 2


def test_small_cuts_disconnected():
    g = Multigraph.from_edges(4, [(0, 1), (2, 3)])
    pieces = []

    def colorer(h):
        pieces.append(sorted(h.vertices))
        return Coloring({v: 1 for v in h.vertices}, 4)

    c = color_via_small_cuts(g, colorer, 4, 2)
    # the order-0 cut separates the components, then each edge is a cut of order 1
    assert pieces == [[0], [1], [2], [3]]
    assert clustering(g, c) == 1


def test_small_cuts_needs_four_colors():
    with pytest.raises(PreconditionError):
        color_via_small_cuts(K5, lambda h: find_clustered_coloring(h, 3, 1), 3, 1)


def test_claim_violation_is_assertion():
    assert issubclass(ClaimViolation, AssertionError)
