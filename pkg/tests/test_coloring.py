import itertools
import random

import pytest
from hypothesis import given, settings, strategies as st

from clustercolor.coloring import (Coloring, ColoringError, clustering, complement_perfect_matching,
                                   conflict_pairs, merge_across_cut, monochromatic_components,
                                   rebound_after_extra_edges, relabel_into, verify_clustering)
from clustercolor.graph import Multigraph, edge_cut

from _support import colored_graphs, naive_clustering

P3 = Multigraph.from_edges(3, [(0, 1), (1, 2)])
C4 = Multigraph.from_edges(4, [(0, 1), (1, 2), (2, 3), (3, 0)])
K4 = Multigraph.from_edges(4, list(itertools.combinations(range(4), 2)))


def col(values, k):
    return Coloring(dict(enumerate(values)), k)


def test_components_examples():
    assert monochromatic_components(P3, col([1, 2, 1], 2)) == [[0], [1], [2]]
    assert monochromatic_components(P3, col([1, 1, 2], 2)) == [[0, 1], [2]]
    assert sorted(map(len, monochromatic_components(C4, col([1, 1, 2, 2], 2)))) == [2, 2]


def test_components_partial_coloring():
    with pytest.raises(ColoringError):
        monochromatic_components(P3, {0: 1})


def test_coloring_range_checked():
    with pytest.raises(ColoringError):
        col([1, 3], 2)


def test_verify_examples():
    assert verify_clustering(K4, col([1, 2, 3, 4], 4), 4, 1).ok
    rep = verify_clustering(C4, col([1, 1, 1, 1], 1), 1, 2)
    assert not rep.ok and rep.worst == 4 and sorted(rep.witness) == [0, 1, 2, 3]
    assert verify_clustering(P3, col([1, 2, 1], 2), 2, 1).ok


def test_verify_palette_overflow():
    rep = verify_clustering(P3, col([1, 3, 1], 3), 2, 3)
    assert not rep.ok and "palette" in rep.reason


def test_report_json_keys():
    assert set(verify_clustering(P3, col([1, 2, 1], 2), 2, 1).to_json()) == {
        "ok", "worst", "witness", "paletteUsed", "reason"}


def test_merge_single_edge():
    g = Multigraph.from_edges(2, [(0, 1)])
    cut = edge_cut(g, [0])
    out = merge_across_cut(g, cut, Coloring({0: 1}, 2), Coloring({1: 1}, 2), 2, 1)
    assert out.colors == {0: 2, 1: 1}


def test_merge_without_crossing_is_identity():
    g = Multigraph.from_edges(4, [(0, 1), (2, 3)])
    cut = edge_cut(g, [0, 1])
    out = merge_across_cut(g, cut, Coloring({0: 1, 1: 2}, 3), Coloring({2: 3, 3: 1}, 3), 3, 1)
    assert out.colors == {0: 1, 1: 2, 2: 3, 3: 1}


def test_merge_two_triangles():
    g = Multigraph.from_edges(6, [(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5), (0, 3), (1, 4)])
    cut = edge_cut(g, [0, 1, 2])
    c_a = Coloring({0: 1, 1: 2, 2: 3}, 3)
    c_b = Coloring({3: 1, 4: 2, 5: 3}, 3)
    conflicts = conflict_pairs(g, cut, c_a, c_b)
    good = [p for p in itertools.permutations(range(1, 4)) if all(p[i - 1] != j for i, j in conflicts)]
    assert good
    out = merge_across_cut(g, cut, c_a, c_b, 3, 1)
    assert verify_clustering(g, out, 3, 1).ok
    assert tuple(out[v] for v in (0, 1, 2)) in good


def test_merge_rejects_big_cut():
    g = Multigraph.from_edges(2, [(0, 1), (0, 1)])
    with pytest.raises(ColoringError):
        merge_across_cut(g, edge_cut(g, [0]), Coloring({0: 1}, 2), Coloring({1: 1}, 2), 2, 1)


def test_merge_rejects_bad_side_coloring():
    g = Multigraph.from_edges(3, [(0, 1), (1, 2)])
    with pytest.raises(ColoringError):
        merge_across_cut(g, edge_cut(g, [0, 1]), Coloring({0: 1, 1: 1}, 2), Coloring({2: 1}, 2), 2, 1)


def test_rebound_examples():
    g = Multigraph.from_edges(4, [(0, 1), (2, 3)])
    assert rebound_after_extra_edges(g, g, Coloring({v: 1 for v in range(4)}, 1), 2) == 2
    big = Multigraph.from_edges(4, [(0, 1), (2, 3), (1, 2)])
    c = Coloring({v: 1 for v in range(4)}, 1)
    assert rebound_after_extra_edges(big, g, c, 2) == 4
    assert clustering(big, c) == 4


def test_rebound_formula():
    g = Multigraph.from_edges(5, [(0, 1), (1, 2), (2, 3)])
    small = g.without_edges([0, 1, 2])
    assert rebound_after_extra_edges(g, small, Coloring({v: 1 for v in range(5)}, 1), 5) == 20


def test_rebound_rejects_mismatched_vertices():
    with pytest.raises(ColoringError):
        rebound_after_extra_edges(P3, P3.subgraph([0, 1]), col([1, 1, 1], 1), 3)


def test_relabel_into_order_preserving():
    assert relabel_into({0: 1, 1: 2, 2: 1}, [1, 3]) == {0: 1, 1: 3, 2: 1}
    with pytest.raises(ColoringError):
        relabel_into({0: 3}, [1, 2])


@given(colored_graphs())
def test_clustering_matches_naive(gc):
    g, c = gc
    assert clustering(g, c) == naive_clustering(g, c.colors)


def _has_perfect_complement(k, bad):
    return any(all((i + 1, p[i]) not in bad for i in range(k)) for p in itertools.permutations(range(1, k + 1)))


@settings(max_examples=200)
@given(st.integers(1, 8).flatmap(
    lambda k: st.tuples(st.just(k), st.sets(st.tuples(st.integers(1, k), st.integers(1, k)), max_size=k - 1))))
def test_hall_solvable_below_k(case):
    k, bad = case
    m = complement_perfect_matching(k, bad)
    assert m is not None
    assert sorted(m.values()) == list(range(1, k + 1))
    assert all((i, j) not in bad for i, j in m.items())


@settings(max_examples=100)
@given(st.integers(1, 5).flatmap(
    lambda k: st.tuples(st.just(k), st.sets(st.tuples(st.integers(1, k), st.integers(1, k))))))
def test_matching_agrees_with_permutation_search(case):
    k, bad = case
    assert (complement_perfect_matching(k, bad) is not None) == _has_perfect_complement(k, bad)


@settings(max_examples=150, deadline=None)
@given(st.integers(0, 2 ** 32 - 1))
def test_merge_no_growth(seed):
    rng = random.Random(seed)
    k = rng.randint(2, 6)
    na, nb = rng.randint(1, 5), rng.randint(1, 5)
    pairs = [(rng.randrange(na), rng.randrange(na)) for _ in range(rng.randint(0, 6))]
    pairs += [(na + rng.randrange(nb), na + rng.randrange(nb)) for _ in range(rng.randint(0, 6))]
    pairs += [(rng.randrange(na), na + rng.randrange(nb)) for _ in range(rng.randint(0, k - 1))]
    g = Multigraph.from_edges(na + nb, pairs)
    cut = edge_cut(g, range(na))
    c_a = Coloring({v: rng.randint(1, k) for v in range(na)}, k)
    c_b = Coloring({v: rng.randint(1, k) for v in range(na, na + nb)}, k)
    n = max(clustering(g.subgraph(cut.side_a), c_a), clustering(g.subgraph(cut.side_b), c_b))
    out = merge_across_cut(g, cut, c_a, c_b, k, n)
    assert clustering(g, out) == n
    for comp in monochromatic_components(g, out):
        assert set(comp) <= cut.side_a or set(comp) <= cut.side_b


@settings(max_examples=150, deadline=None)
@given(st.integers(0, 2 ** 32 - 1))
def test_rebound_holds(seed):
    rng = random.Random(seed)
    n = rng.randint(1, 8)
    g = Multigraph.from_edges(n, [(rng.randrange(n), rng.randrange(n)) for _ in range(rng.randint(0, 12))])
    z = rng.sample(sorted(g.edge_ids), rng.randint(0, g.num_edges))
    small = g.without_edges(z)
    c = Coloring({v: rng.randint(1, 2) for v in g.vertices}, 2)
    base = clustering(small, c)
    bound = rebound_after_extra_edges(g, small, c, max(base, 1))
    assert bound == (len(z) + 1) * max(base, 1)
    assert clustering(g, c) <= bound
