from math import comb

import numpy as np
import pytest
from hypothesis import given, settings

from _support import CYCLE3, K3, K4, SPANNING_TREE, digraphs
from robustmilp.graph import (
    GraphError,
    VertexSubset,
    adjacency,
    count_T,
    enumerate_T,
    enumerate_T_prime,
    from_adjacency,
    from_edge_list,
    indicator,
    inverse_indicator,
    laplacian,
    min_in_degree,
    outside_in_degree,
    r_reachable_set,
    reachability,
    reachability_laplacian,
)


def all_subsets(n):
    return [VertexSubset(m, n) for m in range(1 << n)]


# -- construction -----------------------------------------------------------


def test_edge_list_three_cycle_in_neighbors():
    D = from_edge_list(3, [(1, 2), (2, 3), (3, 1)])
    assert D.in_neighbors(1) == {3}
    assert D.in_neighbors(2) == {1}
    assert D.in_neighbors(3) == {2}


def test_self_loop_rejected():
    with pytest.raises(GraphError, match="self-loop"):
        from_edge_list(2, [(1, 1)])


def test_duplicate_edges_collapse():
    D = from_edge_list(4, [(1, 2), (1, 2)])
    assert D.in_neighbors(2) == {1}
    assert D.num_edges == 1


@pytest.mark.parametrize("edges", [[(0, 1)], [(1, 5)], [(4, 1)]])
def test_out_of_range_endpoint_rejected(edges):
    with pytest.raises(GraphError, match="outside"):
        from_edge_list(3, edges)


def test_zero_vertices_rejected():
    with pytest.raises(GraphError):
        from_edge_list(0, [])


def test_digraph_constructor_validates_masks():
    with pytest.raises(GraphError):
        type(K3)(2, (0b01, 0))  # vertex 1 listing itself
    with pytest.raises(GraphError):
        type(K3)(2, (0b100, 0))


def test_adjacency_orientation_is_source_row():
    a = adjacency(CYCLE3)
    assert a[0, 1] == 1 and a[1, 0] == 0
    assert from_adjacency(a) == CYCLE3


def test_adjacency_rejects_diagonal_and_nonbinary():
    with pytest.raises(GraphError):
        from_adjacency([[1, 0], [0, 0]])
    with pytest.raises(GraphError):
        from_adjacency([[0, 2], [0, 0]])
    with pytest.raises(GraphError):
        from_adjacency([[0, 1, 0], [0, 0, 1]])


# -- Laplacian ---------------------------------------------------------------


def test_laplacian_three_cycle():
    assert laplacian(CYCLE3).tolist() == [[1, 0, -1], [-1, 1, 0], [0, -1, 1]]


def test_laplacian_complete_three():
    L = laplacian(K3)
    assert np.diag(L).tolist() == [2, 2, 2]
    assert (L[~np.eye(3, dtype=bool)] == -1).all()


def test_laplacian_is_read_only():
    with pytest.raises(ValueError):
        laplacian(K3)[0, 0] = 5


@given(digraphs(min_n=1, max_n=8))
def test_laplacian_rows_sum_to_zero(D):
    L = laplacian(D)
    assert (L @ np.ones(D.n, dtype=np.int64) == 0).all()
    assert set(np.unique(L[~np.eye(D.n, dtype=bool)])) <= {-1, 0}
    assert 0 <= np.diag(L).min() and np.diag(L).max() <= D.n - 1


# -- reachability ---------------------------------------------------------------


def test_reachability_empty_and_full_sets():
    assert reachability(K4, VertexSubset(0, 4)) == 0
    assert reachability(K4, VertexSubset(0b1111, 4)) == 0


def test_reachability_cycle_singleton():
    assert reachability(CYCLE3, CYCLE3.subset([1])) == 1


@settings(max_examples=60)
@given(digraphs(min_n=2, max_n=6))
def test_reachability_direct_equals_laplacian_product(D):
    L = laplacian(D)
    for S in all_subsets(D.n):
        direct = reachability(D, S)
        assert direct == reachability_laplacian(L, S)
        if S.mask:
            assert 0 <= direct <= D.n - 1


@settings(max_examples=60)
@given(digraphs(min_n=2, max_n=6))
def test_laplacian_product_sign_pattern(D):
    L = laplacian(D)
    for S in all_subsets(D.n):
        prod = L @ indicator(S)
        for j in range(1, D.n + 1):
            if j in S:
                assert prod[j - 1] == outside_in_degree(D, S, j) >= 0
            else:
                inside = len(D.in_neighbors(j) & set(S.members))
                assert prod[j - 1] == -inside <= 0


@settings(max_examples=40)
@given(digraphs(min_n=2, max_n=6))
def test_bipartition_infinity_norm_identity(D):
    L = laplacian(D)
    for S1, S2 in enumerate_T_prime(D.n):
        worst = max(reachability(D, S1), reachability(D, S2))
        assert np.abs(L @ indicator(S1)).max() == worst
        assert np.abs(L @ indicator(S2)).max() == worst


def test_r_reachable_set_examples():
    S = K3.subset([2, 3])
    assert r_reachable_set(K3, S, 0) == S
    assert r_reachable_set(K3, S, 2).members == ()
    assert r_reachable_set(K3, K3.subset([1]), 2).members == (1,)


@given(digraphs(min_n=1, max_n=6))
def test_r_reachable_set_zero_is_whole_set(D):
    for S in all_subsets(D.n):
        assert r_reachable_set(D, S, 0) == S


def test_r_reachable_set_rejects_negative_r():
    with pytest.raises(ValueError):
        r_reachable_set(K3, K3.subset([1]), -1)


def test_subset_from_another_graph_rejected():
    with pytest.raises(GraphError):
        reachability(K3, VertexSubset(1, 4))


# -- indicator bijection ----------------------------------------------------------


def test_indicator_examples():
    assert indicator(VertexSubset.from_members(3, [1, 3])).tolist() == [1, 0, 1]
    assert inverse_indicator([0, 0, 0]) == VertexSubset(0, 3)


def test_indicator_round_trip_all_subsets_n4():
    for S in all_subsets(4):
        b = indicator(S)
        assert inverse_indicator(b) == S
        assert b.sum() == len(S)


def test_inverse_indicator_rejects_nonbinary():
    with pytest.raises(GraphError):
        inverse_indicator([0, 2, 1])


def test_vertex_subset_validation():
    with pytest.raises(GraphError):
        VertexSubset.from_members(3, [4])
    with pytest.raises(GraphError):
        VertexSubset(0b1000, 3)
    S = VertexSubset.from_members(5, [2, 4])
    assert 2 in S and 3 not in S and 9 not in S
    assert list(S) == [2, 4]
    assert S.complement().members == (1, 3, 5)


# -- enumeration -------------------------------------------------------------------


def test_count_T_three_is_twelve():
    assert count_T(3) == 12


def test_count_T_two_is_two():
    assert count_T(2) == 2
    pairs = [(a.members, b.members) for a, b in enumerate_T(2)]
    assert pairs == [((1,), (2,)), ((2,), (1,))]


@pytest.mark.parametrize("n", range(2, 8))
def test_count_T_matches_stream(n):
    pairs = [(a.mask, b.mask) for a, b in enumerate_T(n)]
    assert len(pairs) == count_T(n) == 3**n - 2 ** (n + 1) + 1
    assert len(set(pairs)) == len(pairs)
    assert all(a and b and not a & b for a, b in pairs)


def test_enumerate_T_is_ordered_by_first_mask():
    masks = [(a.mask, b.mask) for a, b in enumerate_T(4)]
    assert masks == sorted(masks)


def test_count_T_large_n_is_exact():
    n = 80
    assert count_T(n) == sum(comb(n, p) * (2**p - 2) for p in range(2, n + 1))
    assert count_T(n) > 2**64


@pytest.mark.parametrize("n, expected", [(2, 2), (3, 6), (5, 30)])
def test_enumerate_T_prime_counts_and_partitions(n, expected):
    parts = list(enumerate_T_prime(n))
    assert len(parts) == expected == 2**n - 2
    for S1, S2 in parts:
        assert (indicator(S1) + indicator(S2) == 1).all()


@pytest.mark.parametrize("fn", [count_T, lambda n: list(enumerate_T(n)), lambda n: list(enumerate_T_prime(n))])
def test_enumeration_needs_two_vertices(fn):
    with pytest.raises(ValueError):
        fn(1)


# -- degrees ---------------------------------------------------------------------------


def test_min_in_degree_examples():
    assert min_in_degree(CYCLE3) == 1
    assert min_in_degree(K4) == 3
    assert min_in_degree(SPANNING_TREE) == 0


def test_edges_sorted_and_round_trip():
    edges = [(3, 1), (1, 2), (2, 3), (1, 3)]
    D = from_edge_list(3, edges)
    assert D.edges() == sorted(edges)
    assert from_edge_list(3, D.edges()) == D
