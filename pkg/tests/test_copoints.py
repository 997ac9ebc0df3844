from __future__ import annotations

import pytest
from hypothesis import given, settings

from conftest import (
    EQUAL3,
    FLAT3,
    NONROB4,
    WORKED12,
    robinson_matrices,
    symmetric_matrices,
)
from robinspace import copoints as cop, core, mmodtree as mm, oracle, pqtree as pq, refine
from robinspace.core import DissimilarityMatrix
from robinspace.pqtree import Leaf, P, Q

FIG12 = Q(
    (
        Q((Leaf(0), P((Leaf(1), Leaf(2))), Leaf(3))),
        P((Leaf(4), Leaf(5), Leaf(6))),
        Q((Leaf(7), Leaf(8), P((Leaf(9), Leaf(10))), Leaf(11))),
    )
)


def test_copoints_at_frozen():
    cp = cop.copoints_at(WORKED12, 0, range(12))
    assert cp.p == 0
    assert cp.classes == ((0,), (1, 2), (3,), (4, 5, 6), (7, 8, 9, 10, 11))


def test_frontiers_frozen():
    cp = cop.copoints_at(WORKED12, 0, range(12))
    assert cop.frontiers(WORKED12, cp) == [False, True, False, True]


def test_next_frontier_traces():
    cp0 = cop.copoints_at(WORKED12, 0, range(12))
    left, i, right = cop.next_frontier(WORKED12, 0, [list(c) for c in cp0.classes[1:]])
    assert (left, i) == ([], 2)
    assert right == [[4, 5, 6], [7, 8, 9, 10, 11]]

    cp7 = cop.copoints_at(WORKED12, 7, range(7, 12))
    left, i, right = cop.next_frontier(WORKED12, 7, [list(c) for c in cp7.classes[1:]])
    assert (left, i) == ([], 0)
    assert right == [[8], [9, 10], [11]]


def test_admissible_hole_for_split_apex():
    # the two pieces of the split pair {9,10} slot between 8 and 11
    assert cop.admissible_hole(WORKED12, 2, (Leaf(7), Leaf(8), Leaf(11))) == 2


def test_pq_tree2_block_shapes():
    t = cop.pq_tree2(WORKED12, [0, 1, 2, 3])
    assert pq.equivalent(t, Q((Leaf(0), P((Leaf(1), Leaf(2))), Leaf(3))))
    t = cop.pq_tree2(WORKED12, range(7, 12))
    assert pq.equivalent(
        t, Q((Leaf(7), Leaf(8), P((Leaf(9), Leaf(10))), Leaf(11)))
    )


def test_pq_tree2_worked_example():
    assert pq.equivalent(cop.pq_tree2(WORKED12, range(12)), FIG12)


def test_pq_tree2_three_point_spaces():
    assert pq.equivalent(
        cop.pq_tree2(EQUAL3, range(3)), P((Leaf(0), Leaf(1), Leaf(2)))
    )
    flat = cop.pq_tree2(FLAT3, range(3))
    assert pq.equivalent(flat, Q((Leaf(0), Leaf(1), Leaf(2))))
    assert pq.count_orders(flat) == 2


def test_pq_tree2_tiny_subsets():
    one = DissimilarityMatrix([[0]])
    assert cop.pq_tree2(one, [0]) == Leaf(0)
    pair = cop.pq_tree2(WORKED12, [4, 9])
    assert pq.equivalent(pair, Q((Leaf(4), Leaf(9))))


def test_recognize_worked_example():
    got = cop.recognize_robinson(WORKED12)
    assert got.accepted
    assert got.witness == (0, 2, 1, 3, 6, 5, 4, 7, 8, 10, 9, 11)
    assert core.is_compatible_order(WORKED12, got.witness)
    assert pq.equivalent(got.tree, FIG12)


def test_recognize_rejects_with_witness_triple():
    got = cop.recognize_robinson(NONROB4)
    assert not got.accepted
    assert got.tree is None and got.witness is None
    assert got.reason
    x, y, z = got.violation
    # the triple really violates every possible placement
    d = NONROB4.rows
    assert d[x][z] < max(d[x][y], d[y][z])


def test_recognize_singleton():
    got = cop.recognize_robinson(DissimilarityMatrix([[0]]))
    assert got.accepted and got.witness == (0,)


def test_copoints_from_mmodule_tree_frozen():
    tree = mm.mmodule_tree(WORKED12, range(12))
    assert set(cop.copoints_from_mmodule_tree(tree, 0)) == {
        (1, 2),
        (3,),
        (4, 5, 6),
        (7, 8, 9, 10, 11),
    }
    assert set(cop.copoints_from_mmodule_tree(tree, 4)) == {
        (5, 6),
        (0, 1, 2, 3),
        (7, 8, 9, 10, 11),
    }


def test_copoints_from_mmodule_tree_all_points():
    tree = mm.mmodule_tree(WORKED12, range(12))
    for p in range(12):
        want = set(refine.copoint_partition(WORKED12, p, range(12))[1:])
        assert set(cop.copoints_from_mmodule_tree(tree, p)) == want


def test_upsilon_frontier_frozen():
    t12 = cop.pq_tree2(WORKED12, range(12))
    assert cop.upsilon_frontier_check(WORKED12, t12, 0).matched == (
        (0, 1, 2, 3),
        tuple(range(12)),
    )
    assert cop.upsilon_frontier_check(WORKED12, t12, 9).matched == (
        (7, 8, 9, 10, 11),
        tuple(range(12)),
    )


def test_upsilon_frontier_all_points():
    t12 = cop.pq_tree2(WORKED12, range(12))
    for p in range(12):
        rep = cop.upsilon_frontier_check(WORKED12, t12, p)
        assert rep.p == p


@settings(max_examples=150, deadline=None)
@given(robinson_matrices(max_n=8))
def test_tree_orders_equal_brute_orders(m):
    tree = cop.pq_tree2(m, range(m.n))
    got = sorted(pq.enumerate_orders(tree, cap=150_000))
    assert got == oracle.brute_compatible_orders(m, range(m.n))


@settings(max_examples=150, deadline=None)
@given(symmetric_matrices(max_n=7))
def test_verdict_matches_brute_search(m):
    got = cop.recognize_robinson(m)
    want = bool(oracle.brute_compatible_orders(m, range(m.n)))
    assert got.accepted == want
    if got.accepted:
        assert core.is_compatible_order(m, got.witness)


@settings(max_examples=80)
@given(robinson_matrices(max_n=7))
def test_every_pq_internal_is_a_block_interval(m):
    # each internal node's leaf set is an interval of the canonical order
    tree = cop.pq_tree2(m, range(m.n))
    order = pq.canonical_order(tree)
    where = {x: i for i, x in enumerate(order)}
    for node in pq.iter_nodes(tree):
        pts = sorted(where[x] for x in pq.leaf_points(node))
        assert pts == list(range(pts[0], pts[0] + len(pts)))
