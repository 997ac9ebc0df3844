"""Rebuilding either tree of a Robinson space from the other.

The two shapes carry the same information in different coordinates: a
P-node groups points exactly like a plain copartition node, a
non-conical Q-node like a union node, and a conical Q-node like a
special copartition node.  Going from PQ to mmodule shape only drops
child orders; coming back they are recovered from the dissimilarity
itself — union nodes are laid out along a compatible order of their
quotient, and the small children of a special node are reinserted into
the large child's Q-spine at the slot located by ``find_bipartition``.
Both directions visit each node once.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from . import core
from . import mmodtree as mm
from . import pqtree as pq
from .copoints import CorrespondenceViolation, pq_tree2
from .core import DissimilarityMatrix, NotRobinson


class NoBipartition(NotRobinson):
    """A special node's small children fit nowhere in the large spine."""


def pq_to_mmodule_tree(
    matrix: DissimilarityMatrix, tree: pq.PQTree
) -> mm.MModuleTree:
    """Mmodule tree of the space whose PQ-tree is given.

    P-nodes become plain copartition nodes and non-conical Q-nodes
    become union nodes, children recursing in place.  A conical Q-node
    becomes a special copartition node: its non-apex children fuse into
    the large child, and the apex either stays one child (when its own
    top weight sits below the apex distance, or it has none) or
    dissolves into its children (when the apex points fall apart at the
    apex distance).
    """
    core.ensure_recursion_headroom(len(pq.leaf_points(tree)))
    return _to_mmodule(matrix, tree)


def _to_mmodule(matrix: DissimilarityMatrix, tree: pq.PQTree) -> mm.MModuleTree:
    if isinstance(tree, pq.Leaf):
        return mm.Leaf(tree.point)
    if isinstance(tree, pq.P):
        return mm.Cap(tuple(_to_mmodule(matrix, b) for b in tree.children))
    hit = pq.conical_apex(matrix, tree.children)
    if hit is None:
        return mm.Cup(tuple(_to_mmodule(matrix, b) for b in tree.children))
    delta, apex = hit
    rest = tuple(
        _to_mmodule(matrix, b) for i, b in enumerate(tree.children) if i != apex
    )
    # an arity-2 fusion is a copartition, same convention as mmodule_tree
    base = mm.Cap(rest) if len(rest) == 2 else mm.Cup(rest)
    apex_child = tree.children[apex]
    inner, _ = pq.tree_delta_star(matrix, apex_child)
    if inner is None or inner < delta:
        kids = (base, _to_mmodule(matrix, apex_child))
    else:
        kids = (base, *(_to_mmodule(matrix, g) for g in apex_child.children))
    return mm.Cap(kids, special=delta, large_child=0)


def mmodule_to_pq_tree(
    matrix: DissimilarityMatrix, tree: mm.MModuleTree
) -> pq.PQTree:
    """PQ-tree of the space whose mmodule tree is given.

    Union children, mutually in flat position, are sequenced by running
    the recognizer on one representative apiece; a wrong claim of
    flatness surfaces there as ``NotRobinson``.  A special copartition
    node rebuilds the conical Q-node it came from: the large child's
    spine is cut once and the remaining children, wrapped in a P-node
    when there are several, take the gap.
    """
    core.ensure_recursion_headroom(len(mm.leaf_points(tree)))
    return _to_pq(matrix, tree)


def _to_pq(matrix: DissimilarityMatrix, tree: mm.MModuleTree) -> pq.PQTree:
    if isinstance(tree, mm.Leaf):
        return pq.Leaf(tree.point)
    if isinstance(tree, mm.Cup):
        ordered = _union_order(matrix, tree.children)
        return pq.Q(tuple(_to_pq(matrix, b) for b in ordered))
    if tree.special is None:
        return pq.P(tuple(_to_pq(matrix, b) for b in tree.children))
    spine = _to_pq(matrix, tree.children[tree.large_child])
    gammas = _spine_children(spine)
    j = find_bipartition(matrix, tree.special, gammas)
    small = [b for i, b in enumerate(tree.children) if i != tree.large_child]
    if len(small) == 1:
        filler = _to_pq(matrix, small[0])
    else:
        filler = pq.P(tuple(_to_pq(matrix, b) for b in small))
    return pq.Q((*gammas[:j], filler, *gammas[j:]))


def _union_order(
    matrix: DissimilarityMatrix, children: tuple[mm.MModuleTree, ...]
) -> list[mm.MModuleTree]:
    reps = [mm.leaf_points(b)[0] for b in children]
    rank = {x: i for i, x in enumerate(pq.canonical_order(pq_tree2(matrix, reps)))}
    return [b for _, b in sorted(zip(reps, children), key=lambda rb: rank[rb[0]])]


def _spine_children(spine: pq.PQTree) -> tuple[pq.PQTree, ...]:
    if isinstance(spine, pq.Q):
        return spine.children
    # a two-point large child has a P root; either reading of it works
    if isinstance(spine, pq.P) and len(spine.children) == 2:
        return spine.children
    raise NotRobinson("large child of a special node has no linear spine")


def find_bipartition(
    matrix: DissimilarityMatrix, delta: int, children: Sequence[pq.PQTree]
) -> int:
    """How many spine children stay left of the reattachment slot.

    ``children`` is the child sequence of a Q-spine whose diameter
    exceeds ``delta`` while everything outside sits at exactly
    ``delta`` from it.  The slot is pinned in one sweep: the last child
    still strictly farther than ``delta`` from the final one bounds the
    search, and the first gap of at least ``delta`` after it is the
    cut.  Distances are taken between facing ends of adjacent children,
    so both returned sides satisfy the cross-distance bound.
    """
    rows = matrix.rows
    ell = len(children)
    if ell < 2:
        raise NoBipartition("a spine has at least two children")
    pts = [pq.leaf_points(c) for c in children]
    head_last = pts[-1][0]
    far = -1
    for i in range(ell - 1):
        if rows[pts[i][-1]][head_last] > delta:
            far = i
    if far < 0:
        raise NoBipartition("no spine child clears the reattachment weight")
    for i in range(far, ell - 1):
        if rows[pts[i][-1]][pts[i + 1][0]] >= delta:
            return i + 1
    raise NoBipartition("no wide enough gap after the far block")


@dataclass(frozen=True)
class CorrespondenceReport:
    """Outcome of matching the two trees node by node.

    Leaf sets appear as sorted tuples.  ``matched`` holds the internal
    groupings present in both trees; the two unmatched fields hold what
    each side keeps to itself — necessarily large children of special
    nodes and split apex children, in that order.
    """

    matched: tuple[tuple[int, ...], ...]
    unmatched_mmodule: tuple[tuple[int, ...], ...]
    unmatched_pq: tuple[tuple[int, ...], ...]


def node_correspondence(
    matrix: DissimilarityMatrix, pqt: pq.PQTree, mt: mm.MModuleTree
) -> CorrespondenceReport:
    """Check the node-to-node bijection between the two trees.

    Every grouping named by both trees must agree on its kind (plain
    copartition with P, union with non-conical Q, special copartition
    with conical Q).  A grouping private to the mmodule tree must be
    the large child of a special node, and one private to the PQ-tree
    must be a split apex child; anything else raises
    ``CorrespondenceViolation``.
    """
    if pq.leaf_set(pqt) != mm.leaf_set(mt):
        raise CorrespondenceViolation("trees cover different point sets")

    pq_kind: dict[tuple[int, ...], str] = {}
    split_sets: set[tuple[int, ...]] = set()
    for node, facts in pq.classify(matrix, pqt).items():
        key = tuple(sorted(pq.leaf_points(node)))
        if isinstance(node, pq.P):
            pq_kind[key] = "plain copartition / P"
        elif facts.delta is None:
            pq_kind[key] = "union / non-conical Q"
        else:
            pq_kind[key] = "special copartition / conical Q"
            if facts.split:
                split_sets.add(tuple(sorted(pq.leaf_points(node.children[facts.apex]))))

    mm_kind: dict[tuple[int, ...], str] = {}
    large_sets: set[tuple[int, ...]] = set()
    for node in mm.iter_nodes(mt):
        if isinstance(node, mm.Leaf):
            continue
        key = tuple(sorted(mm.leaf_points(node)))
        if isinstance(node, mm.Cup):
            mm_kind[key] = "union / non-conical Q"
        elif node.special is None:
            mm_kind[key] = "plain copartition / P"
        else:
            mm_kind[key] = "special copartition / conical Q"
            large_sets.add(tuple(sorted(mm.leaf_points(node.children[node.large_child]))))

    matched = sorted(set(pq_kind) & set(mm_kind))
    for key in matched:
        if pq_kind[key] != mm_kind[key]:
            raise CorrespondenceViolation(
                f"grouping {key} is a {mm_kind[key]} node on one side"
                f" and a {pq_kind[key]} node on the other"
            )
    spare_mm = set(mm_kind) - set(pq_kind)
    # large children sit around an interior apex, so they are never blocks
    if spare_mm != {s for s in large_sets if len(s) > 1}:
        off = spare_mm.symmetric_difference(large_sets)
        raise CorrespondenceViolation(
            f"mmodule-side mismatch is not explained by large children: {sorted(off)}"
        )
    spare_pq = set(pq_kind) - set(mm_kind)
    if spare_pq != split_sets:
        off = spare_pq.symmetric_difference(split_sets)
        raise CorrespondenceViolation(
            f"pq-side mismatch is not explained by split apex children: {sorted(off)}"
        )
    return CorrespondenceReport(
        tuple(matched), tuple(sorted(spare_mm)), tuple(sorted(spare_pq))
    )
