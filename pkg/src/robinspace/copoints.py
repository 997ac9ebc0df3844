"""Recognition by copoints: split a space at one point's copoints and
reassemble the PQ-tree around that point.

The copoints attached at p (maximal mmodules avoiding p) arrive from
the stable-partition engine already sorted by proximity to p.  Walking
them from far to near, ``next_frontier`` decides which copoints are
forced left or right of p in every compatible order, and where the
last *frontier* sits — the deepest initial segment [{p}, C1, ..., Ci]
that is again an mmodule, hence a node of the PQ-tree.  The remaining
single-copoint case inserts p's subtree into the PQ-tree of that
copoint, guided by the cone structure of its root.

``recognize_robinson`` wraps the construction in a verdict: construct,
then verify the canonical order, so a bogus tree can never slip
through on non-Robinson input.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

from . import core
from . import mmodtree
from . import pqtree as pq
from . import refine
from .core import DissimilarityMatrix, NotRobinson, RobinsonError
from .pqtree import Order, PQTree


class SideConflict(NotRobinson):
    """A copoint was pinned to both sides of p at once."""


class NoAdmissibleHole(NotRobinson):
    """No insertion slot for a new apex preserves the Robinson property."""


class CorrespondenceViolation(RobinsonError):
    pass


IndexSet = tuple[int, ...]


@dataclass(frozen=True)
class CopointPartition:
    """Copoints attached at p, classes[0] == (p,), rest in proximity order."""

    p: int
    classes: tuple[IndexSet, ...]


def copoints_at(
    matrix: DissimilarityMatrix, p: int, subset: Iterable[int]
) -> CopointPartition:
    return CopointPartition(p, tuple(refine.copoint_partition(matrix, p, subset)))


def frontiers(matrix: DissimilarityMatrix, cp: CopointPartition) -> list[bool]:
    """Flag the copoints whose initial segment [{p}, .., Ci] is an mmodule.

    Quadratic marking: each copoint only needs its nearest predecessor
    that sees it at the same distance as p does; everything strictly
    between is witnessed apart.
    """
    rows = matrix.rows
    reps = [c[0] for c in cp.classes]
    k = len(cp.classes) - 1
    marked = [False] * (k + 1)
    for jp in range(1, k + 1):
        r = reps[jp]
        want = rows[cp.p][r]
        j = max(h for h in range(jp) if rows[reps[h]][r] == want)
        for h in range(j + 1, jp):
            marked[h] = True
    return [not marked[h] for h in range(1, k + 1)]


def next_frontier(
    matrix: DissimilarityMatrix, p: int, copoints: Sequence[Sequence[int]]
) -> tuple[list[Sequence[int]], int, list[Sequence[int]]]:
    """Partition the far copoints onto the two sides of p.

    Returns (L, i, R): copoints C_{i+1}..C_k distributed left (far to
    near) and right (near to far) of p, with C_i the nearest frontier
    (i = 0 when the first copoint already fails).  Sides are forced by
    comparing d(C_j, C_l) against d(p, C_l): closer pairs share a side,
    farther pairs take opposite sides, equality leaves j undecided for
    now.  L and R are persistent cons cells so prepends and bulk
    re-sidings cost what they look like.
    """
    k = len(copoints)
    rows = matrix.rows
    reps = [c[0] for c in copoints]
    dp = [rows[p][r] for r in reps]

    side: list[str | None] = [None] * (k + 1)

    def assign(idx: int, s: str) -> None:
        if side[idx] is not None:
            raise SideConflict(f"copoint {idx} pinned to both sides of {p}")
        side[idx] = s

    def block(lo: int, hi: int, cell, s: str):
        # prepend C_lo..C_hi (1-based, inclusive-exclusive on hi) keeping order
        for x in range(hi - 1, lo - 1, -1):
            assign(x, s)
            cell = (x, cell)
        return cell

    left = None
    right = (k, None)
    side[k] = "R"
    i = k
    l = k
    while l >= i:
        rl = reps[l - 1]
        w = dp[l - 1]
        sl = side[l]
        for j in range(i - 1, 0, -1):
            v = rows[reps[j - 1]][rl]
            if v == w:
                continue
            same = v < w
            if (same and sl == "L") or (not same and sl == "R"):
                assign(j, "L")
                left = (j, left)
                right = block(j + 1, i, right, "R")
                i = j
            else:
                assign(j, "R")
                right = (j, right)
                left = block(j + 1, i, left, "L")
                i = j
        l -= 1

    def to_list(cell) -> list[int]:
        out = []
        while cell is not None:
            out.append(cell[0])
            cell = cell[1]
        return out

    lefts = to_list(left)
    lefts.reverse()
    return (
        [copoints[t - 1] for t in lefts],
        i - 1,
        [copoints[t - 1] for t in to_list(right)],
    )


def admissible_hole(
    matrix: DissimilarityMatrix, delta: int, children: Sequence[PQTree]
) -> int:
    """Insertion slot for a new apex at uniform distance delta.

    Returns j such that inserting between children[j-1] and children[j]
    keeps the row monotone: everything from j rightward stays within
    delta of the far end, and the gap jumped spans at least delta.
    """
    try:
        return pq.gap_position(matrix.rows, list(children), delta)
    except NotRobinson as exc:
        raise NoAdmissibleHole(str(exc)) from None


def pq_tree2(matrix: DissimilarityMatrix, subset: Iterable[int]) -> PQTree:
    """PQ-tree of the subset, built from the copoints at its smallest point."""
    pts = sorted(subset)
    if not pts:
        raise core.SubsetTooSmall("need at least one point")
    core.ensure_recursion_headroom(len(pts))
    return pq.normalize(matrix, _pq_tree2(matrix, pts))


def _pq_tree2(matrix: DissimilarityMatrix, pts: list[int]) -> PQTree:
    if len(pts) == 1:
        return pq.Leaf(pts[0])
    p = pts[0]
    classes = refine.copoint_partition(matrix, p, pts)
    return copoints_to_pq_tree(matrix, p, [list(c) for c in classes[1:]])


def copoints_to_pq_tree(
    matrix: DissimilarityMatrix, p: int, copoints: Sequence[Sequence[int]]
) -> PQTree:
    """Assemble the PQ-tree of {p} ∪ copoints (raw, not normalized)."""
    k = len(copoints)
    if k == 0:
        return pq.Leaf(p)
    left, i, right = next_frontier(matrix, p, copoints)
    t_p = copoints_to_pq_tree(matrix, p, copoints[:i]) if i > 0 else pq.Leaf(p)
    if i < k - 1:
        kids = (
            [_pq_tree2(matrix, sorted(c)) for c in left]
            + [t_p]
            + [_pq_tree2(matrix, sorted(c)) for c in right]
        )
        return pq.Q(tuple(kids))

    # Only C_k lies beyond the last frontier: hang p's tree off the
    # PQ-tree of C_k according to how far C_k spreads past delta.
    ck = sorted(copoints[-1])
    alpha = pq.normalize(matrix, _pq_tree2(matrix, ck))
    delta = matrix.rows[p][ck[0]]
    dia = 0 if len(ck) == 1 else core.diameter_and_pair(matrix, ck)[0]

    if isinstance(alpha, pq.Leaf):
        return pq.P((alpha, t_p))
    if isinstance(alpha, pq.P):
        if dia == delta:
            return pq.P((*alpha.children, t_p))
        if dia < delta:
            return pq.P((alpha, t_p))
        if len(alpha.children) == 2:
            b1, b2 = alpha.children
            return pq.Q((b1, t_p, b2))
        raise NotRobinson("wide P-node cannot absorb an attachment point")
    if dia <= delta:
        return pq.P((alpha, t_p))

    hit = pq.conical_apex(matrix, alpha.children)
    if hit is not None and hit[0] == delta:
        _, apex = hit
        apex_child = alpha.children[apex]
        apex_pts = pq.leaf_points(apex_child)
        split = len(core.delta_graph_components(matrix, apex_pts, delta)) > 1
        kids = list(alpha.children)
        if split:
            if not isinstance(apex_child, pq.P):
                raise NotRobinson("split apex is not a P-node")
            kids[apex] = pq.P((*apex_child.children, t_p))
        else:
            kids[apex] = pq.P((apex_child, t_p))
        return pq.Q(tuple(kids))

    j = admissible_hole(matrix, delta, alpha.children)
    kids = list(alpha.children)
    kids.insert(j, t_p)
    return pq.Q(tuple(kids))


@dataclass(frozen=True)
class RecognitionResult:
    accepted: bool
    tree: PQTree | None = None
    witness: Order | None = None
    reason: str | None = None
    violation: tuple[int, int, int] | None = None


def recognize_robinson(matrix: DissimilarityMatrix) -> RecognitionResult:
    """Construct-then-verify wrapper; refusal is a value, never a lie.

    A returned witness always passes the order check.  On Robinson
    input construction cannot fail, so a refusal is trustworthy too.
    """
    core.validate(matrix)
    try:
        tree = pq_tree2(matrix, range(matrix.n))
    except NotRobinson as exc:
        return RecognitionResult(False, reason=f"structural: {exc}")
    order = pq.canonical_order(tree)
    if core.is_compatible_order(matrix, order):
        return RecognitionResult(True, tree=tree, witness=order)
    return RecognitionResult(
        False,
        reason="constructed order fails verification",
        violation=_violating_triple(matrix, order),
    )


def _violating_triple(
    matrix: DissimilarityMatrix, order: Sequence[int]
) -> tuple[int, int, int] | None:
    rows = matrix.rows
    n = len(order)
    for a in range(n):
        for b in range(a + 1, n):
            for c in range(b + 1, n):
                x, y, z = order[a], order[b], order[c]
                if rows[x][z] < max(rows[x][y], rows[y][z]):
                    return (x, y, z)
    return None


def copoints_from_mmodule_tree(
    tree: mmodtree.MModuleTree, p: int
) -> list[IndexSet]:
    """Read the copoints at p off the mmodule tree.

    Walking from the root toward p: a Cup node contributes each
    off-path child as one copoint; a Cap node contributes all its
    off-path children fused into a single copoint.
    """
    out: list[IndexSet] = []
    node = tree
    while not isinstance(node, mmodtree.Leaf):
        down = None
        for child in node.children:
            if p in mmodtree.leaf_set(child):
                down = child
                break
        if down is None:
            raise ValueError(f"point {p} is not a leaf of the tree")
        rest = [c for c in node.children if c is not down]
        if isinstance(node, mmodtree.Cup):
            out.extend(tuple(sorted(mmodtree.leaf_points(c))) for c in rest)
        else:
            fused = sorted(x for c in rest for x in mmodtree.leaf_points(c))
            out.append(tuple(fused))
        node = down
    return out


@dataclass(frozen=True)
class UpsilonReport:
    p: int
    matched: tuple[tuple[int, ...], ...]


def upsilon_frontier_check(
    matrix: DissimilarityMatrix, tree: PQTree, p: int
) -> UpsilonReport:
    """Cross-check the path above p against the frontier copoints.

    The standard (non-split) internal nodes containing p must carry
    exactly the initial copoint segments that are both flagged as
    frontiers and realized as node sets of the tree.
    """
    path = []
    node = tree
    while True:
        path.append(node)
        if isinstance(node, pq.Leaf):
            if node.point != p:
                raise ValueError(f"point {p} is not a leaf of the tree")
            break
        node = next(c for c in node.children if p in pq.leaf_set(c))

    split_children = set()
    for n_, info in pq.classify(matrix, tree).items():
        if info.apex is not None and info.split:
            split_children.add(n_.children[info.apex])
    standard = {
        pq.leaf_set(n_)
        for n_ in path
        if not isinstance(n_, pq.Leaf) and n_ not in split_children
    }

    cp = copoints_at(matrix, p, pq.leaf_points(tree))
    flags = frontiers(matrix, cp)
    node_sets = {pq.leaf_set(n_) for n_ in pq.iter_nodes(tree)}
    run = set(cp.classes[0])
    fronts = set()
    for idx, c in enumerate(cp.classes[1:]):
        run |= set(c)
        if flags[idx] and frozenset(run) in node_sets:
            fronts.add(frozenset(run))

    if standard != fronts:
        raise CorrespondenceViolation(
            f"at {p}: standard path sets {sorted(map(sorted, standard))} "
            f"vs frontier segments {sorted(map(sorted, fronts))}"
        )
    return UpsilonReport(
        p, tuple(sorted((tuple(sorted(s)) for s in standard), key=lambda t: (len(t), t)))
    )
