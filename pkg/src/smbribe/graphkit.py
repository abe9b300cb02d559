"""Weighted-digraph helpers: min cuts, bipartite covers, anti-arborescences.

The solvers reduce manipulation questions to three classic graph problems:

* minimum s-t cut in a digraph with non-negative (possibly infinite) arc
  weights, including the canonical partition and the crossing arcs,
* minimum vertex cover in a bipartite graph,
* minimum-weight spanning anti-arborescence (every vertex except a root has
  exactly one out-arc and all paths lead to the root).

Vertices are plain integers ``0 .. vertex_count - 1`` and arcs are referred
to by their position in the arc tuple, so callers can keep a legend mapping
arc ids back to whatever the arcs encode.  All results are deterministic;
ties break toward the smallest arc id.

Max-flow and maximum bipartite matching are delegated to scipy's C
implementations; the cut partition, the Koenig cover extraction, and the
anti-arborescence contraction loop are implemented here.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import maximum_bipartite_matching, maximum_flow

from .core import ValidationError

#: Arc weight for arcs that must never be cut.
INFINITE = math.inf


@dataclass(frozen=True)
class CostDigraph:
    """A digraph with non-negative integer (or INFINITE) arc weights."""

    vertex_count: int
    arcs: tuple[tuple[int, int, float], ...]
    source: int | None = None
    sink: int | None = None


def _check_digraph(g: CostDigraph) -> None:
    if g.vertex_count < 0:
        raise ValidationError("vertex_count must be non-negative")
    for i, (u, v, w) in enumerate(g.arcs):
        if not (0 <= u < g.vertex_count and 0 <= v < g.vertex_count):
            raise ValidationError(f"arc {i} endpoint out of range")
        if w != INFINITE and (not isinstance(w, int) or w < 0):
            raise ValidationError(
                f"arc {i} weight must be a non-negative int or INFINITE"
            )
    for label, vertex in (("source", g.source), ("sink", g.sink)):
        if vertex is not None and not (0 <= vertex < g.vertex_count):
            raise ValidationError(f"{label} out of range")


@dataclass(frozen=True)
class MinCutResult:
    """A minimum s-t cut.

    ``source_side`` is the canonical partition: the vertices reachable from
    the source in the residual graph of a maximum flow (the same set for
    every maximum flow).  ``cut_arcs`` are the ids of all arcs leaving it,
    zero-weight arcs included; their weights sum to ``value``.
    """

    value: float
    source_side: frozenset[int]
    cut_arcs: tuple[int, ...]


def min_cut(
    g: CostDigraph, source: int | None = None, sink: int | None = None
) -> MinCutResult:
    """Minimum s-t cut of ``g``.

    ``value`` is INFINITE when every cut must cross an INFINITE arc.
    Internally, infinite weights are replaced by one more than the sum of
    all finite weights, which no finite cut can reach.
    """
    _check_digraph(g)
    s = g.source if source is None else source
    t = g.sink if sink is None else sink
    if s is None or t is None:
        raise ValidationError("min_cut needs both a source and a sink")
    if s == t:
        raise ValidationError("source and sink must differ")

    finite_sum = sum(w for _, _, w in g.arcs if w != INFINITE)
    sentinel = int(finite_sum) + 1
    if sentinel >= 2**31:
        raise ValidationError("total arc weight too large for the flow backend")

    cap: dict[tuple[int, int], int] = {}
    for u, v, w in g.arcs:
        if u == v:
            continue
        if w == INFINITE:
            cap[(u, v)] = sentinel
        elif w > 0 and cap.get((u, v), 0) != sentinel:
            cap[(u, v)] = min(cap.get((u, v), 0) + int(w), sentinel)

    if cap:
        rows = np.fromiter((u for u, _ in cap), dtype=np.int32, count=len(cap))
        cols = np.fromiter((v for _, v in cap), dtype=np.int32, count=len(cap))
        data = np.fromiter(cap.values(), dtype=np.int32, count=len(cap))
        matrix = csr_matrix(
            (data, (rows, cols)), shape=(g.vertex_count, g.vertex_count)
        )
        result = maximum_flow(matrix, s, t)
        raw_value = int(result.flow_value)
        flow = {
            (int(i), int(j)): int(v)
            for i, j, v in zip(*_coo_parts(result.flow))
            if v > 0
        }
    else:
        raw_value = 0
        flow = {}

    # Residual reachability from the source gives the canonical partition.
    forward: dict[int, list[int]] = {}
    backward: dict[int, list[int]] = {}
    for (u, v), c in cap.items():
        f = flow.get((u, v), 0)
        if c - f > 0:
            forward.setdefault(u, []).append(v)
        if f > 0:
            backward.setdefault(v, []).append(u)
    seen = {s}
    queue = deque([s])
    while queue:
        u = queue.popleft()
        for v in forward.get(u, ()):
            if v not in seen:
                seen.add(v)
                queue.append(v)
        for v in backward.get(u, ()):
            if v not in seen:
                seen.add(v)
                queue.append(v)

    side = frozenset(seen)
    cut_ids = tuple(
        i for i, (u, v, _) in enumerate(g.arcs) if u in side and v not in side
    )
    if raw_value >= sentinel:
        value: float = INFINITE
    else:
        value = raw_value
        crossing = sum(g.arcs[i][2] for i in cut_ids)
        if crossing != value:
            raise AssertionError(
                f"cut arcs sum to {crossing}, flow said {value}"
            )
    return MinCutResult(value=value, source_side=side, cut_arcs=cut_ids)


def _coo_parts(matrix):
    coo = matrix.tocoo()
    return coo.row, coo.col, coo.data


# ---------------------------------------------------------------------------
# Bipartite covers


@dataclass(frozen=True)
class BipartiteGraph:
    """An undirected bipartite graph on 0-indexed left and right vertices."""

    left_count: int
    right_count: int
    edges: tuple[tuple[int, int], ...]


def bipartite_min_vertex_cover(
    g: BipartiteGraph,
) -> tuple[tuple[int, ...], tuple[int, ...]]:
    """Minimum vertex cover of a bipartite graph, as (left ids, right ids).

    Computes a maximum matching (scipy's Hopcroft-Karp) and converts it with
    the Koenig construction: starting from the unmatched left vertices,
    alternate along non-matching edges to the right and matching edges back
    to the left; the cover is the unreached left side plus the reached right
    side.  Both tuples come back sorted.
    """
    if g.left_count < 0 or g.right_count < 0:
        raise ValidationError("vertex counts must be non-negative")
    adj: dict[int, list[int]] = {}
    dedup: set[tuple[int, int]] = set()
    for left, right in g.edges:
        if not (0 <= left < g.left_count and 0 <= right < g.right_count):
            raise ValidationError(f"edge ({left}, {right}) out of range")
        if (left, right) not in dedup:
            dedup.add((left, right))
            adj.setdefault(left, []).append(right)
    if not dedup:
        return ((), ())

    rows = np.fromiter((u for u, _ in dedup), dtype=np.int32, count=len(dedup))
    cols = np.fromiter((v for _, v in dedup), dtype=np.int32, count=len(dedup))
    ones = np.ones(len(dedup), dtype=np.int32)
    matrix = csr_matrix((ones, (rows, cols)), shape=(g.left_count, g.right_count))
    row_match = maximum_bipartite_matching(matrix, perm_type="column")
    col_match = [-1] * g.right_count
    for left, right in enumerate(row_match):
        if right >= 0:
            col_match[right] = left

    reached_left = {u for u in range(g.left_count) if row_match[u] < 0}
    reached_right: set[int] = set()
    queue = deque(sorted(reached_left))
    while queue:
        u = queue.popleft()
        for v in adj.get(u, ()):
            if v in reached_right or row_match[u] == v:
                continue
            reached_right.add(v)
            mate = col_match[v]
            if mate >= 0 and mate not in reached_left:
                reached_left.add(mate)
                queue.append(mate)

    left_cover = tuple(sorted(set(range(g.left_count)) - reached_left))
    right_cover = tuple(sorted(reached_right))
    matched = int(sum(1 for v in row_match if v >= 0))
    if len(left_cover) + len(right_cover) != matched:
        raise AssertionError("cover size disagrees with matching size")
    return left_cover, right_cover


# ---------------------------------------------------------------------------
# Anti-arborescences


@dataclass(frozen=True)
class ArborescenceResult:
    """A minimum-weight spanning anti-arborescence (arc ids and total)."""

    weight: int
    arcs: tuple[int, ...]


def spanning_anti_arborescence(
    g: CostDigraph, root: int | None = None
) -> tuple[int, ...] | None:
    """Arc ids of some spanning anti-arborescence into ``root``, or None.

    Weights are ignored.  One exists exactly when every vertex can reach the
    root; the returned tree is the deterministic reverse-BFS tree that
    prefers small arc ids.
    """
    _check_digraph(g)
    r = g.sink if root is None else root
    if r is None:
        raise ValidationError("spanning_anti_arborescence needs a root")
    radj: dict[int, list[tuple[int, int]]] = {}
    for i, (u, v, _) in enumerate(g.arcs):
        radj.setdefault(v, []).append((i, u))
    parent: dict[int, int] = {}
    seen = {r}
    queue = deque([r])
    while queue:
        v = queue.popleft()
        for arc_id, u in radj.get(v, ()):
            if u not in seen:
                seen.add(u)
                parent[u] = arc_id
                queue.append(u)
    if len(seen) != g.vertex_count:
        return None
    return tuple(sorted(parent.values()))


def min_anti_arborescence(
    g: CostDigraph, root: int | None = None
) -> ArborescenceResult | None:
    """Minimum-weight spanning anti-arborescence into ``root``, or None.

    Runs the Chu-Liu/Edmonds contraction loop on the reversed graph (an
    anti-arborescence into the root is an out-arborescence from it once all
    arcs flip).  Infinite weights are rejected.  Deterministic: per head,
    the cheapest in-arc with the smallest id wins, and contractions inherit
    stable arc order.
    """
    _check_digraph(g)
    r = g.sink if root is None else root
    if r is None:
        raise ValidationError("min_anti_arborescence needs a root")
    if any(w == INFINITE for _, _, w in g.arcs):
        raise ValidationError("min_anti_arborescence requires finite weights")
    if g.vertex_count == 0:
        raise ValidationError("graph has no vertices")

    # Reversed orientation: original (u, v, w) becomes an in-arc of u.
    arcs = [
        (v, u, int(w), i) for i, (u, v, w) in enumerate(g.arcs) if u != v and u != r
    ]
    chosen = _edmonds(g.vertex_count, arcs, r)
    if chosen is None:
        return None
    ids = tuple(sorted(chosen))
    if __debug__:
        _assert_anti_arborescence(g, ids, r)
    return ArborescenceResult(
        weight=int(sum(g.arcs[i][2] for i in ids)), arcs=ids
    )


def _assert_anti_arborescence(
    g: CostDigraph, ids: tuple[int, ...], root: int
) -> None:
    """Assert the arc set is a spanning anti-arborescence into ``root``.

    Every vertex except the root must have out-degree exactly one, and
    following the out-arcs from any vertex must reach the root (which also
    rules out cycles).
    """
    out: dict[int, int] = {}
    for i in ids:
        u, v, _ = g.arcs[i]
        assert u != root, "root must have no outgoing arc"
        assert u not in out, f"vertex {u} has two outgoing arcs"
        out[u] = v
    assert len(out) == g.vertex_count - 1, "not spanning"
    for u in out:
        seen = set()
        v = u
        while v != root:
            assert v not in seen, "cycle in anti-arborescence"
            seen.add(v)
            v = out[v]


def _edmonds(n: int, arcs: list[tuple[int, int, int, int]], root: int):
    """Chosen original arc ids of a min arborescence from ``root``, or None.

    ``arcs`` hold (tail, head, weight, original id) in the already-reversed
    orientation; every vertex of 0..n-1 other than the root needs an in-arc.
    The contraction loop picks the cheapest in-arc per head, contracts one
    cycle per round, and afterwards expands the rounds in reverse: the one
    chosen arc entering a contracted cycle decides which cycle arc gets
    displaced, the rest of the cycle is kept.
    """
    radj: dict[int, list[int]] = {}
    for tail, head, _, _ in arcs:
        radj.setdefault(tail, []).append(head)
    seen = {root}
    queue = deque([root])
    while queue:
        u = queue.popleft()
        for v in radj.get(u, ()):
            if v not in seen:
                seen.add(v)
                queue.append(v)
    if len(seen) < n:
        return None

    # Arc lists per round carry (tail, head, weight, token).  In the level-0
    # list the token is the original arc id; in every later list it is an
    # index into the previous round's list.
    work = list(arcs)
    rounds: list[tuple[list, dict[int, int], set[int], dict[int, int]]] = []
    next_vertex = n

    while True:
        best: dict[int, int] = {}
        for idx, (tail, head, weight, _) in enumerate(work):
            if head == root or tail == head:
                continue
            pick = best.get(head)
            if pick is None or weight < work[pick][2]:
                best[head] = idx

        cycle = _find_cycle(best, work)
        if cycle is None:
            chosen = set(best.values())
            break

        super_vertex = next_vertex
        next_vertex += 1
        cycle_set = set(cycle)
        reduced: list[tuple[int, int, int, int]] = []
        entry_head: dict[int, int] = {}  # reduced index -> displaced cycle head
        for idx, (tail, head, weight, _) in enumerate(work):
            tail_in = tail in cycle_set
            head_in = head in cycle_set
            if tail_in and head_in:
                continue
            new_tail = super_vertex if tail_in else tail
            new_head = super_vertex if head_in else head
            new_weight = weight
            if head_in:
                new_weight = weight - work[best[head]][2]
                entry_head[len(reduced)] = head
            reduced.append((new_tail, new_head, new_weight, idx))
        rounds.append((reduced, best, cycle_set, entry_head))
        work = reduced

    # ``chosen`` holds indices into the current round's list; walk the rounds
    # backwards, translating indices one level down and unrolling each cycle.
    for child, best, cycle_set, entry_head in reversed(rounds):
        translated: set[int] = set()
        entered: int | None = None
        for idx in chosen:
            translated.add(child[idx][3])
            if idx in entry_head:
                entered = entry_head[idx]
        if entered is None:
            # Reachability was checked up front, so the super vertex must
            # have received an in-arc; anything else is an internal bug.
            raise AssertionError("contracted cycle was never entered")
        for x in cycle_set:
            if x != entered:
                translated.add(best[x])
        chosen = translated

    base = arcs
    result = {base[idx][3] for idx in chosen}
    if len(result) != n - 1:
        raise AssertionError("arborescence does not span")
    return result


def _find_cycle(
    best: dict[int, int], work: list[tuple[int, int, int, int]]
) -> list[int] | None:
    """A cycle of the chosen-in-arc functional graph, or None."""
    state: dict[int, int] = {}  # 1 = on current path, 2 = finished
    for start in best:
        if state.get(start):
            continue
        path: list[int] = []
        v = start
        while True:
            mark = state.get(v)
            if mark == 2:
                break
            if mark == 1:
                return path[path.index(v):]
            state[v] = 1
            path.append(v)
            if v not in best:
                break
            v = work[best[v]][0]
        for x in path:
            state[x] = 2
    return None
