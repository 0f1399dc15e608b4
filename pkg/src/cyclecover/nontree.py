"""Covering non-tree edges by short cycles through contracted block graphs.

The core routine repeatedly partitions the tree nodes into low-density
blocks, contracts the blocks into a supergraph whose super-edges are the
uncovered edges, strips short super-cycles (self-loops, parallel pairs,
then girth-bounded BFS cycles), and translates each super-cycle into a
closed walk in the host graph using tree paths inside blocks. The set of
uncovered edges halves every iteration.

The walk-level core is shared with the tree-edge cover, which feeds it
virtual edges instead of graph edges.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field

from .blocks import DEFAULT_DENSITY_BOUND, partition
from .graph import (
    Cycle,
    Graph,
    GraphError,
    RootedTree,
    cycle_from_edges,
    tree_path,
)


class CoverConstructionError(GraphError):
    """An internal covering invariant failed (iteration cap, halving, ...)."""


@dataclass(frozen=True)
class SuperGraph:
    """Multigraph of blocks; each remaining edge becomes one super-edge.

    multi_edges entries are (block_i, block_j, key); key identifies the
    originating edge. Self-loops (block_i == block_j) are allowed.
    """

    num_nodes: int
    multi_edges: tuple[tuple[int, int, object], ...]


def find_short_cycle(sg: SuperGraph, max_len: int):
    """A closed super-walk of length <= max_len on distinct super-edges.

    Self-loops come back as length-1 cycles, parallel pairs as length-2
    cycles; longer cycles are found by BFS from every super-node truncated
    at depth ceil(max_len / 2). Returns oriented steps
    (tail_block, head_block, key) with consecutive steps sharing a block,
    or None when no such cycle exists.
    """
    if max_len < 1:
        raise GraphError("max_len must be >= 1")
    for i, j, key in sg.multi_edges:
        if i == j:
            return [(i, j, key)]
    if max_len >= 2:
        first_of_pair: dict[tuple[int, int], tuple[int, int, object]] = {}
        for i, j, key in sg.multi_edges:
            pair = (min(i, j), max(i, j))
            if pair in first_of_pair:
                fi, fj, fkey = first_of_pair[pair]
                return [(fi, fj, fkey), (fj, fi, key)]
            first_of_pair[pair] = (i, j, key)
    if max_len < 3:
        return None

    adj: dict[int, list[tuple[int, int]]] = {}
    for idx, (i, j, _key) in enumerate(sg.multi_edges):
        adj.setdefault(i, []).append((j, idx))
        adj.setdefault(j, []).append((i, idx))
    for lst in adj.values():
        lst.sort()

    depth_cap = -(-max_len // 2)
    for s in sorted(adj):
        found = _bfs_cycle_from(sg, adj, s, depth_cap, max_len)
        if found is not None:
            return found
    return None


def _bfs_cycle_from(sg, adj, s, depth_cap, max_len):
    dist = {s: 0}
    par_edge: dict[int, int] = {s: -1}
    par_vertex: dict[int, int] = {s: -1}
    q = deque([s])
    best = None
    while q:
        x = q.popleft()
        if dist[x] >= depth_cap:
            continue
        for y, idx in adj[x]:
            if y not in dist:
                dist[y] = dist[x] + 1
                par_edge[y] = idx
                par_vertex[y] = x
                q.append(y)
            elif idx != par_edge[x] and idx != par_edge[y]:
                # Cross edge closes a cycle through the BFS-tree meeting
                # point of x and y; trim the common prefix toward the root.
                pa, pb = [x], [y]
                a, b = x, y
                while dist[a] > dist[b]:
                    a = par_vertex[a]
                    pa.append(a)
                while dist[b] > dist[a]:
                    b = par_vertex[b]
                    pb.append(b)
                while a != b:
                    a = par_vertex[a]
                    b = par_vertex[b]
                    pa.append(a)
                    pb.append(b)
                length = (len(pa) - 1) + (len(pb) - 1) + 1
                if length <= max_len and (best is None or length < best[0]):
                    best = (length, pa, pb, idx)
    if best is None:
        return None
    _length, pa, pb, cross_idx = best
    steps = []
    # Meeting point m = pa[-1] = pb[-1]; walk m -> x, cross to y, y -> m.
    for k in range(len(pa) - 1, 0, -1):
        steps.append((pa[k], pa[k - 1], sg.multi_edges[par_edge[pa[k - 1]]][2]))
    steps.append((pa[0], pb[0], sg.multi_edges[cross_idx][2]))
    for k in range(0, len(pb) - 1):
        steps.append((pb[k], pb[k + 1], sg.multi_edges[par_edge[pb[k]]][2]))
    return steps


@dataclass
class NonTreeCoverStats:
    """Per-iteration accounting recorded while covering non-tree edges."""

    uncovered_sizes: list[int] = field(default_factory=list)
    cycles_per_iteration: list[int] = field(default_factory=list)
    max_tree_congestion_per_iteration: list[int] = field(default_factory=list)


# A walk step is (kind, ref, tail, head): kind 't' is a tree edge (ref its
# edge ID), kind 'x' is a covered item (ref is the caller's key).
WalkStep = tuple[str, object, int, int]


def cover_items_over_tree(
    t: RootedTree,
    items: list[tuple[int, int, object]],
    *,
    log_n: int,
    density_bound: int = DEFAULT_DENSITY_BOUND,
    stats: NonTreeCoverStats | None = None,
) -> list[list[WalkStep]]:
    """Cover every item (a, b, key) by closed walks over the tree.

    Items behave like non-tree edges with endpoints a != b inside the
    tree. Walks alternate item steps with tree paths connecting same-block
    endpoints; each item appears in exactly one walk. log_n is ceil(log2)
    of the original graph's vertex count and caps the super-cycle length.
    """
    for a, b, _ in items:
        if a == b:
            raise GraphError("item endpoints must differ")
        if not (t.has_vertex(a) and t.has_vertex(b)):
            raise GraphError("item endpoint outside the tree")

    edge_ends = {eid: (t.parent[v], v) for v, eid in t.parent_edge.items()}
    max_len = max(1, log_n)
    cap = 4 * max_len + 8
    remaining = list(items)
    walks: list[list[WalkStep]] = []
    iteration = 0
    while remaining:
        iteration += 1
        if iteration > cap:
            raise CoverConstructionError(
                f"covering exceeded {cap} iterations; {len(remaining)} items left"
            )
        before = len(remaining)
        part = partition(t, [(a, b) for a, b, _ in remaining], density_bound)
        block_of = {v: part.block_of(t.postorder[v]) for v in t.vertices()}

        new_walks, remaining = _extract_all(
            t, edge_ends, block_of, part, remaining, max_len
        )
        walks.extend(new_walks)

        if stats is not None:
            stats.uncovered_sizes.append(before)
            stats.cycles_per_iteration.append(len(new_walks))
            stats.max_tree_congestion_per_iteration.append(_max_tree_use(new_walks))
        if len(remaining) > before // 2:
            raise CoverConstructionError(
                f"halving invariant violated: {before} -> {len(remaining)} uncovered"
            )
    return walks


def _max_tree_use(walks) -> int:
    counts: dict[int, int] = {}
    for walk in walks:
        for kind, ref, _, _ in walk:
            if kind == "t":
                counts[ref] = counts.get(ref, 0) + 1
    return max(counts.values(), default=0)


def _extract_all(t, edge_ends, block_of, part, items, max_len):
    """Strip super-cycles until none of length <= max_len remains."""
    walks = []
    live = list(enumerate(items))  # (slot, (a, b, key)); slot keys the super-edge

    def translate(steps):
        resolved = [(bi, bj) + items[slot] for bi, bj, slot in steps]
        return _expand_walk(t, edge_ends, block_of, resolved)

    loops = [(slot, it) for slot, it in live if block_of[it[0]] == block_of[it[1]]]
    live = [(slot, it) for slot, it in live if block_of[it[0]] != block_of[it[1]]]
    for slot, (a, b, key) in loops:
        blk = block_of[a]
        walks.append(translate([(blk, blk, slot)]))

    if max_len >= 2:
        bundles: dict[tuple[int, int], list] = {}
        for slot, it in live:
            ba, bb = block_of[it[0]], block_of[it[1]]
            bundles.setdefault((min(ba, bb), max(ba, bb)), []).append((slot, it))
        live = []
        for pair in sorted(bundles):
            group = bundles[pair]
            while len(group) >= 2:
                s1, it1 = group.pop(0)
                s2, it2 = group.pop(0)
                b1, b2 = block_of[it1[0]], block_of[it1[1]]
                walks.append(translate([(b1, b2, s1), (b2, b1, s2)]))
            live.extend(group)

    while True:
        sg = SuperGraph(
            len(part.ranges),
            tuple(
                (block_of[it[0]], block_of[it[1]], slot) for slot, it in live
            ),
        )
        sc = find_short_cycle(sg, max_len)
        if sc is None:
            break
        walks.append(translate(sc))
        used = {slot for _, _, slot in sc}
        live = [(slot, it) for slot, it in live if slot not in used]
    return walks, [it for _, it in live]


def _expand_walk(t, edge_ends, block_of, resolved):
    """resolved: (tail_block, head_block, a, b, key) per item step, blocks
    oriented along the walk. Flip item vertices so the tail endpoint lies
    in the tail block, then join consecutive items with tree paths."""
    k = len(resolved)
    fixed: list[tuple[int, int, object]] = []
    for bi, bj, a, b, key in resolved:
        if bi == bj or block_of[a] == bi:
            fixed.append((a, b, key))
        else:
            fixed.append((b, a, key))

    steps: list[WalkStep] = []
    for idx in range(k):
        tail, head, key = fixed[idx]
        steps.append(("x", key, tail, head))
        next_tail = fixed[(idx + 1) % k][0]
        if head != next_tail:
            cur = head
            for eid in tree_path(t, head, next_tail):
                u, v = edge_ends[eid]
                nxt = v if cur == u else u
                steps.append(("t", eid, cur, nxt))
                cur = nxt
    return steps


def simplify_cycles(cycles: list[Cycle]) -> list[Cycle]:
    """Split non-simple cycles at repeated vertices until all are simple.

    Splitting picks the smallest repeated vertex ID, cuts the walk at all
    its occurrences, and keeps fragments of length >= 3. Any edge that
    appeared exactly once in an input cycle survives into some output
    cycle; per-edge total multiplicity never increases.
    """
    out: list[Cycle] = []
    queue = list(cycles)
    while queue:
        cyc = queue.pop()
        inner = cyc.vertices[:-1]
        counts: dict[int, int] = {}
        for v in inner:
            counts[v] = counts.get(v, 0) + 1
        repeated = [v for v, c in counts.items() if c > 1]
        if not repeated:
            out.append(cyc)
            continue
        w = min(repeated)
        occ = [i for i, v in enumerate(inner) if v == w]
        k = len(cyc.edges)
        for j in range(len(occ)):
            start = occ[j]
            end = occ[(j + 1) % len(occ)]
            span = (end - start) % k
            if span == 0:
                span = k
            if span < 3:
                continue
            idxs = [(start + off) % k for off in range(span)]
            edges = tuple(cyc.edges[i] for i in idxs)
            verts = tuple(cyc.vertices[i] for i in idxs) + (w,)
            queue.append(Cycle(edges, verts))
    out.sort(key=lambda c: (c.length, c.edges))
    return out


def non_tree_cover(
    g: Graph,
    t: RootedTree,
    e1: set[int],
    *,
    density_bound: int = DEFAULT_DENSITY_BOUND,
    stats: NonTreeCoverStats | None = None,
) -> list[Cycle]:
    """Cover the non-tree edges e1 by short, low-congestion simple cycles.

    Every edge of e1 appears in at least one output cycle; each cycle
    carries at most ceil(log2 n) edges of e1 joined by tree paths, so its
    length is bounded by (2 depth(t) + 1) ceil(log2 n).
    """
    tree_eids = t.tree_edge_ids()
    for eid in e1:
        if eid in tree_eids:
            raise GraphError(f"edge {eid} is a tree edge, not coverable here")
    if not e1:
        return []

    log_n = max(1, math.ceil(math.log2(g.n))) if g.n > 1 else 1
    items = [(g.edges[eid][0], g.edges[eid][1], eid) for eid in sorted(e1)]
    walks = cover_items_over_tree(
        t, items, log_n=log_n, density_bound=density_bound, stats=stats
    )
    cycles = []
    for walk in walks:
        edge_ids = [ref for _, ref, _, _ in walk]
        cycles.append(cycle_from_edges(g, walk[0][2], edge_ids))
    return simplify_cycles(cycles)
