"""Covering tree edges: independent swap paths, route-disjoint matching,
conflict coloring, and the recursive balanced-split construction.

Every non-bridge tree edge e = (p(v), v) owns a swap path
P_e = pi(v, u') . swap(e) ending at s(v). A greedily chosen independent
subset I of tree edges has pairwise tree-edge-disjoint swap paths whose
union (with the edges themselves) covers the whole tree. The recursion
splits the tree into balanced halves, matches the edges whose swap
endpoint falls in the other half into route-disjoint pairs, covers the
resulting virtual edges in the other half with the non-tree machinery,
and expands each virtual edge back into real paths.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .graph import (
    Cycle,
    CycleCover,
    Graph,
    GraphError,
    RootedTree,
    SwapEdge,
    UncoverableEdgeError,
    balanced_tree_split,
    bfs_tree,
    bridges,
    cycle_from_edges,
    swap_edges,
    tree_path,
)
from .nontree import (
    NonTreeCoverStats,
    cover_items_over_tree,
    non_tree_cover,
    simplify_cycles,
)


@dataclass(frozen=True)
class SwapPath:
    """The v-to-s(v) path for tree edge (p(v), v): tree edges descending
    from v to the swap edge's inside endpoint, then the swap edge."""

    child: int
    tree_edge: int
    path_tree_edges: tuple[int, ...]
    swap: SwapEdge

    @property
    def all_edges(self) -> tuple[int, ...]:
        return self.path_tree_edges + (self.swap.edge_id,)


@dataclass(frozen=True)
class IndependentSet:
    """Tree edges (by child vertex) whose swap paths are pairwise
    tree-edge-disjoint and jointly cover every coverable tree edge."""

    members: tuple[int, ...]
    paths: dict[int, SwapPath] = field(compare=False)


def build_independent_set(t: RootedTree, swaps: dict[int, SwapEdge]) -> IndependentSet:
    """Greedy scan of tree edges by non-decreasing depth (ties by vertex).

    An edge joins the set only if no earlier member's edge-plus-path
    already covers it; joining marks its own edge and its swap path's tree
    edges as covered.
    """
    covered: set[int] = set()
    members: list[int] = []
    paths: dict[int, SwapPath] = {}
    order = sorted(swaps, key=lambda v: (t.depth[v], v))
    for v in order:
        eid = t.parent_edge[v]
        if eid in covered:
            continue
        sw = swaps[v]
        down = tree_path(t, v, sw.inside)
        sp = SwapPath(v, eid, tuple(down), sw)
        members.append(v)
        paths[v] = sp
        covered.add(eid)
        covered.update(down)
    return IndependentSet(tuple(members), paths)


def edge_disjoint_path_matching(
    t: RootedTree, marked: set[int]
) -> list[tuple[int, int, list[int]]]:
    """Match marked vertices into pairs with pairwise edge-disjoint tree
    paths, working leaf-to-root; each vertex pairs all but at most one of
    the unmatched marked nodes in its subtree.

    Returns (v1, v2, path_edge_ids) with v1 < v2. |marked| must be even.
    """
    if len(marked) % 2 != 0:
        raise GraphError("marked vertex set must have even size")
    for v in marked:
        if not t.has_vertex(v):
            raise GraphError(f"marked vertex {v} not in tree")

    pending: dict[int, list[int]] = {v: [] for v in t.vertices()}
    pairs: list[tuple[int, int, list[int]]] = []
    for v in sorted(t.vertices(), key=lambda x: (-t.depth[x], x)):
        bucket = [v] if v in marked else []
        for c in t.children[v]:
            bucket.extend(pending[c])
        bucket.sort()
        while len(bucket) >= 2:
            a = bucket.pop(0)
            b = bucket.pop(0)
            lo, hi = (a, b) if a < b else (b, a)
            pairs.append((lo, hi, tree_path(t, lo, hi)))
        pending[v] = bucket
    if pending[t.root]:
        raise GraphError("matching left an unpaired vertex with even input")
    pairs.sort()
    return pairs


@dataclass(frozen=True)
class ConflictGraph:
    """Interference relation between matched pairs.

    An arc (i, j) means pair i's tree path runs through the swap path of a
    tree edge that pair j is responsible for; such pairs must not share a
    covering cycle. Out-degrees never exceed 1, so 3 colors suffice.
    """

    num_pairs: int
    arcs: tuple[tuple[int, int], ...]
    colors: tuple[int, ...]


def build_conflict_graph(
    sigma: list[tuple[int, int, list[int]]],
    swap_paths: dict[int, SwapPath],
    parent_edge_of: dict[int, int],
) -> ConflictGraph:
    """Arcs per the two interference cases, then a 3-coloring.

    For pair j = <v1, v2>: if (p(v1), v1) lies on j's path and some other
    pair i's path intersects P_{(p(v1),v1)}, add arc (i, j); same for v2.
    Coloring is greedy over a min-degree elimination order (the underlying
    graph is 2-degenerate since out-degrees are at most 1).
    """
    edge_owner: dict[int, int] = {}
    for idx, (_, _, path) in enumerate(sigma):
        for eid in path:
            if eid in edge_owner:
                raise GraphError("matching paths are not edge-disjoint")
            edge_owner[eid] = idx

    arcs: set[tuple[int, int]] = set()
    for j, (v1, v2, path) in enumerate(sigma):
        path_set = set(path)
        for v in (v1, v2):
            e = parent_edge_of.get(v)
            if e is None or e not in path_set or v not in swap_paths:
                continue
            for f in swap_paths[v].all_edges:
                i = edge_owner.get(f)
                if i is not None and i != j:
                    arcs.add((i, j))

    out_deg = [0] * len(sigma)
    for i, _ in arcs:
        out_deg[i] += 1
    for i, d in enumerate(out_deg):
        if d > 1:
            raise GraphError(f"conflict out-degree {d} > 1 for pair {i}")

    colors = _three_color(len(sigma), arcs)
    return ConflictGraph(len(sigma), tuple(sorted(arcs)), tuple(colors))


def _three_color(n: int, arcs: set[tuple[int, int]]) -> list[int]:
    neigh: dict[int, set[int]] = {i: set() for i in range(n)}
    for i, j in arcs:
        neigh[i].add(j)
        neigh[j].add(i)
    # Min-degree elimination order; color greedily in reverse.
    degree = {i: len(neigh[i]) for i in range(n)}
    removed: list[int] = []
    alive = set(range(n))
    while alive:
        v = min(alive, key=lambda x: (degree[x], x))
        removed.append(v)
        alive.discard(v)
        for w in neigh[v]:
            if w in alive:
                degree[w] -= 1
    colors = [-1] * n
    for v in reversed(removed):
        used = {colors[w] for w in neigh[v] if colors[w] != -1}
        for c in range(3):
            if c not in used:
                colors[v] = c
                break
        if colors[v] == -1:
            raise GraphError("3-coloring failed; conflict graph not 2-degenerate")
    return colors


@dataclass
class TreeCoverStats:
    """Diagnostics recorded while covering tree edges.

    odd_leftover_fundamentals counts the construction's own use of
    fundamental cycles (base cases and the unmatched odd vertex);
    repair_fundamentals counts the final tripwire and stays zero unless
    the main construction has a bug.
    """

    odd_leftover_fundamentals: int = 0
    excluded_cross_paths: int = 0
    repair_fundamentals: int = 0
    phase_counts: list[int] = field(default_factory=list)
    level_tree_edges: dict[int, list[frozenset[int]]] = field(default_factory=dict)
    exact_once_checked: int = 0


def _fundamental_cycle(g: Graph, t: RootedTree, sp: SwapPath) -> Cycle:
    """Simple cycle: swap edge plus the tree path between its endpoints.

    Contains (p(v), v) and the whole swap path of v by construction.
    """
    path = tree_path(t, sp.swap.outside, sp.swap.inside)
    return cycle_from_edges(g, sp.swap.outside, path + [sp.swap.edge_id])


def tree_cover(
    g: Graph,
    t: RootedTree,
    *,
    skip_bridges: bool = False,
    stats: TreeCoverStats | None = None,
) -> list[Cycle]:
    """Cover the tree edges of t by short, low-congestion simple cycles.

    Bridge tree edges cannot lie on any cycle; by default their presence
    raises UncoverableEdgeError, with skip_bridges=True they are left out
    (callers report them alongside the cover).
    """
    swaps = swap_edges(g, t)
    missing = [v for v in t.vertices() if v != t.root and v not in swaps]
    if missing and not skip_bridges:
        v = min(missing)
        raise UncoverableEdgeError(
            f"tree edge ({t.parent[v]},{v}) is a bridge; no cycle covers it"
        )
    iset = build_independent_set(t, swaps)
    if stats is None:
        stats = TreeCoverStats()

    log_n = max(1, math.ceil(math.log2(g.n))) if g.n > 1 else 1
    cycles: list[Cycle] = []
    _cover_rec(g, t, t, set(iset.members), iset.paths, log_n, cycles, stats, level=0)
    simple = simplify_cycles(cycles)

    # Tripwire: any coverable tree edge that slipped through (it should
    # not happen) is repaired with the fundamental cycle of its swap edge.
    covered = {eid for c in simple for eid in c.edges}
    for v in sorted(swaps):
        eid = t.parent_edge[v]
        if eid not in covered:
            owner = _owner_of(eid, iset)
            simple.append(_fundamental_cycle(g, t, iset.paths[owner]))
            covered.update(simple[-1].edges)
            stats.repair_fundamentals += 1
    return simple


def _owner_of(eid: int, iset: IndependentSet) -> int:
    for v in iset.members:
        sp = iset.paths[v]
        if eid == sp.tree_edge or eid in sp.path_tree_edges:
            return v
    raise GraphError(f"tree edge {eid} not covered by any independent-set path")


def _cover_rec(g, full_t, t_sub, assigned, paths, log_n, cycles, stats, level):
    """Cover the assigned independent-set edges inside subtree t_sub.

    Invariant: for every assigned v, the edge (p(v), v) is in t_sub and
    s(v) is a vertex of t_sub.
    """
    if not assigned:
        return
    stats.level_tree_edges.setdefault(level, []).append(t_sub.tree_edge_ids())
    if t_sub.size <= 2:
        for v in sorted(assigned):
            cycles.append(_fundamental_cycle(g, full_t, paths[v]))
            stats.odd_leftover_fundamentals += 1
        return

    t1, t2 = balanced_tree_split(t_sub)
    e11: set[int] = set()
    e12: set[int] = set()
    e21: set[int] = set()
    e22: set[int] = set()
    t1_edges = t1.tree_edge_ids()
    for v in assigned:
        in_t1 = paths[v].tree_edge in t1_edges
        s_v = paths[v].swap.outside
        if in_t1:
            (e11 if t1.has_vertex(s_v) else e12).add(v)
        else:
            (e22 if t2.has_vertex(s_v) else e21).add(v)

    _cover_cross(g, full_t, t1, t2, e12, paths, log_n, cycles, stats)
    _cover_cross(g, full_t, t2, t1, e21, paths, log_n, cycles, stats)
    _cover_rec(g, full_t, t1, e11, paths, log_n, cycles, stats, level + 1)
    _cover_rec(g, full_t, t2, e22, paths, log_n, cycles, stats, level + 1)


def _cover_cross(g, full_t, ta, tb, xs, paths, log_n, cycles, stats):
    """Cover edges living in ta whose swap endpoint lies in tb.

    Phases: match the pending child vertices with route-disjoint paths in
    ta, 3-color the pairs against swap-path interference, turn each color
    class into virtual edges between the swap endpoints in tb, cover those
    with the non-tree machinery, and expand back into real cycles. Each
    phase covers at least half of what remains.
    """
    if not xs:
        return

    # Swap paths that dip into tb would collide with tb's tree paths on
    # the same cycle; cover those few edges directly by fundamental cycles.
    tb_edges = tb.tree_edge_ids()
    active = set()
    for v in sorted(xs):
        if any(e in tb_edges for e in paths[v].path_tree_edges):
            cycles.append(_fundamental_cycle(g, full_t, paths[v]))
            stats.excluded_cross_paths += 1
        else:
            active.add(v)

    cap = 4 * log_n + 8
    phase = 0
    parent_edge_of = dict(full_t.parent_edge)
    while active:
        phase += 1
        if phase > cap:
            raise GraphError(f"cross covering exceeded {cap} phases")
        if len(active) == 1:
            v = next(iter(active))
            cycles.append(_fundamental_cycle(g, full_t, paths[v]))
            stats.odd_leftover_fundamentals += 1
            break
        marked = sorted(active)
        if len(marked) % 2 == 1:
            marked = marked[:-1]
        sigma = edge_disjoint_path_matching(ta, set(marked))
        conflict = build_conflict_graph(sigma, paths, parent_edge_of)

        covered_now: set[int] = set()
        for color in range(3):
            class_pairs = [
                (idx, sigma[idx])
                for idx in range(len(sigma))
                if conflict.colors[idx] == color
            ]
            if not class_pairs:
                continue
            covered_now |= _cover_color_class(
                g, full_t, ta, tb, class_pairs, paths, log_n, cycles, stats
            )
        if len(covered_now) * 2 < len(marked):
            raise GraphError("phase covered fewer than half of the matched edges")
        active -= covered_now
    stats.phase_counts.append(phase)


def _cover_color_class(g, full_t, ta, tb, class_pairs, paths, log_n, cycles, stats):
    """One independent color class: virtual edges in tb, then expansion."""
    items = []
    expansions: dict[object, tuple[list[int], list[int], int, int]] = {}
    covered: set[int] = set()
    direct: list[tuple[int, int, list[int]]] = []
    for idx, (v1, v2, path) in class_pairs:
        s1 = paths[v1].swap.outside
        s2 = paths[v2].swap.outside
        for v in (v1, v2):
            if paths[v].tree_edge in path:
                covered.add(v)
        if s1 == s2:
            direct.append((v1, v2, path))
        else:
            key = ("pair", idx)
            items.append((s1, s2, key))
            expansions[key] = (v1, v2, path)

    for v1, v2, path in direct:
        # Degenerate virtual self-loop: close the cycle through the
        # matching path and both swap paths immediately.
        edges = (
            path
            + list(paths[v2].all_edges)
            + list(reversed(paths[v1].all_edges))
        )
        cyc = cycle_from_edges(g, v1, edges)
        _assert_exact_once(cyc, covered & {v1, v2}, paths, stats)
        cycles.append(cyc)

    if items:
        walks = cover_items_over_tree(tb, items, log_n=log_n)
        for walk in walks:
            edges: list[int] = []
            start = walk[0][2]
            pairs_on_walk: set[int] = set()
            for kind, ref, tail, head in walk:
                if kind == "t":
                    edges.append(ref)
                else:
                    v1, v2, path = expansions[ref]
                    s1 = paths[v1].swap.outside
                    seg = _pair_segment(g, v1, v2, path, paths)
                    if tail != s1:
                        seg = list(reversed(seg))
                    edges.extend(seg)
                    pairs_on_walk.add(v1)
                    pairs_on_walk.add(v2)
            cyc = cycle_from_edges(g, start, edges)
            _assert_exact_once(cyc, covered & pairs_on_walk, paths, stats)
            cycles.append(cyc)
    return covered


def _pair_segment(g, v1, v2, path, paths):
    """Edge walk s(v1) -> v1 -> v2 -> s(v2): reversed swap path of v1, the
    matching path, then the swap path of v2."""
    return (
        list(reversed(paths[v1].all_edges))
        + path
        + list(paths[v2].all_edges)
    )


def _assert_exact_once(cyc: Cycle, covered_children, paths, stats) -> None:
    """Each covered edge's own edge and swap-path tree edges appear exactly
    once on the raw cycle, so simplification cannot lose them. The swap
    edge itself may appear twice (once per direction across two paths)."""
    counts: dict[int, int] = {}
    for eid in cyc.edges:
        counts[eid] = counts.get(eid, 0) + 1
    for v in covered_children:
        sp = paths[v]
        for eid in (sp.tree_edge, *sp.path_tree_edges):
            if counts.get(eid, 0) != 1:
                raise GraphError(
                    f"edge {eid} appears {counts.get(eid, 0)} times on the "
                    f"cycle covering child {v}"
                )
        if counts.get(sp.swap.edge_id, 0) not in (1, 2):
            raise GraphError("swap edge multiplicity out of range")
        stats.exact_once_checked += 1


@dataclass(frozen=True)
class GraphCoverResult:
    """Full cycle cover plus the bridges it cannot cover."""

    cover: CycleCover
    bridges: frozenset[int]
    nontree_stats: NonTreeCoverStats
    tree_stats: TreeCoverStats

    def uncovered_non_bridges(self, g: Graph) -> set[int]:
        return set(range(g.m)) - self.cover.covered_edges() - self.bridges


def graph_cover(g: Graph, *, root: int = 0) -> GraphCoverResult:
    """Cover every non-bridge edge of a connected graph by simple cycles.

    BFS tree from the root, then the non-tree cover and the tree cover;
    bridges are reported, not covered (no cycle contains them).
    """
    t = bfs_tree(g, root)
    bridge_set = frozenset(bridges(g))
    e1 = {eid for eid in range(g.m) if eid not in t.tree_edge_ids()}
    nstats = NonTreeCoverStats()
    tstats = TreeCoverStats()
    c1 = non_tree_cover(g, t, e1, stats=nstats)
    c2 = tree_cover(g, t, skip_bridges=True, stats=tstats)
    cover = CycleCover(tuple(simplify_cycles(c1 + c2)))

    leftovers = set(range(g.m)) - cover.covered_edges() - bridge_set
    if leftovers:
        raise GraphError(f"cover construction missed non-bridge edges {leftovers}")
    return GraphCoverResult(cover, bridge_set, nstats, tstats)
