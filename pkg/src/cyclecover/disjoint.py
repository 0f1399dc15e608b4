"""Two-edge-disjoint cycle covers via sampling experiments plus max-flow.

Each experiment samples every edge independently with probability
1 - 1/(3D), covers the sampled subgraph at per-edge-optimal scales, and
keeps the shortest cycle through each edge. Pooling those cycles per edge
gives a small subgraph in which a unit-capacity max-flow finds three
pairwise edge-disjoint endpoint paths, one of which is the edge itself.
"""

from __future__ import annotations

import math
import random
from collections import deque
from dataclasses import dataclass, field

from .graph import Cycle, CycleCover, Graph, GraphError
from .optimal import optimal_edge_cycle_cover


def _bfs_ecc(g: Graph, src: int) -> int:
    dist = {src: 0}
    q = deque([src])
    far = 0
    while q:
        v = q.popleft()
        far = max(far, dist[v])
        for w, _ in g.adjacency[v]:
            if w not in dist:
                dist[w] = dist[v] + 1
                q.append(w)
    if len(dist) != g.n:
        raise GraphError("graph is disconnected")
    return far


def diameter(g: Graph) -> int:
    return max(_bfs_ecc(g, v) for v in range(g.n))


def edge_connectivity_at(g: Graph, u: int, v: int, *, limit: int | None = None) -> int:
    """Max number of pairwise edge-disjoint u-v paths (unit-capacity flow).

    Augmenting paths are found by BFS with edges scanned in ID order, so
    the result and the residual state are deterministic. `limit` stops
    early once that many paths exist.
    """
    if u == v:
        raise GraphError("endpoints must differ")
    flow, _ = _max_flow_paths(g, set(range(g.m)), u, v, limit)
    return flow


def _max_flow_paths(g: Graph, allowed: set[int], s: int, t: int, limit: int | None):
    """Unit-capacity max flow restricted to `allowed` edges; returns
    (value, list of edge-ID paths from a flow decomposition)."""
    # used[eid] in {0, +1, -1}: +1 means routed low->high endpoint.
    used: dict[int, int] = {}
    value = 0
    while limit is None or value < limit:
        prev: dict[int, tuple[int, int]] = {s: (-1, -1)}
        q = deque([s])
        while q and t not in prev:
            v = q.popleft()
            for w, eid in g.adjacency[v]:
                if eid not in allowed or w in prev:
                    continue
                direction = 1 if (v, w) == g.edges[eid] else -1
                if used.get(eid, 0) == direction:
                    continue  # saturated in this net direction
                prev[w] = (v, eid)
                q.append(w)
        if t not in prev:
            break
        v = t
        while v != s:
            pv, eid = prev[v]
            direction = 1 if (pv, v) == g.edges[eid] else -1
            cur = used.get(eid, 0)
            used[eid] = 0 if cur == -direction else direction
            if used[eid] == 0:
                del used[eid]
            v = pv
        value += 1

    # Decompose the flow into edge-disjoint s-t paths.
    out_arcs: dict[int, list[tuple[int, int]]] = {}
    for eid, direction in used.items():
        a, b = g.edges[eid]
        tail, head = (a, b) if direction == 1 else (b, a)
        out_arcs.setdefault(tail, []).append((head, eid))
    for lst in out_arcs.values():
        lst.sort()
    paths: list[list[int]] = []
    for _ in range(value):
        path = []
        v = s
        while v != t:
            head, eid = out_arcs[v].pop(0)
            path.append(eid)
            v = head
        paths.append(path)
    return value, paths


@dataclass(frozen=True)
class EdgeTriple:
    """Three pairwise edge-disjoint paths between an edge's endpoints; the
    first is the edge itself."""

    edge_id: int
    paths: tuple[tuple[int, ...], ...]


@dataclass(frozen=True)
class DisjointCoverResult:
    triples: dict[int, EdgeTriple]
    failures: tuple[int, ...]
    aggregate: CycleCover
    num_experiments: int
    diameter: int

    def congestion(self, eid: int) -> int:
        return self.aggregate.congestion(eid)


def default_num_experiments(g: Graph) -> int:
    d = diameter(g)
    return max(1, 4 * d * d * max(1, math.ceil(math.log2(g.n))))


def two_edge_disjoint_cover(
    g: Graph, num_experiments: int, seed: int
) -> DisjointCoverResult:
    """Per-edge triple of edge-disjoint endpoint paths on a 3-edge-connected
    graph; edges whose pooled cycles never reach flow 3 are reported in
    `failures` (raising num_experiments shrinks that set).
    """
    for v in range(1, g.n):
        if edge_connectivity_at(g, 0, v, limit=3) < 3:
            raise GraphError(f"graph is not 3-edge-connected (cut below 3 at vertex {v})")

    d = diameter(g)
    p = 1.0 - 1.0 / (3.0 * d)
    p = min(max(p, 0.5), 1.0 - 1e-9)

    pools: dict[int, set[int]] = {eid: {eid} for eid in range(g.m)}
    all_cycles: list[Cycle] = []
    for i in range(num_experiments):
        rng = random.Random(seed * 69_069 + i)
        kept = [eid for eid in range(g.m) if rng.random() < p]
        for comp_eids, sub, order in _components(g, kept):
            if sub.n < 3:
                continue
            res = optimal_edge_cycle_cover(sub, seed * 50_021 + i)
            shortest: dict[int, Cycle] = {}
            for cyc in res.cover.cycles:
                real = Cycle(
                    tuple(comp_eids[e] for e in cyc.edges),
                    tuple(order[v] for v in cyc.vertices),
                )
                for eid in real.edges:
                    cur = shortest.get(eid)
                    if cur is None or real.length < cur.length:
                        shortest[eid] = real
            for eid, cyc in shortest.items():
                pools[eid].update(cyc.edges)
            uniq = {cyc.edges: cyc for cyc in shortest.values()}
            all_cycles.extend(uniq[k] for k in sorted(uniq))

    triples: dict[int, EdgeTriple] = {}
    failures: list[int] = []
    for eid, (u, v) in enumerate(g.edges):
        flow, paths = _max_flow_paths(g, pools[eid], u, v, 3)
        if flow < 3:
            failures.append(eid)
            continue
        paths.sort(key=len)
        if paths[0] != [eid]:
            # The direct edge is in the pool; normalize it to be a path.
            paths = [[eid]] + [p for p in paths if p != [eid]][:2]
        triples[eid] = EdgeTriple(eid, tuple(tuple(p) for p in paths[:3]))

    return DisjointCoverResult(
        triples, tuple(failures), CycleCover(tuple(all_cycles)), num_experiments, d
    )


def _components(g: Graph, kept_eids: list[int]):
    """Connected components of the sampled subgraph, as remapped graphs.

    Yields (orig_edge_ids, subgraph, orig_vertex_order) per component with
    at least one edge.
    """
    adj: dict[int, list[tuple[int, int]]] = {}
    for eid in kept_eids:
        u, v = g.edges[eid]
        adj.setdefault(u, []).append((v, eid))
        adj.setdefault(v, []).append((u, eid))
    seen: set[int] = set()
    for start in sorted(adj):
        if start in seen:
            continue
        comp = []
        q = deque([start])
        seen.add(start)
        while q:
            x = q.popleft()
            comp.append(x)
            for w, _ in adj[x]:
                if w not in seen:
                    seen.add(w)
                    q.append(w)
        order = sorted(comp)
        remap = {v: i for i, v in enumerate(order)}
        comp_set = set(comp)
        comp_eids = [
            eid for eid in kept_eids
            if g.edges[eid][0] in comp_set and g.edges[eid][1] in comp_set
        ]
        sub = Graph(
            len(order),
            [(remap[g.edges[e][0]], remap[g.edges[e][1]]) for e in comp_eids],
        )
        yield comp_eids, sub, order
