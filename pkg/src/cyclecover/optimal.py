"""Universally optimal covers: per-edge shortest-cycle values and the
neighborhood-cover composition.

opt_value computes |C_e| (one plus the endpoint distance avoiding e) per
edge and OPT = max over non-bridge edges. The optimal constructions carve
the graph into clusters whose diameter matches the target scale, run the
existential cover inside every cluster, and take the union; an edge whose
shortest cycle fits in a cluster is covered there.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass

from .graph import Cycle, CycleCover, Graph, GraphError
from .neighborhood import NeighborhoodCover, neighborhood_cover
from .treecover import graph_cover


def _dist_avoiding(g: Graph, src: int, dst: int, banned_eid: int) -> int | None:
    dist = {src: 0}
    q = deque([src])
    while q:
        v = q.popleft()
        if v == dst:
            return dist[v]
        for w, eid in g.adjacency[v]:
            if eid != banned_eid and w not in dist:
                dist[w] = dist[v] + 1
                q.append(w)
    return None


@dataclass(frozen=True)
class OptValues:
    """Per-edge shortest covering-cycle length; None marks a bridge."""

    per_edge: tuple[int | None, ...]

    @property
    def opt(self) -> int | None:
        finite = [x for x in self.per_edge if x is not None]
        return max(finite) if finite else None

    def bridges(self) -> set[int]:
        return {eid for eid, x in enumerate(self.per_edge) if x is None}


def opt_value(g: Graph) -> OptValues:
    """|C_e| = 1 + dist(u, v, G minus e) per edge; infinite for bridges."""
    vals: list[int | None] = []
    for eid, (u, v) in enumerate(g.edges):
        d = _dist_avoiding(g, u, v, eid)
        vals.append(None if d is None else d + 1)
    return OptValues(tuple(vals))


@dataclass(frozen=True)
class ClusterRun:
    """One cluster's contribution to a composed cover."""

    vertices: tuple[int, ...]
    cycles: tuple[Cycle, ...]


@dataclass(frozen=True)
class OptimalCoverResult:
    cover: CycleCover
    bridges: frozenset[int]
    opt: int | None
    scales: tuple[int, ...]
    cluster_overlap: int


def _induced_subgraph(g: Graph, vertices: frozenset[int]):
    order = sorted(vertices)
    remap = {v: i for i, v in enumerate(order)}
    eids = [
        eid
        for eid, (u, v) in enumerate(g.edges)
        if u in vertices and v in vertices
    ]
    sub = Graph(len(order), [(remap[g.edges[e][0]], remap[g.edges[e][1]]) for e in eids])
    return sub, order, eids


def _cover_in_clusters(g: Graph, nc: NeighborhoodCover) -> list[Cycle]:
    cycles: list[Cycle] = []
    for cluster in nc.clusters:
        if len(cluster) < 3:
            continue
        sub, order, eids = _induced_subgraph(g, cluster)
        result = graph_cover(sub)
        for cyc in result.cover.cycles:
            edges = tuple(eids[e] for e in cyc.edges)
            verts = tuple(order[v] for v in cyc.vertices)
            cycles.append(Cycle(edges, verts))
    return cycles


def optimal_cycle_cover(
    g: Graph,
    seed: int,
    *,
    stretch: int | None = None,
    center_scale: float = 4.0,
) -> OptimalCoverResult:
    """Cover at the global scale OPT(G): one neighborhood cover at radius
    OPT, the existential cover inside each cluster, union of the results.

    Every non-bridge edge lies on a cycle of length <= OPT, that cycle
    fits inside some cluster, and the per-cluster construction is nice, so
    coverage is structural. Per-edge congestion multiplies by at most the
    cluster overlap.
    """
    vals = opt_value(g)
    opt = vals.opt
    if opt is None:
        return OptimalCoverResult(
            CycleCover(()), frozenset(vals.bridges()), None, (), 0
        )
    nc = neighborhood_cover(g, opt, seed, stretch=stretch, center_scale=center_scale)
    cycles = _cover_in_clusters(g, nc)
    cover = CycleCover(tuple(cycles))
    uncovered = set(range(g.m)) - cover.covered_edges() - vals.bridges()
    if uncovered:
        raise GraphError(f"optimal cover missed non-bridge edges {uncovered}")
    return OptimalCoverResult(
        cover, frozenset(vals.bridges()), opt, (opt,), nc.overlap
    )


def optimal_edge_cycle_cover(
    g: Graph,
    seed: int,
    *,
    stretch: int | None = None,
    center_scale: float = 4.0,
    scales: tuple[int, ...] | None = None,
) -> OptimalCoverResult:
    """Cover each edge at (roughly) its own scale.

    Runs the cluster composition at radii 4, 8, ..., up to the first power
    of two at or above OPT(G); an edge with |C_e| <= 2^i is covered at
    scale 2^i by a cycle whose length reflects that scale, not OPT. The
    smallest scale is 4 since girth is at least 3.
    """
    vals = opt_value(g)
    opt = vals.opt
    if opt is None:
        return OptimalCoverResult(
            CycleCover(()), frozenset(vals.bridges()), None, (), 0
        )
    if scales is None:
        top = max(2, math.ceil(math.log2(opt)))
        scales = tuple(2**i for i in range(2, top + 1))
    cycles: list[Cycle] = []
    overlap = 0
    for idx, scale in enumerate(scales):
        nc = neighborhood_cover(
            g, scale, seed * 977 + idx, stretch=stretch, center_scale=center_scale
        )
        overlap = max(overlap, nc.overlap)
        cycles.extend(_cover_in_clusters(g, nc))
    cover = CycleCover(tuple(cycles))
    uncovered = set(range(g.m)) - cover.covered_edges() - vals.bridges()
    if uncovered:
        raise GraphError(f"per-edge optimal cover missed edges {uncovered}")
    return OptimalCoverResult(
        cover, frozenset(vals.bridges()), opt, tuple(scales), overlap
    )


def per_edge_achieved(g: Graph, cover: CycleCover) -> dict[int, int]:
    """Shortest output-cycle length through every covered edge."""
    out = {}
    for eid in cover.covered_edges():
        out[eid] = cover.min_cycle_length_through(eid)
    return out
