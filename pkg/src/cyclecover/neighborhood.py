"""Neighborhood covers via ball carving with exponential radii.

Each phase draws a radius r_u ~ Exp(beta) per vertex and forms the cluster
S_u = {w : r_u - dist(w, u) >= m(w) - 1} where m(w) is the best margin any
center achieves at w. Phases repeat until every vertex's t-ball lies
inside some cluster; that containment is checked directly rather than
argued probabilistically.
"""

from __future__ import annotations

import math
import random
from collections import deque
from dataclasses import dataclass

from .graph import Graph, GraphError


class NeighborhoodCoverError(GraphError):
    """Ball containment was not reached within the phase cap."""


@dataclass(frozen=True)
class NeighborhoodCover:
    """Clusters covering every vertex's t-ball, with measured overlap."""

    clusters: tuple[frozenset[int], ...]
    radius: int
    stretch: int
    overlap: int

    def clusters_containing(self, v: int) -> list[int]:
        return [i for i, s in enumerate(self.clusters) if v in s]


def _bfs_distances(g: Graph, src: int) -> list[int]:
    dist = [-1] * g.n
    dist[src] = 0
    q = deque([src])
    while q:
        v = q.popleft()
        for w, _ in g.adjacency[v]:
            if dist[w] == -1:
                dist[w] = dist[v] + 1
                q.append(w)
    return dist


def neighborhood_cover(
    g: Graph,
    t: int,
    rng_seed: int,
    *,
    stretch: int | None = None,
    center_scale: float = 4.0,
) -> NeighborhoodCover:
    """Clusters such that every vertex's t-ball fits inside one of them.

    stretch is the k in the radius parameter beta = ln(c n) / (3 k t);
    the default 2 ceil(log2 n) follows the probabilistic analysis, smaller
    values give tighter clusters at the cost of more phases. Each cluster
    induces a connected subgraph. Deterministic under a fixed seed.
    """
    if t < 1:
        raise GraphError("radius t must be >= 1")
    n = g.n
    if n == 1:
        return NeighborhoodCover((frozenset({0}),), t, 1, 1)
    k = stretch if stretch is not None else max(1, 2 * math.ceil(math.log2(n)))
    beta = math.log(center_scale * n) / (3.0 * k * t)

    dist = [_bfs_distances(g, v) for v in range(n)]
    balls = [frozenset(w for w in range(n) if 0 <= dist[v][w] <= t) for v in range(n)]

    clusters: list[frozenset[int]] = []
    uncovered = set(range(n))
    cap = 8 * max(1, math.ceil(math.log2(n)))
    for phase in range(1, cap + 1):
        rng = random.Random(rng_seed * 1_000_003 + phase)
        radii = [rng.expovariate(beta) for _ in range(n)]
        margins = [[radii[u] - dist[u][w] for w in range(n)] for u in range(n)]
        best = [max(margins[u][w] for u in range(n)) for w in range(n)]
        phase_clusters = []
        for u in range(n):
            s = frozenset(w for w in range(n) if margins[u][w] >= best[w] - 1.0)
            if s:
                phase_clusters.append(s)
        clusters.extend(phase_clusters)
        for v in list(uncovered):
            if any(balls[v] <= s for s in phase_clusters):
                uncovered.discard(v)
        if not uncovered:
            break
    else:
        raise NeighborhoodCoverError(
            f"{len(uncovered)} vertices still uncovered after {cap} phases "
            f"(t={t}, k={k}, n={n})"
        )

    overlap = max(sum(1 for s in clusters if v in s) for v in range(n))
    return NeighborhoodCover(tuple(clusters), t, k, overlap)
