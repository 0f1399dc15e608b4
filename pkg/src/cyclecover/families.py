"""Deterministic graph generators used by the CLI bench and the tests."""

from __future__ import annotations

import random

from .graph import Graph, GraphError


def cycle_graph(n: int) -> Graph:
    if n < 3:
        raise GraphError("cycle needs n >= 3")
    return Graph(n, [(i, (i + 1) % n) for i in range(n)])


def path_graph(n: int) -> Graph:
    return Graph(n, [(i, i + 1) for i in range(n - 1)])


def complete_graph(n: int) -> Graph:
    return Graph(n, [(i, j) for i in range(n) for j in range(i + 1, n)])


def grid_graph(rows: int, cols: int) -> Graph:
    def vid(r, c):
        return r * cols + c

    edges = []
    for r in range(rows):
        for c in range(cols):
            if c + 1 < cols:
                edges.append((vid(r, c), vid(r, c + 1)))
            if r + 1 < rows:
                edges.append((vid(r, c), vid(r + 1, c)))
    return Graph(rows * cols, edges)


def petersen_graph() -> Graph:
    outer = [(i, (i + 1) % 5) for i in range(5)]
    spokes = [(i, i + 5) for i in range(5)]
    inner = [(5 + i, 5 + (i + 2) % 5) for i in range(5)]
    return Graph(10, outer + spokes + inner)


def flower_graph(k: int, petal_len: int = 0) -> Graph:
    """Hub with k triangles; optionally one long triangulated petal.

    The petal is a hub-to-hub path of `petal_len` edges with an apex
    vertex on every path edge, so the graph stays bridgeless and every
    petal edge lies on a triangle while the diameter grows with the petal.
    """
    if k < 1:
        raise GraphError("flower needs k >= 1")
    edges = []
    nxt = 1
    for _ in range(k):
        a, b = nxt, nxt + 1
        nxt += 2
        edges += [(0, a), (0, b), (a, b)]
    if petal_len >= 2:
        path = [0] + list(range(nxt, nxt + petal_len - 1)) + [0]
        nxt += petal_len - 1
        for i in range(petal_len):
            u, v = path[i], path[i + 1]
            apex = nxt
            nxt += 1
            edges += [(u, v), (u, apex), (v, apex)]
    return Graph(nxt, edges)


def erdos_renyi(n: int, p: float, seed: int) -> Graph:
    rng = random.Random(seed)
    edges = [
        (i, j) for i in range(n) for j in range(i + 1, n) if rng.random() < p
    ]
    return Graph(n, edges)


def random_connected(n: int, extra_edges: int, seed: int) -> Graph:
    """Random spanning tree plus extra random edges."""
    rng = random.Random(seed)
    edges = set()
    order = list(range(n))
    rng.shuffle(order)
    for i in range(1, n):
        j = rng.randrange(i)
        u, v = order[i], order[j]
        edges.add((min(u, v), max(u, v)))
    while len(edges) < min(n - 1 + extra_edges, n * (n - 1) // 2):
        u = rng.randrange(n)
        v = rng.randrange(n)
        if u != v:
            edges.add((min(u, v), max(u, v)))
    return Graph(n, sorted(edges))


def random_two_edge_connected(n: int, extra_edges: int, seed: int) -> Graph:
    """Random Hamiltonian cycle plus extra chords; always bridgeless."""
    rng = random.Random(seed)
    order = list(range(n))
    rng.shuffle(order)
    edges = set()
    for i in range(n):
        u, v = order[i], order[(i + 1) % n]
        edges.add((min(u, v), max(u, v)))
    attempts = 0
    target = min(n + extra_edges, n * (n - 1) // 2)
    while len(edges) < target and attempts < 50 * (extra_edges + 1):
        attempts += 1
        u = rng.randrange(n)
        v = rng.randrange(n)
        if u != v:
            edges.add((min(u, v), max(u, v)))
    return Graph(n, sorted(edges))


def random_three_edge_connected(n: int, seed: int, *, extra: int | None = None) -> Graph:
    """Hamiltonian cycle plus chords, retried until 3-edge-connected."""
    from .disjoint import edge_connectivity_at

    if n < 4:
        raise GraphError("need n >= 4")
    want_extra = extra if extra is not None else n
    for attempt in range(200):
        g = random_two_edge_connected(n, want_extra, seed * 613 + attempt)
        if min(g.degree(v) for v in range(g.n)) < 3:
            continue
        if all(edge_connectivity_at(g, 0, v, limit=3) >= 3 for v in range(1, n)):
            return g
    raise GraphError("could not generate a 3-edge-connected graph")


def random_tree(n: int, seed: int) -> Graph:
    return random_connected(n, 0, seed)
