"""Independent verification of cycle covers.

Everything here recounts from the raw edge list; none of the constructor
code paths are reused, so a shared bug cannot hide. The report carries
dilation, per-edge congestion, uncovered edges, and any malformed or
non-simple cycles.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass

from .graph import Cycle, CycleCover, Graph


@dataclass(frozen=True)
class CoverReport:
    dilation: int
    max_congestion: int
    congestion: dict[int, int]
    uncovered: tuple[int, ...]
    invalid_cycles: tuple[tuple[int, str], ...]
    non_simple_cycles: tuple[int, ...]

    @property
    def ok(self) -> bool:
        return not (self.uncovered or self.invalid_cycles or self.non_simple_cycles)

    def summary_lines(self) -> list[str]:
        lines = [
            f"cycles verified: dilation={self.dilation} congestion={self.max_congestion}",
            f"uncovered: {len(self.uncovered)}",
            f"invalid: {len(self.invalid_cycles)} non_simple: {len(self.non_simple_cycles)}",
        ]
        for eid in self.uncovered:
            lines.append(f"uncovered edge {eid}")
        for idx, why in self.invalid_cycles:
            lines.append(f"invalid cycle {idx}: {why}")
        for idx in self.non_simple_cycles:
            lines.append(f"non-simple cycle {idx}")
        return lines

    def as_dict(self) -> dict:
        return {
            "dilation": self.dilation,
            "max_congestion": self.max_congestion,
            "uncovered": list(self.uncovered),
            "invalid_cycles": [list(x) for x in self.invalid_cycles],
            "non_simple_cycles": list(self.non_simple_cycles),
            "ok": self.ok,
        }


def verify_cover(g: Graph, cover: CycleCover, expected: set[int]) -> CoverReport:
    """Recount every metric of `cover` against the raw graph.

    `expected` is the set of edge IDs that must appear in at least one
    cycle. Cycle validity means a closed walk of adjacent edges; cycles
    must be simple (no repeated vertex).
    """
    # Independent endpoint table straight from the edge list.
    ends = {eid: (u, v) for eid, (u, v) in enumerate(g.edges)}
    congestion: dict[int, int] = {}
    covered: set[int] = set()
    invalid: list[tuple[int, str]] = []
    non_simple: list[int] = []
    dilation = 0

    for idx, cyc in enumerate(cover.cycles):
        problem = _walk_problem(ends, cyc)
        if problem:
            invalid.append((idx, problem))
            continue
        dilation = max(dilation, len(cyc.edges))
        inner = cyc.vertices[:-1]
        if len(set(inner)) != len(inner):
            non_simple.append(idx)
        for eid in cyc.edges:
            congestion[eid] = congestion.get(eid, 0) + 1
            covered.add(eid)

    uncovered = tuple(sorted(expected - covered))
    max_cong = max(congestion.values(), default=0)
    return CoverReport(
        dilation,
        max_cong,
        congestion,
        uncovered,
        tuple(invalid),
        tuple(non_simple),
    )


def _walk_problem(ends, cyc: Cycle) -> str | None:
    if len(cyc.vertices) != len(cyc.edges) + 1:
        return "vertex/edge count mismatch"
    if not cyc.edges:
        return "empty cycle"
    if cyc.vertices[0] != cyc.vertices[-1]:
        return "walk is not closed"
    for i, eid in enumerate(cyc.edges):
        if eid not in ends:
            return f"unknown edge {eid}"
        a, b = ends[eid]
        if {a, b} != {cyc.vertices[i], cyc.vertices[i + 1]}:
            return f"edge {eid} does not join step {i}"
    return None


def shortest_cycle_through(g: Graph, eid: int) -> float:
    """Length of the shortest cycle containing the edge: BFS between its
    endpoints avoiding the edge itself, plus one. Bridges give inf."""
    u, v = g.edges[eid]
    dist = {u: 0}
    q = deque([u])
    while q:
        x = q.popleft()
        if x == v:
            return dist[x] + 1
        for w, f in g.adjacency[x]:
            if f != eid and w not in dist:
                dist[w] = dist[x] + 1
                q.append(w)
    return float("inf")


def edge_disjointness_check(paths) -> bool:
    """True iff the given edge-ID paths are pairwise edge-disjoint."""
    seen: set[int] = set()
    for path in paths:
        s = set(path)
        if len(s) != len(path):
            return False
        if s & seen:
            return False
        seen |= s
    return True
