"""Consecutive post-order block partitions with bounded edge density.

Blocks group tree nodes by consecutive post-order numbers. The density of
a block with respect to an edge set E' counts edge endpoints inside the
block (an edge with both endpoints in the block contributes 2).
"""

from __future__ import annotations

from dataclasses import dataclass

from .graph import GraphError, RootedTree, tree_path

DEFAULT_DENSITY_BOUND = 16


@dataclass(frozen=True)
class BlockPartition:
    """Ordered vertex ranges by post-order number, with densities.

    ranges[i] = (lo, hi) covers post-order numbers lo..hi inclusive. The
    ranges are consecutive, disjoint, and cover [1, size].
    """

    ranges: tuple[tuple[int, int], ...]
    densities: tuple[int, ...]
    density_bound: int

    def __len__(self) -> int:
        return len(self.ranges)

    def block_of(self, number: int) -> int:
        """Block index containing a post-order number (binary search)."""
        lo, hi = 0, len(self.ranges) - 1
        while lo < hi:
            mid = (lo + hi) // 2
            if self.ranges[mid][1] < number:
                lo = mid + 1
            else:
                hi = mid
        return lo

    def block_size(self, i: int) -> int:
        lo, hi = self.ranges[i]
        return hi - lo + 1


def partition(t: RootedTree, eprime, b: int) -> BlockPartition:
    """Greedy post-order sweep grouping nodes while density stays <= b.

    eprime is an iterable of (u, v) endpoint pairs (edge IDs are not needed
    here; only endpoint incidence counts). Any block with density > b is a
    singleton, and the block count never exceeds max(1, ceil(4|E'|/b)).
    """
    if b < 1:
        raise GraphError("density bound must be >= 1")
    deg = {v: 0 for v in t.vertices()}
    count = 0
    for u, v in eprime:
        deg[u] += 1
        deg[v] += 1
        count += 1

    by_number = sorted(t.vertices(), key=lambda v: t.postorder[v])
    ranges: list[tuple[int, int]] = []
    densities: list[int] = []
    cur_lo = None
    cur_density = 0
    for v in by_number:
        num = t.postorder[v]
        if cur_lo is None:
            cur_lo = num
            cur_density = deg[v]
        elif cur_density + deg[v] <= b:
            cur_density += deg[v]
        else:
            ranges.append((cur_lo, num - 1))
            densities.append(cur_density)
            cur_lo = num
            cur_density = deg[v]
    ranges.append((cur_lo, t.size))
    densities.append(cur_density)

    part = BlockPartition(tuple(ranges), tuple(densities), b)
    _check_properties(part, count, b)
    return part


def _check_properties(part: BlockPartition, num_edges: int, b: int) -> None:
    for (lo, hi), d in zip(part.ranges, part.densities):
        if d > b and hi != lo:
            raise GraphError("block with density above the bound is not a singleton")
    # Pairing adjacent blocks shows the count is below 4|E'|/b + 1 always.
    limit = max(1, -(-4 * num_edges // b))
    if len(part.ranges) > limit:
        raise GraphError(
            f"{len(part.ranges)} blocks exceeds the 4|E'|/b bound of {limit}"
        )


def blocks_crossing(t: RootedTree, p: BlockPartition, tree_edge_child: int) -> int:
    """Number of blocks holding a pair u, v whose tree path uses the edge.

    The tree edge is identified by its child endpoint. A block crosses the
    edge (w, z), z the child, exactly when its post-order range straddles a
    boundary of [min_N(z), N(z)]; there are at most two such blocks.
    """
    lo, hi = t.subtree_range[tree_edge_child]
    crossing = 0
    for blo, bhi in p.ranges:
        inside = not (bhi < lo or blo > hi)
        outside = blo < lo or bhi > hi
        if inside and outside:
            crossing += 1
    return crossing


def blocks_crossing_by_pairs(t: RootedTree, p: BlockPartition, tree_edge_child: int) -> int:
    """Oracle recount of blocks_crossing by enumerating vertex pairs.

    Quadratic per block; used by tests to validate the range-based count.
    """
    by_number = {t.postorder[v]: v for v in t.vertices()}
    target = t.parent_edge[tree_edge_child]
    crossing = 0
    for blo, bhi in p.ranges:
        members = [by_number[i] for i in range(blo, bhi + 1)]
        found = False
        for i in range(len(members)):
            for j in range(i + 1, len(members)):
                if target in tree_path(t, members[i], members[j]):
                    found = True
                    break
            if found:
                break
        crossing += found
    return crossing
