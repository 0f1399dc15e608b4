"""Undirected graphs, rooted trees, cycles, and the shared tree primitives.

Vertices are integers 0..n-1. Edges carry dense integer IDs assigned in
construction order; all higher-level structures reference edges by ID.
Every value in this module is immutable after construction and safe to
share across threads.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field


class GraphError(ValueError):
    """Malformed graph input or an operation on an unsupported graph."""


class UncoverableEdgeError(GraphError):
    """An edge that no cycle can cover (a bridge) was required to be covered."""


class Graph:
    """Simple undirected graph with stable edge IDs.

    Edges are stored as (u, v) pairs with u < v; edge_id is the index into
    the edge list. Adjacency lists are sorted by neighbor vertex so every
    traversal in the package is deterministic.
    """

    __slots__ = ("n", "edges", "adjacency")

    def __init__(self, n: int, edge_pairs):
        if n < 1:
            raise GraphError("graph needs at least one vertex")
        edges = []
        seen = set()
        for u, v in edge_pairs:
            if not (0 <= u < n and 0 <= v < n):
                raise GraphError(f"edge ({u},{v}) out of range for n={n}")
            if u == v:
                raise GraphError(f"self-loop at vertex {u}")
            if u > v:
                u, v = v, u
            if (u, v) in seen:
                raise GraphError(f"duplicate edge ({u},{v})")
            seen.add((u, v))
            edges.append((u, v))
        adj: list[list[tuple[int, int]]] = [[] for _ in range(n)]
        for eid, (u, v) in enumerate(edges):
            adj[u].append((v, eid))
            adj[v].append((u, eid))
        for lst in adj:
            lst.sort()
        self.n = n
        self.edges = tuple(edges)
        self.adjacency = tuple(tuple(lst) for lst in adj)

    @property
    def m(self) -> int:
        return len(self.edges)

    def endpoints(self, eid: int) -> tuple[int, int]:
        return self.edges[eid]

    def other(self, eid: int, v: int) -> int:
        u, w = self.edges[eid]
        if v == u:
            return w
        if v == w:
            return u
        raise GraphError(f"vertex {v} not on edge {eid}")

    def neighbors(self, v: int):
        """Pairs (neighbor, edge_id), sorted by neighbor vertex."""
        return self.adjacency[v]

    def edge_id(self, u: int, v: int) -> int | None:
        for w, eid in self.adjacency[u]:
            if w == v:
                return eid
        return None

    def degree(self, v: int) -> int:
        return len(self.adjacency[v])

    def __repr__(self) -> str:
        return f"Graph(n={self.n}, m={self.m})"


def read_graph(text: str) -> Graph:
    """Parse the edge-list format: first line "n m", then m lines "u v".

    Lines starting with '#' are comments. Edge IDs follow file order.
    """
    lines = [ln.strip() for ln in text.splitlines()]
    rows = [ln for ln in lines if ln and not ln.startswith("#")]
    if not rows:
        raise GraphError("empty graph file")
    head = rows[0].split()
    if len(head) != 2:
        raise GraphError(f"bad header line: {rows[0]!r}")
    n, m = int(head[0]), int(head[1])
    if len(rows) - 1 != m:
        raise GraphError(f"header says {m} edges, file has {len(rows) - 1}")
    pairs = []
    for ln in rows[1:]:
        parts = ln.split()
        if len(parts) != 2:
            raise GraphError(f"bad edge line: {ln!r}")
        pairs.append((int(parts[0]), int(parts[1])))
    return Graph(n, pairs)


def write_graph(g: Graph) -> str:
    out = [f"{g.n} {g.m}"]
    out.extend(f"{u} {v}" for u, v in g.edges)
    return "\n".join(out) + "\n"


class RootedTree:
    """Rooted tree over a subset of a host graph's vertices.

    Stores parent pointers (vertex and edge ID), hop depth from the root,
    a post-order numbering N(v) in [1, size] with children visited in
    ascending vertex order, and per-vertex subtree ranges
    [min_N(z), max_N(z)]. max_N(z) == N(z) always holds.
    """

    __slots__ = (
        "root",
        "parent",
        "parent_edge",
        "children",
        "depth",
        "postorder",
        "subtree_range",
        "_vertices",
        "_tree_edges",
    )

    def __init__(self, root: int, parent: dict[int, int], parent_edge: dict[int, int]):
        if set(parent) != set(parent_edge):
            raise GraphError("parent and parent_edge key sets differ")
        if root in parent:
            raise GraphError("root must not have a parent")
        children: dict[int, list[int]] = {root: []}
        for v in parent:
            children.setdefault(v, [])
        for v, p in parent.items():
            if p not in children:
                raise GraphError(f"parent {p} of {v} is not a tree vertex")
            children[p].append(v)
        for lst in children.values():
            lst.sort()

        depth = {root: 0}
        order = []
        stack = [root]
        while stack:
            v = stack.pop()
            order.append(v)
            for c in children[v]:
                depth[c] = depth[v] + 1
                stack.append(c)
        if len(order) != len(children):
            raise GraphError("parent pointers do not form a tree rooted at root")

        postorder: dict[int, int] = {}
        counter = 0
        # Iterative post-order, children in ascending vertex ID.
        stack2: list[tuple[int, bool]] = [(root, False)]
        while stack2:
            v, expanded = stack2.pop()
            if expanded:
                counter += 1
                postorder[v] = counter
            else:
                stack2.append((v, True))
                for c in reversed(children[v]):
                    stack2.append((c, False))

        subtree_range: dict[int, tuple[int, int]] = {}
        for v in sorted(children, key=lambda x: postorder[x]):
            lo = postorder[v]
            for c in children[v]:
                lo = min(lo, subtree_range[c][0])
            subtree_range[v] = (lo, postorder[v])

        self.root = root
        self.parent = dict(parent)
        self.parent_edge = dict(parent_edge)
        self.children = {v: tuple(cs) for v, cs in children.items()}
        self.depth = depth
        self.postorder = postorder
        self.subtree_range = subtree_range
        self._vertices = tuple(sorted(children))
        self._tree_edges = frozenset(parent_edge.values())

    @property
    def size(self) -> int:
        return len(self._vertices)

    def vertices(self) -> tuple[int, ...]:
        return self._vertices

    def tree_edge_ids(self) -> frozenset[int]:
        return self._tree_edges

    def height(self) -> int:
        return max(self.depth.values())

    def has_vertex(self, v: int) -> bool:
        return v in self.depth

    def in_subtree(self, z: int, u: int) -> bool:
        """True iff u lies in the subtree rooted at z (via post-order ranges)."""
        lo, hi = self.subtree_range[z]
        return lo <= self.postorder[u] <= hi

    def lca(self, u: int, v: int) -> int:
        du, dv = self.depth[u], self.depth[v]
        while du > dv:
            u = self.parent[u]
            du -= 1
        while dv > du:
            v = self.parent[v]
            dv -= 1
        while u != v:
            u = self.parent[u]
            v = self.parent[v]
        return u

    def path_up(self, v: int, ancestor: int) -> list[int]:
        """Edge IDs from v up to (excluding) ancestor."""
        out = []
        while v != ancestor:
            out.append(self.parent_edge[v])
            v = self.parent[v]
        return out

    def __repr__(self) -> str:
        return f"RootedTree(root={self.root}, size={self.size})"


def bfs_tree(g: Graph, root: int) -> RootedTree:
    """BFS tree of a connected graph; depth(v) equals dist(root, v).

    Children are attached in ascending vertex order (the adjacency lists
    are sorted), which fixes the post-order numbering.
    """
    parent: dict[int, int] = {}
    parent_edge: dict[int, int] = {}
    seen = {root}
    q = deque([root])
    while q:
        v = q.popleft()
        for w, eid in g.adjacency[v]:
            if w not in seen:
                seen.add(w)
                parent[w] = v
                parent_edge[w] = eid
                q.append(w)
    if len(seen) != g.n:
        missing = min(set(range(g.n)) - seen)
        raise GraphError(f"graph is disconnected: vertex {missing} unreachable from {root}")
    return RootedTree(root, parent, parent_edge)


def tree_path(t: RootedTree, u: int, v: int) -> list[int]:
    """Edge IDs along the unique tree path u -> LCA -> v; [] when u == v."""
    if u == v:
        return []
    a = t.lca(u, v)
    up = t.path_up(u, a)
    down = t.path_up(v, a)
    down.reverse()
    return up + down


def path_vertices(g: Graph, start: int, edge_ids: list[int]) -> list[int]:
    """Vertex sequence of a walk given its start vertex and edge IDs."""
    seq = [start]
    cur = start
    for eid in edge_ids:
        cur = g.other(eid, cur)
        seq.append(cur)
    return seq


def bridges(g: Graph) -> set[int]:
    """Edge IDs whose removal disconnects g (iterative low-link DFS)."""
    disc = [-1] * g.n
    low = [0] * g.n
    out: set[int] = set()
    timer = 0
    for start in range(g.n):
        if disc[start] != -1:
            continue
        stack: list[tuple[int, int, int]] = [(start, -1, 0)]
        while stack:
            v, pe, idx = stack.pop()
            if idx == 0:
                disc[v] = low[v] = timer
                timer += 1
            if idx < len(g.adjacency[v]):
                stack.append((v, pe, idx + 1))
                w, eid = g.adjacency[v][idx]
                if eid == pe:
                    continue
                if disc[w] == -1:
                    stack.append((w, eid, 0))
                else:
                    low[v] = min(low[v], disc[w])
            else:
                if pe != -1:
                    u, w = g.edges[pe]
                    p = u if disc[u] < disc[w] else w
                    c = v
                    low[p] = min(low[p], low[c])
                    if low[c] > disc[p]:
                        out.add(pe)
    return out


@dataclass(frozen=True)
class SwapEdge:
    """Non-tree edge restoring connectivity of T minus one tree edge.

    For tree edge (p(v), v): `inside` is the endpoint in T(v), `outside`
    is s(v).
    """

    edge_id: int
    inside: int
    outside: int


def swap_edges(g: Graph, t: RootedTree) -> dict[int, SwapEdge]:
    """Swap edge per coverable tree edge, keyed by the child vertex v.

    The swap of (p(v), v) is the lowest-ID non-tree edge with exactly one
    endpoint in T(v). Tree edges absent from the result are bridges.
    """
    tree_eids = t.tree_edge_ids()
    swaps: dict[int, SwapEdge] = {}
    remaining = t.size - 1 - len(swaps)
    for eid in range(g.m):
        if eid in tree_eids:
            continue
        a, b = g.edges[eid]
        if not (t.has_vertex(a) and t.has_vertex(b)):
            continue
        anc = t.lca(a, b)
        for inside, outside in ((a, b), (b, a)):
            x = inside
            while x != anc:
                if x not in swaps:
                    swaps[x] = SwapEdge(eid, inside, outside)
                    remaining -= 1
                x = t.parent[x]
        if remaining == 0:
            break
    return swaps


def balanced_tree_split(t: RootedTree) -> tuple[RootedTree, RootedTree]:
    """Split a tree into edge-disjoint halves of at most ceil(2N/3) vertices.

    The split vertex is found by descending along heavy subtrees, scanning
    children in ascending vertex order. Both halves keep the layering of t:
    the root of each half is its vertex closest to t's root.
    """
    n = t.size
    if n < 2:
        raise GraphError("cannot split a singleton tree")
    weight = {v: 1 for v in t.vertices()}
    for v in sorted(t.vertices(), key=lambda x: -t.depth[x]):
        if v != t.root:
            weight[t.parent[v]] += weight[v]

    lo = n // 3 + 1
    hi = -(-2 * n // 3)  # ceil(2n/3)

    v = t.root
    split_at = None
    while True:
        descend = None
        for c in t.children[v]:
            if weight[c] >= lo:
                if weight[c] <= hi:
                    split_at = c
                else:
                    descend = c
                break
        if split_at is not None or descend is None:
            break
        v = descend

    if split_at is not None:
        inside = {u for u in t.vertices() if t.in_subtree(split_at, u)}
        t1 = _subtree_of(t, split_at, inside)
        t2_vertices = (set(t.vertices()) - inside) | {split_at}
        t2 = _subtree_of(t, t.root, t2_vertices)
    else:
        # All children lighter than the window: take a prefix of child
        # subtrees whose total weight reaches ceil(n/3).
        need = -(-n // 3)
        acc = 0
        taken = []
        for c in t.children[v]:
            taken.append(c)
            acc += weight[c]
            if acc >= need:
                break
        inside = {v}
        for c in taken:
            inside.update(u for u in t.vertices() if t.in_subtree(c, u))
        t1 = _subtree_of(t, v, inside)
        t2_vertices = (set(t.vertices()) - inside) | {v}
        t2 = _subtree_of(t, t.root, t2_vertices)

    if max(t1.size, t2.size) > hi:
        raise GraphError("tree split exceeded the 2/3 size bound")
    return t1, t2


def _subtree_of(t: RootedTree, root: int, vertices: set[int]) -> RootedTree:
    parent = {}
    parent_edge = {}
    for v in vertices:
        if v == root:
            continue
        p = t.parent[v]
        if p in vertices and v != root:
            parent[v] = p
            parent_edge[v] = t.parent_edge[v]
    return RootedTree(root, parent, parent_edge)


@dataclass(frozen=True)
class Cycle:
    """Closed edge walk. vertices has one more entry than edges and the
    first and last vertex coincide."""

    edges: tuple[int, ...]
    vertices: tuple[int, ...]

    def __post_init__(self):
        if len(self.vertices) != len(self.edges) + 1:
            raise GraphError("cycle vertex sequence must have len(edges)+1 entries")
        if self.vertices[0] != self.vertices[-1]:
            raise GraphError("cycle must be closed")

    @property
    def length(self) -> int:
        return len(self.edges)

    def is_simple(self) -> bool:
        inner = self.vertices[:-1]
        return len(set(inner)) == len(inner)

    def validate(self, g: Graph) -> None:
        for i, eid in enumerate(self.edges):
            a, b = g.edges[eid]
            if {a, b} != {self.vertices[i], self.vertices[i + 1]}:
                raise GraphError(f"edge {eid} does not match vertices at position {i}")


def cycle_from_edges(g: Graph, start: int, edge_ids: list[int]) -> Cycle:
    verts = path_vertices(g, start, edge_ids)
    if verts[-1] != start:
        raise GraphError("edge walk is not closed")
    return Cycle(tuple(edge_ids), tuple(verts))


@dataclass(frozen=True)
class CycleCover:
    """A collection of cycles with a per-edge multiplicity index."""

    cycles: tuple[Cycle, ...]
    per_edge_index: dict[int, list[tuple[int, int]]] = field(compare=False, default=None)

    def __post_init__(self):
        index: dict[int, list[tuple[int, int]]] = {}
        for ci, cyc in enumerate(self.cycles):
            counts: dict[int, int] = {}
            for eid in cyc.edges:
                counts[eid] = counts.get(eid, 0) + 1
            for eid, k in counts.items():
                index.setdefault(eid, []).append((ci, k))
        object.__setattr__(self, "per_edge_index", index)

    def dilation(self) -> int:
        return max((c.length for c in self.cycles), default=0)

    def congestion(self, eid: int) -> int:
        return sum(k for _, k in self.per_edge_index.get(eid, ()))

    def max_congestion(self) -> int:
        return max(
            (sum(k for _, k in lst) for lst in self.per_edge_index.values()), default=0
        )

    def covered_edges(self) -> set[int]:
        return set(self.per_edge_index)

    def covers(self, eid: int) -> bool:
        return eid in self.per_edge_index

    def min_cycle_length_through(self, eid: int) -> int | None:
        lst = self.per_edge_index.get(eid)
        if not lst:
            return None
        return min(self.cycles[ci].length for ci, _ in lst)

    def __len__(self) -> int:
        return len(self.cycles)
