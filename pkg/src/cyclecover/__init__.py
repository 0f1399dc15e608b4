"""Low-congestion cycle covers and resilient-routing simulation toolkit."""

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
    read_graph,
    swap_edges,
    tree_path,
    write_graph,
)
from .blocks import BlockPartition, blocks_crossing, partition
from .nontree import (
    CoverConstructionError,
    SuperGraph,
    find_short_cycle,
    non_tree_cover,
    simplify_cycles,
)
from .treecover import (
    GraphCoverResult,
    IndependentSet,
    SwapPath,
    build_conflict_graph,
    build_independent_set,
    edge_disjoint_path_matching,
    graph_cover,
    tree_cover,
)
from .neighborhood import NeighborhoodCover, neighborhood_cover
from .optimal import (
    OptimalCoverResult,
    opt_value,
    optimal_cycle_cover,
    optimal_edge_cycle_cover,
)
from .disjoint import (
    DisjointCoverResult,
    EdgeTriple,
    edge_connectivity_at,
    two_edge_disjoint_cover,
)
from .verify import (
    CoverReport,
    edge_disjointness_check,
    shortest_cycle_through,
    verify_cover,
)

__all__ = [name for name in dir() if not name.startswith("_")]
