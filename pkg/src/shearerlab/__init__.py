"""Exact workbench for Shearer's bound and its classical and quantum relatives."""

from .config import CapExceeded, Limits, limits
from .events import DiscreteEventSystem, Event, Variable, cut_events, event_prob, lopsidependency_check
from .gaps import element_transfer, generic_gap_bound, lattice_gap_table, path_transfer, tau, transfer_bound
from .graphs import BipartiteGraph, DependencyGraph, apply_reduction, base_graph, gap_decision, induced_subgraph
from .qlll import (
    SubspaceInstance, construct_boundary_instance, construct_spanning_instance, pad_dims, verify_span,
)
from .shearer import (
    boundary_scale, extremal_distribution, ind_poly, shearer_check, shearer_floor, symmetric_threshold,
)
from .trees import regular_tree, regular_tree_threshold, rooted_tree, tree_dim_recursion, tree_fixed_point

__version__ = "0.1.0"
