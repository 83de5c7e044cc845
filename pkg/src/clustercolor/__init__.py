"""Clustered coloring from tree-cut and tree decompositions."""

from .coloring import (ClusterReport, Coloring, ColoringError, clustering, complement_perfect_matching,
                       merge_across_cut, monochromatic_components, rebound_after_extra_edges, verify_clustering)
from .graph import Edge, EdgeCut, GraphError, Multigraph, components, degree, edge_cut, max_degree, min_edge_cut
from .lift import (ClaimViolation, ContractViolation, PreconditionError, ProviderRequest, StructureCertificate,
                   canonical_provider, color_from_certificate, color_via_small_cuts, derived_constants, lift,
                   lift_unit_bags, validate_certificate)
from .oracles import (CapExceeded, check_immersion_witness, find_clustered_coloring, gen_apex_blocker,
                      gen_layered_blocker, has_immersion, min_clustered_colors)
from .treecut import TreeCutDecomposition, adhesion_set, contract_bags, torso_at, validate_tcd
from .treedecomp import (TreeDecomposition, color_stable_extension, lift_from_bag_colorings,
                         lift_from_torso_colorings, simplify, to_tree_cut, validate_td)

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"
