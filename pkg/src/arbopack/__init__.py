"""Packing of reachability arborescences in mixed graphs.

Given a mixed graph (undirected edges plus directed arcs) and roots
r_1..r_k, decide whether there are k edge/arc-disjoint mixed
arborescences where tree i spans exactly the vertices reachable from
r_i, and construct either the packing or a bi-set family certificate
proving that none exists.
"""

from .bounds import Bounds, DEFAULT_BOUNDS
from .errors import ArbopackError, CapacityError, InvariantError, ParseError
from .graph_core import (
    Arc,
    CheckResult,
    DirectedView,
    Edge,
    MixedGraph,
    OK_RESULT,
    Orientation,
    Subpartition,
    ViewArc,
    apply_orientation,
    arcs_view,
    crossing_edge_count,
    entering_arcs,
    in_degree,
    induced,
    lexicographic_orientation,
    mixed_reachable_set,
    parse_mixed_graph,
)
from .decomposition import (
    AtomContext,
    AtomDecomposition,
    AuxiliaryGraph,
    BiSet,
    biset_in_degree,
    biset_intersection,
    biset_union,
    build_auxiliary,
    compute_atoms,
    in_family_F,
    in_Hj,
    is_consistent,
    lift_biset,
    membership_atoms,
    p_j_value,
    p_value,
)
from .orientation import (
    CoverRequirement,
    SubpartitionCertificate,
    check_cover,
    make_subpartition_certificate,
    orient_covering,
    subpartition_deficit,
)
from .packing import (
    Arborescence,
    DigraphPacking,
    pack_atom_branchings,
    pack_reachability,
    reachable_in_view,
    validate_digraph_packing,
    verify_cut_condition,
)
from .pipeline import (
    BiSetFamilyCertificate,
    EdgeUse,
    MixedPacking,
    MixedTree,
    brute_force_feasible,
    certificate_from_subpartition,
    check_spanning_packing_condition,
    covering_orientation,
    solve,
    validate_mixed_packing,
    verify_certificate,
)

__version__ = "0.1.0"

__all__ = [
    "Arc",
    "Arborescence",
    "ArbopackError",
    "AtomContext",
    "AtomDecomposition",
    "AuxiliaryGraph",
    "BiSet",
    "BiSetFamilyCertificate",
    "Bounds",
    "CapacityError",
    "CheckResult",
    "CoverRequirement",
    "DEFAULT_BOUNDS",
    "DigraphPacking",
    "DirectedView",
    "Edge",
    "EdgeUse",
    "InvariantError",
    "MixedGraph",
    "MixedPacking",
    "MixedTree",
    "OK_RESULT",
    "Orientation",
    "ParseError",
    "Subpartition",
    "SubpartitionCertificate",
    "ViewArc",
    "apply_orientation",
    "arcs_view",
    "biset_in_degree",
    "biset_intersection",
    "biset_union",
    "brute_force_feasible",
    "build_auxiliary",
    "certificate_from_subpartition",
    "check_cover",
    "check_spanning_packing_condition",
    "covering_orientation",
    "compute_atoms",
    "crossing_edge_count",
    "entering_arcs",
    "in_degree",
    "in_family_F",
    "in_Hj",
    "induced",
    "is_consistent",
    "lexicographic_orientation",
    "lift_biset",
    "make_subpartition_certificate",
    "membership_atoms",
    "mixed_reachable_set",
    "orient_covering",
    "p_j_value",
    "p_value",
    "pack_atom_branchings",
    "pack_reachability",
    "parse_mixed_graph",
    "reachable_in_view",
    "solve",
    "subpartition_deficit",
    "validate_digraph_packing",
    "validate_mixed_packing",
    "verify_certificate",
    "verify_cut_condition",
]
