"""Differentially private all-pairs shortest distances for low tree-width graphs."""

from .generators import InstanceBundle, generate_partial_ktree
from .graphs import (
    DistanceMatrix,
    Path,
    WeightedGraph,
    components_after_removal,
    exact_apsd,
    k_hop_apsd,
    l1_weight_distance,
)
from .mechanism import (
    LaplaceSampler,
    MechanismOutput,
    PreparedMechanism,
    PrivacyParams,
    anchor_hop_budget,
    full_hop_budget,
    input_perturbation_apsd,
    laplace_sample,
    output_perturbation_apsd,
    prepare_mechanism,
    private_apsd,
    theoretical_error_bound,
)
from .shortcut import (
    CallTrace,
    IntermediateGraph,
    SensitivityAccount,
    ShortcutList,
    compute_edges,
    construct_graph,
    sensitivity_bound,
)
from .treedec import (
    DecompositionError,
    TreeDecomposition,
    ValidationReport,
    find_separator_bag,
    heuristic_decomposition,
    reduce_decomposition,
    validate_decomposition,
)

__version__ = "0.1.0"

__all__ = [
    "CallTrace",
    "DecompositionError",
    "DistanceMatrix",
    "InstanceBundle",
    "IntermediateGraph",
    "LaplaceSampler",
    "MechanismOutput",
    "Path",
    "PreparedMechanism",
    "PrivacyParams",
    "SensitivityAccount",
    "ShortcutList",
    "TreeDecomposition",
    "ValidationReport",
    "WeightedGraph",
    "anchor_hop_budget",
    "components_after_removal",
    "compute_edges",
    "construct_graph",
    "exact_apsd",
    "find_separator_bag",
    "full_hop_budget",
    "generate_partial_ktree",
    "heuristic_decomposition",
    "input_perturbation_apsd",
    "k_hop_apsd",
    "l1_weight_distance",
    "laplace_sample",
    "output_perturbation_apsd",
    "prepare_mechanism",
    "private_apsd",
    "reduce_decomposition",
    "sensitivity_bound",
    "theoretical_error_bound",
    "validate_decomposition",
]
