"""Positive-equilibrium parametrization of mass-action reaction networks.

Pipeline: parse -> finest independent decomposition -> flux-mode-based
translation of each block to weakly reversible deficiency-zero form ->
merge -> tree-constant parametrization -> numeric verification. All the
structural computations use exact rational arithmetic.
"""

from .analysis import AcrReport, VerificationReport, detect_acr, timing_report, verify_equilibrium
from .decompose import Decomposition, finest_independent_decomposition, merge_subnetworks, verify_independence
from .efm import FluxModeSet, Ray, compute_efms, efm_properties
from .network import (
    NetworkSyntaxError,
    Reaction,
    ReactionNetwork,
    Species,
    StructuralSummary,
    conservation_laws,
    ode_rhs,
    parse_network,
    serialize_network,
    stoichiometric_matrix,
    structural_summary,
)
from .parametrize import (
    EquilibriumParametrization,
    ParametrizationError,
    SymbolicPowerProduct,
    express_in_species,
    kinetic_difference_matrix,
    parametrize_equilibria,
    spanning_forest,
    tree_constants,
)
from .poly import Polynomial
from .ratlinalg import Inconsistency, RationalMatrix, solve_consistent
from .translate import (
    Gcrn,
    GcrnSummary,
    ReactionGraph,
    TranslationError,
    build_gcrn,
    build_reaction_graph,
    compatibility_check,
    gcrn_summary,
    translation_complexes,
)

__version__ = "0.1.0"

__all__ = [
    "AcrReport",
    "Decomposition",
    "EquilibriumParametrization",
    "FluxModeSet",
    "Gcrn",
    "GcrnSummary",
    "Inconsistency",
    "NetworkSyntaxError",
    "ParametrizationError",
    "Polynomial",
    "RationalMatrix",
    "Ray",
    "Reaction",
    "ReactionGraph",
    "ReactionNetwork",
    "Species",
    "StructuralSummary",
    "SymbolicPowerProduct",
    "TranslationError",
    "VerificationReport",
    "build_gcrn",
    "build_reaction_graph",
    "compatibility_check",
    "compute_efms",
    "conservation_laws",
    "detect_acr",
    "efm_properties",
    "express_in_species",
    "finest_independent_decomposition",
    "gcrn_summary",
    "kinetic_difference_matrix",
    "merge_subnetworks",
    "ode_rhs",
    "parametrize_equilibria",
    "parse_network",
    "serialize_network",
    "solve_consistent",
    "spanning_forest",
    "stoichiometric_matrix",
    "structural_summary",
    "timing_report",
    "translation_complexes",
    "tree_constants",
    "verify_equilibrium",
    "verify_independence",
]
