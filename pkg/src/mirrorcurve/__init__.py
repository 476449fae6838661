"""Exact computations on both sides of mirror symmetry for trivalent graph curves.

Everything is exact over the rationals: Novikov elements are finite sums of
``c T^a`` with rational ``a`` and ``c``, truncated at ``T^Lambda``.
"""

from .novikov import (NovikovElement, NovikovMatrix, T, nov_add, nov_divide, nov_invert, nov_mul,
                      valuation_rank)
from .graph import (MobiusMap, ReducedPath, TrivalentGraph, enumerate_reduced_paths, k4_graph,
                    path_transport, theta_graph, validate_graph)
from .propagation import (K_coefficient, PropagationTable, check_propagation_identities,
                          closed_form_coefficient, expand_inverse_power)
from .hpl import Contraction, perturb_contraction, transfer_ainfinity, verify_ainfinity
from .floer import VBObject, build_cf_end_L0, cohomology_basis, local_mu2, restriction_to_edge
from .bside import AffinoidFunctionUe, AffinoidFunctionUv, multiply_uv, restrict_uv_to_ue
from .theta_canonical import (SHIPPED_CONVENTION, IntersectionPoint, PointObject,
                              canonical_aside, canonical_bside, compare_canonical,
                              theta_by_averaging, theta_by_hpl)

__all__ = [
    "NovikovElement", "NovikovMatrix", "T", "nov_add", "nov_divide", "nov_invert", "nov_mul",
    "valuation_rank",
    "MobiusMap", "ReducedPath", "TrivalentGraph", "enumerate_reduced_paths", "k4_graph",
    "path_transport", "theta_graph", "validate_graph",
    "K_coefficient", "PropagationTable", "check_propagation_identities",
    "closed_form_coefficient", "expand_inverse_power",
    "Contraction", "perturb_contraction", "transfer_ainfinity", "verify_ainfinity",
    "VBObject", "build_cf_end_L0", "cohomology_basis", "local_mu2", "restriction_to_edge",
    "AffinoidFunctionUe", "AffinoidFunctionUv", "multiply_uv", "restrict_uv_to_ue",
    "SHIPPED_CONVENTION", "IntersectionPoint", "PointObject", "canonical_aside",
    "canonical_bside", "compare_canonical", "theta_by_averaging", "theta_by_hpl",
]
