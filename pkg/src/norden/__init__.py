"""Left-invariant almost complex structures with Norden metric on Lie groups.

Structure constants, J and g on a left-invariant frame determine everything:
the Levi-Civita connection, the fundamental tensor F, the natural connection
with totally skew-symmetric torsion on quasi-Kähler manifolds, and the
curvature of each.  Scalars are exact rationals by default, float64 on request.
"""

from .algebra import APPROX, EXACT, Arithmetic, Tensor, contract, jform, tensor_equal
from .curvature import (
    CurvatureData,
    covariant_derivative,
    curvature_difference_residual,
    is_kahler_tensor,
    kahler_curvature_contraction_check,
    parallel_torsion_report,
    quadratic_bianchi_check,
    riemann,
)
from .family import FamilyParams, family_spec, golden_tables, propositions_report
from .levi_civita import classify, f_tensor, levi_civita, nabla_J, square_norm_nabla_j
from .lie import LieAlgebra, ManifoldSpec, NordenStructure, load_spec, spec_from_dict, validate
from .skew import build_bundle, build_q, skew_connection_report, uniqueness_oracle
from .torsion import hayden_q, natural_conditions_residual, project_torsion, torsion_of

__all__ = [
    "APPROX",
    "EXACT",
    "Arithmetic",
    "CurvatureData",
    "FamilyParams",
    "LieAlgebra",
    "ManifoldSpec",
    "NordenStructure",
    "Tensor",
    "build_bundle",
    "build_q",
    "classify",
    "contract",
    "covariant_derivative",
    "curvature_difference_residual",
    "f_tensor",
    "family_spec",
    "golden_tables",
    "hayden_q",
    "is_kahler_tensor",
    "jform",
    "kahler_curvature_contraction_check",
    "levi_civita",
    "load_spec",
    "nabla_J",
    "natural_conditions_residual",
    "parallel_torsion_report",
    "project_torsion",
    "propositions_report",
    "quadratic_bianchi_check",
    "riemann",
    "skew_connection_report",
    "spec_from_dict",
    "square_norm_nabla_j",
    "tensor_equal",
    "torsion_of",
    "uniqueness_oracle",
    "validate",
]
