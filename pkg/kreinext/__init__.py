"""kreinext: positive selfadjoint extensions of a positive partial operator.

Every extension is reached through the Cayley transform of its
contraction, parametrized by a selfadjoint contraction Gamma on a
defect space. The Krein (Gamma = I) and Friedrichs (Gamma = -I)
extensions bound the whole family.
"""

from .services.cayley import (
    PartialOperator,
    SelfadjointRelation,
    cayley_transform,
    inverse_cayley,
    inverse_cayley_partial,
    relation_resolvent,
    relation_spectrum,
    shift_lower_bound,
)
from .services.contraction import ColContraction, CornerData, RowContraction, complete_corner, extract_gammas
from .services.extensions import (
    ExtensionOrder,
    ExtensionParametrization,
    ExtremalKind,
    GammaParameter,
    MembershipRoute,
    compare_extensions,
    domain_decomposition,
    extend_contraction,
    extension_relation,
    extremal,
    extremal_relation,
    form_agrees,
    is_extension_member,
    parametrize,
    recover_gamma,
)
from .server import KreinExtMCPServer  # re-export for convenience
from .shared import DEFAULT_TOLERANCE, TOLERANCE_PROFILES, KreinExtError, Tolerance

__all__ = [
    "ColContraction",
    "CornerData",
    "DEFAULT_TOLERANCE",
    "ExtensionOrder",
    "ExtensionParametrization",
    "ExtremalKind",
    "GammaParameter",
    "KreinExtError",
    "KreinExtMCPServer",
    "MembershipRoute",
    "PartialOperator",
    "RowContraction",
    "SelfadjointRelation",
    "TOLERANCE_PROFILES",
    "Tolerance",
    "cayley_transform",
    "compare_extensions",
    "complete_corner",
    "domain_decomposition",
    "extend_contraction",
    "extension_relation",
    "extract_gammas",
    "extremal",
    "extremal_relation",
    "form_agrees",
    "inverse_cayley",
    "inverse_cayley_partial",
    "is_extension_member",
    "parametrize",
    "recover_gamma",
    "relation_resolvent",
    "relation_spectrum",
    "shift_lower_bound",
]
