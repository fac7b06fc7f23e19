"""Command-level JSON reports shared by the CLI and the MCP tools.

Every builder returns a plain dict ready for `dumps`; matrices use the
[re, im] pair encoding from `kreinext.shared`.
"""

from __future__ import annotations

import json
import logging
import math
from typing import Any, Dict, Iterable, Optional

import numpy as np

from ..shared import (
    DEFAULT_TOLERANCE,
    InvariantViolation,
    KreinExtError,
    MalformedInputError,
    Tolerance,
    encode_matrix,
    encode_reals,
)
from .cayley import PartialOperator, SelfadjointRelation, cayley_transform, relation_spectrum
from .discretization import demo_report, minimal_laplacian
from .extensions import (
    ExtensionParametrization,
    GammaParameter,
    MembershipRoute,
    compare_extensions,
    domain_decomposition,
    extend_contraction,
    extension_relation,
    is_extension_member,
    parametrize,
)
from .linalg import Subspace
from .oracle import VerificationReport, run_all

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_MALFORMED = 1
EXIT_INVARIANT = 2
EXIT_VERIFICATION = 3


def _finite_or_none(obj: Any) -> Any:
    if isinstance(obj, float) and not math.isfinite(obj):
        return None
    if isinstance(obj, dict):
        return {key: _finite_or_none(value) for key, value in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_finite_or_none(value) for value in obj]
    return obj


def dumps(payload: Dict[str, Any]) -> str:
    """JSON text with non-finite reals written as null."""
    return json.dumps(_finite_or_none(payload), indent=2, allow_nan=False)


def exit_code_for(exc: BaseException) -> int:
    if isinstance(exc, MalformedInputError):
        return EXIT_MALFORMED
    if isinstance(exc, InvariantViolation):
        return EXIT_INVARIANT
    return EXIT_VERIFICATION


def error_payload(exc: KreinExtError) -> Dict[str, Any]:
    if isinstance(exc, InvariantViolation):
        body = exc.to_dict()
    else:
        body = {"kind": type(exc).__name__, "invariant": None, "residual": None, "message": str(exc)}
    return {"error": body}


def _subspace(U: Subspace) -> Dict[str, Any]:
    return {"dim": U.dim, "basis": encode_matrix(U.basis)}


def relation_payload(R: SelfadjointRelation, tol: Tolerance = DEFAULT_TOLERANCE) -> Dict[str, Any]:
    finite, infinity = relation_spectrum(R, tol)
    return {
        "is_operator": R.is_operator,
        "operator": encode_matrix(R.operator_matrix()),
        "domain": _subspace(R.domain),
        "multivalued_part": _subspace(R.multivalued_part),
        "finite_spectrum": encode_reals(finite),
        "infinity_multiplicity": infinity,
    }


def parametrize_report(p: ExtensionParametrization) -> Dict[str, Any]:
    return {
        "ambient_dim": p.ambient_dim,
        "dom_T": _subspace(p.dom_T),
        "complement": _subspace(p.complement),
        "A": encode_matrix(p.A),
        "Gamma2": encode_matrix(p.gamma2),
        "defect_dims": {"D_A": p.defect_A.dim, "D_Gamma2_star": p.defect_dim},
        # Gamma files are read in this basis.
        "gamma_basis": encode_matrix(p.defect_basis_ambient()),
    }


def extend_report(
    p: ExtensionParametrization, gamma: GammaParameter, tol: Tolerance = DEFAULT_TOLERANCE
) -> Dict[str, Any]:
    T_tilde = extend_contraction(p, gamma, tol)
    relation = extension_relation(p, gamma, tol)
    decomposition = domain_decomposition(p, gamma, tol)
    return {
        "gamma": encode_matrix(gamma.matrix),
        "T_tilde": encode_matrix(T_tilde),
        "S_tilde": relation_payload(relation, tol),
        "domain_decomposition": {
            "dom_F": _subspace(decomposition.dom_F),
            "correction": _subspace(decomposition.correction),
            "dom_gamma": _subspace(decomposition.dom_gamma),
            "verified": decomposition.verified,
        },
    }


def membership_report(
    p: ExtensionParametrization,
    candidate: np.ndarray,
    route: str = "both",
    tol: Tolerance = DEFAULT_TOLERANCE,
) -> Dict[str, Any]:
    routes = [MembershipRoute.DIRECT, MembershipRoute.INTERVAL] if route == "both" else [MembershipRoute(route)]
    return {r.value: is_extension_member(p, candidate, r, tol) for r in routes}


def compare_report(
    p: ExtensionParametrization,
    gamma_a: GammaParameter,
    gamma_b: GammaParameter,
    tol: Tolerance = DEFAULT_TOLERANCE,
) -> Dict[str, Any]:
    order = compare_extensions(extension_relation(p, gamma_a, tol), extension_relation(p, gamma_b, tol), tol)
    return {"order": order.value}


def verify_report(reports: Iterable[VerificationReport]) -> Dict[str, Any]:
    items = [report.to_dict() for report in reports]
    failures = sum(item["failures"] for item in items)
    return {"reports": items, "failures": failures, "passed": failures == 0}


def run_verify(
    dims: Iterable[int], trials: int, seed: int, tol: Tolerance = DEFAULT_TOLERANCE, workers: Optional[int] = None
) -> Dict[str, Any]:
    return verify_report(run_all(dims, trials, seed, tol, workers))


def run_demo(
    size: int, samples: int, seed: int, tol: Tolerance = DEFAULT_TOLERANCE, workers: Optional[int] = None
) -> Dict[str, Any]:
    return demo_report(minimal_laplacian(size, tol), samples, seed, tol, workers).to_dict()


def problem_parametrization(S: PartialOperator, tol: Tolerance = DEFAULT_TOLERANCE) -> ExtensionParametrization:
    """Parametrization of the Cayley transform of a positive partial operator."""
    return parametrize(cayley_transform(S, tol), tol)
