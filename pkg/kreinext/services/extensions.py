"""Selfadjoint contraction extensions of a symmetric partial contraction.

Given T: dom(T) -> C^n, every selfadjoint contraction extension is
T~(Gamma) for a unique selfadjoint contraction Gamma on the defect space of
Gamma_2*. The inverse Cayley transform turns T~(Gamma) into a positive
selfadjoint extension S~(Gamma) of S; Gamma = I gives the Krein (soft)
extension and Gamma = -I the Friedrichs (hard) one.

Block formulas are written in the orthonormal frame F = [V W] with V a basis
of dom(T) and W a basis of its orthogonal complement, then conjugated back
to ambient coordinates.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, Tuple, Union

import numpy as np

from ..shared import (
    DEFAULT_TOLERANCE,
    DimensionMismatchError,
    MalformedInputError,
    NotAnExtensionError,
    NotContractionError,
    NotHermitianError,
    NotSymmetricError,
    Tolerance,
    VerificationFailure,
)
from .cayley import PartialOperator, SelfadjointRelation, inverse_cayley
from .contraction import ColContraction, CornerData, RowContraction, complete_corner, extract_gammas
from .linalg import (
    Subspace,
    SubspaceRelation,
    adjoint,
    as_matrix,
    check_contraction,
    complement,
    hermitian_part,
    hermitian_residual,
    is_psd,
    op_norm,
    orthonormal_basis,
    psd_sqrt,
    solve_on_range,
    subspace_relation,
    subspace_sum,
)

logger = logging.getLogger(__name__)


class ExtremalKind(str, Enum):
    KREIN = "krein"
    FRIEDRICHS = "friedrichs"


class MembershipRoute(str, Enum):
    DIRECT = "direct"
    INTERVAL = "interval"


class ExtensionOrder(str, Enum):
    LE = "le"
    GE = "ge"
    EQUAL = "equal"
    INCOMPARABLE = "incomparable"


@dataclass(frozen=True)
class GammaParameter:
    """Selfadjoint contraction on the defect space of Gamma_2*, in defect-basis coordinates."""

    matrix: np.ndarray

    @property
    def dim(self) -> int:
        return int(self.matrix.shape[0])

    @classmethod
    def from_matrix(cls, matrix, tol: Tolerance = DEFAULT_TOLERANCE) -> "GammaParameter":
        G = np.asarray(matrix, dtype=complex)
        if G.size == 0:
            return cls(np.zeros((0, 0), dtype=complex))
        G = as_matrix(G, "Gamma")
        if G.shape[0] != G.shape[1]:
            raise DimensionMismatchError(f"Gamma must be square, got shape {G.shape}")
        residual = hermitian_residual(G)
        if residual > tol.compare * max(1.0, op_norm(G)):
            raise NotHermitianError(f"Gamma is not Hermitian (residual {residual:.3e})", residual)
        check_contraction(G, tol, "Gamma")
        return cls(hermitian_part(G))

    @classmethod
    def scalar(cls, value: float, dim: int) -> "GammaParameter":
        return cls(value * np.eye(dim, dtype=complex))

    @classmethod
    def krein(cls, dim: int) -> "GammaParameter":
        return cls.scalar(1.0, dim)

    @classmethod
    def friedrichs(cls, dim: int) -> "GammaParameter":
        return cls.scalar(-1.0, dim)

    @classmethod
    def neutral(cls, dim: int) -> "GammaParameter":
        return cls.scalar(0.0, dim)


GammaLike = Union[GammaParameter, np.ndarray]


@dataclass(frozen=True)
class ExtensionParametrization:
    """Data of T = [A; Gamma_2 D_A] in the frame (dom(T), complement)."""

    ambient_dim: int
    dom_T: Subspace
    complement: Subspace
    action: np.ndarray
    corner: CornerData
    # Extremal contractions and their relations, keyed by (what, kind, tolerance).
    _extremals: Dict[Tuple[str, ExtremalKind, Tolerance], Any] = field(
        default_factory=dict, init=False, repr=False, compare=False
    )

    @property
    def A(self) -> np.ndarray:
        return self.corner.A

    @property
    def gamma2(self) -> np.ndarray:
        """Gamma_2 from defect-of-A coordinates to complement coordinates."""
        return self.corner.gamma2

    @property
    def gamma2_full(self) -> np.ndarray:
        return self.corner.gamma2_full

    @property
    def D_A(self) -> np.ndarray:
        return self.corner.D_A

    @property
    def defect_A(self) -> Subspace:
        return self.corner.defect_A

    @property
    def D_gamma2_star(self) -> np.ndarray:
        return self.corner.D_gamma2_star

    @property
    def defect_gamma2_star(self) -> Subspace:
        return self.corner.defect_gamma2_star

    @property
    def defect_dim(self) -> int:
        return self.defect_gamma2_star.dim

    def frame(self) -> np.ndarray:
        return np.hstack([self.dom_T.basis, self.complement.basis])

    def to_ambient(self, block: np.ndarray) -> np.ndarray:
        F = self.frame()
        return hermitian_part(F @ block @ adjoint(F))

    def defect_basis_ambient(self) -> np.ndarray:
        """The published basis of the defect space of Gamma_2*, as vectors of C^n."""
        return self.complement.basis @ self.defect_gamma2_star.basis


@dataclass(frozen=True)
class DomainDecomposition:
    dom_F: Subspace
    correction: Subspace
    dom_gamma: Subspace
    verified: bool


def parametrize(T: PartialOperator, tol: Tolerance = DEFAULT_TOLERANCE) -> ExtensionParametrization:
    residual = T.symmetry_residual()
    if residual > tol.compare * max(1.0, op_norm(T.action)):
        raise NotSymmetricError(f"T is not symmetric (residual {residual:.3e})", residual)
    check_contraction(T.action, tol, "T")
    V = T.domain.basis
    W = complement(T.domain, tol)
    A = hermitian_part(adjoint(V) @ T.action)
    lower = adjoint(W.basis) @ T.action
    corner = extract_gammas(RowContraction(A, adjoint(lower)), ColContraction(A, lower), tol)
    logger.debug(
        "parametrize: dim dom(T)=%d, complement=%d, defect of Gamma_2*=%d",
        T.dim, W.dim, corner.defect_gamma2_star.dim,
    )
    return ExtensionParametrization(
        ambient_dim=T.ambient_dim,
        dom_T=T.domain,
        complement=W,
        action=T.action,
        corner=corner,
    )


def _gamma_matrix(p: ExtensionParametrization, gamma: GammaLike, tol: Tolerance) -> np.ndarray:
    G = gamma if isinstance(gamma, GammaParameter) else GammaParameter.from_matrix(gamma, tol)
    if G.dim != p.defect_dim:
        raise DimensionMismatchError(
            f"Gamma has dimension {G.dim}, the defect space has dimension {p.defect_dim}",
        )
    return G.matrix


def extend_contraction(
    p: ExtensionParametrization, gamma: GammaLike, tol: Tolerance = DEFAULT_TOLERANCE
) -> np.ndarray:
    """T~(Gamma) as an n x n Hermitian contraction extending T."""
    G = _gamma_matrix(p, gamma, tol)
    return p.to_ambient(complete_corner(p.corner, G, tol))


def _extremal_closed_form(p: ExtensionParametrization, which: ExtremalKind) -> np.ndarray:
    k = p.dom_T.dim
    m = p.complement.dim
    G2 = p.gamma2_full
    if which is ExtremalKind.KREIN:
        lower_right = np.eye(m) - G2 @ (np.eye(k) + p.A) @ adjoint(G2)
    else:
        lower_right = G2 @ (np.eye(k) - p.A) @ adjoint(G2) - np.eye(m)
    off = G2 @ p.D_A
    return p.to_ambient(np.block([[p.A, adjoint(off)], [off, lower_right]]))


def extremal(
    p: ExtensionParametrization, which: Union[ExtremalKind, str], tol: Tolerance = DEFAULT_TOLERANCE
) -> np.ndarray:
    """Krein (Gamma = I) or Friedrichs (Gamma = -I) contraction extension.

    Computed once per parametrization and tolerance; the returned array is read-only.
    """
    kind = _extremal_kind(which)
    key = ("contraction", kind, tol)
    cached = p._extremals.get(key)
    if cached is not None:
        return cached
    gamma = GammaParameter.krein(p.defect_dim) if kind is ExtremalKind.KREIN else GammaParameter.friedrichs(p.defect_dim)
    generic = extend_contraction(p, gamma, tol)
    closed = _extremal_closed_form(p, kind)
    residual = op_norm(generic - closed)
    if residual > tol.compare * max(1.0, op_norm(closed)):
        raise VerificationFailure(f"{kind.value} extension: closed form and generic formula differ by {residual:.3e}")
    generic.setflags(write=False)
    p._extremals[key] = generic
    return generic


def extremal_relation(
    p: ExtensionParametrization, which: Union[ExtremalKind, str], tol: Tolerance = DEFAULT_TOLERANCE
) -> SelfadjointRelation:
    """S~_K or S~_F, cached alongside the contraction it comes from."""
    kind = _extremal_kind(which)
    key = ("relation", kind, tol)
    cached = p._extremals.get(key)
    if cached is None:
        cached = p._extremals[key] = inverse_cayley(extremal(p, kind, tol), tol)
    return cached


def _extremal_kind(which: Union[ExtremalKind, str]) -> ExtremalKind:
    try:
        return ExtremalKind(which)
    except ValueError as exc:
        raise MalformedInputError(f"unknown extremal extension {which!r}") from exc


def _check_candidate(p: ExtensionParametrization, B, tol: Tolerance) -> np.ndarray:
    Bm = as_matrix(B, "B")
    n = p.ambient_dim
    if Bm.shape != (n, n):
        raise DimensionMismatchError(f"B has shape {Bm.shape}, expected {(n, n)}")
    residual = hermitian_residual(Bm)
    if residual > tol.compare * max(1.0, op_norm(Bm)):
        raise NotHermitianError(f"B is not Hermitian (residual {residual:.3e})", residual)
    check_contraction(Bm, tol, "B")
    return hermitian_part(Bm)


def _extension_residual(p: ExtensionParametrization, B: np.ndarray) -> float:
    return op_norm(B @ p.dom_T.basis - p.action)


def recover_gamma(p: ExtensionParametrization, B, tol: Tolerance = DEFAULT_TOLERANCE) -> GammaParameter:
    """The unique Gamma with extend_contraction(p, Gamma) = B."""
    Bm = _check_candidate(p, B, tol)
    residual = _extension_residual(p, Bm)
    if residual > tol.compare * max(1.0, op_norm(p.action)):
        raise NotAnExtensionError(f"B does not extend T (||BV - M|| = {residual:.3e})", residual)
    W = p.complement.basis
    D = p.D_gamma2_star
    G2 = p.gamma2_full
    Y = adjoint(W) @ Bm @ W + G2 @ p.A @ adjoint(G2)
    Z = adjoint(solve_on_range(D, adjoint(solve_on_range(D, Y, tol)), tol))
    E = p.defect_gamma2_star.basis
    gamma = hermitian_part(adjoint(E) @ Z @ E)
    norm = op_norm(gamma)
    if norm > 1.0 + tol.contraction:
        raise NotContractionError(f"recovered Gamma has norm {norm:.12g}", norm - 1.0)
    return GammaParameter(gamma)


def is_extension_member(
    p: ExtensionParametrization,
    B,
    route: Union[MembershipRoute, str] = MembershipRoute.DIRECT,
    tol: Tolerance = DEFAULT_TOLERANCE,
) -> bool:
    """Is B a selfadjoint contraction extension of T? Never raises on bad candidates."""
    route = MembershipRoute(route)
    try:
        Bm = as_matrix(B, "B")
    except MalformedInputError:
        return False
    n = p.ambient_dim
    if Bm.shape != (n, n) or hermitian_residual(Bm) > tol.compare * max(1.0, op_norm(Bm)):
        return False
    Bm = hermitian_part(Bm)
    if route is MembershipRoute.DIRECT:
        return (
            op_norm(Bm) <= 1.0 + tol.contraction
            and _extension_residual(p, Bm) <= tol.compare * max(1.0, op_norm(p.action))
        )
    upper = extremal(p, ExtremalKind.KREIN, tol)
    lower = extremal(p, ExtremalKind.FRIEDRICHS, tol)
    return is_psd(upper - Bm, tol) and is_psd(Bm - lower, tol)


def extension_relation(
    p: ExtensionParametrization, gamma: GammaLike, tol: Tolerance = DEFAULT_TOLERANCE
) -> SelfadjointRelation:
    """S~(Gamma), the positive selfadjoint extension attached to Gamma."""
    return inverse_cayley(extend_contraction(p, gamma, tol), tol)


def form_order(R1: SelfadjointRelation, R2: SelfadjointRelation, tol: Tolerance = DEFAULT_TOLERANCE) -> bool:
    """R1 <= R2 in the form sense: dom(R2) within dom(R1) and ||R1^{1/2} x|| <= ||R2^{1/2} x|| there."""
    if R1.ambient_dim != R2.ambient_dim:
        raise DimensionMismatchError(f"ambient dimensions differ: {R1.ambient_dim} vs {R2.ambient_dim}")
    if subspace_relation(R2.domain, R1.domain, tol) not in (SubspaceRelation.EQUAL, SubspaceRelation.U_IN_V):
        return False
    if R2.domain.dim == 0:
        return True
    S1 = R1.operator_matrix()
    S2 = R2.operator_matrix()
    Q = R2.domain.basis
    _, directions = np.linalg.eigh(hermitian_part(adjoint(Q) @ (S2 - S1) @ Q))
    samples = np.hstack([Q, Q @ directions])
    lhs = np.sum(np.abs(R1.form_root @ samples) ** 2, axis=0)
    rhs = np.sum(np.abs(R2.form_root @ samples) ** 2, axis=0)
    slack = tol.psd * max(1.0, op_norm(R1.operator_action), op_norm(R2.operator_action))
    return bool(np.all(lhs <= rhs + slack))


def compare_with_forms(
    R1: SelfadjointRelation, R2: SelfadjointRelation, tol: Tolerance = DEFAULT_TOLERANCE
) -> Tuple[ExtensionOrder, bool]:
    """Cayley-image order of R1 and R2, and whether the form order agrees with it.

    Agreement is only tested when both relations are operators; otherwise it is True.
    """
    if R1.ambient_dim != R2.ambient_dim:
        raise DimensionMismatchError(f"ambient dimensions differ: {R1.ambient_dim} vs {R2.ambient_dim}")
    difference = R1.contraction - R2.contraction
    le = is_psd(difference, tol)
    ge = is_psd(-difference, tol)
    if le and ge:
        order = ExtensionOrder.EQUAL
    elif le:
        order = ExtensionOrder.LE
    elif ge:
        order = ExtensionOrder.GE
    else:
        order = ExtensionOrder.INCOMPARABLE
    agrees = True
    if R1.is_operator and R2.is_operator:
        forms = (form_order(R1, R2, tol), form_order(R2, R1, tol))
        agrees = forms == (le, ge)
        if not agrees:
            logger.debug("form order %s, contraction order %s", forms, (le, ge))
    return order, agrees


def form_agrees(R1: SelfadjointRelation, R2: SelfadjointRelation, tol: Tolerance = DEFAULT_TOLERANCE) -> bool:
    return compare_with_forms(R1, R2, tol)[1]


def compare_extensions(
    R1: SelfadjointRelation, R2: SelfadjointRelation, tol: Tolerance = DEFAULT_TOLERANCE
) -> ExtensionOrder:
    """Order of two positive selfadjoint relations, decided on their Cayley images."""
    order, agrees = compare_with_forms(R1, R2, tol)
    if not agrees:
        logger.warning("compare_extensions: form order disagrees with contraction order %s", order.value)
    return order


def sandwich(p: ExtensionParametrization, gamma: GammaLike, tol: Tolerance = DEFAULT_TOLERANCE) -> bool:
    """S~_K <= S~(Gamma) <= S~_F."""
    below = (ExtensionOrder.LE, ExtensionOrder.EQUAL)
    relation = extension_relation(p, gamma, tol)
    krein = extremal_relation(p, ExtremalKind.KREIN, tol)
    friedrichs = extremal_relation(p, ExtremalKind.FRIEDRICHS, tol)
    return compare_extensions(krein, relation, tol) in below and compare_extensions(relation, friedrichs, tol) in below


def domain_decomposition(
    p: ExtensionParametrization, gamma: GammaLike, tol: Tolerance = DEFAULT_TOLERANCE
) -> DomainDecomposition:
    """dom S~(Gamma) = dom S~_F + D (I + Gamma) D ker(I + S*), with D the defect operator of Gamma_2*."""
    G = _gamma_matrix(p, gamma, tol)
    n = p.ambient_dim
    friedrichs = extremal(p, ExtremalKind.FRIEDRICHS, tol)
    dom_F = orthonormal_basis(np.eye(n) + friedrichs, tol)
    if p.defect_dim:
        E = p.defect_gamma2_star.basis
        D = p.D_gamma2_star
        shift = D @ E @ (np.eye(p.defect_dim) + G) @ adjoint(E) @ D
        correction = orthonormal_basis(p.complement.basis @ shift, tol)
    else:
        correction = Subspace.zero(n)
    dom_gamma = orthonormal_basis(np.eye(n) + extend_contraction(p, G, tol), tol)
    verified = subspace_relation(subspace_sum(dom_F, correction, tol), dom_gamma, tol) is SubspaceRelation.EQUAL
    if not verified:
        logger.warning(
            "domain_decomposition: dom_F (%d) + correction (%d) does not match dom_Gamma (%d)",
            dom_F.dim, correction.dim, dom_gamma.dim,
        )
    return DomainDecomposition(dom_F=dom_F, correction=correction, dom_gamma=dom_gamma, verified=verified)


def range_inclusion_check(p: ExtensionParametrization, tol: Tolerance = DEFAULT_TOLERANCE) -> bool:
    """ran(I + A) within ran((I + T)*) within ran((I + A)^{1/2})."""
    k = p.dom_T.dim
    shifted = np.eye(k) + p.A
    adjoint_rows = np.hstack([shifted, p.D_A @ adjoint(p.gamma2_full)])
    inner = orthonormal_basis(shifted, tol)
    middle = orthonormal_basis(adjoint_rows, tol)
    outer = orthonormal_basis(psd_sqrt(shifted, tol), tol)
    contained = (SubspaceRelation.EQUAL, SubspaceRelation.U_IN_V)
    return (
        subspace_relation(inner, middle, tol) in contained
        and subspace_relation(middle, outer, tol) in contained
    )
