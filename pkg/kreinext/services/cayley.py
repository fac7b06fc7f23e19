"""Cayley transform between positive partial operators and symmetric partial contractions.

In finite dimension every subspace is closed, so "densely defined" is read
at ambient scale: a proper domain models a non-surjective ran(I + S). On the
inverse side a Hermitian contraction with eigenvalue -1 is mapped to a
selfadjoint linear relation whose multivalued part is ker(I + T~); that
relation is the finite-dimensional carrier of an unbounded extension.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from functools import cached_property
from typing import Optional, Tuple

import numpy as np
import scipy.linalg

from ..shared import (
    DEFAULT_TOLERANCE,
    DimensionMismatchError,
    MalformedInputError,
    NotContractionError,
    NotHermitianError,
    NotInjectiveError,
    NotPositiveError,
    NotSymmetricError,
    Tolerance,
)
from .linalg import (
    Subspace,
    adjoint,
    as_matrix,
    check_contraction,
    column_basis,
    hermitian_eig,
    hermitian_part,
    hermitian_residual,
    op_norm,
    orthonormal_basis,
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class PartialOperator:
    """Linear map defined on a subspace: column j of `action` is the image of domain basis vector j."""

    ambient_dim: int
    domain: Subspace
    action: np.ndarray

    def __post_init__(self) -> None:
        if self.action.shape != (self.ambient_dim, self.domain.dim):
            raise DimensionMismatchError(
                f"action has shape {self.action.shape}, expected {(self.ambient_dim, self.domain.dim)}"
            )

    @classmethod
    def from_columns(cls, columns, images, tol: Tolerance = DEFAULT_TOLERANCE) -> "PartialOperator":
        """Orthonormalize a spanning set of the domain and re-express the images against it."""
        X = as_matrix(columns, "domain_basis")
        Y = as_matrix(images, "action")
        if X.shape != Y.shape:
            raise MalformedInputError(f"domain_basis {X.shape} and action {Y.shape} must have equal shapes")
        domain = orthonormal_basis(X, tol)
        R = adjoint(domain.basis) @ X
        M = Y @ scipy.linalg.pinv(R) if R.size else np.zeros((X.shape[0], 0), dtype=complex)
        residual = op_norm(M @ R - Y)
        if residual > tol.compare * max(1.0, op_norm(Y)):
            raise MalformedInputError(
                f"action is not well defined on linearly dependent domain columns (residual {residual:.3e})"
            )
        return cls(X.shape[0], domain, M)

    @property
    def dim(self) -> int:
        return self.domain.dim

    def compression(self) -> np.ndarray:
        """V^H M: the quadratic form of the operator on its domain."""
        return adjoint(self.domain.basis) @ self.action

    def symmetry_residual(self) -> float:
        return hermitian_residual(self.compression())

    def is_symmetric(self, tol: Tolerance = DEFAULT_TOLERANCE) -> bool:
        return self.symmetry_residual() <= tol.compare * max(1.0, op_norm(self.action))

    def is_contraction(self, tol: Tolerance = DEFAULT_TOLERANCE) -> bool:
        return op_norm(self.action) <= 1.0 + tol.contraction

    def lower_bound(self) -> float:
        """Largest a with <Sh, h> >= a ||h||^2 on the domain."""
        if self.dim == 0:
            return float("inf")
        return float(scipy.linalg.eigvalsh(hermitian_part(self.compression()))[0])

    def is_positive(self, tol: Tolerance = DEFAULT_TOLERANCE) -> bool:
        return self.is_symmetric(tol) and self.lower_bound() >= -tol.psd * max(1.0, op_norm(self.compression()))


@dataclass(frozen=True)
class SelfadjointRelation:
    """Positive selfadjoint linear relation.

    `operator_action` is the operator part in domain coordinates, `contraction`
    is the Cayley image 2(I + R)^{-1} - I the relation was built from.
    """

    ambient_dim: int
    domain: Subspace
    operator_action: np.ndarray
    multivalued_part: Subspace
    contraction: np.ndarray

    @property
    def is_operator(self) -> bool:
        return self.multivalued_part.dim == 0

    def operator_matrix(self) -> np.ndarray:
        """Operator part in ambient coordinates, zero on the multivalued part."""
        Q = self.domain.basis
        return hermitian_part(Q @ self.operator_action @ adjoint(Q))

    @cached_property
    def form_root(self) -> np.ndarray:
        """R^{1/2} on the domain, zero on the multivalued part, in ambient coordinates."""
        Q = self.domain.basis
        if Q.shape[1] == 0:
            return np.zeros((self.ambient_dim, self.ambient_dim), dtype=complex)
        w, U = scipy.linalg.eigh(hermitian_part(self.operator_action))
        W = Q @ U
        return hermitian_part((W * np.sqrt(np.clip(w, 0.0, None))) @ adjoint(W))


def _require_symmetric(op: PartialOperator, tol: Tolerance, name: str) -> None:
    residual = op.symmetry_residual()
    if residual > tol.compare * max(1.0, op_norm(op.action)):
        raise NotSymmetricError(f"{name} is not symmetric (||V^H M - M^H V|| = {residual:.3e})", residual)


def _cayley_map(op: PartialOperator, floor: float) -> Tuple[Optional[PartialOperator], float]:
    """(V + M)x -> (V - M)x, the common form of the transform and its inverse.

    Returns None with sigma_min(V + M) when that falls to `floor` or below.
    """
    V, M = op.domain.basis, op.action
    G = V + M
    H = V - M
    new_domain, sigma_min = column_basis(G)
    if sigma_min <= floor:
        return None, sigma_min
    R = adjoint(new_domain.basis) @ G
    action = scipy.linalg.solve(R.T, H.T).T if R.size else np.zeros((op.ambient_dim, 0), dtype=complex)
    return PartialOperator(op.ambient_dim, new_domain, action), sigma_min


def shift_lower_bound(S0: PartialOperator, m0: float, tol: Tolerance = DEFAULT_TOLERANCE) -> PartialOperator:
    """S = S0 - m0 I; positive whenever m0 does not exceed the lower bound of S0."""
    _require_symmetric(S0, tol, "S0")
    if m0 == 0:
        return S0
    return PartialOperator(S0.ambient_dim, S0.domain, S0.action - m0 * S0.domain.basis)


def cayley_transform(S: PartialOperator, tol: Tolerance = DEFAULT_TOLERANCE) -> PartialOperator:
    """T = (I - S)(I + S)^{-1} on dom(T) = ran(I + S)."""
    _require_symmetric(S, tol, "S")
    lower = S.lower_bound()
    if lower < -tol.psd * max(1.0, op_norm(S.compression())):
        raise NotPositiveError(f"S is not positive (lower bound {lower:.6g})", -lower)
    T, sigma_min = _cayley_map(S, tol.rank_rel)
    if T is None:
        raise NotPositiveError(f"I + S is not injective on dom(S) (sigma_min {sigma_min:.3e})", sigma_min)
    logger.debug("cayley_transform: dom(T) has dimension %d in C^%d", T.dim, T.ambient_dim)
    return T


def inverse_cayley_partial(T: PartialOperator, tol: Tolerance = DEFAULT_TOLERANCE) -> PartialOperator:
    """S = (I - T)(I + T)^{-1} on dom(S) = ran(I + T) for a symmetric partial contraction T."""
    _require_symmetric(T, tol, "T")
    check_contraction(T.action, tol, "T")
    # ||(I + T)h|| <= 2 ||h||, so the floor is twice the rank cutoff.
    S, sigma_min = _cayley_map(T, 2.0 * tol.rank_rel)
    if S is None:
        raise NotInjectiveError(f"I + T is not injective on dom(T) (sigma_min {sigma_min:.3e})", sigma_min)
    return S


def inverse_cayley(T_tilde, tol: Tolerance = DEFAULT_TOLERANCE) -> SelfadjointRelation:
    """Selfadjoint relation {((I + T~)x, (I - T~)x)} of a Hermitian contraction T~."""
    T = as_matrix(T_tilde, "T~")
    if T.shape[0] != T.shape[1]:
        raise DimensionMismatchError(f"T~ must be square, got shape {T.shape}")
    try:
        t, U = hermitian_eig(T, tol)
    except NotHermitianError as exc:
        raise NotHermitianError(f"T~ is not Hermitian (residual {exc.residual:.3e})", exc.residual) from exc
    norm = float(np.abs(t).max()) if t.size else 0.0
    if norm > 1.0 + tol.contraction:
        raise NotContractionError(f"T~ is not a contraction (norm {norm:.12g})", norm - 1.0)
    T = hermitian_part(T)
    n = T.shape[0]
    # One-sided: eigenvalues inside the contraction slack below -1 are infinite too.
    infinite = t + 1.0 <= tol.rank_rel
    finite_t = t[~infinite]
    mapped = (1.0 - finite_t) / (1.0 + finite_t)
    logger.debug("inverse_cayley: %d finite eigenvalues, infinity multiplicity %d", mapped.size, int(infinite.sum()))
    return SelfadjointRelation(
        ambient_dim=n,
        domain=Subspace(n, U[:, ~infinite]),
        operator_action=np.diag(mapped).astype(complex),
        multivalued_part=Subspace(n, U[:, infinite]),
        contraction=T,
    )


def relation_spectrum(R: SelfadjointRelation, tol: Tolerance = DEFAULT_TOLERANCE) -> Tuple[np.ndarray, int]:
    """Finite eigenvalues (ascending) and the multiplicity of the eigenvalue infinity."""
    if R.domain.dim == 0:
        finite = np.zeros(0)
    else:
        finite, _ = hermitian_eig(R.operator_action, tol)
    return finite, R.multivalued_part.dim


def relation_resolvent(R: SelfadjointRelation) -> np.ndarray:
    """(I + R)^{-1}: xi -> the unique h with (h, xi - h) in the graph of R."""
    n = R.ambient_dim
    if R.domain.dim == 0:
        return np.zeros((n, n), dtype=complex)
    Q = R.domain.basis
    m = R.domain.dim
    inner = scipy.linalg.solve(np.eye(m) + R.operator_action, adjoint(Q), assume_a="her")
    return hermitian_part(Q @ inner)


def relation_cayley(R: SelfadjointRelation) -> np.ndarray:
    """2(I + R)^{-1} - I, recomputed from the relation's own data."""
    return 2.0 * relation_resolvent(R) - np.eye(R.ambient_dim)


def graph_residual(R: SelfadjointRelation, S: PartialOperator) -> float:
    """How far graph(S) is from being contained in graph(R); 0 when R extends S."""
    if R.ambient_dim != S.ambient_dim:
        raise DimensionMismatchError(f"ambient dimensions differ: {R.ambient_dim} vs {S.ambient_dim}")
    if S.dim == 0:
        return 0.0
    Q = R.domain.basis
    W = R.multivalued_part.basis
    u, v = S.domain.basis, S.action
    outside_domain = op_norm(adjoint(W) @ u) if W.size else 0.0
    mismatch = op_norm(adjoint(Q) @ v - R.operator_action @ (adjoint(Q) @ u)) if Q.size else 0.0
    return max(outside_domain, mismatch)
