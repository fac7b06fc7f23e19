"""Dense complex-matrix kernel.

Matrices are 2-d complex numpy arrays. Closed subspaces of C^n are stored
as orthonormal bases (never as projections); projections are derived when
needed. Rank decisions use a cutoff relative to the largest singular value
or eigenvalue, with the zero matrix special-cased to rank 0; `column_basis`
leaves injectivity to an absolute floor chosen by the caller.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from enum import Enum
from typing import Tuple

import numpy as np
import scipy.linalg

from ..shared import (
    DEFAULT_TOLERANCE,
    DimensionMismatchError,
    InconsistentFactorizationError,
    MalformedInputError,
    NotContractionError,
    NotHermitianError,
    NotPSDError,
    Tolerance,
)

logger = logging.getLogger(__name__)


def as_matrix(M, name: str = "matrix") -> np.ndarray:
    arr = np.asarray(M, dtype=complex)
    if arr.ndim == 0:
        arr = arr.reshape(1, 1)
    if arr.ndim != 2:
        raise MalformedInputError(f"{name}: expected a 2-d array, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise MalformedInputError(f"{name}: entries must be finite")
    return arr


def adjoint(M: np.ndarray) -> np.ndarray:
    return np.conj(M).T


def op_norm(M: np.ndarray) -> float:
    """Spectral norm; 0 for empty matrices."""
    if M.size == 0:
        return 0.0
    return float(np.linalg.norm(M, 2))


def hermitian_part(M: np.ndarray) -> np.ndarray:
    return (M + adjoint(M)) / 2


def hermitian_residual(M: np.ndarray) -> float:
    return op_norm(M - adjoint(M))


def _require_square(M: np.ndarray, name: str) -> None:
    if M.shape[0] != M.shape[1]:
        raise DimensionMismatchError(f"{name} must be square, got shape {M.shape}")


def _canonical_phase(Q: np.ndarray) -> np.ndarray:
    """Rotate each column so its largest-modulus entry is real positive."""
    if Q.size == 0:
        return Q
    idx = np.argmax(np.abs(Q) > np.abs(Q).max(axis=0) * (1 - 1e-12), axis=0)
    pivots = Q[idx, np.arange(Q.shape[1])]
    phases = np.where(np.abs(pivots) > 0, pivots / np.abs(pivots), 1.0)
    return Q / phases


@dataclass(frozen=True)
class Subspace:
    """Closed subspace of C^ambient_dim with an orthonormal basis (ambient_dim x k)."""

    ambient_dim: int
    basis: np.ndarray

    @property
    def dim(self) -> int:
        return int(self.basis.shape[1])

    @classmethod
    def zero(cls, ambient_dim: int) -> "Subspace":
        return cls(ambient_dim, np.zeros((ambient_dim, 0), dtype=complex))

    @classmethod
    def full(cls, ambient_dim: int) -> "Subspace":
        return cls(ambient_dim, np.eye(ambient_dim, dtype=complex))

    def projection(self) -> np.ndarray:
        return self.basis @ adjoint(self.basis)

    def orthonormality_residual(self) -> float:
        return op_norm(adjoint(self.basis) @ self.basis - np.eye(self.dim))


class SubspaceRelation(str, Enum):
    EQUAL = "equal"
    U_IN_V = "U_in_V"
    V_IN_U = "V_in_U"
    INCOMPARABLE = "incomparable"


def orthonormal_basis(columns, tol: Tolerance = DEFAULT_TOLERANCE) -> Subspace:
    """Orthonormal basis of the numerical column space of `columns`."""
    X = as_matrix(columns, "columns")
    n = X.shape[0]
    if X.size == 0:
        return Subspace.zero(n)
    U, s, _ = scipy.linalg.svd(X, full_matrices=False)
    if s[0] == 0.0:
        return Subspace.zero(n)
    rank = int(np.count_nonzero(s > tol.rank_rel * s[0]))
    logger.debug("orthonormal_basis: %d columns in C^%d, rank %d (sigma_max=%.3e)", X.shape[1], n, rank, s[0])
    return Subspace(n, _canonical_phase(U[:, :rank]))


def column_basis(columns) -> Tuple[Subspace, float]:
    """Left singular vectors of k columns, with no rank truncation, and sigma_min.

    They span the columns whenever sigma_min > 0; the caller tests sigma_min
    against an absolute floor.
    """
    X = as_matrix(columns, "columns")
    n, k = X.shape
    if k == 0:
        return Subspace.zero(n), float("inf")
    U, s, _ = scipy.linalg.svd(X, full_matrices=False)
    sigma_min = float(s[-1]) if k <= n else 0.0
    return Subspace(n, _canonical_phase(U[:, : min(n, k)])), sigma_min


def _stabilize_clusters(eigenvalues: np.ndarray, vectors: np.ndarray, gap: float) -> np.ndarray:
    """Replace each degenerate cluster's eigenvectors by a pivoted-QR basis of its projector."""
    out = vectors.copy()
    n = len(eigenvalues)
    start = 0
    while start < n:
        stop = start + 1
        while stop < n and eigenvalues[stop] - eigenvalues[stop - 1] <= gap:
            stop += 1
        if stop - start > 1:
            block = vectors[:, start:stop]
            Q, _, _ = scipy.linalg.qr(block @ adjoint(block), pivoting=True, mode="economic")
            out[:, start:stop] = Q[:, : stop - start]
        start = stop
    return _canonical_phase(out)


def hermitian_eig(M, tol: Tolerance = DEFAULT_TOLERANCE) -> Tuple[np.ndarray, np.ndarray]:
    """Ascending eigenvalues and a unitary eigenvector matrix of (M + M^H)/2."""
    A = as_matrix(M)
    _require_square(A, "matrix")
    if A.shape[0] == 0:
        return np.zeros(0), np.zeros((0, 0), dtype=complex)
    scale = max(1.0, op_norm(A))
    residual = hermitian_residual(A)
    if residual > tol.compare * scale:
        raise NotHermitianError(f"matrix is not Hermitian (||M - M^H|| = {residual:.3e})", residual)
    eigenvalues, vectors = scipy.linalg.eigh(hermitian_part(A))
    vectors = _stabilize_clusters(eigenvalues, vectors, tol.compare * scale)
    return eigenvalues, vectors


def is_psd(M, tol: Tolerance = DEFAULT_TOLERANCE, relative: bool = True) -> bool:
    """PSD decision: lambda_min >= -tol.psd * max(1, ||M||) (or -tol.psd when not relative)."""
    A = as_matrix(M)
    if A.shape[0] == 0:
        return True
    if hermitian_residual(A) > tol.compare * max(1.0, op_norm(A)):
        return False
    lam_min = float(scipy.linalg.eigvalsh(hermitian_part(A))[0])
    slack = tol.psd * (max(1.0, op_norm(A)) if relative else 1.0)
    return lam_min >= -slack


def loewner_le(X, Y, tol: Tolerance = DEFAULT_TOLERANCE) -> bool:
    """X <= Y in the Loewner order (Y - X PSD with relative slack)."""
    return is_psd(as_matrix(Y) - as_matrix(X), tol)


def psd_sqrt(M, tol: Tolerance = DEFAULT_TOLERANCE) -> np.ndarray:
    """Hermitian PSD square root; eigenvalues in [-tol.psd, 0) are clamped to 0."""
    eigenvalues, V = hermitian_eig(M, tol)
    if eigenvalues.size == 0:
        return np.zeros((0, 0), dtype=complex)
    if eigenvalues[0] < -tol.psd:
        raise NotPSDError(f"matrix is not PSD (lambda_min = {eigenvalues[0]:.3e})", -eigenvalues[0])
    clamped = np.clip(eigenvalues, 0.0, None)
    if np.any(eigenvalues < 0):
        logger.debug("psd_sqrt: clamped %d eigenvalues to 0", int(np.count_nonzero(eigenvalues < 0)))
    root = (V * np.sqrt(clamped)) @ adjoint(V)
    return hermitian_part(root)


def check_contraction(C: np.ndarray, tol: Tolerance, name: str = "operator") -> float:
    norm = op_norm(C)
    if norm > 1.0 + tol.contraction:
        raise NotContractionError(f"{name} is not a contraction (norm {norm:.12g})", norm - 1.0)
    return norm


def defect_pair(C, tol: Tolerance = DEFAULT_TOLERANCE) -> Tuple[np.ndarray, Subspace]:
    """Defect operator D_C = (I - C^H C)^{1/2} and the defect space (closure of ran D_C).

    Rank is decided on I - C^H C, before the square root: roundoff of order
    eps there must not come back as a direction of size sqrt(eps).
    """
    X = as_matrix(C, "contraction")
    check_contraction(X, tol, "C")
    n = X.shape[1]
    if n == 0:
        return np.zeros((0, 0), dtype=complex), Subspace.zero(0)
    eigenvalues, V = hermitian_eig(np.eye(n) - adjoint(X) @ X, tol)
    # I - C^H C may dip to -(2 tol.contraction) when ||C|| = 1 + tol.contraction.
    if eigenvalues[0] < -max(tol.psd, 3.0 * tol.contraction):
        raise NotPSDError(f"I - C^H C is not PSD (lambda_min = {eigenvalues[0]:.3e})", -eigenvalues[0])
    lam_max = float(eigenvalues[-1])
    keep = eigenvalues > tol.rank_rel * lam_max if lam_max > tol.psd else np.zeros(n, dtype=bool)
    Vk = V[:, keep]
    D = hermitian_part((Vk * np.sqrt(eigenvalues[keep])) @ adjoint(Vk))
    logger.debug("defect_pair: defect space of dimension %d in C^%d", Vk.shape[1], n)
    return D, Subspace(n, Vk)


def solve_on_range(D, X, tol: Tolerance = DEFAULT_TOLERANCE) -> np.ndarray:
    """Unique G with D G = X and columns of G in ran(D), for Hermitian PSD D."""
    Dm = as_matrix(D, "D")
    Xm = as_matrix(X, "X")
    _require_square(Dm, "D")
    if Dm.shape[0] != Xm.shape[0]:
        raise DimensionMismatchError(f"D is {Dm.shape}, X has {Xm.shape[0]} rows")
    if Xm.size == 0:
        return np.zeros_like(Xm)
    eigenvalues, U = hermitian_eig(Dm, tol)
    lam_max = float(eigenvalues[-1]) if eigenvalues.size else 0.0
    keep = eigenvalues > tol.rank_rel * lam_max if lam_max > 0 else np.zeros_like(eigenvalues, dtype=bool)
    Uk = U[:, keep]
    G = (Uk / eigenvalues[keep]) @ (adjoint(Uk) @ Xm)
    residual = op_norm(Dm @ G - Xm)
    if residual > tol.compare * max(1.0, op_norm(Xm)):
        raise InconsistentFactorizationError(
            f"inconsistent factorization: X is not in the range of D (residual {residual:.3e})", residual
        )
    return G



def complement(U: Subspace, tol: Tolerance = DEFAULT_TOLERANCE) -> Subspace:
    """Orthonormal basis of the orthogonal complement of U."""
    n = U.ambient_dim
    if U.dim == 0:
        return Subspace.full(n)
    if U.dim >= n:
        return Subspace.zero(n)
    W = scipy.linalg.null_space(adjoint(U.basis), rcond=tol.rank_rel)
    return Subspace(n, _canonical_phase(W.astype(complex)))


def subspace_sum(U: Subspace, V: Subspace, tol: Tolerance = DEFAULT_TOLERANCE) -> Subspace:
    if U.ambient_dim != V.ambient_dim:
        raise DimensionMismatchError(f"ambient dimensions differ: {U.ambient_dim} vs {V.ambient_dim}")
    return orthonormal_basis(np.hstack([U.basis, V.basis]), tol)


def containment_residual(U: Subspace, V: Subspace) -> float:
    """||(I - P_V) basis_U||, zero iff U is contained in V."""
    if U.dim == 0:
        return 0.0
    residual = U.basis - V.basis @ (adjoint(V.basis) @ U.basis)
    return op_norm(residual)


def subspace_relation(U: Subspace, V: Subspace, tol: Tolerance = DEFAULT_TOLERANCE) -> SubspaceRelation:
    if U.ambient_dim != V.ambient_dim:
        raise DimensionMismatchError(f"ambient dimensions differ: {U.ambient_dim} vs {V.ambient_dim}")
    u_in_v = containment_residual(U, V) <= tol.compare
    v_in_u = containment_residual(V, U) <= tol.compare
    if u_in_v and v_in_u:
        return SubspaceRelation.EQUAL
    if u_in_v:
        return SubspaceRelation.U_IN_V
    if v_in_u:
        return SubspaceRelation.V_IN_U
    return SubspaceRelation.INCOMPARABLE
