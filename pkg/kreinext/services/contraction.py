"""Completion of 2x2 block contractions.

Row and column contractions are factored through defect operators, and the
unique parameters Gamma_1 (valued in the defect space of A*) and Gamma_2
(defined on the defect space of A) are extracted. Parameters are stored in
defect-basis coordinates; `*_full` properties give the ambient-sized maps.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from ..shared import DEFAULT_TOLERANCE, DimensionMismatchError, NotContractionError, Tolerance
from .linalg import (
    Subspace,
    adjoint,
    as_matrix,
    check_contraction,
    defect_pair,
    is_psd,
    op_norm,
    solve_on_range,
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class RowContraction:
    """[A  B] with A: C^q -> C^p and B: C^r -> C^p."""

    A: np.ndarray
    B: np.ndarray

    def __post_init__(self) -> None:
        if self.A.shape[0] != self.B.shape[0]:
            raise DimensionMismatchError(f"row blocks need equal row counts: {self.A.shape} vs {self.B.shape}")


@dataclass(frozen=True)
class ColContraction:
    """[A; C] with A: C^q -> C^p and C: C^q -> C^s."""

    A: np.ndarray
    C: np.ndarray

    def __post_init__(self) -> None:
        if self.A.shape[1] != self.C.shape[1]:
            raise DimensionMismatchError(f"column blocks need equal column counts: {self.A.shape} vs {self.C.shape}")


@dataclass(frozen=True)
class CornerData:
    A: np.ndarray
    gamma1: np.ndarray  # C^r -> defect space of A*, coordinates
    gamma2: np.ndarray  # defect space of A -> C^s, coordinates
    D_A: np.ndarray
    defect_A: Subspace
    D_A_star: np.ndarray
    defect_A_star: Subspace
    D_gamma1: np.ndarray
    defect_gamma1: Subspace
    D_gamma2_star: np.ndarray
    defect_gamma2_star: Subspace
    gamma1_full: np.ndarray = field(repr=False)
    gamma2_full: np.ndarray = field(repr=False)

    @property
    def B(self) -> np.ndarray:
        return self.D_A_star @ self.gamma1_full

    @property
    def C(self) -> np.ndarray:
        return self.gamma2_full @ self.D_A

    @property
    def gamma_shape(self):
        return (self.defect_gamma2_star.dim, self.defect_gamma1.dim)


def _dims_match(M: np.ndarray, rows: int, cols: int, name: str) -> None:
    if M.shape != (rows, cols):
        raise DimensionMismatchError(f"{name} has shape {M.shape}, expected {(rows, cols)}")


def factor_offdiag(T1, X, T2, tol: Tolerance = DEFAULT_TOLERANCE) -> np.ndarray:
    """Unique contraction C: D_{T2} -> D_{T1*} (defect coordinates) with X = D_{T1*} C D_{T2}."""
    T1m, Xm, T2m = as_matrix(T1, "T1"), as_matrix(X, "X"), as_matrix(T2, "T2")
    _dims_match(Xm, T1m.shape[0], T2m.shape[1], "X")
    block = np.block([[T1m, Xm], [np.zeros((T2m.shape[0], T1m.shape[1])), T2m]])
    check_contraction(block, tol, "block matrix [[T1, X], [0, T2]]")
    D1, space1 = defect_pair(adjoint(T1m), tol)
    D2, space2 = defect_pair(T2m, tol)
    Y = solve_on_range(D1, Xm, tol)
    C_full = adjoint(solve_on_range(D2, adjoint(Y), tol))
    return adjoint(space1.basis) @ C_full @ space2.basis


def extract_gammas(row: RowContraction, col: ColContraction, tol: Tolerance = DEFAULT_TOLERANCE) -> CornerData:
    A = as_matrix(row.A, "A")
    residual = op_norm(A - as_matrix(col.A, "A"))
    if residual > tol.compare:
        raise DimensionMismatchError("row and column contractions must share the same A", residual)
    B = as_matrix(row.B, "B")
    C = as_matrix(col.C, "C")

    D_A, defect_A = defect_pair(A, tol)
    D_A_star, defect_A_star = defect_pair(adjoint(A), tol)

    gamma1_full = solve_on_range(D_A_star, B, tol)
    gamma2_full = adjoint(solve_on_range(D_A, adjoint(C), tol))
    for name, G in (("Gamma_1", gamma1_full), ("Gamma_2", gamma2_full)):
        norm = op_norm(G)
        if norm > 1.0 + tol.contraction:
            raise NotContractionError(
                f"{name} has norm {norm:.12g}; the given row/column is not a contraction", norm - 1.0
            )

    D_gamma1, defect_gamma1 = defect_pair(gamma1_full, tol)
    D_gamma2_star, defect_gamma2_star = defect_pair(adjoint(gamma2_full), tol)
    logger.debug(
        "extract_gammas: dim D_A=%d, D_A*=%d, D_G1=%d, D_G2*=%d",
        defect_A.dim, defect_A_star.dim, defect_gamma1.dim, defect_gamma2_star.dim,
    )
    return CornerData(
        A=A,
        gamma1=adjoint(defect_A_star.basis) @ gamma1_full,
        gamma2=gamma2_full @ defect_A.basis,
        D_A=D_A,
        defect_A=defect_A,
        D_A_star=D_A_star,
        defect_A_star=defect_A_star,
        D_gamma1=D_gamma1,
        defect_gamma1=defect_gamma1,
        D_gamma2_star=D_gamma2_star,
        defect_gamma2_star=defect_gamma2_star,
        gamma1_full=gamma1_full,
        gamma2_full=gamma2_full,
    )


def complete_corner(corner: CornerData, gamma, tol: Tolerance = DEFAULT_TOLERANCE) -> np.ndarray:
    """The completion T(Gamma) for a contraction Gamma: D_{Gamma_1} -> D_{Gamma_2*}."""
    G = np.asarray(gamma, dtype=complex)
    if G.size == 0 and 0 in corner.gamma_shape:
        # zero-dimensional defect: the unique empty map
        G = np.zeros(corner.gamma_shape, dtype=complex)
    else:
        G = as_matrix(G, "Gamma")
    _dims_match(G, *corner.gamma_shape, "Gamma")
    check_contraction(G, tol, "Gamma")
    E2 = corner.defect_gamma2_star.basis
    E1 = corner.defect_gamma1.basis
    lower_right = -corner.gamma2_full @ adjoint(corner.A) @ corner.gamma1_full
    if G.size:
        lower_right = lower_right + corner.D_gamma2_star @ E2 @ G @ adjoint(E1) @ corner.D_gamma1
    return np.block([[corner.A, corner.B], [corner.C, lower_right]])


def block_psd_zero_corner(M, N, tol: Tolerance = DEFAULT_TOLERANCE) -> bool:
    """[[0, M], [M^H, N]] >= 0 iff M = 0 and N >= 0."""
    Mm, Nm = as_matrix(M, "M"), as_matrix(N, "N")
    _dims_match(Nm, Mm.shape[1], Mm.shape[1], "N")
    return op_norm(Mm) <= tol.compare and is_psd(Nm, tol)
