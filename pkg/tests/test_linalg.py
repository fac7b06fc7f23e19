import numpy as np
import pytest
from hypothesis import given, seed, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from kreinext.services.linalg import (
    Subspace,
    SubspaceRelation,
    adjoint,
    column_basis,
    complement,
    defect_pair,
    hermitian_eig,
    is_psd,
    loewner_le,
    orthonormal_basis,
    psd_sqrt,
    solve_on_range,
    subspace_relation,
    subspace_sum,
)
from kreinext.shared import (
    DimensionMismatchError,
    InconsistentFactorizationError,
    MalformedInputError,
    NotContractionError,
    NotHermitianError,
    NotPSDError,
)

DIM = 4
entries = st.floats(min_value=-1.0, max_value=1.0, allow_nan=False)


def _e(i, n=2):
    v = np.zeros((n, 1), dtype=complex)
    v[i, 0] = 1.0
    return Subspace(n, v)


def _unitary(n, rng):
    Q, _ = np.linalg.qr(rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n)))
    return Q


def test_orthonormal_basis_single_column():
    U = orthonormal_basis([[1.0], [0.0]])
    assert U.dim == 1
    np.testing.assert_allclose(np.abs(U.basis[:, 0]), [1.0, 0.0])


def test_orthonormal_basis_drops_proportional_columns():
    U = orthonormal_basis([[1.0, 2.0], [0.0, 0.0]])
    assert U.dim == 1
    assert subspace_relation(U, _e(0)) is SubspaceRelation.EQUAL


def test_orthonormal_basis_gram_matrix():
    U = orthonormal_basis([[1.0, 1.0], [1.0, -1.0]])
    assert U.dim == 2
    np.testing.assert_allclose(adjoint(U.basis) @ U.basis, np.eye(2), atol=1e-12)


def test_orthonormal_basis_zero_matrix_has_rank_zero():
    assert orthonormal_basis(np.zeros((3, 2))).dim == 0


def test_orthonormal_basis_rejects_nan():
    with pytest.raises(MalformedInputError):
        orthonormal_basis([[np.nan], [1.0]])


def test_column_basis_keeps_widely_scaled_columns():
    U, sigma_min = column_basis(np.diag([1e9, 1.0]))
    assert U.dim == 2
    assert sigma_min == pytest.approx(1.0)
    assert orthonormal_basis(np.diag([1e9, 1.0])).dim == 1


def test_column_basis_reports_dependent_columns():
    U, sigma_min = column_basis([[1.0, 2.0], [0.0, 0.0]])
    assert U.dim == 2
    assert sigma_min <= 1e-15
    empty, sigma_min = column_basis(np.zeros((3, 0)))
    assert empty.dim == 0 and sigma_min == float("inf")


def test_hermitian_eig_examples():
    np.testing.assert_allclose(hermitian_eig(np.eye(2))[0], [1.0, 1.0])
    np.testing.assert_allclose(hermitian_eig(np.diag([3.0, 1.0]))[0], [1.0, 3.0])
    np.testing.assert_allclose(hermitian_eig([[0.0, 1.0], [1.0, 0.0]])[0], [-1.0, 1.0], atol=1e-12)


def test_hermitian_eig_rejects_non_hermitian():
    with pytest.raises(NotHermitianError):
        hermitian_eig([[0.0, 1.0], [0.0, 0.0]])


def test_hermitian_eig_rejects_non_square():
    with pytest.raises(DimensionMismatchError):
        hermitian_eig(np.zeros((2, 3)))


def test_hermitian_eig_degenerate_cluster_is_deterministic():
    rng = np.random.default_rng(3)
    U = _unitary(4, rng)
    M = (U * np.array([1.0, 1.0, 1.0, 2.0])) @ adjoint(U)
    _, V1 = hermitian_eig(M)
    _, V2 = hermitian_eig(M.copy())
    np.testing.assert_array_equal(V1, V2)


@seed(1)
@settings(max_examples=50, deadline=None)
@given(real=arrays(np.float64, (DIM, DIM), elements=entries), imag=arrays(np.float64, (DIM, DIM), elements=entries))
def test_hermitian_eig_reconstructs(real, imag):
    X = real + 1j * imag
    M = (X + adjoint(X)) / 2
    eigenvalues, V = hermitian_eig(M)
    assert np.all(np.diff(eigenvalues) >= 0)
    np.testing.assert_allclose(adjoint(V) @ V, np.eye(DIM), atol=1e-10)
    np.testing.assert_allclose((V * eigenvalues) @ adjoint(V), M, atol=1e-7)


def test_psd_sqrt_examples():
    np.testing.assert_allclose(psd_sqrt(np.eye(3)), np.eye(3), atol=1e-12)
    np.testing.assert_allclose(psd_sqrt(np.zeros((2, 2))), np.zeros((2, 2)), atol=1e-12)
    np.testing.assert_allclose(psd_sqrt(np.diag([4.0, 0.25])), np.diag([2.0, 0.5]), atol=1e-12)


def test_psd_sqrt_clamps_roundoff_and_rejects_negative():
    np.testing.assert_allclose(psd_sqrt(np.diag([1.0, -1e-12])), np.diag([1.0, 0.0]), atol=1e-12)
    with pytest.raises(NotPSDError):
        psd_sqrt(np.diag([1.0, -0.1]))


@seed(2)
@settings(max_examples=50, deadline=None)
@given(real=arrays(np.float64, (DIM, DIM), elements=entries), imag=arrays(np.float64, (DIM, DIM), elements=entries))
def test_psd_sqrt_squares_back(real, imag):
    X = real + 1j * imag
    M = X @ adjoint(X)
    root = psd_sqrt(M)
    assert is_psd(root)
    np.testing.assert_allclose(root @ root, M, atol=1e-7)


def test_defect_pair_zero_contraction():
    D, space = defect_pair(np.zeros((3, 3)))
    np.testing.assert_allclose(D, np.eye(3), atol=1e-12)
    assert space.dim == 3


def test_defect_pair_unitary_has_trivial_defect():
    D, space = defect_pair(_unitary(3, np.random.default_rng(5)))
    np.testing.assert_allclose(D, np.zeros((3, 3)), atol=1e-12)
    assert space.dim == 0


def test_defect_pair_diagonal():
    D, space = defect_pair(np.diag([0.6, 0.8]))
    np.testing.assert_allclose(D, np.diag([0.8, 0.6]), atol=1e-12)
    assert space.dim == 2


def test_defect_pair_rejects_expansion():
    with pytest.raises(NotContractionError):
        defect_pair(np.diag([1.5, 0.2]))


@seed(3)
@settings(max_examples=50, deadline=None)
@given(real=arrays(np.float64, (3, DIM), elements=entries), imag=arrays(np.float64, (3, DIM), elements=entries))
def test_defect_identity(real, imag):
    C = real + 1j * imag
    C = C / max(1.0, np.linalg.norm(C, 2))
    D, _ = defect_pair(C)
    np.testing.assert_allclose(adjoint(D) @ D + adjoint(C) @ C, np.eye(DIM), atol=1e-7)


def test_solve_on_range_examples():
    X = np.array([[1.0, 2.0], [3.0, 4.0]])
    np.testing.assert_allclose(solve_on_range(np.eye(2), X), X, atol=1e-12)
    np.testing.assert_allclose(solve_on_range(np.diag([2.0, 0.0]), [[4.0], [0.0]]), [[2.0], [0.0]], atol=1e-12)
    with pytest.raises(InconsistentFactorizationError):
        solve_on_range(np.diag([2.0, 0.0]), [[0.0], [1.0]])


def test_solve_on_range_multiplies_back():
    rng = np.random.default_rng(11)
    B = rng.standard_normal((4, 2)) + 1j * rng.standard_normal((4, 2))
    D = B @ adjoint(B)
    X = D @ (rng.standard_normal((4, 3)) + 1j * rng.standard_normal((4, 3)))
    G = solve_on_range(D, X)
    np.testing.assert_allclose(D @ G, X, atol=1e-8)
    # columns of G lie in ran(D)
    P = orthonormal_basis(D).projection()
    np.testing.assert_allclose(P @ G, G, atol=1e-8)


def test_subspace_relation_examples():
    full = Subspace.full(2)
    assert subspace_relation(_e(0), full) is SubspaceRelation.U_IN_V
    assert subspace_relation(full, _e(0)) is SubspaceRelation.V_IN_U
    assert subspace_relation(_e(0), _e(0)) is SubspaceRelation.EQUAL
    assert subspace_relation(_e(0), _e(1)) is SubspaceRelation.INCOMPARABLE


def test_subspace_relation_dimension_mismatch():
    with pytest.raises(DimensionMismatchError):
        subspace_relation(_e(0, 2), _e(0, 3))


@seed(4)
@settings(max_examples=30, deadline=None)
@given(real=arrays(np.float64, (5, 2), elements=entries))
def test_subspace_relation_reflexive(real):
    U = orthonormal_basis(real)
    assert subspace_relation(U, U) is SubspaceRelation.EQUAL


def test_complement_and_sum_span_everything():
    U = orthonormal_basis([[1.0], [1.0], [0.0]])
    W = complement(U)
    assert W.dim == 2
    np.testing.assert_allclose(adjoint(U.basis) @ W.basis, np.zeros((1, 2)), atol=1e-12)
    assert subspace_relation(subspace_sum(U, W), Subspace.full(3)) is SubspaceRelation.EQUAL


def test_loewner_order():
    assert loewner_le(np.diag([0.0, 0.0]), np.diag([1.0, 0.0]))
    assert not loewner_le(np.diag([0.5, 0.0]), np.diag([0.0, 0.5]))
    assert not loewner_le(np.diag([0.0, 0.5]), np.diag([0.5, 0.0]))
