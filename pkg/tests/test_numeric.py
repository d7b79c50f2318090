import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fibration_forge.exceptions import RankDeficientError, RealEigenvalueError
from fibration_forge.numeric import (
    bezout_projectors,
    eigen_split,
    has_real_eigenvalue,
    min_abs_imag_eigenvalue,
    orthonormalize,
    range_basis,
    span_residual,
)

from conftest import random_no_real_map

R90 = np.array([[0.0, -1.0], [1.0, 0.0]])


def eig_projector_oracle(T):
    """Spectral projector onto the upper half-plane eigenvectors (diagonalizable T)."""
    w, V = np.linalg.eig(T)
    D = np.diag((w.imag > 0).astype(complex))
    return V @ D @ np.linalg.inv(V)


@pytest.mark.parametrize("dim", [2, 4, 6, 8])
def test_eigen_split_is_invariant_upper_half(dim, rng):
    T = random_no_real_map(dim, rng)
    split = eigen_split(T)
    B = split.basis_plus
    assert B.shape == (dim, dim // 2)
    np.testing.assert_allclose(B.conj().T @ B, np.eye(dim // 2), atol=1e-12)
    # invariance: T B = B (B^H T B)
    S = B.conj().T @ T @ B
    np.testing.assert_allclose(T @ B, B @ S, atol=1e-10)
    assert np.all(np.linalg.eigvals(S).imag > 0)
    np.testing.assert_array_equal(split.basis_minus, B.conj())


def test_eigen_split_rejects_real_spectrum():
    with pytest.raises(RealEigenvalueError):
        eigen_split(np.eye(4))
    with pytest.raises(RealEigenvalueError):
        bezout_projectors(np.diag([1.0, 2.0]))


def test_projectors_match_eigendecomposition(rng):
    T = random_no_real_map(6, rng)
    Pp, Pm = bezout_projectors(T)
    oracle = eig_projector_oracle(T)
    np.testing.assert_allclose(Pp, oracle, atol=1e-8)
    np.testing.assert_allclose(Pp + Pm, np.eye(6), atol=1e-9)
    np.testing.assert_allclose(Pp @ Pp, Pp, atol=1e-9)
    np.testing.assert_allclose(Pp @ T, T @ Pp, atol=1e-9)
    np.testing.assert_allclose(eigen_split(T).projector_plus(), oracle, atol=1e-8)


def test_non_diagonalizable_map_splits():
    # a Jordan block over the rotation: eigenvalues +-i, each with multiplicity 2
    T = np.block([[R90, np.eye(2)], [np.zeros((2, 2)), R90]])
    split = eigen_split(T)
    Pp, _ = bezout_projectors(T)
    assert span_residual(split.basis_plus, range_basis(Pp, 2)) < 1e-8
    Pp_split = split.projector_plus()
    np.testing.assert_allclose(Pp_split, Pp, atol=1e-8)


def test_projectors_survive_shifted_spectrum(rng):
    # large real shift: the polynomial evaluation needs the affine rescaling
    T = random_no_real_map(8, rng) + 50 * np.eye(8)
    Pp, _ = bezout_projectors(T)
    assert span_residual(eigen_split(T).basis_plus, range_basis(Pp, 4)) < 1e-6


def test_has_real_eigenvalue():
    assert has_real_eigenvalue(np.eye(2))
    assert not has_real_eigenvalue(R90)
    np.testing.assert_allclose(min_abs_imag_eigenvalue(np.stack([R90, 3 * R90])), [1.0, 3.0])


def test_orthonormalize_keeps_orientation(rng):
    M = rng.standard_normal((5, 5))
    Q = orthonormalize(M)
    np.testing.assert_allclose(Q.T @ Q, np.eye(5), atol=1e-12)
    assert np.linalg.det(Q.T @ M) > 0
    # already orthonormal columns come back unchanged
    np.testing.assert_allclose(orthonormalize(Q), Q, atol=1e-12)


def test_orthonormalize_rejects_dependent_columns():
    with pytest.raises(RankDeficientError):
        orthonormalize(np.array([[1.0, 2.0], [1.0, 2.0], [0.0, 0.0]]))


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10_000), st.sampled_from([2, 4, 6]))
def test_split_and_projectors_agree(seed, dim):
    T = random_no_real_map(dim, np.random.default_rng(seed))
    Pp, _ = bezout_projectors(T)
    assert span_residual(eigen_split(T).basis_plus, range_basis(Pp, dim // 2)) < 1e-6
