import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from mubtomo.linalg import (
    TOL,
    NotHermitianError,
    as_hermitian,
    canonical_vector,
    eigen_hermitian,
    hs_inner,
    is_density_matrix,
    jacobi_eigh,
    min_eig_projector,
    random_density_matrix,
    random_pure_state,
)


def _herm(d, seed):
    rng = np.random.default_rng(seed)
    g = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    return g + g.conj().T


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 9), st.integers(0, 10**6))
def test_jacobi_matches_lapack(d, seed):
    a = _herm(d, seed)
    wl = eigen_hermitian(a).eigenvalues
    dec = jacobi_eigh(a)
    assert np.allclose(dec.eigenvalues, wl, atol=1e-11)
    v = dec.eigenvectors
    assert np.allclose(v.conj().T @ v, np.eye(d), atol=1e-10)
    assert np.allclose(dec.reconstruct(), a, atol=1e-10)


@pytest.mark.parametrize("method", ["lapack", "jacobi"])
def test_eigen_sorted_and_unitary(method):
    a = _herm(6, 1)
    dec = eigen_hermitian(a, method=method)
    assert np.all(np.diff(dec.eigenvalues) >= 0)
    assert np.allclose(dec.eigenvectors.conj().T @ dec.eigenvectors, np.eye(6), atol=1e-10)


def test_non_hermitian_rejected():
    a = np.array([[1, 2], [0, 1]], dtype=complex)
    with pytest.raises(NotHermitianError):
        as_hermitian(a)
    with pytest.raises(NotHermitianError):
        eigen_hermitian(a)


def test_hs_inner():
    rng = np.random.default_rng(3)
    a, b = random_density_matrix(4, rng), random_density_matrix(4, rng)
    assert hs_inner(a, b) == pytest.approx(np.trace(a @ b).real, abs=1e-14)
    assert hs_inner(a, a) > 0
    with pytest.raises(ValueError):
        hs_inner(a, np.eye(3))


def test_min_eig_projector_nondegenerate():
    a = np.diag([3.0, -1.0, 2.0]).astype(complex)
    p = min_eig_projector(a)
    assert np.allclose(p, np.diag([0, 1, 0]))


def test_min_eig_projector_tie_break_is_basis_independent():
    # degenerate lowest eigenspace spanned by e0, e1; any rotation of that basis gives the same answer
    rng = np.random.default_rng(5)
    u, _ = np.linalg.qr(rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2)))
    basis = np.zeros((3, 2), complex)
    basis[:2] = u
    v = canonical_vector(basis)
    assert np.allclose(v, [1, 0, 0])
    a = np.diag([0.0, 0.0, 1.0]).astype(complex)
    assert np.allclose(min_eig_projector(a), np.diag([1, 0, 0]))


def test_tie_break_phase():
    basis = np.array([[0.0], [1j]], dtype=complex)
    v = canonical_vector(basis)
    assert np.allclose(v, [0, 1])


def test_random_states_are_density_matrices():
    rng = np.random.default_rng(7)
    for d in (2, 3, 5):
        assert is_density_matrix(random_pure_state(d, rng))
        assert is_density_matrix(random_density_matrix(d, rng))
    assert not is_density_matrix(np.diag([1.2, -0.2]))
    assert TOL.psd == 1e-10
