"""Hermitian matrix arithmetic shared by every other module.

Matrices are plain ``numpy`` complex arrays; this module only adds the
checks, the deterministic eigen-decomposition and a few state helpers.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np


@dataclass(frozen=True)
class Tolerances:
    """Numerical thresholds used across the package."""

    hermitian: float = 1e-12
    trace: float = 1e-12
    psd: float = 1e-10
    jacobi_offdiag: float = 1e-13
    degeneracy: float = 1e-10
    row_sum: float = 1e-12
    constraint: float = 1e-8
    inconsistent_psd: float = 1e-8
    mub: float = 1e-12


TOL = Tolerances()


class NotHermitianError(ValueError):
    def __init__(self, deviation: float):
        super().__init__(f"matrix is not Hermitian: max |A - A^H| = {deviation:.3e}")
        self.deviation = deviation


class EigenDecomposition(NamedTuple):
    eigenvalues: np.ndarray  # ascending, real
    eigenvectors: np.ndarray  # columns

    def reconstruct(self) -> np.ndarray:
        v = self.eigenvectors
        return (v * self.eigenvalues) @ v.conj().T


def hermitian_deviation(a: np.ndarray) -> float:
    a = np.asarray(a)
    return float(np.max(np.abs(a - a.conj().T))) if a.size else 0.0


def as_hermitian(a, tol: float = TOL.hermitian) -> np.ndarray:
    """Validate ``a`` as Hermitian (relative to its scale) and symmetrize it."""
    a = np.asarray(a, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {a.shape}")
    dev = hermitian_deviation(a)
    scale = max(1.0, float(np.max(np.abs(a)))) if a.size else 1.0
    if dev > tol * scale:
        raise NotHermitianError(dev)
    return 0.5 * (a + a.conj().T)


def _jacobi_rotate(a: np.ndarray, v: np.ndarray, p: int, q: int) -> None:
    b = a[p, q]
    r = abs(b)
    phase = b / r
    tau = (a[q, q].real - a[p, p].real) / (2.0 * r)
    t = (1.0 if tau >= 0 else -1.0) / (abs(tau) + np.sqrt(1.0 + tau * tau))
    c = 1.0 / np.sqrt(1.0 + t * t)
    s = t * c
    # g = diag(1, conj(phase)) @ [[c, s], [-s, c]]
    g = np.array([[c, s], [-s * phase.conjugate(), c * phase.conjugate()]])
    idx = [p, q]
    a[:, idx] = a[:, idx] @ g
    a[idx, :] = g.conj().T @ a[idx, :]
    a[p, q] = a[q, p] = 0.0
    a[p, p] = a[p, p].real
    a[q, q] = a[q, q].real
    v[:, idx] = v[:, idx] @ g


def jacobi_eigh(a, tol: float = TOL.jacobi_offdiag, max_sweeps: int = 100) -> EigenDecomposition:
    """Cyclic Jacobi eigen-decomposition of a complex Hermitian matrix.

    Sweeps over all (p, q) pairs with unitary 2x2 rotations until the
    largest off-diagonal magnitude drops below ``tol`` times the matrix scale.
    """
    a = as_hermitian(a).copy()
    n = a.shape[0]
    v = np.eye(n, dtype=complex)
    scale = max(1.0, float(np.linalg.norm(a)))
    for _ in range(max_sweeps):
        off = np.abs(a - np.diag(np.diag(a)))
        if n < 2 or off.max() < tol * scale:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                if abs(a[p, q]) > 0.1 * tol * scale:
                    _jacobi_rotate(a, v, p, q)
    else:
        raise RuntimeError("Jacobi sweeps did not converge")
    w = np.diag(a).real
    order = np.argsort(w, kind="stable")
    return EigenDecomposition(w[order], v[:, order])


def eigen_hermitian(a, method: str = "lapack") -> EigenDecomposition:
    """Eigenvalues (ascending) and orthonormal eigenvectors of a Hermitian matrix.

    ``method="jacobi"`` uses the in-package cyclic Jacobi solver; the default
    delegates to LAPACK (``numpy.linalg.eigh``), which is what the iterative
    algorithms call in their inner loops.
    """
    if method == "jacobi":
        return jacobi_eigh(a)
    if method != "lapack":
        raise ValueError(f"unknown eigen method {method!r}")
    w, v = np.linalg.eigh(as_hermitian(a))
    return EigenDecomposition(w, v)


def hs_inner(a, b) -> float:
    """Hilbert-Schmidt inner product Tr(AB) of two Hermitian matrices."""
    a = np.asarray(a)
    b = np.asarray(b)
    if a.shape != b.shape:
        raise ValueError(f"dimension mismatch: {a.shape} vs {b.shape}")
    # Tr(AB) = sum_jk A_jk B_kj = sum_jk A_jk conj(B_jk) for Hermitian B
    return float(np.real(np.vdot(b, a)))


def canonical_vector(basis: np.ndarray, tol: float = TOL.degeneracy) -> np.ndarray:
    """Deterministic unit vector from the span of the columns of ``basis``.

    Picks the vector whose first non-negligible component has the largest
    possible magnitude (the normalized projection of the first unit vector
    that the subspace does not annihilate), phased to make that component
    real positive. The result does not depend on which orthonormal basis of
    the subspace was supplied.
    """
    for j in range(basis.shape[0]):
        vec = basis @ basis[j].conj()
        norm = np.linalg.norm(vec)
        if norm > np.sqrt(tol):
            vec = vec / norm
            return vec * (abs(vec[j]) / vec[j])
    raise ValueError("empty subspace")


def min_eig_projector(a, tol: float = TOL.degeneracy) -> np.ndarray:
    """Rank-one projector onto an eigenvector of the smallest eigenvalue."""
    w, v = eigen_hermitian(a)
    return _min_projector_from(w, v, tol)


def _min_projector_from(w: np.ndarray, v: np.ndarray, tol: float) -> np.ndarray:
    degenerate = w <= w[0] + tol * max(1.0, abs(w[0]))
    if degenerate.sum() == 1:
        vec = v[:, 0]
    else:
        vec = canonical_vector(v[:, degenerate], tol)
    return np.outer(vec, vec.conj())


def is_density_matrix(rho, tol: Tolerances = TOL) -> bool:
    rho = np.asarray(rho)
    if hermitian_deviation(rho) > tol.hermitian:
        return False
    if abs(np.trace(rho).real - 1.0) > tol.trace:
        return False
    return bool(np.linalg.eigvalsh(rho)[0] >= -tol.psd)


def min_eigenvalue(a) -> float:
    return float(np.linalg.eigvalsh(as_hermitian(a))[0])


def random_pure_state(d: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-random pure state as a density matrix."""
    psi = rng.normal(size=d) + 1j * rng.normal(size=d)
    psi /= np.linalg.norm(psi)
    return np.outer(psi, psi.conj())


def random_density_matrix(d: int, rng: np.random.Generator, rank: int | None = None) -> np.ndarray:
    """Random mixed state from the induced (Ginibre) measure."""
    k = d if rank is None else rank
    g = rng.normal(size=(d, k)) + 1j * rng.normal(size=(d, k))
    rho = g @ g.conj().T
    return rho / np.trace(rho).real


def random_traceless_hermitian(d: int, rng: np.random.Generator) -> np.ndarray:
    g = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    h = g + g.conj().T
    h -= np.trace(h).real / d * np.eye(d)
    return h / np.linalg.norm(h)


def von_neumann_from_eigenvalues(w: np.ndarray) -> float:
    w = np.asarray(w, dtype=float)
    w = w[w > 0]
    return float(-np.sum(w * np.log(w)))
