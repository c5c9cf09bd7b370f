"""Born probabilities, single-basis and linear-inversion estimators.

Every function takes a ``MubSet`` and uses its basis ordering: "the first
M bases" means ``m.bases[:M]``.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field

import numpy as np

from mubtomo.linalg import TOL, as_hermitian
from mubtomo.mub import Q3, MubSet


class InconsistentTableError(ValueError):
    """Probabilities that no density matrix reproduces."""


@dataclass(frozen=True, eq=False)
class ProbabilityTable:
    """Probabilities ``probs[a, k]`` for the first ``M`` bases."""

    dim: int
    probs: np.ndarray = field(repr=False)

    def __post_init__(self):
        p = np.array(self.probs, dtype=float)
        if p.ndim != 2 or p.shape[1] != self.dim:
            raise ValueError(f"probs must have shape (M, {self.dim}), got {p.shape}")
        if not 1 <= p.shape[0] <= self.dim + 1:
            raise ValueError(f"number of measured bases must be in 1..{self.dim + 1}, got {p.shape[0]}")
        bad = np.abs(p.sum(axis=1) - 1.0)
        if bad.max() > TOL.row_sum:
            raise ValueError(f"row {int(bad.argmax()) + 1} sums to {p.sum(axis=1)[bad.argmax()]!r}, not 1")
        if p.min() < -TOL.row_sum or p.max() > 1 + TOL.row_sum:
            raise ValueError("probabilities must lie in [0, 1]")
        p.setflags(write=False)
        object.__setattr__(self, "probs", p)

    @property
    def M(self) -> int:
        return self.probs.shape[0]

    @property
    def w(self) -> np.ndarray:
        """Hyperplane coordinates w[a, k] = p[a, k] - 1/d."""
        return self.probs - 1.0 / self.dim

    def truncated(self, M: int) -> "ProbabilityTable":
        return ProbabilityTable(self.dim, self.probs[:M])

    def to_dict(self) -> dict:
        return {"dim": self.dim, "M": self.M, "probs": self.probs.tolist()}

    @classmethod
    def from_dict(cls, data: dict) -> "ProbabilityTable":
        t = cls(int(data["dim"]), np.asarray(data["probs"], dtype=float))
        if "M" in data and int(data["M"]) != t.M:
            raise ValueError(f"M={data['M']} disagrees with {t.M} probability rows")
        return t

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["alpha", "k", "p"])
        for a, row in enumerate(self.probs):
            for k, p in enumerate(row):
                w.writerow([a + 1, k, format(float(p), ".17g")])
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str) -> "ProbabilityTable":
        rows = list(csv.DictReader(io.StringIO(text)))
        if not rows or set(rows[0]) != {"alpha", "k", "p"}:
            raise ValueError('CSV must have header "alpha,k,p"')
        entries = {(int(r["alpha"]), int(r["k"])): float(r["p"]) for r in rows}
        M = max(a for a, _ in entries)
        d = max(k for _, k in entries) + 1
        probs = np.full((M, d), np.nan)
        for (a, k), p in entries.items():
            probs[a - 1, k] = p
        if np.isnan(probs).any():
            raise ValueError("CSV table is missing entries")
        return cls(d, probs)

    @classmethod
    def loads(cls, text: str) -> "ProbabilityTable":
        stripped = text.lstrip()
        if stripped.startswith("{"):
            return cls.from_dict(json.loads(text))
        return cls.from_csv(text)


def _check_dims(rho: np.ndarray, m: MubSet) -> None:
    if rho.shape != (m.dim, m.dim):
        raise ValueError(f"state of shape {rho.shape} does not match MUB dimension {m.dim}")


def all_probabilities(rho, m: MubSet) -> np.ndarray:
    """Tr(rho P[a, k]) for all d + 1 bases, shape (d + 1, d)."""
    rho = np.asarray(rho, dtype=complex)
    _check_dims(rho, m)
    # Tr(rho P) with P = |v><v| equals <v|rho|v>
    kets = m.bases
    return np.einsum("aik,ij,ajk->ak", kets.conj(), rho, kets).real


def born_probabilities(rho, m: MubSet, M: int) -> ProbabilityTable:
    if not 1 <= M <= m.dim + 1:
        raise ValueError(f"M must be in 1..{m.dim + 1}, got {M}")
    p = all_probabilities(rho, m)[:M]
    # exact row sums; clip roundoff below zero
    p = np.clip(p, 0.0, None)
    p /= p.sum(axis=1, keepdims=True)
    return ProbabilityTable(m.dim, p)


def expand(coeffs: np.ndarray, m: MubSet, start: int = 0) -> np.ndarray:
    """sum_{a, k} coeffs[a, k] P[start + a, k]."""
    coeffs = np.asarray(coeffs, dtype=float)
    proj = m.projectors[start : start + coeffs.shape[0]]
    return np.einsum("ak,akij->ij", coeffs, proj)


def single_basis_estimator(row, m: MubSet, alpha: int = 0) -> np.ndarray:
    """sum_k p_k P[alpha, k] for one measured basis."""
    row = np.asarray(row, dtype=float)
    return expand(row[None], m, start=alpha)


def ulin_matrix(w: np.ndarray, m: MubSet) -> np.ndarray:
    d = m.dim
    return np.eye(d) / d + expand(w, m)


@dataclass(frozen=True, eq=False)
class UlinResult:
    matrix: np.ndarray = field(repr=False)
    min_eigenvalue: float
    M: int

    @property
    def is_physical(self) -> bool:
        return self.min_eigenvalue >= -TOL.psd

    @property
    def eigenvalues(self) -> np.ndarray:
        return np.linalg.eigvalsh(self.matrix)

    @property
    def determinant(self) -> float:
        return float(np.linalg.det(self.matrix).real)


def ulin_estimator(t: ProbabilityTable, m: MubSet) -> UlinResult:
    """Unbiased linear inversion: 1/d for every outcome of the unmeasured bases."""
    if t.dim != m.dim:
        raise ValueError(f"table dimension {t.dim} does not match MUB dimension {m.dim}")
    mat = as_hermitian(ulin_matrix(t.w, m))
    return UlinResult(mat, float(np.linalg.eigvalsh(mat)[0]), t.M)


def ulin_of_state(rho, m: MubSet, M: int) -> np.ndarray:
    """ULIN matrix of the first M bases of ``rho`` (no table validation)."""
    w = all_probabilities(rho, m)[:M] - 1.0 / m.dim
    return ulin_matrix(w, m)


def full_reconstruct(t: ProbabilityTable, m: MubSet) -> np.ndarray:
    """State from a complete table: sum of the d + 1 single-basis estimators minus 1."""
    if t.M != m.dim + 1:
        raise ValueError(f"full reconstruction needs all {m.dim + 1} bases, got {t.M}")
    rho = as_hermitian(expand(t.probs, m) - np.eye(m.dim))
    lo = float(np.linalg.eigvalsh(rho)[0])
    if lo < -TOL.inconsistent_psd:
        raise InconsistentTableError(f"table is not consistent with any state: min eigenvalue {lo:.3e}")
    return rho


def w_coordinates(rho, m: MubSet) -> np.ndarray:
    return all_probabilities(rho, m) - 1.0 / m.dim


def z_coordinates(rho, m: MubSet) -> np.ndarray:
    """Qutrit coordinates z_a = sum_k q^k p[a, k] for all four bases."""
    if m.dim != 3:
        raise ValueError(f"z-coordinates are defined for d = 3 only, got d = {m.dim}")
    return z_from_probs(all_probabilities(rho, m))


def z_from_probs(probs: np.ndarray) -> np.ndarray:
    probs = np.asarray(probs, dtype=float)
    return probs @ (Q3 ** np.arange(3))


def probs_from_z(z) -> np.ndarray:
    """Inverse map p[a, k] = (1 + q^-k z_a + q^k conj(z_a)) / 3."""
    z = np.atleast_1d(np.asarray(z, dtype=complex))
    qk = Q3 ** np.arange(3)
    return ((1 + np.outer(z, qk.conj()) + np.outer(z.conj(), qk)) / 3).real


def table_from_z(z) -> ProbabilityTable:
    return ProbabilityTable(3, probs_from_z(z))
