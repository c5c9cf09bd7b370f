from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from mubtomo.estimators.measures import xlogx
from mubtomo.linalg import TOL, von_neumann_from_eigenvalues
from mubtomo.mub import MubSet
from mubtomo.tomography import ProbabilityTable, all_probabilities, z_from_probs


def shannon_unmeasured(rho, m: MubSet, M: int) -> float:
    """Shannon entropy (natural log) of the outcomes of bases M+1 .. d+1.

    Each basis contributes the entropy of its own normalized distribution.
    """
    probs = all_probabilities(rho, m)[M:]
    return float(-xlogx(np.clip(probs, 0.0, None)).sum())


def von_neumann_entropy(rho) -> float:
    """-Tr(rho ln rho), with 0 ln 0 = 0; tiny negative eigenvalues are ignored."""
    return von_neumann_from_eigenvalues(np.linalg.eigvalsh(np.asarray(rho)))


@dataclass(eq=False)
class EstimatorResult:
    kind: str
    estimator: np.ndarray = field(repr=False)
    table: ProbabilityTable = field(repr=False)
    mub: MubSet = field(repr=False)
    iterations: int = 0
    residual: float = 0.0
    converged: bool = True
    measure: str | None = None
    seed: int | None = None
    extras: dict = field(default_factory=dict, repr=False)

    @property
    def dim(self) -> int:
        return self.table.dim

    @property
    def M(self) -> int:
        return self.table.M

    @property
    def eigenvalues(self) -> np.ndarray:
        return np.linalg.eigvalsh(self.estimator)

    @property
    def min_eigenvalue(self) -> float:
        return float(self.eigenvalues[0])

    @property
    def shannon_unmeasured(self) -> float:
        return shannon_unmeasured(self.estimator, self.mub, self.M)

    @property
    def vn_entropy(self) -> float:
        return von_neumann_entropy(self.estimator)

    @property
    def constraint_violation(self) -> float:
        p = all_probabilities(self.estimator, self.mub)[: self.M]
        return float(np.abs(p - self.table.probs).max())

    @property
    def is_physical(self) -> bool:
        return self.min_eigenvalue >= -TOL.psd

    @property
    def z_coords(self) -> np.ndarray | None:
        if self.dim != 3:
            return None
        return z_from_probs(all_probabilities(self.estimator, self.mub))

    def to_dict(self) -> dict:
        out = {
            "kind": self.kind,
            "dim": self.dim,
            "M": self.M,
            "measure": self.measure,
            "matrix": self.estimator,
            "eigenvalues": self.eigenvalues,
            "shannon_unmeasured": self.shannon_unmeasured,
            "vn_entropy": self.vn_entropy,
            "min_eigenvalue": self.min_eigenvalue,
            "constraint_violation": self.constraint_violation,
            "iterations": self.iterations,
            "residual": self.residual,
            "converged": self.converged,
            "seed": self.seed,
        }
        if self.dim == 3:
            out["z_coords"] = self.z_coords
        diag = {k: v for k, v in self.extras.items() if not k.startswith("_")}
        if diag:
            out["diagnostics"] = diag
        return out
