"""Reference states used by the reproduction harness and the tests.

All states are built analytically; qutrit states refer to the qutrit bases
returned by ``build_mub(3)``.
"""

from __future__ import annotations

import numpy as np

from mubtomo.mub import Q3, MubSet, build_mub
from mubtomo.tomography import ProbabilityTable, table_from_z


def qutrit_pure_example() -> np.ndarray:
    """(|0> - |1>)(<0| - <1|)/2: pure state whose M = 2, 3 ULIN estimators are unphysical."""
    return np.array([[1, -1, 0], [-1, 1, 0], [0, 0, 0]], dtype=complex) / 2


def rho_w(w: float) -> np.ndarray:
    """Mixture (1 - w) rho + w I/3 of the pure qutrit example with white noise."""
    if not 0 <= w <= 1:
        raise ValueError("w must lie in [0, 1]")
    return (1 - w) * qutrit_pure_example() + w * np.eye(3) / 3


def rho_w_z(w: float) -> np.ndarray:
    """z-coordinates of ``rho_w``: z1 = z2 = z3 = -(1 - w)/2, z4 = -(1 - w) q^2/2."""
    a = -(1 - w) / 2
    return np.array([a, a, a, a * Q3**2])


def two_basis_mixture(lam1: float, j: int = 0, k: int = 0, m: MubSet | None = None) -> np.ndarray:
    """lam1 P[1, j] + (1 - lam1) P[2, k]."""
    m = build_mub(3) if m is None else m
    return lam1 * m.projector(0, j) + (1 - lam1) * m.projector(1, k)


def computational_superposition(d: int) -> np.ndarray:
    """(|0> - |1>)(<0| - <1|)/2 in dimension d; its M = d ULIN estimator has eigenvalue 1/d - 1/2."""
    v = np.zeros(d, dtype=complex)
    v[0], v[1] = 1, -1
    return np.outer(v, v.conj()) / 2


def first_basis_superposition(m: MubSet) -> np.ndarray:
    """Projector on (|psi_10> + |psi_11>)/sqrt(2), two kets of the first basis."""
    v = (m.ket(0, 0) + m.ket(0, 1)) / np.sqrt(2)
    return np.outer(v, v.conj())


# Qutrit tables with three measured bases, given by (z1, z2, z3). State 1 uses
# Im z3 = -0.165: with +0.165 no z4 makes a positive semidefinite matrix.
THREE_BASIS_Z = {
    "rho_w=1/4": np.array([-3 / 8, -3 / 8, -3 / 8], dtype=complex),
    "state 1": np.array([0.160 - 0.321j, 0.571 - 0.192j, 0.314 - 0.165j]),
    "state 2": np.array([-0.345 + 0.0574j, 0.303 + 0.328j, 0.00057 - 0.294j]),
}

STATE1_Z_AS_PRINTED = np.array([0.160 - 0.321j, 0.571 - 0.192j, 0.314 + 0.165j])


def three_basis_table(name: str) -> ProbabilityTable:
    return table_from_z(THREE_BASIS_Z[name])


# Reference values.
TABLE1 = {
    # (w, M): (z3, z4) of the entropic least-bias estimator
    (0.1, 2): (-0.313, 0.156 + 0.271j),
    (0.1, 3): (-0.450, 0.174 + 0.303j),
    (0.2, 2): (-0.126, 0.063 + 0.109j),
    (0.2, 3): (-0.400, 0.100 + 0.173j),
}

TABLE2 = {
    # estimator row: z4 for (rho_w=1/4, state 1, state 2)
    "lb": (0.067 + 0.106j, 0.080 + 0.299j, 0.073 - 0.136j),
    "pur": (0.067 + 0.106j, 0.093 + 0.295j, 0.073 - 0.136j),
    "bet": (0.067 + 0.106j, 0.128 + 0.289j, 0.080 - 0.132j),
    "vN": (0.120 + 0.208j, 0.090 + 0.309j, 0.104 - 0.204j),
    "mineig": (0.187 + 0.325j, 0.003 + 0.438j, 0.122 - 0.283j),
    "bm": (0.176 + 0.305j, 0.021 + 0.418j, 0.122 - 0.279j),
}

LAMBDA_MIN_LANDMARKS = {
    (4, 2): -0.25,
    (7, 2): -0.1394,
}
FIRST_BASIS_SUPERPOSITION_7_2 = -0.1250

COUNTEREXAMPLE = {
    "ulin_entropy": 0.5157,
    "max_vn_entropy": 0.6370,
    "z_hat": -0.09466,
}

PHYSICAL_THRESHOLDS = {2: 0.2679, 3: 1 / 3}
