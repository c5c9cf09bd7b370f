"""Most negative eigenvalue a ULIN estimator can have.

lambda_min(d, M) = min over states rho, sigma of Tr(U_M[rho] sigma), where
U_M[rho] is the ULIN estimator built from the first M bases of rho. The
minimum is found by alternating exact minimizations:

  S1: sigma <- projector on the lowest eigenvector of U_M[rho]
  S2: rho   <- projector on the lowest eigenvector of U_M[sigma]

which is a descent on a bilinear objective and can stall at local minima,
hence many random restarts. Restarts run as one batched computation.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from mubtomo.linalg import TOL, canonical_vector
from mubtomo.mub import MubSet, build_mub
from mubtomo.tomography import ulin_of_state

log = logging.getLogger(__name__)

SATURATION_TOL = 1e-6


@dataclass(eq=False)
class LambdaMinResult:
    d: int
    M: int
    lambda_min: float
    optimizer_rho: np.ndarray = field(repr=False)
    optimizer_sigma: np.ndarray = field(repr=False)
    restarts_used: int
    residual: float
    converged: bool
    iterations: int

    @property
    def lower_bound(self) -> float:
        """-(M - 1)/d."""
        return -(self.M - 1) / self.d

    @property
    def conjectured_bound(self) -> float:
        """-min((M - 1)/d, 1/2 - 1/d)."""
        return -min((self.M - 1) / self.d, 0.5 - 1.0 / self.d)

    @property
    def bound_saturated(self) -> bool:
        return abs(self.lambda_min - self.lower_bound) < SATURATION_TOL

    @property
    def marker(self) -> str:
        if self.M == self.d and abs(self.lambda_min - (1.0 / self.d - 0.5)) < SATURATION_TOL:
            return "M=d-analytic"
        return "saturated" if self.bound_saturated else "strict"

    def to_dict(self, states: bool = True) -> dict:
        out = {
            "d": self.d,
            "M": self.M,
            "lambda_min": self.lambda_min,
            "saturated": self.bound_saturated,
            "marker": self.marker,
            "restarts": self.restarts_used,
            "residual": self.residual,
            "converged": self.converged,
            "iterations": self.iterations,
        }
        if states:
            out["optimizer_rho"] = self.optimizer_rho
            out["optimizer_sigma"] = self.optimizer_sigma
        return out


class _Ulin:
    """Batched ULIN map for pure states."""

    def __init__(self, m: MubSet, M: int):
        d = m.dim
        self.d = d
        self.M = M
        self.kets = np.swapaxes(m.bases[:M], 1, 2).reshape(M * d, d).T  # (d, M d)
        self.kets_h = self.kets.conj().T

    def of_kets(self, psi: np.ndarray) -> np.ndarray:
        """U_M[|psi><psi|] for psi of shape (R, d)."""
        k = self.kets
        w = np.abs(psi.conj() @ k) ** 2 - 1.0 / self.d  # (R, M d)
        return np.eye(self.d) / self.d + (k * w[:, None, :]) @ self.kets_h


def _lowest(u: np.ndarray, tol: float = TOL.degeneracy):
    """Lowest eigenvalue and deterministically tie-broken eigenvector per batch row."""
    w, v = np.linalg.eigh(u)
    vec = v[:, :, 0].copy()
    deg = w[:, 1] - w[:, 0] <= tol * np.maximum(1.0, np.abs(w[:, 0])) if w.shape[1] > 1 else np.zeros(len(w), bool)
    for r in np.flatnonzero(deg):
        sel = w[r] <= w[r, 0] + tol * max(1.0, abs(w[r, 0]))
        vec[r] = canonical_vector(v[r][:, sel], tol)
    return w[:, 0], vec


def _defect(u: np.ndarray, vec: np.ndarray) -> np.ndarray:
    """|| U v - <v|U|v> v || for each batch row (the pair-equation defect for a pure state)."""
    uv = np.einsum("rij,rj->ri", u, vec)
    lam = np.einsum("ri,ri->r", vec.conj(), uv).real
    return np.linalg.norm(uv - lam[:, None] * vec, axis=1)


def _iterate(ulin: _Ulin, u0: np.ndarray, tol: float, max_iter: int, window: int = 5):
    """Run S1/S2 from the ULIN matrices u0 (R, d, d); returns per-row arrays."""
    r = u0.shape[0]
    d = ulin.d
    obj = np.full(r, np.inf)
    residual = np.full(r, np.inf)
    iters = np.zeros(r, dtype=int)
    done = np.zeros(r, dtype=bool)
    history = np.full((r, window + 1), np.inf)
    psi = np.zeros((r, d), complex)
    phi = np.zeros((r, d), complex)
    u_rho = u0.copy()
    for n in range(max_iter):
        act = np.flatnonzero(~done)
        if act.size == 0:
            break
        # S1 and S2
        _, phi_a = _lowest(u_rho[act])
        u_sigma = ulin.of_kets(phi_a)
        lam, psi_a = _lowest(u_sigma)
        u_next = ulin.of_kets(psi_a)
        res = np.maximum(_defect(u_next, phi_a), _defect(u_sigma, psi_a))
        phi[act], psi[act], obj[act], residual[act] = phi_a, psi_a, lam, res
        u_rho[act] = u_next
        iters[act] = n + 1
        history[act] = np.roll(history[act], -1, axis=1)
        history[act, -1] = lam
        stalled = np.abs(history[act, 0] - history[act, -1]) < 1e-14
        finished = (res < tol) | stalled
        done[act[finished]] = True
    return obj, psi, phi, residual, iters, done


def _result(m: MubSet, M: int, obj, psi, phi, residual, iters, done, restarts: int) -> LambdaMinResult:
    i = int(np.argmin(obj))
    return LambdaMinResult(
        d=m.dim,
        M=M,
        lambda_min=float(obj[i]),
        optimizer_rho=np.outer(psi[i], psi[i].conj()),
        optimizer_sigma=np.outer(phi[i], phi[i].conj()),
        restarts_used=restarts,
        residual=float(residual[i]),
        converged=bool(done[i]),
        iterations=int(iters.max()),
    )


def _check_M(m: MubSet, M: int) -> None:
    if not 1 <= M <= m.dim + 1:
        raise ValueError(f"M must be in 1..{m.dim + 1}, got {M}")


def lambda_min_iterate(m: MubSet, M: int, rho0, tol: float = 1e-10, max_iter: int = 10_000) -> LambdaMinResult:
    """Alternating iteration from one starting state (pure or mixed)."""
    _check_M(m, M)
    rho0 = np.asarray(rho0, dtype=complex)
    u0 = ulin_of_state(rho0, m, M)[None]
    out = _iterate(_Ulin(m, M), u0, tol, max_iter)
    res = _result(m, M, *out, restarts=1)
    if not res.converged:
        log.warning("lambda_min iteration for (d, M) = (%d, %d) did not converge in %d steps", m.dim, M, max_iter)
    return res


def random_kets(d: int, n: int, rng: np.random.Generator) -> np.ndarray:
    """n unitarily invariant random unit vectors in C^d."""
    # drawn row by row so that the first k of n starts equal the k starts of a shorter run
    g = rng.standard_normal((n, d, 2))
    z = g[..., 0] + 1j * g[..., 1]
    return z / np.linalg.norm(z, axis=1, keepdims=True)


def lambda_min_scan(
    m: MubSet,
    M: int,
    restarts: int = 100,
    seed: int = 0,
    tol: float = 1e-10,
    max_iter: int = 10_000,
) -> LambdaMinResult:
    """Best result over ``restarts`` runs from seeded random pure states."""
    _check_M(m, M)
    if restarts < 1:
        raise ValueError("restarts must be at least 1")
    rng = np.random.default_rng(np.random.SeedSequence([seed, m.dim, M]))
    ulin = _Ulin(m, M)
    u0 = ulin.of_kets(random_kets(m.dim, restarts, rng))
    return _result(m, M, *_iterate(ulin, u0, tol, max_iter), restarts=restarts)


def scan_dimensions(dims, restarts: int = 100, seed: int = 0, tol: float = 1e-10, max_iter: int = 10_000):
    """lambda_min for every M = 1 .. d + 1 of every d in ``dims``."""
    out = []
    for d in dims:
        m = build_mub(d)
        for M in range(1, d + 2):
            out.append(lambda_min_scan(m, M, restarts, seed, tol, max_iter))
    return out


def check_conjecture(results) -> list[dict]:
    """Compare each scanned value with -(M-1)/d and the sharper -min((M-1)/d, 1/2 - 1/d).

    Only reports; a violated conjectured bound is data, not an error.
    """
    rows = []
    for r in results:
        rows.append(
            {
                "d": r.d,
                "M": r.M,
                "lambda_min": r.lambda_min,
                "lower_bound": r.lower_bound,
                "conjectured_bound": r.conjectured_bound,
                "respects_lower_bound": r.lambda_min >= r.lower_bound - 1e-9,
                "respects_conjecture": r.lambda_min >= r.conjectured_bound - 1e-9,
            }
        )
    return rows
