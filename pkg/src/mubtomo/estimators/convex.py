"""Optimization over the states consistent with the measured bases.

Every such state is ``ULIN + sum_j y_j A_j`` where the generators ``A_j``
span the unmeasured hyperplanes: for each unmeasured basis ``b`` and each
column ``c`` of an orthonormal basis ``U`` of the zero-sum vectors in R^d,
``A = sum_l U[l, c] P[b, l]``. The generators are Hilbert-Schmidt
orthonormal, so ``y_j = Tr(rho A_j)`` and the flat measure on ``y`` is the
flat measure on the unmeasured coordinates ``w[b, l]``.

Constrained problems (concave objectives over this affine slice of the
positive cone) are solved with a log-det barrier and damped Newton steps.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from mubtomo.mub import MubSet
from mubtomo.tomography import ProbabilityTable, ulin_matrix


def zero_sum_basis(d: int) -> np.ndarray:
    """Orthonormal columns spanning {v in R^d : sum(v) = 0}, shape (d, d - 1)."""
    a = np.concatenate([np.ones((d, 1)), np.eye(d)[:, : d - 1]], axis=1)
    q, _ = np.linalg.qr(a)
    q = q[:, 1:]
    # fix column signs for determinism across LAPACK builds
    signs = np.sign(q[np.argmax(np.abs(q) > 1e-12, axis=0), np.arange(d - 1)])
    return q * signs


@dataclass(eq=False)
class FreeCoordinates:
    """Affine parametrization of the states consistent with a table."""

    table: ProbabilityTable
    mub: MubSet
    base: np.ndarray = field(init=False, repr=False)
    gens: np.ndarray = field(init=False, repr=False)
    unmeasured_map: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        d, M = self.table.dim, self.table.M
        self.base = ulin_matrix(self.table.w, self.mub)
        u = zero_sum_basis(d)
        nb = d + 1 - M
        proj = self.mub.projectors[M:]
        self.gens = np.einsum("lc,blij->bcij", u, proj).reshape(nb * (d - 1), d, d)
        # p[b, l] = 1/d + sum_c U[l, c] y[b, c]
        self.unmeasured_map = np.kron(np.eye(nb), u)

    @property
    def dim(self) -> int:
        return self.gens.shape[0]

    @property
    def d(self) -> int:
        return self.table.dim

    @property
    def n_unmeasured(self) -> int:
        return self.d + 1 - self.table.M

    def rho(self, y) -> np.ndarray:
        y = np.asarray(y, dtype=float)
        return self.base + np.tensordot(y, self.gens, axes=(-1, 0))

    def coords(self, rho) -> np.ndarray:
        """y_j = Tr(rho A_j); drops any measured-basis mismatch of ``rho``."""
        return np.einsum("jab,ba->j", self.gens, np.asarray(rho)).real

    def unmeasured_probs(self, y) -> np.ndarray:
        """Probabilities of the unmeasured bases, shape (d + 1 - M, d)."""
        y = np.asarray(y, dtype=float)
        flat = 1.0 / self.d + self.unmeasured_map @ y
        return flat.reshape(self.n_unmeasured, self.d)


class InfeasibleError(RuntimeError):
    """No positive semidefinite state matches the measured probabilities."""


@dataclass
class BarrierProblem:
    """minimize f(x) s.t. F0 + sum_j x_j F_j >= 0 and g0 + G x >= 0.

    ``objective(x)`` returns ``(value, gradient, hessian)``.
    """

    objective: Callable[[np.ndarray], tuple[float, np.ndarray, np.ndarray]]
    F0: np.ndarray
    Fs: np.ndarray
    g0: np.ndarray = field(default_factory=lambda: np.zeros(0))
    G: np.ndarray | None = None
    domain: Callable[[np.ndarray], bool] | None = None

    def lmi(self, x) -> np.ndarray:
        return self.F0 + np.tensordot(x, self.Fs, axes=(0, 0))

    def lin(self, x) -> np.ndarray:
        if self.G is None:
            return np.zeros(0)
        return self.g0 + self.G @ x

    def feasible(self, x) -> bool:
        try:
            np.linalg.cholesky(self.lmi(x))
        except np.linalg.LinAlgError:
            return False
        if np.any(self.lin(x) <= 0):
            return False
        return self.domain is None or self.domain(x)


@dataclass
class BarrierResult:
    x: np.ndarray
    newton_steps: int
    gap: float
    converged: bool


def _barrier_terms(prob: BarrierProblem, x: np.ndarray):
    f = prob.lmi(x)
    lch = np.linalg.cholesky(f)
    # X_j = L^-1 F_j L^-H
    li = np.linalg.inv(lch)
    xs = li @ prob.Fs @ li.conj().T
    val = -2.0 * np.sum(np.log(np.diag(lch).real))
    grad = -np.einsum("jaa->j", xs).real
    hess = np.einsum("jab,kba->jk", xs, xs).real
    g = prob.lin(x)
    if g.size:
        val -= np.sum(np.log(g))
        gg = prob.G / g[:, None]
        grad -= gg.sum(axis=0)
        hess += gg.T @ gg
    return val, grad, hess


def barrier_minimize(
    prob: BarrierProblem,
    x0,
    t0: float = 1.0,
    growth: float = 8.0,
    gap_tol: float = 1e-12,
    newton_tol: float = 1e-10,
    max_newton: int = 200,
) -> BarrierResult:
    """Log-barrier interior-point method with damped Newton centering."""
    x = np.asarray(x0, dtype=float).copy()
    if not prob.feasible(x):
        raise InfeasibleError("starting point is not strictly feasible")
    m = prob.F0.shape[0] + len(prob.g0)
    t = t0
    steps = 0
    converged = False

    def phi(z):
        fv = prob.objective(z)[0]
        bv = _barrier_terms(prob, z)[0]
        return t * fv + bv

    while True:
        for _ in range(max_newton):
            fv, fg, fh = prob.objective(x)
            bv, bg, bh = _barrier_terms(prob, x)
            grad = t * fg + bg
            hess = t * fh + bh
            try:
                dx = -np.linalg.solve(hess, grad)
            except np.linalg.LinAlgError:
                dx = -np.linalg.lstsq(hess, grad, rcond=None)[0]
            dec = -grad @ dx
            steps += 1
            if dec / 2 <= newton_tol:
                break
            cur = t * fv + bv
            s = 1.0
            while s > 1e-10:
                xn = x + s * dx
                if prob.feasible(xn):
                    new = phi(xn)
                    if new <= cur + 0.25 * s * (grad @ dx):
                        break
                s *= 0.5
            else:
                # no measurable decrease left at this t
                break
            x = xn
            if cur - new <= 1e-15 * max(1.0, abs(cur)):
                # decrease is at roundoff level
                break
        gap = m / t
        if gap < gap_tol:
            converged = True
            break
        t *= growth
    return BarrierResult(x, steps, m / t, converged)


def quadratic_objective(scale: float):
    def obj(x):
        return scale * float(x @ x), 2 * scale * x, 2 * scale * np.eye(len(x))

    return obj
