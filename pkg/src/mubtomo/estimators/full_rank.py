"""Maximum von Neumann entropy and maximum minimal eigenvalue estimators."""

from __future__ import annotations

import numpy as np

from mubtomo.estimators.convex import BarrierProblem, FreeCoordinates, InfeasibleError, barrier_minimize
from mubtomo.estimators.result import EstimatorResult
from mubtomo.linalg import TOL
from mubtomo.mub import MubSet
from mubtomo.tomography import ProbabilityTable


def solve_max_mineig(fc: FreeCoordinates):
    """Maximize lambda_min(rho(y)); returns (y, lambda, newton_steps, converged).

    Epigraph form: minimize -s subject to rho(y) - s I >= 0.
    """
    d = fc.d
    lam0 = float(np.linalg.eigvalsh(fc.base)[0])
    if fc.dim == 0:
        return np.zeros(0), lam0, 0, True
    fs = np.concatenate([fc.gens, -np.eye(d)[None]])
    n = fc.dim

    def obj(x):
        g = np.zeros(n + 1)
        g[-1] = -1.0
        return -float(x[-1]), g, np.zeros((n + 1, n + 1))

    prob = BarrierProblem(obj, fc.base.astype(complex), fs)
    x0 = np.concatenate([np.zeros(n), [lam0 - 1.0]])
    res = barrier_minimize(prob, x0)
    y = res.x[:n]
    lam = float(np.linalg.eigvalsh(fc.rho(y))[0])
    return y, lam, res.newton_steps, res.converged


def _vn_objective(fc: FreeCoordinates):
    """f(y) = Tr(rho ln rho) with gradient and Daleckii-Krein Hessian."""
    gens = fc.gens

    def obj(y):
        lam, v = np.linalg.eigh(fc.rho(y))
        if lam[0] <= 0:
            n = len(y)
            return np.inf, np.zeros(n), np.eye(n)
        ln = np.log(lam)
        val = float(lam @ ln)
        at = v.conj().T @ gens @ v  # generators in the eigenbasis
        grad = np.einsum("jaa,a->j", at, ln).real
        dl = lam[:, None] - lam[None, :]
        close = np.abs(dl) < 1e-12 * np.maximum(1.0, lam[:, None])
        with np.errstate(divide="ignore", invalid="ignore"):
            kern = np.where(close, 1.0 / lam[:, None], (ln[:, None] - ln[None, :]) / np.where(close, 1.0, dl))
        hess = np.einsum("jab,kba,ab->jk", at, at, kern).real
        return val, grad, hess

    return obj


def max_mineig_estimator(table: ProbabilityTable, m: MubSet) -> EstimatorResult:
    """Consistent state whose smallest eigenvalue is as large as possible."""
    fc = FreeCoordinates(table, m)
    y, lam, steps, ok = solve_max_mineig(fc)
    if lam < -TOL.inconsistent_psd:
        raise InfeasibleError(f"no state reproduces the table (best minimal eigenvalue {lam:.3e})")
    return EstimatorResult("max_mineig", fc.rho(y), table, m, steps, 0.0, ok)


def max_vn_estimator(table: ProbabilityTable, m: MubSet) -> EstimatorResult:
    """Consistent state with the largest von Neumann entropy."""
    fc = FreeCoordinates(table, m)
    y0, lam, steps0, ok0 = solve_max_mineig(fc)
    if lam < -TOL.inconsistent_psd:
        raise InfeasibleError(f"no state reproduces the table (best minimal eigenvalue {lam:.3e})")
    if fc.dim == 0 or lam <= 1e-12:
        # no interior: the constraint set is (numerically) a single point
        return EstimatorResult("max_vn", fc.rho(y0), table, m, steps0, 0.0, ok0)
    prob = BarrierProblem(_vn_objective(fc), fc.base.astype(complex), fc.gens)
    res = barrier_minimize(prob, y0)
    rho = fc.rho(res.x)
    # gradient of Tr(rho ln rho) along the slice vanishes at an interior optimum
    residual = float(np.linalg.norm(_vn_objective(fc)(res.x)[1]))
    return EstimatorResult("max_vn", rho, table, m, steps0 + res.newton_steps, residual, res.converged and ok0)
