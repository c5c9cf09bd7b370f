"""Least-bias estimators.

Two routes to the same estimator:

* ``lb_iterate`` - ascent of the penalized objective

      D_mu(rho) = sum_{a<=M,k} p[a,k] ln Tr(rho P[a,k]) + mu * (unmeasured term)

  with the positivity- and trace-preserving update
  rho -> (1 + e D) rho (1 + e D) / (1 + e^2 Tr(D^2 rho)), D = W - Tr(W rho),
  started from the maximally mixed state. The unmeasured term is the
  Shannon entropy for the entropic measure and -sum_b P(p_b) otherwise.
  Its maximizer deviates from the measured probabilities at order mu.

* ``least_bias_exact`` - the mu -> 0 limit solved directly: minimize
  sum_b P(p_b) over the states that reproduce the table exactly.

``least_bias`` runs the ascent and then, by default, the exact solve,
reporting the ascent diagnostics alongside the exact estimator.
"""

from __future__ import annotations

import logging
from dataclasses import asdict, dataclass, replace

import numpy as np

from mubtomo.estimators.convex import (
    BarrierProblem,
    FreeCoordinates,
    InfeasibleError,
    barrier_minimize,
    quadratic_objective,
)
from mubtomo.estimators.measures import Measure, as_measure, predictability, predictability_gradient, xlogx
from mubtomo.estimators.result import EstimatorResult
from mubtomo.linalg import TOL
from mubtomo.mub import MubSet
from mubtomo.tomography import ProbabilityTable, ulin_estimator

log = logging.getLogger(__name__)

METHODS = ("hybrid", "iterate", "exact")


STALL_WINDOW = 1000
HYBRID_MIX = 1e-3


@dataclass(frozen=True)
class LeastBiasConfig:
    mu: float = 1e-4
    epsilon: float | None = None  # None -> 0.1 / d
    epsilon_max: float = 1.0
    tol: float = 1e-10
    max_iter: int = 200_000
    measure: str = "entropic"
    method: str = "hybrid"
    auto_mu: bool = False
    ascent_iter: int = 10_000  # hybrid only: budget of the warm-started check

    def __post_init__(self):
        if not self.mu > 0:
            raise ValueError("mu must be positive")
        if self.epsilon is not None and not self.epsilon > 0:
            raise ValueError("epsilon must be positive")
        if self.method not in METHODS:
            raise ValueError(f"method must be one of {METHODS}")
        object.__setattr__(self, "measure", as_measure(self.measure).value)

    def step(self, d: int) -> float:
        return self.epsilon if self.epsilon is not None else 0.1 / d

    def to_dict(self) -> dict:
        return asdict(self)


class _Kets:
    """Column kets of all bases, split into measured and unmeasured."""

    def __init__(self, m: MubSet, M: int):
        d = m.dim
        self.all = np.swapaxes(m.bases, 1, 2).reshape((d + 1) * d, d).T
        self.n_meas = M * d
        self.d = d
        self.M = M

    def probs(self, rho) -> np.ndarray:
        k = self.all
        return (k.conj() * (rho @ k)).sum(axis=0).real

    def combine(self, c) -> np.ndarray:
        k = self.all
        return (k * c) @ k.conj().T


def _unmeasured_term(q_unmeasured: np.ndarray, d: int, measure: Measure) -> float:
    if measure is Measure.ENTROPIC:
        return float(-xlogx(np.clip(q_unmeasured, 0.0, None)).sum())
    return float(-np.sum(predictability(q_unmeasured.reshape(-1, d), measure)))


def _dmu_from_probs(q, p, kets: _Kets, mu: float, measure: Measure) -> float:
    qm = q[: kets.n_meas]
    pm = p.ravel()
    pos = pm > 0
    if np.any(qm[pos] <= 0):
        return -np.inf
    like = float(pm[pos] @ np.log(qm[pos]))
    if kets.M > kets.d:
        return like
    return like + mu * _unmeasured_term(q[kets.n_meas :], kets.d, measure)


def _w_coeffs(q, p, kets: _Kets, mu: float, measure: Measure) -> np.ndarray:
    c = np.zeros(len(q))
    pm = p.ravel()
    qm = q[: kets.n_meas]
    pos = pm > 0
    c[: kets.n_meas][pos] = pm[pos] / qm[pos]
    if kets.M <= kets.d:
        qu = q[kets.n_meas :]
        if measure is Measure.ENTROPIC:
            with np.errstate(divide="ignore"):
                c[kets.n_meas :] = -mu * np.log(np.clip(qu, 1e-300, None))
        else:
            g = predictability_gradient(qu.reshape(-1, kets.d), measure)
            c[kets.n_meas :] = -mu * g.ravel()
    return c


def dmu_objective(rho, table: ProbabilityTable, m: MubSet, config: LeastBiasConfig = LeastBiasConfig()) -> float:
    """The penalized objective D_mu; ``-inf`` if a measured outcome with p > 0 gets zero weight."""
    kets = _Kets(m, table.M)
    return _dmu_from_probs(kets.probs(np.asarray(rho)), table.probs, kets, config.mu, as_measure(config.measure))


def gradient_W(rho, table: ProbabilityTable, m: MubSet, config: LeastBiasConfig = LeastBiasConfig()) -> np.ndarray:
    """Hermitian W(rho) with dD_mu = Tr(d_rho W) for traceless d_rho."""
    kets = _Kets(m, table.M)
    c = _w_coeffs(kets.probs(np.asarray(rho)), table.probs, kets, config.mu, as_measure(config.measure))
    w = kets.combine(c)
    return 0.5 * (w + w.conj().T)


def extremal_residual(rho, w) -> float:
    """Frobenius norm of W rho - Tr(W rho) rho."""
    wr = w @ rho
    return float(np.linalg.norm(wr - np.trace(wr).real * rho))


@dataclass
class IterationTrace:
    objective: list
    min_eigenvalue: list
    trace_error: list


def lb_iterate(
    table: ProbabilityTable,
    m: MubSet,
    config: LeastBiasConfig = LeastBiasConfig(),
    rho0=None,
    trace: IterationTrace | None = None,
):
    """Ascent of D_mu by the congruence update; returns (rho, iterations, residual, converged).

    The step starts at ``config.step(d)``, halves whenever D_mu would
    decrease and grows by 1.5 after each accepted step up to
    ``config.epsilon_max``. Steps below 1e-14 count as a stall, and so does a
    gain in D_mu below roundoff over ``STALL_WINDOW`` accepted steps.
    """
    d = table.dim
    measure = as_measure(config.measure)
    kets = _Kets(m, table.M)
    p = table.probs
    eye = np.eye(d)
    rho = np.eye(d, dtype=complex) / d if rho0 is None else np.array(rho0, dtype=complex)
    q = kets.probs(rho)
    cur = _dmu_from_probs(q, p, kets, config.mu, measure)
    eps = config.step(d)
    residual = np.inf
    n = 0
    mark = cur
    for n in range(config.max_iter):
        if n and n % STALL_WINDOW == 0:
            if cur - mark <= 1e-13 * max(1.0, abs(cur)):
                log.debug("least-bias ascent stalled at iteration %d (residual %.3e)", n, residual)
                return rho, n, residual, False
            mark = cur
        c = _w_coeffs(q, p, kets, config.mu, measure)
        w = kets.combine(c)
        w = 0.5 * (w + w.conj().T)
        wr = w @ rho
        expect = wr.trace().real
        delta = w - expect * eye
        residual = float(np.linalg.norm(wr - expect * rho))
        if residual < config.tol:
            return rho, n, residual, True
        while True:
            a = eye + eps * delta
            new = a @ rho @ a.conj().T
            new = new / new.trace().real
            new = 0.5 * (new + new.conj().T)
            qn = kets.probs(new)
            val = _dmu_from_probs(qn, p, kets, config.mu, measure)
            if val >= cur:
                break
            eps *= 0.5
            if eps < 1e-14:
                log.debug("least-bias ascent stalled at iteration %d (residual %.3e)", n, residual)
                return rho, n, residual, False
        rho, q, cur = new, qn, val
        if trace is not None:
            trace.objective.append(val)
            trace.min_eigenvalue.append(float(np.linalg.eigvalsh(rho)[0]))
            trace.trace_error.append(float(abs(np.trace(rho).real - 1.0)))
        eps = min(1.5 * eps, config.epsilon_max)
    return rho, n + 1, residual, False


def _entropic_objective(fc: FreeCoordinates):
    a = fc.unmeasured_map
    d = fc.d
    nb = fc.n_unmeasured
    ln_d = np.log(d)

    def obj(y):
        p = 1.0 / d + a @ y
        if np.any(p <= 0):
            return np.inf, np.zeros_like(y), np.eye(len(y))
        val = (float(np.sum(p * np.log(p))) + nb * ln_d) / ln_d
        grad = a.T @ (np.log(p) + 1.0) / ln_d
        hess = (a.T / p) @ a / ln_d
        return val, grad, hess

    return obj


def interior_point(fc: FreeCoordinates):
    """Coordinates of the state with the largest minimal eigenvalue, and that eigenvalue."""
    from mubtomo.estimators.full_rank import solve_max_mineig

    y, lam, _, _ = solve_max_mineig(fc)
    return y, lam


def _exact(table: ProbabilityTable, m: MubSet, measure: Measure, shortcut: bool = True):
    """Returns (rho, newton_steps, gap, converged).

    With ``shortcut`` a positive semidefinite ULIN estimator is returned as
    is; it is then the unconstrained minimizer and hence the answer.
    """
    fc = FreeCoordinates(table, m)
    ulin = ulin_estimator(table, m)
    if fc.dim == 0 or (shortcut and ulin.min_eigenvalue >= -TOL.psd):
        return ulin.matrix, 0, 0.0, True
    y0, lam = interior_point(fc)
    if lam <= 1e-12:
        if lam < -TOL.inconsistent_psd:
            raise InfeasibleError(f"no state reproduces the table (best minimal eigenvalue {lam:.3e})")
        return fc.rho(y0), 0, 0.0, True
    n = fc.dim
    if measure is Measure.BETTING:
        nb, d = fc.n_unmeasured, fc.d
        a = fc.unmeasured_map
        sel = np.kron(np.eye(nb), np.ones((d, 1)))  # outcome -> its basis
        zeros = np.zeros((nb * d, nb))
        # u_b - p_bl >= 0 and p_bl - v_b >= 0
        g_upper = np.hstack([-a, sel, zeros])
        g_lower = np.hstack([a, zeros, -sel])
        G = np.vstack([g_upper, g_lower])
        g0 = np.concatenate([np.full(nb * d, -1.0 / d), np.full(nb * d, 1.0 / d)])
        cvec = np.concatenate([np.zeros(n), np.ones(nb), -np.ones(nb)])

        def obj(x):
            return float(cvec @ x), cvec, np.zeros((len(x), len(x)))

        pu = fc.unmeasured_probs(y0)
        x0 = np.concatenate([y0, pu.max(axis=1) + 0.1, pu.min(axis=1) - 0.1])
        fs = np.concatenate([fc.gens, np.zeros((2 * nb, d, d))])
        prob = BarrierProblem(obj, fc.base, fs, g0, G)
        res = barrier_minimize(prob, x0)
        y = res.x[:n]
    else:
        if measure is Measure.PURITY:
            obj = quadratic_objective(fc.d / (fc.d - 1))
        else:
            obj = _entropic_objective(fc)
        prob = BarrierProblem(obj, fc.base, fc.gens)
        res = barrier_minimize(prob, y0)
        y = res.x
    return fc.rho(y), res.newton_steps, res.gap, res.converged


def least_bias_exact(table: ProbabilityTable, m: MubSet, measure="entropic", shortcut: bool = True) -> EstimatorResult:
    """Least-bias estimator as the exact constrained minimizer of sum_b P(p_b)."""
    measure = as_measure(measure)
    rho, steps, gap, ok = _exact(table, m, measure, shortcut)
    return EstimatorResult("least_bias", rho, table, m, steps, gap, ok, measure.value)


def least_bias(table: ProbabilityTable, m: MubSet, config: LeastBiasConfig = LeastBiasConfig()) -> EstimatorResult:
    """Physical estimator with the least predictability of the unmeasured bases.

    ``config.method`` selects ``"iterate"`` (penalized ascent from I/d),
    ``"exact"`` (constrained solve only) or ``"hybrid"``. Hybrid returns a
    physical ULIN estimator directly; otherwise it returns the exact
    estimator and runs at most ``config.ascent_iter`` ascent steps from
    just inside it, keeping that result in ``extras``.
    """
    if table.dim != m.dim:
        raise ValueError(f"table dimension {table.dim} does not match MUB dimension {m.dim}")
    measure = as_measure(config.measure)
    extras: dict = {}
    if config.method == "hybrid":
        ulin = ulin_estimator(table, m)
        if ulin.is_physical:
            # nothing to correct: ULIN already maximizes the unmeasured entropy
            extras["ulin_physical"] = True
            return EstimatorResult("least_bias", ulin.matrix, table, m, 0, 0.0, True, measure.value, extras=extras)
    if config.method == "iterate":
        rho_it, n_it, res_it, ok_it = lb_iterate(table, m, config)
        if config.auto_mu:
            rho_it, n_it, res_it, ok_it, mu_used = _tune_mu(table, m, config, rho_it, n_it, res_it, ok_it)
            extras["mu"] = mu_used
        extras.update(dmu_iterations=n_it, dmu_residual=res_it, dmu_converged=ok_it)
        return EstimatorResult("least_bias", rho_it, table, m, n_it, res_it, ok_it, measure.value, extras=extras)
    rho, steps, gap, ok = _exact(table, m, measure)
    extras.update(newton_steps=steps, barrier_gap=gap)
    if config.method == "exact":
        return EstimatorResult("least_bias", rho, table, m, steps, gap, ok, measure.value, extras=extras)
    # hybrid: the penalized ascent, started just inside the exact estimator,
    # checks that it sits at a fixed point of D_mu
    d = table.dim
    start = (1.0 - HYBRID_MIX) * rho + HYBRID_MIX * np.eye(d) / d
    cfg = replace(config, max_iter=min(config.ascent_iter, config.max_iter))
    rho_it, n_it, res_it, ok_it = lb_iterate(table, m, cfg, rho0=start)
    extras.update(
        dmu_iterations=n_it,
        dmu_residual=res_it,
        dmu_converged=ok_it,
        dmu_estimator=rho_it,
        dmu_distance=float(np.linalg.norm(rho_it - rho)),
    )
    return EstimatorResult("least_bias", rho, table, m, n_it, res_it, ok, measure.value, extras=extras)


def _tune_mu(table, m, config, rho, n, res, ok, shift: float = 1e-6, max_halvings: int = 20):
    mu = config.mu
    for _ in range(max_halvings):
        mu /= 2
        cfg = replace(config, mu=mu, auto_mu=False)
        new, n2, res2, ok2 = lb_iterate(table, m, cfg, rho0=rho)
        moved = float(np.linalg.norm(new - rho))
        rho, n, res, ok = new, n + n2, res2, ok2
        if moved < shift:
            break
    return rho, n, res, ok, mu
