"""Bayesian mean for a flat prior on the unmeasured probabilities.

Hit-and-run over the free coordinates y (see ``convex``): from the current
point pick a random direction u, find the chord {y + t u} inside the
positive cone and jump to a uniform point on it. With rho(y) = L L^H the
chord is exact: rho(y + t u) = L (1 + t B) L^H where B = L^-1 A(u) L^-H, so
t ranges over [max_{b>0} -1/b, min_{b<0} -1/b] for the eigenvalues b of B.
Many chains run side by side; the spread of the chain means gives the
standard error.
"""

from __future__ import annotations

import numpy as np

from mubtomo.estimators.convex import FreeCoordinates, InfeasibleError
from mubtomo.estimators.full_rank import solve_max_mineig
from mubtomo.estimators.result import EstimatorResult
from mubtomo.linalg import TOL
from mubtomo.mub import MubSet
from mubtomo.tomography import ProbabilityTable, all_probabilities, z_from_probs

MIN_SAMPLES = 10_000
MIN_ESS = 100


def _chords(fc: FreeCoordinates, y: np.ndarray, u: np.ndarray):
    """Feasible step range [lo, hi] along u from each row of y."""
    lch = np.linalg.cholesky(fc.rho(y))
    a = np.tensordot(u, fc.gens, axes=(-1, 0))
    li = np.linalg.inv(lch)
    b = np.linalg.eigvalsh(li @ a @ np.swapaxes(li.conj(), -1, -2))
    with np.errstate(divide="ignore"):
        inv = -1.0 / b
    hi = np.where(b < 0, inv, np.inf).min(axis=-1)
    lo = np.where(b > 0, inv, -np.inf).max(axis=-1)
    return lo, hi


def hit_and_run(
    fc: FreeCoordinates,
    y0: np.ndarray,
    n_samples: int,
    rng: np.random.Generator,
    n_chains: int = 64,
    thin: int = 5,
    burn_in: int | None = None,
):
    """Samples of shape (n_chains, per_chain, dim) drawn uniformly from the feasible body."""
    n = fc.dim
    burn_in = 10 * n if burn_in is None else burn_in
    per_chain = -(-n_samples // n_chains)
    y = np.repeat(y0[None], n_chains, axis=0)
    out = np.empty((n_chains, per_chain, n))
    total = burn_in + per_chain * thin
    for step in range(total):
        u = rng.standard_normal((n_chains, n))
        u /= np.linalg.norm(u, axis=1, keepdims=True)
        lo, hi = _chords(fc, y, u)
        # stay a hair inside so the Cholesky factor of the next point exists
        span = hi - lo
        t = lo + span * (1e-12 + (1 - 2e-12) * rng.random(n_chains))
        y = y + t[:, None] * u
        k = step - burn_in
        if k >= 0 and (k + 1) % thin == 0:
            out[:, k // thin] = y
    return out


def _ess(samples: np.ndarray) -> float:
    """Effective sample size from the chain-mean variance, smallest over coordinates."""
    n_chains, per_chain, _ = samples.shape
    flat = samples.reshape(-1, samples.shape[-1])
    var = flat.var(axis=0, ddof=1)
    var_means = samples.mean(axis=1).var(axis=0, ddof=1)
    with np.errstate(divide="ignore", invalid="ignore"):
        ess = np.where(var_means > 0, var / var_means * n_chains, flat.shape[0])
    return float(np.min(np.minimum(ess, flat.shape[0])))


def bayes_mean_estimator(
    table: ProbabilityTable,
    m: MubSet,
    n_samples: int = 100_000,
    seed: int = 0,
    n_chains: int = 64,
) -> EstimatorResult:
    """Posterior mean of a flat prior on the states consistent with the table."""
    if n_samples < MIN_SAMPLES:
        raise ValueError(f"n_samples must be at least {MIN_SAMPLES}, got {n_samples}")
    fc = FreeCoordinates(table, m)
    y0, lam, _, _ = solve_max_mineig(fc)
    if lam < -TOL.inconsistent_psd:
        raise InfeasibleError(f"no state reproduces the table (best minimal eigenvalue {lam:.3e})")
    if fc.dim == 0 or lam <= 1e-12:
        res = EstimatorResult("bayes_mean", fc.rho(y0), table, m, 0, 0.0, True, seed=seed)
        res.extras.update(std_error=0.0, ess=float(n_samples))
        return res
    rng = np.random.default_rng(seed)
    samples = hit_and_run(fc, y0, n_samples, rng, n_chains=n_chains)
    chain_means = samples.mean(axis=1)
    y_mean = chain_means.mean(axis=0)
    se_y = chain_means.std(axis=0, ddof=1) / np.sqrt(n_chains)
    ess = _ess(samples)
    res = EstimatorResult(
        "bayes_mean", fc.rho(y_mean), table, m,
        iterations=int(samples.shape[0] * samples.shape[1]),
        residual=float(np.linalg.norm(se_y)),
        converged=ess >= MIN_ESS,
        seed=seed,
    )
    res.extras.update(std_error=float(np.linalg.norm(se_y)), ess=ess, chains=n_chains)
    if table.dim == 3:
        # z of each chain mean -> standard error of Re z and Im z separately
        zs = np.array([z_from_probs(all_probabilities(fc.rho(ym), m)) for ym in chain_means])
        k = np.sqrt(n_chains)
        res.extras["z_std_error"] = zs.real.std(axis=0, ddof=1) / k + 1j * zs.imag.std(axis=0, ddof=1) / k
    return res

