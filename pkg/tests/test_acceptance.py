"""Acceptance criteria, one test each.

Every test prints a single ``criterion N: PASS|FAIL`` line with the numbers
behind the verdict, then asserts. Run ``python tests/test_acceptance.py``
for the lines alone.
"""

import sys
import time

import numpy as np
import pytest

from mubtomo import fixtures as fx
from mubtomo.estimators import (
    LeastBiasConfig,
    dmu_objective,
    gradient_W,
    least_bias,
    least_bias_exact,
    max_mineig_estimator,
    max_vn_estimator,
    predictability,
)
from mubtomo.estimators.least_bias import IterationTrace, lb_iterate
from mubtomo.linalg import random_density_matrix, random_pure_state, random_traceless_hermitian
from mubtomo.mub import build_mub, verify_mub
from mubtomo.reproduce import fig1, qutrit_examples, table1, table2
from mubtomo.tomography import born_probabilities, probs_from_z, ulin_estimator, ulin_of_state

MEASURES = ("entropic", "purity", "betting")


@pytest.fixture
def report(capsys):
    def emit(n: int, checks: dict, detail: str = "") -> None:
        ok = all(checks.values())
        failed = [k for k, v in checks.items() if not v]
        line = f"criterion {n}: {'PASS' if ok else 'FAIL'}"
        if detail:
            line += f"  {detail}"
        if failed:
            line += f"  failing: {', '.join(failed)}"
        with capsys.disabled():
            print("\n" + line, flush=True)
        assert ok, line

    return emit


def test_criterion_1_mub_validity(report):
    t0 = time.perf_counter()
    worst = 0.0
    checks = {}
    for d in (2, 3, 4, 5, 7, 8, 9, 11, 13):
        rep = verify_mub(build_mub(d), tol=1e-10)
        worst = max(worst, rep.max_deviation)
        checks[f"d={d}"] = rep.passed and rep.max_deviation < 1e-10
    elapsed = time.perf_counter() - t0
    checks["runtime < 5 s"] = elapsed < 5
    report(1, checks, f"max deviation {worst:.1e}, {elapsed:.2f} s")


def test_criterion_2_qutrit_ulin_negativity(report):
    m = build_mub(3)
    rho = fx.qutrit_pure_example()
    dets = {M: ulin_estimator(born_probabilities(rho, m, M), m).determinant for M in (2, 3)}
    mins = {M: ulin_estimator(born_probabilities(rho, m, M), m).min_eigenvalue for M in (1, 4)}
    checks = {
        "det M=2 = -1/27": abs(dets[2] + 1 / 27) <= 1e-9,
        "det M=3 = -5/108": abs(dets[3] + 5 / 108) <= 1e-9,
        "M=1 PSD": mins[1] >= -1e-12,
        "M=4 PSD": mins[4] >= -1e-12,
    }
    report(2, checks, f"det(M=2) {dets[2]:.12f}, det(M=3) {dets[3]:.12f}")


def test_criterion_3_generic_unphysicality(report):
    checks = {}
    worst = 0.0
    for d in (3, 5, 7):
        m = build_mub(d)
        lam = ulin_estimator(born_probabilities(fx.computational_superposition(d), m, d), m).min_eigenvalue
        worst = max(worst, abs(lam - (1 / d - 0.5)))
        checks[f"d={d} M=d eigenvalue 1/d-1/2"] = abs(lam - (1 / d - 0.5)) <= 1e-9
        sup = fx.first_basis_superposition(m)
        for M in range(2, d + 1):
            val = ulin_estimator(born_probabilities(sup, m, M), m).min_eigenvalue
            checks[f"d={d} M={M} superposition non-PSD"] = val < -1e-9
    report(3, checks, f"max |lambda - (1/d - 1/2)| = {worst:.1e}")


def test_criterion_4_lambda_min_scan(report):
    t0 = time.perf_counter()
    rep = fig1(restarts=100, seed=0)
    elapsed = time.perf_counter() - t0
    checks = {r.quantity: r.passed for r in rep.rows if not r.informational}
    checks["full scan < 10 min"] = elapsed < 600
    by = {(r["d"], r["M"]): r["lambda_min"] for r in rep.data}
    conj = [r for r in rep.rows if r.informational]
    n_conj = sum(r.passed for r in conj)
    report(
        4,
        checks,
        f"(4,2) {by[4, 2]:.6f}, (7,2) {by[7, 2]:.5f}, sharper bound holds in {n_conj}/{len(conj)} rows,"
        f" scan {elapsed:.0f} s",
    )


def test_criterion_5_table1(report):
    rep = table1()
    checks = {r.quantity: r.passed for r in rep.rows}
    m = build_mub(3)
    dist = {}
    for w, M in ((0.30, 2), (0.35, 3)):
        table = born_probabilities(fx.rho_w(w), m, M)
        ulin = ulin_estimator(table, m)
        checks[f"ULIN physical at w={w}, M={M}"] = ulin.is_physical
        for meas in MEASURES:
            lb = least_bias_exact(table, m, meas, shortcut=False)
            dist[w, M, meas] = float(np.abs(lb.estimator - ulin.matrix).max())
            checks[f"LB = ULIN at w={w}, M={M} ({meas})"] = dist[w, M, meas] <= 1e-6
    worst = max(abs(complex(r.computed_value) - complex(r.reference_value)) for r in rep.rows)
    report(5, checks, f"worst table deviation {worst:.1e}, max |LB - ULIN| {max(dist.values()):.1e}")


def test_criterion_6_counterexample(report):
    rep = qutrit_examples()
    wanted = ("ULIN eigenvalue", "S(ULIN)", "max S", "z_hat")
    rows = [r for r in rep.rows if r.quantity.startswith(wanted)]
    checks = {r.quantity: r.passed for r in rows}
    s = next(r for r in rows if r.quantity == "max S")
    report(6, checks, f"max S computed {s.computed_value:.5f} vs 0.6370")


@pytest.mark.slow
def test_criterion_7_table2(report):
    rep = table2(n_samples=100_000, seed=1)
    checks = {r.quantity: r.passed for r in rep.rows}
    assert len(rep.rows) == 18
    bm = [r for r in rep.rows if r.quantity.startswith("bm")]
    report(7, checks, "; ".join(f"{r.quantity} {r.note}" for r in bm))


# brute-force oracle for criterion 8. A nested grid over the disc keeps the
# feasible points. On its own it is biased near the border, where the
# objective is nearly flat along the boundary and the grid point closest to
# the boundary wins. So the boundary of the (convex) feasible set is also
# traced exactly by bisection along rays, and the better candidate is kept.


def _projectors(m):
    return np.einsum("aik,ajk->akij", m.bases, m.bases.conj())


def _oracle_z4(probs3, proj, measure):
    # sum over all bases and outcomes of p P equals rho + identity
    fixed = np.einsum("ak,akij->ij", probs3, proj[:3]) - np.eye(3)

    def lowest(z4):
        rho = fixed + np.einsum("nk,kij->nij", probs_from_z(z4), proj[3])
        return np.linalg.eigvalsh(rho)[:, 0]

    def f(z4):
        return predictability(probs_from_z(np.atleast_1d(z4)), measure)

    def scan(center, half, h):
        xs = np.arange(-half, half + h / 2, h)
        x, y = np.meshgrid(center.real + xs, center.imag + xs)
        z4 = (x + 1j * y).ravel()
        z4 = z4[np.abs(z4) <= 1]
        lam = lowest(z4)
        ok = lam >= 0
        return z4[ok][np.argmin(f(z4[ok]))], z4[np.argmax(lam)]

    best, inner = scan(0j, 1.0, 1e-2)
    best, _ = scan(best, 0.05, 1e-3)
    best, _ = scan(best, 0.005, 1e-4)

    def edge(theta):
        u = np.exp(1j * theta)
        lo, hi = np.zeros(len(theta)), np.full(len(theta), 2.0)
        for _ in range(50):
            mid = (lo + hi) / 2
            ok = lowest(inner + mid * u) >= 0
            lo, hi = np.where(ok, mid, lo), np.where(ok, hi, mid)
        return inner + lo * u

    theta = np.linspace(0, 2 * np.pi, 3600, endpoint=False)
    for width in (2 * np.pi / 3600, 2e-5):
        t0 = theta[np.argmin(f(edge(theta)))]
        theta = t0 + np.linspace(-2 * width, 2 * width, 401)
    zb = edge(theta)
    on_edge = zb[np.argmin(f(zb))]
    return on_edge if f(on_edge)[0] < f(best)[0] else best


def test_criterion_8_property_suites(report):
    rng = np.random.default_rng(8)
    checks = {}
    # gradient against central differences
    worst_fd = 0.0
    for i in range(100):
        d = 3 if i % 2 == 0 else 5
        m = build_mub(d)
        cfg = LeastBiasConfig(mu=float(rng.choice([1e-4, 0.1, 1.0])), measure=MEASURES[i % 3])
        table = born_probabilities(random_density_matrix(d, rng), m, int(rng.integers(1, d + 1)))
        rho = random_density_matrix(d, rng)
        delta = 1e-5 * random_traceless_hermitian(d, rng)
        fd = (dmu_objective(rho + delta, table, m, cfg) - dmu_objective(rho - delta, table, m, cfg)) / 2
        an = np.trace(delta @ gradient_W(rho, table, m, cfg)).real
        worst_fd = max(worst_fd, abs(fd - an) / abs(an))
    checks["gradient rel. err < 1e-6"] = worst_fd < 1e-6

    # ascent: monotone objective, unit trace and PSD iterates
    m3 = build_mub(3)
    mono = tr = psd = True
    for i in range(6):
        table = born_probabilities(0.9 * random_pure_state(3, rng) + 0.1 * np.eye(3) / 3, m3, 2 + i % 2)
        trace = IterationTrace([], [], [])
        lb_iterate(table, m3, LeastBiasConfig(measure=MEASURES[i % 3], max_iter=3000), trace=trace)
        mono &= bool(np.all(np.diff(trace.objective) >= 0))
        tr &= max(trace.trace_error) <= 1e-12
        psd &= min(trace.min_eigenvalue) >= -1e-12
    checks["D_mu monotone on accepted steps"] = mono
    checks["trace preserved"] = tr
    checks["PSD preserved"] = psd

    # ULIN map: idempotent and symmetric
    worst_idem = worst_sym = 0.0
    for i in range(100):
        d = (3, 4, 5)[i % 3]
        m = build_mub(d)
        rho, sigma = random_density_matrix(d, rng), random_density_matrix(d, rng)
        for M in range(1, d + 2):
            u = ulin_of_state(rho, m, M)
            worst_idem = max(worst_idem, np.abs(ulin_of_state(u, m, M) - u).max())
            a = np.trace(u @ sigma).real
            b = np.trace(rho @ ulin_of_state(sigma, m, M)).real
            worst_sym = max(worst_sym, abs(a - b))
    checks["ULIN idempotent"] = worst_idem <= 1e-12
    checks["ULIN symmetric"] = worst_sym <= 1e-12

    # predictability: extreme values, range and convexity
    axioms = True
    for d in (2, 3, 5):
        a = rng.exponential(size=(10_000, d)) ** rng.uniform(0.5, 4, size=(10_000, 1))
        p = a / a.sum(axis=1, keepdims=True)
        q = rng.dirichlet(np.ones(d), size=10_000)
        lam = rng.uniform(size=(10_000, 1))
        for meas in MEASURES:
            axioms &= abs(predictability(np.full(d, 1 / d), meas)) <= 1e-12
            axioms &= bool(np.allclose(predictability(np.eye(d), meas), 1))
            vals = predictability(p, meas)
            axioms &= bool(np.all((vals >= -1e-12) & (vals <= 1 + 1e-12)))
            mix = predictability(lam * p + (1 - lam) * q, meas)
            axioms &= bool(np.all(mix <= lam[:, 0] * vals + (1 - lam[:, 0]) * predictability(q, meas) + 1e-12))
    checks["predictability axioms"] = axioms

    # grid oracle
    proj = _projectors(m3)
    worst_grid = 0.0
    for i in range(10):
        rho = 0.9 * random_pure_state(3, rng) + 0.1 * np.eye(3) / 3
        table = born_probabilities(rho, m3, 3)
        for meas in MEASURES:
            z = least_bias(table, m3, LeastBiasConfig(measure=meas)).z_coords[3]
            worst_grid = max(worst_grid, abs(_oracle_z4(table.probs, proj, meas) - z))
    checks["grid oracle within 2e-3"] = worst_grid <= 2e-3
    report(
        8,
        checks,
        f"FD {worst_fd:.1e}, idempotence {worst_idem:.1e}, symmetry {worst_sym:.1e}, grid {worst_grid:.1e}",
    )


def test_criterion_9_qubit_sanity(report):
    rng = np.random.default_rng(9)
    m = build_mub(2)
    psd = True
    worst = 0.0
    worst_solved = 0.0
    for i in range(1000):
        rho = random_density_matrix(2, rng) if i % 2 else random_pure_state(2, rng)
        for M in (1, 2, 3):
            table = born_probabilities(rho, m, M)
            ulin = ulin_estimator(table, m)
            psd &= ulin.min_eigenvalue >= -1e-12
            for meas in MEASURES:
                lb = least_bias(table, m, LeastBiasConfig(measure=meas))
                worst = max(worst, np.abs(lb.estimator - ulin.matrix).max())
                if i < 50:
                    # the constrained solve, without the ULIN shortcut
                    solved = least_bias_exact(table, m, meas, shortcut=False).estimator
                    worst_solved = max(worst_solved, np.abs(solved - ulin.matrix).max())
    checks = {
        "ULIN PSD": psd,
        "least-bias = ULIN": worst <= 1e-8,
        "constrained solve = ULIN": worst_solved <= 1e-8,
    }
    report(9, checks, f"max |LB - ULIN| {worst:.1e}, solver without shortcut {worst_solved:.1e}")


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q", "-p", "no:cacheprovider"]))
