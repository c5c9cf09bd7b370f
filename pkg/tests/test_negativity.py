import numpy as np
import pytest

from mubtomo import fixtures as fx
from mubtomo.mub import build_mub
from mubtomo.negativity import (
    LambdaMinResult,
    check_conjecture,
    lambda_min_iterate,
    lambda_min_scan,
    random_kets,
    scan_dimensions,
)
from mubtomo.tomography import born_probabilities, ulin_estimator, ulin_of_state


@pytest.mark.parametrize("d", [2, 3, 4, 5])
def test_trivial_M(d):
    m = build_mub(d)
    for M in (1, d + 1):
        r = lambda_min_scan(m, M, restarts=5)
        assert r.lambda_min == pytest.approx(0, abs=1e-12)


def test_qubit_is_never_negative():
    m = build_mub(2)
    for M in (1, 2, 3):
        assert lambda_min_scan(m, M, restarts=20).lambda_min >= -1e-12


def test_pure_example_fixed_point(mub3):
    r = lambda_min_iterate(mub3, 3, fx.qutrit_pure_example())
    assert r.lambda_min == pytest.approx(-1 / 6, abs=1e-9)
    assert r.converged


def test_M_equals_d_value():
    for d in (3, 4, 5):
        r = lambda_min_scan(build_mub(d), d, restarts=20)
        assert r.lambda_min == pytest.approx(1 / d - 0.5, abs=1e-8)
        assert r.marker == "M=d-analytic"


def test_descent_is_monotone(rng):
    m = build_mub(5)
    v = random_kets(5, 1, rng)[0]
    rho0 = np.outer(v, v.conj())
    vals = [lambda_min_iterate(m, 3, rho0, max_iter=n).lambda_min for n in range(1, 11)]
    assert np.all(np.diff(vals) <= 1e-12)


def test_optimizers_are_pure_and_consistent():
    m = build_mub(4)
    r = lambda_min_scan(m, 2, restarts=20)
    for s in (r.optimizer_rho, r.optimizer_sigma):
        assert np.trace(s).real == pytest.approx(1)
        assert np.trace(s @ s).real == pytest.approx(1)
    val = np.trace(ulin_of_state(r.optimizer_rho, m, 2) @ r.optimizer_sigma).real
    assert val == pytest.approx(r.lambda_min, abs=1e-9)
    # rho and sigma play symmetric roles
    swap = np.trace(ulin_of_state(r.optimizer_sigma, m, 2) @ r.optimizer_rho).real
    assert swap == pytest.approx(val, abs=1e-9)


def test_saturation_and_bounds():
    m = build_mub(4)
    r = lambda_min_scan(m, 2)
    assert r.lambda_min == pytest.approx(-0.25, abs=1e-6)
    assert r.bound_saturated and r.marker == "saturated"
    rows = check_conjecture(scan_dimensions([3, 4], restarts=20))
    assert all(c["respects_lower_bound"] for c in rows)
    assert len(rows) == 4 + 5


def test_more_restarts_never_worse():
    m = build_mub(5)
    one = lambda_min_scan(m, 3, restarts=1, seed=4)
    many = lambda_min_scan(m, 3, restarts=100, seed=4)
    assert many.lambda_min <= one.lambda_min + 1e-12


def test_random_kets_prefix_stable():
    a = random_kets(4, 3, np.random.default_rng(1))
    b = random_kets(4, 10, np.random.default_rng(1))
    assert np.allclose(a, b[:3])
    assert np.allclose(np.linalg.norm(b, axis=1), 1)


def test_scan_is_deterministic():
    m = build_mub(3)
    a, b = lambda_min_scan(m, 2, seed=9), lambda_min_scan(m, 2, seed=9)
    assert a.lambda_min == b.lambda_min
    assert np.array_equal(a.optimizer_rho, b.optimizer_rho)


def test_first_basis_superposition_seed_value():
    m = build_mub(7)
    psi = fx.first_basis_superposition(m)
    u = ulin_estimator(born_probabilities(psi, m, 2), m)
    assert u.min_eigenvalue == pytest.approx(fx.FIRST_BASIS_SUPERPOSITION_7_2, abs=1e-3)
    r = lambda_min_iterate(m, 2, psi)
    assert r.lambda_min <= u.min_eigenvalue + 1e-12


def test_invalid_arguments(mub3):
    with pytest.raises(ValueError):
        lambda_min_scan(mub3, 0)
    with pytest.raises(ValueError):
        lambda_min_scan(mub3, 5)
    with pytest.raises(ValueError):
        lambda_min_scan(mub3, 2, restarts=0)


def test_result_dict():
    r = lambda_min_scan(build_mub(3), 2, restarts=5)
    assert isinstance(r, LambdaMinResult)
    d = r.to_dict()
    assert {"d", "M", "lambda_min", "saturated", "marker", "optimizer_rho"} <= set(d)
    assert "optimizer_rho" not in r.to_dict(states=False)
