import json
import re

import numpy as np
import pytest

from mubtomo.mub import (
    QUTRIT_BASES,
    Q3,
    MubSet,
    UnsupportedDimensionError,
    build_mub,
    complementary_observables_qutrit,
    verify_mub,
)

DIMS = [2, 3, 4, 5, 7, 8, 9, 11, 13, 16, 25, 27, 32]


@pytest.mark.parametrize("d", DIMS)
def test_mub_conditions(d):
    m = build_mub(d)
    rep = verify_mub(m)
    assert rep.passed, str(rep)
    assert rep.max_deviation < 1e-12
    proj = m.projectors
    assert np.allclose(np.einsum("akij,akjl->akil", proj, proj), proj, atol=1e-12)
    assert np.allclose(proj.sum(axis=1), np.eye(d), atol=1e-12)


@pytest.mark.parametrize("d,msg", [(6, "6 = 2·3 not a prime power"), (12, "12 = 2^2·3 not a prime power")])
def test_unsupported_dimension(d, msg):
    with pytest.raises(UnsupportedDimensionError, match=re.escape(msg)):
        build_mub(d)


def test_qubit_bases_are_pauli_eigenbases():
    m = build_mub(2)
    paulis = [np.array([[0, 1], [1, 0]]), np.array([[0, -1j], [1j, 0]]), np.diag([1, -1])]
    for a, s in enumerate(paulis):
        p0, p1 = m.projector(a, 0), m.projector(a, 1)
        obs = p0 - p1
        assert np.allclose(obs, s) or np.allclose(obs, -s)


def test_qutrit_reference_bases():
    m = build_mub(3)
    q = Q3
    b1 = np.array([[1, 1, 1], [1, q**2, q], [1, q, q**2]]) / np.sqrt(3)
    assert np.allclose(m.bases[0], b1)
    assert np.allclose(m.bases[:3], QUTRIT_BASES)
    assert np.allclose(m.bases[3], np.eye(3))


def test_complementary_observables():
    m = build_mub(3)
    z = complementary_observables_qutrit(m)
    q = Q3
    for a in range(3):
        expected = np.array([[0, 0, q ** (-a)], [1, 0, 0], [0, q**a, 0]])
        assert np.allclose(z[a], expected, atol=1e-12)
    assert np.allclose(z[3], np.diag([1, q, q**2]))
    for a in range(4):
        assert np.allclose(z[a] @ z[a].conj().T, np.eye(3), atol=1e-12)
    with pytest.raises(ValueError):
        complementary_observables_qutrit(build_mub(5))


def test_json_round_trip_is_exact():
    m = build_mub(8)
    back = MubSet.from_json(m.to_json())
    assert np.array_equal(back.bases, m.bases)
    data = json.loads(m.to_json())
    assert len(data["bases"]) == 9 and len(data["bases"][0][0][0]) == 2


def test_verification_reports_offenders():
    m = build_mub(3)
    bad = m.bases.copy()
    bad[1][:, 2] = bad[1][:, 1]
    rep = verify_mub(MubSet(3, bad, "broken"))
    assert not rep.passed
    assert rep.offenders
    assert "(2," in str(rep)


def test_bases_are_read_only():
    m = build_mub(5)
    with pytest.raises(ValueError):
        m.bases[0, 0, 0] = 0
