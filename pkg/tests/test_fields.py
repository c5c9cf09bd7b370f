import itertools

import numpy as np
import pytest

from mubtomo.fields import FiniteField, factorize, prime_power

ORDERS = [q for q in range(2, 65) if prime_power(q)]


def test_factorize_and_prime_power():
    assert factorize(360) == {2: 3, 3: 2, 5: 1}
    assert prime_power(49) == (7, 2)
    assert prime_power(64) == (2, 6)
    assert prime_power(6) is None
    assert prime_power(1) is None


@pytest.mark.parametrize("q", ORDERS)
def test_field_axioms(q):
    p, n = prime_power(q)
    f = FiniteField(p, n)
    add, mul = f.add_table, f.mul_table
    els = np.arange(q)
    # additive and multiplicative groups
    assert np.all(add[:, 0] == els)
    assert np.all(mul[:, 1] == els)
    assert np.all(add == add.T) and np.all(mul == mul.T)
    for a in range(q):
        assert sorted(add[a]) == list(els)
        if a:
            assert sorted(mul[a, 1:]) == list(els[1:])
            assert f.mul(a, f.inv(a)) == 1
        assert f.add(a, f.neg(a)) == 0
    # associativity and distributivity on a sample of triples
    rng = np.random.default_rng(q)
    for a, b, c in rng.integers(0, q, size=(200, 3)):
        assert add[add[a, b], c] == add[a, add[b, c]]
        assert mul[mul[a, b], c] == mul[a, mul[b, c]]
        assert mul[a, add[b, c]] == add[mul[a, b], mul[a, c]]


@pytest.mark.parametrize("q", ORDERS)
def test_primitive_element_and_trace(q):
    p, n = prime_power(q)
    f = FiniteField(p, n)
    # x generates the multiplicative group
    assert len(set(f.exp_table[: q - 1].tolist())) == q - 1
    tr = f.trace_table
    assert tr.max() < p
    # trace is additive, onto GF(p), and balanced
    for a, b in itertools.islice(itertools.product(range(q), repeat=2), 0, None, max(1, q * q // 300)):
        assert tr[f.add(a, b)] == (tr[a] + tr[b]) % p
    counts = np.bincount(tr, minlength=p)
    assert np.all(counts == q // p)


def test_frobenius_is_automorphism():
    f = FiniteField(3, 3)
    for a in range(27):
        for b in range(0, 27, 5):
            assert f.power(f.mul(a, b), 3) == f.mul(f.power(a, 3), f.power(b, 3))
            assert f.power(f.add(a, b), 3) == f.add(f.power(a, 3), f.power(b, 3))


def test_rejects_non_prime_base():
    with pytest.raises(ValueError):
        FiniteField(4, 1)
