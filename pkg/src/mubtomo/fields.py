"""Finite fields GF(p^n) with dense lookup tables.

Elements are the integers ``0 .. p^n - 1``; the base-``p`` digits of an
element are the coefficients of its polynomial representative (digit ``i``
multiplies ``x**i``). Multiplication goes through log/antilog tables built
from a fixed primitive polynomial, chosen as the first monic primitive
polynomial in the order of increasing ``sum(c_i * p**i)`` over its lower
coefficients. For the dimensions used here that gives

    GF(4)  x^2 + x + 1          GF(8)  x^3 + x + 1
    GF(9)  x^2 + x + 2          GF(16) x^4 + x + 1
    GF(25) x^2 + x + 2          GF(27) x^3 + 2x + 1
    GF(32) x^5 + x^2 + 1        GF(49) x^2 + x + 3
    GF(64) x^6 + x + 1

and ``x + (p - g)`` for a prime ``p`` with smallest primitive root ``g``.
"""

from __future__ import annotations

import itertools
from functools import cached_property

import numpy as np


def factorize(n: int) -> dict[int, int]:
    out: dict[int, int] = {}
    k = 2
    while k * k <= n:
        while n % k == 0:
            out[k] = out.get(k, 0) + 1
            n //= k
        k += 1
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


def prime_power(q: int) -> tuple[int, int] | None:
    """Return ``(p, n)`` with ``q == p**n`` or ``None``."""
    if q < 2:
        return None
    f = factorize(q)
    if len(f) != 1:
        return None
    (p, n), = f.items()
    return p, n


class FiniteField:
    """GF(p^n) arithmetic over integer-encoded elements."""

    def __init__(self, p: int, n: int = 1):
        if prime_power(p) != (p, 1):
            raise ValueError(f"{p} is not prime")
        if n < 1:
            raise ValueError("degree must be positive")
        self.p = p
        self.n = n
        self.order = p**n
        self.poly, self.exp_table = self._find_primitive()
        self.log_table = np.zeros(self.order, dtype=np.int64)
        self.log_table[self.exp_table[: self.order - 1]] = np.arange(self.order - 1)

    def __repr__(self) -> str:
        return f"FiniteField({self.p}, {self.n})"

    # polynomial helpers on digit vectors
    def digits(self, a: int) -> list[int]:
        return [(a // self.p**i) % self.p for i in range(self.n)]

    def from_digits(self, ds) -> int:
        return int(sum(int(c) % self.p * self.p**i for i, c in enumerate(ds)))

    def _times_x(self, a: int, low: tuple[int, ...]) -> int:
        ds = self.digits(a)
        top = ds[-1]
        shifted = [0] + ds[:-1]
        # x^n = -(c_0 + c_1 x + ... + c_{n-1} x^{n-1})
        return self.from_digits([s - top * c for s, c in zip(shifted, low)])

    def _find_primitive(self) -> tuple[tuple[int, ...], np.ndarray]:
        p, n, q = self.p, self.n, self.order
        for low in itertools.product(range(p), repeat=n):
            low = tuple(reversed(low))  # iterate c_{n-1} slowest
            if low[0] == 0:
                continue
            table = np.zeros(2 * q, dtype=np.int64)
            a = 1
            ok = True
            for i in range(q - 1):
                if a == 1 and i > 0:
                    ok = False
                    break
                table[i] = a
                a = self._times_x(a, low)
            if ok and a == 1:
                table[q - 1 : 2 * (q - 1)] = table[: q - 1]
                return low, table
        raise RuntimeError(f"no primitive polynomial found for GF({p}^{n})")

    def poly_string(self) -> str:
        terms = [f"x^{self.n}" if self.n > 1 else "x"]
        for i in reversed(range(self.n)):
            c = self.poly[i]
            if c == 0:
                continue
            mono = "" if i == 0 else ("x" if i == 1 else f"x^{i}")
            coef = "" if (c == 1 and i > 0) else str(c)
            terms.append(f"{coef}{mono}")
        return " + ".join(terms)

    # arithmetic
    def add(self, a: int, b: int) -> int:
        return int(self.add_table[a, b])

    def neg(self, a: int) -> int:
        return self.from_digits([-c for c in self.digits(a)])

    def mul(self, a: int, b: int) -> int:
        return int(self.mul_table[a, b])

    def inv(self, a: int) -> int:
        if a == 0:
            raise ZeroDivisionError("inverse of zero")
        return int(self.exp_table[(self.order - 1 - self.log_table[a]) % (self.order - 1)])

    def power(self, a: int, k: int) -> int:
        if a == 0:
            return 1 if k == 0 else 0
        return int(self.exp_table[(self.log_table[a] * k) % (self.order - 1)])

    def trace(self, a: int) -> int:
        """Absolute trace a + a^p + ... + a^(p^(n-1)), an element of GF(p)."""
        t = 0
        for i in range(self.n):
            t = self.add(t, self.power(a, self.p**i))
        if t >= self.p:
            raise ArithmeticError("trace left the prime subfield")
        return t

    @cached_property
    def add_table(self) -> np.ndarray:
        q, p = self.order, self.p
        digs = np.array([self.digits(a) for a in range(q)], dtype=np.int64)
        s = (digs[:, None, :] + digs[None, :, :]) % p
        weights = p ** np.arange(self.n)
        return (s * weights).sum(axis=2)

    @cached_property
    def mul_table(self) -> np.ndarray:
        q = self.order
        logs = self.log_table
        idx = (logs[:, None] + logs[None, :]) % (q - 1)
        table = self.exp_table[idx]
        table[0, :] = 0
        table[:, 0] = 0
        return table

    @cached_property
    def trace_table(self) -> np.ndarray:
        return np.array([self.trace(a) for a in range(self.order)], dtype=np.int64)
