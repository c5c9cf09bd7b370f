"""Complete sets of d + 1 mutually unbiased bases for prime-power d.

Conventions
-----------
``MubSet.bases[a]`` is a unitary matrix whose column ``k`` is the ket
``|psi_{a k}>`` written in the computational basis. Bases are numbered
``0 .. d`` here; user-facing messages number them ``1 .. d + 1``.

* ``d = 3``: the four bases are hard-coded (see ``QUTRIT_BASES``) with the
  computational basis last, so that the qutrit z-coordinates and all the
  reference qutrit numbers use exactly this ordering and phase choice.
* every other ``d = p**n``: basis ``a`` (``a`` running over the field
  elements in their integer encoding) has amplitudes

      odd p:  <x|psi_{a b}> = w_p ** tr(a x^2 + b x) / sqrt(d)
      p = 2:  <x|psi_{a b}> = i ** Q_a(x) * (-1) ** tr(b x) / sqrt(d)

  with ``w_p = exp(2 pi i / p)``, ``tr`` the absolute field trace, and
  ``Q_a(x) = sum_i S_ii x_i + 2 sum_{i<j} S_ij x_i x_j (mod 4)`` built from
  the symmetric trace-form matrix ``S_ij = tr(a e_i e_j)`` of the
  polynomial basis ``e_i = x**i``. The computational basis comes last.
  For ``d = 2`` this yields the eigenbases of sigma_x, sigma_y, sigma_z in
  that order.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from mubtomo.fields import FiniteField, factorize, prime_power
from mubtomo.linalg import TOL

MAX_DIM = 64

Q3 = np.exp(2j * np.pi / 3)

# columns are kets, written in the computational (fourth) basis
QUTRIT_BASES = np.array(
    [
        [[1, 1, 1], [1, Q3**2, Q3], [1, Q3, Q3**2]],
        [[1, 1, 1], [1, Q3**2, Q3], [Q3, Q3**2, 1]],
        [[1, 1, 1], [1, Q3**2, Q3], [Q3**2, 1, Q3]],
    ],
    dtype=complex,
) / np.sqrt(3)


class UnsupportedDimensionError(ValueError):
    """Raised for dimensions without a known complete MUB construction."""


@dataclass(frozen=True, eq=False)
class MubSet:
    dim: int
    bases: np.ndarray = field(repr=False)  # (d + 1, d, d)
    convention: str = ""

    def __post_init__(self):
        b = np.asarray(self.bases, dtype=complex)
        if b.shape != (self.dim + 1, self.dim, self.dim):
            raise ValueError(f"expected bases of shape {(self.dim + 1, self.dim, self.dim)}, got {b.shape}")
        b.setflags(write=False)
        object.__setattr__(self, "bases", b)

    @property
    def d(self) -> int:
        return self.dim

    @cached_property
    def projectors(self) -> np.ndarray:
        """Array ``P[a, k]`` of rank-one projectors, shape (d + 1, d, d, d)."""
        kets = np.swapaxes(self.bases, 1, 2)  # (a, k, component)
        p = kets[..., :, None] * kets[..., None, :].conj()
        p.setflags(write=False)
        return p

    def projector(self, alpha: int, k: int) -> np.ndarray:
        return self.projectors[alpha, k]

    def ket(self, alpha: int, k: int) -> np.ndarray:
        return self.bases[alpha][:, k]

    def to_dict(self) -> dict:
        return {
            "dim": self.dim,
            "convention": self.convention,
            "bases": [
                [[[float(z.real), float(z.imag)] for z in row] for row in basis]
                for basis in self.bases
            ],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "MubSet":
        arr = np.array(data["bases"], dtype=float)
        return cls(int(data["dim"]), arr[..., 0] + 1j * arr[..., 1], data.get("convention", ""))

    def to_json(self) -> str:
        from mubtomo.io import dumps

        return dumps(self.to_dict())

    @classmethod
    def from_json(cls, text: str) -> "MubSet":
        return cls.from_dict(json.loads(text))


def _check_dimension(d: int) -> tuple[int, int]:
    if not isinstance(d, (int, np.integer)) or d < 2:
        raise UnsupportedDimensionError(f"dimension must be an integer >= 2, got {d!r}")
    pp = prime_power(int(d))
    if pp is None:
        fac = "·".join(
            str(p) if e == 1 else f"{p}^{e}" for p, e in sorted(factorize(int(d)).items())
        )
        raise UnsupportedDimensionError(f"{d} = {fac} not a prime power")
    if d > MAX_DIM:
        raise UnsupportedDimensionError(f"{d} exceeds the supported maximum dimension {MAX_DIM}")
    return pp


def _field_bases(p: int, n: int) -> np.ndarray:
    gf = FiniteField(p, n)
    d = gf.order
    xs = np.arange(d)
    mul, add, tr = gf.mul_table, gf.add_table, gf.trace_table
    sq = mul[xs, xs]
    bases = np.empty((d + 1, d, d), dtype=complex)
    # lin[b, x] = tr(b x)
    lin = tr[mul]
    if p == 2:
        digs = np.array([gf.digits(x) for x in xs])
        units = [p**i for i in range(n)]
        for a in range(d):
            s = np.array([[tr[mul[a, mul[ei, ej]]] for ej in units] for ei in units])
            quad = digs @ np.diag(s) + 2 * np.einsum("xi,ij,xj->x", digs, np.triu(s, 1), digs)
            amp = (1j) ** (quad % 4)
            # column b = ket b; row x = component x
            bases[a] = (amp[:, None] * (-1.0) ** lin.T) / np.sqrt(d)
    else:
        omega = np.exp(2j * np.pi / p)
        for a in range(d):
            expo = tr[add[mul[a, sq][:, None], mul]]  # [x, b] -> tr(a x^2 + b x)
            bases[a] = omega**expo / np.sqrt(d)
    bases[d] = np.eye(d)
    return bases


def build_mub(d: int) -> MubSet:
    """Complete set of ``d + 1`` MUB for prime-power ``d <= 64``."""
    p, n = _check_dimension(d)
    if d == 3:
        bases = np.concatenate([QUTRIT_BASES, np.eye(3, dtype=complex)[None]])
        conv = "qutrit reference set; computational basis last; q = exp(2 pi i / 3)"
    else:
        bases = _field_bases(p, n)
        gf = FiniteField(p, n)
        conv = (
            f"GF({p}^{n}) trace construction over {gf.poly_string()}; "
            "bases ordered by field element; computational basis last"
        )
    m = MubSet(int(d), bases, conv)
    report = verify_mub(m, 1e-10)
    if not report.passed:
        raise RuntimeError(f"MUB construction failed verification for d={d}: {report}")
    return m


@dataclass
class VerificationReport:
    dim: int
    tol: float
    orthonormality: float
    unbiasedness: float
    completeness: float
    offenders: list[tuple[int, int]]

    @property
    def max_deviation(self) -> float:
        return max(self.orthonormality, self.unbiasedness, self.completeness)

    @property
    def passed(self) -> bool:
        return self.max_deviation <= self.tol

    def to_dict(self) -> dict:
        return {
            "dim": self.dim,
            "tol": self.tol,
            "orthonormality": self.orthonormality,
            "unbiasedness": self.unbiasedness,
            "completeness": self.completeness,
            "max_deviation": self.max_deviation,
            "passed": self.passed,
            "offenders": [f"({a + 1},{k})" for a, k in self.offenders],
        }

    def __str__(self) -> str:
        status = "pass" if self.passed else "FAIL"
        s = (
            f"d={self.dim} {status}: orthonormality {self.orthonormality:.2e}, "
            f"unbiasedness {self.unbiasedness:.2e}, completeness {self.completeness:.2e}"
        )
        if self.offenders:
            s += "; offending (alpha,k): " + ", ".join(f"({a + 1},{k})" for a, k in self.offenders)
        return s


def verify_mub(m: MubSet, tol: float = TOL.mub) -> VerificationReport:
    """Check orthonormality, mutual unbiasedness and completeness of ``m``."""
    d = m.dim
    kets = np.swapaxes(m.bases, 1, 2).reshape((d + 1) * d, d)
    gram = kets.conj() @ kets.T
    label = np.repeat(np.arange(d + 1), d)
    same = label[:, None] == label[None, :]
    dev = np.where(same, np.abs(gram - np.eye(len(kets))), np.abs(np.abs(gram) ** 2 - 1.0 / d))
    ortho = float(dev[same].max())
    unb = float(dev[~same].max()) if (~same).any() else 0.0
    comp = float(
        max(np.abs(m.projectors[a].sum(axis=0) - np.eye(d)).max() for a in range(d + 1))
    )
    offenders: list[tuple[int, int]] = []
    failing = (dev > tol).sum(axis=1)
    if failing.max() > 0:
        worst = np.flatnonzero(failing == failing.max())
        offenders = [(int(i // d), int(i % d)) for i in worst]
    return VerificationReport(d, tol, ortho, unb, comp, offenders)


def complementary_observables_qutrit(m: MubSet) -> np.ndarray:
    """The four unitaries Z_a = sum_k q^k P[a, k] of the qutrit MUB."""
    if m.dim != 3:
        raise ValueError(f"complementary observables are defined for d = 3 only, got d = {m.dim}")
    phases = Q3 ** np.arange(3)
    return np.einsum("k,akij->aij", phases, m.projectors)
