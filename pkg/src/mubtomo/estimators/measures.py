"""Predictability of a d-outcome distribution: entropic, purity, betting.

All three vanish on the uniform distribution, reach 1 on a deterministic
one and are convex. The betting measure is the qutrit "linear bet"
max(p) - min(p); for other d the same expression is used as an extension.
"""

from __future__ import annotations

from enum import Enum

import numpy as np


class Measure(str, Enum):
    ENTROPIC = "entropic"
    PURITY = "purity"
    BETTING = "betting"


def as_measure(m) -> Measure:
    if isinstance(m, Measure):
        return m
    try:
        return Measure(str(m).lower())
    except ValueError:
        raise ValueError(f"unknown predictability measure {m!r}; expected one of "
                         f"{[x.value for x in Measure]}") from None


def xlogx(p: np.ndarray) -> np.ndarray:
    p = np.asarray(p, dtype=float)
    out = np.zeros_like(p)
    pos = p > 0
    out[pos] = p[pos] * np.log(p[pos])
    return out


def predictability(p, measure="entropic") -> np.ndarray | float:
    """Predictability of the distribution(s) ``p`` along the last axis."""
    measure = as_measure(measure)
    p = np.asarray(p, dtype=float)
    d = p.shape[-1]
    if measure is Measure.ENTROPIC:
        # sum_l p_l log_d(p_l d)
        val = (xlogx(p).sum(axis=-1) + np.log(d) * p.sum(axis=-1)) / np.log(d)
    elif measure is Measure.PURITY:
        val = d / (d - 1) * np.sum((p - 1.0 / d) ** 2, axis=-1)
    else:
        val = p.max(axis=-1) - p.min(axis=-1)
    return val if np.ndim(val) else float(val)


def predictability_gradient(p, measure="entropic", tie_tol: float = 1e-12) -> np.ndarray:
    """dP/dp_l (a subgradient for the betting measure).

    For betting, ties for the maximum (minimum) share the +1 (-1) equally;
    when every entry ties the zero vector is returned.
    """
    measure = as_measure(measure)
    p = np.asarray(p, dtype=float)
    d = p.shape[-1]
    if measure is Measure.ENTROPIC:
        with np.errstate(divide="ignore"):
            return (np.log(p) + 1.0) / np.log(d) + 1.0
    if measure is Measure.PURITY:
        return 2.0 * d / (d - 1) * (p - 1.0 / d)
    hi = p.max(axis=-1, keepdims=True)
    lo = p.min(axis=-1, keepdims=True)
    top = (p >= hi - tie_tol).astype(float)
    bot = (p <= lo + tie_tol).astype(float)
    g = top / top.sum(axis=-1, keepdims=True) - bot / bot.sum(axis=-1, keepdims=True)
    flat = (hi - lo) <= tie_tol
    return np.where(flat, 0.0, g)
