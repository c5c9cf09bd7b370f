"""Recompute the reference tables and figure data and compare with the tabulated values."""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field

import numpy as np

from mubtomo import fixtures as fx
from mubtomo.estimators import (
    LeastBiasConfig,
    bayes_mean_estimator,
    least_bias,
    max_mineig_estimator,
    max_vn_estimator,
    von_neumann_entropy,
)
from mubtomo.fields import prime_power
from mubtomo.mub import Q3, build_mub
from mubtomo.negativity import LambdaMinResult, check_conjecture, scan_dimensions
from mubtomo.tomography import born_probabilities, table_from_z, ulin_estimator, z_coordinates

TARGETS = ("table1", "table2", "fig1", "qutrit-examples")

TABLE_TOL = 2e-3
TABLE2_TOL = 3e-3
BAYES_TOL = 0.02
FIG1_DIMS = tuple(d for d in range(3, 14) if prime_power(d))


@dataclass
class Row:
    quantity: str
    reference_value: complex | float
    computed_value: complex | float
    tolerance: float
    relation: str = "approx"  # or "ge": computed >= reference - tol
    informational: bool = False
    note: str = ""

    @property
    def passed(self) -> bool:
        p, c = complex(self.reference_value), complex(self.computed_value)
        if self.relation == "ge":
            return c.real >= p.real - self.tolerance
        return abs(c.real - p.real) <= self.tolerance and abs(c.imag - p.imag) <= self.tolerance

    def to_dict(self) -> dict:
        out = {
            "quantity": self.quantity,
            "reference_value": self.reference_value,
            "computed_value": self.computed_value,
            "tolerance": self.tolerance,
            "relation": self.relation,
            "pass": self.passed,
        }
        if self.informational:
            out["informational"] = True
        if self.note:
            out["note"] = self.note
        return out


@dataclass
class ReproductionReport:
    target: str
    rows: list = field(default_factory=list)
    data: list = field(default_factory=list, repr=False)

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.rows if not r.informational)

    def add(self, *args, **kwargs) -> Row:
        row = Row(*args, **kwargs)
        self.rows.append(row)
        return row

    def to_dict(self) -> dict:
        out = {"target": self.target, "pass": self.passed, "rows": [r.to_dict() for r in self.rows]}
        if self.data:
            out["data"] = self.data
        return out

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["quantity", "reference_re", "reference_im", "computed_re", "computed_im", "tolerance", "relation", "pass"])
        for r in self.rows:
            p, c = complex(r.reference_value), complex(r.computed_value)
            w.writerow([r.quantity, _g(p.real), _g(p.imag), _g(c.real), _g(c.imag), _g(r.tolerance), r.relation,
                        int(r.passed)])
        return buf.getvalue()

    def summary(self) -> str:
        lines = []
        for r in self.rows:
            tag = "PASS" if r.passed else ("info" if r.informational else "FAIL")
            lines.append(f"{tag}  {r.quantity}: reference {_fmt(r.reference_value)}, computed {_fmt(r.computed_value)}"
                         f" (tol {r.tolerance:g}){'  ' + r.note if r.note else ''}")
        lines.append(f"{self.target}: {'all rows pass' if self.passed else 'some rows fail'}")
        return "\n".join(lines)


def _g(x: float) -> str:
    return format(float(x), ".17g")


def _fmt(v) -> str:
    v = complex(v)
    if v.imag == 0:
        return f"{v.real:.5f}"
    return f"{v.real:.5f}{v.imag:+.5f}i"


def _z(result, alpha: int) -> complex:
    return complex(result.z_coords[alpha])


def table1(config: LeastBiasConfig = LeastBiasConfig()) -> ReproductionReport:
    m = build_mub(3)
    rep = ReproductionReport("table1")
    for (w, M), (z3, z4) in fx.TABLE1.items():
        res = least_bias(born_probabilities(fx.rho_w(w), m, M), m, config)
        rep.add(f"LB z3 (w={w}, M={M})", z3, _z(res, 2).real, TABLE_TOL)
        rep.add(f"LB z4 (w={w}, M={M})", z4, _z(res, 3), TABLE_TOL)
    return rep


def table2(n_samples: int = 100_000, seed: int = 1, config: LeastBiasConfig = LeastBiasConfig()) -> ReproductionReport:
    m = build_mub(3)
    rep = ReproductionReport("table2")
    names = list(fx.THREE_BASIS_Z)
    estimators = {
        "lb": lambda t: least_bias(t, m, _with_measure(config, "entropic")),
        "pur": lambda t: least_bias(t, m, _with_measure(config, "purity")),
        "bet": lambda t: least_bias(t, m, _with_measure(config, "betting")),
        "vN": lambda t: max_vn_estimator(t, m),
        "mineig": lambda t: max_mineig_estimator(t, m),
        "bm": lambda t: bayes_mean_estimator(t, m, n_samples=n_samples, seed=seed),
    }
    for row, fn in estimators.items():
        for name, ref in zip(names, fx.TABLE2[row]):
            res = fn(fx.three_basis_table(name))
            tol = BAYES_TOL if row == "bm" else TABLE2_TOL
            note = ""
            if row == "bm":
                se = res.extras.get("z_std_error")
                if se is not None:
                    note = f"MC std error {abs(se[3]):.1e}"
            r = rep.add(f"{row} z4 ({name})", ref, _z(res, 3), tol, note=note)
            if row == "bm" and not r.passed:
                r.note += "; flat prior on the free coordinates may differ from the prior behind the reference values"
    return rep


def _with_measure(config: LeastBiasConfig, measure: str) -> LeastBiasConfig:
    from dataclasses import replace

    return replace(config, measure=measure)


def fig1(restarts: int = 100, seed: int = 0, dims=FIG1_DIMS) -> ReproductionReport:
    rep = ReproductionReport("fig1")
    results: list[LambdaMinResult] = scan_dimensions(dims, restarts=restarts, seed=seed)
    by_key = {(r.d, r.M): r for r in results}
    for (d, M), value in fx.LAMBDA_MIN_LANDMARKS.items():
        if (d, M) in by_key:
            tol = 1e-4 if (d, M) == (4, 2) else TABLE_TOL
            rep.add(f"lambda_min (d={d}, M={M})", value, by_key[d, M].lambda_min, tol)
            if (d, M) == (4, 2):
                rep.add("(d=4, M=2) saturates -(M-1)/d", 1.0, float(by_key[d, M].bound_saturated), 0.0)
    if 7 in dims:
        m7 = build_mub(7)
        val = ulin_estimator(born_probabilities(fx.first_basis_superposition(m7), m7, 2), m7).min_eigenvalue
        rep.add("first-basis superposition, min eigenvalue (d=7, M=2)", fx.FIRST_BASIS_SUPERPOSITION_7_2, val, TABLE_TOL)
    for r in results:
        if r.M == r.d:
            rep.add(f"lambda_min (d={r.d}, M=d) = 1/d - 1/2", 1 / r.d - 0.5, r.lambda_min, 1e-4)
    for c in check_conjecture(results):
        rep.add(f"lambda_min (d={c['d']}, M={c['M']}) >= -(M-1)/d", c["lower_bound"], c["lambda_min"], 1e-9, "ge")
    for c in check_conjecture(results):
        rep.add(f"lambda_min (d={c['d']}, M={c['M']}) >= -min((M-1)/d, 1/2-1/d)", c["conjectured_bound"],
                c["lambda_min"], 1e-9, "ge", informational=True)
    rep.data = [r.to_dict(states=False) for r in results]
    return rep


def fig1_csv(results) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["d", "M", "lambda_min", "saturated", "restarts"])
    for r in results:
        d = r if isinstance(r, dict) else r.to_dict(states=False)
        w.writerow([d["d"], d["M"], _g(d["lambda_min"]), str(d["saturated"]).lower(), d["restarts"]])
    return buf.getvalue()


def qutrit_examples() -> ReproductionReport:
    m = build_mub(3)
    rep = ReproductionReport("qutrit-examples")
    rho = fx.qutrit_pure_example()
    for M, det in [(2, -1 / 27), (3, -5 / 108)]:
        rep.add(f"det ULIN (M={M})", det, ulin_estimator(born_probabilities(rho, m, M), m).determinant, 1e-9)
    mix = fx.two_basis_mixture(0.5)
    table = born_probabilities(mix, m, 2)
    ulin = ulin_estimator(table, m)
    for i, ev in enumerate([0.0, (3 - np.sqrt(3)) / 6, (3 + np.sqrt(3)) / 6]):
        rep.add(f"ULIN eigenvalue {i + 1} (equal-weight mixture, M=2)", ev, ulin.eigenvalues[i], 1e-9)
    rep.add("S(ULIN)", fx.COUNTEREXAMPLE["ulin_entropy"], von_neumann_entropy(ulin.matrix), 1e-3)
    vn = max_vn_estimator(table, m)
    rep.add("max S", fx.COUNTEREXAMPLE["max_vn_entropy"], vn.vn_entropy, TABLE_TOL)
    z = z_coordinates(vn.estimator, m)
    # j = k = 0: z_hat = z3 = q z4
    rep.add("z_hat from z3", fx.COUNTEREXAMPLE["z_hat"], complex(z[2]), TABLE_TOL)
    rep.add("z_hat from q z4", fx.COUNTEREXAMPLE["z_hat"], complex(Q3 * z[3]), TABLE_TOL)
    return rep


def run(target: str, **kwargs) -> ReproductionReport:
    if target == "table1":
        return table1(kwargs.get("config", LeastBiasConfig()))
    if target == "table2":
        return table2(kwargs.get("n_samples", 100_000), kwargs.get("seed", 1), kwargs.get("config", LeastBiasConfig()))
    if target == "fig1":
        return fig1(kwargs.get("restarts", 100), kwargs.get("seed", 0))
    if target == "qutrit-examples":
        return qutrit_examples()
    raise ValueError(f"unknown target {target!r}; expected one of {TARGETS}")
