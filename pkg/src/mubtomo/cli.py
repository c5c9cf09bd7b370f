"""Command-line front end: build-mub, estimate, lambda-min, reproduce.

Exit codes: 0 success, 1 reproduction rows failed, 2 bad input domain,
3 inconsistent data, 4 non-convergence (best-so-far output is still written).
Defaults may be supplied as a JSON file named by $MUBTOMO_CONFIG or --config;
command-line flags win.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import os
import sys
from dataclasses import asdict, dataclass, fields
from pathlib import Path

import numpy as np

from mubtomo.io import atomic_write, dumps

CONFIG_ENV = "MUBTOMO_CONFIG"

EXIT_OK = 0
EXIT_FAILED_ROWS = 1
EXIT_DOMAIN = 2
EXIT_INCONSISTENT = 3
EXIT_NONCONVERGED = 4

KINDS = ("ulin", "least_bias", "max_vn", "max_mineig", "bayes_mean")

log = logging.getLogger("mubtomo")


@dataclass
class RunConfig:
    command: str | None = None
    dim: list | None = None  # lambda-min accepts several
    measured: int | None = None
    input: str | None = None
    output: str | None = None
    format: str = "json"
    kind: str = "least_bias"
    measure: str = "entropic"
    method: str = "hybrid"
    mu: float = 1e-4
    epsilon: float | None = None
    tol: float = 1e-10
    max_iter: int | None = None
    restarts: int = 100
    samples: int = 100_000
    seed: int = 0
    target: str | None = None

    def to_json(self) -> str:
        return dumps(asdict(self))

    @classmethod
    def from_json(cls, text: str) -> "RunConfig":
        data = json.loads(text)
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        return cls(**data)


class CliError(Exception):
    def __init__(self, code: int, message: str):
        super().__init__(message)
        self.code = code


def _dims(values) -> list[int]:
    out = []
    for v in values or []:
        out.extend(int(x) for x in str(v).split(",") if x.strip())
    return out


def _parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="mubtomo", description=__doc__.splitlines()[0])
    p.add_argument("--config", help=f"JSON file with default settings (default: ${CONFIG_ENV})")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, *names):
        opts = {
            "dim": lambda: sp.add_argument("--dim", action="append", help="dimension d (lambda-min: repeatable or comma list)"),
            "measured": lambda: sp.add_argument("--measured", type=int, metavar="M", help="number of measured bases"),
            "in": lambda: sp.add_argument("--in", dest="input", help="input file (JSON or CSV probability table)"),
            "out": lambda: sp.add_argument("--out", dest="output", help="output file (default: stdout)"),
            "format": lambda: sp.add_argument("--format", choices=["json", "csv"]),
            "seed": lambda: sp.add_argument("--seed", type=int),
            "tol": lambda: sp.add_argument("--tol", type=float),
            "restarts": lambda: sp.add_argument("--restarts", type=int),
            "samples": lambda: sp.add_argument("--samples", type=int),
        }
        for n in names:
            opts[n]()

    sp = sub.add_parser("build-mub", help="construct and verify a complete set of MUB")
    common(sp, "dim", "out", "format")
    sp = sub.add_parser("estimate", help="run an estimator on a probability table")
    common(sp, "in", "out", "format", "measured", "seed", "tol", "samples")
    sp.add_argument("--kind", choices=KINDS)
    sp.add_argument("--measure", choices=["entropic", "purity", "betting"])
    sp.add_argument("--method", choices=["hybrid", "iterate", "exact"], help="least-bias solver")
    sp.add_argument("--mu", type=float)
    sp.add_argument("--epsilon", type=float)
    sp.add_argument("--max-iter", dest="max_iter", type=int)
    sp = sub.add_parser("lambda-min", help="most negative ULIN eigenvalue per (d, M)")
    common(sp, "dim", "measured", "out", "format", "seed", "tol", "restarts")
    sp = sub.add_parser("reproduce", help="recompute a reference table or figure")
    sp.add_argument("target", choices=["table1", "table2", "fig1", "qutrit-examples"])
    common(sp, "out", "format", "seed", "restarts", "samples")
    return p


def load_config(args: argparse.Namespace) -> RunConfig:
    path = args.config or os.environ.get(CONFIG_ENV)
    cfg = RunConfig()
    if path:
        try:
            cfg = RunConfig.from_json(Path(path).read_text())
        except (OSError, ValueError, TypeError) as exc:
            raise CliError(EXIT_DOMAIN, f"cannot read config {path}: {exc}") from None
    for f in fields(RunConfig):
        val = getattr(args, f.name, None)
        if val is not None:
            setattr(cfg, f.name, val)
    if cfg.dim is not None:
        cfg.dim = _dims(cfg.dim)
    return cfg


def _emit(cfg: RunConfig, text: str) -> None:
    if cfg.output:
        atomic_write(cfg.output, text)
    else:
        sys.stdout.write(text)


def _mub(d: int):
    from mubtomo.mub import UnsupportedDimensionError, build_mub

    try:
        return build_mub(d)
    except UnsupportedDimensionError as exc:
        raise CliError(EXIT_DOMAIN, str(exc)) from None
    except ValueError as exc:
        raise CliError(EXIT_DOMAIN, str(exc)) from None


def cmd_build_mub(cfg: RunConfig) -> int:
    from mubtomo.mub import verify_mub

    if not cfg.dim or len(cfg.dim) != 1:
        raise CliError(EXIT_DOMAIN, "build-mub needs exactly one --dim")
    m = _mub(cfg.dim[0])
    report = verify_mub(m)
    if cfg.format == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["alpha", "k", "j", "re", "im"])
        for a in range(m.dim + 1):
            for k in range(m.dim):
                for j in range(m.dim):
                    z = m.bases[a, j, k]
                    w.writerow([a + 1, k, j, format(z.real, ".17g"), format(z.imag, ".17g")])
        text = buf.getvalue()
    else:
        text = dumps({**m.to_dict(), "verification": report.to_dict()})
    _emit(cfg, text)
    log.info("%s", report)
    return EXIT_OK if report.passed else EXIT_INCONSISTENT


def _load_table(cfg: RunConfig):
    from mubtomo.tomography import ProbabilityTable

    if not cfg.input:
        raise CliError(EXIT_DOMAIN, "estimate needs --in")
    try:
        table = ProbabilityTable.loads(Path(cfg.input).read_text())
    except OSError as exc:
        raise CliError(EXIT_DOMAIN, f"cannot read {cfg.input}: {exc}") from None
    except (ValueError, KeyError, TypeError) as exc:
        raise CliError(EXIT_DOMAIN, f"invalid probability table: {exc}") from None
    if cfg.measured is not None:
        if not 1 <= cfg.measured <= table.M:
            raise CliError(EXIT_DOMAIN, f"--measured {cfg.measured} outside 1..{table.M} available rows")
        table = table.truncated(cfg.measured)
    return table


def _matrix_csv(mat) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["i", "j", "re", "im"])
    for (i, j), z in np.ndenumerate(np.asarray(mat)):
        w.writerow([i, j, format(z.real, ".17g"), format(z.imag, ".17g")])
    return buf.getvalue()


def cmd_estimate(cfg: RunConfig) -> int:
    from mubtomo.estimators import (
        InfeasibleError,
        LeastBiasConfig,
        bayes_mean_estimator,
        least_bias,
        max_mineig_estimator,
        max_vn_estimator,
    )
    from mubtomo.tomography import InconsistentTableError, full_reconstruct, ulin_estimator

    table = _load_table(cfg)
    m = _mub(table.dim)
    if cfg.kind not in KINDS:
        raise CliError(EXIT_DOMAIN, f"unknown estimator kind {cfg.kind!r}")
    try:
        if cfg.kind == "ulin":
            u = ulin_estimator(table, m)
            if table.M == m.dim + 1:
                full_reconstruct(table, m)
            out = {
                "kind": "ulin",
                "dim": table.dim,
                "M": table.M,
                "matrix": u.matrix,
                "eigenvalues": u.eigenvalues,
                "min_eigenvalue": u.min_eigenvalue,
                "is_physical": u.is_physical,
                "diagnostics": {"determinant": u.determinant},
            }
            if table.dim == 3:
                from mubtomo.tomography import z_coordinates

                out["z_coords"] = z_coordinates(u.matrix, m)
            _emit(cfg, _matrix_csv(u.matrix) if cfg.format == "csv" else dumps(out))
            return EXIT_OK
        if cfg.kind == "least_bias":
            kw = dict(mu=cfg.mu, epsilon=cfg.epsilon, tol=cfg.tol, measure=cfg.measure, method=cfg.method)
            if cfg.max_iter is not None:
                kw["max_iter"] = cfg.max_iter
            try:
                lb_cfg = LeastBiasConfig(**kw)
            except ValueError as exc:
                raise CliError(EXIT_DOMAIN, str(exc)) from None
            res = least_bias(table, m, lb_cfg)
        elif cfg.kind == "max_vn":
            res = max_vn_estimator(table, m)
        elif cfg.kind == "max_mineig":
            res = max_mineig_estimator(table, m)
        else:
            try:
                res = bayes_mean_estimator(table, m, n_samples=cfg.samples, seed=cfg.seed)
            except ValueError as exc:
                raise CliError(EXIT_DOMAIN, str(exc)) from None
    except (InfeasibleError, InconsistentTableError) as exc:
        raise CliError(EXIT_INCONSISTENT, str(exc)) from None
    _emit(cfg, _matrix_csv(res.estimator) if cfg.format == "csv" else dumps(res.to_dict()))
    if not res.converged:
        log.warning("%s did not converge; best-so-far written", res.kind)
        return EXIT_NONCONVERGED
    return EXIT_OK


def cmd_lambda_min(cfg: RunConfig) -> int:
    from mubtomo.negativity import lambda_min_scan
    from mubtomo.reproduce import FIG1_DIMS, fig1_csv

    dims = cfg.dim or list(FIG1_DIMS)
    if cfg.restarts < 1:
        raise CliError(EXIT_DOMAIN, "--restarts must be at least 1")
    mubs = [_mub(d) for d in dims]  # reject bad dimensions before any work
    results = []
    for m in mubs:
        Ms = [cfg.measured] if cfg.measured is not None else range(1, m.dim + 2)
        for M in Ms:
            if not 1 <= M <= m.dim + 1:
                raise CliError(EXIT_DOMAIN, f"M must be in 1..{m.dim + 1}, got {M}")
            r = lambda_min_scan(m, M, restarts=cfg.restarts, seed=cfg.seed, tol=cfg.tol)
            log.info("d=%d M=%d lambda_min=%.10f (%s)", r.d, r.M, r.lambda_min, r.marker)
            results.append(r)
    if cfg.format == "csv":
        _emit(cfg, fig1_csv(results))
    else:
        _emit(cfg, dumps([r.to_dict() for r in results]))
    return EXIT_OK if all(r.converged for r in results) else EXIT_NONCONVERGED


def cmd_reproduce(cfg: RunConfig) -> int:
    from mubtomo.reproduce import run

    report = run(cfg.target, restarts=cfg.restarts, n_samples=cfg.samples, seed=cfg.seed)
    _emit(cfg, report.to_csv() if cfg.format == "csv" else dumps(report.to_dict()))
    print(report.summary(), file=sys.stderr)
    return EXIT_OK if report.passed else EXIT_FAILED_ROWS


COMMANDS = {
    "build-mub": cmd_build_mub,
    "estimate": cmd_estimate,
    "lambda-min": cmd_lambda_min,
    "reproduce": cmd_reproduce,
}


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        cfg = load_config(args)
        cfg.command = args.command
        if args.command == "reproduce":
            cfg.target = args.target
            # reproduction uses its own seeds unless one is given
            if args.seed is None:
                cfg.seed = 1 if cfg.target == "table2" else 0
        return COMMANDS[args.command](cfg)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code


if __name__ == "__main__":
    sys.exit(main())
