"""Command-line front end.

    invdet eval --gen seed=1,k=3,frac=0.5 --method contour --nodes 32
    invdet convergence --matrix a.json --method series --format csv
    invdet charpoly --matrix a.json --lambda 3,0
    invdet verify --seed 7
    invdet bench --gen seed=0,k=2,frac=0.8

Input is always the matrix ``A``; series methods expand in ``M = A - 1`` and
``charpoly`` reports ``1/det(M - lambda)`` for that same ``M``.

Exit codes: 0 ok, 2 parse/config error, 3 precondition violated,
4 verification failure.
"""
from __future__ import annotations

import argparse
import sys
import time
import warnings
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import contour, matcore, series, verify
from .matcore import GateStatus, gate, identity, lu_det
from .reporting import dumps, table_csv

EXIT_OK, EXIT_CONFIG, EXIT_PRECONDITION, EXIT_VERIFY = 0, 2, 3, 4
METHODS = ("series", "relaxed", "tracelog", "contour", "lu")
ORACLE_MAX_K = 6


class ConfigError(ValueError):
    pass


@dataclass
class GenSpec:
    seed: int
    k: int
    frac: float


@dataclass
class RunConfig:
    command: str
    matrix_path: str | None = None
    gen: GenSpec | None = None
    method: str = "series"
    order: int | None = None
    nodes: int = 32
    lam: complex | None = None
    out: str | None = None
    fmt: str = "json"
    budget: int = contour.DEFAULT_BUDGET
    force: bool = False
    seed: int = 0
    samples: int = 20


@dataclass
class EvalResult:
    value: complex
    method: str
    params: dict
    gate: GateStatus
    reference: complex | None = None
    deviation: float | None = None
    extra: dict = field(default_factory=dict)

    def to_dict(self):
        out = {
            "method": self.method,
            "value": self.value,
            "params": self.params,
            "gate": self.gate.to_dict(),
            "reference": self.reference,
            "deviation": self.deviation,
        }
        out.update(self.extra)
        return out


def parse_gen(text: str, force: bool = False) -> GenSpec:
    try:
        fields = dict(part.split("=", 1) for part in text.split(","))
        spec = GenSpec(int(fields.pop("seed")), int(fields.pop("k")), float(fields.pop("frac")))
    except (KeyError, ValueError) as exc:
        raise ConfigError(f"bad --gen {text!r}: expected seed=<int>,k=<int>,frac=<float>") from exc
    if fields:
        raise ConfigError(f"unknown --gen keys: {sorted(fields)}")
    if spec.seed < 0 or spec.seed >= 2**64:
        raise ConfigError("seed must be an unsigned 64-bit integer")
    if spec.k < 1:
        raise ConfigError("k must be positive")
    if not spec.frac > 0 or (spec.frac > 1 and not force):
        raise ConfigError("frac must lie in (0, 1] (use --force to go beyond)")
    return spec


def parse_lambda(text: str) -> complex:
    try:
        parts = [float(p) for p in text.split(",")]
    except ValueError as exc:
        raise ConfigError(f"bad --lambda {text!r}") from exc
    if len(parts) == 1:
        return complex(parts[0])
    if len(parts) == 2:
        return complex(parts[0], parts[1])
    raise ConfigError("--lambda takes <re> or <re>,<im>")


def load_input(cfg: RunConfig) -> np.ndarray:
    if cfg.gen is not None:
        rng = np.random.default_rng(cfg.gen.seed)
        return matcore.random_gated(rng, cfg.gen.k, cfg.gen.frac)
    if cfg.matrix_path is None:
        raise ConfigError("one of --matrix or --gen is required")
    try:
        return matcore.load_matrix(cfg.matrix_path)
    except OSError as exc:
        raise ConfigError(str(exc)) from exc


def _reference(a):
    if a.shape[0] > ORACLE_MAX_K:
        return None
    d = lu_det(a)
    return None if d == 0 else 1 / d


def cmd_eval(cfg: RunConfig) -> EvalResult:
    a = load_input(cfg)
    k = a.shape[0]
    m = a - identity(k)
    g = gate(a)
    params = {}
    extra = {}
    if cfg.method == "lu":
        d = lu_det(a)
        if d == 0:
            raise ZeroDivisionError("matrix is singular")
        value = 1 / d
    elif cfg.method == "series":
        rep = series.eval_series_R(m, cfg.order)
        value = rep.final_value
        params = {"order": rep.truncation_degree, "strategy": rep.strategy}
    elif cfg.method == "relaxed":
        rep = series.eval_series_S(m, cfg.order)
        value = rep.final_value
        params = {"order": rep.truncation_degree}
        try:
            extra["closed_form"] = series.eval_S_closed(m)
        except series.RowSumPole:
            extra["closed_form"] = None
    elif cfg.method == "tracelog":
        order = 60 if cfg.order is None else cfg.order
        value = series.eval_tracelog(m, order).final_value
        params = {"order": order}
    elif cfg.method == "contour":
        q = contour.eval_contour(a, cfg.nodes, cfg.budget)
        value = q.value
        params = {"nodes": q.nodes_per_dim, "evaluations": q.evaluations}
        extra["refinement_delta"] = q.refinement_delta
    else:
        raise ConfigError(f"unknown method {cfg.method!r}")
    ref = _reference(a)
    dev = None if ref is None else abs(value - ref)
    return EvalResult(value, cfg.method, params, g, ref, dev, extra)


def cmd_convergence(cfg: RunConfig) -> list:
    """Rows ``(index, re, im, abs_error)`` in ascending index."""
    a = load_input(cfg)
    k = a.shape[0]
    m = a - identity(k)
    ref = _reference(a)
    if cfg.method == "series":
        rows = [(o.degree, o.partial_sum) for o in series.eval_series_R(m, cfg.order).orders]
    elif cfg.method == "relaxed":
        rows = [(o.degree, o.partial_sum) for o in series.eval_series_S(m, cfg.order).orders]
        ref = series.eval_S_closed(m)
    elif cfg.method == "tracelog":
        order = 60 if cfg.order is None else cfg.order
        rows = [(o.degree, o.partial_sum) for o in series.eval_tracelog(m, order).orders]
    elif cfg.method == "contour":
        rows = []
        n = 1
        while n <= cfg.nodes:
            rows.append((n, contour.eval_contour(a, n, cfg.budget).value))
            n *= 2
    else:
        raise ConfigError(f"method {cfg.method!r} has no convergence table")
    if ref is None:
        raise ConfigError("no reference value available (k too large or singular)")
    return [(i, v.real, v.imag, abs(v - ref)) for i, v in rows]


def cmd_charpoly(cfg: RunConfig) -> dict:
    if cfg.lam is None:
        raise ConfigError("--lambda is required")
    a = load_input(cfg)
    k = a.shape[0]
    m = a - identity(k)
    value, ser = series.charpoly_inverse_series(m, cfg.lam, cfg.order)
    ref = 1 / lu_det(m - cfg.lam * identity(k))
    return {
        "lambda": cfg.lam,
        "value": value,
        "reference": ref,
        "deviation": abs(value - ref),
        "degree_offset": ser.degree_offset,
        "truncation": ser.truncation,
        "coefficients": ser.coefficients,
    }


def cmd_verify(cfg: RunConfig) -> dict:
    return verify.run_suite(cfg.seed, cfg.samples)


def cmd_bench(cfg: RunConfig) -> dict:
    a = load_input(cfg)
    timings = {}
    for method in METHODS:
        sub = RunConfig("eval", method=method, order=cfg.order, nodes=cfg.nodes,
                        budget=cfg.budget)
        sub.gen, sub.matrix_path = cfg.gen, cfg.matrix_path
        t0 = time.perf_counter()
        try:
            res = cmd_eval(sub)
        except (contour.GateViolation, contour.CostGuard) as exc:
            timings[method] = {"error": type(exc).__name__}
            continue
        timings[method] = {"seconds": time.perf_counter() - t0, "deviation": res.deviation}
    return {"k": a.shape[0], "gate": gate(a).to_dict(), "methods": timings}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="invdet", description="Representations of 1/det(A) near the identity.")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, matrix=True):
        if matrix:
            src = sp.add_mutually_exclusive_group()
            src.add_argument("--matrix", help="matrix JSON file {k, re, im}")
            src.add_argument("--gen", help="seed=<u64>,k=<int>,frac=<float>")
            sp.add_argument("--method", choices=METHODS, default="series")
            sp.add_argument("--order", type=int, help="series truncation degree")
            sp.add_argument("--nodes", type=int, default=32, help="quadrature nodes per dimension")
            sp.add_argument("--budget", type=int, default=contour.DEFAULT_BUDGET,
                            help="maximum number of quadrature evaluations")
            sp.add_argument("--force", action="store_true",
                            help="accept generator fractions above 1")
        sp.add_argument("--out", help="write output here instead of stdout")
        sp.add_argument("--format", choices=("json", "csv"), default="json")

    for name in ("eval", "convergence", "bench"):
        common(sub.add_parser(name))
    cp = sub.add_parser("charpoly")
    common(cp)
    cp.add_argument("--lambda", dest="lam", required=True, help="<re>[,<im>]")
    vp = sub.add_parser("verify")
    common(vp, matrix=False)
    vp.add_argument("--seed", type=int, default=0)
    vp.add_argument("--samples", type=int, default=20)
    return p


def config_from_args(ns) -> RunConfig:
    cfg = RunConfig(ns.command, out=ns.out, fmt=ns.format)
    if ns.command == "verify":
        cfg.seed, cfg.samples = ns.seed, ns.samples
        if cfg.samples < 1:
            raise ConfigError("--samples must be positive")
        return cfg
    cfg.force = ns.force
    cfg.matrix_path = ns.matrix
    cfg.gen = parse_gen(ns.gen, ns.force) if ns.gen else None
    cfg.method, cfg.order, cfg.nodes, cfg.budget = ns.method, ns.order, ns.nodes, ns.budget
    if cfg.order is not None and cfg.order < 0:
        raise ConfigError("--order must be non-negative")
    if cfg.nodes < 1:
        raise ConfigError("--nodes must be positive")
    if cfg.budget < 1:
        raise ConfigError("--budget must be positive")
    if ns.command == "charpoly":
        cfg.lam = parse_lambda(ns.lam)
    return cfg


def _render(obj, fmt) -> str:
    if fmt == "csv":
        if isinstance(obj, list):
            return table_csv(obj)
        if isinstance(obj, EvalResult):
            return table_csv([(obj.value.real, obj.value.imag,
                               np.nan if obj.deviation is None else obj.deviation)],
                             header=("re", "im", "deviation"))
        raise ConfigError("csv output is only available for eval and convergence")
    if isinstance(obj, list):
        obj = {"rows": [dict(zip(("index", "re", "im", "abs_error"), r)) for r in obj]}
    elif isinstance(obj, EvalResult):
        obj = obj.to_dict()
    return dumps(obj)


def _fail(code, exc) -> int:
    sys.stderr.write(dumps({"error": type(exc).__name__, "message": str(exc), "exit_code": code}))
    return code


COMMANDS = {
    "eval": cmd_eval,
    "convergence": cmd_convergence,
    "charpoly": cmd_charpoly,
    "verify": cmd_verify,
    "bench": cmd_bench,
}


def main(argv=None) -> int:
    ns = build_parser().parse_args(argv)
    try:
        cfg = config_from_args(ns)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", series.GateWarning)
            result = COMMANDS[cfg.command](cfg)
        text = _render(result, cfg.fmt)
    except (ConfigError, matcore.MatrixError) as exc:
        return _fail(EXIT_CONFIG, exc)
    except (contour.GateViolation, contour.NearPole, contour.CostGuard,
            series.DomainViolation, series.RowSumPole, ZeroDivisionError) as exc:
        return _fail(EXIT_PRECONDITION, exc)
    if cfg.out:
        Path(cfg.out).write_text(text)
    else:
        sys.stdout.write(text)
    if cfg.command == "verify" and not result["passed"]:
        return EXIT_VERIFY
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
