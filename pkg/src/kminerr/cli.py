"""Experiment runner: solve one problem with several methods, write CSV traces and a JSON summary.

    kminerr run --problem random:20,10 --method minerr --method gmres --out runs/a
    kminerr diagnose --problem tomography:16,12,24 --block-size 20 --symmetric
"""
import argparse
import json
import logging
import os
import sys
from dataclasses import dataclass, field

import numpy as np

from . import mmio
from .accel import gk_solve
from .gmres import gmres_solve
from .minerr import heuristic_best, minerr_solve
from .operator import ASSEMBLY_LIMIT, assemble, cg_bound, matrix_free_C, spectral_report
from .oracle import explicit_krylov, range_solution
from .problems import ProblemSpec
from .sweep import cycle, iterate_fixed_point
from .system import build_projectors, partition_uniform, symmetric_expand

log = logging.getLogger("kminerr")

METHODS = ("kaczmarz", "gk", "minerr", "gmres")

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_IO = 3
EXIT_SIZE = 4


class ConfigError(ValueError):
    pass


class SizeGateError(RuntimeError):
    pass


@dataclass
class RunConfig:
    problem: ProblemSpec = None
    matrix: str = None
    rhs: str = None
    methods: list = field(default_factory=lambda: ["minerr"])
    block_size: int = 1
    symmetric: bool = False
    max_iter: int = 200
    tol: float = 1e-10
    seed: int = None
    out: str = "kminerr-out"
    allow_large_assembly: bool = False
    timing: bool = False

    def validate(self):
        if self.tol <= 0:
            raise ConfigError("--tol must be positive")
        if self.max_iter < 1:
            raise ConfigError("--max-iter must be at least 1")
        if self.block_size < 1:
            raise ConfigError("--block-size must be at least 1")
        bad = [m for m in self.methods if m not in METHODS]
        if bad:
            raise ConfigError(f"unknown method {bad[0]!r}; choose from {', '.join(METHODS)}")
        if not self.methods:
            raise ConfigError("at least one --method is required")
        if (self.problem is None) == (self.matrix is None):
            raise ConfigError("give exactly one of --problem or --matrix")
        if self.matrix is not None and self.rhs is None:
            raise ConfigError("--matrix needs --rhs")


def parse_problem(text, seed=None):
    """``kind:d1,d2[,d3]`` shorthand, a JSON document, or a path to one."""
    try:
        if os.path.isfile(text):
            with open(text) as f:
                spec = ProblemSpec.from_json(f.read())
        elif text.lstrip().startswith("{"):
            spec = ProblemSpec.from_json(text)
        else:
            kind, _, dims = text.partition(":")
            spec = ProblemSpec(kind.strip(), tuple(int(d) for d in dims.split(",") if d.strip()),
                               0)
    except (ValueError, KeyError, TypeError) as exc:
        raise ConfigError(f"invalid --problem {text!r}: {exc}") from None
    if seed is not None:
        spec = ProblemSpec(spec.kind, spec.dims, seed, spec.noise)
    return spec


def load_problem(cfg):
    """``(A, b, x_ref, description)`` where ``x_ref`` is the solution in ``R(A^T)``."""
    if cfg.problem is not None:
        spec = cfg.problem
        A, b, x_star = spec.generate()
        exact = spec.kind == "rank_deficient" or (spec.kind == "random" and A.shape[0] >= A.shape[1])
        x_ref = x_star if exact else range_solution(A, b)
        return A, b, x_ref, json.loads(spec.to_json())
    A = mmio.load_matrix_market(cfg.matrix)
    b = mmio.load_vector(cfg.rhs, expected_len=A.shape[0])
    return A, b, range_solution(A, b), {"kind": "file", "matrix": cfg.matrix, "rhs": cfg.rhs}


def build(cfg, A, b):
    sys_ = partition_uniform(A, b, cfg.block_size)
    if cfg.symmetric:
        sys_ = symmetric_expand(sys_)
    return build_projectors(sys_)


def diagnostics(projs, A, x_ref, cfg, op=None):
    n = projs.n
    if op is None:
        if n > ASSEMBLY_LIMIT and not cfg.allow_large_assembly:
            raise SizeGateError(f"n = {n} exceeds the dense assembly limit {ASSEMBLY_LIMIT}; "
                                "pass --allow-large-assembly")
        op = assemble(projs, allow_large=cfg.allow_large_assembly)
    rep = spectral_report(op, A)
    out = {"t2_norm": rep.t2_norm, "quasi_opt_factor": rep.quasi_opt_factor,
           "c2_symmetric": rep.c2_symmetric, "c2_asymmetry": rep.c2_asymmetry}
    if rep.c2_symmetric and np.isfinite(rep.kappa):
        out["kappa"] = rep.kappa
    x0 = np.zeros(n)
    r0 = op.g - op.C @ x0
    if np.linalg.norm(r0) > 0:
        kry = explicit_krylov(lambda v: op.C @ v, r0, n, mode="arnoldi")
        out["degree_d"] = kry.degree_d
    else:
        out["degree_d"] = 0
    if "kappa" in out:
        e0 = float(np.linalg.norm(x_ref - x0))
        out["cg_bound"] = [float(v) for v in cg_bound(out["kappa"], np.arange(cfg.max_iter + 1),
                                                      e0)]
    return out


def run_method(name, projs, cfg, x_ref):
    n = projs.n
    x0 = np.zeros(n)
    info = {}
    if name == "kaczmarz":
        x, trace = iterate_fixed_point(projs, x0, cfg.max_iter, cfg.tol, x_star=x_ref)
    elif name == "gk":
        x, trace = gk_solve(projs, x0, cfg.max_iter, cfg.tol, x_star=x_ref)
    elif name == "minerr":
        x, trace, basis = minerr_solve(projs, x0, cfg.max_iter, cfg.tol, x_star=x_ref)
        if basis.k:
            x_opt, k_opt = heuristic_best(trace, basis, x0)
            info["k_opt"] = k_opt
            info["heuristic_error"] = float(np.linalg.norm(x_opt - x_ref))
    else:
        g = cycle(projs, np.zeros(n)).y
        x, trace = gmres_solve(matrix_free_C(projs), g, x0, cfg.max_iter, cfg.tol,
                               projectors=projs, x_star=x_ref)
    info = {"status": trace.status, "iters": len(trace) - 1,
            "final_error": float(np.linalg.norm(x - x_ref)), **info}
    return trace, info


def run(cfg):
    """Solve, write ``trace_<method>.csv`` and ``summary.json`` into ``cfg.out``."""
    cfg.validate()
    A, b, x_ref, desc = load_problem(cfg)
    projs = build(cfg, A, b)
    os.makedirs(cfg.out, exist_ok=True)
    summary = {"problem": desc, "methods": {}}
    for name in cfg.methods:
        trace, info = run_method(name, projs, cfg, x_ref)
        with open(os.path.join(cfg.out, f"trace_{name}.csv"), "w") as f:
            f.write(trace.to_csv(timing=cfg.timing))
        summary["methods"][name] = info
        log.info("%s: %s after %d iterations, error %.3e", name, info["status"],
                 info["iters"], info["final_error"])
    if projs.n <= ASSEMBLY_LIMIT or cfg.allow_large_assembly:
        diag = diagnostics(projs, A, x_ref, cfg)
        for key in ("t2_norm", "quasi_opt_factor", "kappa", "degree_d"):
            if key in diag:
                summary[key] = diag[key]
        if "cg_bound" in diag:
            with open(os.path.join(cfg.out, "cg_bound.csv"), "w") as f:
                f.write("k,bound\n")
                for k, v in enumerate(diag["cg_bound"]):
                    f.write(f"{k},{v!r}\n")
    with open(os.path.join(cfg.out, "summary.json"), "w") as f:
        json.dump(summary, f, indent=2, sort_keys=True)
        f.write("\n")
    return summary


def diagnose(cfg):
    cfg.validate()
    A, b, x_ref, desc = load_problem(cfg)
    projs = build(cfg, A, b)
    out = {"problem": desc, **diagnostics(projs, A, x_ref, cfg)}
    os.makedirs(cfg.out, exist_ok=True)
    with open(os.path.join(cfg.out, "diagnose.json"), "w") as f:
        json.dump(out, f, indent=2, sort_keys=True)
        f.write("\n")
    return out


def _parser():
    p = argparse.ArgumentParser(prog="kminerr", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)
    for name, help_ in (("run", "solve and write traces"),
                        ("diagnose", "operator diagnostics only")):
        s = sub.add_parser(name, help=help_)
        s.add_argument("--problem", help="kind:d1,d2[,d3] or ProblemSpec JSON (inline or file)")
        s.add_argument("--matrix", help="Matrix Market file with A")
        s.add_argument("--rhs", help="text file with b, one value per line")
        s.add_argument("--method", action="append", dest="methods",
                       help=f"one of {', '.join(METHODS)}; repeatable")
        s.add_argument("--block-size", type=int, default=1)
        s.add_argument("--symmetric", action="store_true", help="palindromic block sweep")
        s.add_argument("--max-iter", type=int, default=200)
        s.add_argument("--tol", type=float, default=1e-10)
        s.add_argument("--seed", type=int, default=None)
        s.add_argument("--out", default="kminerr-out")
        s.add_argument("--allow-large-assembly", action="store_true")
        s.add_argument("--timing", action="store_true",
                       help="write wall-clock times (traces are then not reproducible)")
    return p


def config_from_args(args):
    problem = parse_problem(args.problem, args.seed) if args.problem else None
    return RunConfig(problem=problem, matrix=args.matrix, rhs=args.rhs,
                     methods=args.methods or ["minerr"], block_size=args.block_size,
                     symmetric=args.symmetric, max_iter=args.max_iter, tol=args.tol,
                     seed=args.seed, out=args.out,
                     allow_large_assembly=args.allow_large_assembly, timing=args.timing)


def main(argv=None):
    logging.basicConfig(level=logging.INFO, format="%(message)s")
    args = _parser().parse_args(argv)
    try:
        cfg = config_from_args(args)
        result = run(cfg) if args.command == "run" else diagnose(cfg)
    except ConfigError as exc:
        print(f"kminerr: configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except SizeGateError as exc:
        print(f"kminerr: {exc}", file=sys.stderr)
        return EXIT_SIZE
    except (OSError, mmio.MatrixMarketError) as exc:
        print(f"kminerr: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    if args.command == "diagnose":
        print(json.dumps({k: v for k, v in result.items() if k != "cg_bound"}, indent=2,
                         sort_keys=True))
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
