"""Command-line entry point: ``mfix {solve,verify,classify,pbvs}``.

Exit codes: 0 success, 2 configuration/parse error, 3 validation failure,
4 no convergence, 5 a verified hypothesis was violated.
"""
from __future__ import annotations

import argparse
import logging
import os
import sys

from . import __version__
from .applications import solve_pbvs, verify_lower_upper, pbvs_system
from .config import bound_points, build_pbvs, build_phi, build_solve_config, build_system, load_config, start_points
from .core import MonotoneSignature
from .errors import ConfigError, NumericalError, StructuralError, ValidationError
from .report import Report
from .sigma import build_mixed_operator
from .solver import SolveConfig, solve
from .verify import count_reducible, classify_reducibility, verify_contraction, verify_coupled_bounds

EXIT_OK = 0
EXIT_PARSE = 2
EXIT_VALIDATION = 3
EXIT_NO_CONVERGENCE = 4
EXIT_VIOLATION = 5

LOG_LEVELS = {"quiet": logging.WARNING, "info": logging.INFO, "trace": logging.DEBUG}

log = logging.getLogger("mfix")


def _setup_logging() -> None:
    level = LOG_LEVELS.get(os.environ.get("MFIX_LOG", "info").lower(), logging.INFO)
    root = logging.getLogger("mfix")
    root.handlers.clear()
    handler = logging.StreamHandler(sys.stderr)
    handler.setFormatter(logging.Formatter("mfix: %(message)s"))
    root.addHandler(handler)
    root.setLevel(level)
    root.propagate = False


def _emit(report: Report, out: str | None) -> None:
    text = report.render()
    if out:
        with open(out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _solution_rows(point):
    return [(j, k, float(v)) for j, comp in enumerate(point) for k, v in enumerate(comp)]


def cmd_solve(args) -> int:
    cfg = load_config(args.config)
    system = build_system(cfg)
    solve_cfg = build_solve_config(cfg, tolerance=args.tol, max_iterations=args.max_iter)
    u0, v0 = start_points(cfg, system)
    A = build_mixed_operator(system, seed=args.seed or 0)
    result = solve(system, u0, v0, solve_cfg, operator=A)

    report = Report("solve")
    report.set("system", system.name)
    report.set("signature", str(system.signature))
    report.set("status", result.status)
    report.set("converged", result.converged)
    report.set("iterations", result.iterations)
    report.set("residual", result.residual)
    report.set("gap", result.gap)
    report.set("defect", result.defect)
    report.set("bracket_valid", result.bracket_valid)
    report.set("a_priori_iterations", result.a_priori_iterations)
    report.set("tolerance", solve_cfg.tolerance)
    report.table("solution", ["component", "entry", "value"], _solution_rows(result.solution))
    report.table("history", ["iteration", "residual", "gap", "bracket_valid"], result.history)
    _emit(report, args.out)
    log.info("%s: %s after %d iterations, residual %.3e", system.name, result.status,
             result.iterations, result.residual)
    return EXIT_OK if result.converged else EXIT_NO_CONVERGENCE


def cmd_verify(args) -> int:
    cfg = load_config(args.config)
    system = build_system(cfg)
    phi = build_phi(cfg)
    if phi is None:
        raise ConfigError("missing section", "phi")
    v = cfg.verify or {"samples": 1000, "seed": 0}
    samples = args.samples if args.samples is not None else v["samples"]
    seed = args.seed if args.seed is not None else v["seed"]
    contraction = verify_contraction(system, phi, samples, seed)

    report = Report("verify")
    report.set("system", system.name)
    report.set("signature", str(system.signature))
    report.set("phi", contraction.phi)
    report.set("samples", contraction.samples)
    report.set("seed", contraction.seed)
    report.set("certified", contraction.certified)
    report.set("violations", len(contraction.violations))
    report.set("max_ratio", contraction.max_ratio)
    report.set("caveat", contraction.caveat)
    ok = contraction.certified
    bounds = bound_points(cfg, system)
    if bounds is not None:
        verdict = verify_coupled_bounds(system, *bounds)
        report.set("bounds_hold", verdict.holds)
        report.set("bounds_first_failure",
                   None if verdict.first_failure is None else f"{verdict.first_failure[0]}:{verdict.first_failure[1]}")
        ok = ok and verdict.holds
    report.table("violations", ["operator", "sample", "lhs", "rhs"],
                 [(w.operator, w.sample, w.lhs, w.rhs) for w in contraction.violations])
    _emit(report, args.out)
    log.info("%s: contraction %s on %d samples (%d violations)", system.name,
             "certified" if contraction.certified else "violated", samples, len(contraction.violations))
    return EXIT_OK if ok else EXIT_VIOLATION


def cmd_classify(args) -> int:
    if args.count is not None:
        total, reducible = count_reducible(args.count)
        sys.stdout.write(f"{total} {reducible}\n")
        return EXIT_OK
    if not args.signature:
        raise ConfigError("give a signature such as '++-/-++/---' or --count N", "signature")
    try:
        sig = MonotoneSignature.from_strings(args.signature.replace(",", "/").split("/"))
    except StructuralError as exc:
        raise ConfigError(str(exc), "signature") from None
    verdict = classify_reducibility(sig)
    if verdict.reducible:
        witness = "".join("+" if e > 0 else "-" for e in verdict.witness)
        sys.stdout.write(f"reducible {witness}\n")
    else:
        sys.stdout.write("not reducible\n")
    return EXIT_OK


def cmd_pbvs(args) -> int:
    cfg = load_config(args.config)
    problem, bounds = build_pbvs(cfg)
    solve_cfg = build_solve_config(cfg, tolerance=args.tol, max_iterations=args.max_iter, phi=problem.phi)
    report = Report("pbvs")
    report.set("f", problem.name)
    report.set("lambda", problem.lam)
    report.set("period", problem.period)
    report.set("grid_size", problem.grid_size)
    report.set("phi", problem.phi.describe() if problem.phi else None)
    if bounds is not None:
        lu = verify_lower_upper(problem, bounds)
        report.set("bounds_hold", lu.holds)
        if not lu.holds:
            _emit(report, args.out)
            kind, node = lu.first_violation
            log.error("coupled lower/upper solution fails for %s at node %d", kind, node)
            return EXIT_VALIDATION
    if problem.box is not None and problem.phi is not None:
        v = cfg.verify or {"samples": 200, "seed": 0}
        samples = args.samples if args.samples is not None else v["samples"]
        seed = args.seed if args.seed is not None else v["seed"]
        contraction = verify_contraction(pbvs_system(problem), problem.phi, samples, seed)
        report.set("contraction_certified", contraction.certified)
        report.set("contraction_samples", samples)
    sol = solve_pbvs(problem, bounds, solve_cfg)
    report.set("status", sol.result.status)
    report.set("converged", sol.result.converged)
    report.set("iterations", sol.result.iterations)
    report.set("residual", sol.result.residual)
    report.set("defect", sol.defect)
    report.set("periodicity", sol.periodicity)
    report.table("solution", ["t", "x", "y", "z"], zip(sol.t, sol.x, sol.y, sol.z))
    _emit(report, args.out)
    log.info("pbvs %s: %s after %d iterations, defect %.3e", problem.name, sol.result.status,
             sol.result.iterations, sol.defect)
    return EXIT_OK if sol.result.converged else EXIT_NO_CONVERGENCE


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="mfix", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"mfix {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, sampling=True):
        p.add_argument("--config", required=True, help="problem definition (TOML)")
        p.add_argument("--out", help="write the report here instead of stdout")
        p.add_argument("--tol", type=float, help="override solve.tolerance")
        p.add_argument("--max-iter", type=int, dest="max_iter", help="override solve.max_iterations")
        if sampling:
            p.add_argument("--seed", type=int, help="override verify.seed")
            p.add_argument("--samples", type=int, help="override verify.samples")

    common(sub.add_parser("solve", help="run the coupled iteration"))
    common(sub.add_parser("verify", help="sampled contraction and bounds checks"))
    common(sub.add_parser("pbvs", help="solve a periodic boundary value system"))
    p = sub.add_parser("classify", help="reducibility of a signature, or counts over all signatures")
    p.add_argument("signature", nargs="?", help="rows separated by '/', e.g. '++-/-++/---'")
    p.add_argument("--count", type=int, help="count reducible signatures of this order")
    return parser


COMMANDS = {"solve": cmd_solve, "verify": cmd_verify, "classify": cmd_classify, "pbvs": cmd_pbvs}


def main(argv=None) -> int:
    _setup_logging()
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_PARSE if exc.code else EXIT_OK
    try:
        if getattr(args, "tol", None) is not None or getattr(args, "max_iter", None) is not None:
            SolveConfig(tolerance=args.tol if args.tol is not None else 1.0,
                        max_iterations=args.max_iter if args.max_iter is not None else 1)
        return COMMANDS[args.command](args)
    except (ConfigError, StructuralError) as exc:
        log.error("configuration error: %s", exc)
        return EXIT_PARSE
    except (ValidationError, NumericalError) as exc:
        log.error("validation failed: %s", exc)
        return EXIT_VALIDATION


if __name__ == "__main__":
    sys.exit(main())
