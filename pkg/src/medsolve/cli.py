"""Command-line interface.

Subcommands: solve, certify, enumerate, audit, generate, reproduce-fig1.
Structured results are written as JSON (and residual traces as CSV) under
--out; stdout carries one deterministic status line per input, stderr the
diagnostics.  Exit codes: 0 certified optimal / success, 2 stationary but
not global, 3 not stationary or solver failure, 64 usage or malformed
input, 65 invalid data.  The MED_LOG environment variable (debug|info)
raises stderr verbosity and never touches stdout.
"""

from __future__ import annotations

import argparse
import logging
import os
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .bloch3 import geometric_audit
from .cases import reference_five_state_gram
from .certify import TOL_GLB, TOL_STAT, certify_povm
from .enumerate3 import classify_landscape
from .exceptions import MedError, SchemaError
from .gram import (
    Ensemble,
    GramMatrix,
    ensemble_from_gram,
    gram_from_ensemble,
    random_ensemble,
)
from .homotopy import RunReport, Trajectory, drag_between, rk4_drag
from .measurement import FRAME_AMBIENT, FRAME_DUAL, povm_from_unitary
from .serialize import (
    audit_to_dict,
    certificate_to_dict,
    ensemble_to_dict,
    landscape_to_dict,
    load_gram_or_ensemble,
    povm_from_dict,
    povm_to_dict,
    read_json,
    run_report_to_dict,
    write_json,
    write_trace_csv,
)

EXIT_OK = 0
EXIT_STATIONARY = 2
EXIT_FAILED = 3
EXIT_USAGE = 64
EXIT_DATA = 65

log = logging.getLogger("medsolve")


class _CliFailure(Exception):
    def __init__(self, code: int, message: str):
        super().__init__(message)
        self.code = code


class _Parser(argparse.ArgumentParser):
    """argparse exits with 2 on bad usage by default, which collides with
    the stationary-not-global result code; route it to 64 instead."""

    def error(self, message):
        raise _CliFailure(EXIT_USAGE, f"{self.prog}: {message}")


def _configure_logging() -> None:
    level = {"debug": logging.DEBUG, "info": logging.INFO}.get(
        os.environ.get("MED_LOG", "").lower(), logging.WARNING
    )
    logging.basicConfig(stream=sys.stderr, level=level, format="%(levelname)s %(message)s")


def _load_problem(path: Path) -> GramMatrix | Ensemble:
    """Read a Gram-or-ensemble JSON file, mapping failures to exit codes."""
    try:
        data = read_json(path)
        return load_gram_or_ensemble(data, context=str(path))
    except SchemaError as exc:
        raise _CliFailure(EXIT_USAGE, str(exc)) from exc
    except (MedError, ValueError) as exc:
        raise _CliFailure(EXIT_DATA, f"{path}: {exc}") from exc


def _as_gram(problem: GramMatrix | Ensemble) -> GramMatrix:
    if isinstance(problem, GramMatrix):
        return problem
    return gram_from_ensemble(problem).raw


def _out_dir(args) -> Path:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _check_solver_args(args) -> None:
    if abs(args.steps * args.h - 1.0) > 1e-9:
        raise _CliFailure(
            EXIT_USAGE,
            f"--steps and --h must cover the unit interval: {args.steps} * {args.h} != 1",
        )


def _solve_one(problem: GramMatrix | Ensemble, args, g_via: GramMatrix | None) -> RunReport:
    gram = _as_gram(problem)
    try:
        if g_via is None:
            report = rk4_drag(
                Trajectory(GramMatrix(np.eye(gram.m) / gram.m), gram),
                steps=args.steps, h=args.h,
                polish=args.polish, polish_every=args.polish_every,
                tol_stat=args.tol_stat, tol_glb=args.tol_glb,
            )
        else:
            leg = rk4_drag(
                Trajectory(GramMatrix(np.eye(g_via.m) / g_via.m), g_via),
                steps=args.steps, h=args.h,
                polish=args.polish, polish_every=args.polish_every,
                tol_stat=args.tol_stat, tol_glb=args.tol_glb,
            )
            report = drag_between(
                g_via, leg.final_state, gram,
                steps=args.steps, h=args.h,
                polish=args.polish, polish_every=args.polish_every,
                tol_stat=args.tol_stat, tol_glb=args.tol_glb,
            )
    except MedError as exc:
        raise _CliFailure(EXIT_FAILED, f"solver failed: {exc}") from exc
    return report


def _report_payload(report: RunReport, problem: GramMatrix | Ensemble) -> dict:
    payload = run_report_to_dict(report)
    if isinstance(problem, Ensemble):
        # re-express the measurement in the ensemble's own space
        state = report.final_state
        gram = _as_gram(problem)
        u = gram.inv_sqrt() @ np.linalg.solve(np.diag(state.a), state.matrix)
        payload["final_povm"] = povm_to_dict(povm_from_unitary(gram, u, ensemble=problem))
    return payload


def _write_solve_outputs(report: RunReport, problem, out: Path, stem: str) -> Path:
    report_path = out / f"{stem}-report.json"
    write_json(report_path, _report_payload(report, problem))
    write_trace_csv(out / f"{stem}-trace.csv", report.trace)
    return report_path


def cmd_solve(args) -> int:
    _check_solver_args(args)
    out = _out_dir(args)
    g_via = _load_problem(Path(getattr(args, "from"))) if getattr(args, "from") else None
    if g_via is not None:
        g_via = _as_gram(g_via)

    inputs: list[Path]
    if args.batch:
        inputs = sorted(Path(args.batch).glob("*.json"))
        if not inputs:
            raise _CliFailure(EXIT_USAGE, f"no .json inputs in {args.batch}")
    elif args.input:
        inputs = [Path(args.input)]
    else:
        raise _CliFailure(EXIT_USAGE, "solve needs an input file or --batch")

    worst = EXIT_OK
    for path in inputs:
        try:
            problem = _load_problem(path)
            report = _solve_one(problem, args, g_via)
        except _CliFailure as exc:
            if not args.batch:
                raise
            log.error("%s: %s", path, exc)
            print(f"{path.stem}: failed ({exc.code})")
            worst = max(worst, exc.code)
            continue
        report_path = _write_solve_outputs(report, problem, out, path.stem)
        cert = report.certificate
        print(
            f"{path.stem}: {cert.status} p_success={cert.p_success:.12f} -> {report_path}"
        )
        worst = max(worst, cert.exit_code)
    return worst


def _load_certify_input(path: Path):
    try:
        data = read_json(path)
        if "ensemble" not in data or "povm" not in data:
            raise SchemaError(f"{path}: need fields 'ensemble' and 'povm'")
        problem = load_gram_or_ensemble(data["ensemble"], context=f"{path}:ensemble")
        povm = povm_from_dict(data["povm"], context=f"{path}:povm")
    except SchemaError as exc:
        raise _CliFailure(EXIT_USAGE, str(exc)) from exc
    except (MedError, ValueError) as exc:
        raise _CliFailure(EXIT_DATA, f"{path}: {exc}") from exc
    if isinstance(problem, Ensemble):
        if povm.frame != FRAME_AMBIENT:
            raise _CliFailure(
                EXIT_USAGE,
                f"{path}: an ensemble input needs a measurement in the "
                f"'{FRAME_AMBIENT}' frame, got '{povm.frame}'",
            )
        return problem, povm
    if povm.frame != FRAME_DUAL:
        raise _CliFailure(
            EXIT_USAGE,
            f"{path}: a gram-matrix input needs a measurement in the "
            f"'{FRAME_DUAL}' frame, got '{povm.frame}'",
        )
    return ensemble_from_gram(problem), povm


def cmd_certify(args) -> int:
    ensemble, povm = _load_certify_input(Path(args.input))
    try:
        cert = certify_povm(ensemble, povm, tol_stat=args.tol_stat, tol_glb=args.tol_glb)
    except MedError as exc:
        raise _CliFailure(EXIT_FAILED, f"certification failed: {exc}") from exc
    out = _out_dir(args)
    cert_path = out / f"{Path(args.input).stem}-certificate.json"
    write_json(cert_path, certificate_to_dict(cert))
    print(f"{Path(args.input).stem}: {cert.status} p_success={cert.p_success:.12f} -> {cert_path}")
    return cert.exit_code


def cmd_enumerate(args) -> int:
    problem = _load_problem(Path(args.input))
    gram = _as_gram(problem)
    try:
        summary = classify_landscape(
            gram, seed=args.seed, tol_stat=args.tol_stat, tol_glb=args.tol_glb
        )
    except (MedError, ValueError) as exc:
        raise _CliFailure(EXIT_DATA, f"enumeration failed: {exc}") from exc
    out = _out_dir(args)
    path = out / f"{Path(args.input).stem}-landscape.json"
    write_json(path, landscape_to_dict(summary))
    n_real = sum(1 for r in summary.roots if r.is_real)
    print(f"{Path(args.input).stem}: {len(summary.roots)} roots ({n_real} real) -> {path}")
    return EXIT_OK


def cmd_audit(args) -> int:
    ensemble, povm = _load_certify_input(Path(args.input))
    try:
        report = geometric_audit(ensemble, povm, raise_on_failure=False)
    except (MedError, ValueError) as exc:
        raise _CliFailure(EXIT_DATA, f"audit failed to run: {exc}") from exc
    out = _out_dir(args)
    path = out / f"{Path(args.input).stem}-audit.json"
    write_json(path, audit_to_dict(report))
    verdict = "passed" if report.passed else "FAILED"
    print(f"{Path(args.input).stem}: audit {verdict} -> {path}")
    return EXIT_OK if report.passed else EXIT_FAILED


def cmd_generate(args) -> int:
    try:
        ensemble = random_ensemble(args.m, args.seed, args.spread, real=args.real)
    except (MedError, ValueError) as exc:
        raise _CliFailure(EXIT_DATA, f"generation failed: {exc}") from exc
    out = _out_dir(args)
    path = out / f"ensemble-m{args.m}-seed{args.seed}.json"
    write_json(path, ensemble_to_dict(ensemble))
    print(f"generated m={args.m} seed={args.seed} spread={args.spread} -> {path}")
    return EXIT_OK


def cmd_reproduce_fig1(args) -> int:
    _check_solver_args(args)
    gram = reference_five_state_gram()
    try:
        report = rk4_drag(
            Trajectory(GramMatrix(np.eye(gram.m) / gram.m), gram),
            steps=args.steps, h=args.h,
            polish=args.polish, polish_every=args.polish_every,
            tol_stat=args.tol_stat, tol_glb=args.tol_glb,
        )
    except MedError as exc:
        raise _CliFailure(EXIT_FAILED, f"solver failed: {exc}") from exc
    out = _out_dir(args)
    report_path = _write_solve_outputs(report, gram, out, "fig1")
    cert = report.certificate
    lg = np.log10(np.maximum(report.trace[:, 2], 1e-320))
    print(
        f"fig1: {cert.status} p_success={cert.p_success:.12f} "
        f"log10_residual[{lg[0]:.2f} .. {lg[-1]:.2f}] -> {report_path}"
    )
    return cert.exit_code


def _add_common(sub: argparse.ArgumentParser, solver: bool = False) -> None:
    sub.add_argument("--out", default=".", help="output directory (default: current)")
    sub.add_argument("--tol-stat", type=float, default=TOL_STAT,
                     help="stationarity tolerance")
    sub.add_argument("--tol-glb", type=float, default=TOL_GLB,
                     help="global-optimality tolerance")
    if solver:
        sub.add_argument("--steps", type=int, default=1000, help="integration steps")
        sub.add_argument("--h", type=float, default=1e-3, help="step size (steps*h must be 1)")
        sub.add_argument("--polish", action="store_true",
                         help="re-project onto the constraint during integration")
        sub.add_argument("--polish-every", type=int, default=10,
                         help="steps between re-projections")


def build_parser() -> _Parser:
    parser = _Parser(prog="medsolve", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"medsolve {__version__}")
    subs = parser.add_subparsers(dest="command", required=True)

    p = subs.add_parser("solve",
                        help="drag the known optimum to a target ensemble")
    p.add_argument("input", nargs="?", help="gram-or-ensemble JSON file")
    p.add_argument("--batch", help="directory of input JSON files")
    p.add_argument("--from", dest="from", default=None, metavar="GRAM.json",
                   help="route the drag through this gram matrix")
    _add_common(p, solver=True)
    p.set_defaults(fn=cmd_solve)

    p = subs.add_parser("certify",
                        help="certify a measurement against an ensemble")
    p.add_argument("input", help="JSON file with fields 'ensemble' and 'povm'")
    _add_common(p)
    p.set_defaults(fn=cmd_certify)

    p = subs.add_parser("enumerate",
                        help="enumerate all stationary measurements (m=3, real)")
    p.add_argument("input", help="gram-or-ensemble JSON file")
    p.add_argument("--seed", type=int, default=8128, help="start-point seed")
    _add_common(p)
    p.set_defaults(fn=cmd_enumerate)

    p = subs.add_parser("audit",
                        help="geometric optimality audit (m=3)")
    p.add_argument("input", help="JSON file with fields 'ensemble' and 'povm'")
    _add_common(p)
    p.set_defaults(fn=cmd_audit)

    p = subs.add_parser("generate",
                        help="write a reproducible random ensemble")
    p.add_argument("--m", type=int, required=True, help="number of states")
    p.add_argument("--seed", type=int, required=True, help="generator seed")
    p.add_argument("--spread", type=float, default=0.6,
                   help="distance from the orthogonal ensemble, in (0, 1]")
    p.add_argument("--real", action="store_true", help="draw a real ensemble")
    _add_common(p)
    p.set_defaults(fn=cmd_generate)

    p = subs.add_parser("reproduce-fig1",
                        help="re-run the five-state reference drag and emit its error trace")
    _add_common(p, solver=True)
    p.set_defaults(fn=cmd_reproduce_fig1)

    return parser


def main(argv: list[str] | None = None) -> int:
    _configure_logging()
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.fn(args)
    except _CliFailure as exc:
        print(str(exc), file=sys.stderr)
        return exc.code
    except SystemExit as exc:  # --help / --version
        return int(exc.code or 0)


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
