"""Command-line entry point: ``groverian <subcommand> ...``.

Exit status is 0 on success, 1 on invalid input and 2 when an optimizer did
not converge (the result is still printed, flagged ``converged=false``).
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass
from typing import Sequence, TextIO

import numpy as np

from . import stateio
from .circuits import fig2_optimal_success, track_groverian, write_track_csv
from .grover import Oracle, grover_run, predicted_success, uniform_state
from .mixed_measure import MixedMeasureConfig, groverian_mixed, ppt_check, werner_state
from .pure_measure import PureMeasureConfig, p_max_pure
from .purify import purify
from .qstate import DensityMatrix, PureState, StateError, density_of

EXIT_OK = 0
EXIT_INVALID = 1
EXIT_NOT_CONVERGED = 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: error: {message}\n{self.format_usage()}")


@dataclass(frozen=True)
class RunConfig:
    seed: int = 0
    restarts: int | None = None
    tol: float | None = None
    terms: int | None = None
    output_format: str = "text"
    threads: int = 1


def _fmt(value) -> str:
    if isinstance(value, bool):
        return str(value).lower()
    if isinstance(value, float):
        return f"{value:.12g}"
    if isinstance(value, (list, tuple)):
        return "[" + ", ".join(_fmt(v) for v in value) + "]"
    return str(value)


def _emit(fields: dict, config: RunConfig, out: TextIO) -> None:
    if config.output_format == "json":
        out.write(json.dumps(fields) + "\n")
    else:
        for key, value in fields.items():
            out.write(f"{key}={_fmt(value)}\n")


def _load_pure(path) -> PureState:
    state = stateio.load_state(path)
    if not isinstance(state, PureState):
        raise StateError(f"{path}: expected kind 'pure', got 'density'")
    return state


def _load_density(path) -> DensityMatrix:
    state = stateio.load_state(path)
    return density_of(state) if isinstance(state, PureState) else state


def _parse_marked(text: str) -> list[int]:
    try:
        return [int(tok) for tok in text.split(",") if tok.strip()]
    except ValueError as exc:
        raise StateError(f"--marked: expected a comma-separated list of integers, got {text!r}") from exc


def _mixed_config(config: RunConfig) -> MixedMeasureConfig:
    kwargs = {"seed": config.seed, "threads": config.threads, "terms": config.terms}
    if config.restarts is not None:
        kwargs["restarts"] = config.restarts
    if config.tol is not None:
        kwargs["tol"] = config.tol
    return MixedMeasureConfig(**kwargs)


def _pure_config(config: RunConfig) -> PureMeasureConfig:
    kwargs = {"seed": config.seed, "threads": config.threads}
    if config.restarts is not None:
        kwargs["restarts"] = config.restarts
    if config.tol is not None:
        kwargs["tol"] = config.tol
    return PureMeasureConfig(**kwargs)


def cmd_grover_run(args, config, out) -> int:
    marked = _parse_marked(args.marked)
    oracle = Oracle(args.n, frozenset(marked))
    initial = _load_pure(args.initial) if args.initial else uniform_state(args.n)
    if initial.num_qubits != args.n:
        raise StateError(f"--initial has {initial.num_qubits} qubits but --n is {args.n}")
    run = grover_run(initial, oracle, args.iterations)
    _emit(
        {
            "iterations": run.iterations,
            "success_probability": run.success_probability,
            "predicted_success": predicted_success(initial),
        },
        config,
        out,
    )
    return EXIT_OK


def _converged_exit(converged: bool) -> int:
    return EXIT_OK if converged else EXIT_NOT_CONVERGED


def cmd_measure_pure(args, config, out) -> int:
    psi = _load_pure(args.state)
    result = p_max_pure(psi, _pure_config(config))
    _emit(
        {
            "p_max": result.p_max,
            "G": result.g,
            "converged": result.converged,
            "restarts": result.restarts_used,
            "residual": result.residual,
            "angles": result.best_params.angles.tolist(),
        },
        config,
        out,
    )
    return _converged_exit(result.converged)


def cmd_measure_mixed(args, config, out) -> int:
    rho = _load_density(args.state)
    if rho.num_qubits > 4:
        raise StateError(f"{args.state}: mixed measure supports at most 4 qubits")
    result = groverian_mixed(rho, _mixed_config(config))
    ens = result.best_params
    _emit(
        {
            "p_max": result.p_max,
            "G": result.g,
            "converged": result.converged,
            "restarts": result.restarts_used,
            "residual": result.residual,
            "terms": ens.num_terms,
            "weights": ens.weights.tolist(),
            "angles": ens.angles.tolist(),
        },
        config,
        out,
    )
    return _converged_exit(result.converged)


def cmd_purify(args, config, out) -> int:
    rho = _load_density(args.state)
    if rho.num_qubits > 5:
        raise StateError(f"{args.state}: purification supports at most 5 qubits")
    state = purify(rho).state
    if args.out:
        stateio.save_state(state, args.out)
        _emit({"num_qubits": state.num_qubits, "out": args.out}, config, out)
    else:
        out.write(stateio.dumps_state(state) + "\n")
    return EXIT_OK


def cmd_verify_fig2(args, config, out) -> int:
    rho = _load_density(args.state)
    report = fig2_optimal_success(rho, _mixed_config(config))
    _emit(
        {
            "overlap": report.value,
            "success": report.measured,
            "gap": report.gap,
            "tolerance": report.tolerance,
            "confirmed": report.confirmed,
            "G": report.groverian,
            "one_minus_G2": 1 - report.groverian**2,
        },
        config,
        out,
    )
    return EXIT_OK


def cmd_track(args, config, out) -> int:
    records = track_groverian(args.n, args.marked, max_iter=args.max_iter, config=_pure_config(config))
    write_track_csv(records, args.out)
    _emit(
        {
            "rows": len(records),
            "out": args.out,
            "max_G": max(r.groverian for r in records),
        },
        config,
        out,
    )
    return EXIT_OK


def cmd_werner(args, config, out) -> int:
    rho = werner_state(args.p)
    if args.out:
        stateio.save_state(rho, args.out)
    else:
        out.write(stateio.dumps_state(rho) + "\n")
    return EXIT_OK


def cmd_ppt(args, config, out) -> int:
    rho = _load_density(args.state)
    if rho.num_qubits != 2:
        raise StateError(f"{args.state}: the PPT test needs a two-qubit state")
    separable, lowest = ppt_check(rho)
    _emit({"ppt": separable, "min_eigenvalue": lowest}, config, out)
    return EXIT_OK


def _add_globals(parser: argparse.ArgumentParser, suppress: bool) -> None:
    default = (lambda v: argparse.SUPPRESS) if suppress else (lambda v: v)
    parser.add_argument("--seed", type=int, default=default(0), help="PCG64 seed (default 0)")
    parser.add_argument(
        "--threads", type=int, default=default(os.cpu_count() or 1), help="worker threads for restarts"
    )
    parser.add_argument("--json", action="store_true", default=default(False), help="JSON output")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="groverian", description="Groverian entanglement measure toolkit")
    _add_globals(parser, suppress=False)
    sub = parser.add_subparsers(dest="command", parser_class=_Parser, required=True)

    def leaf(subparsers, name, func, help_text):
        p = subparsers.add_parser(name, help=help_text)
        _add_globals(p, suppress=True)
        p.set_defaults(func=func)
        return p

    grover = sub.add_parser("grover", help="Grover search simulation")
    grover_sub = grover.add_subparsers(dest="action", parser_class=_Parser, required=True)
    p = leaf(grover_sub, "run", cmd_grover_run, "run Grover search")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--marked", required=True, help="comma-separated marked indices")
    p.add_argument("--iterations", type=int, default=None)
    p.add_argument("--initial", default=None, help="pure state file (default: uniform)")

    measure = sub.add_parser("measure", help="Groverian measure")
    measure_sub = measure.add_subparsers(dest="action", parser_class=_Parser, required=True)
    p = leaf(measure_sub, "pure", cmd_measure_pure, "measure of a pure state")
    p.add_argument("--state", required=True)
    p.add_argument("--restarts", type=int, default=None)
    p.add_argument("--tol", type=float, default=None)
    p = leaf(measure_sub, "mixed", cmd_measure_mixed, "measure of a density matrix")
    p.add_argument("--state", required=True)
    p.add_argument("--terms", type=int, default=None)
    p.add_argument("--restarts", type=int, default=None)
    p.add_argument("--tol", type=float, default=None)

    p = leaf(sub, "purify", cmd_purify, "purify a density matrix to 2n qubits")
    p.add_argument("--state", required=True)
    p.add_argument("--out", default=None)

    verify = sub.add_parser("verify", help="operational circuit checks")
    verify_sub = verify.add_subparsers(dest="action", parser_class=_Parser, required=True)
    p = leaf(verify_sub, "fig2", cmd_verify_fig2, "simulate the mixed-state circuit")
    p.add_argument("--state", required=True)

    p = leaf(sub, "track", cmd_track, "track G along Grover iterations")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--marked", type=int, required=True)
    p.add_argument("--max-iter", type=int, default=None)
    p.add_argument("--out", required=True)

    p = leaf(sub, "werner", cmd_werner, "emit a two-qubit Werner state file")
    p.add_argument("--p", type=float, required=True)
    p.add_argument("--out", default=None)

    p = leaf(sub, "ppt", cmd_ppt, "Peres-Horodecki test of a two-qubit state")
    p.add_argument("--state", required=True)
    return parser


def dispatch(argv: Sequence[str] | None = None, out: TextIO | None = None, err: TextIO | None = None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    try:
        args = build_parser().parse_args(argv)
    except UsageError as exc:
        err.write(str(exc))
        return EXIT_INVALID
    config = RunConfig(
        seed=args.seed,
        restarts=getattr(args, "restarts", None),
        tol=getattr(args, "tol", None),
        terms=getattr(args, "terms", None),
        output_format="json" if args.json else "text",
        threads=max(1, args.threads),
    )
    try:
        code = args.func(args, config, out)
    except (StateError, OSError) as exc:
        err.write(f"groverian: error: {exc}\n")
        return EXIT_INVALID
    if code == EXIT_NOT_CONVERGED:
        err.write("groverian: warning: optimizer did not converge\n")
    return code


def main() -> None:
    np.seterr(all="ignore")
    sys.exit(dispatch())
