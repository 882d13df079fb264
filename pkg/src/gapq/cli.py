"""Command-line front end.

Reports are JSON on stdout (or ``--out``); one-line summaries go to stderr.

Exit codes: 0 success (``decide``: reject), 1 validation or crosscheck
failure, 2 I/O or parse error, 3 ``decide`` accepted, 4 enumeration budget
exceeded.
"""
from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass
from pathlib import Path

from .compiler import compile_gap, verify_compilation
from .counting import BudgetExceeded, PredicateSpec, crosscheck, default_budget, gap
from .extnum import CONSISTENCY_RTOL, validate_presentation
from .program import (NonUnitaryLayer, ProgramError, StateSpaceTooLarge, check_unitarity,
                      format_program, load_program)
from .simulator import decide_from, run, trace_report

EXIT_OK = 0
EXIT_INVALID = 1
EXIT_IO = 2
EXIT_ACCEPT = 3
EXIT_BUDGET = 4


@dataclass
class RunConfig:
    command: str
    inputs: list[str]
    tolerance: float = CONSISTENCY_RTOL
    budget: int = 10 ** 7
    out: str | None = None
    quiet: bool = False
    mode: str = "both"

    def __post_init__(self):
        if self.tolerance <= 0:
            raise ValueError("tolerance must be positive")
        if self.budget < 1:
            raise ValueError("budget must be at least 1")


class _Failure(Exception):
    def __init__(self, code: int, message: str, report: dict | None = None):
        super().__init__(message)
        self.code = code
        self.report = report


def _emit(cfg: RunConfig, payload: dict | str) -> None:
    text = payload if isinstance(payload, str) else json.dumps(payload, indent=2, sort_keys=True) + "\n"
    if cfg.out:
        Path(cfg.out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _say(cfg: RunConfig, message: str) -> None:
    if not cfg.quiet:
        print(message, file=sys.stderr)


def _load(path: str, check: bool = True):
    try:
        return load_program(path, check=check)
    except (StateSpaceTooLarge, NonUnitaryLayer) as exc:
        raise _Failure(EXIT_INVALID, f"refused: {exc}") from None
    except OSError as exc:
        raise _Failure(EXIT_IO, f"cannot read {path}: {exc}") from None
    except ProgramError as exc:
        raise _Failure(EXIT_IO, f"parse error in {path}: {exc}") from None


def _load_predicate(path: str) -> PredicateSpec:
    try:
        return PredicateSpec.loads(Path(path).read_text(encoding="utf-8"))
    except OSError as exc:
        raise _Failure(EXIT_IO, f"cannot read {path}: {exc}") from None
    except (ValueError, KeyError, TypeError) as exc:
        raise _Failure(EXIT_IO, f"bad predicate file {path}: {exc}") from None


def cmd_validate(cfg: RunConfig) -> int:
    try:
        prog = load_program(cfg.inputs[0], check=False)
    except StateSpaceTooLarge as exc:
        raise _Failure(EXIT_INVALID, f"refused: {exc}") from None
    except OSError as exc:
        raise _Failure(EXIT_IO, f"cannot read {cfg.inputs[0]}: {exc}") from None
    except ProgramError as exc:
        raise _Failure(EXIT_IO, f"parse error in {cfg.inputs[0]}: {exc}") from None
    pres = validate_presentation(prog.field, rtol=cfg.tolerance)
    layers = [check_unitarity(layer, prog.field, prog.register) for layer in prog.layers]
    ok = pres.ok and all(r.ok for r in layers)
    report = {"ok": ok, "presentation": pres.to_json(),
              "layers": [dict(r.to_json(), layer=i) for i, r in enumerate(layers)]}
    _emit(cfg, report)
    problems = pres.violations + [f"layer {i}: {r.detail}" for i, r in enumerate(layers) if not r.ok]
    _say(cfg, "valid" if ok else "invalid: " + "; ".join(problems))
    return EXIT_OK if ok else EXIT_INVALID


def cmd_simulate(cfg: RunConfig) -> int:
    prog = _load(cfg.inputs[0])
    exact, numeric, trace = run(prog, mode=cfg.mode)
    report = trace_report(prog, exact, numeric, trace)
    _emit(cfg, report)
    _say(cfg, f"simulated T={prog.T}, {report['steps'][-1]['live_states']} live states"
              + (f", {len(trace.warnings)} warnings" if trace.warnings else ""))
    return EXIT_OK if not trace.warnings else EXIT_INVALID


def cmd_decide(cfg: RunConfig) -> int:
    prog = _load(cfg.inputs[0])
    exact, _, _ = run(prog, mode="exact")
    dec = decide_from(prog, exact)
    _emit(cfg, {"decision": dec.label, "g": str(dec.g), "evidence": dec.evidence})
    _say(cfg, f"{dec.label} (g = {dec.g})")
    return EXIT_ACCEPT if dec.accept else EXIT_OK


def cmd_compile_gap(cfg: RunConfig) -> int:
    r = _load_predicate(cfg.inputs[0])
    try:
        prog = compile_gap(r)
    except ValueError as exc:
        raise _Failure(EXIT_INVALID, str(exc)) from None
    _emit(cfg, format_program(prog))
    _say(cfg, f"compiled p={r.p} predicate into {prog.T} layers (gap {gap(r)})")
    return EXIT_OK


def cmd_gap(cfg: RunConfig) -> int:
    r = _load_predicate(cfg.inputs[0])
    _emit(cfg, f"{gap(r)}\n")
    return EXIT_OK


def cmd_verify_compilation(cfg: RunConfig) -> int:
    r = _load_predicate(cfg.inputs[0])
    rep = verify_compilation(r)
    _emit(cfg, rep.to_json())
    _say(cfg, "identity holds" if rep.ok else "; ".join(rep.problems))
    return EXIT_OK if rep.ok else EXIT_INVALID


def cmd_crosscheck(cfg: RunConfig) -> int:
    prog = _load(cfg.inputs[0])
    try:
        rep = crosscheck(prog, budget=cfg.budget)
    except BudgetExceeded as exc:
        raise _Failure(EXIT_BUDGET, str(exc)) from None
    _emit(cfg, rep.to_json())
    _say(cfg, f"{rep.compared} coefficients compared, max discrepancy {rep.max_discrepancy}, "
              f"consistency error {rep.consistency_max_err:.3g}"
              + ("" if rep.presentation_ok else ", presentation invalid"))
    return EXIT_OK if rep.ok else EXIT_INVALID


COMMANDS = {
    "validate": (cmd_validate, "program", "parse, check presentation consistency and unitarity"),
    "simulate": (cmd_simulate, "program", "run exactly and/or numerically, write a trace report"),
    "decide": (cmd_decide, "program", "exact acceptance decision (exit 0 reject, 3 accept)"),
    "compile-gap": (cmd_compile_gap, "predicate", "compile a predicate file into a program"),
    "gap": (cmd_gap, "predicate", "print ones minus zeros of a predicate"),
    "verify-compilation": (cmd_verify_compilation, "predicate",
                           "check the compiled amplitude identity exactly"),
    "crosscheck": (cmd_crosscheck, "program", "compare path sums against the simulator"),
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="gapq", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name, (_, arg, help_text) in COMMANDS.items():
        p = sub.add_parser(name, help=help_text)
        p.add_argument(arg, help=f"path to the {arg} file")
        p.add_argument("--out", help="write the report here instead of stdout")
        p.add_argument("--quiet", action="store_true", help="no summary on stderr")
        p.add_argument("--tolerance", type=float, default=CONSISTENCY_RTOL,
                       help="relative presentation-consistency tolerance")
        p.add_argument("--budget", type=int, default=None,
                       help="path-enumeration visit budget (default $GAPQ_BUDGET or 10^7)")
        if name == "simulate":
            p.add_argument("--mode", choices=["exact", "numeric", "both"], default="both")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = RunConfig(
            command=args.command,
            inputs=[getattr(args, COMMANDS[args.command][1])],
            tolerance=args.tolerance,
            budget=default_budget() if args.budget is None else args.budget,
            out=args.out,
            quiet=args.quiet,
            mode=getattr(args, "mode", "both"),
        )
    except ValueError as exc:
        print(f"gapq: {exc}", file=sys.stderr)
        return EXIT_IO
    try:
        return COMMANDS[cfg.command][0](cfg)
    except _Failure as exc:
        if not cfg.quiet:
            print(f"gapq: {exc}", file=sys.stderr)
        return exc.code


if __name__ == "__main__":
    sys.exit(main())
