"""Command-line front end.

Exit codes: 0 success (or Sat), 1 ExhaustedUnsat / failed check,
2 usage error, 3 input error, 4 size guard or variable cap tripped.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path
from typing import Optional, Sequence

from .casesplit import Status, case_split, substitute
from .core import (
    DEFAULT_GUARD,
    MIN_GUARD,
    Add,
    Atom,
    Const,
    Domain,
    Side,
    SizeGuardExceeded,
    System,
    Var,
    eq,
)
from .encoders import WitnessLiftFailure, compile_system, lift_witness
from .skolem import SKOLEM_DOMAIN, NotSkolemShaped, from_system, propagate, skolemize
from .solver import (
    DEFAULT_BOUND,
    DEFAULT_CAP,
    DomainViolation,
    MissingVariable,
    Outcome,
    VariableCapExceeded,
    solve_bounded,
    verify,
)
from .textio import (
    ParseError,
    parse_assignment,
    parse_system,
    print_assignment,
    print_atom,
    print_system,
)

EXIT_OK, EXIT_UNSAT, EXIT_USAGE, EXIT_INPUT, EXIT_GUARD = 0, 1, 2, 3, 4
MAX_SPLIT_VARS = 8


class InputError(Exception):
    pass


class UsageError(Exception):
    pass


def _read(path: str) -> str:
    try:
        if path == "-":
            return sys.stdin.read()
        return Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from None


def _load(path: str) -> System:
    return parse_system(_read(path))


def _emit(args, text: str):
    if args.output:
        Path(args.output).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _err(msg: str):
    print(f"ntilde: {msg}", file=sys.stderr)


def _skolem_input(path: str):
    s = _load(path)
    try:
        return from_system(s)
    except NotSkolemShaped as exc:
        raise InputError(f"{path}: {exc} (run 'skolem' first)") from None


# ---------------------------------------------------------------------------
# Subcommands
# ---------------------------------------------------------------------------


def cmd_parse(args) -> int:
    _emit(args, print_system(_load(args.input)))
    return EXIT_OK


def cmd_skolem(args) -> int:
    s = _load(args.input)
    if s.side is not Side.N or s.domain != SKOLEM_DOMAIN:
        raise InputError("skolem expects a system over N>1")
    sk = skolemize(s)
    notes = [f"original {v} -> {sk.back_map[v]}" for v in sk.originals]
    _emit(args, print_system(sk.to_system(), notes))
    return EXIT_OK


def cmd_compile(args) -> int:
    sk = _skolem_input(args.input)
    compiled, plan = compile_system(sk)
    if args.plan:
        Path(args.plan).write_text(plan.format(), encoding="utf-8")
        text = print_system(compiled)
    else:
        text = print_system(compiled) + "".join(f"# plan: {st}\n" for st in plan.steps)
    _emit(args, text)
    return EXIT_OK


def cmd_casesplit(args) -> int:
    s = _load(args.input)
    if s.domain != Domain.naturals():
        raise InputError("casesplit expects a system over N")
    if len(s.variables()) > MAX_SPLIT_VARS:
        raise UsageError(f"{len(s.variables())} variables; casesplit handles at most {MAX_SPLIT_VARS}")
    cases = case_split(s, args.k)
    chunks = []
    for i, case in enumerate(cases):
        notes = [f"case {i}: {case.describe()}", f"status: {case.status.value}"]
        residual = case.residual
        if case.status is Status.FALSE:
            # keep the file's meaning: an unsatisfiable ground atom
            residual = System(residual.side, (eq(Const(0), Const(1)),), residual.domain)
        chunks.append(print_system(residual, notes))
    if args.outdir:
        out = Path(args.outdir)
        out.mkdir(parents=True, exist_ok=True)
        width = len(str(len(cases) - 1))
        for i, text in enumerate(chunks):
            (out / f"case_{i:0{width}d}.txt").write_text(text, encoding="utf-8")
        print(f"wrote {len(cases)} case files to {out}", file=sys.stderr)
    else:
        _emit(args, "\n".join(chunks))
    return EXIT_OK


def cmd_solve(args) -> int:
    s = _load(args.input)
    if args.bound < s.domain.lo:
        raise UsageError(f"--bound must be at least {s.domain.lo} for domain {s.domain}")
    rep = solve_bounded(s, args.bound, args.cap, args.guard, workers=args.workers)
    _emit(args, rep.format())
    if rep.outcome is Outcome.GUARD:
        return EXIT_GUARD
    return EXIT_OK if rep.sat else EXIT_UNSAT


def cmd_verify(args) -> int:
    s = _load(args.input)
    a = parse_assignment(_read(args.witness))
    rep = verify(s, a, args.guard)
    _emit(args, rep.format())
    for at in rep.failures():
        _err(f"atom fails: {print_atom(at)}")
    return EXIT_OK if rep.ok else EXIT_UNSAT


def cmd_lift(args) -> int:
    sk = _skolem_input(args.input)
    # values for defined Skolem variables may be omitted
    originals = propagate(sk, parse_assignment(_read(args.originals)))
    _, plan = compile_system(sk)
    try:
        lifted = lift_witness(plan, originals, args.guard)
    except WitnessLiftFailure as exc:
        _err(f"lift failed: {exc}")
        return EXIT_UNSAT
    _emit(args, print_assignment(lifted))
    return EXIT_OK


def shift_to_n1(residual: System, k: int) -> System:
    """Rewrite a system over N>k (k >= 1) as one over N>1 via x -> x + (k-1)."""
    shift = {v: Add(Var(v), Const(k - 1)) for v in residual.variables()}
    atoms = [Atom(at.rel, substitute(at.lhs, shift), substitute(at.rhs, shift))
             for at in residual.atoms]
    return System(Side.N, tuple(atoms), SKOLEM_DOMAIN)


def cmd_pipeline(args) -> int:
    s = _load(args.input)
    if s.domain != Domain.naturals():
        raise InputError("pipeline expects a system over N")
    if args.k < 1:
        raise UsageError("pipeline needs --k >= 1 (Skolem form lives over N>1)")
    if len(s.variables()) > MAX_SPLIT_VARS:
        raise UsageError(f"{len(s.variables())} variables; casesplit handles at most {MAX_SPLIT_VARS}")
    if args.bound < args.k + 1:
        raise UsageError("--bound must exceed --k")
    rows = []
    agree = True
    solvable = False
    for i, case in enumerate(case_split(s, args.k)):
        if case.status is Status.TRUE:
            rows.append((i, case.describe(), "TriviallyTrue", "n/a"))
            solvable = True
            continue
        if case.status is Status.FALSE:
            rows.append((i, case.describe(), "TriviallyFalse", "n/a"))
            continue
        rep = solve_bounded(case.residual, args.bound, args.cap, args.guard)
        if rep.outcome is Outcome.GUARD:
            rows.append((i, case.describe(), "GuardTripped", "n/a"))
            continue
        if not rep.sat:
            rows.append((i, case.describe(), "ExhaustedUnsat", "not checked beyond interface decision"))
            continue
        solvable = True
        shifted = shift_to_n1(case.residual, args.k)
        sk = skolemize(shifted)
        compiled, plan = compile_system(sk)
        originals = {v: val - (args.k - 1) for v, val in rep.assignment.items()}
        found = " ".join(f"{v}={val}" for v, val in rep.assignment.items())
        try:
            lifted = lift_witness(plan, sk.extend(originals), args.guard)
            ok = verify(compiled, lifted, args.guard).ok
        except (WitnessLiftFailure, ValueError) as exc:
            ok = False
            _err(f"case {i}: {exc}")
        agree &= ok
        status = f"verified {len(compiled.atoms)} atoms" if ok else "FAILED"
        rows.append((i, case.describe(), f"Sat {found}", status))
    widths = [4, max(12, *(len(r[1]) for r in rows)), max(14, *(len(r[2]) for r in rows))]
    header = ("case", "substitution", "original", "lift/verify")
    lines = [f"{header[0]:<{widths[0]}}  {header[1]:<{widths[1]}}  {header[2]:<{widths[2]}}  {header[3]}"]
    for r in rows:
        lines.append(f"{r[0]:<{widths[0]}}  {r[1]:<{widths[1]}}  {r[2]:<{widths[2]}}  {r[3]}")
    lines.append(f"solvable within bound {args.bound}: {'yes' if solvable else 'no'}")
    lines.append(f"agreement: {'yes' if agree else 'NO'}")
    _emit(args, "\n".join(lines) + "\n")
    return EXIT_OK if agree else EXIT_UNSAT


# ---------------------------------------------------------------------------
# Argument handling
# ---------------------------------------------------------------------------


def _positive(lo: int):
    def conv(text: str) -> int:
        v = int(text)
        if v < lo:
            raise argparse.ArgumentTypeError(f"must be at least {lo}")
        return v
    return conv


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("input", help="input file ('-' for stdin)")
    common.add_argument("-o", "--output", help="write results here instead of stdout")
    common.add_argument("--guard", type=_positive(MIN_GUARD), default=DEFAULT_GUARD,
                        help="size guard in bits (default %(default)s)")
    common.add_argument("--cap", type=_positive(0), default=DEFAULT_CAP,
                        help="variable cap for enumeration (default %(default)s)")

    p = argparse.ArgumentParser(prog="ntilde", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("parse", parents=[common], help="echo canonical form")
    sp.set_defaults(func=cmd_parse)
    sp = sub.add_parser("skolem", parents=[common], help="N>1 system to Skolem form")
    sp.set_defaults(func=cmd_skolem)
    sp = sub.add_parser("compile", parents=[common], help="Skolem system to tilde system")
    sp.add_argument("--plan", help="write the witness plan to this file")
    sp.set_defaults(func=cmd_compile)
    sp = sub.add_parser("casesplit", parents=[common], help="N system to N>k cases")
    sp.add_argument("--k", type=_positive(0), required=True)
    sp.add_argument("--outdir", help="write one file per case into this directory")
    sp.set_defaults(func=cmd_casesplit)
    sp = sub.add_parser("solve", parents=[common], help="bounded brute-force solve")
    sp.add_argument("--bound", type=_positive(0), default=DEFAULT_BOUND)
    sp.add_argument("--workers", type=_positive(1), default=1)
    sp.set_defaults(func=cmd_solve)
    sp = sub.add_parser("verify", parents=[common], help="check a witness")
    sp.add_argument("--witness", required=True)
    sp.set_defaults(func=cmd_verify)
    sp = sub.add_parser("lift", parents=[common], help="lift a Skolem solution to the compiled system")
    sp.add_argument("--originals", required=True)
    sp.set_defaults(func=cmd_lift)
    sp = sub.add_parser("pipeline", parents=[common], help="case-split, compile, solve and cross-check")
    sp.add_argument("--k", type=_positive(0), default=1)
    sp.add_argument("--bound", type=_positive(0), default=DEFAULT_BOUND)
    sp.set_defaults(func=cmd_pipeline)
    return p


def run(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    try:
        return args.func(args)
    except UsageError as exc:
        _err(str(exc))
        return EXIT_USAGE
    except (SizeGuardExceeded, VariableCapExceeded) as exc:
        _err(str(exc))
        return EXIT_GUARD
    except (InputError, ParseError, NotSkolemShaped, DomainViolation) as exc:
        _err(str(exc))
        return EXIT_INPUT
    except MissingVariable as exc:
        _err(f"witness has no value for {exc.args[0]}")
        return EXIT_INPUT


def main():
    sys.exit(run())
