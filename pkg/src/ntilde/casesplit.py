"""Reducing solvability over N to solvability over N>k.

Every variable either takes one of the small values ``0..k`` or stays free
over N>k.  The original system is solvable iff some substituted residual is.
"""

from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass
from typing import Dict, List, Mapping, Optional, Tuple, Union

from .core import (
    DEFAULT_GUARD,
    Add,
    Atom,
    Const,
    Domain,
    Mul,
    Rel,
    Side,
    System,
    Term,
    Var,
)
from .solver import DEFAULT_CAP, solve_bounded


class Status(enum.Enum):
    OPEN = "Open"
    TRUE = "TriviallyTrue"
    FALSE = "TriviallyFalse"


@dataclass(frozen=True)
class SplitCase:
    substitution: Dict[str, int]
    residual: System
    status: Status

    def describe(self) -> str:
        if not self.substitution:
            return "-"
        return ", ".join(f"{v}={c}" for v, c in self.substitution.items())


def substitute(t: Term, sub: Mapping[str, Union[int, Term]]) -> Term:
    """Replace variables by constants (ints) or terms."""
    match t:
        case Var(name) if name in sub:
            val = sub[name]
            return Const(val) if isinstance(val, int) else val
        case Add(l, r):
            return Add(substitute(l, sub), substitute(r, sub))
        case Mul(l, r):
            return Mul(substitute(l, sub), substitute(r, sub))
        case _:
            return t


def fold(t: Term) -> Term:
    """Purely algebraic constant folding: ``0*t``, ``t+0``, const op const."""
    match t:
        case Add(l, r):
            l, r = fold(l), fold(r)
            match l, r:
                case Const(a), Const(b):
                    return Const(a + b)
                case Const(0), _:
                    return r
                case _, Const(0):
                    return l
            return Add(l, r)
        case Mul(l, r):
            l, r = fold(l), fold(r)
            match l, r:
                case Const(a), Const(b):
                    return Const(a * b)
                case (Const(0), _) | (_, Const(0)):
                    return Const(0)
            return Mul(l, r)
        case _:
            return t


def fold_atoms(atoms, k: int) -> Tuple[System, Status]:
    kept: List[Atom] = []
    for at in atoms:
        lhs, rhs = fold(at.lhs), fold(at.rhs)
        if isinstance(lhs, Const) and isinstance(rhs, Const):
            if lhs.value != rhs.value:
                return System(Side.N, (), Domain(k)), Status.FALSE
            continue
        kept.append(Atom(Rel.EQ, lhs, rhs))
    residual = System(Side.N, tuple(kept), Domain(k))
    return residual, (Status.OPEN if kept else Status.TRUE)


def case_split(s: System, k: int) -> List[SplitCase]:
    """All ``(k+2)**n`` cases: per variable, one of ``0..k`` or left free.

    Cases are ordered as ``itertools.product`` over the variables in order of
    first occurrence, each ranging over ``0, 1, ..., k, free``.
    """
    if s.side is not Side.N or s.domain != Domain.naturals():
        raise ValueError("case_split expects a polynomial system over N")
    if k < 0:
        raise ValueError("k must be a natural number")
    names = s.variables()
    options: List[Optional[int]] = [*range(k + 1), None]
    cases = []
    for combo in itertools.product(options, repeat=len(names)):
        sub = {v: c for v, c in zip(names, combo) if c is not None}
        atoms = [Atom(at.rel, substitute(at.lhs, sub), substitute(at.rhs, sub))
                 for at in s.atoms]
        residual, status = fold_atoms(atoms, k)
        cases.append(SplitCase(sub, residual, status))
    return cases


def split_equivalence_check(s: System, k: int, bound: int, cap: int = DEFAULT_CAP,
                            guard: int = DEFAULT_GUARD) -> bool:
    """Bounded form of the reduction's correctness at one ``(k, bound)``.

    Compares solvability of ``s`` over ``{0..bound}`` with "some case is
    trivially true or has a residual solution in ``{k+1..bound}``".  Both
    sides respect the same bound, since substituted values are at most k.
    """
    if bound < k + 1:
        raise ValueError("bound must exceed k")
    left = solve_bounded(s, bound, cap, guard).sat
    right = False
    for case in case_split(s, k):
        if case.status is Status.TRUE:
            right = True
        elif case.status is Status.OPEN:
            right = solve_bounded(case.residual, bound, cap, guard).sat
        if right:
            break
    return left == right
