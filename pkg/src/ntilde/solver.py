"""Desk-scale ground truth: bounded enumeration, verification, and the
plan-driven decision procedure for gadget relations."""

from __future__ import annotations

import enum
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

from .core import (
    DEFAULT_GUARD,
    Add,
    Assignment,
    Atom,
    Const,
    E,
    Mul,
    One,
    Rel,
    SizeGuardExceeded,
    System,
    Term,
    Var,
    check_atom,
    eval_term,
)
from .encoders import EncodedRelation, first_failing_atom, run_plan
from .textio import ParseError, parse_assignment, print_assignment, print_atom

DEFAULT_BOUND = 10
DEFAULT_CAP = 6


class VariableCapExceeded(ValueError):
    pass


class DomainViolation(ValueError):
    pass


class MissingVariable(KeyError):
    pass


class NotEncoderShaped(ValueError):
    pass


class Outcome(enum.Enum):
    SAT = "Sat"
    UNSAT = "ExhaustedUnsat"
    GUARD = "GuardTripped"


@dataclass(frozen=True)
class SolveReport:
    outcome: Outcome
    bound: int
    lo: int
    tried: int
    assignment: Optional[Assignment] = None
    elapsed: float = field(default=0.0, compare=False)

    @property
    def sat(self) -> bool:
        return self.outcome is Outcome.SAT

    def format(self) -> str:
        lines = f"outcome: {self.outcome.value}\nbound: {self.bound}\ntried: {self.tried}\n"
        return lines + print_assignment(self.assignment or {})


def parse_report(text: str) -> SolveReport:
    head: Dict[str, str] = {}
    body = []
    for line in text.splitlines():
        key, sep, val = line.partition(":")
        if sep and key.strip() in ("outcome", "bound", "tried"):
            head[key.strip()] = val.strip()
        else:
            body.append(line)
    try:
        outcome = Outcome(head["outcome"])
        bound, tried = int(head["bound"]), int(head["tried"])
    except (KeyError, ValueError) as exc:
        raise ParseError(f"malformed solve report: {exc}") from None
    a = parse_assignment("\n".join(body))
    return SolveReport(outcome, bound, -1, tried, a if outcome is Outcome.SAT else None)


# ---------------------------------------------------------------------------
# Bounded enumeration
# ---------------------------------------------------------------------------


def _closure(t: Term, index: Mapping[str, int], guard: int):
    match t:
        case Var(name):
            i = index[name]
            return lambda env: env[i]
        case Const(c):
            return lambda env: c
        case One():
            return lambda env: 1
        case Add(l, r):
            f, g = _closure(l, index, guard), _closure(r, index, guard)
            return lambda env: f(env) + g(env)
        case Mul(l, r):
            f, g = _closure(l, index, guard), _closure(r, index, guard)

            def mul(env):
                x, y = f(env), g(env)
                if x.bit_length() + y.bit_length() > guard + 1:
                    raise SizeGuardExceeded(x.bit_length() + y.bit_length() - 1, guard)
                return x * y
            return mul
        case E(b, e):
            f, g = _closure(b, index, guard), _closure(e, index, guard)

            def power(env):
                x, y = f(env), g(env)
                if x and x.bit_length() + y > guard:
                    raise SizeGuardExceeded(x.bit_length() + y, guard)
                return x << y
            return power
    raise TypeError(f"not a term: {t!r}")


def _atom_check(at: Atom, index, guard):
    f, g = _closure(at.lhs, index, guard), _closure(at.rhs, index, guard)
    if at.rel is Rel.EQ:
        return lambda env: f(env) == g(env)
    return lambda env: f(env) <= g(env)


def _search(system: System, order: List[str], lo: int, bound: int,
            fixed: Mapping[str, int], guard: int, first: Sequence[int]):
    """Depth-first enumeration in lexicographic order over ``order``.

    Each atom is checked as soon as its last variable is placed; a rejected
    prefix counts every completion it stands for, so ``tried`` equals what a
    flat enumeration would have examined.
    """
    index = {v: i for i, v in enumerate(order)}
    for i, v in enumerate(fixed):
        index[v] = len(order) + i
    n = len(order)
    by_depth: List[List] = [[] for _ in range(n + 1)]
    for at in system.atoms:
        depth = max((index[v] + 1 for v in at.variables() if v not in fixed), default=0)
        by_depth[depth].append(_atom_check(at, index, guard))
    width = bound - lo + 1
    env = [0] * n + list(fixed.values())
    tried = 0

    def ok(d):
        return all(c(env) for c in by_depth[d])

    if not ok(0):
        return None, len(first) * width ** max(n - 1, 0) if n else 1
    if n == 0:
        return {}, 1

    def go(d) -> bool:
        nonlocal tried
        values = first if d == 0 else range(lo, bound + 1)
        for val in values:
            env[d] = val
            if not ok(d + 1):
                tried += width ** (n - d - 1)
                continue
            if d + 1 == n:
                tried += 1
                return True
            if go(d + 1):
                return True
        return False

    if go(0):
        return {v: env[i] for i, v in enumerate(order)}, tried
    return None, tried


def _search_chunk(args):
    try:
        return _search(*args)
    except SizeGuardExceeded:
        return "guard", 0


def solve_bounded(s: System, bound: int = DEFAULT_BOUND, cap: int = DEFAULT_CAP,
                  guard: int = DEFAULT_GUARD, fixed: Optional[Mapping[str, int]] = None,
                  workers: int = 1) -> SolveReport:
    """First satisfying assignment in ``{lo..bound}^n``, lexicographically.

    ``fixed`` pins some variables to given values (they are not enumerated).
    With ``workers > 1`` the first variable's range is split across processes;
    the lowest chunk holding a witness wins, so the report does not depend on
    scheduling.
    """
    fixed = dict(fixed or {})
    lo = s.domain.lo
    if bound < lo:
        raise ValueError(f"bound {bound} is below the domain's least value {lo}")
    order = [v for v in s.variables() if v not in fixed]
    if len(order) > cap:
        raise VariableCapExceeded(f"{len(order)} variables exceed the cap of {cap}")
    start = time.perf_counter()
    values = list(range(lo, bound + 1))
    if workers > 1 and order:
        k = -(-len(values) // workers)
        chunks = [values[i:i + k] for i in range(0, len(values), k)]
        jobs = [(s, order, lo, bound, fixed, guard, c) for c in chunks]
        with ProcessPoolExecutor(workers) as pool:
            results = list(pool.map(_search_chunk, jobs))
    else:
        results = [_search_chunk((s, order, lo, bound, fixed, guard, values))]
    tried = 0
    for found, count in results:
        if found == "guard":
            return SolveReport(Outcome.GUARD, bound, lo, tried, None,
                               time.perf_counter() - start)
        tried += count
        if found is not None:
            return SolveReport(Outcome.SAT, bound, lo, tried, {**found, **fixed},
                               time.perf_counter() - start)
    return SolveReport(Outcome.UNSAT, bound, lo, tried, None, time.perf_counter() - start)


# ---------------------------------------------------------------------------
# Verification
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class VerifyReport:
    results: Tuple[Tuple[Atom, bool], ...]

    @property
    def ok(self) -> bool:
        return all(r for _, r in self.results)

    def failures(self) -> List[Atom]:
        return [at for at, r in self.results if not r]

    def format(self) -> str:
        return "".join(f"{'ok  ' if r else 'FAIL'} {print_atom(at)}\n"
                       for at, r in self.results)


def verify(s: System, a: Mapping[str, int], guard: int = DEFAULT_GUARD) -> VerifyReport:
    for v in s.variables():
        if v not in a:
            raise MissingVariable(v)
        if a[v] not in s.domain:
            raise DomainViolation(f"{v} = {a[v]} is outside {s.domain}")
    return VerifyReport(tuple((at, check_atom(at, a, guard)) for at in s.atoms))


# ---------------------------------------------------------------------------
# Gadget relations and the Mersenne oracle
# ---------------------------------------------------------------------------


def decide_compiled(r: EncodedRelation, interface_values, guard: int = DEFAULT_GUARD
                    ) -> Optional[Assignment]:
    """Decide a gadget relation at given interface values by closed forms.

    ``interface_values`` lines up with ``r.interface``; positions holding a
    plain variable bind it, compound positions are checked once bound.  A
    mapping of variable values is also accepted.  Returns the full satisfying
    assignment, or None.
    """
    if r.plan is None:
        raise NotEncoderShaped("relation carries no witness plan")
    if isinstance(interface_values, Mapping):
        values = dict(interface_values)
        compound: List[Tuple[Term, int]] = []
    else:
        if len(interface_values) != len(r.interface):
            raise ValueError(f"expected {len(r.interface)} interface values")
        values = {}
        compound = []
        for t, val in zip(r.interface, interface_values):
            if val < 1:
                raise DomainViolation("interface values live in N>0")
            if isinstance(t, Var):
                if values.setdefault(t.name, val) != val:
                    return None
            else:
                compound.append((t, val))
    for t, val in compound:
        if eval_term(t, values, guard) != val:
            return None
    values, bad = run_plan(r.plan, values, guard)
    if bad is not None:
        return None
    if first_failing_atom(r.atoms, values, guard) is not None:
        return None
    return values


def divides_mersenne(m: int, n: int) -> bool:
    """Whether ``2**m - 1`` divides ``2**n - 1``, by modular powering only."""
    if m < 1 or n < 1:
        raise ValueError("m and n must be positive")
    mod = (1 << m) - 1
    return (pow(2, n, mod) - 1) % mod == 0
