"""Abstract syntax and exact evaluation for both equation languages.

Two term languages share one set of node classes:

* polynomial terms over the naturals: ``Const``, ``Var``, ``Add``, ``Mul``
* terms over the positive naturals with ``x * 2**y``: ``One``, ``Var``, ``Add``, ``E``

Values are plain Python ints, so arithmetic is exact at any size.  A bit-length
guard stops runaway ``E`` nesting before it eats the machine.
"""

from __future__ import annotations

import enum
import re
from dataclasses import dataclass, field
from typing import Dict, Iterable, Iterator, List, Mapping, Optional, Tuple, Union

DEFAULT_GUARD = 1_000_000
MIN_GUARD = 64
FRESH_PREFIX = "$"

IDENT_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_]*\Z")
FRESH_RE = re.compile(r"\$([0-9]+)\Z")

Assignment = Dict[str, int]


class SizeGuardExceeded(ArithmeticError):
    def __init__(self, bits: int, guard: int):
        super().__init__(f"intermediate value needs {bits} bits, guard is {guard}")
        self.bits = bits
        self.guard = guard


# ---------------------------------------------------------------------------
# Terms
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Const:
    value: int

    def __post_init__(self):
        if self.value < 0:
            raise ValueError("constants are natural numbers")


@dataclass(frozen=True)
class One:
    pass


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Add:
    left: "Term"
    right: "Term"


@dataclass(frozen=True)
class Mul:
    left: "Term"
    right: "Term"


@dataclass(frozen=True)
class E:
    """``base * 2**exponent``."""

    base: "Term"
    exponent: "Term"


Term = Union[Const, One, Var, Add, Mul, E]


def is_fresh(name: str) -> bool:
    return FRESH_RE.match(name) is not None


def is_valid_name(name: str) -> bool:
    """User identifiers, or generated ``$n`` names.  ``E`` is reserved."""
    if name == "E":
        return False
    return IDENT_RE.match(name) is not None or is_fresh(name)


def term_vars(t: Term) -> Iterator[str]:
    """Variable names in left-to-right order, with repeats."""
    match t:
        case Var(name):
            yield name
        case Add(a, b) | Mul(a, b) | E(a, b):
            yield from term_vars(a)
            yield from term_vars(b)
        case _:
            pass


def unique(names: Iterable[str]) -> List[str]:
    return list(dict.fromkeys(names))


def sum_terms(terms: Iterable[Term]) -> Term:
    """Left-nested sum, matching how the parser associates ``a + b + c``."""
    it = iter(terms)
    acc = next(it)
    for t in it:
        acc = Add(acc, t)
    return acc


def _check_bits(v: int, guard: int) -> int:
    if v.bit_length() > guard:
        raise SizeGuardExceeded(v.bit_length(), guard)
    return v


def eval_term(t: Term, a: Mapping[str, int], guard: int = DEFAULT_GUARD) -> int:
    """Exact value of ``t`` under ``a``.

    Raises ``KeyError`` for an unassigned variable and ``SizeGuardExceeded`` if
    any intermediate value would be wider than ``guard`` bits.
    """
    if guard < MIN_GUARD:
        raise ValueError(f"guard must be at least {MIN_GUARD} bits")
    return _eval(t, a, guard)


def _eval(t: Term, a: Mapping[str, int], guard: int) -> int:
    match t:
        case Var(name):
            return a[name]
        case Add(l, r):
            return _check_bits(_eval(l, a, guard) + _eval(r, a, guard), guard)
        case Mul(l, r):
            x = _eval(l, a, guard)
            y = _eval(r, a, guard)
            if x.bit_length() + y.bit_length() > guard + 1:
                raise SizeGuardExceeded(x.bit_length() + y.bit_length() - 1, guard)
            return _check_bits(x * y, guard)
        case E(b, e):
            base = _eval(b, a, guard)
            exp = _eval(e, a, guard)
            if base and base.bit_length() + exp > guard:
                raise SizeGuardExceeded(base.bit_length() + exp, guard)
            return base << exp
        case One():
            return 1
        case Const(c):
            return c
    raise TypeError(f"not a term: {t!r}")


# ---------------------------------------------------------------------------
# Atoms, domains, systems
# ---------------------------------------------------------------------------


class Rel(enum.Enum):
    EQ = "="
    LEQ = "<="


class Side(enum.Enum):
    N = "N"
    TILDE = "tilde"


@dataclass(frozen=True)
class Atom:
    rel: Rel
    lhs: Term
    rhs: Term

    def variables(self) -> List[str]:
        return unique([*term_vars(self.lhs), *term_vars(self.rhs)])


def eq(lhs: Term, rhs: Term) -> Atom:
    return Atom(Rel.EQ, lhs, rhs)


def leq(lhs: Term, rhs: Term) -> Atom:
    return Atom(Rel.LEQ, lhs, rhs)


def check_atom(at: Atom, a: Mapping[str, int], guard: int = DEFAULT_GUARD) -> bool:
    x = eval_term(at.lhs, a, guard)
    y = eval_term(at.rhs, a, guard)
    return x == y if at.rel is Rel.EQ else x <= y


@dataclass(frozen=True)
class Domain:
    """Carrier ``{k+1, k+2, ...}``; ``k=None`` means all of N including 0."""

    k: Optional[int] = None

    def __post_init__(self):
        if self.k is not None and self.k < 0:
            raise ValueError("domain bound must be a natural number")

    @classmethod
    def naturals(cls) -> "Domain":
        return cls(None)

    @classmethod
    def above(cls, k: int) -> "Domain":
        return cls(k)

    @property
    def lo(self) -> int:
        """Smallest admissible value."""
        return 0 if self.k is None else self.k + 1

    def __contains__(self, v: int) -> bool:
        return v >= self.lo

    def __str__(self):
        return "N" if self.k is None else f"N>{self.k}"


POSITIVE = Domain(0)


@dataclass(frozen=True)
class System:
    side: Side
    atoms: Tuple[Atom, ...]
    domain: Domain = field(default_factory=Domain)

    def __post_init__(self):
        object.__setattr__(self, "atoms", tuple(self.atoms))
        if self.side is Side.TILDE and self.domain != POSITIVE:
            raise ValueError("tilde-side systems live in N>0")
        for at in self.atoms:
            _check_homogeneous(at, self.side)

    def variables(self) -> List[str]:
        """Variables in order of first occurrence."""
        return unique(v for at in self.atoms for v in at.variables())


def _check_homogeneous(at: Atom, side: Side):
    bad = (E, One) if side is Side.N else (Mul, Const)
    if side is Side.N and at.rel is not Rel.EQ:
        raise ValueError("polynomial systems contain equations only")
    for t in (at.lhs, at.rhs):
        for node in walk(t):
            if isinstance(node, bad):
                raise ValueError(f"{type(node).__name__} node on {side.value} side")


def walk(t: Term) -> Iterator[Term]:
    yield t
    match t:
        case Add(a, b) | Mul(a, b) | E(a, b):
            yield from walk(a)
            yield from walk(b)
        case _:
            pass


def tilde_system(atoms: Iterable[Atom]) -> System:
    return System(Side.TILDE, tuple(atoms), POSITIVE)


# ---------------------------------------------------------------------------
# Fresh names
# ---------------------------------------------------------------------------


class FreshVars:
    """Deterministic ``$0, $1, ...`` generator; one per pipeline run."""

    def __init__(self, start: int = 0):
        self.counter = start

    @classmethod
    def avoiding(cls, names: Iterable[str]) -> "FreshVars":
        """Start past every ``$n`` already present in ``names``."""
        used = [int(m.group(1)) for m in map(FRESH_RE.match, names) if m]
        return cls(max(used) + 1 if used else 0)

    def __call__(self) -> str:
        name = f"{FRESH_PREFIX}{self.counter}"
        self.counter += 1
        return name
