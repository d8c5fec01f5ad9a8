"""Flattening polynomial systems over N>1 into Skolem form.

Skolem form allows exactly three equation shapes::

    x = y * z      MulEq
    x = y + z      AddEq
    x = y + 1      IncEq

Constants other than an additive ``+ 1`` are compiled into gadget variables
(``u * u = u + u`` pins ``u`` to 2 over N>1, then binary doubling).  An atom
that would force a variable to 0 or 1 is replaced by the unsatisfiable
``a = a + 1``, so the output is always a well-formed system.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, List, Mapping, Tuple, Union

from .core import (
    Add,
    Assignment,
    Const,
    Domain,
    FreshVars,
    Mul,
    Side,
    System,
    Term,
    Var,
    eq,
    eval_term,
)

SKOLEM_DOMAIN = Domain(1)


class NotSkolemShaped(ValueError):
    pass


@dataclass(frozen=True)
class MulEq:
    x: str
    y: str
    z: str

    def holds(self, a: Mapping[str, int]) -> bool:
        return a[self.x] == a[self.y] * a[self.z]

    def variables(self) -> Tuple[str, ...]:
        return (self.x, self.y, self.z)


@dataclass(frozen=True)
class AddEq:
    x: str
    y: str
    z: str

    def holds(self, a: Mapping[str, int]) -> bool:
        return a[self.x] == a[self.y] + a[self.z]

    def variables(self) -> Tuple[str, ...]:
        return (self.x, self.y, self.z)


@dataclass(frozen=True)
class IncEq:
    x: str
    y: str

    def holds(self, a: Mapping[str, int]) -> bool:
        return a[self.x] == a[self.y] + 1

    def variables(self) -> Tuple[str, ...]:
        return (self.x, self.y)


SkolemEq = Union[MulEq, AddEq, IncEq]


def skolem_atom(e: SkolemEq):
    match e:
        case MulEq(x, y, z):
            return eq(Var(x), Mul(Var(y), Var(z)))
        case AddEq(x, y, z):
            return eq(Var(x), Add(Var(y), Var(z)))
        case IncEq(x, y):
            return eq(Var(x), Add(Var(y), Const(1)))
    raise TypeError(e)


@dataclass(frozen=True)
class SkolemSystem:
    equations: Tuple[SkolemEq, ...]
    originals: Tuple[str, ...] = ()
    # original name -> Skolem variable carrying its value
    back_map: Mapping[str, str] = field(default_factory=dict)
    # non-original Skolem variable -> polynomial over originals it stands for
    definitions: Mapping[str, Term] = field(default_factory=dict)

    def variables(self) -> List[str]:
        return list(dict.fromkeys(v for e in self.equations for v in e.variables()))

    def to_system(self) -> System:
        return System(Side.N, tuple(skolem_atom(e) for e in self.equations), SKOLEM_DOMAIN)

    def holds(self, a: Mapping[str, int]) -> bool:
        return all(e.holds(a) for e in self.equations)

    def extend(self, originals: Mapping[str, int]) -> Assignment:
        """Witness transfer: complete a solution of the source system."""
        out: Assignment = {}
        for name, rep in self.back_map.items():
            if rep in out and out[rep] != originals[name]:
                raise ValueError(f"{name} and another original were unified but differ")
            out[rep] = originals[name]
        for v, t in self.definitions.items():
            if v not in out:
                out[v] = eval_term(t, out | dict(originals))
        missing = [v for v in self.variables() if v not in out]
        if missing:
            raise ValueError(f"no value determined for {', '.join(missing)}")
        return {v: out[v] for v in self.variables()}


def from_system(s: System) -> SkolemSystem:
    """Read a system already written in the three Skolem shapes."""
    if s.side is not Side.N or s.domain != SKOLEM_DOMAIN:
        raise NotSkolemShaped("Skolem systems are polynomial systems over N>1")
    eqs: List[SkolemEq] = []
    for at in s.atoms:
        match at.lhs, at.rhs:
            case Var(x), Mul(Var(y), Var(z)):
                eqs.append(MulEq(x, y, z))
            case Var(x), Add(Var(y), Var(z)):
                eqs.append(AddEq(x, y, z))
            case Var(x), Add(Var(y), Const(1)):
                eqs.append(IncEq(x, y))
            case _:
                raise NotSkolemShaped(f"atom is not of a Skolem shape: {at}")
    names = tuple(dict.fromkeys(v for e in eqs for v in e.variables()))
    return SkolemSystem(tuple(eqs), names, {v: v for v in names}, {})


# ---------------------------------------------------------------------------
# Constant gadgets
# ---------------------------------------------------------------------------


def build_constant(c: int, gen: FreshVars) -> Tuple[str, List[SkolemEq]]:
    """A variable forced to exactly ``c`` over N>1, in O(log c) equations."""
    if c < 2:
        raise ValueError("only constants >= 2 have a gadget over N>1")
    u, v = gen(), gen()
    # u*u = u+u has the single solution u=2 once u>1
    eqs: List[SkolemEq] = [MulEq(v, u, u), AddEq(v, u, u)]
    bits = bin(c)[3:]
    cur = u
    for i, bit in enumerate(bits):
        if i > 0:
            nxt = gen()
            eqs.append(AddEq(nxt, cur, cur))
            cur = nxt
        if bit == "1":
            nxt = gen()
            eqs.append(IncEq(nxt, cur))
            cur = nxt
    return cur, eqs


def _constant_values(c: int, eqs: List[SkolemEq]) -> Dict[str, int]:
    vals: Dict[str, int] = {}
    for e in eqs:
        match e:
            case MulEq(x, y, _) if y not in vals:
                vals[y], vals[x] = 2, 4
            case AddEq(x, y, z):
                vals[x] = vals[y] + vals[z]
            case IncEq(x, y):
                vals[x] = vals[y] + 1
    return vals


# ---------------------------------------------------------------------------
# Flattening
# ---------------------------------------------------------------------------


class _Flattener:
    def __init__(self, gen: FreshVars):
        self.gen = gen
        self.eqs: List[SkolemEq] = []
        self.parent: Dict[str, str] = {}
        self.defs: Dict[str, Term] = {}

    def find(self, v: str) -> str:
        while self.parent.get(v, v) != v:
            v = self.parent[v]
        return v

    def union(self, a: str, b: str, originals: set):
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return
        # an original always represents its class; else the first-seen wins
        if rb in originals and ra not in originals:
            ra, rb = rb, ra
        self.parent[rb] = ra

    def unsat(self):
        a = self.gen()
        self.eqs.append(IncEq(a, a))

    def materialize(self, c: int) -> str:
        var, eqs = build_constant(c, self.gen)
        for name, val in _constant_values(c, eqs).items():
            self.defs[name] = Const(val)
        self.eqs.extend(eqs)
        return var

    def operand(self, x: Union[str, int]) -> str:
        return x if isinstance(x, str) else self.materialize(x)

    def flatten(self, t: Term) -> Union[str, int]:
        """A variable name, or an int for a still-folded constant."""
        match t:
            case Const(c):
                return c
            case Var(name):
                return name
            case Add(l, r):
                a, b = self.flatten(l), self.flatten(r)
                if isinstance(a, int) and isinstance(b, int):
                    return a + b
                if a == 0 or b == 0:
                    return b if a == 0 else a
                out = self.gen()
                self.defs[out] = t
                if a == 1 or b == 1:
                    self.eqs.append(IncEq(out, a if b == 1 else b))
                else:
                    self.eqs.append(AddEq(out, self.operand(a), self.operand(b)))
                return out
            case Mul(l, r):
                a, b = self.flatten(l), self.flatten(r)
                if isinstance(a, int) and isinstance(b, int):
                    return a * b
                if a == 0 or b == 0:
                    return 0
                if a == 1 or b == 1:
                    return b if a == 1 else a
                out = self.gen()
                self.defs[out] = t
                self.eqs.append(MulEq(out, self.operand(a), self.operand(b)))
                return out
        raise TypeError(f"not a polynomial term: {t!r}")


def skolemize(s: System, gen: FreshVars | None = None) -> SkolemSystem:
    if s.side is not Side.N or s.domain != SKOLEM_DOMAIN:
        raise ValueError("skolemize expects a polynomial system over N>1")
    if gen is None:
        gen = FreshVars.avoiding(s.variables())
    originals = s.variables()
    orig_set = set(originals)
    f = _Flattener(gen)
    for at in s.atoms:
        p, q = f.flatten(at.lhs), f.flatten(at.rhs)
        match p, q:
            case int(), int():
                if p != q:
                    f.unsat()
            case str(), str():
                f.union(p, q, orig_set)
            case _:
                v, c = (p, q) if isinstance(p, str) else (q, p)
                if c < 2:
                    f.unsat()
                else:
                    f.union(v, f.materialize(c), orig_set)
    r = f.find
    eqs = []
    for e in f.eqs:
        match e:
            case MulEq(x, y, z):
                eqs.append(MulEq(r(x), r(y), r(z)))
            case AddEq(x, y, z):
                eqs.append(AddEq(r(x), r(y), r(z)))
            case IncEq(x, y):
                eqs.append(IncEq(r(x), r(y)))
    back_map = {v: r(v) for v in originals}
    definitions: Dict[str, Term] = {}
    for v, t in f.defs.items():
        rep = r(v)
        if rep not in orig_set and rep not in definitions:
            definitions[rep] = t
    return SkolemSystem(tuple(eqs), tuple(originals), back_map, definitions)


def propagate(sk: SkolemSystem, values: Mapping[str, int]) -> Assignment:
    """Fill in variables that the equations define from known ones.

    Each equation is read left to right as a definition of its first
    variable.  Variables still unknown after a fixpoint are left out.
    """
    out = dict(values)
    changed = True
    while changed:
        changed = False
        for e in sk.equations:
            if e.x in out or not all(v in out for v in e.variables()[1:]):
                continue
            match e:
                case MulEq(x, y, z):
                    out[x] = out[y] * out[z]
                case AddEq(x, y, z):
                    out[x] = out[y] + out[z]
                case IncEq(x, y):
                    out[x] = out[y] + 1
            changed = True
    return out


def extend_witness(sk: SkolemSystem, originals: Mapping[str, int]) -> Assignment:
    return sk.extend(originals)
