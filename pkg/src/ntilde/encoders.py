"""Gadgets expressing order, divisibility, floor-log, squaring and products
as equation systems over ``<N>0; +, x*2^y, <=, 1>``.

Each gadget comes with a witness plan: for every auxiliary variable, a
closed-form rule computing its value from the interface values.  The aux
values are unique whenever they exist, so running the plan and then checking
the atoms decides the relation exactly, with no search.  (Search would be
hopeless anyway: a divisibility witness is ``(2**n - 1) // (2**d - 1)``.)
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import List, Mapping, Optional, Sequence, Tuple

from .core import (
    DEFAULT_GUARD,
    Add,
    Assignment,
    Atom,
    E,
    Side,
    FreshVars,
    One,
    SizeGuardExceeded,
    System,
    Term,
    Var,
    check_atom,
    eq,
    eval_term,
    leq,
    term_vars,
    tilde_system,
    unique,
)
from .skolem import AddEq, IncEq, MulEq, SkolemEq, SkolemSystem, skolem_atom
from .textio import ParseError, _AtomParser, print_atom, print_term, tokenize_line

RULES = ("mersenne_div", "sub", "floorlog", "bitcap_sub", "square")


class WitnessLiftFailure(ValueError):
    pass


@dataclass(frozen=True)
class Step:
    var: str
    rule: str
    args: Tuple[Term, ...]

    def __post_init__(self):
        if self.rule not in RULES:
            raise ValueError(f"unknown rule {self.rule!r}")

    def solve(self, values: Mapping[str, int], guard: int = DEFAULT_GUARD) -> Optional[int]:
        """The unique admissible aux value, or None if there is none."""
        v = [eval_term(t, values, guard) for t in self.args]
        match self.rule:
            case "mersenne_div":
                d, n = v
                if n > guard:
                    raise SizeGuardExceeded(n, guard)
                q, r = divmod((1 << n) - 1, (1 << d) - 1)
                return q if r == 0 and q >= 1 else None
            case "sub":
                s, t = v
                return t - s if t > s else None
            case "floorlog":
                (s,) = v
                return s.bit_length() - 1 if s >= 2 else None
            case "bitcap_sub":
                s, y = v
                if y + 1 > guard:
                    raise SizeGuardExceeded(y + 1, guard)
                z = (1 << (y + 1)) - s
                return z if z > 0 else None
            case "square":
                (x,) = v
                return x * x

    def __str__(self):
        return f"{self.var} <- {self.rule}({', '.join(map(print_term, self.args))})"


@dataclass(frozen=True)
class EncodedRelation:
    interface: Tuple[Term, ...]
    aux: Tuple[str, ...]
    atoms: Tuple[Atom, ...]
    plan: Optional[Tuple[Step, ...]] = None

    def __post_init__(self):
        shared = set(self.aux) & {v for t in self.interface for v in term_vars(t)}
        if shared:
            raise ValueError(f"aux variables leak into the interface: {sorted(shared)}")

    def system(self) -> System:
        return tilde_system(self.atoms)

    def interface_vars(self) -> List[str]:
        return unique(v for t in self.interface for v in term_vars(t))


def _merge(interface: Sequence[Term], parts: Sequence[EncodedRelation],
           extra_aux: Sequence[str] = (), extra_atoms: Sequence[Atom] = (),
           extra_steps: Sequence[Step] = ()) -> EncodedRelation:
    aux = list(extra_aux)
    atoms: List[Atom] = []
    steps = list(extra_steps)
    for p in parts:
        aux.extend(p.aux)
        atoms.extend(p.atoms)
        steps.extend(p.plan)
    atoms.extend(extra_atoms)
    return EncodedRelation(tuple(interface), tuple(unique(aux)), tuple(atoms), tuple(steps))


def _gen_for(gen: Optional[FreshVars], *terms: Term) -> FreshVars:
    if gen is not None:
        return gen
    return FreshVars.avoiding(v for t in terms for v in term_vars(t))


def encode_less(s: Term, t: Term, gen: Optional[FreshVars] = None) -> EncodedRelation:
    """``s < t`` as ``s + z = t``; positive ``z`` makes the order strict."""
    gen = _gen_for(gen, s, t)
    z = gen()
    return EncodedRelation((s, t), (z,), (eq(Add(s, Var(z)), t),),
                           (Step(z, "sub", (s, t)),))


def encode_divides(d: Term, n: Term, gen: Optional[FreshVars] = None) -> EncodedRelation:
    """``d | n`` as ``2**n + z = z * 2**d + 1``.

    The equation says ``z * (2**d - 1) = 2**n - 1``, and ``2**d - 1`` divides
    ``2**n - 1`` exactly when ``d`` divides ``n``.
    """
    gen = _gen_for(gen, d, n)
    z = gen()
    atom = eq(Add(E(One(), n), Var(z)), Add(E(Var(z), d), One()))
    return EncodedRelation((d, n), (z,), (atom,), (Step(z, "mersenne_div", (d, n)),))


def encode_floor_log2(s: Term, y: str, gen: Optional[FreshVars] = None,
                      y_is_aux: bool = False) -> EncodedRelation:
    """``y = floor(log2 s)`` via ``2**y <= s < 2**(y+1)``.

    Unsatisfiable at ``s = 1``: the true answer 0 is outside N>0.
    """
    if y in set(term_vars(s)):
        raise ValueError(f"{y} occurs in the argument term")
    gen = _gen_for(gen, s, Var(y))
    cap = E(One(), Add(Var(y), One()))
    below = encode_less(s, cap, gen)
    (z,) = below.aux
    steps = [Step(z, "bitcap_sub", (s, Var(y)))]
    if y_is_aux:
        steps.insert(0, Step(y, "floorlog", (s,)))
    interface = (s,) if y_is_aux else (s, Var(y))
    aux = ((y,) if y_is_aux else ()) + below.aux
    atoms = (leq(E(One(), Var(y)), s),) + below.atoms
    return EncodedRelation(interface, aux, atoms, tuple(steps))


def encode_square(x: Term, y: str, gen: Optional[FreshVars] = None,
                  y_is_aux: bool = False) -> EncodedRelation:
    """``y = x**2`` for ``x >= 2``.

    ``y + x`` must be a multiple of ``x(x+1)``; the log cap leaves only
    ``x**2``, ``2x**2 + x`` and ``3x**2 + 2x``; the two extra divisibility
    tests keep ``x**2`` alone.
    """
    if y in set(term_vars(x)):
        raise ValueError(f"{y} occurs in the argument term")
    gen = _gen_for(gen, x, Var(y))
    vy = Var(y)
    one = One()
    lx, ly = gen(), gen()
    parts = [
        encode_divides(x, Add(vy, x), gen),
        encode_divides(Add(x, one), Add(vy, x), gen),
        encode_floor_log2(x, lx, gen, y_is_aux=True),
        encode_floor_log2(vy, ly, gen, y_is_aux=True),
    ]
    cap = leq(Var(ly), Add(Add(Var(lx), Var(lx)), one))
    filters = [
        encode_divides(Add(Add(x, one), one), Add(Add(vy, x), x), gen),
        encode_divides(Add(Add(Add(x, one), one), one), Add(Add(Add(vy, x), x), x), gen),
    ]
    rel = _merge((x, vy), parts, extra_atoms=(cap,))
    rel = _merge((x, vy), [rel, *filters])
    steps = rel.plan
    if y_is_aux:
        steps = (Step(y, "square", (x,)),) + steps
        return EncodedRelation((x,), (y,) + rel.aux, rel.atoms, steps)
    return rel


def encode_mult(x: Term, y: Term, z: Term, gen: Optional[FreshVars] = None) -> EncodedRelation:
    """``z = x * y`` for ``x, y >= 2``, from ``z + z + x**2 + y**2 = (x + y)**2``."""
    gen = _gen_for(gen, x, y, z)
    u, v, w = gen(), gen(), gen()
    parts = [
        encode_square(x, u, gen, y_is_aux=True),
        encode_square(y, v, gen, y_is_aux=True),
        encode_square(Add(x, y), w, gen, y_is_aux=True),
    ]
    polar = eq(Add(Add(Add(z, z), Var(u)), Var(v)), Var(w))
    return _merge((x, y, z), parts, extra_aux=(u, v, w), extra_atoms=(polar,))


def enumerate_S_prime(x: int) -> set:
    """Brute force: ``y`` with ``x(x+1) | y + x`` and a capped bit length.

    Kept deliberately apart from the gadgets so it can check them.
    """
    if x < 2:
        raise ValueError("x must be at least 2")
    cap = 2 * (x.bit_length() - 1) + 1
    return {y for y in range(1, 1 << (cap + 1))
            if (y + x) % x == 0 and (y + x) % (x + 1) == 0
            and y.bit_length() - 1 <= cap}


def p_filter(x: int, y: int) -> bool:
    """``x+2 | y+2x`` and ``x+3 | y+3x``, in plain arithmetic."""
    return (y + 2 * x) % (x + 2) == 0 and (y + 3 * x) % (x + 3) == 0


# ---------------------------------------------------------------------------
# Plans
# ---------------------------------------------------------------------------


def run_plan(steps: Sequence[Step], values: Mapping[str, int],
             guard: int = DEFAULT_GUARD) -> Tuple[Assignment, Optional[Step]]:
    """Apply ``steps`` in order; returns the values and the first failing step."""
    out = dict(values)
    for st in steps:
        val = st.solve(out, guard)
        if val is None:
            return out, st
        out[st.var] = val
    return out, None


def first_failing_atom(atoms: Sequence[Atom], values: Mapping[str, int],
                       guard: int = DEFAULT_GUARD) -> Optional[int]:
    for i, at in enumerate(atoms):
        if not check_atom(at, values, guard):
            return i
    return None


@dataclass(frozen=True)
class WitnessPlan:
    steps: Tuple[Step, ...]
    system: System
    # for each compiled atom, the Skolem equation (or condition) it came from
    origins: Tuple[str, ...]
    gadgets: Tuple[Tuple[SkolemEq, EncodedRelation], ...] = field(default=())

    def format(self) -> str:
        return "".join(f"{st}\n" for st in self.steps)


def compile_system(sk: SkolemSystem, gen: Optional[FreshVars] = None) -> Tuple[System, WitnessPlan]:
    """Replace products by multiplication gadgets and add ``1 < x`` where needed.

    A variable that sits in some product is already forced above 1 by the
    gadget's floor-log constraints; any other variable gets an explicit
    ``1 + z = x``.
    """
    if gen is None:
        gen = FreshVars.avoiding(sk.variables())
    atoms: List[Atom] = []
    origins: List[str] = []
    steps: List[Step] = []
    gadgets = []
    in_mul = set()
    others: List[str] = []
    for e in sk.equations:
        src = print_atom(skolem_atom(e))
        match e:
            case MulEq(x, y, z):
                rel = encode_mult(Var(y), Var(z), Var(x), gen)
                gadgets.append((e, rel))
                atoms.extend(rel.atoms)
                origins.extend([src] * len(rel.atoms))
                steps.extend(rel.plan)
                in_mul.update(e.variables())
            case AddEq(x, y, z):
                atoms.append(eq(Var(x), Add(Var(y), Var(z))))
                origins.append(src)
                others.extend(e.variables())
            case IncEq(x, y):
                atoms.append(eq(Var(x), Add(Var(y), One())))
                origins.append(src)
                others.extend(e.variables())
    for v in unique(others):
        if v in in_mul:
            continue
        rel = encode_less(One(), Var(v), gen)
        atoms.extend(rel.atoms)
        origins.append(f"1 < {v}")
        steps.extend(rel.plan)
    system = tilde_system(atoms)
    return system, WitnessPlan(tuple(steps), system, tuple(origins), tuple(gadgets))


def lift_witness(plan: WitnessPlan, originals: Mapping[str, int],
                 guard: int = DEFAULT_GUARD) -> Assignment:
    """Closed-form values for every aux variable of a compiled system.

    ``originals`` must solve the Skolem system; otherwise the first step or
    atom that breaks is reported in a ``WitnessLiftFailure``.
    """
    missing = [v for v in plan.system.variables() if v not in originals
               and v not in {st.var for st in plan.steps}]
    if missing:
        raise WitnessLiftFailure(f"no value for {', '.join(missing)}")
    values, bad = run_plan(plan.steps, originals, guard)
    if bad is not None:
        raise WitnessLiftFailure(f"no admissible value for {bad}")
    i = first_failing_atom(plan.system.atoms, values, guard)
    if i is not None:
        raise WitnessLiftFailure(
            f"atom {print_atom(plan.system.atoms[i])!r} fails (from {plan.origins[i]!r})")
    return {v: values[v] for v in plan.system.variables()}


def parse_plan(text: str) -> Tuple[Step, ...]:
    """Inverse of ``WitnessPlan.format``."""
    steps = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0]
        if not line.strip():
            continue
        var, sep, rest = line.partition("<-")
        rule, paren, body = rest.strip().partition("(")
        if not sep or not paren or rule.strip() not in RULES:
            raise ParseError(f"expected 'var <- rule(args)', got {line.strip()!r}", lineno, 1)
        p = _AtomParser(tokenize_line(body, lineno), Side.TILDE, lineno)
        args = [p.sum()]
        while p.tok.text == ",":
            p.advance()
            args.append(p.sum())
        p.expect(")")
        if p.tok.kind != "end":
            p.fail(f"unexpected {p.tok.text!r}", {"end of line"})
        steps.append(Step(var.strip(), rule.strip(), tuple(args)))
    return tuple(steps)
