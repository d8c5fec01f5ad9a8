import itertools
import random

import pytest

from ntilde.core import Const, FreshVars, walk
from ntilde.corpus import random_system, skolem_corpus
from ntilde.skolem import (
    SKOLEM_DOMAIN, AddEq, IncEq, MulEq, NotSkolemShaped, build_constant, from_system, propagate,
    skolemize,
)
from ntilde.textio import parse_system, print_system

from oracles import eval_poly, grid_solvable, skolem_search


def n1(text):
    return parse_system(f"domain N>1\n{text}\n")


def test_flatten_example():
    sk = skolemize(n1("z = x*y + 1"))
    assert sk.equations == (MulEq("$0", "x", "y"), IncEq("z", "$0"))


def test_pythagoras_shape():
    sk = skolemize(n1("x * x + y * y = t * t"))
    assert sk.equations == (
        MulEq("$0", "x", "x"), MulEq("$1", "y", "y"), AddEq("$2", "$0", "$1"), MulEq("$2", "t", "t"))


def test_two_gadget_unique():
    var, eqs = build_constant(2, FreshVars())
    assert eqs == [MulEq("$1", "$0", "$0"), AddEq("$1", "$0", "$0")]
    sols = [(u, v) for u in range(2, 51) for v in range(2, 51)
            if all(e.holds({"$0": u, "$1": v}) for e in eqs)]
    assert sols == [(2, 4)]


@pytest.mark.parametrize("c, count", [(2, 2), (3, 3), (5, 4), (12, 5), (13, 6), (64, 7)])
def test_constant_gadget(c, count):
    var, eqs = build_constant(c, FreshVars())
    assert len(eqs) == count
    names = list(dict.fromkeys(n for e in eqs for n in e.variables()))
    # every solution in range pins var to c
    for v in range(2, 2 * c + 3):
        ok = skolem_search(eqs, {var: v}, 2, 2 * c + 4)
        assert ok == (v == c), v
    assert len(names) == len(eqs)


def test_constant_five_layout():
    var, eqs = build_constant(5, FreshVars())
    assert eqs[2:] == [AddEq("$2", "$0", "$0"), IncEq("$3", "$2")]
    assert var == "$3"


def test_constant_twelve_layout():
    var, eqs = build_constant(12, FreshVars())
    assert [type(e) for e in eqs[2:]] == [IncEq, AddEq, AddEq]


@pytest.mark.parametrize("text", ["x = 1", "x = 0", "0 = x * y", "x + 1 = 1", "2 = 3"])
def test_unsat_gadget(text):
    sk = skolemize(n1(text))
    assert any(isinstance(e, IncEq) and e.x == e.y for e in sk.equations)


def test_trivial_atoms_vanish():
    assert skolemize(n1("2 + 2 = 4")).equations == ()
    assert skolemize(n1("x = x")).equations == ()


def test_unified_originals():
    sk = skolemize(n1("x = y\nz = x * y"))
    assert sk.back_map == {"x": "x", "y": "x", "z": "z"}
    assert sk.equations == (MulEq("z", "x", "x"),)
    assert sk.extend({"x": 3, "y": 3, "z": 9}) == {"z": 9, "x": 3}
    with pytest.raises(ValueError):
        sk.extend({"x": 3, "y": 4, "z": 12})


def test_one_coefficients_dropped():
    sk = skolemize(n1("y = 1 * x * 1 + 0"))
    assert sk.equations == ()
    assert sk.back_map["y"] == sk.back_map["x"]


def test_printed_form_has_only_increment_constants():
    for _, s, _ in skolem_corpus():
        sys = skolemize(s).to_system()
        for at in sys.atoms:
            consts = [n for t in (at.lhs, at.rhs) for n in walk(t) if isinstance(n, Const)]
            assert consts in ([], [Const(1)])
        assert from_system(parse_system(print_system(sys))).equations == skolemize(s).equations


def test_from_system_rejects():
    with pytest.raises(NotSkolemShaped):
        from_system(n1("x = y * z + 1"))
    with pytest.raises(NotSkolemShaped):
        from_system(parse_system("domain N\nx = y * z"))


def test_domain_required():
    with pytest.raises(ValueError):
        skolemize(parse_system("domain N\nx = y"))


def _cases(seed, count):
    rng = random.Random(seed)
    return [random_system(rng, max_coeff=5, domain=SKOLEM_DOMAIN) for _ in range(count)]


def _implied_bound(s, bound):
    top = {v: bound for v in s.variables()}
    consts = [n.value for at in s.atoms for t in (at.lhs, at.rhs) for n in walk(t)
              if isinstance(n, Const)]
    sides = [eval_poly(t, top) for at in s.atoms for t in (at.lhs, at.rhs)]
    return max([4, *sides, *(2 * c for c in consts)])


FIXED = [n1(t) for t in [
    "x * y = 12", "x + 3 = y", "2 * x * x = y + 2", "x * x + 5 = y * y + 1",
    "5 * x = y * y + 1", "x * y + 2 = 3 * z", "x = y + 1\ny * 2 = x + 2",
    "x * x = 4", "3 = x", "x + y = 2",
]]


@pytest.mark.parametrize("seed", range(5))
def test_equisolvable_bounded(seed):
    for s in (_cases(seed, 10) if seed < 4 else FIXED):
        for bound in (3, 5):
            sk = skolemize(s)
            hi = _implied_bound(s, bound)
            orig = s.variables()
            lhs = grid_solvable(s, 2, bound)
            rhs = False
            for vals in itertools.product(range(2, bound + 1), repeat=len(orig)):
                a = dict(zip(orig, vals))
                seed_vals = {}
                clash = False
                for name, rep in sk.back_map.items():
                    if seed_vals.setdefault(rep, a[name]) != a[name]:
                        clash = True
                if not clash and skolem_search(sk.equations, seed_vals, 2, hi):
                    rhs = True
                    break
            assert lhs == rhs, print_system(s)


@pytest.mark.parametrize("seed", range(3))
def test_witness_transfer(seed):
    for s in _cases(100 + seed, 15) + FIXED:
        sk = skolemize(s)
        names = s.variables()
        for vals in itertools.product(range(2, 7), repeat=len(names)):
            a = dict(zip(names, vals))
            if all(eval_poly(at.lhs, a) == eval_poly(at.rhs, a) for at in s.atoms):
                ext = sk.extend(a)
                assert sk.holds(ext)
                assert all(v >= 2 for v in ext.values())


def test_propagate_fills_defined_variables():
    sk = skolemize(parse_system("domain N>1\nx * x + y * y = t * t\n"))
    full = propagate(sk, {"x": 3, "y": 4, "t": 5})
    assert full == sk.extend({"x": 3, "y": 4, "t": 5})
    assert sk.holds(full)


def test_propagate_leaves_undetermined_out():
    sk = skolemize(parse_system("domain N>1\nz = x * y\n"))
    assert propagate(sk, {"x": 2}) == {"x": 2}
