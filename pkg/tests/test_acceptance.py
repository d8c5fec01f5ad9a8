"""Exit criteria.  Each test prints one PASS/FAIL line.

Run standalone with ``python tests/test_acceptance.py`` or via pytest
(``pytest tests/test_acceptance.py -s`` shows the lines).
"""

import itertools
import sys
import time
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from ntilde.casesplit import Status, case_split, split_equivalence_check  # noqa: E402
from ntilde.core import Var  # noqa: E402
from ntilde.corpus import random_corpus, skolem_corpus  # noqa: E402
from ntilde.encoders import (  # noqa: E402
    compile_system, encode_divides, encode_floor_log2, encode_mult, encode_square,
    enumerate_S_prime, lift_witness, p_filter,
)
from ntilde.skolem import MulEq, skolemize  # noqa: E402
from ntilde.solver import decide_compiled, divides_mersenne, solve_bounded, verify  # noqa: E402
from ntilde.textio import parse_system, print_system  # noqa: E402

from oracles import grid_solvable  # noqa: E402

RESULTS = {}


def report(n, title, ok, elapsed, budget, detail=""):
    ok = ok and elapsed < budget
    line = f"[{'PASS' if ok else 'FAIL'}] criterion {n}: {title} ({elapsed:.2f}s, budget {budget}s){detail}"
    RESULTS[n] = ok
    print(line, file=sys.__stdout__, flush=True)
    return ok


# -- 1 -----------------------------------------------------------------------

def test_criterion_1_mersenne_divisibility():
    t0 = time.perf_counter()
    bad = [(m, n) for m in range(1, 25) for n in range(1, 25)
           if divides_mersenne(m, n) != (n % m == 0)]
    assert report(1, "2^m-1 | 2^n-1 iff m | n on [1,24]^2", not bad,
                  time.perf_counter() - t0, 1, f" mismatches={bad}" if bad else "")


# -- 2 -----------------------------------------------------------------------

def test_criterion_2_square_candidates():
    t0 = time.perf_counter()
    bad = []
    for x in range(2, 41):
        sp = enumerate_S_prime(x)
        if not sp <= {x * x, 2 * x * x + x, 3 * x * x + 2 * x} or x * x not in sp:
            bad.append(x)
        if {y for y in sp if p_filter(x, y)} != {x * x}:
            bad.append(x)
    # the x = 2 corner: 3x^2+2x = 16, and 16 + 3*2 = 22 is not divisible by 5
    corner = 22 % 5 != 0 and not p_filter(2, 16)
    assert report(2, "S'(x) structure and P-filter on [2,40]", not bad and corner,
                  time.perf_counter() - t0, 10)


# -- 3 -----------------------------------------------------------------------

def _decide_and_verify(rel, values, failures):
    a = decide_compiled(rel, values)
    if a is not None and not verify(rel.system(), a).ok:
        failures.append(("verify", values))
    return a is not None


def test_criterion_3_encoders():
    t0 = time.perf_counter()
    bad = []
    div = encode_divides(Var("d"), Var("n"))
    for d, n in itertools.product(range(1, 21), repeat=2):
        if _decide_and_verify(div, [d, n], bad) != (n % d == 0):
            bad.append(("divides", d, n))
    sq = encode_square(Var("a"), "b")
    for a in range(2, 16):
        for b in range(1, 301):
            if _decide_and_verify(sq, [a, b], bad) != (b == a * a):
                bad.append(("square", a, b))
    mult = encode_mult(Var("a"), Var("b"), Var("c"))
    for a, b in itertools.product(range(2, 11), repeat=2):
        for c in range(1, 201):
            if _decide_and_verify(mult, [a, b, c], bad) != (c == a * b):
                bad.append(("mult", a, b, c))
    lg = encode_floor_log2(Var("s"), "y")
    for s in range(1, 65):
        for y in range(1, 8):
            if _decide_and_verify(lg, [s, y], bad) != (s >= 2 and y == s.bit_length() - 1):
                bad.append(("floorlog", s, y))
    assert report(3, "gadget decisions exact on all grids", not bad,
                  time.perf_counter() - t0, 60, f" failures={bad[:5]}" if bad else "")


# -- 4 -----------------------------------------------------------------------

def test_criterion_4_forward_pipeline():
    t0 = time.perf_counter()
    corpus = skolem_corpus()
    bad = []
    sat_seen = unsat_seen = checked_atoms = 0
    for name, source, expected in corpus:
        rep = solve_bounded(source, 10)
        if rep.sat != expected:
            bad.append((name, "solve"))
            continue
        if not rep.sat:
            unsat_seen += 1
            continue
        sat_seen += 1
        sk = skolemize(source)
        system, plan = compile_system(sk)
        lifted = lift_witness(plan, sk.extend(rep.assignment))
        v = verify(system, lifted)
        checked_atoms += len(v.results)
        if not v.ok:
            bad.append((name, "verify"))
    ok = not bad and len(corpus) >= 10 and unsat_seen >= 2 and "pythagoras" in {c[0] for c in corpus}
    assert report(4, "solve, lift and verify the corpus", ok, time.perf_counter() - t0, 60,
                  f" sat={sat_seen} unsat={unsat_seen} atoms={checked_atoms}"
                  + (f" failures={bad}" if bad else ""))


# -- 5 -----------------------------------------------------------------------

def test_criterion_5_no_spurious_interface_solutions():
    t0 = time.perf_counter()
    bad = []
    gadgets = 0
    for name, source, _ in skolem_corpus():
        _, plan = compile_system(skolemize(source))
        for eqn, rel in plan.gadgets:
            assert isinstance(eqn, MulEq)
            gadgets += 1
            for a, b in itertools.product(range(2, 9), repeat=2):
                for c in range(1, 65):
                    binding = {}
                    consistent = all(binding.setdefault(v, val) == val
                                     for v, val in zip((eqn.y, eqn.z, eqn.x), (a, b, c)))
                    holds = consistent and c == a * b
                    if (decide_compiled(rel, [a, b, c]) is not None) != holds:
                        bad.append((name, eqn, a, b, c))
    assert report(5, "mult gadgets satisfiable iff the product holds", not bad and gadgets > 0,
                  time.perf_counter() - t0, 60, f" gadgets={gadgets}")


# -- 6 -----------------------------------------------------------------------

def split_corpus():
    return random_corpus(seed=2024, count=50, max_vars=3, max_coeff=3, max_degree=2)


def test_criterion_6_case_split_equivalence():
    t0 = time.perf_counter()
    bad = []
    solvable = 0
    for i, s in enumerate(split_corpus()):
        for k in (0, 1, 2):
            left = grid_solvable(s, 0, 8)
            right = any(c.status is Status.TRUE
                        or (c.status is Status.OPEN and grid_solvable(c.residual, k + 1, 8))
                        for c in case_split(s, k))
            solvable += left
            if not (left == right and split_equivalence_check(s, k, 8)):
                bad.append((i, k))
    assert report(6, "case split equisolvable on 50 random systems, B=8", not bad,
                  time.perf_counter() - t0, 120, f" solvable={solvable}/150")


# -- 7 -----------------------------------------------------------------------

def generated_systems():
    out = [encode_divides(Var("d"), Var("n")).system(),
           encode_square(Var("a"), "b").system(),
           encode_mult(Var("a"), Var("b"), Var("c")).system(),
           encode_floor_log2(Var("s"), "y").system()]
    for _, source, _ in skolem_corpus():
        sk = skolemize(source)
        out += [source, sk.to_system(), compile_system(sk)[0]]
    for s in split_corpus():
        out.append(s)
        for k in (0, 1, 2):
            out += [c.residual for c in case_split(s, k)]
    return out


def test_criterion_7_round_trip():
    t0 = time.perf_counter()
    systems = generated_systems()
    bad = [s for s in systems if parse_system(print_system(s)) != s]
    assert report(7, "parse(print(s)) == s for every generated system", not bad,
                  time.perf_counter() - t0, 60, f" systems={len(systems)}")


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q", "-s"]))
