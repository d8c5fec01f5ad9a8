"""Fixed and seeded-random systems used by the test suite and for demos."""

from __future__ import annotations

import random
from typing import List, Tuple

from .core import Const, Domain, Mul, Side, System, Term, Var, eq, sum_terms
from .textio import parse_system

# name, source text over N>1, whether a solution exists with values <= 10
SKOLEM_CORPUS: List[Tuple[str, str, bool]] = [
    ("pythagoras", "x * x + y * y = t * t", True),
    ("product", "z = x * y", True),
    ("golden", "y = x * x\ny = x + 1", False),
    ("chain", "x = y + 1\ny = z + z", True),
    ("twelve", "x * y = 12", True),
    ("sqrt2", "x * x = 2 * y * y", False),
    ("cube", "x * x * x = y", True),
    ("sum_is_product", "x + y = x * y", True),
    ("consecutive_squares", "x * x + 1 = y * y", False),
    ("fifteen", "x * y + y = 15", True),
    ("triple", "x * x = y + y + y", True),
    ("odd_square", "2 * x + 3 = y * y", True),
    ("below_two", "x + 1 = 2", False),
]


def skolem_corpus() -> List[Tuple[str, System, bool]]:
    return [(name, parse_system(f"domain N>1\n{text}\n"), sat)
            for name, text, sat in SKOLEM_CORPUS]


def random_polynomial(rng: random.Random, names: List[str], max_coeff: int,
                      max_degree: int) -> Term:
    """A sum of 1-3 monomials ``c * v1 * ... * vd``, possibly a constant."""
    monomials = []
    for _ in range(rng.randint(1, 3)):
        c = rng.randint(0 if monomials else 1, max_coeff)
        degree = rng.randint(0, max_degree)
        factors: List[Term] = [Var(rng.choice(names)) for _ in range(degree)]
        if c != 1 or not factors:
            factors.insert(0, Const(c))
        t = factors[0]
        for f in factors[1:]:
            t = Mul(t, f)
        monomials.append(t)
    return sum_terms(monomials)


def random_system(rng: random.Random, max_vars: int = 3, max_coeff: int = 3,
                  max_degree: int = 2, domain: Domain = Domain.naturals(),
                  max_atoms: int = 2) -> System:
    names = ["x", "y", "z"][:rng.randint(1, max_vars)]
    atoms = [eq(random_polynomial(rng, names, max_coeff, max_degree),
                random_polynomial(rng, names, max_coeff, max_degree))
             for _ in range(rng.randint(1, max_atoms))]
    return System(Side.N, tuple(atoms), domain)


def random_corpus(seed: int, count: int, **kw) -> List[System]:
    rng = random.Random(seed)
    return [random_system(rng, **kw) for _ in range(count)]


__all__ = ["SKOLEM_CORPUS", "skolem_corpus", "random_system", "random_corpus"]
