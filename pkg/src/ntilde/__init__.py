"""Compile polynomial equation systems over the naturals into systems over
``<N>0; +, x*2^y, <=, 1>``, with witness lifting and bounded solvers."""

from .core import (
    Add,
    Atom,
    Const,
    Domain,
    E,
    FreshVars,
    Mul,
    One,
    Rel,
    Side,
    SizeGuardExceeded,
    System,
    Var,
    check_atom,
    eval_term,
)
from .textio import parse_assignment, parse_system, print_assignment, print_system

__all__ = [
    "Add", "Atom", "Const", "Domain", "E", "FreshVars", "Mul", "One", "Rel", "Side",
    "SizeGuardExceeded", "System", "Var", "check_atom", "eval_term",
    "parse_assignment", "parse_system", "print_assignment", "print_system",
]
