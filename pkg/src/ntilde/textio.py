"""Concrete syntax for systems and assignments.

A system file is a ``domain`` header followed by one atom per line::

    domain N>1
    z = x * y + 1          # comments run to end of line

``domain tilde`` switches to the power-circuit language, where the only
constant is ``1``, ``E(a, b)`` denotes ``a * 2**b`` and ``<=`` is allowed.
"""

from __future__ import annotations

import re
import sys
from dataclasses import dataclass
from typing import Iterable, List, Mapping, Tuple

from .core import (
    POSITIVE,
    Add,
    Assignment,
    Atom,
    Const,
    Domain,
    E,
    Mul,
    One,
    Rel,
    Side,
    System,
    Term,
    Var,
    is_valid_name,
)

# lifted witnesses routinely run to many thousands of digits
if hasattr(sys, "set_int_max_str_digits"):
    sys.set_int_max_str_digits(0)


class ParseError(ValueError):
    def __init__(self, message: str, line: int = 0, col: int = 0,
                 expected: Iterable[str] = ()):
        self.line = line
        self.col = col
        self.expected = frozenset(expected)
        where = f"line {line}, col {col}: " if line else ""
        hint = f" (expected {', '.join(sorted(self.expected))})" if self.expected else ""
        super().__init__(f"{where}{message}{hint}")


class DomainMismatch(ParseError):
    """A construct that is well-formed but illegal for the declared domain."""


class DuplicateVariable(ParseError):
    pass


# ---------------------------------------------------------------------------
# Tokens
# ---------------------------------------------------------------------------

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>[ \t\r]+)
  | (?P<num>[0-9]+)
  | (?P<ident>\$[0-9]+|[A-Za-z_][A-Za-z0-9_]*)
  | (?P<op><=|[=+*^(),])
    """,
    re.VERBOSE,
)


@dataclass(frozen=True)
class Token:
    kind: str  # "num", "ident", "op", "end"
    text: str
    col: int


def tokenize_line(text: str, lineno: int = 1) -> List[Token]:
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", lineno, pos + 1)
        if m.lastgroup != "ws":
            tokens.append(Token(m.lastgroup, m.group(), pos + 1))
        pos = m.end()
    tokens.append(Token("end", "", len(text) + 1))
    return tokens


def _strip_comment(line: str) -> str:
    return line.split("#", 1)[0]


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------


class _AtomParser:
    def __init__(self, tokens: List[Token], side: Side, lineno: int):
        self.toks = tokens
        self.i = 0
        self.side = side
        self.line = lineno

    @property
    def tok(self) -> Token:
        return self.toks[self.i]

    def fail(self, msg: str, expected: Iterable[str] = ()):
        raise ParseError(msg, self.line, self.tok.col, expected)

    def mismatch(self, what: str):
        raise DomainMismatch(f"{what} is not allowed under domain "
                             f"{'tilde' if self.side is Side.TILDE else 'N'}",
                             self.line, self.tok.col)

    def advance(self) -> Token:
        t = self.tok
        self.i += 1
        return t

    def expect(self, text: str):
        if self.tok.text != text or self.tok.kind == "end":
            self.fail(f"unexpected {self.tok.text or 'end of line'!r}", {repr(text)})
        self.advance()

    def atom(self) -> Atom:
        lhs = self.sum()
        if self.tok.text == "=":
            rel = Rel.EQ
        elif self.tok.text == "<=":
            if self.side is Side.N:
                self.mismatch("'<='")
            rel = Rel.LEQ
        else:
            self.fail(f"unexpected {self.tok.text or 'end of line'!r}",
                      {"'='", "'<='", "'+'", "'*'"} if self.side is Side.N else {"'='", "'<='", "'+'"})
        self.advance()
        rhs = self.sum()
        if self.tok.kind != "end":
            self.fail(f"unexpected {self.tok.text!r}", {"end of line", "'+'"})
        return Atom(rel, lhs, rhs)

    def sum(self) -> Term:
        t = self.product()
        while self.tok.text == "+":
            self.advance()
            t = Add(t, self.product())
        return t

    def product(self) -> Term:
        t = self.factor()
        while self.tok.text == "*":
            if self.side is Side.TILDE:
                self.mismatch("'*'")
            self.advance()
            t = Mul(t, self.factor())
        return t

    def factor(self) -> Term:
        tok = self.tok
        if tok.kind == "num":
            self.advance()
            value = int(tok.text)
            if self.side is Side.TILDE:
                if tok.text != "1":
                    self.i -= 1
                    self.mismatch(f"constant {tok.text}")
                return One()
            return Const(value)
        if tok.kind == "ident":
            if tok.text == "E":
                if self.side is Side.N:
                    self.mismatch("E(...)")
                self.advance()
                self.expect("(")
                base = self.sum()
                self.expect(",")
                exp = self.sum()
                self.expect(")")
                return E(base, exp)
            self.advance()
            v = Var(tok.text)
            if self.tok.text == "^":
                if self.side is Side.TILDE:
                    self.mismatch("'^'")
                self.advance()
                if self.tok.kind != "num":
                    self.fail(f"unexpected {self.tok.text or 'end of line'!r}", {"decimal exponent"})
                n = int(self.advance().text)
                return _power(v, n)
            return v
        if tok.text == "(":
            self.advance()
            t = self.sum()
            self.expect(")")
            return t
        self.fail(f"unexpected {tok.text or 'end of line'!r}",
                  {"constant", "identifier", "'('"} | ({"'E'"} if self.side is Side.TILDE else set()))


def _power(v: Var, n: int) -> Term:
    if n == 0:
        return Const(1)
    t: Term = v
    for _ in range(n - 1):
        t = Mul(t, v)
    return t


_HEADER_RE = re.compile(r"\s*domain\s+(N|N\s*>\s*([0-9]+)|tilde)\s*\Z")


def parse_domain(text: str, lineno: int = 1) -> Tuple[Side, Domain]:
    m = _HEADER_RE.match(f"domain {text}")
    if m is None:
        raise ParseError(f"bad domain {text.strip()!r}", lineno, 1, {"N", "N>k", "tilde"})
    if m.group(1) == "tilde":
        return Side.TILDE, POSITIVE
    if m.group(2) is not None:
        return Side.N, Domain(int(m.group(2)))
    return Side.N, Domain.naturals()


def parse_system(text: str) -> System:
    side = domain = None
    atoms = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = _strip_comment(raw)
        if not line.strip():
            continue
        if side is None:
            m = _HEADER_RE.match(line)
            if m is None:
                raise ParseError("missing domain header", lineno, 1, {"'domain'"})
            side, domain = parse_domain(line.split(None, 1)[1], lineno)
            continue
        p = _AtomParser(tokenize_line(line, lineno), side, lineno)
        atoms.append(p.atom())
    if side is None:
        raise ParseError("empty input", 1, 1, {"'domain'"})
    return System(side, tuple(atoms), domain)


def parse_term(text: str, side: Side = Side.N) -> Term:
    p = _AtomParser(tokenize_line(text), side, 1)
    t = p.sum()
    if p.tok.kind != "end":
        p.fail(f"unexpected {p.tok.text!r}", {"end of input"})
    return t


def split_documents(text: str) -> List[str]:
    """Split a concatenated report into its ``domain``-headed system texts."""
    docs: List[List[str]] = []
    for line in text.splitlines():
        if _HEADER_RE.match(_strip_comment(line)):
            docs.append([])
        if docs:
            docs[-1].append(line)
    return ["\n".join(d) + "\n" for d in docs]


# ---------------------------------------------------------------------------
# Printer
# ---------------------------------------------------------------------------


def print_term(t: Term) -> str:
    match t:
        case Var(name):
            return name
        case Const(c):
            return str(c)
        case One():
            return "1"
        case E(b, e):
            return f"E({print_term(b)}, {print_term(e)})"
        case Add(l, r):
            right = print_term(r)
            if isinstance(r, Add):
                right = f"({right})"
            return f"{print_term(l)} + {right}"
        case Mul(l, r):
            left, right = print_term(l), print_term(r)
            if isinstance(l, Add):
                left = f"({left})"
            if isinstance(r, (Add, Mul)):
                right = f"({right})"
            return f"{left} * {right}"
    raise TypeError(f"not a term: {t!r}")


def print_atom(at: Atom) -> str:
    return f"{print_term(at.lhs)} {at.rel.value} {print_term(at.rhs)}"


def print_domain(s: System) -> str:
    return "tilde" if s.side is Side.TILDE else str(s.domain)


def print_system(s: System, comments: Iterable[str] = ()) -> str:
    lines = [f"domain {print_domain(s)}"]
    lines.extend(f"# {c}" for c in comments)
    lines.extend(print_atom(at) for at in s.atoms)
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# Assignments
# ---------------------------------------------------------------------------

_ASSIGN_RE = re.compile(r"\s*(\S+?)\s*=\s*([0-9]+)\s*\Z")


def parse_assignment(text: str) -> Assignment:
    a: Assignment = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = _strip_comment(raw)
        if not line.strip():
            continue
        m = _ASSIGN_RE.match(line)
        if m is None or not is_valid_name(m.group(1)):
            raise ParseError(f"expected 'name = decimal', got {line.strip()!r}", lineno, 1)
        name = m.group(1)
        if name in a:
            raise DuplicateVariable(f"variable {name!r} assigned twice", lineno, 1)
        a[name] = int(m.group(2))
    return a


def print_assignment(a: Mapping[str, int]) -> str:
    return "".join(f"{k} = {v}\n" for k, v in a.items())
