"""Formulas of the intuitionistic modal language.

Formulas are immutable, hashable trees.  Negation, biconditional and ``true``
are sugar and are expanded by the parser, so the AST only has the seven
primitive shapes below.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Dict, Iterator, List, Optional


class Formula:
    __slots__ = ()

    def children(self) -> tuple:
        return ()

    def __str__(self) -> str:
        return to_text(self)


@dataclass(frozen=True)
class Var(Formula):
    name: str

    def __repr__(self):
        return f"Var({self.name!r})"


@dataclass(frozen=True)
class Bottom(Formula):
    def __repr__(self):
        return "Bottom()"


@dataclass(frozen=True)
class And(Formula):
    left: Formula
    right: Formula

    def children(self):
        return (self.left, self.right)


@dataclass(frozen=True)
class Or(Formula):
    left: Formula
    right: Formula

    def children(self):
        return (self.left, self.right)


@dataclass(frozen=True)
class Implies(Formula):
    left: Formula
    right: Formula

    def children(self):
        return (self.left, self.right)


@dataclass(frozen=True)
class Dia(Formula):
    arg: Formula

    def children(self):
        return (self.arg,)


@dataclass(frozen=True)
class Box(Formula):
    arg: Formula

    def children(self):
        return (self.arg,)


BOTTOM = Bottom()
TOP = Implies(BOTTOM, BOTTOM)


def neg(f: Formula) -> Formula:
    return Implies(f, BOTTOM)


def iff(a: Formula, b: Formula) -> Formula:
    return And(Implies(a, b), Implies(b, a))


# ---------------------------------------------------------------- parsing

class FormulaSyntaxError(ValueError):
    """Raised on malformed input; ``column`` is 1-based."""

    def __init__(self, message: str, column: int):
        super().__init__(f"syntax error at column {column}: {message}")
        self.column = column


_TOKEN_RE = re.compile(
    r"\s*(?:(?P<arrow><->|->)|(?P<box>\[\])|(?P<dia><>)"
    r"|(?P<ident>[a-z][a-z0-9_]*)|(?P<sym>[~&|()]))"
)
_KEYWORDS = {"true", "false"}


def _tokenize(text: str) -> List[tuple]:
    tokens = []
    pos = 0
    while pos < len(text):
        if text[pos:].strip() == "":
            break
        m = _TOKEN_RE.match(text, pos)
        if m is None or m.end() == pos:
            col = pos + 1 + (len(text[pos:]) - len(text[pos:].lstrip()))
            raise FormulaSyntaxError(f"unexpected character {text[col - 1]!r}", col)
        kind = m.lastgroup
        value = m.group(kind)
        tokens.append((kind, value, m.start(kind) + 1))
        pos = m.end()
    tokens.append(("end", "", len(text) + 1))
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.tokens = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.tokens[self.i]

    def take(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect(self, value):
        kind, v, col = self.take()
        if v != value:
            found = "end of input" if kind == "end" else repr(v)
            raise FormulaSyntaxError(f"expected {value!r}, found {found}", col)

    def parse(self) -> Formula:
        f = self.implication()
        kind, v, col = self.peek()
        if kind != "end":
            raise FormulaSyntaxError(f"unexpected {v!r}", col)
        return f

    # implication level: '->' right-assoc, '<->' non-associative
    def implication(self) -> Formula:
        left = self.disjunction()
        kind, v, col = self.peek()
        if v == "->":
            self.take()
            right = self.implication()
            return Implies(left, right)
        if v == "<->":
            self.take()
            right = self.disjunction()
            nk, nv, ncol = self.peek()
            if nv in ("<->", "->"):
                raise FormulaSyntaxError(
                    "'<->' cannot be chained with '<->' or '->' without parentheses", ncol)
            return iff(left, right)
        return left

    def disjunction(self) -> Formula:
        f = self.conjunction()
        while self.peek()[1] == "|":
            self.take()
            f = Or(f, self.conjunction())
        return f

    def conjunction(self) -> Formula:
        f = self.prefix()
        while self.peek()[1] == "&":
            self.take()
            f = And(f, self.prefix())
        return f

    def prefix(self) -> Formula:
        kind, v, col = self.take()
        if v == "~":
            return neg(self.prefix())
        if kind == "box":
            return Box(self.prefix())
        if kind == "dia":
            return Dia(self.prefix())
        if v == "(":
            f = self.implication()
            self.expect(")")
            return f
        if kind == "ident":
            if v == "false":
                return BOTTOM
            if v == "true":
                return TOP
            return Var(v)
        found = "end of input" if kind == "end" else repr(v)
        raise FormulaSyntaxError(f"expected a formula, found {found}", col)


def parse(text: str) -> Formula:
    """Parse ASCII formula syntax into a desugared AST.

    >>> parse("[]p -> p")
    Implies(left=Box(arg=Var('p')), right=Var('p'))
    """
    return _Parser(text).parse()


# ---------------------------------------------------------------- printing

_PREC = {Implies: 1, Or: 2, And: 3}


def to_text(f: Formula) -> str:
    """Print with minimal parentheses; ``parse(to_text(f)) == f``."""
    if isinstance(f, Var):
        return f.name
    if isinstance(f, Bottom):
        return "false"
    if isinstance(f, Box):
        return "[]" + _atomic_text(f.arg)
    if isinstance(f, Dia):
        return "<>" + _atomic_text(f.arg)
    if isinstance(f, Implies):
        left = to_text(f.left)
        if isinstance(f.left, Implies):
            left = f"({left})"
        return f"{left} -> {to_text(f.right)}"
    op = " & " if isinstance(f, And) else " | "
    prec = _PREC[type(f)]
    left, right = to_text(f.left), to_text(f.right)
    # & and | parse left-assoc, so a same-precedence right child needs parens
    if _PREC.get(type(f.left), 9) < prec:
        left = f"({left})"
    if _PREC.get(type(f.right), 9) <= prec:
        right = f"({right})"
    return left + op + right


def _atomic_text(f: Formula) -> str:
    s = to_text(f)
    if isinstance(f, (And, Or, Implies)):
        return f"({s})"
    return s


# ---------------------------------------------------------------- structure

def subformula_closure(f: Formula) -> List[Formula]:
    """Subformulas of ``f`` in post-order of first occurrence.

    Every prefix of the result is itself closed under subformulas.
    """
    seen = set()
    out: List[Formula] = []

    def visit(g):
        if g in seen:
            return
        for c in g.children():
            visit(c)
        seen.add(g)
        out.append(g)

    visit(f)
    return out


def closure_of_all(fs) -> List[Formula]:
    seen = set()
    out = []
    for f in fs:
        for g in subformula_closure(f):
            if g not in seen:
                seen.add(g)
                out.append(g)
    return out


def is_subformula_closed(sigma) -> bool:
    s = set(sigma)
    return all(c in s for g in s for c in g.children())


def variables(f: Formula) -> List[str]:
    """Variable names in order of first occurrence."""
    return [g.name for g in subformula_closure(f) if isinstance(g, Var)]


def size(f: Formula) -> int:
    return 1 + sum(size(c) for c in f.children())


def depth(f: Formula) -> int:
    return 1 + max((depth(c) for c in f.children()), default=-1)


def iter_nodes(f: Formula) -> Iterator[Formula]:
    yield f
    for c in f.children():
        yield from iter_nodes(c)


def _rebuild(f: Formula, kids) -> Formula:
    if isinstance(f, (And, Or, Implies)):
        return type(f)(kids[0], kids[1])
    return type(f)(kids[0])


def substitute(schema: Formula, sigma: Dict[str, Formula]) -> Formula:
    """Simultaneously replace variables of ``schema`` by ``sigma``'s images."""
    if not sigma:
        return schema
    if isinstance(schema, Var):
        return sigma.get(schema.name, schema)
    kids = schema.children()
    if not kids:
        return schema
    return _rebuild(schema, [substitute(k, sigma) for k in kids])


def match_schema(schema: Formula, candidate: Formula) -> Optional[Dict[str, Formula]]:
    """One-way matching: find σ with ``substitute(schema, σ) == candidate``."""
    sigma: Dict[str, Formula] = {}
    stack = [(schema, candidate)]
    while stack:
        s, c = stack.pop()
        if isinstance(s, Var):
            bound = sigma.get(s.name)
            if bound is None:
                sigma[s.name] = c
            elif bound != c:
                return None
            continue
        if type(s) is not type(c):
            return None
        stack.extend(zip(s.children(), c.children()))
    return sigma


def modal_atoms(f: Formula) -> List[Formula]:
    """Maximal modal subformulas (``[]g``/``<>g`` not under another modality)."""
    out = []
    if isinstance(f, (Box, Dia)):
        return [f]
    for c in f.children():
        for g in modal_atoms(c):
            if g not in out:
                out.append(g)
    return out


def big_and(fs) -> Formula:
    """Right-folded conjunction; the empty conjunction is ``true``."""
    fs = list(fs)
    if not fs:
        return TOP
    out = fs[-1]
    for g in reversed(fs[:-1]):
        out = And(g, out)
    return out


def big_or(fs) -> Formula:
    """Right-folded disjunction; the empty disjunction is ``false``."""
    fs = list(fs)
    if not fs:
        return BOTTOM
    out = fs[-1]
    for g in reversed(fs[:-1]):
        out = Or(g, out)
    return out
