"""Formulas of the budgeted coalition language.

Core syntax::

    f ::= p | !f | (f -> f) | [a:q, b:q, ...] f

Budgets are exact :class:`~fractions.Fraction` values.  The sugar ``&``,
``|``, ``true`` and ``false`` is expanded while parsing, so the rest of the
package only ever sees the four core node types.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterator, Mapping, Union

from .errors import FormulaError, FormulaSyntaxError
from .rational import as_rational

__all__ = [
    "Var", "Not", "Implies", "Modal", "Formula", "TOP", "BOTTOM",
    "parse", "render", "divide", "skeleton", "subformulas", "agents_of",
    "conj", "disj", "is_agent_name",
]

_NAME = re.compile(r"[A-Za-z0-9_]+\Z")


def is_agent_name(name: str) -> bool:
    return isinstance(name, str) and bool(_NAME.match(name))


@dataclass(frozen=True)
class Var:
    name: str

    def __post_init__(self):
        if not is_agent_name(self.name) or self.name.isdigit():
            raise FormulaError(f"bad propositional variable {self.name!r}", "E-SYNTAX")

    def __str__(self):
        return render(self)


@dataclass(frozen=True)
class Not:
    body: "Formula"

    def __str__(self):
        return render(self)


@dataclass(frozen=True)
class Implies:
    left: "Formula"
    right: "Formula"

    def __str__(self):
        return render(self)


@dataclass(frozen=True)
class Modal:
    """``[C]_x body``.

    ``budget`` may be given as a mapping or as pairs; it is stored as a tuple
    of ``(agent, Fraction)`` sorted by agent, which makes equality and hashing
    independent of the order agents were written in.
    """

    budget: tuple[tuple[str, Fraction], ...]
    body: "Formula"
    coalition: frozenset = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        raw = self.budget
        pairs = list(raw.items()) if isinstance(raw, Mapping) else list(raw)
        seen = set()
        norm = []
        for agent, value in pairs:
            if not is_agent_name(agent):
                raise FormulaError(f"bad agent name {agent!r}", "E-SYNTAX")
            if agent in seen:
                raise FormulaError(f"agent {agent} repeated in one modality", "E-DUP-AGENT")
            seen.add(agent)
            q = as_rational(value)
            if q < 0:
                raise FormulaError(f"negative budget {q} for agent {agent}", "E-NEG-BUDGET")
            norm.append((agent, q))
        norm.sort()
        object.__setattr__(self, "budget", tuple(norm))
        object.__setattr__(self, "coalition", frozenset(seen))

    def budget_dict(self) -> dict[str, Fraction]:
        return dict(self.budget)

    def __str__(self):
        return render(self)


Formula = Union[Var, Not, Implies, Modal]

TOP: Formula = Implies(Var("p0"), Var("p0"))
BOTTOM: Formula = Not(TOP)


def conj(f: Formula, g: Formula) -> Formula:
    return Not(Implies(f, Not(g)))


def disj(f: Formula, g: Formula) -> Formula:
    return Implies(Not(f), g)


# ---------------------------------------------------------------- printing

def _render_budget(budget) -> str:
    return "[" + ", ".join(f"{a}:{q}" for a, q in budget) + "]"


def render(f: Formula) -> str:
    if isinstance(f, Var):
        return f.name
    if isinstance(f, Not):
        return "!" + render(f.body)
    if isinstance(f, Implies):
        return f"({render(f.left)} -> {render(f.right)})"
    if isinstance(f, Modal):
        return f"{_render_budget(f.budget)} {render(f.body)}"
    raise TypeError(f"not a formula: {f!r}")


# ----------------------------------------------------------------- parsing

_TOKEN = re.compile(r"\s*(?:(->)|([!()\[\]:,/&|\-])|([A-Za-z0-9_]+))")


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    tokens = []
    pos = 0
    while True:
        while pos < len(text) and text[pos].isspace():
            pos += 1
        if pos >= len(text):
            break
        m = _TOKEN.match(text, pos)
        if m is None:
            raise FormulaSyntaxError(f"unexpected character {text[pos]!r}", pos)
        start = m.start(m.lastindex)
        if m.group(1):
            tokens.append(("->", "->", start))
        elif m.group(2):
            tokens.append((m.group(2), m.group(2), start))
        else:
            word = m.group(3)
            tokens.append(("INT" if word.isdigit() else "WORD", word, start))
        pos = m.end()
    tokens.append(("EOF", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.tokens = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.tokens[self.i]

    def take(self, kind: str, expected: str | None = None):
        tok = self.tokens[self.i]
        if tok[0] != kind:
            found = tok[1] or "end of input"
            raise FormulaSyntaxError(f"unexpected {found!r}", tok[2], expected or repr(kind))
        self.i += 1
        return tok

    def formula(self) -> Formula:
        left = self.disjunction()
        if self.peek()[0] == "->":
            self.i += 1
            return Implies(left, self.formula())
        return left

    def disjunction(self) -> Formula:
        f = self.conjunction()
        while self.peek()[0] == "|":
            self.i += 1
            f = disj(f, self.conjunction())
        return f

    def conjunction(self) -> Formula:
        f = self.unary()
        while self.peek()[0] == "&":
            self.i += 1
            f = conj(f, self.unary())
        return f

    def unary(self) -> Formula:
        kind, value, pos = self.peek()
        if kind == "!":
            self.i += 1
            return Not(self.unary())
        if kind == "[":
            budget = self.budget()
            return Modal(budget, self.unary())
        if kind == "(":
            self.i += 1
            f = self.formula()
            self.take(")", "')'")
            return f
        if kind == "WORD":
            self.i += 1
            if value == "true":
                return TOP
            if value == "false":
                return BOTTOM
            return Var(value)
        found = value or "end of input"
        raise FormulaSyntaxError(f"unexpected {found!r}", pos, "a formula")

    def budget(self) -> tuple:
        self.take("[")
        pairs = []
        seen = set()
        if self.peek()[0] == "]":
            self.i += 1
            return ()
        while True:
            kind, name, pos = self.peek()
            if kind not in ("WORD", "INT"):
                raise FormulaSyntaxError(f"unexpected {name or 'end of input'!r}", pos, "an agent name")
            self.i += 1
            if name in seen:
                raise FormulaError(f"agent {name} repeated in one modality at position {pos}",
                                   "E-DUP-AGENT")
            seen.add(name)
            self.take(":", "':'")
            pairs.append((name, self.rational()))
            if self.peek()[0] == ",":
                self.i += 1
                continue
            self.take("]", "',' or ']'")
            return tuple(pairs)

    def rational(self) -> Fraction:
        negative = False
        kind, value, pos = self.peek()
        if kind == "-":
            negative = True
            self.i += 1
        num = int(self.take("INT", "an integer")[1])
        den = 1
        if self.peek()[0] == "/":
            self.i += 1
            kind, value, dpos = self.take("INT", "a positive integer")
            den = int(value)
            if den == 0:
                raise FormulaSyntaxError("zero denominator", dpos, "a positive integer")
        q = Fraction(-num if negative else num, den)
        if q < 0:
            raise FormulaError(f"negative budget {q} at position {pos}", "E-NEG-BUDGET")
        return q


def parse(text: str) -> Formula:
    """Parse concrete syntax into a :data:`Formula`.

    ``->`` associates to the right; ``&`` binds tighter than ``|`` which binds
    tighter than ``->``.  ``[]`` denotes the empty coalition.
    """
    p = _Parser(text)
    f = p.formula()
    p.take("EOF", "end of input")
    return f


# ---------------------------------------------------------------- algebra

def divide(f: Formula, mu) -> Formula:
    """Rescale every budget in ``f`` by ``1/mu`` (exactly)."""
    mu = as_rational(mu)
    if mu <= 0:
        raise FormulaError(f"scale must be positive, got {mu}", "E-NONPOS-SCALE")
    if mu == 1:
        return f
    return _divide(f, mu)


def _divide(f: Formula, mu: Fraction) -> Formula:
    if isinstance(f, Var):
        return f
    if isinstance(f, Not):
        return Not(_divide(f.body, mu))
    if isinstance(f, Implies):
        return Implies(_divide(f.left, mu), _divide(f.right, mu))
    return Modal(tuple((a, q / mu) for a, q in f.budget), _divide(f.body, mu))


def skeleton(f: Formula):
    """``f`` with budgets erased (coalitions kept)."""
    if isinstance(f, Var):
        return f.name
    if isinstance(f, Not):
        return ("!", skeleton(f.body))
    if isinstance(f, Implies):
        return ("->", skeleton(f.left), skeleton(f.right))
    return ("[]", tuple(a for a, _ in f.budget), skeleton(f.body))


def subformulas(f: Formula) -> Iterator[Formula]:
    yield f
    if isinstance(f, Not):
        yield from subformulas(f.body)
    elif isinstance(f, Implies):
        yield from subformulas(f.left)
        yield from subformulas(f.right)
    elif isinstance(f, Modal):
        yield from subformulas(f.body)


def agents_of(f: Formula) -> set[str]:
    return {a for g in subformulas(f) if isinstance(g, Modal) for a, _ in g.budget}
