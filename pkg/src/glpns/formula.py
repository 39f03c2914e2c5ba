"""Formulas of polymodal provability logic in negation normal form.

The grammar has atoms and their complements, top/bottom, binary and/or, and
indexed modalities [i] / <i> for every natural number i.  Negation exists only
on atoms; `negate` pushes a general negation inward, and the parser eliminates
the surface connectives `~`, `->`, `<->` at parse time, so everything past the
parser is NNF.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Iterator, Union

MAX_INDEX_DIGITS = 9


@dataclass(frozen=True)
class Atom:
    name: str

    def __str__(self) -> str:
        return to_text(self)


@dataclass(frozen=True)
class NegAtom:
    name: str

    def __str__(self) -> str:
        return to_text(self)


@dataclass(frozen=True)
class Top:
    def __str__(self) -> str:
        return "T"


@dataclass(frozen=True)
class Bot:
    def __str__(self) -> str:
        return "F"


@dataclass(frozen=True)
class And:
    left: "Formula"
    right: "Formula"

    def __str__(self) -> str:
        return to_text(self)


@dataclass(frozen=True)
class Or:
    left: "Formula"
    right: "Formula"

    def __str__(self) -> str:
        return to_text(self)


@dataclass(frozen=True)
class Box:
    index: int
    body: "Formula"

    def __str__(self) -> str:
        return to_text(self)


@dataclass(frozen=True)
class Dia:
    index: int
    body: "Formula"

    def __str__(self) -> str:
        return to_text(self)


Formula = Union[Atom, NegAtom, Top, Bot, And, Or, Box, Dia]

TOP = Top()
BOT = Bot()


class ParseError(ValueError):
    """Raised on malformed formula or sequent text; carries the offset."""

    def __init__(self, message: str, pos: int):
        super().__init__(f"{message} (at position {pos})")
        self.pos = pos


def negate(a: Formula) -> Formula:
    """Dual of a formula, pushing negation to the atoms."""
    if isinstance(a, Atom):
        return NegAtom(a.name)
    if isinstance(a, NegAtom):
        return Atom(a.name)
    if isinstance(a, Top):
        return BOT
    if isinstance(a, Bot):
        return TOP
    if isinstance(a, And):
        return Or(negate(a.left), negate(a.right))
    if isinstance(a, Or):
        return And(negate(a.left), negate(a.right))
    if isinstance(a, Box):
        return Dia(a.index, negate(a.body))
    if isinstance(a, Dia):
        return Box(a.index, negate(a.body))
    raise TypeError(f"not a formula: {a!r}")


@lru_cache(maxsize=None)
def complexity(a: Formula) -> int:
    if isinstance(a, (Atom, NegAtom, Top, Bot)):
        return 1
    if isinstance(a, (Box, Dia)):
        return complexity(a.body) + 1
    if isinstance(a, (And, Or)):
        return max(complexity(a.left), complexity(a.right)) + 1
    raise TypeError(f"not a formula: {a!r}")


@lru_cache(maxsize=None)
def max_modality(a: Formula) -> int:
    """Largest modality index occurring in the formula, -1 if none."""
    if isinstance(a, (Atom, NegAtom, Top, Bot)):
        return -1
    if isinstance(a, (Box, Dia)):
        return max(a.index, max_modality(a.body))
    if isinstance(a, (And, Or)):
        return max(max_modality(a.left), max_modality(a.right))
    raise TypeError(f"not a formula: {a!r}")


def subformulas(a: Formula) -> Iterator[Formula]:
    """All subformulas including the formula itself (with repeats)."""
    yield a
    if isinstance(a, (Box, Dia)):
        yield from subformulas(a.body)
    elif isinstance(a, (And, Or)):
        yield from subformulas(a.left)
        yield from subformulas(a.right)


def proper_subformulas(a: Formula) -> set[Formula]:
    out = set(subformulas(a))
    out.discard(a)
    return out


def implies(a: Formula, b: Formula) -> Formula:
    return Or(negate(a), b)


def conj(parts: list[Formula]) -> Formula:
    """Left-associated conjunction; empty conjunction is T."""
    if not parts:
        return TOP
    acc = parts[0]
    for p in parts[1:]:
        acc = And(acc, p)
    return acc


def disj(parts: list[Formula]) -> Formula:
    if not parts:
        return BOT
    acc = parts[0]
    for p in parts[1:]:
        acc = Or(acc, p)
    return acc


# --- adequate sets ---------------------------------------------------------


@dataclass(frozen=True)
class AdequateSet:
    """Finite formula set closed under subformulas and negation."""

    formulas: frozenset[Formula]

    def __contains__(self, a: Formula) -> bool:
        return a in self.formulas

    def __iter__(self) -> Iterator[Formula]:
        return iter(self.formulas)

    def __len__(self) -> int:
        return len(self.formulas)

    def __or__(self, other: "AdequateSet") -> "AdequateSet":
        return AdequateSet(self.formulas | other.formulas)


def adequate_closure(seed) -> AdequateSet:
    """Smallest adequate set containing the seed formulas."""
    todo = list(seed)
    out: set[Formula] = set()
    while todo:
        a = todo.pop()
        if a in out:
            continue
        out.add(a)
        todo.append(negate(a))
        if isinstance(a, (Box, Dia)):
            todo.append(a.body)
        elif isinstance(a, (And, Or)):
            todo.append(a.left)
            todo.append(a.right)
    return AdequateSet(frozenset(out))


def cut_closure(a: Formula) -> AdequateSet:
    """The adequate set generated by the proper subformulas of a formula.

    Every member has complexity strictly below the generator's, which is what
    drives the induction of the cut-elimination theorem.
    """
    return adequate_closure(proper_subformulas(a))


def full_closure(a: Formula) -> AdequateSet:
    return adequate_closure({a})


# --- printing --------------------------------------------------------------


def to_text(a: Formula) -> str:
    """Canonical fully-parenthesized NNF text; `parse` round-trips it."""
    if isinstance(a, Atom):
        return a.name
    if isinstance(a, NegAtom):
        return "~" + a.name
    if isinstance(a, Top):
        return "T"
    if isinstance(a, Bot):
        return "F"
    if isinstance(a, And):
        return f"({to_text(a.left)} & {to_text(a.right)})"
    if isinstance(a, Or):
        return f"({to_text(a.left)} | {to_text(a.right)})"
    if isinstance(a, Box):
        return f"[{a.index}]{to_text(a.body)}"
    if isinstance(a, Dia):
        return f"<{a.index}>{to_text(a.body)}"
    raise TypeError(f"not a formula: {a!r}")


# --- parsing ---------------------------------------------------------------


class _Scanner:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0

    def skip_ws(self) -> None:
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def peek(self) -> str:
        self.skip_ws()
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def startswith(self, s: str) -> bool:
        self.skip_ws()
        return self.text.startswith(s, self.pos)

    def take(self, s: str) -> bool:
        if self.startswith(s):
            self.pos += len(s)
            return True
        return False

    def expect(self, s: str) -> None:
        if not self.take(s):
            raise ParseError(f"expected {s!r}", self.pos)

    def nat(self) -> int:
        self.skip_ws()
        start = self.pos
        while self.pos < len(self.text) and self.text[self.pos].isdigit():
            self.pos += 1
        if self.pos == start:
            raise ParseError("expected a modality index", start)
        if self.pos - start > MAX_INDEX_DIGITS:
            raise ParseError("modality index too large", start)
        return int(self.text[start : self.pos])

    def ident(self) -> str:
        self.skip_ws()
        start = self.pos
        while self.pos < len(self.text) and (
            self.text[self.pos].isalnum() or self.text[self.pos] == "_"
        ):
            self.pos += 1
        if self.pos == start:
            raise ParseError("expected a formula", start)
        return self.text[start : self.pos]


def _parse_unary(sc: _Scanner) -> Formula:
    if sc.take("~"):
        return negate(_parse_unary(sc))
    if sc.take("["):
        i = sc.nat()
        sc.expect("]")
        return Box(i, _parse_unary(sc))
    if sc.take("<"):
        i = sc.nat()
        sc.expect(">")
        return Dia(i, _parse_unary(sc))
    if sc.take("("):
        a = _parse_iff(sc)
        sc.expect(")")
        return a
    name = sc.ident()
    if name == "T":
        return TOP
    if name == "F":
        return BOT
    return Atom(name)


def _parse_and(sc: _Scanner) -> Formula:
    a = _parse_unary(sc)
    while sc.peek() == "&":
        sc.take("&")
        a = And(a, _parse_unary(sc))
    return a


def _parse_or(sc: _Scanner) -> Formula:
    a = _parse_and(sc)
    while sc.peek() == "|":
        sc.take("|")
        a = Or(a, _parse_and(sc))
    return a


def _parse_imp(sc: _Scanner) -> Formula:
    a = _parse_or(sc)
    if sc.startswith("->"):
        sc.take("->")
        return implies(a, _parse_imp(sc))
    return a


def _parse_iff(sc: _Scanner) -> Formula:
    a = _parse_imp(sc)
    if sc.startswith("<->"):
        sc.take("<->")
        b = _parse_iff(sc)
        return And(implies(a, b), implies(b, a))
    return a


def parse(text: str) -> Formula:
    """Parse surface syntax (with ~, ->, <->) into an NNF formula."""
    sc = _Scanner(text)
    a = _parse_iff(sc)
    sc.skip_ws()
    if sc.pos != len(sc.text):
        raise ParseError("unexpected trailing input", sc.pos)
    return a
