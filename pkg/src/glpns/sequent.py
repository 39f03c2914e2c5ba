"""Nested sequents: trees of formula multisets with indexed children.

A sequent node holds a multiset of items (formulas, or annotated formulas of
the form <<i>>B used by the annotated calculus) and a list of indexed child
sequents.  Children carry stable identifiers assigned at construction, so a
node address (a NodePath of identifiers) survives sibling reordering and
content edits, and is invalidated only by deleting the node it names.

Equality and hashing are canonical: order of items and children is
irrelevant, multiplicity matters.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Callable, Iterable, Iterator, Union

from .formula import (
    BOT,
    Box,
    Dia,
    Formula,
    Or,
    ParseError,
    parse as parse_formula,
    to_text,
)

_fresh = itertools.count(1)


def fresh_id() -> int:
    return next(_fresh)


@dataclass(frozen=True)
class Ann:
    """An annotated diamond occurrence <<i>>B: traced, barred from eucl."""

    index: int
    body: Formula

    def __str__(self) -> str:
        return f"<<{self.index}>>{to_text(self.body)}"


Item = Union[Formula, Ann]

NodePath = tuple[int, ...]

ROOT: NodePath = ()


def item_text(it: Item) -> str:
    return str(it) if isinstance(it, Ann) else to_text(it)


class PathError(KeyError):
    """A NodePath does not resolve in the given sequent."""


@dataclass(frozen=True)
class Child:
    index: int
    node_id: int
    seq: "NestedSequent"


@dataclass(frozen=True, eq=False)
class NestedSequent:
    formulas: tuple[Item, ...]
    children: tuple[Child, ...]

    # canonical key is cached on first use; initialization is idempotent so
    # concurrent computation is harmless
    def ckey(self) -> str:
        key = self.__dict__.get("_ckey")
        if key is None:
            key = canonical_text(self)
            object.__setattr__(self, "_ckey", key)
        return key

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, NestedSequent):
            return NotImplemented
        return self.ckey() == other.ckey()

    def __hash__(self) -> int:
        return hash(self.ckey())

    def __str__(self) -> str:
        return self.ckey()

    def is_empty(self) -> bool:
        return not self.formulas and not self.children


EMPTY = NestedSequent((), ())


def make(formulas: Iterable[Item] = (), children: Iterable[Child] = ()) -> NestedSequent:
    return NestedSequent(tuple(formulas), tuple(children))


def child(index: int, s: NestedSequent) -> Child:
    return Child(index, fresh_id(), s)


def seq(*parts) -> NestedSequent:
    """Convenience constructor: formulas, Ann items, Child values, or
    (index, NestedSequent) pairs for fresh children."""
    formulas: list[Item] = []
    children: list[Child] = []
    for p in parts:
        if isinstance(p, Child):
            children.append(p)
        elif isinstance(p, tuple):
            i, s = p
            children.append(child(i, s))
        else:
            formulas.append(p)
    return make(formulas, children)


# --- canonical form ---------------------------------------------------------


def canonical_text(s: NestedSequent) -> str:
    parts = sorted(item_text(f) for f in s.formulas)
    kids = sorted((c.index, c.seq.ckey()) for c in s.children)
    parts.extend(f"({i}: {k})" for i, k in kids)
    return ", ".join(parts)


def canonical_children(s: NestedSequent) -> list[Child]:
    return sorted(s.children, key=lambda c: (c.index, c.seq.ckey()))


def canonical_items(s: NestedSequent) -> list[Item]:
    return sorted(s.formulas, key=item_text)


def item_counts(s: NestedSequent) -> dict[str, int]:
    out: dict[str, int] = {}
    for f in s.formulas:
        k = item_text(f)
        out[k] = out.get(k, 0) + 1
    return out


# --- node addressing --------------------------------------------------------


def find_node(s: NestedSequent, path: NodePath) -> NestedSequent:
    node = s
    for nid in path:
        for c in node.children:
            if c.node_id == nid:
                node = c.seq
                break
        else:
            raise PathError(f"stale path {path!r}: no child {nid}")
    return node


def find_child(s: NestedSequent, path: NodePath) -> Child:
    if not path:
        raise PathError("the root is not a child")
    parent = find_node(s, path[:-1])
    for c in parent.children:
        if c.node_id == path[-1]:
            return c
    raise PathError(f"stale path {path!r}: no child {path[-1]}")


def has_node(s: NestedSequent, path: NodePath) -> bool:
    try:
        find_node(s, path)
        return True
    except PathError:
        return False


def all_paths(s: NestedSequent, prefix: NodePath = ()) -> Iterator[tuple[NodePath, NestedSequent]]:
    """All (path, node) pairs in preorder, children in stored order."""
    yield prefix, s
    for c in s.children:
        yield from all_paths(c.seq, prefix + (c.node_id,))


def replace_node(s: NestedSequent, path: NodePath, fn: Callable[[NestedSequent], NestedSequent]) -> NestedSequent:
    if not path:
        return fn(s)
    nid, rest = path[0], path[1:]
    kids = []
    hit = False
    for c in s.children:
        if c.node_id == nid:
            kids.append(Child(c.index, c.node_id, replace_node(c.seq, rest, fn)))
            hit = True
        else:
            kids.append(c)
    if not hit:
        raise PathError(f"stale path {path!r}: no child {nid}")
    return NestedSequent(s.formulas, tuple(kids))


def insert_at(
    s: NestedSequent,
    path: NodePath,
    formulas: Iterable[Item] = (),
    children: Iterable[Child] = (),
) -> NestedSequent:
    formulas = tuple(formulas)
    children = tuple(children)

    def go(node: NestedSequent) -> NestedSequent:
        return NestedSequent(node.formulas + formulas, node.children + children)

    return replace_node(s, path, go)


def merge_into(s: NestedSequent, path: NodePath, delta: NestedSequent) -> NestedSequent:
    """Merge delta's items and children into the node at path."""
    return insert_at(s, path, delta.formulas, delta.children)


def remove_at(s: NestedSequent, path: NodePath, item: Item, count: int = 1) -> NestedSequent:
    """Remove `count` occurrences of item (canonical matching) at a node."""
    key = item_text(item)

    def go(node: NestedSequent) -> NestedSequent:
        left = count
        out = []
        for f in node.formulas:
            if left and item_text(f) == key:
                left -= 1
            else:
                out.append(f)
        if left:
            raise PathError(f"no occurrence of {key!r} at {path!r}")
        return NestedSequent(tuple(out), node.children)

    return replace_node(s, path, go)


def remove_child(s: NestedSequent, path: NodePath) -> NestedSequent:
    if not path:
        raise PathError("cannot remove the root")
    nid = path[-1]

    def go(node: NestedSequent) -> NestedSequent:
        kids = tuple(c for c in node.children if c.node_id != nid)
        if len(kids) == len(node.children):
            raise PathError(f"stale path {path!r}: no child {nid}")
        return NestedSequent(node.formulas, kids)

    return replace_node(s, path[:-1], go)


def relabel_child(s: NestedSequent, path: NodePath, new_index: int) -> NestedSequent:
    if not path:
        raise PathError("cannot relabel the root")
    nid = path[-1]

    def go(node: NestedSequent) -> NestedSequent:
        kids = tuple(
            Child(new_index, c.node_id, c.seq) if c.node_id == nid else c
            for c in node.children
        )
        return NestedSequent(node.formulas, kids)

    return replace_node(s, path[:-1], go)


def height(s: NestedSequent) -> int:
    """Length of the longest root-to-leaf branch (edge count)."""
    if not s.children:
        return 0
    return 1 + max(height(c.seq) for c in s.children)


def node_count(s: NestedSequent) -> int:
    return 1 + sum(node_count(c.seq) for c in s.children)


def edge_labels(s: NestedSequent, path: NodePath) -> list[int]:
    """Labels of the edges along a root-based path, outermost first."""
    labels = []
    node = s
    for nid in path:
        for c in node.children:
            if c.node_id == nid:
                labels.append(c.index)
                node = c.seq
                break
        else:
            raise PathError(f"stale path {path!r}")
    return labels


def is_i_path(tree: NestedSequent, frm: NodePath, to: NodePath, i: int, strict: bool = False) -> bool:
    """True iff the unique tree path from `frm` to `to` ascends only through
    edges labelled > i and then descends only through edges labelled >= i.
    Strict requires no ascent (frm is an ancestor of `to` or equal)."""
    labels_from = edge_labels(tree, frm)
    labels_to = edge_labels(tree, to)
    k = 0
    while k < len(frm) and k < len(to) and frm[k] == to[k]:
        k += 1
    ascent = labels_from[k:]
    descent = labels_to[k:]
    if strict and ascent:
        return False
    return all(j > i for j in ascent) and all(j >= i for j in descent)


# --- interpretation ---------------------------------------------------------


class AnnotationError(ValueError):
    """An operation that requires plain formulas met an annotated one."""


def interpret(s: NestedSequent) -> Formula:
    """The formula reading: bottom if empty, else the disjunction of the
    items and boxed child interpretations, in canonical order."""
    parts: list[Formula] = []
    for f in canonical_items(s):
        if isinstance(f, Ann):
            raise AnnotationError(f"annotated formula {f} has no interpretation")
        parts.append(f)
    for c in canonical_children(s):
        parts.append(Box(c.index, interpret(c.seq)))
    if not parts:
        return BOT
    acc = parts[0]
    for p in parts[1:]:
        acc = Or(acc, p)
    return acc


def has_annotations(s: NestedSequent) -> bool:
    return any(isinstance(f, Ann) for f in s.formulas) or any(
        has_annotations(c.seq) for c in s.children
    )


# --- contexts ----------------------------------------------------------------


@dataclass(frozen=True)
class Context:
    """A sequent with hole positions; each hole takes the place of a formula
    at its node, so filling merges content into the host node."""

    skeleton: NestedSequent
    holes: tuple[NodePath, ...]

    def __post_init__(self):
        if not self.holes:
            raise ValueError("a context needs at least one hole")
        for h in self.holes:
            find_node(self.skeleton, h)


def fill(ctx: Context, contents: list[NestedSequent]) -> NestedSequent:
    if len(contents) != len(ctx.holes):
        raise ValueError(f"{len(ctx.holes)} holes but {len(contents)} contents")
    out = ctx.skeleton
    for h, delta in zip(ctx.holes, contents):
        out = merge_into(out, h, delta)
    return out


def fill_formulas(ctx: Context, items: list[Item | None]) -> NestedSequent:
    """Fill each hole with a single item (None for the empty sequent)."""
    return fill(ctx, [EMPTY if it is None else make((it,)) for it in items])


# --- canonical relocation ----------------------------------------------------

CanonAddr = tuple[tuple[int, str, int], ...]


def canon_address(s: NestedSequent, path: NodePath) -> CanonAddr:
    """Identifier-free address: per level (index, child key, rank among
    equal-keyed siblings in stored order)."""
    addr = []
    node = s
    for nid in path:
        rank = 0
        hit = None
        for c in node.children:
            if c.node_id == nid:
                hit = c
                break
        if hit is None:
            raise PathError(f"stale path {path!r}")
        key = (hit.index, hit.seq.ckey())
        for c in node.children:
            if c.node_id == nid:
                break
            if (c.index, c.seq.ckey()) == key:
                rank += 1
        addr.append((hit.index, key[1], rank))
        node = hit.seq
    return tuple(addr)


def resolve_address(s: NestedSequent, addr: CanonAddr) -> NodePath:
    path: list[int] = []
    node = s
    for index, key, rank in addr:
        seen = 0
        hit = None
        for c in node.children:
            if c.index == index and c.seq.ckey() == key:
                if seen == rank:
                    hit = c
                    break
                seen += 1
        if hit is None:
            raise PathError(f"address {addr!r} does not resolve")
        path.append(hit.node_id)
        node = hit.seq
    return tuple(path)


def relocate(path: NodePath, src: NestedSequent, dst: NestedSequent) -> NodePath:
    """Map a node path between canonically equal sequents."""
    if not path:
        return ()
    return resolve_address(dst, canon_address(src, path))


# --- positional path encoding (serialization) -------------------------------


def path_to_positions(s: NestedSequent, path: NodePath) -> list[int]:
    """Encode a path as positions into the canonical child ordering."""
    out = []
    node = s
    for nid in path:
        kids = canonical_children(node)
        for k, c in enumerate(kids):
            if c.node_id == nid:
                out.append(k)
                node = c.seq
                break
        else:
            raise PathError(f"stale path {path!r}")
    return out


def positions_to_path(s: NestedSequent, positions: list[int]) -> NodePath:
    path = []
    node = s
    for k in positions:
        kids = canonical_children(node)
        if not 0 <= k < len(kids):
            raise PathError(f"position {k} out of range")
        path.append(kids[k].node_id)
        node = kids[k].seq
    return tuple(path)


# --- set-semantics normalization ---------------------------------------------


def setnorm(s: NestedSequent) -> NestedSequent:
    """Deduplicate items and (recursively) identical same-label children,
    keeping the first representative of each class."""
    seen: set[str] = set()
    items = []
    for f in s.formulas:
        k = item_text(f)
        if k not in seen:
            seen.add(k)
            items.append(f)
    kids = []
    kidkeys: set[tuple[int, str]] = set()
    for c in s.children:
        sub = setnorm(c.seq)
        k = (c.index, sub.ckey())
        if k not in kidkeys:
            kidkeys.add(k)
            kids.append(Child(c.index, c.node_id, sub))
    return NestedSequent(tuple(items), tuple(kids))


# --- parsing -----------------------------------------------------------------


def parse_sequent(text: str) -> NestedSequent:
    """Parse the comma-separated sequent format, e.g. "p, (0: q, (1: r))"."""
    items, pos = _parse_seq_body(text, 0)
    while pos < len(text) and text[pos].isspace():
        pos += 1
    if pos != len(text):
        raise ParseError("unexpected trailing input", pos)
    return items


def _parse_seq_body(text: str, pos: int) -> tuple[NestedSequent, int]:
    formulas: list[Item] = []
    children: list[Child] = []
    n = len(text)

    def skip(p: int) -> int:
        while p < n and text[p].isspace():
            p += 1
        return p

    pos = skip(pos)
    if pos >= n or text[pos] == ")":
        return make(), pos
    while True:
        pos = skip(pos)
        if pos < n and text[pos] == "(" and _looks_like_child(text, pos):
            i, inner, pos = _parse_child(text, pos)
            children.append(child(i, inner))
        else:
            start = pos
            depth = 0
            while pos < n:
                ch = text[pos]
                if ch == "(":
                    depth += 1
                elif ch == ")":
                    if depth == 0:
                        break
                    depth -= 1
                elif ch == "," and depth == 0:
                    break
                pos += 1
            chunk = text[start:pos].strip()
            if not chunk:
                raise ParseError("empty sequent item", start)
            formulas.append(_parse_item(chunk, start))
        pos = skip(pos)
        if pos < n and text[pos] == ",":
            pos += 1
            continue
        break
    return make(formulas, children), pos


def _looks_like_child(text: str, pos: int) -> bool:
    p = pos + 1
    n = len(text)
    while p < n and text[p].isspace():
        p += 1
    start = p
    while p < n and text[p].isdigit():
        p += 1
    if p == start:
        return False
    while p < n and text[p].isspace():
        p += 1
    return p < n and text[p] == ":"


def _parse_child(text: str, pos: int) -> tuple[int, NestedSequent, int]:
    assert text[pos] == "("
    pos += 1
    n = len(text)
    while pos < n and text[pos].isspace():
        pos += 1
    start = pos
    while pos < n and text[pos].isdigit():
        pos += 1
    index = int(text[start:pos])
    while pos < n and text[pos].isspace():
        pos += 1
    if pos >= n or text[pos] != ":":
        raise ParseError("expected ':' in boxed child", pos)
    pos += 1
    inner, pos = _parse_seq_body(text, pos)
    while pos < n and text[pos].isspace():
        pos += 1
    if pos >= n or text[pos] != ")":
        raise ParseError("expected ')' closing boxed child", pos)
    return index, inner, pos + 1


def _parse_item(chunk: str, offset: int) -> Item:
    if chunk.startswith("<<"):
        close = chunk.find(">>")
        if close < 0:
            raise ParseError("unterminated annotation", offset)
        digits = chunk[2:close].strip()
        if not digits.isdigit():
            raise ParseError("bad annotation index", offset)
        return Ann(int(digits), parse_formula(chunk[close + 2 :]))
    return parse_formula(chunk)
