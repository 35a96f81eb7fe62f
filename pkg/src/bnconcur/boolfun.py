"""Boolean expressions: parsing, printing, evaluation and prime-implicant DNF.

Component indices are 0-based throughout the library; the textual
rendering of a configuration still puts component 0 leftmost.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from itertools import combinations
from typing import Callable, Mapping, Sequence

from .errors import DimensionError, ParseError

MAX_EXHAUSTIVE_DIM = 20


# --------------------------------------------------------------------------
# AST
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class Var:
    index: int


@dataclass(frozen=True)
class Const:
    value: int


@dataclass(frozen=True)
class Not:
    child: "BoolExpr"


@dataclass(frozen=True)
class And:
    children: tuple

    def __post_init__(self):
        if not self.children:
            raise ValueError("And needs at least one child (use Const(1))")


@dataclass(frozen=True)
class Or:
    children: tuple

    def __post_init__(self):
        if not self.children:
            raise ValueError("Or needs at least one child (use Const(0))")


BoolExpr = Var | Const | Not | And | Or

TRUE = Const(1)
FALSE = Const(0)


def conj(children: Sequence[BoolExpr]) -> BoolExpr:
    """Conjunction with the empty-conjunction-is-true convention."""
    children = tuple(children)
    if not children:
        return TRUE
    if len(children) == 1:
        return children[0]
    return And(children)


def disj(children: Sequence[BoolExpr]) -> BoolExpr:
    children = tuple(children)
    if not children:
        return FALSE
    if len(children) == 1:
        return children[0]
    return Or(children)


def variables(e: BoolExpr) -> frozenset:
    """Indices of the variables occurring syntactically in ``e``."""
    out = set()
    stack = [e]
    while stack:
        node = stack.pop()
        if isinstance(node, Var):
            out.add(node.index)
        elif isinstance(node, Not):
            stack.append(node.child)
        elif isinstance(node, (And, Or)):
            stack.extend(node.children)
    return frozenset(out)


def substitute(e: BoolExpr, mapping: Mapping[int, BoolExpr]) -> BoolExpr:
    """Replace every ``Var(j)`` with ``mapping[j]`` (variables not in the map are kept)."""
    if isinstance(e, Var):
        return mapping.get(e.index, e)
    if isinstance(e, Const):
        return e
    if isinstance(e, Not):
        return Not(substitute(e.child, mapping))
    return type(e)(tuple(substitute(c, mapping) for c in e.children))


# --------------------------------------------------------------------------
# Parsing
# --------------------------------------------------------------------------

_TOKEN_RE = re.compile(
    r"(?P<ws>[ \t\r\n]+)|(?P<comment>#[^\n]*)|(?P<ident>[A-Za-z_][A-Za-z0-9_.]*)"
    r"|(?P<const>[01])|(?P<op>[!&|()])"
)
IDENT_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_.]*\Z")


def _tokenize(text, line0=1):
    pos = 0
    line, col0 = line0, 0
    tokens = []
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", line, pos - col0 + 1)
        kind = m.lastgroup
        if kind in ("ident", "const", "op"):
            tokens.append((kind, m.group(), line, pos - col0 + 1))
        chunk = m.group()
        if "\n" in chunk:
            line += chunk.count("\n")
            col0 = pos + chunk.rindex("\n") + 1
        pos = m.end()
    tokens.append(("eof", "", line, pos - col0 + 1))
    return tokens


class _Parser:
    def __init__(self, tokens, symbols):
        self.tokens = tokens
        self.pos = 0
        self.symbols = symbols

    def peek(self):
        return self.tokens[self.pos]

    def take(self):
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def expect(self, value):
        tok = self.take()
        if tok[1] != value:
            what = "end of input" if tok[0] == "eof" else repr(tok[1])
            raise ParseError(f"expected {value!r}, found {what}", tok[2], tok[3])

    def parse(self):
        e = self.parse_or()
        tok = self.peek()
        if tok[0] != "eof":
            raise ParseError(f"unexpected {tok[1]!r}", tok[2], tok[3])
        return e

    def parse_or(self):
        items = [self.parse_and()]
        while self.peek()[1] == "|":
            self.take()
            items.append(self.parse_and())
        return items[0] if len(items) == 1 else Or(tuple(items))

    def parse_and(self):
        items = [self.parse_unary()]
        while self.peek()[1] == "&":
            self.take()
            items.append(self.parse_unary())
        return items[0] if len(items) == 1 else And(tuple(items))

    def parse_unary(self):
        if self.peek()[1] == "!":
            self.take()
            return Not(self.parse_unary())
        return self.parse_atom()

    def parse_atom(self):
        kind, value, line, col = self.take()
        if kind == "const":
            return Const(int(value))
        if kind == "ident":
            if value not in self.symbols:
                raise ParseError(f"unknown identifier {value!r}", line, col)
            return Var(self.symbols[value])
        if value == "(":
            e = self.parse_or()
            self.expect(")")
            return e
        what = "end of input" if kind == "eof" else repr(value)
        raise ParseError(f"expected an operand, found {what}", line, col)


def parse_expr(text: str, symbols: Mapping[str, int], line: int = 1) -> BoolExpr:
    """Parse ``text`` with precedence ``!`` > ``&`` > ``|``.

    ``symbols`` maps identifiers to component indices.  Raises
    :class:`ParseError` carrying line/column on malformed input or an
    unknown identifier.
    """
    return _Parser(_tokenize(text, line), symbols).parse()


# --------------------------------------------------------------------------
# Printing and evaluation
# --------------------------------------------------------------------------

_PREC = {Or: 1, And: 2, Not: 3, Var: 4, Const: 4}


def to_text(e: BoolExpr, names: Sequence[str] | None = None) -> str:
    def name(i):
        return names[i] if names is not None else f"x{i + 1}"

    def go(node, parent_prec):
        if isinstance(node, Const):
            s = str(node.value)
        elif isinstance(node, Var):
            s = name(node.index)
        elif isinstance(node, Not):
            s = "!" + go(node.child, _PREC[Not])
        else:
            op = " & " if isinstance(node, And) else " | "
            # children of equal precedence get parenthesised to keep the tree shape
            s = op.join(go(c, _PREC[type(node)] + 1) for c in node.children)
        if _PREC[type(node)] < parent_prec:
            s = f"({s})"
        return s

    return go(e, 0)


def evaluate(e: BoolExpr, x: Sequence[int]) -> int:
    if isinstance(e, Var):
        if not 0 <= e.index < len(x):
            raise DimensionError(f"variable index {e.index} outside configuration of length {len(x)}")
        return x[e.index]
    if isinstance(e, Const):
        return e.value
    if isinstance(e, Not):
        return 1 - evaluate(e.child, x)
    if isinstance(e, And):
        return int(all(evaluate(c, x) for c in e.children))
    return int(any(evaluate(c, x) for c in e.children))


def _py_source(e):
    if isinstance(e, Var):
        return f"x[{e.index}]"
    if isinstance(e, Const):
        return str(e.value)
    if isinstance(e, Not):
        return f"(1 - {_py_source(e.child)})"
    op = " & " if isinstance(e, And) else " | "
    return "(" + op.join(_py_source(c) for c in e.children) + ")"


def compile_expr(e: BoolExpr) -> Callable[[Sequence[int]], int]:
    """Compile ``e`` to a plain Python function over 0/1 sequences.

    Much faster than :func:`evaluate` in exhaustive loops.  Index range is
    not checked.
    """
    return eval(f"lambda x: {_py_source(e)}", {})  # noqa: S307 - source built from our own AST


# --------------------------------------------------------------------------
# Prime implicants
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class Clause:
    """A conjunction of literals; ``positives`` and ``negatives`` are disjoint."""

    positives: frozenset
    negatives: frozenset

    def __post_init__(self):
        if self.positives & self.negatives:
            raise ValueError("contradictory clause")

    def literals(self):
        """Literals as sorted ``(index, polarity)`` pairs, positive before negative."""
        lits = [(i, 0) for i in self.positives] + [(i, 1) for i in self.negatives]
        return tuple(sorted(lits))

    def sort_key(self):
        return self.literals()

    def holds(self, x: Sequence[int]) -> bool:
        return all(x[i] for i in self.positives) and not any(x[i] for i in self.negatives)

    def to_expr(self) -> BoolExpr:
        return conj([Var(i) if pol == 0 else Not(Var(i)) for i, pol in self.literals()])


@dataclass(frozen=True)
class Dnf:
    clauses: tuple

    def holds(self, x: Sequence[int]) -> bool:
        return any(c.holds(x) for c in self.clauses)

    def to_expr(self) -> BoolExpr:
        return disj([c.to_expr() for c in self.clauses])

    def __iter__(self):
        return iter(self.clauses)

    def __len__(self):
        return len(self.clauses)


def _absorbs(a, b):
    return a[0] & b[0] == a[0] and a[1] & b[1] == a[1]


def _absorb(cubes):
    ordered = sorted(set(cubes), key=lambda c: bin(c[0]).count("1") + bin(c[1]).count("1"))
    kept = []
    for c in ordered:
        if not any(_absorbs(k, c) for k in kept):
            kept.append(c)
    return kept


def _cubes(e, negate):
    # cubes are (positive mask, negative mask)
    if isinstance(e, Const):
        return [(0, 0)] if e.value ^ negate else []
    if isinstance(e, Var):
        bit = 1 << e.index
        return [(0, bit)] if negate else [(bit, 0)]
    if isinstance(e, Not):
        return _cubes(e.child, not negate)
    product = isinstance(e, And) != negate
    parts = [_cubes(c, negate) for c in e.children]
    if not product:
        return _absorb(c for part in parts for c in part)
    acc = [(0, 0)]
    for part in parts:
        acc = _absorb(
            (a[0] | b[0], a[1] | b[1])
            for a in acc
            for b in part
            if not ((a[0] | b[0]) & (a[1] | b[1]))
        )
        if not acc:
            break
    return acc


def _consensus(a, b):
    clash = (a[0] & b[1]) | (a[1] & b[0])
    if clash == 0 or clash & (clash - 1):
        return None
    pos = (a[0] | b[0]) & ~clash
    neg = (a[1] | b[1]) & ~clash
    if pos & neg:
        return None
    return pos, neg


def _blake(cubes):
    current = set(_absorb(cubes))
    changed = True
    while changed:
        changed = False
        for a, b in combinations(sorted(current), 2):
            if a not in current or b not in current:
                continue
            c = _consensus(a, b)
            if c is None or any(_absorbs(d, c) for d in current):
                continue
            current = {d for d in current if not _absorbs(c, d)}
            current.add(c)
            changed = True
    return current


def _mask_to_set(mask):
    out = set()
    i = 0
    while mask:
        if mask & 1:
            out.add(i)
        mask >>= 1
        i += 1
    return frozenset(out)


def to_min_dnf(e: BoolExpr, n: int) -> Dnf:
    """All prime implicants of ``e`` (Blake canonical form), canonically ordered.

    Computed by distributing to a first DNF and closing it under consensus
    with absorption.  An unsatisfiable ``e`` yields no clause; a tautology
    yields the single empty clause.
    """
    if n > MAX_EXHAUSTIVE_DIM:
        raise DimensionError(f"dimension {n} exceeds cap {MAX_EXHAUSTIVE_DIM}")
    used = variables(e)
    if used and max(used) >= n:
        raise DimensionError(f"expression uses variable {max(used)} but n={n}")
    cubes = _blake(_cubes(e, False))
    clauses = [Clause(_mask_to_set(p), _mask_to_set(q)) for p, q in cubes]
    clauses.sort(key=Clause.sort_key)
    return Dnf(tuple(clauses))
