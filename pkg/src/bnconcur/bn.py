"""Boolean networks: update relations, fixpoints, reachability and influence graphs."""
from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations, islice, product
from pathlib import Path
from typing import Iterable, Sequence

import networkx as nx

from . import boolfun
from .boolfun import BoolExpr, MAX_EXHAUSTIVE_DIM
from .errors import BudgetExceeded, DimensionError, ParseError, StructureError
from .explore import TransitionRelation, bfs

Configuration = tuple  # of 0/1 ints, component 0 first

MODES = ("async", "sync", "general")
DEFAULT_MAX_CYCLES = 100_000


def parse_config(text: str, n: int | None = None) -> Configuration:
    if not text or any(ch not in "01" for ch in text):
        raise ValueError(f"configuration must be a 0/1 string, got {text!r}")
    if n is not None and len(text) != n:
        raise DimensionError(f"configuration {text!r} has length {len(text)}, expected {n}")
    return tuple(int(ch) for ch in text)


def format_config(x: Sequence[int]) -> str:
    return "".join(str(v) for v in x)


def all_configs(n: int):
    if n > MAX_EXHAUSTIVE_DIM:
        raise DimensionError(f"dimension {n} exceeds cap {MAX_EXHAUSTIVE_DIM}")
    return product((0, 1), repeat=n)


def delta(x: Sequence, y: Sequence) -> tuple:
    """Indices where ``x`` and ``y`` differ."""
    return tuple(i for i, (a, b) in enumerate(zip(x, y)) if a != b)


@dataclass(frozen=True)
class BooleanNetwork:
    names: tuple
    functions: tuple
    _compiled: tuple = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        names = tuple(self.names)
        functions = tuple(self.functions)
        if len(names) != len(functions):
            raise StructureError("one function per component is required")
        if len(set(names)) != len(names):
            raise StructureError("component names must be distinct")
        n = len(names)
        for i, fi in enumerate(functions):
            used = boolfun.variables(fi)
            if used and max(used) >= n:
                raise StructureError(f"function of {names[i]!r} refers to component {max(used)} >= {n}")
        object.__setattr__(self, "names", names)
        object.__setattr__(self, "functions", functions)
        object.__setattr__(self, "_compiled", tuple(boolfun.compile_expr(fi) for fi in functions))

    @classmethod
    def from_texts(cls, rules: Sequence[tuple[str, str]]) -> "BooleanNetwork":
        """Build from ``(name, expression)`` pairs, in component order."""
        symbols = {name: i for i, (name, _) in enumerate(rules)}
        return cls(
            tuple(name for name, _ in rules),
            tuple(boolfun.parse_expr(text, symbols) for _, text in rules),
        )

    @property
    def n(self) -> int:
        return len(self.names)

    def index(self, name: str) -> int:
        return self.names.index(name)

    def f(self, i: int, x: Sequence[int]) -> int:
        return self._compiled[i](x)

    def image(self, x: Sequence[int]) -> Configuration:
        if len(x) != self.n:
            raise DimensionError(f"configuration of length {len(x)} for network of dimension {self.n}")
        return tuple(g(x) for g in self._compiled)

    def unstable(self, x: Sequence[int]) -> tuple:
        return tuple(i for i, g in enumerate(self._compiled) if g(x) != x[i])


def _flip(x, indices):
    y = list(x)
    for i in indices:
        y[i] = 1 - y[i]
    return tuple(y)


def async_successors(f: BooleanNetwork, x: Configuration) -> set:
    f.image(x)  # dimension check
    return {_flip(x, (i,)) for i in f.unstable(x)}


def sync_successor(f: BooleanNetwork, x: Configuration):
    y = f.image(x)
    return None if y == tuple(x) else y


def general_successors(f: BooleanNetwork, x: Configuration) -> set:
    f.image(x)
    unstable = f.unstable(x)
    return {
        _flip(x, subset)
        for k in range(1, len(unstable) + 1)
        for subset in combinations(unstable, k)
    }


def labelled_successors(f: BooleanNetwork, mode: str, x: Configuration):
    """``(Δ, y)`` pairs of the chosen update mode, Δ being the sorted changed indices."""
    if mode == "async":
        return [((i,), _flip(x, (i,))) for i in f.unstable(x)]
    if mode == "sync":
        unstable = f.unstable(x)
        return [(unstable, _flip(x, unstable))] if unstable else []
    if mode == "general":
        unstable = f.unstable(x)
        return [
            (subset, _flip(x, subset))
            for k in range(1, len(unstable) + 1)
            for subset in combinations(unstable, k)
        ]
    raise ValueError(f"unknown mode {mode!r}; expected one of {MODES}")


def fixpoints(f: BooleanNetwork) -> set:
    return {x for x in all_configs(f.n) if f.image(x) == x}


def reachable(
    mode: str,
    f: BooleanNetwork,
    start: Configuration | Iterable[Configuration],
    max_states: int | None = None,
    goal=None,
) -> TransitionRelation:
    """Breadth-first closure of ``mode`` from ``start`` (one configuration or several)."""
    if f.n > MAX_EXHAUSTIVE_DIM:
        raise DimensionError(f"dimension {f.n} exceeds cap {MAX_EXHAUSTIVE_DIM}")
    starts = [tuple(start)] if start and isinstance(next(iter(start)), int) else [tuple(s) for s in start]
    for s in starts:
        if len(s) != f.n:
            raise DimensionError(f"start configuration of length {len(s)} for dimension {f.n}")
    return bfs(starts, lambda x: labelled_successors(f, mode, x), mode, max_states, goal=goal)


# --------------------------------------------------------------------------
# Influence graph and cycles
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class InfluenceGraph:
    n: int
    positive: frozenset  # (j, i): j influences i positively
    negative: frozenset

    @property
    def locally_monotonic(self) -> bool:
        return not (self.positive & self.negative)

    def edges(self):
        return sorted(self.positive | self.negative)

    def signs(self, j, i) -> tuple:
        out = []
        if (j, i) in self.positive:
            out.append(1)
        if (j, i) in self.negative:
            out.append(-1)
        return tuple(out)


def influence_graph(f: BooleanNetwork) -> InfluenceGraph:
    if f.n > MAX_EXHAUSTIVE_DIM:
        raise DimensionError(f"dimension {f.n} exceeds cap {MAX_EXHAUSTIVE_DIM}")
    pos, neg = set(), set()
    for i, fi in enumerate(f.functions):
        for j in sorted(boolfun.variables(fi)):
            for x in all_configs(f.n):
                if x[j]:
                    continue
                lo = f.f(i, x)
                hi = f.f(i, _flip(x, (j,)))
                if lo < hi:
                    pos.add((j, i))
                elif lo > hi:
                    neg.add((j, i))
                if (j, i) in pos and (j, i) in neg:
                    break
    return InfluenceGraph(f.n, frozenset(pos), frozenset(neg))


@dataclass(frozen=True)
class SignedCycle:
    """Elementary cycle ``nodes[0] -> nodes[1] -> ... -> nodes[0]`` with one sign per edge."""

    nodes: tuple
    signs: tuple

    @property
    def length(self) -> int:
        return len(self.nodes)

    @property
    def sign(self) -> int:
        return -1 if sum(1 for s in self.signs if s < 0) % 2 else 1

    @property
    def kind(self) -> str | None:
        """``'negative-odd'``, ``'positive-even'`` or ``None`` when not NOPE."""
        if self.sign < 0 and self.length % 2 == 1:
            return "negative-odd"
        if self.sign > 0 and self.length % 2 == 0:
            return "positive-even"
        return None

    def edges(self):
        k = len(self.nodes)
        return [(self.nodes[a], self.nodes[(a + 1) % k], self.signs[a]) for a in range(k)]


def _rotate(nodes):
    k = nodes.index(min(nodes))
    return tuple(nodes[k:]) + tuple(nodes[:k])


def signed_cycles(g: InfluenceGraph, max_cycles: int = DEFAULT_MAX_CYCLES) -> list:
    """All elementary signed cycles of ``g``, sorted.

    A node cycle whose edges carry both signs expands into one signed cycle
    per sign choice.
    """
    digraph = nx.DiGraph()
    digraph.add_nodes_from(range(g.n))
    digraph.add_edges_from(g.positive | g.negative)
    node_cycles = list(islice(nx.simple_cycles(digraph), max_cycles + 1))
    if len(node_cycles) > max_cycles:
        raise BudgetExceeded(f"more than {max_cycles} elementary cycles")
    out = []
    for cyc in node_cycles:
        nodes = _rotate(cyc)
        k = len(nodes)
        options = [g.signs(nodes[a], nodes[(a + 1) % k]) for a in range(k)]
        for signs in product(*options):
            out.append(SignedCycle(nodes, signs))
    out.sort(key=lambda c: (c.length, c.nodes, c.signs))
    return out


def nope_cycles(g: InfluenceGraph, max_cycles: int = DEFAULT_MAX_CYCLES) -> list:
    return [c for c in signed_cycles(g, max_cycles) if c.kind is not None]


def is_frustrated(j: int, i: int, sign: int, x: Sequence[int]) -> bool:
    return x[i] != x[j] if sign > 0 else x[i] == x[j]


def critical_cycles(f: BooleanNetwork, x: Configuration, max_cycles: int = DEFAULT_MAX_CYCLES) -> list:
    """Cycles of G(f) all of whose edges are frustrated in ``x``.

    Frustration is only defined for locally monotonic networks; anything
    else is rejected.
    """
    g = influence_graph(f)
    if not g.locally_monotonic:
        both = sorted(g.positive & g.negative)
        raise StructureError(f"network is not locally monotonic (edges with both signs: {both})")
    return [
        c for c in signed_cycles(g, max_cycles)
        if all(is_frustrated(j, i, s, x) for j, i, s in c.edges())
    ]


# --------------------------------------------------------------------------
# .bn files
# --------------------------------------------------------------------------


def parse_bn(text: str) -> BooleanNetwork:
    """Parse the ``name = expr`` format; component order is declaration order."""
    rules = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0]
        if not line.strip():
            continue
        if "=" not in line:
            raise ParseError("expected 'name = expression'", lineno, 1)
        lhs, rhs = line.split("=", 1)
        name = lhs.strip()
        if not boolfun.IDENT_RE.match(name) or name in ("0", "1"):
            raise ParseError(f"invalid component name {name!r}", lineno, 1)
        if any(name == r[0] for r in rules):
            raise ParseError(f"component {name!r} defined twice", lineno, 1)
        rules.append((name, rhs, lineno, len(lhs) + 2))
    symbols = {r[0]: i for i, r in enumerate(rules)}
    functions = []
    for name, rhs, lineno, col in rules:
        try:
            functions.append(boolfun.parse_expr(rhs, symbols, line=lineno))
        except ParseError as exc:
            column = exc.column + col - 1 if exc.line == lineno else exc.column
            raise ParseError(exc.message, exc.line, column) from None
    return BooleanNetwork(tuple(r[0] for r in rules), tuple(functions))


def load_bn(path) -> BooleanNetwork:
    return parse_bn(Path(path).read_text(encoding="utf-8"))


def format_bn(f: BooleanNetwork) -> str:
    return "".join(f"{name} = {boolfun.to_text(fi, f.names)}\n" for name, fi in zip(f.names, f.functions))
