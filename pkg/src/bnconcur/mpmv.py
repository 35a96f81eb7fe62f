"""Most-permissive 3-valued semantics and multivalued refinements of BNs."""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from pathlib import Path
from typing import Callable, Sequence

from .bn import BooleanNetwork
from .errors import BudgetExceeded, DimensionError, ParseError, StructureError
from .explore import TransitionRelation, bfs, default_budget

HALF = Fraction(1, 2)
UP, STAY, DOWN = "u", "s", "d"
DIRECTIONS = (UP, STAY, DOWN)

Config3 = tuple  # entries 0, 1 or HALF
ConfigM = tuple  # entries Fractions k/m


def parse_config3(text: str, n: int | None = None) -> Config3:
    """``0``/``1`` are Boolean, ``*`` (or ``½``) is the intermediate value."""
    out = []
    for ch in text:
        if ch in "01":
            out.append(int(ch))
        elif ch in "*½":
            out.append(HALF)
        else:
            raise ValueError(f"invalid 3-valued configuration {text!r}")
    if not out:
        raise ValueError("empty configuration")
    if n is not None and len(out) != n:
        raise DimensionError(f"configuration {text!r} has length {len(out)}, expected {n}")
    return tuple(out)


def format_config3(x: Sequence) -> str:
    return "".join("*" if v == HALF else str(int(v)) for v in x)


def approx(x: Config3) -> set:
    """Boolean completions of ``x``."""
    choices = [(0, 1) if v == HALF else (int(v),) for v in x]
    return set(product(*choices))


def abstr(x: ConfigM) -> Config3:
    return tuple(0 if v == 0 else 1 if v == 1 else HALF for v in x)


def embed(x: Sequence[int]) -> Config3:
    return tuple(int(v) for v in x)


def _check_dim(f: BooleanNetwork, x):
    if len(x) != f.n:
        raise DimensionError(f"configuration of length {len(x)} for dimension {f.n}")


def mp_successors(f: BooleanNetwork, x: Config3) -> set:
    _check_dim(f, x)
    completions = approx(x)
    out = set()
    for i, v in enumerate(x):
        values = {f.f(i, c) for c in completions}
        if v == HALF:
            targets = values
        else:
            targets = {HALF} if values - {v} else set()
        for t in targets:
            y = list(x)
            y[i] = t
            out.add(tuple(y))
    return out


def _labelled_mp(f):
    def succ(x):
        out = []
        for y in mp_successors(f, x):
            i = next(k for k in range(f.n) if x[k] != y[k])
            out.append(((i,), y))
        return out
    return succ


def mp_explore(f: BooleanNetwork, start: Config3 | Sequence[Config3], max_states: int | None = None,
               goal: Callable | None = None) -> TransitionRelation:
    starts = [tuple(start)] if start and not isinstance(start[0], (tuple, list)) else [tuple(s) for s in start]
    for s in starts:
        _check_dim(f, s)
    return bfs(starts, _labelled_mp(f), "mp", max_states, goal=goal)


def mp_reachable_set(f: BooleanNetwork, start: Config3, max_states: int | None = None) -> set:
    return set(mp_explore(f, tuple(start), max_states).states)


def mp_reachable(f: BooleanNetwork, source: Config3, target: Config3, max_states: int | None = None) -> bool:
    source, target = tuple(source), tuple(target)
    _check_dim(f, target)
    rel = mp_explore(f, source, max_states, goal=lambda y: y == target)
    return target in rel.states


def mp_path(f: BooleanNetwork, source: Config3, target: Config3, max_states: int | None = None):
    """Shortest list of configurations from ``source`` to ``target`` or ``None``."""
    source, target = tuple(source), tuple(target)
    rel = mp_explore(f, source, max_states, goal=lambda y: y == target)
    path = rel.path_to(target)
    if path is None:
        return None
    return [source] + [b for _, _, b in path]


# --------------------------------------------------------------------------
# Multivalued networks
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class MultivaluedNetwork:
    """``F_i : M^n -> {u, s, d}`` stored as explicit tables.

    ``tables[i][k]`` is the direction of component ``i`` at the
    configuration whose mixed-radix index is ``k`` (component 0 least
    significant, digit = numerator over ``m``).
    """

    n: int
    m: int
    names: tuple
    tables: tuple
    _size: int = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.m < 1:
            raise StructureError("granularity m must be at least 1")
        names = tuple(self.names)
        tables = tuple(tuple(t) for t in self.tables)
        if len(names) != self.n or len(tables) != self.n:
            raise StructureError(f"expected {self.n} names and tables")
        size = (self.m + 1) ** self.n
        for i, t in enumerate(tables):
            if len(t) != size:
                raise StructureError(f"table of {names[i]!r} has {len(t)} entries, expected {size}")
            bad = set(t) - set(DIRECTIONS)
            if bad:
                raise StructureError(f"table of {names[i]!r} has invalid entries {sorted(bad)}")
        object.__setattr__(self, "names", names)
        object.__setattr__(self, "tables", tables)
        object.__setattr__(self, "_size", size)

    @classmethod
    def from_function(cls, n: int, m: int, rule: Callable[[int, ConfigM], str],
                      names: Sequence[str] | None = None) -> "MultivaluedNetwork":
        """Tabulate ``rule(i, x)`` over every configuration."""
        configs = list(all_mv_configs(n, m))
        tables = tuple(tuple(rule(i, x) for x in configs) for i in range(n))
        return cls(n, m, tuple(names or (f"x{i + 1}" for i in range(n))), tables)

    @property
    def values(self) -> tuple:
        return tuple(Fraction(k, self.m) for k in range(self.m + 1))

    def index_of(self, x: ConfigM) -> int:
        if len(x) != self.n:
            raise DimensionError(f"configuration of length {len(x)} for dimension {self.n}")
        k = 0
        for v in reversed(x):
            digit = v * self.m
            if digit.denominator != 1 or not 0 <= digit <= self.m:
                raise ValueError(f"value {v} is not a multiple of 1/{self.m} in [0, 1]")
            k = k * (self.m + 1) + int(digit)
        return k

    def direction(self, i: int, x: ConfigM) -> str:
        return self.tables[i][self.index_of(x)]

    def configs(self):
        return all_mv_configs(self.n, self.m)


def all_mv_configs(n: int, m: int):
    """Every configuration in mixed-radix order (component 0 varies fastest)."""
    values = [Fraction(k, m) for k in range(m + 1)]
    for digits in product(values, repeat=n):
        yield tuple(reversed(digits))


def mv_async_successors(F: MultivaluedNetwork, x: ConfigM) -> set:
    x = tuple(Fraction(v) for v in x)
    step = Fraction(1, F.m)
    out = set()
    for i in range(F.n):
        d = F.direction(i, x)
        if d == UP:
            v = min(Fraction(1), x[i] + step)
        elif d == DOWN:
            v = max(Fraction(0), x[i] - step)
        else:
            continue
        if v != x[i]:
            out.add(x[:i] + (v,) + x[i + 1:])
    return out


def _check_size(F: MultivaluedNetwork, max_states):
    budget = default_budget() if max_states is None else max_states
    if F._size > budget:
        raise BudgetExceeded(f"{F._size} multivalued configurations exceed budget {budget}")


@dataclass(frozen=True)
class RefinementResult:
    ok: bool
    counterexamples: tuple  # (x, i) pairs, sorted

    def __bool__(self):
        return self.ok


def check_refinement(F: MultivaluedNetwork, f: BooleanNetwork, max_states: int | None = None) -> RefinementResult:
    if F.n != f.n:
        raise DimensionError(f"multivalued dimension {F.n} differs from BN dimension {f.n}")
    _check_size(F, max_states)
    bad = []
    for x in F.configs():
        completions = approx(abstr(x))
        for i in range(F.n):
            d = F.direction(i, x)
            if d == STAY:
                continue
            want = 1 if d == UP else 0
            if not any(f.f(i, c) == want for c in completions):
                bad.append((x, i))
    bad.sort()
    return RefinementResult(not bad, tuple(bad))


@dataclass(frozen=True)
class SimulationResult:
    ok: bool
    edges: int
    counterexamples: tuple  # (x, y) mv edges whose abstraction is not mp-reachable
    witnesses: dict = field(compare=False, repr=False)  # (x, y) -> list of Config3

    def __bool__(self):
        return self.ok


def check_simulation(F: MultivaluedNetwork, f: BooleanNetwork, max_states: int | None = None) -> SimulationResult:
    """Check that every multivalued async edge is matched by mp-reachability of abstractions.

    Raises :class:`StructureError` when ``F`` is not a refinement of ``f``.
    """
    ref = check_refinement(F, f, max_states)
    if not ref.ok:
        raise StructureError(
            f"not a refinement: {len(ref.counterexamples)} violations, first {ref.counterexamples[0]}"
        )
    cache = {}

    def closure(a):
        if a not in cache:
            cache[a] = mp_explore(f, a, max_states)
        return cache[a]

    bad, witnesses, edges = [], {}, 0
    for x in F.configs():
        for y in sorted(mv_async_successors(F, x)):
            edges += 1
            a, b = abstr(x), abstr(y)
            if a == b:
                witnesses[(x, y)] = [a]
                continue
            rel = closure(a)
            path = rel.path_to(b)
            if path is None:
                bad.append((x, y))
            else:
                witnesses[(x, y)] = [a] + [t for _, _, t in path]
    bad.sort()
    return SimulationResult(not bad, edges, tuple(bad), witnesses)


# --------------------------------------------------------------------------
# I/O
# --------------------------------------------------------------------------


def format_value(v: Fraction) -> str:
    v = Fraction(v)
    return str(v.numerator) if v.denominator == 1 else f"{v.numerator}/{v.denominator}"


def format_mv_config(x: ConfigM) -> str:
    return ",".join(format_value(v) for v in x)


def parse_mv_config(text: str, F: MultivaluedNetwork) -> ConfigM:
    try:
        x = tuple(Fraction(part.strip()) for part in text.split(","))
    except (ValueError, ZeroDivisionError):
        raise ValueError(f"invalid multivalued configuration {text!r}") from None
    F.index_of(x)
    return x


def mv_to_dict(F: MultivaluedNetwork) -> dict:
    return {"n": F.n, "m": F.m, "names": list(F.names), "tables": [list(t) for t in F.tables]}


def dumps_mv(F: MultivaluedNetwork) -> str:
    return json.dumps(mv_to_dict(F), indent=2, sort_keys=True) + "\n"


def mv_from_dict(data: dict) -> MultivaluedNetwork:
    try:
        n, m = int(data["n"]), int(data["m"])
        names = data.get("names") or [f"x{i + 1}" for i in range(n)]
        tables = [list(t) for t in data["tables"]]
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"malformed multivalued network: {exc}") from None
    return MultivaluedNetwork(n, m, tuple(names), tuple(tuple(t) for t in tables))


def loads_mv(text: str) -> MultivaluedNetwork:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(exc.msg, exc.lineno, exc.colno) from None
    return mv_from_dict(data)


def load_mv(path) -> MultivaluedNetwork:
    return loads_mv(Path(path).read_text(encoding="utf-8"))
