"""Synchronism sensitivity of read Petri nets: preemption, normal pairs, arc types."""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from itertools import combinations, permutations
from typing import Iterable, Sequence

import networkx as nx

from .encodings import DOWN, UP, BnRpnImage
from .errors import BudgetExceeded, InvariantViolation, NotEnabled, StructureError
from .explore import default_budget
from .rpn import ReadPetriNet, fire_step

DEFAULT_MAX_STEP = 6


def preempts(net: ReadPetriNet, t1: str, t2: str) -> bool:
    """``t1 ⇝ t2``: firing ``t1`` consumes a place ``t2`` reads."""
    return bool(net.pre[t1] & net.cont[t2])


@dataclass(frozen=True)
class PreemptionGraph:
    nodes: frozenset
    edges: frozenset

    def digraph(self) -> nx.DiGraph:
        g = nx.DiGraph()
        g.add_nodes_from(sorted(self.nodes))
        g.add_edges_from(sorted(self.edges))
        return g

    def cycles(self) -> list:
        """Elementary cycles, each rotated to start at its smallest node, sorted."""
        out = []
        for cyc in nx.simple_cycles(self.digraph()):
            k = cyc.index(min(cyc))
            out.append(tuple(cyc[k:] + cyc[:k]))
        return sorted(out, key=lambda c: (len(c), c))

    def has_cycle(self) -> bool:
        return not nx.is_directed_acyclic_graph(self.digraph())

    def hamiltonian_cycle(self):
        """A cycle through every node, or ``None``."""
        nodes = sorted(self.nodes)
        if len(nodes) < 2:
            return None
        first, rest = nodes[0], nodes[1:]
        for order in permutations(rest):
            cyc = (first,) + order
            if all((cyc[k], cyc[(k + 1) % len(cyc)]) in self.edges for k in range(len(cyc))):
                return cyc
        return None


def preemption_graph(net: ReadPetriNet, step: Iterable[str]) -> PreemptionGraph:
    step = frozenset(step)
    unknown = step - set(net.transitions)
    if unknown:
        raise StructureError(f"unknown transitions {sorted(unknown)}")
    edges = frozenset(
        (a, b) for a in step for b in step if a != b and preempts(net, a, b)
    )
    return PreemptionGraph(step, edges)


# --------------------------------------------------------------------------
# Normal pairs
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class SequentializationResult:
    normal: bool
    step: frozenset
    marking: frozenset
    result: frozenset
    trace: tuple  # (prefix, blocked transitions) for every dead end
    order: tuple | None = None  # a successful sequentialization when not normal

    def __bool__(self):
        return self.normal


@dataclass(frozen=True)
class NormalPair:
    step: frozenset
    marking: frozenset
    trace: tuple = field(compare=False, default=())


def is_normal(net: ReadPetriNet, step: Iterable[str], marking: Iterable[str],
              same_result: bool = True, max_step: int = DEFAULT_MAX_STEP) -> SequentializationResult:
    """Decide whether the s-enabled ``step`` cannot be sequentialized from ``marking``.

    Orders are searched depth first; a prefix is abandoned as soon as the
    next transition is disabled.  With ``same_result`` (the default) an order
    only counts when it reaches the step's own result; otherwise any
    complete firing order counts.  Raises :class:`NotEnabled` when the step
    is not s-enabled.
    """
    step = frozenset(step)
    marking = frozenset(marking)
    if not step:
        raise NotEnabled("empty step")
    if len(step) > max_step:
        raise BudgetExceeded(f"step of size {len(step)} exceeds cap {max_step}")
    target = fire_step(net, marking, step)
    tmask = net.to_mask(target)
    ks = sorted(net._tindex[t] for t in step)
    trace = []

    def go(m, remaining, prefix):
        if not remaining:
            if not same_result or m == tmask:
                return prefix
            trace.append((tuple(net.transitions[k] for k in prefix), ("result differs",)))
            return None
        blocked = []
        for k in remaining:
            if m & net._need[k] != net._need[k]:
                blocked.append(net.transitions[k])
                continue
            found = go(net._fire(m, k), [j for j in remaining if j != k], prefix + [k])
            if found is not None:
                return found
        if blocked:
            trace.append((tuple(net.transitions[k] for k in prefix), tuple(sorted(blocked))))
        return None

    order = go(net.to_mask(marking), ks, [])
    return SequentializationResult(
        normal=order is None,
        step=step,
        marking=marking,
        result=target,
        trace=tuple(trace),
        order=None if order is None else tuple(net.transitions[k] for k in order),
    )


@dataclass(frozen=True)
class ScanResult:
    pairs: tuple  # NormalPair, sorted by (marking, step)
    markings_scanned: int
    truncated: bool

    def __iter__(self):
        return iter(self.pairs)

    def __len__(self):
        return len(self.pairs)


def _sort_key(pair):
    return (sorted(pair.marking), sorted(pair.step))


def find_normal_pairs(net: ReadPetriNet, start: Iterable[str] | None = None, max_states: int | None = None,
                      max_step: int = DEFAULT_MAX_STEP, semantics: str = "step",
                      same_result: bool = True) -> ScanResult:
    """Scan markings reachable under ``semantics`` for normal ``(step, marking)`` pairs.

    Singletons are never normal and are skipped.  When the state budget runs
    out the pairs found so far are returned with ``truncated`` set.
    """
    if semantics not in ("step", "atomic"):
        raise ValueError(f"unsupported scan semantics {semantics!r}")
    budget = default_budget() if max_states is None else max_states
    m0 = net.to_mask(net.initial if start is None else start)
    seen = {m0}
    queue = deque([m0])
    pairs = []
    truncated = False
    while queue:
        m = queue.popleft()
        steps = net._steps(m, False, None)
        marking = net.to_marking(m)
        for s in steps:
            if 1 < len(s) <= max_step:
                res = is_normal(net, [net.transitions[k] for k in s], marking, same_result, max_step)
                if res.normal:
                    pairs.append(NormalPair(res.step, marking, res.trace))
        if semantics == "step":
            succ = [net._fire_step(m, s) for s in steps]
        else:
            succ = [m2 for _, m2 in net._atomic_successors(m)]
        for m2 in succ:
            if m2 not in seen:
                if len(seen) >= budget:
                    truncated = True
                    continue
                seen.add(m2)
                queue.append(m2)
    pairs.sort(key=_sort_key)
    return ScanResult(tuple(pairs), len(seen), truncated)


def is_minimal_witness(net: ReadPetriNet, pair: NormalPair) -> bool:
    """Every proper nonempty subset of the step is sequentializable at the marking."""
    items = sorted(pair.step)
    for size in range(1, len(items)):
        for sub in combinations(items, size):
            if is_normal(net, sub, pair.marking).normal:
                return False
    return True


# --------------------------------------------------------------------------
# Arc types of cycles in BN images
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class ArcClassification:
    cycle: tuple
    types: tuple  # '01' | '10' | '00' | '11' per arc (t_k, t_{k+1})
    signs: tuple  # +1 / -1 per arc

    @property
    def length(self) -> int:
        return len(self.cycle)

    @property
    def sign(self) -> int:
        return -1 if sum(1 for s in self.signs if s < 0) % 2 else 1

    @property
    def balanced(self) -> bool:
        return self.types.count("01") == self.types.count("10")

    @property
    def parity_consistent(self) -> bool:
        return (self.sign > 0) == (self.length % 2 == 0)


def classify_arcs(image: BnRpnImage, cycle: Sequence[str], check: bool = True) -> ArcClassification:
    """Type each arc ``(t_k, t_{k+1})`` by the values consumed by its endpoints.

    An up-transition consumes a 0-place and a down-transition a 1-place, so
    up→down is ``01``, down→up ``10``, up→up ``00`` and down→down ``11``.
    """
    cycle = tuple(cycle)
    net = image.net
    k = len(cycle)
    if k < 2:
        raise StructureError("a preemption cycle has at least two transitions")
    for a in range(k):
        t1, t2 = cycle[a], cycle[(a + 1) % k]
        if not preempts(net, t1, t2):
            raise StructureError(f"{t1!r} does not preempt {t2!r}")

    def value(t):
        return "0" if image.direction(t) == UP else "1"

    types = tuple(value(cycle[a]) + value(cycle[(a + 1) % k]) for a in range(k))
    signs = tuple(1 if t in ("01", "10") else -1 for t in types)
    result = ArcClassification(cycle, types, signs)
    if check and not (result.balanced and result.parity_consistent):
        raise InvariantViolation(f"arc types {types} of cycle {cycle} break sign parity")
    return result


# --------------------------------------------------------------------------
# Reports
# --------------------------------------------------------------------------


def witness_report(net: ReadPetriNet, pair: NormalPair, image: BnRpnImage | None = None) -> dict:
    graph = preemption_graph(net, pair.step)
    cycles = graph.cycles()
    cycle = graph.hamiltonian_cycle() or (cycles[0] if cycles else None)
    report = {
        "marking": sorted(pair.marking),
        "step": sorted(pair.step),
        "preemption_edges": [list(e) for e in sorted(graph.edges)],
        "cycle": list(cycle) if cycle else None,
        "arc_types": None,
        "sign": None,
        "sequentialization_trace": [
            {"prefix": list(prefix), "blocked": list(blocked)} for prefix, blocked in pair.trace
        ],
    }
    if image is not None and cycle:
        arcs = classify_arcs(image, cycle, check=False)
        report["arc_types"] = list(arcs.types)
        report["sign"] = "+" if arcs.sign > 0 else "-"
    return report


__all__ = [
    "PreemptionGraph", "preemption_graph", "preempts", "is_normal", "SequentializationResult",
    "NormalPair", "find_normal_pairs", "ScanResult", "is_minimal_witness", "ArcClassification",
    "classify_arcs", "witness_report", "DOWN", "UP",
]
