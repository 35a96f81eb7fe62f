"""Explicit-state breadth-first exploration shared by all semantics."""
from __future__ import annotations

import os
from collections import deque
from dataclasses import dataclass, field
from typing import Callable, Hashable, Iterable

from .errors import BudgetExceeded

DEFAULT_MAX_STATES = 200_000


def default_budget() -> int:
    """State budget, overridable with the ``BNCONCUR_BUDGET`` environment variable."""
    raw = os.environ.get("BNCONCUR_BUDGET")
    if raw:
        try:
            return int(raw)
        except ValueError:
            pass
    return DEFAULT_MAX_STATES


@dataclass(frozen=True)
class TransitionRelation:
    """An explored, labelled edge set.

    ``edges`` holds ``(source, label, target)`` triples; ``states`` is the
    explored domain.  ``parents`` gives one BFS predecessor per state and is
    used to rebuild shortest witness runs.
    """

    mode: str
    states: frozenset
    edges: frozenset
    initial: tuple
    parents: dict = field(default_factory=dict, compare=False, repr=False)

    def successors(self, state):
        return {t for s, _, t in self.edges if s == state}

    def path_to(self, target):
        """Shortest list of ``(source, label, target)`` edges from an initial state."""
        if target not in self.states:
            return None
        path = []
        node = target
        while node not in self.initial:
            prev, label = self.parents[node]
            path.append((prev, label, node))
            node = prev
        path.reverse()
        return path


def bfs(
    initial: Iterable[Hashable],
    successors: Callable[[Hashable], Iterable[tuple]],
    mode: str,
    max_states: int | None = None,
    record_edges: bool = True,
    goal: Callable[[Hashable], bool] | None = None,
) -> TransitionRelation:
    """Forward closure from ``initial``.

    ``successors(state)`` yields ``(label, next_state)`` pairs.  Stops early
    when ``goal`` matches a discovered state.  Raises :class:`BudgetExceeded`
    once more than ``max_states`` states have been discovered.
    """
    if max_states is None:
        max_states = default_budget()
    initial = tuple(dict.fromkeys(initial))
    if len(initial) > max_states:
        raise BudgetExceeded(f"{len(initial)} start states exceed budget {max_states}")
    seen = set(initial)
    parents = {}
    edges = set()
    queue = deque(initial)
    if goal is not None and any(goal(s) for s in initial):
        queue.clear()
    while queue:
        state = queue.popleft()
        for label, nxt in successors(state):
            if record_edges:
                edges.add((state, label, nxt))
            if nxt in seen:
                continue
            seen.add(nxt)
            parents[nxt] = (state, label)
            if len(seen) > max_states:
                raise BudgetExceeded(f"{mode} exploration exceeded {max_states} states")
            if goal is not None and goal(nxt):
                queue.clear()
                break
            queue.append(nxt)
    return TransitionRelation(mode, frozenset(seen), frozenset(edges), initial, parents)


def reachable_set(initial, step: Callable[[Hashable], Iterable[Hashable]], max_states=None) -> set:
    """Plain reachable set when only the nodes matter (no labels, no edges)."""
    if max_states is None:
        max_states = default_budget()
    seen = set(initial)
    if len(seen) > max_states:
        raise BudgetExceeded(f"{len(seen)} start states exceed budget {max_states}")
    queue = deque(seen)
    while queue:
        for nxt in step(queue.popleft()):
            if nxt not in seen:
                seen.add(nxt)
                if len(seen) > max_states:
                    raise BudgetExceeded(f"exploration exceeded {max_states} states")
                queue.append(nxt)
    return seen
