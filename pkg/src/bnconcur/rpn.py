"""Safe read (contextual) Petri nets: atomic, step, maximal-step and interval semantics."""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from itertools import permutations
from pathlib import Path
from typing import Iterable, Mapping, Sequence

from .errors import (
    BudgetExceeded,
    InvariantViolation,
    NotEnabled,
    ParseError,
    SafetyViolation,
    StructureError,
)
from .explore import TransitionRelation, bfs, default_budget, reachable_set

Marking = frozenset


@dataclass(frozen=True, eq=False)
class ReadPetriNet:
    """A net ``(P, T, pre, cont, post, M0)`` over string ids.

    ``pre``/``cont``/``post`` map transition ids to frozensets of place ids.
    Markings are frozensets of place ids; explorers work on bitmasks
    internally (bit ``k`` is ``places[k]``).
    """

    places: tuple
    transitions: tuple
    pre: Mapping
    cont: Mapping
    post: Mapping
    initial: frozenset = frozenset()
    place_names: Mapping = field(default_factory=dict)
    transition_names: Mapping = field(default_factory=dict)

    def __post_init__(self):
        places = tuple(self.places)
        transitions = tuple(self.transitions)
        if len(set(places)) != len(places):
            raise StructureError("duplicate place id")
        if len(set(transitions)) != len(transitions):
            raise StructureError("duplicate transition id")
        pset = set(places)
        pre, cont, post = {}, {}, {}
        for t in transitions:
            pre[t] = frozenset(self.pre.get(t, ()))
            cont[t] = frozenset(self.cont.get(t, ()))
            post[t] = frozenset(self.post.get(t, ()))
            for kind, s in (("preset", pre[t]), ("context", cont[t]), ("postset", post[t])):
                unknown = s - pset
                if unknown:
                    raise StructureError(f"{kind} of {t!r} mentions unknown places {sorted(unknown)}")
            if not pre[t]:
                raise StructureError(f"transition {t!r} has an empty preset")
            if cont[t] & pre[t]:
                raise StructureError(f"context of {t!r} overlaps its preset: {sorted(cont[t] & pre[t])}")
            if cont[t] & post[t]:
                raise StructureError(f"context of {t!r} overlaps its postset: {sorted(cont[t] & post[t])}")
        initial = frozenset(self.initial)
        if initial - pset:
            raise StructureError(f"initial marking mentions unknown places {sorted(initial - pset)}")
        pnames = {p: self.place_names.get(p, p) for p in places}
        tnames = {t: self.transition_names.get(t, t) for t in transitions}
        index = {p: k for k, p in enumerate(places)}
        tindex = {t: k for k, t in enumerate(transitions)}

        def mask(s):
            m = 0
            for p in s:
                m |= 1 << index[p]
            return m

        for name, value in (
            ("places", places), ("transitions", transitions), ("pre", pre), ("cont", cont),
            ("post", post), ("initial", initial), ("place_names", pnames), ("transition_names", tnames),
            ("_pindex", index), ("_tindex", tindex),
            ("_pre", tuple(mask(pre[t]) for t in transitions)),
            ("_cont", tuple(mask(cont[t]) for t in transitions)),
            ("_post", tuple(mask(post[t]) for t in transitions)),
        ):
            object.__setattr__(self, name, value)
        object.__setattr__(self, "_need", tuple(a | b for a, b in zip(self._pre, self._cont)))

    def __eq__(self, other):
        if not isinstance(other, ReadPetriNet):
            return NotImplemented
        return (
            set(self.places) == set(other.places)
            and set(self.transitions) == set(other.transitions)
            and self.pre == other.pre and self.cont == other.cont and self.post == other.post
            and self.initial == other.initial
            and self.place_names == other.place_names
            and self.transition_names == other.transition_names
        )

    __hash__ = None

    @property
    def is_loop_free(self) -> bool:
        return all(not (self.pre[t] & self.post[t]) for t in self.transitions)

    def with_initial(self, marking: Iterable[str]) -> "ReadPetriNet":
        return ReadPetriNet(self.places, self.transitions, self.pre, self.cont, self.post,
                            frozenset(marking), self.place_names, self.transition_names)

    # --- bitmask plumbing -------------------------------------------------
    def to_mask(self, marking: Iterable[str]) -> int:
        m = 0
        for p in marking:
            try:
                m |= 1 << self._pindex[p]
            except KeyError:
                raise StructureError(f"unknown place {p!r}") from None
        return m

    def to_marking(self, mask: int) -> Marking:
        out = []
        k = 0
        while mask:
            if mask & 1:
                out.append(self.places[k])
            mask >>= 1
            k += 1
        return frozenset(out)

    def _enabled(self, m: int) -> list:
        return [k for k, need in enumerate(self._need) if m & need == need]

    def _fire(self, m: int, k: int) -> int:
        rest = m & ~self._pre[k]
        clash = rest & self._post[k]
        if clash:
            raise SafetyViolation(self.transitions[k], self.to_marking(m), self.to_marking(clash))
        return rest | self._post[k]

    def _atomic_successors(self, m: int):
        return [(self.transitions[k], self._fire(m, k)) for k in self._enabled(m)]

    def _steps(self, m: int, maximal: bool, max_step: int | None):
        enabled = self._enabled(m)
        out = []

        def extend(start, chosen, used_pre):
            if chosen:
                if not maximal or all(
                    self._pre[k] & used_pre for k in enabled if k not in chosen
                ):
                    if max_step is not None and len(chosen) > max_step:
                        raise BudgetExceeded(f"step of size {len(chosen)} exceeds cap {max_step}")
                    out.append(tuple(chosen))
            for pos in range(start, len(enabled)):
                k = enabled[pos]
                if self._pre[k] & used_pre:
                    continue
                chosen.append(k)
                extend(pos + 1, chosen, used_pre | self._pre[k])
                chosen.pop()

        extend(0, [], 0)
        return out

    def _fire_step(self, m: int, step: Sequence[int]) -> int:
        consumed = produced = 0
        for k in step:
            if produced & self._post[k]:
                raise SafetyViolation(
                    "{" + ",".join(self.transitions[j] for j in step) + "}",
                    self.to_marking(m), self.to_marking(produced & self._post[k]),
                )
            consumed |= self._pre[k]
            produced |= self._post[k]
        rest = m & ~consumed
        if rest & produced:
            raise SafetyViolation(
                "{" + ",".join(self.transitions[j] for j in step) + "}",
                self.to_marking(m), self.to_marking(rest & produced),
            )
        return rest | produced

    def _step_successors(self, m: int, maximal: bool = False, max_step: int | None = None):
        return [
            (frozenset(self.transitions[k] for k in step), self._fire_step(m, step))
            for step in self._steps(m, maximal, max_step)
        ]


# --------------------------------------------------------------------------
# Atomic and step semantics
# --------------------------------------------------------------------------


def atomic_enabled(net: ReadPetriNet, marking: Iterable[str]) -> set:
    return {net.transitions[k] for k in net._enabled(net.to_mask(marking))}


def atomic_fire(net: ReadPetriNet, marking: Iterable[str], t: str) -> Marking:
    m = net.to_mask(marking)
    k = net._tindex[t]
    if m & net._need[k] != net._need[k]:
        raise NotEnabled(f"{t!r} is not enabled in {sorted(marking)}")
    return net.to_marking(net._fire(m, k))


def step_successors(net: ReadPetriNet, marking: Iterable[str], maximal: bool = False,
                    max_step: int | None = None) -> set:
    """``(step, marking)`` pairs; steps are nonempty frozensets of transition ids."""
    m = net.to_mask(marking)
    return {(s, net.to_marking(m2)) for s, m2 in net._step_successors(m, maximal, max_step)}


def fire_step(net: ReadPetriNet, marking: Iterable[str], step: Iterable[str]) -> Marking:
    m = net.to_mask(marking)
    ks = [net._tindex[t] for t in step]
    for k in ks:
        if m & net._need[k] != net._need[k]:
            raise NotEnabled(f"{net.transitions[k]!r} is not enabled in {sorted(marking)}")
    used = 0
    for k in ks:
        if used & net._pre[k]:
            raise NotEnabled(f"presets in step {sorted(step)} are not disjoint")
        used |= net._pre[k]
    return net.to_marking(net._fire_step(m, ks))


SEMANTICS = ("atomic", "step", "maxstep")


def explore(net: ReadPetriNet, semantics: str = "atomic", start: Iterable[str] | None = None,
            max_states: int | None = None, max_step: int | None = None) -> TransitionRelation:
    """Marking graph under ``semantics``; labels are transition ids or frozenset steps."""
    m0 = net.to_mask(net.initial if start is None else start)
    if semantics == "atomic":
        succ = net._atomic_successors
    elif semantics in ("step", "maxstep"):
        maximal = semantics == "maxstep"

        def succ(m):
            return net._step_successors(m, maximal, max_step)
    else:
        raise ValueError(f"unknown semantics {semantics!r}")
    rel = bfs([m0], succ, semantics, max_states)
    to = net.to_marking
    return TransitionRelation(
        semantics,
        frozenset(to(m) for m in rel.states),
        frozenset((to(a), lab, to(b)) for a, lab, b in rel.edges),
        (to(m0),),
        {to(k): (to(v[0]), v[1]) for k, v in rel.parents.items()},
    )


def reachable_markings(net: ReadPetriNet, semantics: str = "atomic", start=None,
                       max_states: int | None = None) -> set:
    m0 = net.to_mask(net.initial if start is None else start)
    if semantics == "atomic":
        def step(m):
            return [m2 for _, m2 in net._atomic_successors(m)]
    else:
        maximal = semantics == "maxstep"

        def step(m):
            return [m2 for _, m2 in net._step_successors(m, maximal)]
    return {net.to_marking(m) for m in reachable_set([m0], step, max_states)}


def check_safe(net: ReadPetriNet, max_states: int | None = None) -> set:
    """Explore atomically from ``M0``; raises :class:`SafetyViolation` if the net is not safe."""
    return reachable_markings(net, "atomic", max_states=max_states)


# --------------------------------------------------------------------------
# Runs
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class Run:
    """A replayed run with the marking before and after every element."""

    kind: str  # 'a-run' | 's-run' | 'i-run' | 's±-run'
    sequence: tuple
    markings: tuple

    @property
    def final(self) -> Marking:
        return self.markings[-1]


def replay_atomic(net: ReadPetriNet, sequence: Sequence[str], start=None, kind: str = "a-run") -> Run:
    marking = frozenset(net.initial if start is None else start)
    markings = [marking]
    for t in sequence:
        if t not in net._tindex:
            raise NotEnabled(f"unknown transition {t!r}")
        marking = atomic_fire(net, marking, t)
        markings.append(marking)
    return Run(kind, tuple(sequence), tuple(markings))


def is_a_run(net: ReadPetriNet, sequence: Sequence[str], start=None) -> bool:
    try:
        replay_atomic(net, sequence, start)
    except NotEnabled:
        return False
    return True


def replay_steps(net: ReadPetriNet, steps: Sequence[Iterable[str]], start=None) -> Run:
    marking = frozenset(net.initial if start is None else start)
    markings = [marking]
    frozen = []
    for s in steps:
        s = frozenset(s)
        marking = fire_step(net, marking, s)
        frozen.append(s)
        markings.append(marking)
    return Run("s-run", tuple(frozen), tuple(markings))


def maximal_a_runs(net: ReadPetriNet, max_depth: int = 20) -> set:
    """Firing sequences from ``M0`` that cannot be extended (up to ``max_depth``)."""
    out = set()

    def go(m, prefix):
        succ = net._atomic_successors(m)
        if not succ or len(prefix) >= max_depth:
            out.add(tuple(prefix))
            return
        for t, m2 in succ:
            go(m2, prefix + [t])

    go(net.to_mask(net.initial), [])
    return out


# --------------------------------------------------------------------------
# split(N) and the interval semantics
# --------------------------------------------------------------------------


def consume_copy(p):
    return f"{p}.c"


def read_copy(p):
    return f"{p}.r"


def minus(t):
    return f"{t}.minus"


def plus(t):
    return f"{t}.plus"


def lock(t):
    return f"lock.{t}"


@dataclass(frozen=True, eq=False)
class SplitNet:
    """``split(N)`` together with provenance of every place and transition."""

    net: ReadPetriNet
    source: ReadPetriNet
    place_copies: Mapping  # p -> (p.c, p.r)
    transition_parts: Mapping  # t -> (t.minus, t.plus, lock.t)
    origin: Mapping  # split transition id -> (t, '-' | '+')

    def complete(self, marking: Iterable[str]) -> Marking:
        """The complete split marking ``{p.c, p.r | p in M}``."""
        return frozenset(q for p in marking for q in self.place_copies[p])

    def is_complete(self, marking: Iterable[str]) -> bool:
        locks = {parts[2] for parts in self.transition_parts.values()}
        return not (locks & set(marking))

    def project(self, marking: Iterable[str]) -> Marking:
        """Original marking of a complete split marking."""
        marking = frozenset(marking)
        if not self.is_complete(marking):
            raise ValueError("only complete markings project back to the original net")
        out = set()
        for p, (pc, pr) in self.place_copies.items():
            has_c, has_r = pc in marking, pr in marking
            if has_c != has_r:
                raise ValueError(f"incoherent copies of {p!r} in complete marking")
            if has_c:
                out.add(p)
        return frozenset(out)


def split(net: ReadPetriNet) -> SplitNet:
    places, transitions = [], []
    pre, cont, post = {}, {}, {}
    pnames, tnames = {}, {}
    copies, parts, origin = {}, {}, {}
    for p in net.places:
        pc, pr = consume_copy(p), read_copy(p)
        copies[p] = (pc, pr)
        places += [pc, pr]
        pnames[pc] = f"{net.place_names[p]}.c"
        pnames[pr] = f"{net.place_names[p]}.r"
    for t in net.transitions:
        tm, tp, pt = minus(t), plus(t), lock(t)
        parts[t] = (tm, tp, pt)
        places.append(pt)
        pnames[pt] = f"lock.{net.transition_names[t]}"
        transitions += [tm, tp]
        tnames[tm] = f"{net.transition_names[t]}-"
        tnames[tp] = f"{net.transition_names[t]}+"
        origin[tm] = (t, "-")
        origin[tp] = (t, "+")
        pre[tm] = {copies[p][0] for p in net.pre[t]}
        cont[tm] = {copies[p][1] for p in net.cont[t]}
        post[tm] = {pt}
        pre[tp] = {copies[p][1] for p in net.pre[t]} | {pt}
        cont[tp] = set()
        post[tp] = {q for p in net.post[t] for q in copies[p]}
    initial = {q for p in net.initial for q in copies[p]}
    out = ReadPetriNet(tuple(places), tuple(transitions), pre, cont, post, frozenset(initial), pnames, tnames)
    return SplitNet(out, net, copies, parts, origin)


def _lock_checked_successors(sn: SplitNet):
    """Atomic successors in split(N), asserting that a pending ``t+`` stays enabled."""
    net = sn.net
    pending = [
        (1 << net._pindex[pt], net._need[net._tindex[tp]], tp)
        for _, tp, pt in sn.transition_parts.values()
    ]

    def succ(m):
        for lock_bit, need, tp in pending:
            if m & lock_bit and m & need != need:
                raise InvariantViolation(f"{tp} lost its preset while its lock is held")
        return net._atomic_successors(m)

    return succ


def i_run_successors(sn: SplitNet, marking: Iterable[str]) -> set:
    m = sn.net.to_mask(marking)
    return {(t, sn.net.to_marking(m2)) for t, m2 in _lock_checked_successors(sn)(m)}


def replay_interval(net: ReadPetriNet, sequence: Sequence[str], start=None) -> Run:
    """Replay an i-run (a sequence over split transition ids) from the complete ``start``."""
    sn = split(net)
    begin = sn.complete(net.initial if start is None else start)
    return replay_atomic(sn.net, sequence, begin, kind="i-run")


def complete_run(net: ReadPetriNet, sequence: Sequence[str], start=None) -> tuple:
    """Append the missing ``t+`` of every unmatched ``t-`` in order of their ``t-``."""
    sn = split(net)
    replay_interval(net, sequence, start)
    open_ = []
    for u in sequence:
        t, phase = sn.origin[u]
        if phase == "-":
            open_.append(t)
        else:
            open_.remove(t)
    completed = tuple(sequence) + tuple(plus(t) for t in open_)
    replay_interval(net, completed, start)
    return completed


def interval_explore(net: ReadPetriNet, start=None, max_states: int | None = None) -> TransitionRelation:
    """Marking graph of split(N) from the complete marking of ``start``."""
    sn = split(net)
    m0 = sn.net.to_mask(sn.complete(net.initial if start is None else start))
    rel = bfs([m0], _lock_checked_successors(sn), "interval", max_states)
    to = sn.net.to_marking
    return TransitionRelation(
        "interval",
        frozenset(to(m) for m in rel.states),
        frozenset((to(a), lab, to(b)) for a, lab, b in rel.edges),
        (to(m0),),
        {to(k): (to(v[0]), v[1]) for k, v in rel.parents.items()},
    )


def interval_reachable_markings(net: ReadPetriNet, start=None, max_states: int | None = None) -> set:
    """Markings ``M2`` of N with ``start ⇒*i M2``."""
    sn = split(net)
    m0 = sn.net.to_mask(sn.complete(net.initial if start is None else start))
    succ = _lock_checked_successors(sn)
    states = reachable_set([m0], lambda m: [m2 for _, m2 in succ(m)], max_states)
    lock_mask = sn.net.to_mask(parts[2] for parts in sn.transition_parts.values())
    return {sn.project(sn.net.to_marking(m)) for m in states if not m & lock_mask}


def interval_reachable(net: ReadPetriNet, m1: Iterable[str], m2: Iterable[str],
                       max_states: int | None = None) -> bool:
    sn = split(net)
    src = sn.net.to_mask(sn.complete(m1))
    dst = sn.net.to_mask(sn.complete(m2))
    succ = _lock_checked_successors(sn)
    rel = bfs([src], succ, "interval", max_states, record_edges=False, goal=lambda m: m == dst)
    return dst in rel.states


def spm_runs_check(net: ReadPetriNet, sequence: Sequence[str], start=None) -> bool:
    """Whether ``sequence`` (split transition ids) is an s±-run of ``net``.

    The decomposition ``u1- u1+ ... uk- uk+`` is forced by the maximal
    blocks of minus and plus phases; each block pair must name the same
    transition set and the sets must form an s-run.
    """
    sn = split(net)
    blocks = []
    for u in sequence:
        if u not in sn.origin:
            return False
        t, phase = sn.origin[u]
        if blocks and blocks[-1][0] == phase:
            blocks[-1][1].append(t)
        else:
            blocks.append((phase, [t]))
    if len(blocks) % 2:
        return False
    steps = []
    for (pm, ts_minus), (pp, ts_plus) in zip(blocks[::2], blocks[1::2]):
        if pm != "-" or pp != "+":
            return False
        if len(set(ts_minus)) != len(ts_minus) or sorted(ts_minus) != sorted(ts_plus):
            return False
        steps.append(ts_minus)
    try:
        replay_steps(net, steps, start)
    except NotEnabled:
        return False
    return True


def spm_runs(steps: Sequence[Iterable[str]]):
    """Every s±-run obtained from the s-run ``steps``."""
    def go(k):
        if k == len(steps):
            yield ()
            return
        ts = sorted(steps[k])
        for u_minus in permutations(ts):
            for u_plus in permutations(ts):
                head = tuple(minus(t) for t in u_minus) + tuple(plus(t) for t in u_plus)
                for tail in go(k + 1):
                    yield head + tail
    return go(0)


# --------------------------------------------------------------------------
# Loops
# --------------------------------------------------------------------------


def eliminate_loops(net: ReadPetriNet) -> ReadPetriNet:
    """Turn every place in ``pre(t) ∩ post(t)`` into a read arc of ``t``."""
    pre, cont, post = dict(net.pre), dict(net.cont), dict(net.post)
    for t in net.transitions:
        loop = net.pre[t] & net.post[t]
        if not loop:
            continue
        if loop & net.cont[t]:
            raise StructureError(f"{t!r}: looped places {sorted(loop & net.cont[t])} already in context")
        if not net.pre[t] - loop:
            raise StructureError(f"{t!r}: removing loop {sorted(loop)} would empty the preset")
        pre[t] = net.pre[t] - loop
        post[t] = net.post[t] - loop
        cont[t] = net.cont[t] | loop
    return ReadPetriNet(net.places, net.transitions, pre, cont, post, net.initial,
                        net.place_names, net.transition_names)


# --------------------------------------------------------------------------
# JSON
# --------------------------------------------------------------------------


def net_to_dict(net: ReadPetriNet) -> dict:
    return {
        "places": [
            {"id": p, "name": net.place_names[p], "marked": p in net.initial}
            for p in sorted(net.places)
        ],
        "transitions": [
            {
                "id": t,
                "name": net.transition_names[t],
                "pre": sorted(net.pre[t]),
                "cont": sorted(net.cont[t]),
                "post": sorted(net.post[t]),
            }
            for t in sorted(net.transitions)
        ],
    }


def dumps_net(net: ReadPetriNet) -> str:
    return json.dumps(net_to_dict(net), indent=2, ensure_ascii=False, sort_keys=True) + "\n"


def net_from_dict(data: dict) -> ReadPetriNet:
    try:
        places = [str(p["id"]) for p in data["places"]]
        pnames = {str(p["id"]): p.get("name", str(p["id"])) for p in data["places"]}
        initial = {str(p["id"]) for p in data["places"] if p.get("marked", False)}
        trans = data["transitions"]
        tids = [str(t["id"]) for t in trans]
        tnames = {str(t["id"]): t.get("name", str(t["id"])) for t in trans}
        pre = {str(t["id"]): [str(p) for p in t.get("pre", [])] for t in trans}
        cont = {str(t["id"]): [str(p) for p in t.get("cont", [])] for t in trans}
        post = {str(t["id"]): [str(p) for p in t.get("post", [])] for t in trans}
    except (KeyError, TypeError) as exc:
        raise ParseError(f"malformed net JSON: {exc}") from None
    return ReadPetriNet(tuple(places), tuple(tids), pre, cont, post, frozenset(initial), pnames, tnames)


def loads_net(text: str) -> ReadPetriNet:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(exc.msg, exc.lineno, exc.colno) from None
    return net_from_dict(data)


def load_net(path) -> ReadPetriNet:
    return loads_net(Path(path).read_text(encoding="utf-8"))


__all__ = [
    "ReadPetriNet", "Marking", "Run", "SplitNet", "atomic_enabled", "atomic_fire", "step_successors",
    "fire_step", "explore", "reachable_markings", "check_safe", "replay_atomic", "replay_steps",
    "replay_interval", "is_a_run", "maximal_a_runs", "split", "i_run_successors", "complete_run",
    "interval_explore", "interval_reachable", "interval_reachable_markings", "spm_runs_check",
    "spm_runs", "eliminate_loops", "net_to_dict", "net_from_dict", "dumps_net", "loads_net",
    "load_net", "default_budget",
]
