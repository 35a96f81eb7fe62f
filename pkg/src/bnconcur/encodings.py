"""Translations between Boolean networks and read Petri nets, and the
interval / most-permissive encodings of a BN as a larger asynchronous BN."""
from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Callable, Iterable, Mapping, Sequence

from . import boolfun, rpn
from .bn import BooleanNetwork, Configuration, all_configs, reachable
from .boolfun import And, BoolExpr, Dnf, Not, Var, conj, disj
from .errors import DimensionError, StructureError
from .explore import reachable_set
from .rpn import ReadPetriNet

UP, DOWN = "up", "down"


# --------------------------------------------------------------------------
# BN -> RPN
# --------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class BnRpnImage:
    """The net encoding a BN, with the component/value reading of each place.

    Place ``str(i + 1)`` holds "component i is 0" and ``str(i + 1 + n)``
    "component i is 1" (0-based ``i``), so ``Γ(x) = {i + 1 + n·x_i}``.
    """

    net: ReadPetriNet
    n: int
    names: tuple
    transition_info: Mapping  # t -> (component, 'up'|'down', Clause | None)

    def place(self, i: int, value: int) -> str:
        return str(i + 1 + self.n * value)

    def var(self, p: str) -> int:
        return (int(p) - 1) % self.n

    def val(self, p: str) -> int:
        return (int(p) - 1) // self.n

    def direction(self, t: str) -> str:
        return self.transition_info[t][1]

    def config_to_marking(self, x: Sequence[int]) -> frozenset:
        if len(x) != self.n:
            raise DimensionError(f"configuration of length {len(x)} for dimension {self.n}")
        return frozenset(self.place(i, v) for i, v in enumerate(x))

    def marking_to_config(self, marking: Iterable[str]) -> Configuration:
        marking = set(marking)
        x = []
        for i in range(self.n):
            lo, hi = self.place(i, 0) in marking, self.place(i, 1) in marking
            if lo == hi:
                state = "both" if lo else "neither"
                raise StructureError(f"marking has {state} value places of component {self.names[i]!r}")
            x.append(int(hi))
        if len(marking) != self.n:
            raise StructureError("marking contains places outside the Boolean encoding")
        return tuple(x)


def bn_to_rpn(f: BooleanNetwork, initial: Sequence[int] | None = None,
              dnf: Callable[[BoolExpr, int], Dnf] = boolfun.to_min_dnf) -> BnRpnImage:
    """Encode ``f`` as a read Petri net.

    One up-transition per clause of ``DNF[¬x_i ∧ f_i]`` and one
    down-transition per clause of ``DNF[x_i ∧ ¬f_i]``; the other literals of
    the clause become read arcs.  ``dnf`` defaults to the prime-implicant
    form.
    """
    n = f.n
    if n > boolfun.MAX_EXHAUSTIVE_DIM:
        raise DimensionError(f"dimension {n} exceeds cap {boolfun.MAX_EXHAUSTIVE_DIM}")

    def place(i, v):
        return str(i + 1 + n * v)

    places = [place(i, v) for v in (0, 1) for i in range(n)]
    pnames = {place(i, v): f"{f.names[i]}_{v}" for i in range(n) for v in (0, 1)}
    transitions, pre, cont, post, tnames, info = [], {}, {}, {}, {}, {}
    for i, fi in enumerate(f.functions):
        for direction, guard in ((UP, And((Not(Var(i)), fi))), (DOWN, And((Var(i), Not(fi))))):
            clauses = list(dnf(guard, n))
            arrow = "↑" if direction == UP else "↓"
            for k, clause in enumerate(clauses, start=1):
                suffix = f".{k}" if len(clauses) > 1 else ""
                t = f"{f.names[i]}.{direction}{suffix}"
                transitions.append(t)
                tnames[t] = f"{f.names[i]}{arrow}{k if len(clauses) > 1 else ''}"
                src, dst = (0, 1) if direction == UP else (1, 0)
                pre[t] = {place(i, src)}
                post[t] = {place(i, dst)}
                cont[t] = {place(j, 0) for j in clause.negatives if j != i} | {
                    place(j, 1) for j in clause.positives if j != i
                }
                info[t] = (i, direction, clause)
    m0 = frozenset(place(i, v) for i, v in enumerate(initial)) if initial is not None else frozenset()
    net = ReadPetriNet(tuple(places), tuple(transitions), pre, cont, post, m0, pnames, tnames)
    return BnRpnImage(net, n, f.names, info)


_VALUE_NAME = re.compile(r"(.+)_([01])\Z")


def image_from_net(net: ReadPetriNet) -> BnRpnImage:
    """Recognise a net with the place layout produced by :func:`bn_to_rpn`.

    Needed to classify arcs of nets loaded from disk.  Raises
    :class:`StructureError` when the complemented/Boolean/dichotomy
    structure does not hold.
    """
    if len(net.places) % 2:
        raise StructureError("a Boolean net image has an even number of places")
    n = len(net.places) // 2
    if set(net.places) != {str(k) for k in range(1, 2 * n + 1)}:
        raise StructureError("places must be numbered 1..2n")
    names = []
    for i in range(n):
        m = _VALUE_NAME.match(net.place_names[str(i + 1)])
        names.append(m.group(1) if m else f"x{i + 1}")
    info = {}
    for t in net.transitions:
        if len(net.pre[t]) != 1 or len(net.post[t]) != 1:
            raise StructureError(f"{t!r} must have exactly one input and one output place")
        (p,), (q,) = net.pre[t], net.post[t]
        i, v = (int(p) - 1) % n, (int(p) - 1) // n
        if (int(q) - 1) % n != i or (int(q) - 1) // n == v:
            raise StructureError(f"{t!r} does not flip a single component")
        info[t] = (i, UP if v == 0 else DOWN, None)
    return BnRpnImage(net, n, tuple(names), info)


# --------------------------------------------------------------------------
# RPN -> BN
# --------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class RpnBnImage:
    bn: BooleanNetwork
    net: ReadPetriNet
    place_index: Mapping
    transition_index: Mapping

    def marking_to_config(self, marking: Iterable[str]) -> Configuration:
        x = [0] * self.bn.n
        for p in marking:
            x[self.place_index[p]] = 1
        return tuple(x)

    def is_quiescent(self, z: Sequence[int]) -> bool:
        """No transition component is occurring."""
        return not any(z[k] for k in self.transition_index.values())

    def project(self, z: Sequence[int]) -> frozenset:
        return frozenset(p for p, k in self.place_index.items() if z[k])


def _component_names(net: ReadPetriNet):
    ids = list(net.places) + list(net.transitions)
    if len(set(ids)) == len(ids) and all(
        boolfun.IDENT_RE.match(s) and s not in ("0", "1") for s in ids
    ):
        return list(net.places), list(net.transitions)
    used = set()

    def clean(prefix, s):
        base = prefix + re.sub(r"[^A-Za-z0-9_.]", "_", s)
        name, k = base, 1
        while name in used:
            k += 1
            name = f"{base}_{k}"
        used.add(name)
        return name

    return [clean("p.", p) for p in net.places], [clean("t.", t) for t in net.transitions]


def rpn_to_bn(net: ReadPetriNet, validate: bool = True, max_states: int | None = None) -> RpnBnImage:
    """Encode a safe loop-free net as a BN of dimension ``|P| + |T|``.

    With ``validate`` the net's reachable markings are explored first so
    that an unsafe net is rejected instead of silently mis-encoded.
    """
    if not net.is_loop_free:
        loops = [t for t in net.transitions if net.pre[t] & net.post[t]]
        raise StructureError(f"transitions with loops {loops}; run eliminate_loops first")
    if validate:
        rpn.check_safe(net, max_states)
    pnames, tnames = _component_names(net)
    np_ = len(net.places)
    pidx = {p: k for k, p in enumerate(net.places)}
    tidx = {t: np_ + k for k, t in enumerate(net.transitions)}
    producers = {p: [t for t in net.transitions if p in net.post[t]] for p in net.places}
    consumers = {p: [t for t in net.transitions if p in net.pre[t]] for p in net.places}
    idle = [Not(Var(tidx[t])) for t in net.transitions]
    functions = []
    for p in net.places:
        functions.append(disj(
            [Var(tidx[t]) for t in producers[p]]
            + [conj([Var(pidx[p])] + [Not(Var(tidx[t])) for t in consumers[p]])]
        ))
    for t in net.transitions:
        need = sorted(net.pre[t] | net.cont[t], key=pidx.get)
        start = conj([Var(pidx[p]) for p in need] + idle)
        pending = disj(
            [Not(Var(pidx[p])) for p in sorted(net.post[t], key=pidx.get)]
            + [Var(pidx[p]) for p in sorted(net.pre[t], key=pidx.get)]
        )
        functions.append(disj([start, conj([Var(tidx[t]), pending])]))
    f = BooleanNetwork(tuple(pnames + tnames), tuple(functions))
    return RpnBnImage(f, net, pidx, tidx)


def projected_reachable_markings(image: RpnBnImage, marking: Iterable[str] | None = None,
                                 max_states: int | None = None) -> set:
    """Markings of quiescent configurations async-reachable from ``Σ(M)``."""
    start = image.marking_to_config(image.net.initial if marking is None else marking)
    rel = reachable("async", image.bn, start, max_states)
    return {image.project(z) for z in rel.states if image.is_quiescent(z)}


# --------------------------------------------------------------------------
# Interval encoding
# --------------------------------------------------------------------------


def gamma(z: Sequence[int]) -> Configuration:
    """Read-node projection of a doubled configuration."""
    return tuple(z[1::2])


def alpha(x: Sequence[int]) -> Configuration:
    return tuple(v for v in x for _ in (0, 1))


def is_consistent(z: Sequence[int]) -> bool:
    return alpha(gamma(z)) == tuple(z)


@dataclass(frozen=True, eq=False)
class IntervalBn:
    """``⟨⟨f⟩⟩``: component ``2i`` is the write node, ``2i + 1`` the read node of ``i``."""

    bn: BooleanNetwork
    source: BooleanNetwork

    gamma = staticmethod(gamma)
    alpha = staticmethod(alpha)
    is_consistent = staticmethod(is_consistent)

    @staticmethod
    def write(i: int) -> int:
        return 2 * i

    @staticmethod
    def read(i: int) -> int:
        return 2 * i + 1


def interval_encode(f: BooleanNetwork) -> IntervalBn:
    if 2 * f.n > boolfun.MAX_EXHAUSTIVE_DIM:
        raise DimensionError(f"interval encoding of dimension {f.n} exceeds cap")
    reads = {j: Var(2 * j + 1) for j in range(f.n)}
    names, functions = [], []
    for i, fi in enumerate(f.functions):
        w, r = Var(2 * i), Var(2 * i + 1)
        target = boolfun.substitute(fi, reads)
        functions.append(disj([conj([target, disj([Not(r), w])]), conj([Not(r), w])]))
        functions.append(w)
        names += [f"{f.names[i]}.w", f"{f.names[i]}.r"]
    return IntervalBn(BooleanNetwork(tuple(names), tuple(functions)), f)


def format_doubled(z: Sequence[int]) -> str:
    """Render ``101110`` as ``10 11 10``."""
    s = "".join(str(v) for v in z)
    return " ".join(s[k:k + 2] for k in range(0, len(s), 2))


# --------------------------------------------------------------------------
# Most-permissive encoding
# --------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class MpBn:
    """``⟨⟨f⟩⟩mp``: write/read pairs as in :class:`IntervalBn` plus one coin per component.

    Coin ``2n + j`` selects which copy of ``j`` is read: 1 the written
    (after-update) value, 0 the read (before-update) value.
    """

    bn: BooleanNetwork
    source: BooleanNetwork

    @property
    def n(self) -> int:
        return self.source.n

    def coin(self, j: int) -> int:
        return 2 * self.n + j

    def project(self, z: Sequence[int]) -> Configuration:
        return tuple(z[: 2 * self.n])

    def to_config3(self, z: Sequence[int]):
        """Three-valued reading: settled components keep their value, pending ones are ½."""
        from .mpmv import HALF

        return tuple(z[2 * i] if z[2 * i] == z[2 * i + 1] else HALF for i in range(self.n))

    def starts(self, x: Sequence[int]):
        """``α(x)`` with every coin assignment."""
        base = alpha(x)
        return [base + coins for coins in all_configs(self.n)]


def mp_encode(f: BooleanNetwork) -> MpBn:
    n = f.n
    if 3 * n > boolfun.MAX_EXHAUSTIVE_DIM:
        raise DimensionError(f"most-permissive encoding of dimension {n} exceeds cap")

    def either(j):
        c = Var(2 * n + j)
        return conj([disj([c, Var(2 * j + 1)]), disj([Not(c), Var(2 * j)])])

    literal = {j: either(j) for j in range(n)}
    names, functions = [], []
    for i, fi in enumerate(f.functions):
        functions += [boolfun.substitute(fi, literal), Var(2 * i)]
        names += [f"{f.names[i]}.w", f"{f.names[i]}.r"]
    for j in range(n):
        functions.append(Not(Var(2 * n + j)))
        names.append(f"coin.{f.names[j]}")
    return MpBn(BooleanNetwork(tuple(names), tuple(functions)), f)


def mp_encoding_divergences(f: BooleanNetwork, max_states: int | None = None) -> dict:
    """Compare Boolean reachability of ``⟨⟨f⟩⟩mp`` (coins projected out) with →mp.

    For each ``x`` returns the pair ``(only_encoding, only_mp)`` of Boolean
    targets on which the two disagree; an empty dict means no divergence.
    This is a diagnostic, not an equivalence claim.
    """
    from .mpmv import mp_reachable_set

    enc = mp_encode(f)
    out = {}
    for x in all_configs(f.n):
        states = reachable_set(enc.starts(x), lambda z: _async_step(enc.bn, z), max_states)
        via_enc = {gamma(enc.project(z)) for z in states if is_consistent(enc.project(z))}
        via_mp = {y for y in mp_reachable_set(f, x, max_states) if all(v in (0, 1) for v in y)}
        via_mp = {tuple(int(v) for v in y) for y in via_mp}
        if via_enc != via_mp:
            out[x] = (via_enc - via_mp, via_mp - via_enc)
    return out


def _async_step(g: BooleanNetwork, z):
    out = []
    for i in g.unstable(z):
        y = list(z)
        y[i] = 1 - y[i]
        out.append(tuple(y))
    return out
