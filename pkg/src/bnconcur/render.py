"""Deterministic DOT output for transition graphs, influence graphs and nets."""
from __future__ import annotations

from typing import Callable, Iterable

from .bn import BooleanNetwork, InfluenceGraph
from .rpn import ReadPetriNet


def _q(s) -> str:
    return '"' + str(s).replace("\\", "\\\\").replace('"', '\\"') + '"'


def graph_dot(states: Iterable, edges: Iterable, initial: Iterable = (),
              fmt: Callable = str, label: Callable = str, name: str = "stg") -> str:
    """Render states/edges; ``edges`` are ``(source, label, target)`` triples."""
    initial = {fmt(s) for s in initial}
    nodes = sorted({fmt(s) for s in states})
    lines = [f"digraph {name} {{", "  node [shape=box, fontname=monospace];"]
    for v in nodes:
        extra = ", peripheries=2" if v in initial else ""
        lines.append(f"  {_q(v)} [label={_q(v)}{extra}];")
    rendered = sorted({(fmt(a), label(lab), fmt(b)) for a, lab, b in edges})
    for a, lab, b in rendered:
        lines.append(f"  {_q(a)} -> {_q(b)} [label={_q(lab)}];")
    lines.append("}")
    return "\n".join(lines) + "\n"


def influence_dot(f: BooleanNetwork, g: InfluenceGraph) -> str:
    """Positive edges solid, negative edges dashed and labelled with a minus sign."""
    lines = ["digraph influence {", "  node [shape=circle];"]
    for name in f.names:
        lines.append(f"  {_q(name)};")
    for j, i in sorted(g.positive):
        lines.append(f"  {_q(f.names[j])} -> {_q(f.names[i])} [style=solid, arrowhead=normal];")
    for j, i in sorted(g.negative):
        lines.append(f"  {_q(f.names[j])} -> {_q(f.names[i])} [style=dashed, arrowhead=tee, label=\"−\"];")
    lines.append("}")
    return "\n".join(lines) + "\n"


def net_dot(net: ReadPetriNet) -> str:
    """Places as circles (double if initially marked), transitions as boxes, read arcs undirected."""
    lines = ["digraph net {"]
    for p in sorted(net.places):
        shape = "doublecircle" if p in net.initial else "circle"
        lines.append(f"  {_q('p:' + p)} [shape={shape}, label={_q(net.place_names[p])}];")
    for t in sorted(net.transitions):
        lines.append(f"  {_q('t:' + t)} [shape=box, label={_q(net.transition_names[t])}];")
        for p in sorted(net.pre[t]):
            lines.append(f"  {_q('p:' + p)} -> {_q('t:' + t)};")
        for p in sorted(net.post[t]):
            lines.append(f"  {_q('t:' + t)} -> {_q('p:' + p)};")
        for p in sorted(net.cont[t]):
            lines.append(f"  {_q('p:' + p)} -> {_q('t:' + t)} [dir=none, style=bold];")
    lines.append("}")
    return "\n".join(lines) + "\n"
