"""``bnconcur`` command line."""
from __future__ import annotations

import argparse
import hashlib
import json
import sys
import time
from pathlib import Path

from . import __version__, bn, encodings, mpmv, render, rpn, sensitivity
from .bn import format_config, parse_config
from .errors import (
    BudgetExceeded,
    DimensionError,
    InvariantViolation,
    NotEnabled,
    ParseError,
    SafetyViolation,
    StructureError,
)

EXIT_OK, EXIT_FALSE, EXIT_INPUT, EXIT_BUDGET = 0, 1, 2, 3
BN_MODES = ("async", "sync", "general", "interval", "mp")
NET_MODES = ("atomic", "step", "maxstep", "interval")


# --------------------------------------------------------------------------
# plumbing
# --------------------------------------------------------------------------


def _digest(paths) -> str:
    h = hashlib.sha256()
    for p in paths:
        h.update(Path(p).read_bytes())
    return h.hexdigest()


def _command_record(args) -> dict:
    skip = {"handler", "output", "workers", "timing"}
    return {
        "name": args.command,
        "options": {k: v for k, v in sorted(vars(args).items()) if k not in skip},
    }


def _report(args, result) -> str:
    doc = {
        "tool": "bnconcur",
        "version": __version__,
        "command": _command_record(args),
        "input_digest": _digest(args.inputs),
        "result": result,
    }
    return json.dumps(doc, indent=2, sort_keys=True, ensure_ascii=False) + "\n"


def _emit(args, text: str, provenance: dict | None = None):
    out = getattr(args, "output", None)
    if out:
        Path(out).write_text(text, encoding="utf-8")
        if provenance is not None:
            side = {
                "tool": "bnconcur",
                "version": __version__,
                "command": _command_record(args),
                "input_digest": _digest(args.inputs),
                "output": Path(out).name,
                **provenance,
            }
            Path(out + ".prov.json").write_text(
                json.dumps(side, indent=2, sort_keys=True, ensure_ascii=False) + "\n", encoding="utf-8"
            )
    else:
        sys.stdout.write(text)


def _is_net_path(path: str) -> bool:
    return path.endswith(".json")


def _load_bn(path):
    return bn.load_bn(path)


def _parse_places(text: str, net) -> frozenset:
    if text is None:
        return net.initial
    marking = frozenset(p.strip() for p in text.split(",") if p.strip())
    unknown = marking - set(net.places)
    if unknown:
        raise ValueError(f"unknown places {sorted(unknown)}")
    return marking


def _net_start(text, net):
    """A 0/1 string on a recognised BN image, otherwise a comma-separated place list."""
    if text is not None and text and set(text) <= {"0", "1"} and "," not in text:
        try:
            image = encodings.image_from_net(net)
        except StructureError:
            image = None
        if image is not None and len(text) == image.n:
            return image.config_to_marking(parse_config(text, image.n))
    return _parse_places(text, net)


def _pattern(text: str, n: int, three_valued: bool = False):
    """Goal predicate: ``0``/``1`` fixed, ``*`` any value, and ``h``/``½`` exactly ½ (3-valued)."""
    if len(text) != n:
        raise DimensionError(f"target {text!r} has length {len(text)}, expected {n}")
    wanted = []
    for ch in text:
        if ch in "01":
            wanted.append(int(ch))
        elif ch == "*":
            wanted.append(None)
        elif three_valued and ch in "h½":
            wanted.append(mpmv.HALF)
        else:
            raise ValueError(f"invalid character {ch!r} in target {text!r}")

    def match(x):
        return all(w is None or v == w for v, w in zip(x, wanted))

    return match


def _names_label(names):
    def label(lab):
        if isinstance(lab, frozenset):
            return "{" + ",".join(sorted(lab)) + "}"
        if isinstance(lab, tuple):
            return ",".join(names[i] for i in lab)
        return str(lab)
    return label


def _marking_str(m) -> str:
    return "{" + ",".join(sorted(m)) + "}"


# --------------------------------------------------------------------------
# state spaces
# --------------------------------------------------------------------------


def _bn_space(f, mode, start, max_states, goal=None):
    """Explored relation plus a state formatter for every BN mode."""
    if mode in bn.MODES:
        starts = [parse_config(start, f.n)] if start else list(bn.all_configs(f.n))
        rel = bn.reachable(mode, f, starts, max_states, goal=goal)
        return rel, format_config, f.names
    if mode == "interval":
        enc = encodings.interval_encode(f)
        starts = [parse_config(start, f.n)] if start else list(bn.all_configs(f.n))
        rel = bn.reachable("async", enc.bn, [encodings.alpha(x) for x in starts], max_states, goal=goal)
        return rel, format_config, enc.bn.names
    if mode == "mp":
        if start:
            starts = [mpmv.parse_config3(start, f.n)]
        else:
            starts = [mpmv.embed(x) for x in bn.all_configs(f.n)]
        rel = mpmv.mp_explore(f, starts, max_states, goal=goal)
        return rel, mpmv.format_config3, f.names
    raise ValueError(f"unknown mode {mode!r} for a Boolean network; expected one of {BN_MODES}")


def _net_space(net, mode, start, max_states, max_step):
    m0 = _net_start(start, net)
    if mode in rpn.SEMANTICS:
        return rpn.explore(net, mode, m0, max_states, max_step), None
    if mode == "interval":
        sn = rpn.split(net)
        return rpn.interval_explore(net, m0, max_states), sn
    raise ValueError(f"unknown mode {mode!r} for a net; expected one of {NET_MODES}")


def cmd_stg(args) -> int:
    if _is_net_path(args.model):
        net = rpn.load_net(args.model)
        mode = args.mode or "atomic"
        rel, _ = _net_space(net, mode, getattr(args, "from"), args.max_states, args.max_step)
        states, edges, initial = rel.states, rel.edges, rel.initial
        fmt, label = _marking_str, _names_label(())
    else:
        f = _load_bn(args.model)
        mode = args.mode or "async"
        rel, fmt, names = _bn_space(f, mode, getattr(args, "from"), args.max_states)
        label = _names_label(names)
        states, edges, initial = rel.states, rel.edges, rel.initial
        if args.project and mode == "interval":
            g = encodings.gamma
            states = {g(s) for s in states}
            edges = {(g(a), lab, g(b)) for a, lab, b in edges if g(a) != g(b)}
            initial = [g(s) for s in initial]
    if args.format == "json":
        result = {
            "mode": mode,
            "initial": sorted(fmt(s) for s in initial),
            "states": sorted(fmt(s) for s in states),
            "edges": sorted([fmt(a), label(lab), fmt(b)] for a, lab, b in edges),
        }
        _emit(args, _report(args, result))
    else:
        _emit(args, render.graph_dot(states, edges, initial, fmt, label))
    return EXIT_OK


def cmd_reach(args) -> int:
    source, target = getattr(args, "from"), args.to
    if _is_net_path(args.model):
        net = rpn.load_net(args.model)
        mode = args.mode or "atomic"
        rel, sn = _net_space(net, mode, source, args.max_states, args.max_step)
        goal = _net_start(target, net)
        if sn is not None:
            goal = sn.complete(goal)
        path = rel.path_to(goal)
        label = _names_label(())
        result = {
            "mode": mode,
            "reachable": path is not None,
            "witness": None if path is None else [label(lab) for _, lab, _ in path],
            "markings": None if path is None else [_marking_str(m) for m in [rel.initial[0]] + [b for _, _, b in path]],
        }
    else:
        f = _load_bn(args.model)
        mode = args.mode or "async"
        if not source:
            raise ValueError("reach needs --from")
        if mode == "interval":
            match = _pattern(target, f.n)
            goal = lambda z: encodings.is_consistent(z) and match(encodings.gamma(z))  # noqa: E731
        else:
            goal = _pattern(target, f.n, three_valued=(mode == "mp"))
        rel, fmt, _ = _bn_space(f, mode, source, args.max_states, goal=goal)
        hits = [s for s in rel.states if goal(s)]
        best = min(hits, key=lambda s: (len(rel.path_to(s)), fmt(s)), default=None)
        result = {"mode": mode, "reachable": best is not None, "witness": None, "steps": None}
        if best is not None:
            path = rel.path_to(best)
            result["witness"] = [fmt(rel.initial[0])] + [fmt(b) for _, _, b in path]
            result["steps"] = len(path)
            if mode == "interval":
                result["projected"] = [format_config(encodings.gamma(parse_config(z))) for z in result["witness"]]
    _emit(args, _report(args, result))
    return EXIT_OK if result["reachable"] else EXIT_FALSE


def cmd_translate(args) -> int:
    kind = args.kind
    provenance = {"translation": kind}
    if kind == "bn-to-rpn":
        f = _load_bn(args.input)
        initial = parse_config(getattr(args, "from"), f.n) if getattr(args, "from") else None
        image = encodings.bn_to_rpn(f, initial)
        out = image.net
        provenance["places"] = {
            image.place(i, v): [f.names[i], v] for i in range(f.n) for v in (0, 1)
        }
    elif kind == "rpn-to-bn":
        net = rpn.load_net(args.input)
        image = encodings.rpn_to_bn(net, max_states=args.max_states)
        out = image.bn
        provenance["components"] = {
            **{p: image.bn.names[k] for p, k in image.place_index.items()},
            **{t: image.bn.names[k] for t, k in image.transition_index.items()},
        }
        provenance["initial"] = format_config(image.marking_to_config(net.initial))
    elif kind == "split":
        out = rpn.split(rpn.load_net(args.input)).net
    elif kind == "eliminate-loops":
        out = rpn.eliminate_loops(rpn.load_net(args.input))
    elif kind == "interval-encode":
        out = encodings.interval_encode(_load_bn(args.input)).bn
    elif kind == "mp-encode":
        out = encodings.mp_encode(_load_bn(args.input)).bn
    else:  # pragma: no cover - argparse restricts the choices
        raise ValueError(kind)
    if isinstance(out, rpn.ReadPetriNet):
        text = render.net_dot(out) if args.format == "dot" else rpn.dumps_net(out)
    else:
        text = bn.format_bn(out)
    _emit(args, text, provenance)
    return EXIT_OK


def cmd_sensitivity(args) -> int:
    image = None
    if _is_net_path(args.model):
        net = rpn.load_net(args.model)
        try:
            image = encodings.image_from_net(net)
        except StructureError:
            image = None
        start = _net_start(getattr(args, "from"), net)
    else:
        f = _load_bn(args.model)
        x = parse_config(getattr(args, "from"), f.n) if getattr(args, "from") else (0,) * f.n
        image = encodings.bn_to_rpn(f, x)
        net = image.net
        start = net.initial
    max_step = args.max_step or sensitivity.DEFAULT_MAX_STEP
    if args.step:
        step = [t.strip() for t in args.step.split(",") if t.strip()]
        res = sensitivity.is_normal(net, step, start, same_result=not args.any_result, max_step=max_step)
        pair = sensitivity.NormalPair(res.step, res.marking, res.trace)
        payload = sensitivity.witness_report(net, pair, image)
        payload["normal"] = res.normal
        payload["sequentialization"] = list(res.order) if res.order else None
        _emit(args, _report(args, payload))
        return EXIT_OK if res.normal else EXIT_FALSE
    scan = sensitivity.find_normal_pairs(net, start, args.max_states, max_step,
                                         same_result=not args.any_result)
    pairs = []
    for pair in scan.pairs:
        entry = sensitivity.witness_report(net, pair, image)
        entry["step_names"] = sorted(net.transition_names[t] for t in pair.step)
        if image is not None:
            entry["configuration"] = format_config(image.marking_to_config(pair.marking))
        pairs.append(entry)
    result = {"pairs": pairs, "markings_scanned": scan.markings_scanned, "truncated": scan.truncated}
    _emit(args, _report(args, result))
    return EXIT_OK if pairs else EXIT_FALSE


def cmd_influence(args) -> int:
    f = _load_bn(args.model)
    g = bn.influence_graph(f)
    if args.format == "json":
        cycles = bn.signed_cycles(g)
        result = {
            "positive": [[f.names[j], f.names[i]] for j, i in sorted(g.positive)],
            "negative": [[f.names[j], f.names[i]] for j, i in sorted(g.negative)],
            "locally_monotonic": g.locally_monotonic,
            "cycles": [
                {
                    "nodes": [f.names[v] for v in c.nodes],
                    "signs": ["+" if s > 0 else "-" for s in c.signs],
                    "kind": c.kind,
                }
                for c in cycles
            ],
        }
        _emit(args, _report(args, result))
    else:
        _emit(args, render.influence_dot(f, g))
    return EXIT_OK


def cmd_fixpoints(args) -> int:
    f = _load_bn(args.model)
    result = {"fixpoints": sorted(format_config(x) for x in bn.fixpoints(f))}
    _emit(args, _report(args, result))
    return EXIT_OK


def cmd_mv_check(args) -> int:
    F = mpmv.load_mv(args.mv)
    f = _load_bn(args.model)
    ref = mpmv.check_refinement(F, f, args.max_states)
    result = {
        "refines": ref.ok,
        "refinement_counterexamples": [
            {"config": mpmv.format_mv_config(x), "component": f.names[i]} for x, i in ref.counterexamples
        ],
    }
    if args.simulate:
        if not ref.ok:
            result["simulates"] = None
            _emit(args, _report(args, result))
            return EXIT_FALSE
        sim = mpmv.check_simulation(F, f, args.max_states)
        result["simulates"] = sim.ok
        result["edges"] = sim.edges
        result["simulation_counterexamples"] = [
            [mpmv.format_mv_config(x), mpmv.format_mv_config(y)] for x, y in sim.counterexamples
        ]
        longest = max((len(w) - 1 for w in sim.witnesses.values()), default=0)
        result["longest_mp_witness"] = longest
        ok = sim.ok
    else:
        ok = ref.ok
    _emit(args, _report(args, result))
    return EXIT_OK if ok else EXIT_FALSE


# --------------------------------------------------------------------------
# parser
# --------------------------------------------------------------------------


def _common(p, fmt=True):
    p.add_argument("--max-states", type=int, default=None,
                   help="state budget (default: $BNCONCUR_BUDGET or 200000)")
    p.add_argument("--max-step", type=int, default=None, help="largest step explored")
    p.add_argument("--workers", type=int, default=1, help="accepted for compatibility; runs single-threaded")
    p.add_argument("--timing", action="store_true", help="print elapsed time on stderr")
    p.add_argument("-o", "--output", help="write to this file instead of stdout")
    if fmt:
        p.add_argument("--format", choices=("dot", "json"), default=None)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="bnconcur", description="Boolean network and read Petri net concurrency analysis")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("stg", help="explore and export a transition graph")
    p.add_argument("model", help=".bn model or .rpn.json net")
    p.add_argument("--mode", help=f"BN: {', '.join(BN_MODES)}; net: {', '.join(NET_MODES)}")
    p.add_argument("--from", help="start configuration/marking (default: every configuration / M0)")
    p.add_argument("--project", action="store_true", help="project interval states onto read nodes")
    _common(p)
    p.set_defaults(handler=cmd_stg, default_format="dot")

    p = sub.add_parser("reach", help="decide reachability and print a shortest witness")
    p.add_argument("model")
    p.add_argument("--mode")
    p.add_argument("--from")
    p.add_argument("--to", required=True, help="target pattern (0/1, * any; h = ½ in mp mode) or place list")
    p.add_argument("--project", action="store_true")
    _common(p)
    p.set_defaults(handler=cmd_reach, default_format="json")

    p = sub.add_parser("translate", help="translate between formalisms")
    group = p.add_mutually_exclusive_group(required=True)
    for kind in ("bn-to-rpn", "rpn-to-bn", "split", "interval-encode", "mp-encode", "eliminate-loops"):
        group.add_argument(f"--{kind}", dest="kind", action="store_const", const=kind)
    p.add_argument("input")
    p.add_argument("--from", help="initial configuration for --bn-to-rpn")
    _common(p)
    p.set_defaults(handler=cmd_translate, default_format="json")

    p = sub.add_parser("sensitivity", help="search normal (step, marking) pairs")
    p.add_argument("model", help=".bn model (translated) or .rpn.json net")
    p.add_argument("--from", help="0/1 configuration of a BN image, or comma-separated places")
    p.add_argument("--step", help="check only this comma-separated step at the start marking")
    p.add_argument("--any-result", action="store_true",
                   help="count any complete firing order as a sequentialization")
    _common(p)
    p.set_defaults(handler=cmd_sensitivity, default_format="json")

    p = sub.add_parser("influence", help="signed influence graph")
    p.add_argument("model")
    _common(p)
    p.set_defaults(handler=cmd_influence, default_format="dot")

    p = sub.add_parser("fixpoints", help="list fixpoints")
    p.add_argument("model")
    _common(p)
    p.set_defaults(handler=cmd_fixpoints, default_format="json")

    p = sub.add_parser("mv-check", help="check a multivalued refinement")
    p.add_argument("mv", help=".mv.json network")
    p.add_argument("model", help=".bn model")
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--refine", action="store_true")
    group.add_argument("--simulate", action="store_true")
    _common(p)
    p.set_defaults(handler=cmd_mv_check, default_format="json")
    return parser


def _inputs(args):
    for attr in ("model", "input", "mv"):
        value = getattr(args, attr, None)
        if value is not None:
            yield value


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.format is None:
        args.format = args.default_format
    del args.default_format
    args.inputs = list(_inputs(args))
    began = time.perf_counter()
    try:
        code = args.handler(args)
    except BudgetExceeded as exc:
        print(f"bnconcur: budget exceeded: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except (ParseError, StructureError, DimensionError, SafetyViolation, NotEnabled,
            InvariantViolation, ValueError, OSError) as exc:
        print(f"bnconcur: error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    if args.timing:
        print(f"bnconcur: {time.perf_counter() - began:.3f}s", file=sys.stderr)
    return code


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
