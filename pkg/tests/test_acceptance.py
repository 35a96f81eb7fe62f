"""Acceptance criteria, one test each.

Every test prints a single ``[PASS]``/``[FAIL]`` line (visible with ``pytest -s``
or when this file is run directly with ``python tests/test_acceptance.py``).
"""
from __future__ import annotations

import contextlib
import io
import random
import sys
import tempfile
import time
from functools import lru_cache
from itertools import product
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from bnconcur import bn, encodings, mpmv, rpn, sensitivity  # noqa: E402
from bnconcur.cli import main as cli_main  # noqa: E402

import oracles  # noqa: E402
import suites  # noqa: E402

MODELS = Path(__file__).resolve().parent.parent / "models"


def _load(name):
    if name.endswith(".bn"):
        return bn.load_bn(MODELS / name)
    if name.endswith(".mv.json"):
        return mpmv.load_mv(MODELS / name)
    return rpn.load_net(MODELS / name)


@lru_cache(maxsize=None)
def _interval_sample():
    rng = random.Random(5)
    return tuple(oracles.random_bn(rng, rng.choice((1, 2, 2, 3, 3, 3))) for _ in range(300))


def _outcome(problems: list, summary: str):
    return (not problems, summary if not problems else f"{summary}; first problem: {problems[0]}")


# --------------------------------------------------------------------------
# criteria
# --------------------------------------------------------------------------


def criterion_1():
    f = _load("EX3.bn")
    rel = bn.reachable("general", f, list(oracles.all_configs(3)))
    got = {(x, y) for x, _, y in rel.edges}
    want = {(x, y) for x in oracles.all_configs(3) for y in oracles.bn_successors(f, x, "general")}
    problems = [] if got == want else [f"edge sets differ by {sorted(got ^ want)}"]
    for a, b in (("000", "110"), ("010", "011"), ("000", "100")):
        if (bn.parse_config(a), bn.parse_config(b)) not in got:
            problems.append(f"missing {a}->{b}")
    if (1, 1, 0) in bn.reachable("async", f, (0, 0, 0)).states:
        problems.append("110 reachable from 000 under async")
    return _outcome(problems, f"generalized STG of EX3 has {len(got)} edges, equal to the subset oracle")


def criterion_2():
    problems, count = [], 0
    for bits in product((0, 1), repeat=8):
        f = oracles.bn_from_tables([bits[:4], bits[4:]], 2)
        problems += suites.check_bn_net_correspondence(f)
        count += 1
    rng = random.Random(2)
    for _ in range(200):
        problems += suites.check_bn_net_correspondence(oracles.random_bn(rng, rng.choice((3, 4))))
        count += 1
    return _outcome(problems, f"{count} networks: async/atomic, sync/maximal-step, general/step agree")


def criterion_3():
    rng = random.Random(3)
    problems = []
    for _ in range(100):
        problems += suites.check_net_bn_reachability(oracles.random_safe_net(rng, min_markings=3, concurrent=False))
    return _outcome(problems, "100 random safe loop-free nets: reachable markings match the projected BN")


def criterion_4():
    net = _load("NET4.rpn.json")
    problems = []
    for sem in ("atomic", "step"):
        rel = rpn.explore(net, sem)
        if any("d" in lab for _, lab, _ in rel.edges):
            problems.append(f"d fires under {sem}")
    tokens = "a- b- b+ c- c+ a+ d- d+".split()
    ids = [rpn.minus(t[0]) if t.endswith("-") else rpn.plus(t[0]) for t in tokens]
    try:
        run = rpn.replay_interval(net, ids)
        if not rpn.split(net).is_complete(run.final):
            problems.append("i-run does not end in a complete marking")
    except Exception as exc:  # noqa: BLE001
        problems.append(f"i-run rejected: {exc}")
    return _outcome(problems, "d is dead under atomic/step and fires in the i-run a-b-b+c-c+a+d-d+")


def criterion_5():
    problems = []
    for f in _interval_sample():
        problems += suites.check_interval_correspondence(f)
    return _outcome(problems, "300 networks: interval net reachability equals encoded async reachability")


def criterion_6():
    problems = []
    for f in _interval_sample():
        problems += suites.check_fixpoint_bijection(f)
    return _outcome(problems, "300 networks: fixpoints of the encoding are exactly the alpha-images")


def criterion_7():
    problems = []
    for f in _interval_sample():
        problems += suites.check_influence_preservation(f)
    return _outcome(problems, "300 networks: influence edges mirrored and the five self-influence clauses hold")


def criterion_8():
    problems = []
    ex3, ex2 = _load("EX3.bn"), _load("EX2.bn")
    image = encodings.bn_to_rpn(ex3)
    if not rpn.interval_reachable(image.net, image.config_to_marking((0, 0, 0)),
                                  image.config_to_marking((1, 1, 1))):
        problems.append("EX3 interval 000 -> 111 fails")
    enc = encodings.interval_encode(ex2)
    rel = bn.reachable("async", enc.bn, (0,) * 6)
    terminals = {z for z in rel.states if not bn.async_successors(enc.bn, z)}
    if {encodings.format_doubled(z) for z in terminals} != {"11 11 00"}:
        problems.append(f"EX2 interval terminals {sorted(terminals)}")
    if not any(y[2] == 1 for y in mpmv.mp_reachable_set(ex2, (0, 0, 0))):
        problems.append("EX2 mp never sets component 3 to 1")
    return _outcome(problems, "EX3 interval reaches 111; EX2 interval ends in 11 11 00; EX2 mp sets x3=1")


def criterion_9():
    problems = []
    neg3 = encodings.bn_to_rpn(_load("NEG3.bn"), (1, 1, 1))
    down = {"x1.down", "x2.down", "x3.down"}
    if not sensitivity.is_normal(neg3.net, down, neg3.config_to_marking((1, 1, 1))).normal:
        problems.append("NEG3 down-step not normal")
    if sensitivity.classify_arcs(neg3, ("x1.down", "x2.down", "x3.down")).types != ("11", "11", "11"):
        problems.append("NEG3 arc types")
    pos2 = encodings.bn_to_rpn(_load("POS2.bn"), (0, 1))
    if not sensitivity.is_normal(pos2.net, {"x1.up", "x2.down"}, pos2.config_to_marking((0, 1))).normal:
        problems.append("POS2 step not normal")
    if sensitivity.classify_arcs(pos2, ("x1.up", "x2.down")).types != ("01", "10"):
        problems.append("POS2 arc types")
    rng = random.Random(9)
    pairs = cycles = 0
    for _ in range(200):
        n = rng.randint(2, 4)
        f = oracles.random_bn(rng, n)
        bad, p, c = suites.check_sensitivity_scan(f, tuple(rng.randint(0, 1) for _ in range(n)))
        problems += bad
        pairs += p
        cycles += c
    return _outcome(problems, f"fixtures hold; random scan found {pairs} normal pairs, {cycles} cycles classified")


def criterion_10():
    problems = []
    rng = random.Random(10)
    done = 0
    while done < 100:
        n, m = rng.randint(1, 3), rng.randint(1, 3)
        f = oracles.random_bn(rng, n)
        F = suites.random_refinement(rng, f, m)
        if not mpmv.check_refinement(F, f).ok:
            continue
        sim = mpmv.check_simulation(F, f)
        if not sim.ok:
            problems.append(f"simulation counterexamples {sim.counterexamples[:2]}")
        done += 1
    F1, F2 = _load("ex1.mv.json"), _load("ex2.mv.json")
    chains = ((F1, "0,0,0 0,1/2,0 1/2,1/2,0 1/2,1/2,1/2 1/2,1/2,1"), (F2, "0,0,0 1/2,0,0 1/2,1/2,0 1/2,1/2,1/2"))
    for F, text in chains:
        chain = [mpmv.parse_mv_config(t, F) for t in text.split()]
        if not all(b in mpmv.mv_async_successors(F, a) for a, b in zip(chain, chain[1:])):
            problems.append(f"chain {text} not realizable")
    for F, f in ((F1, _load("EX3.bn")), (F2, _load("EX2.bn"))):
        if not (mpmv.check_refinement(F, f).ok and mpmv.check_simulation(F, f).ok):
            problems.append("example refinement/simulation fails")
    return _outcome(problems, "100 refinements simulated by mp; both example chains realizable")


def _cli_output(argv, out_file=None):
    buf, err = io.StringIO(), io.StringIO()
    with contextlib.redirect_stdout(buf), contextlib.redirect_stderr(err):
        code = cli_main(argv)
    files = b""
    if out_file is not None:
        files = Path(out_file).read_bytes() + Path(out_file + ".prov.json").read_bytes()
    return code, buf.getvalue(), files


def criterion_11():
    m = lambda name: str(MODELS / name)  # noqa: E731
    commands = [
        ["stg", m("EX3.bn"), "--mode", "general"],
        ["stg", m("EX3.bn"), "--mode", "interval", "--from", "000", "--project"],
        ["stg", m("EX2.bn"), "--mode", "mp", "--from", "000", "--format", "json"],
        ["stg", m("NET4.rpn.json"), "--mode", "step"],
        ["reach", m("EX3.bn"), "--mode", "interval", "--from", "000", "--to", "111"],
        ["reach", m("EX2.bn"), "--mode", "mp", "--from", "000", "--to", "**1"],
        ["reach", m("NET4.rpn.json"), "--mode", "interval", "--to", "p4,p5,p6"],
        ["sensitivity", m("NEG3.rpn.json"), "--from", "111"],
        ["sensitivity", m("POS2.bn"), "--from", "01"],
        ["influence", m("EX3.bn")],
        ["fixpoints", m("EX2.bn")],
        ["mv-check", m("ex1.mv.json"), m("EX3.bn"), "--simulate"],
    ]
    translations = [
        ["--bn-to-rpn", m("EX3.bn")], ["--rpn-to-bn", m("single.rpn.json")], ["--split", m("NET4.rpn.json")],
        ["--interval-encode", m("EX2.bn")], ["--mp-encode", m("EX2.bn")], ["--eliminate-loops", m("NET4.rpn.json")],
    ]
    problems = []
    with tempfile.TemporaryDirectory() as tmp:
        for argv in commands:
            if _cli_output(argv) != _cli_output(argv):
                problems.append(" ".join(argv))
        for k, argv in enumerate(translations):
            out = str(Path(tmp) / f"out{k}")
            full = ["translate", *argv, "-o", out]
            if _cli_output(full, out) != _cli_output(full, out):
                problems.append(" ".join(full))
    total = len(commands) + len(translations)
    return _outcome(problems, f"{total} CLI invocations byte-identical across two runs")


CRITERIA = [globals()[f"criterion_{k}"] for k in range(1, 12)]


def _line(k, ok, detail, seconds):
    return f"[{'PASS' if ok else 'FAIL'}] criterion {k:2d}: {detail} ({seconds:.1f}s)"


@pytest.mark.parametrize("k", range(1, 12))
def test_acceptance(k, capsys):
    began = time.perf_counter()
    ok, detail = CRITERIA[k - 1]()
    with capsys.disabled():
        print("\n" + _line(k, ok, detail, time.perf_counter() - began))
    assert ok, detail


if __name__ == "__main__":
    failed = 0
    for k, crit in enumerate(CRITERIA, start=1):
        began = time.perf_counter()
        ok, detail = crit()
        failed += not ok
        print(_line(k, ok, detail, time.perf_counter() - began))
    sys.exit(1 if failed else 0)
