import random

import pytest
from hypothesis import given, settings, strategies as st

from bnconcur import bn, encodings, sensitivity
from bnconcur.boolfun import And, Not, Or, Var, TRUE, FALSE
from bnconcur.errors import BudgetExceeded, InvariantViolation, NotEnabled, StructureError

import oracles
import suites

DOWN3 = {"x1.down", "x2.down", "x3.down"}
UP3 = {"x1.up", "x2.up", "x3.up"}


def test_preemption_graph_neg3(neg3):
    g = sensitivity.preemption_graph(neg3.net, DOWN3)
    assert g.edges == {("x1.down", "x2.down"), ("x2.down", "x3.down"), ("x3.down", "x1.down")}
    assert g.has_cycle()
    assert g.cycles() == [("x1.down", "x2.down", "x3.down")]
    assert g.hamiltonian_cycle() == ("x1.down", "x2.down", "x3.down")


def test_preemption_graph_pos2_and_net4(pos2, net4):
    g = sensitivity.preemption_graph(pos2.net, {"x1.up", "x2.down"})
    assert g.edges == {("x1.up", "x2.down"), ("x2.down", "x1.up")}
    g = sensitivity.preemption_graph(net4, {"a", "b"})
    assert g.edges == {("a", "b"), ("b", "a")}
    g = sensitivity.preemption_graph(net4, {"a", "c"})
    assert g.edges == {("a", "c")} and not g.has_cycle()
    with pytest.raises(StructureError):
        sensitivity.preemption_graph(net4, {"zz"})


def test_is_normal_examples(neg3, pos2, net4):
    m111 = neg3.config_to_marking((1, 1, 1))
    res = sensitivity.is_normal(neg3.net, DOWN3, m111)
    assert res.normal and res.order is None
    assert res.result == neg3.config_to_marking((0, 0, 0))
    assert res.trace
    assert sensitivity.is_normal(pos2.net, {"x1.up", "x2.down"}, pos2.config_to_marking((0, 1))).normal
    assert sensitivity.is_normal(net4, {"a", "b"}, net4.initial).normal


def test_sequentializable_step(net4):
    m = {"p1", "p5", "p3"}
    res = sensitivity.is_normal(net4, {"c"}, m)
    assert not res.normal and res.order == ("c",)


def test_not_enabled_and_cap(neg3, net4):
    with pytest.raises(NotEnabled):
        sensitivity.is_normal(net4, {"d"}, net4.initial)
    with pytest.raises(NotEnabled):
        sensitivity.is_normal(neg3.net, DOWN3, neg3.config_to_marking((0, 0, 0)))
    with pytest.raises(BudgetExceeded):
        sensitivity.is_normal(neg3.net, DOWN3, neg3.config_to_marking((1, 1, 1)), max_step=2)


def test_alternative_enabledness_reading(pos2):
    # a different final marking is accepted when the result is unconstrained
    m = pos2.config_to_marking((0, 1))
    strict = sensitivity.is_normal(pos2.net, {"x1.up", "x2.down"}, m)
    loose = sensitivity.is_normal(pos2.net, {"x1.up", "x2.down"}, m, same_result=False)
    assert strict.normal and loose.normal


def test_find_normal_pairs(neg3, pos2, net4):
    pairs = {(p.step, p.marking) for p in sensitivity.find_normal_pairs(neg3.net)}
    assert (frozenset(DOWN3), neg3.config_to_marking((1, 1, 1))) in pairs
    pairs = {(p.step, p.marking) for p in sensitivity.find_normal_pairs(pos2.net)}
    assert (frozenset({"x1.up", "x2.down"}), pos2.config_to_marking((0, 1))) in pairs
    scan = sensitivity.find_normal_pairs(net4)
    assert (frozenset({"a", "b"}), net4.initial) in {(p.step, p.marking) for p in scan}
    assert not scan.truncated


def test_scan_budget_flags_truncation(neg3):
    scan = sensitivity.find_normal_pairs(neg3.net, max_states=1)
    assert scan.truncated and scan.markings_scanned == 1


def _random_acyclic_bn(rng, n):
    exprs = []
    for i in range(n):
        lits = [Var(j) if rng.random() < 0.5 else Not(Var(j)) for j in range(i) if rng.random() < 0.6]
        if not lits:
            exprs.append(rng.choice((TRUE, FALSE)))
        else:
            exprs.append(rng.choice((And, Or))(tuple(lits)))
    return bn.BooleanNetwork(tuple(f"x{k + 1}" for k in range(n)), tuple(exprs))


@settings(max_examples=30, deadline=None)
@given(st.integers(1, 4), st.integers(0, 10 ** 6))
def test_acyclic_networks_have_no_normal_pairs(n, seed):
    rng = random.Random(seed)
    f = _random_acyclic_bn(rng, n)
    assert not bn.signed_cycles(bn.influence_graph(f))
    for x in oracles.all_configs(n):
        assert not sensitivity.find_normal_pairs(encodings.bn_to_rpn(f, x).net).pairs


def test_classify_arcs_examples(neg3, pos2):
    arcs = sensitivity.classify_arcs(neg3, ("x1.down", "x2.down", "x3.down"))
    assert arcs.types == ("11", "11", "11") and arcs.sign == -1 and arcs.length == 3
    arcs = sensitivity.classify_arcs(neg3, ("x1.up", "x2.up", "x3.up"))
    assert arcs.types == ("00", "00", "00") and arcs.sign == -1
    arcs = sensitivity.classify_arcs(pos2, ("x1.up", "x2.down"))
    assert arcs.types == ("01", "10") and arcs.sign == 1
    assert arcs.balanced and arcs.parity_consistent


def test_classify_arcs_rejects_non_cycles(neg3):
    with pytest.raises(StructureError):
        sensitivity.classify_arcs(neg3, ("x1.down", "x3.down", "x2.down"))
    with pytest.raises(StructureError):
        sensitivity.classify_arcs(neg3, ("x1.down",))


def test_witness_report(neg3):
    scan = sensitivity.find_normal_pairs(neg3.net)
    pair = next(p for p in scan if p.step == frozenset(DOWN3))
    assert sensitivity.is_minimal_witness(neg3.net, pair)
    rep = sensitivity.witness_report(neg3.net, pair, neg3)
    assert rep["cycle"] == ["x1.down", "x2.down", "x3.down"]
    assert rep["arc_types"] == ["11", "11", "11"] and rep["sign"] == "-"
    assert rep["step"] == sorted(DOWN3)
    assert all(set(e) <= {"prefix", "blocked"} for e in rep["sequentialization_trace"])


@settings(max_examples=30, deadline=None)
@given(st.integers(2, 3), st.integers(0, 10 ** 6))
def test_scan_invariants_random(n, seed):
    rng = random.Random(seed)
    f = oracles.random_bn(rng, n)
    x = tuple(rng.randint(0, 1) for _ in range(n))
    problems, _, _ = suites.check_sensitivity_scan(f, x)
    assert problems == []


@settings(max_examples=30, deadline=None)
@given(st.integers(2, 4), st.integers(0, 10 ** 6))
def test_normal_pairs_need_nope_and_critical_cycles(n, seed):
    rng = random.Random(seed)
    f = oracles.random_monotone_bn(rng, n)
    x = tuple(rng.randint(0, 1) for _ in range(n))
    assert suites.check_bridge(f, x) == []
