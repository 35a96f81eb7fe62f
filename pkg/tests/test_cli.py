import json
import subprocess
import sys

import pytest

from bnconcur import bn, encodings, rpn
from bnconcur.cli import main

from conftest import MODELS


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


def result(capsys, *argv):
    code, out, _ = run(capsys, *argv)
    return code, json.loads(out)["result"]


def test_stg_general_contains_sync_edge(capsys):
    code, out, _ = run(capsys, "stg", MODELS / "EX3.bn", "--mode", "general", "--from", "000")
    assert code == 0
    assert out.startswith("digraph")
    assert '"000" -> "110"' in out


def test_stg_async_misses_110(capsys):
    code, out, _ = run(capsys, "stg", MODELS / "EX3.bn", "--mode", "async", "--from", "000")
    assert code == 0 and '"110"' not in out
    code, doc = result(capsys, "stg", MODELS / "EX3.bn", "--mode", "async", "--from", "000", "--format", "json")
    assert "110" not in doc["states"]


def test_stg_interval_projected(capsys):
    code, doc = result(capsys, "stg", MODELS / "EX3.bn", "--mode", "interval", "--from", "000",
                       "--project", "--format", "json")
    assert code == 0 and "111" in doc["states"]
    code, doc = result(capsys, "stg", MODELS / "EX3.bn", "--mode", "interval", "--from", "000", "--format", "json")
    assert "111111" in doc["states"]


def test_reach_examples(capsys):
    code, res = result(capsys, "reach", MODELS / "EX3.bn", "--mode", "general", "--from", "000", "--to", "111")
    assert code == 1 and res["reachable"] is False
    code, res = result(capsys, "reach", MODELS / "EX3.bn", "--mode", "interval", "--from", "000", "--to", "111")
    assert code == 0 and res["steps"] == 6 and res["witness"][-1] == "111111"
    code, res = result(capsys, "reach", MODELS / "EX2.bn", "--mode", "mp", "--from", "000", "--to", "**1")
    assert code == 0 and res["reachable"] and res["witness"][-1].endswith("1")


def test_reach_on_nets(capsys):
    code, res = result(capsys, "reach", MODELS / "NET4.rpn.json", "--mode", "step", "--to", "p1,p2,p3")
    assert code == 0
    code, res = result(capsys, "reach", MODELS / "NET4.rpn.json", "--mode", "atomic", "--to", "p4,p5,p6")
    assert code == 1 and not res["reachable"]
    code, res = result(capsys, "reach", MODELS / "NET4.rpn.json", "--mode", "interval", "--to", "p4,p5,p6")
    assert code == 0 and res["reachable"]


def test_translate_bn_to_rpn_shape(capsys, tmp_path):
    out = tmp_path / "ex3.rpn.json"
    code, _, _ = run(capsys, "translate", "--bn-to-rpn", MODELS / "EX3.bn", "-o", out)
    assert code == 0
    net = rpn.load_net(out)
    assert len(net.places) == 6 and len(net.transitions) == 7
    prov = json.loads((tmp_path / "ex3.rpn.json.prov.json").read_text())
    assert prov["output"] == "ex3.rpn.json" and prov["tool"] == "bnconcur"
    assert encodings.image_from_net(net).n == 3


def test_translate_split_counts(capsys):
    code, out, _ = run(capsys, "translate", "--split", MODELS / "NET4.rpn.json")
    doc = json.loads(out)
    assert code == 0
    assert len(doc["places"]) == 2 * 6 + 4
    assert len(doc["transitions"]) == 8


def test_translate_rpn_to_bn(capsys):
    code, out, _ = run(capsys, "translate", "--rpn-to-bn", MODELS / "single.rpn.json")
    assert code == 0
    f = bn.parse_bn(out)
    assert f.names == ("p1", "p2", "p4", "a")


def test_translate_other_kinds(capsys):
    for kind, n in (("--interval-encode", 6), ("--mp-encode", 9)):
        code, out, _ = run(capsys, "translate", kind, MODELS / "EX2.bn")
        assert code == 0 and bn.parse_bn(out).n == n
    code, out, _ = run(capsys, "translate", "--eliminate-loops", MODELS / "NET4.rpn.json")
    assert code == 0 and rpn.loads_net(out).is_loop_free


def test_round_trip_reachability(capsys, tmp_path):
    for model in ("EX3.bn", "EX2.bn", "NEG3.bn", "POS2.bn"):
        f = bn.load_bn(MODELS / model)
        for x in bn.all_configs(f.n):
            out = tmp_path / "n.rpn.json"
            assert run(capsys, "translate", "--bn-to-rpn", MODELS / model, "--from", bn.format_config(x), "-o", out)[0] == 0
            back = tmp_path / "back.bn"
            assert run(capsys, "translate", "--rpn-to-bn", out, "-o", back)[0] == 0
            g = bn.load_bn(back)
            net = rpn.load_net(out)
            image = encodings.RpnBnImage(g, net, {p: k for k, p in enumerate(net.places)},
                                         {t: len(net.places) + k for k, t in enumerate(net.transitions)})
            projected = encodings.projected_reachable_markings(image)
            original = encodings.image_from_net(net)
            assert {original.marking_to_config(m) for m in projected} == bn.reachable("async", f, x).states


def test_sensitivity_witness(capsys):
    code, res = result(capsys, "sensitivity", MODELS / "NEG3.rpn.json", "--from", "111")
    assert code == 0
    down = [p for p in res["pairs"] if p["configuration"] == "111"]
    assert down and down[0]["cycle"] == ["x1.down", "x2.down", "x3.down"]
    assert down[0]["arc_types"] == ["11", "11", "11"] and down[0]["sign"] == "-"
    code, res = result(capsys, "sensitivity", MODELS / "EX2.bn", "--from", "000")
    assert code == 1 and res["pairs"] == []


def test_influence_dot_styles(capsys):
    code, out, _ = run(capsys, "influence", MODELS / "EX3.bn")
    assert code == 0
    assert '"x2" -> "x3" [style=solid' in out
    assert '"x1" -> "x3" [style=dashed' in out and 'label="−"' in out


def test_fixpoints_and_mv_check(capsys):
    assert result(capsys, "fixpoints", MODELS / "EX2.bn") == (0, {"fixpoints": ["110"]})
    code, res = result(capsys, "mv-check", MODELS / "ex1.mv.json", MODELS / "EX3.bn", "--refine")
    assert code == 0 and res["refines"] is True
    code, res = result(capsys, "mv-check", MODELS / "ex2.mv.json", MODELS / "EX2.bn", "--simulate")
    assert code == 0 and res["simulates"] is True and res["simulation_counterexamples"] == []
    code, res = result(capsys, "mv-check", MODELS / "ex1.mv.json", MODELS / "EX2.bn", "--refine")
    assert code == 1 and res["refinement_counterexamples"]


def test_exit_codes(capsys, tmp_path):
    bad = tmp_path / "bad.bn"
    bad.write_text("x1 = x1 &\n")
    code, _, err = run(capsys, "fixpoints", bad)
    assert code == 2 and "error" in err
    code, _, _ = run(capsys, "reach", MODELS / "EX3.bn", "--mode", "async", "--from", "00", "--to", "111")
    assert code == 2
    code, _, err = run(capsys, "stg", MODELS / "EX3.bn", "--mode", "general", "--max-states", "2")
    assert code == 3 and "budget" in err
    code, _, _ = run(capsys, "fixpoints", tmp_path / "missing.bn")
    assert code == 2


def test_timing_goes_to_stderr(capsys):
    code, out, err = run(capsys, "fixpoints", MODELS / "EX2.bn", "--timing")
    assert code == 0 and "s" in err and json.loads(out)


def test_console_entry_point():
    proc = subprocess.run([sys.executable, "-m", "bnconcur", "fixpoints", str(MODELS / "EX3.bn")],
                          capture_output=True, text=True, check=True)
    assert json.loads(proc.stdout)["result"]["fixpoints"] == ["011", "100"]


@pytest.mark.parametrize("argv", [
    ["stg", "EX3.bn", "--mode", "general"],
    ["reach", "EX3.bn", "--mode", "interval", "--from", "000", "--to", "111"],
    ["translate", "--bn-to-rpn", "EX3.bn"],
    ["sensitivity", "POS2.rpn.json", "--from", "01"],
])
def test_determinism(capsys, argv):
    argv = [str(MODELS / a) if a.endswith((".bn", ".json")) else a for a in argv]
    first = run(capsys, *argv)
    second = run(capsys, *argv)
    assert first[:2] == second[:2]
