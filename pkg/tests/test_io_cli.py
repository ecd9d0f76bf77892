import io as _io
import json
from fractions import Fraction as F
from pathlib import Path

import pytest
from hypothesis import given, settings

from arbcert import io
from arbcert.cli import run_cli
from arbcert.errors import InvariantViolation, ModelSyntaxError, ShortBranch
from arbcert.ftap import decide

from conftest import small_models

MODELS = Path(__file__).resolve().parent.parent / "models"
EX1 = str(MODELS / "example1.json")
BAA = str(MODELS / "bid_above_ask.json")


def cli(*argv):
    out = _io.StringIO()
    code = run_cli([str(a) for a in argv], out)
    return code, out.getvalue()


def node(nid, parent, ask="1", bid="1", fixed="1", **extra):
    return {"id": nid, "parent": parent, "ask": ask, "bid": bid, "fixed": fixed, **extra}


def test_parse_example1_file():
    model = io.read_model(EX1)
    assert model.tree.order == ("root", "u", "d")
    assert model.ask["u"] == 2 and model.fixed["d"] == 1
    assert not decide(model).arbitrage


def test_parse_rationals():
    assert io.parse_rational("3/4") == F(3, 4)
    assert io.parse_rational(" -2 ") == -2
    assert io.parse_rational(5) == 5
    for bad in (0.5, True, "1/0", "abc", None, [1]):
        with pytest.raises(ModelSyntaxError):
            io.parse_rational(bad)


def test_bid_above_ask_invariant():
    doc = {"nodes": [node("r", None, ask="1", bid="3/2")]}
    with pytest.raises(InvariantViolation):
        io.model_from_dict(doc)


def test_zero_fixed_cost_rejected():
    with pytest.raises(InvariantViolation):
        io.model_from_dict({"nodes": [node("r", None, fixed="0")]})


@pytest.mark.parametrize("text", [
    "{", "[]", '{"nodes": 3}', '{"nodes": [{"parent": null}]}',
    '{"nodes": [{"id": "r", "parent": null, "ask": "1", "bid": "1"}]}',
    '{"nodes": [{"id": "r", "parent": null, "ask": 1.5, "bid": "1", "fixed": "1"}]}',
    '{"horizon": -1, "nodes": [{"id": "r", "parent": null, "ask": "1", "bid": "1", "fixed": "1"}]}',
    '{"nodes": [{"id": 7, "parent": null, "ask": "1", "bid": "1", "fixed": "1"}]}',
])
def test_syntax_errors(text):
    with pytest.raises(ModelSyntaxError):
        io.parse_model(text)


def test_declared_horizon_checked():
    with pytest.raises(ShortBranch):
        io.model_from_dict({"horizon": 2, "nodes": [node("r", None), node("u", "r")]})


def test_missing_file():
    with pytest.raises(ModelSyntaxError):
        io.read_model("/nonexistent/model.json")


@settings(max_examples=60, deadline=None)
@given(small_models(max_depth=2))
def test_model_round_trip(model):
    again = io.parse_model(io.serialize_model(model))
    assert again.tree.order == model.tree.order
    assert (again.ask, again.bid, again.fixed) == (model.ask, model.bid, model.fixed)


@settings(max_examples=60, deadline=None)
@given(small_models(max_depth=2))
def test_verdict_documents_round_trip(model):
    verdict = decide(model)
    doc = json.loads(io.dumps(io.verdict_to_dict(verdict, model.tree)))
    if verdict.arbitrage:
        assert io.strategy_from_dict(doc["strategy"]) == verdict.strategy
        assert set(doc["witness"]) == {"t", "node", "case", "stop", "z"}
    else:
        cert = io.certificate_from_dict(doc["certificate"])
        assert cert.S == verdict.certificate.S
        assert cert.Q.rows == verdict.certificate.Q.rows


def test_check_exit_codes(tmp_path):
    assert cli("check", EX1) == (0, "verdict: NoArbitrage\n")
    assert cli("check", BAA)[0] == 10
    bad = tmp_path / "bad.json"
    bad.write_text('{"nodes": [{"id": "r", "parent": null, "ask": "1", "bid": "2", "fixed": "1"}]}')
    assert cli("check", bad)[0] == 2
    assert cli("check", tmp_path / "missing.json")[0] == 2
    assert cli("check")[0] == 2
    assert cli("frobnicate", EX1)[0] == 2


def test_check_json_schema():
    code, text = cli("check", EX1, "--format", "json")
    doc = json.loads(text)
    assert code == 0 and doc["verdict"] == "NoArbitrage"
    assert set(doc["certificate"]) == {"S", "Q"}
    assert set(doc["certificate"]["S"]) == {"root", "u", "d"}
    code, text = cli("check", BAA, "--format", "json")
    doc = json.loads(text)
    assert doc["verdict"] == "Arbitrage"
    assert doc["witness"] == {"t": 0, "node": "r", "case": "BidAboveAsk", "stop": ["u", "d"], "z": "3"}
    assert doc["strategy"]["initial"] == ["0", "0"]


def test_certificate_and_arbitrage_commands():
    code, text = cli("certificate", EX1, "--format", "json")
    assert code == 0 and set(json.loads(text)) == {"S", "Q"}
    assert cli("certificate", BAA)[0] == 10
    assert cli("arbitrage", EX1)[0] == 0
    code, text = cli("arbitrage", BAA)
    assert code == 10 and "z=3" in text


def test_verify(tmp_path):
    cert = tmp_path / "cert.json"
    cert.write_text(cli("check", EX1, "--format", "json")[1])
    assert cli("verify", EX1, "--certificate", cert) == (0, "certificate: ok\n")
    tampered = json.loads(cert.read_text())
    tampered["certificate"]["S"]["u"] = "5"
    cert.write_text(json.dumps(tampered))
    code, text = cli("verify", EX1, "--certificate", cert)
    assert code == 1 and "FAIL" in text

    strat = tmp_path / "strat.json"
    strat.write_text(cli("arbitrage", BAA, "--format", "json")[1])
    assert cli("verify", BAA, "--strategy", strat) == (0, "strategy: arbitrage\n")
    unpaid = {"post_trade": {"r": ["-3", "3"], "u": ["3", "0"], "d": ["6", "0"]}}
    strat.write_text(json.dumps(unpaid))
    code, text = cli("verify", BAA, "--strategy", strat)
    assert code == 1 and "FAIL r" in text
    assert cli("verify", EX1)[0] == 2


def test_oracle_and_agree():
    assert cli("oracle", EX1) == (0, "exhaustive: NoArbitrage\n")
    assert cli("oracle", BAA, "--method", "simple") == (10, "simple: Arbitrage\n")
    code, text = cli("oracle", BAA, "--format", "json")
    assert code == 10 and "strategy" in json.loads(text)
    code, text = cli("agree", EX1)
    assert code == 0 and text.endswith("agree\n")


def test_gen_is_deterministic(tmp_path):
    a = cli("gen", "--seed", 7)
    b = cli("gen", "--seed", 7)
    assert a == b and a[0] == 0
    assert cli("gen", "--seed", 8)[1] != a[1]
    target = tmp_path / "m.json"
    assert cli("gen", "--seed", 7, "-o", target)[0] == 0
    assert target.read_text() == a[1]
    model = io.read_model(str(target))
    assert model.tree.horizon == 2


def test_gen_options():
    code, text = cli("gen", "--seed", 1, "--depth", 1, "--branching", "2..2", "--spread-prob", 0)
    model = io.parse_model(text)
    assert len(model.tree) == 3
    assert all(model.ask[n] == model.bid[n] for n in model.tree.order)
    assert cli("gen", "--seed", 1, "--branching", "x")[0] == 2
    assert cli("gen", "--seed", 1, "--spread-prob", 2)[0] == 2


def test_espm_demo():
    code, text = cli("espm-demo", "--format", "json", "--q", "1/2", "--q", "1/100")
    doc = json.loads(text)
    assert code == 0 and doc["verdict"] == "NoArbitrage"
    assert doc["falsifiers"] == [
        {"q_u": "1/2", "y": "8", "expected_liquidation": "2"},
        {"q_u": "1/100", "y": "256", "expected_liquidation": "14/25"},
    ]
    code, text = cli("espm-demo")
    assert code == 0 and text.count("y=") == 9
