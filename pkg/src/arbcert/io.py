"""JSON model files and certificate/strategy documents.

Every rational is written as a string, ``"p/q"`` or ``"p"``, so files never
pass through floating point.  Integers are also accepted on input.

Model file::

    {"horizon": 1,
     "nodes": [{"id": "r", "parent": null, "ask": "1", "bid": "1", "fixed": "1"},
               {"id": "u", "parent": "r", "ask": "2", "bid": "2", "fixed": "1"},
               {"id": "d", "parent": "r", "ask": "1", "bid": "1", "fixed": "1"}]}

A node may carry an optional integer ``"time"``, which is then checked.
"""

from __future__ import annotations

import json
from fractions import Fraction
from typing import Any, Optional

from .errors import ModelSyntaxError
from .ftap import Arbitrage, Certificate, NoArbitrage, Violation
from .market import CombinedCostModel, Portfolio, Strategy
from .tree import NodeSpec, SingleStepMeasureFamily, build_tree


def parse_rational(value: Any, where: str = "") -> Fraction:
    if isinstance(value, bool) or isinstance(value, float):
        raise ModelSyntaxError(f"{where}: rationals must be strings or integers, got {value!r}")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except (ValueError, ZeroDivisionError):
            pass
    raise ModelSyntaxError(f"{where}: not a rational: {value!r}")


def format_rational(q: Fraction) -> str:
    return str(Fraction(q))


def _load(text: str) -> Any:
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ModelSyntaxError(f"invalid JSON: {exc}") from exc


def model_from_dict(doc: Any) -> CombinedCostModel:
    if not isinstance(doc, dict) or not isinstance(doc.get("nodes"), list):
        raise ModelSyntaxError("model must be an object with a 'nodes' list")
    horizon = doc.get("horizon")
    if horizon is not None and (not isinstance(horizon, int) or isinstance(horizon, bool) or horizon < 0):
        raise ModelSyntaxError(f"horizon must be a nonnegative integer, got {horizon!r}")
    specs, ask, bid, fixed = [], {}, {}, {}
    for k, rec in enumerate(doc["nodes"]):
        if not isinstance(rec, dict) or "id" not in rec:
            raise ModelSyntaxError(f"nodes[{k}]: record needs an 'id'")
        nid = rec["id"]
        if not isinstance(nid, str):
            raise ModelSyntaxError(f"nodes[{k}]: id must be a string")
        parent = rec.get("parent")
        if parent is not None and not isinstance(parent, str):
            raise ModelSyntaxError(f"node {nid!r}: parent must be a string or null")
        t = rec.get("time")
        if t is not None and (not isinstance(t, int) or isinstance(t, bool)):
            raise ModelSyntaxError(f"node {nid!r}: time must be an integer")
        for name, dest in (("ask", ask), ("bid", bid), ("fixed", fixed)):
            if name not in rec:
                raise ModelSyntaxError(f"node {nid!r}: missing field {name!r}")
            dest[nid] = parse_rational(rec[name], f"node {nid!r} field {name!r}")
        specs.append(NodeSpec(nid, parent, t))
    tree = build_tree(specs, horizon)
    return CombinedCostModel(tree, ask, bid, fixed)


def parse_model(text: str) -> CombinedCostModel:
    return model_from_dict(_load(text))


def model_to_dict(model: CombinedCostModel) -> dict:
    tree = model.tree
    return {
        "horizon": tree.horizon,
        "nodes": [
            {
                "id": n,
                "parent": tree.parent(n),
                "ask": format_rational(model.ask[n]),
                "bid": format_rational(model.bid[n]),
                "fixed": format_rational(model.fixed[n]),
            }
            for n in tree.order
        ],
    }


def serialize_model(model: CombinedCostModel) -> str:
    return json.dumps(model_to_dict(model), indent=2) + "\n"


def certificate_to_dict(cert: Certificate, tree=None) -> dict:
    order = tree.order if tree is not None else list(cert.S)
    rows = cert.Q.rows
    return {
        "S": {n: format_rational(cert.S[n]) for n in order if n in cert.S},
        "Q": {
            n: {c: format_rational(w) for c, w in rows[n].items()}
            for n in order if n in rows
        },
    }


def certificate_from_dict(doc: Any) -> Certificate:
    if not isinstance(doc, dict) or not isinstance(doc.get("S"), dict) or not isinstance(doc.get("Q"), dict):
        raise ModelSyntaxError("certificate must have 'S' and 'Q' objects")
    S = {n: parse_rational(v, f"S[{n}]") for n, v in doc["S"].items()}
    rows = {}
    for n, row in doc["Q"].items():
        if not isinstance(row, dict):
            raise ModelSyntaxError(f"Q[{n}] must be an object")
        rows[n] = {c: parse_rational(w, f"Q[{n}][{c}]") for c, w in row.items()}
    return Certificate(S, SingleStepMeasureFamily(rows))


def _pf(p) -> list:
    return [format_rational(p[0]), format_rational(p[1])]


def strategy_to_dict(s: Strategy, tree=None) -> dict:
    order = tree.order if tree is not None else list(s.post_trade)
    return {"initial": _pf(s.initial), "post_trade": {n: _pf(s.post_trade[n]) for n in order}}


def _portfolio(v: Any, where: str) -> Portfolio:
    if not isinstance(v, list) or len(v) != 2:
        raise ModelSyntaxError(f"{where}: portfolio must be a [cash, shares] pair")
    return Portfolio(parse_rational(v[0], where), parse_rational(v[1], where))


def strategy_from_dict(doc: Any) -> Strategy:
    if not isinstance(doc, dict) or not isinstance(doc.get("post_trade"), dict):
        raise ModelSyntaxError("strategy must have a 'post_trade' object")
    initial = _portfolio(doc.get("initial", ["0", "0"]), "initial")
    post = {n: _portfolio(v, f"post_trade[{n}]") for n, v in doc["post_trade"].items()}
    return Strategy(initial, post)


def violation_to_dict(v: Violation, tree=None) -> dict:
    cut = sorted(v.stop.cut, key=tree.index) if tree is not None else sorted(v.stop.cut)
    return {"t": v.t, "node": v.node, "case": v.case, "stop": cut, "z": format_rational(v.z)}


def verdict_to_dict(verdict, tree=None) -> dict:
    if isinstance(verdict, NoArbitrage):
        return {"verdict": "NoArbitrage", "certificate": certificate_to_dict(verdict.certificate, tree)}
    assert isinstance(verdict, Arbitrage)
    return {
        "verdict": "Arbitrage",
        "strategy": strategy_to_dict(verdict.strategy, tree),
        "witness": violation_to_dict(verdict.witness, tree),
    }


def load_json(text: str) -> Any:
    return _load(text)


def read_model(path: str) -> CombinedCostModel:
    try:
        with open(path) as fh:
            return parse_model(fh.read())
    except OSError as exc:
        raise ModelSyntaxError(f"cannot read {path}: {exc}") from exc


def dumps(doc: Any, indent: Optional[int] = 2) -> str:
    return json.dumps(doc, indent=indent)
