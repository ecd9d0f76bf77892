from fractions import Fraction as F

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from arbcert.errors import IntervalViolated, NotAViolation, TimeOutOfRange
from arbcert.ftap import (
    ASK_BELOW_BID,
    BID_ABOVE_ASK,
    Certificate,
    Violation,
    complete_violation,
    compute_uv,
    construct_arbitrage,
    construct_certificate,
    construct_stopping_time,
    decide,
    embedded_fixed_cost,
    fixed_cost_decide,
    interval_condition,
    verify_certificate,
)
from arbcert.market import CombinedCostModel, fixed_cost_model, is_arbitrage, is_self_financing
from arbcert.oracle import exhaustive_search, simple_search
from arbcert.tree import NodeSpec, SingleStepMeasureFamily, build_tree, is_stopping_time, product_measure

from conftest import binary_tree, one_step, small_models


def fixed_model(tree, prices, fixed=1):
    return fixed_cost_model(tree, {n: F(v) for n, v in prices.items()}, {n: F(fixed) for n in tree.order})


def test_compute_uv_one_step():
    m = one_step(1, [2, 1])
    uv = compute_uv(m)
    assert (uv.U["r"], uv.V["r"]) == (2, 1)
    for n in m.tree.terminals():
        assert uv.U[n] == m.ask[n] and uv.V[n] == m.bid[n]


def test_compute_uv_example1(example1):
    uv = compute_uv(example1)
    assert (uv.U["root"], uv.V["root"]) == (2, 1)


def test_interval_condition_example1(example1):
    assert interval_condition(example1, compute_uv(example1)) is None


def test_interval_condition_bid_above_ask(bid_above_ask):
    v = interval_condition(bid_above_ask, compute_uv(bid_above_ask))
    assert (v.t, v.node, v.case) == (0, "r", BID_ABOVE_ASK)
    assert compute_uv(bid_above_ask).V["r"] == 2


def test_interval_condition_ask_below_bid():
    m = one_step(3, [1, 1])
    v = interval_condition(m, compute_uv(m))
    assert v.case == ASK_BELOW_BID


def test_interval_condition_takes_largest_t():
    tree = binary_tree(2)
    # root violated (children all above 1) and node u violated (children above 2)
    m = fixed_model(tree, {"r": 1, "u": 2, "d": 2, "uu": 3, "ud": 4, "du": 2, "dd": 2})
    v = interval_condition(m, compute_uv(m))
    assert (v.t, v.node) == (1, "u")


def test_stopping_time_base_case():
    tree = binary_tree(2)
    m = fixed_model(tree, {"r": 1, "u": 2, "d": 3, "uu": 3, "ud": 1, "du": 1, "dd": 2})
    uv = compute_uv(m)
    st_ = construct_stopping_time(m, uv, 1, "sigma")
    assert st_.cut == frozenset(tree.terminals())
    with pytest.raises(TimeOutOfRange):
        construct_stopping_time(m, uv, 2, "sigma")


def test_stopping_time_mixes_levels():
    tree = binary_tree(2)
    m = fixed_model(tree, {"r": 1, "u": 2, "d": 3, "uu": 3, "ud": 1, "du": 1, "dd": 2})
    uv = compute_uv(m)
    assert uv.U["u"] == 3 and uv.U["d"] == 2 and uv.U["r"] == 2
    sigma = construct_stopping_time(m, uv, 0, "sigma")
    # A_u = 2 <= U_u = 3 stops at u; A_d = 3 > U_d = 2 continues to time 2
    assert sigma.cut == {"u", "du", "dd"}
    assert is_stopping_time(tree, sigma.cut, (0, "r"))
    assert all(m.ask[e] <= uv.U["r"] for e in sigma.cut)


def test_tau_constant_continuation(example1):
    tree = build_tree([NodeSpec("root"), NodeSpec("u", "root"), NodeSpec("d", "root"),
                       NodeSpec("uu", "u"), NodeSpec("dd", "d")])
    m = fixed_model(tree, {"root": 1, "u": 2, "d": 1, "uu": 2, "dd": 1})
    uv = compute_uv(m)
    tau = construct_stopping_time(m, uv, 1, "tau")
    assert tau.cut == {"uu", "dd"}
    # from time 0 the indicator rule already stops at time 1 (B_1 >= V_1 there)
    tau0 = construct_stopping_time(m, uv, 0, "tau")
    assert tau0.cut == {"u", "d"}
    assert all(m.bid[e] >= uv.V["root"] for e in tau0.cut)


def test_certificate_example1(example1):
    cert = construct_certificate(example1, compute_uv(example1))
    assert cert.S == {"root": 1, "u": 2, "d": 1}
    # weight on u is (1 - 1) / (2 - 1) = 0
    assert cert.Q.rows["root"] == {"u": 0, "d": 1}
    assert verify_certificate(example1, cert).ok


def test_all_weight_on_up_node_fails(example1):
    # all weight on u breaks the martingale condition: 1 != 2
    cert = Certificate({"root": F(1), "u": F(2), "d": F(1)},
                       SingleStepMeasureFamily({"root": {"u": F(1), "d": F(0)}}))
    report = verify_certificate(example1, cert)
    assert not report.ok
    assert [n for n, _ in report.failures] == ["root"]


def test_certificate_constant_prices():
    tree = binary_tree(2)
    m = fixed_model(tree, {n: F(3, 2) for n in tree.order})
    cert = construct_certificate(m, compute_uv(m))
    assert set(cert.S.values()) == {F(3, 2)}
    assert all(max(row.values()) == 1 for row in cert.Q.rows.values())
    assert verify_certificate(m, cert).ok


def test_certificate_one_step():
    m = one_step(1, [2, 1])
    cert = construct_certificate(m, compute_uv(m))
    assert cert.S == {"r": 1, "c0": 2, "c1": 1}
    assert cert.Q.rows["r"] == {"c0": 0, "c1": 1}


def test_certificate_single_attainer_uses_parent_value():
    # at u both children tie, so one child attains both U_u and V_u
    tree = binary_tree(2)
    m = fixed_model(tree, {"r": 1, "u": 2, "d": 1, "uu": 2, "ud": 2, "du": 1, "dd": 1})
    cert = construct_certificate(m, compute_uv(m))
    assert cert.S["uu"] == cert.S["u"] == 2
    assert cert.Q.rows["u"] == {"uu": 1, "ud": 0}
    assert verify_certificate(m, cert).ok
    # setting that child to the root value instead fails verification
    literal = dict(cert.S)
    literal["uu"] = cert.S["r"]
    assert not verify_certificate(m, Certificate(literal, cert.Q)).ok


def test_certificate_needs_interval(bid_above_ask):
    with pytest.raises(IntervalViolated):
        construct_certificate(bid_above_ask, compute_uv(bid_above_ask))


def test_verify_reports_bound_violation(example1):
    cert = construct_certificate(example1, compute_uv(example1))
    bad = dict(cert.S)
    bad["d"] = F(1, 2)
    report = verify_certificate(example1, Certificate(bad, cert.Q))
    assert not report.ok
    assert "d" in [n for n, _ in report.failures]


def test_construct_arbitrage_bid_above_ask(bid_above_ask):
    uv = compute_uv(bid_above_ask)
    v = complete_violation(bid_above_ask, uv, interval_condition(bid_above_ask, uv))
    assert v.z == 3
    assert v.stop.cut == {"u", "d"}
    s = construct_arbitrage(bid_above_ask, v)
    assert s.post_trade["u"].x == 1 and s.post_trade["d"].x == 4
    assert is_arbitrage(bid_above_ask, s)


def test_construct_arbitrage_ask_below_bid():
    m = one_step(3, [1, 1])
    uv = compute_uv(m)
    v = complete_violation(m, uv, interval_condition(m, uv))
    assert v.case == ASK_BELOW_BID and v.z == 2
    s = construct_arbitrage(m, v)
    # (3 - 1) * 2 - 2
    assert all(s.post_trade[n].x == 2 for n in m.tree.terminals())
    assert is_arbitrage(m, s)


def test_construct_arbitrage_intermediate_node():
    tree = binary_tree(2)
    m = fixed_model(tree, {"r": 2, "u": 2, "d": 2, "uu": 3, "ud": 4, "du": 2, "dd": 2})
    verdict = decide(m)
    assert verdict.arbitrage and verdict.witness.node == "u"
    s = verdict.strategy
    for n in ("r", "d", "du", "dd"):
        assert s.post_trade[n] == (0, 0)
    assert s.post_trade["uu"].y == 0 and s.post_trade["ud"].y == 0
    assert is_self_financing(m, s).ok


def test_construct_arbitrage_rejects_bad_violation(bid_above_ask, example1):
    with pytest.raises(NotAViolation):
        construct_arbitrage(bid_above_ask, Violation(0, "r", BID_ABOVE_ASK))
    uv = compute_uv(bid_above_ask)
    v = complete_violation(bid_above_ask, uv, interval_condition(bid_above_ask, uv))
    with pytest.raises(NotAViolation):
        construct_arbitrage(bid_above_ask, Violation(v.t, v.node, v.case, v.stop, F(1)))


def test_decide_examples(example1, bid_above_ask):
    assert not decide(example1).arbitrage
    assert decide(bid_above_ask).arbitrage


def test_fixed_cost_decide(example1):
    tree = example1.tree
    C = {n: F(1) for n in tree.order}
    assert not fixed_cost_decide(example1.ask, C, tree).arbitrage
    assert fixed_cost_decide({"root": F(3), "u": F(2), "d": F(1)}, C, tree).arbitrage
    assert not fixed_cost_decide({n: F(5) for n in tree.order}, C, tree).arbitrage


def test_embedded_fixed_cost(example1, bid_above_ask):
    S = embedded_fixed_cost(example1)
    assert S == {"root": 1, "u": 2, "d": 1}
    assert not fixed_cost_decide(S, example1.fixed, example1.tree).arbitrage
    assert embedded_fixed_cost(bid_above_ask) is None


# properties over random small models (coarse price grid, so many ties)


@settings(max_examples=150, deadline=None)
@given(small_models(max_depth=3, max_nodes=15))
def test_uv_and_stopping_time_guarantees(m):
    tree = m.tree
    uv = compute_uv(m)
    for n in tree.terminals():
        assert uv.U[n] == m.ask[n] and uv.V[n] == m.bid[n]
    for t in range(tree.horizon):
        for lam in tree.atoms(t):
            sigma = construct_stopping_time(m, uv, t, "sigma", node=lam)
            tau = construct_stopping_time(m, uv, t, "tau", node=lam)
            assert is_stopping_time(tree, sigma.cut, (t, lam))
            assert is_stopping_time(tree, tau.cut, (t, lam))
            assert all(m.ask[e] <= uv.U[lam] for e in sigma.cut)
            assert all(m.bid[e] >= uv.V[lam] for e in tau.cut)


@settings(max_examples=150, deadline=None)
@given(small_models(max_depth=3, max_nodes=15))
def test_decide_self_checks(m):
    verdict = decide(m)  # raises on ClassificationImpossible / InternalInconsistency
    if verdict.arbitrage:
        assert is_arbitrage(m, verdict.strategy)
        assert verdict.witness.t == max(
            t for t in range(m.tree.horizon)
            for n in m.tree.atoms(t)
            if max(compute_uv(m).V[n], m.bid[n]) > min(compute_uv(m).U[n], m.ask[n]))
    else:
        cert = verdict.certificate
        assert verify_certificate(m, cert).ok
        assert all(m.bid[n] <= cert.S[n] <= m.ask[n] for n in m.tree.order)


@settings(max_examples=150, deadline=None)
@given(small_models(max_depth=3, max_nodes=15))
def test_certificate_is_product_measure_martingale(m):
    verdict = decide(m)
    if verdict.arbitrage:
        return
    S, Q = verdict.certificate.S, verdict.certificate.Q
    tree = m.tree
    q = product_measure(tree, Q)
    for t in range(tree.horizon):
        for lam in tree.atoms(t):
            leaves = tree.leaves_below(lam)
            mass = sum(q[leaf] for leaf in leaves)
            if mass == 0:
                continue
            cond = sum(q[leaf] * S[tree.ancestor_at(leaf, t + 1)] for leaf in leaves) / mass
            assert cond == S[lam]


@settings(max_examples=100, deadline=None)
@given(small_models(max_depth=2, max_nodes=10),
       st.lists(st.sampled_from([F(1, 8), F(1, 3), F(1), F(5)]), min_size=10, max_size=10))
def test_c_invariance_and_oracle_agreement(m, costs):
    other = m.with_fixed({n: costs[k] for k, n in enumerate(m.tree.order)})
    arb = decide(m).arbitrage
    assert decide(other).arbitrage == arb
    assert (exhaustive_search(m) is not None) == arb
    assert (exhaustive_search(other) is not None) == arb
    assert (simple_search(m) is not None) == arb


@settings(max_examples=100, deadline=None)
@given(small_models(max_depth=3, max_nodes=15), st.sampled_from([F(1, 3), F(2), F(7)]))
def test_scaling(m, k):
    v, w = decide(m), decide(m.scaled(k))
    assert v.arbitrage == w.arbitrage
    if not v.arbitrage:
        assert w.certificate.S == {n: k * s for n, s in v.certificate.S.items()}


def test_model_fixed_cost_property(example1):
    assert example1.is_fixed_cost
    assert not CombinedCostModel(example1.tree, {n: F(2) for n in example1.tree.order},
                                 {n: F(1) for n in example1.tree.order},
                                 example1.fixed).is_fixed_cost
