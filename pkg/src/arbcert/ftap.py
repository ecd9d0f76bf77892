"""Arbitrage decision by backward induction on the bid/ask envelope.

``U`` carries the best ask reachable by a stopping time, ``V`` the best
bid.  The model is arbitrage-free exactly when ``max(V, B) <= min(U, A)``
at every node; otherwise the largest failing time yields an explicit
round-trip strategy, and when it holds a consistent price process with a
family of one-step martingale measures is built from the same envelope.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Literal, Optional, Union

from .errors import (
    ClassificationImpossible,
    InternalInconsistency,
    IntervalViolated,
    NotAViolation,
    TimeOutOfRange,
)
from .market import (
    CombinedCostModel,
    Strategy,
    fixed_cost_model,
    is_arbitrage,
    required_quantity,
    round_trip_strategy,
)
from .tree import EventTree, Process, SingleStepMeasureFamily, StoppingTime, family_problems

BID_ABOVE_ASK = "BidAboveAsk"  # V_t > A_t: buy now, sell later
ASK_BELOW_BID = "AskBelowBid"  # U_t < B_t: short now, cover later


@dataclass(frozen=True)
class UVProcesses:
    U: dict
    V: dict

    def lower(self, model: CombinedCostModel, n: str) -> Fraction:
        return max(self.V[n], model.bid[n])

    def upper(self, model: CombinedCostModel, n: str) -> Fraction:
        return min(self.U[n], model.ask[n])


@dataclass(frozen=True)
class Violation:
    t: int
    node: str
    case: str
    stop: Optional[StoppingTime] = None
    z: Optional[Fraction] = None


@dataclass(frozen=True)
class Certificate:
    S: dict
    Q: SingleStepMeasureFamily


@dataclass(frozen=True)
class NoArbitrage:
    certificate: Certificate
    arbitrage = False


@dataclass(frozen=True)
class Arbitrage:
    strategy: Strategy
    witness: Violation
    arbitrage = True


Verdict = Union[NoArbitrage, Arbitrage]


def compute_uv(model: CombinedCostModel) -> UVProcesses:
    tree = model.tree
    U, V = {}, {}
    for t in range(tree.horizon, -1, -1):
        for n in tree.atoms(t):
            kids = tree.children(n)
            if not kids:
                U[n], V[n] = model.ask[n], model.bid[n]
            else:
                U[n] = max(min(U[c], model.ask[c]) for c in kids)
                V[n] = min(max(V[c], model.bid[c]) for c in kids)
    return UVProcesses(U, V)


def interval_condition(model: CombinedCostModel, uv: UVProcesses) -> Optional[Violation]:
    """First node (largest time, then node order) where ``max(V,B) > min(U,A)``."""
    tree = model.tree
    for t in range(tree.horizon - 1, -1, -1):
        for n in tree.atoms(t):
            if uv.lower(model, n) <= uv.upper(model, n):
                continue
            if uv.V[n] > model.ask[n]:
                return Violation(t, n, BID_ABOVE_ASK)
            if uv.U[n] < model.bid[n]:
                return Violation(t, n, ASK_BELOW_BID)
            raise ClassificationImpossible(
                f"interval fails at {n!r} (t={t}) but neither V > A nor U < B")
    return None


def construct_stopping_time(
    model: CombinedCostModel,
    uv: UVProcesses,
    t: int,
    kind: Literal["sigma", "tau"],
    node: Optional[str] = None,
) -> StoppingTime:
    """Stopping time ``> t`` with ``A <= U_t`` (sigma) or ``B >= V_t`` (tau)
    on every exercise node.

    Starts from the constant time ``T`` and, moving back, stops at a time
    ``s`` node as soon as its own price already beats the envelope there.
    """
    tree = model.tree
    if not 0 <= t <= tree.horizon - 1:
        raise TimeOutOfRange(f"time {t} outside 0..{tree.horizon - 1}")
    if kind == "sigma":
        stop_here = lambda n: model.ask[n] <= uv.U[n]  # noqa: E731
    elif kind == "tau":
        stop_here = lambda n: model.bid[n] >= uv.V[n]  # noqa: E731
    else:
        raise ValueError(f"unknown kind {kind!r}")

    starts = tree.atoms(t) if node is None else (node,)
    cut = set()
    stack = [c for s in starts for c in tree.children(s)]
    while stack:
        n = stack.pop()
        if tree.is_terminal(n) or stop_here(n):
            cut.add(n)
        else:
            stack.extend(tree.children(n))
    return StoppingTime(frozenset(cut), t, node)


def _midpoint(lo: Fraction, hi: Fraction) -> Fraction:
    return (lo + hi) / 2


def construct_certificate(model: CombinedCostModel, uv: UVProcesses) -> Certificate:
    tree = model.tree
    root = tree.root
    lo, hi = uv.lower(model, root), uv.upper(model, root)
    if lo > hi:
        raise IntervalViolated(f"empty interval at root: [{lo}, {hi}]")
    S = {root: _midpoint(lo, hi)}
    rows = {}
    for n in tree.order:
        kids = tree.children(n)
        if not kids:
            continue
        for c in kids:
            if uv.lower(model, c) > uv.upper(model, c):
                raise IntervalViolated(f"empty interval at {c!r}")
        # first children attaining the max in U and the min in V
        mu = next(c for c in kids if uv.upper(model, c) == uv.U[n])
        nu = next(c for c in kids if uv.lower(model, c) == uv.V[n])
        s_here = S[n]
        for c in kids:
            S[c] = _midpoint(uv.lower(model, c), uv.upper(model, c))
        if mu != nu:
            S[mu] = uv.upper(model, mu)
            S[nu] = uv.lower(model, nu)
            if S[mu] == S[nu]:
                w = Fraction(1)
            else:
                w = (s_here - S[nu]) / (S[mu] - S[nu])
            row = {c: Fraction(0) for c in kids}
            row[mu], row[nu] = w, 1 - w
        else:
            S[mu] = s_here
            row = {c: Fraction(0) for c in kids}
            row[mu] = Fraction(1)
        rows[n] = row
    return Certificate(S, SingleStepMeasureFamily(rows))


@dataclass(frozen=True)
class CertificateReport:
    ok: bool
    failures: list = field(default_factory=list)


def verify_certificate(model: CombinedCostModel, cert: Certificate) -> CertificateReport:
    tree = model.tree
    failures = []
    S = cert.S
    for n in tree.order:
        if n not in S:
            failures.append((n, "no price"))
            continue
        if not model.bid[n] <= S[n] <= model.ask[n]:
            failures.append((n, f"S={S[n]} outside [{model.bid[n]}, {model.ask[n]}]"))
    for problem in family_problems(tree, cert.Q):
        failures.append((None, problem))
    for n in tree.nonterminals():
        row = cert.Q.rows.get(n)
        if row is None or n not in S or any(c not in S for c in tree.children(n)):
            continue
        mean = sum((row.get(c, 0) * S[c] for c in tree.children(n)), Fraction(0))
        if mean != S[n]:
            failures.append((n, f"martingale: S={S[n]} but row mean {mean}"))
    return CertificateReport(not failures, failures)


def construct_arbitrage(model: CombinedCostModel, v: Violation) -> Strategy:
    if v.stop is None or v.z is None:
        raise NotAViolation("violation lacks a stopping time or quantity")
    a, b = model.ask[v.node], model.bid[v.node]
    side = "buy" if v.case == BID_ABOVE_ASK else "sell"
    for e in v.stop.cut:
        gap = model.bid[e] - a if side == "buy" else b - model.ask[e]
        if gap <= 0:
            raise NotAViolation(f"no profitable price gap at exercise node {e!r}")
        if v.z * gap <= model.fixed[v.node] + model.fixed[e]:
            raise NotAViolation(f"quantity {v.z} too small at exercise node {e!r}")
    return round_trip_strategy(model, v.node, v.stop.cut, side, v.z)


def complete_violation(model: CombinedCostModel, uv: UVProcesses, v: Violation) -> Violation:
    """Attach the stopping time and the trade size to a bare violation."""
    kind = "tau" if v.case == BID_ABOVE_ASK else "sigma"
    stop = construct_stopping_time(model, uv, v.t, kind, node=v.node)
    side = "buy" if v.case == BID_ABOVE_ASK else "sell"
    z = required_quantity(model, v.node, stop.cut, side)
    return Violation(v.t, v.node, v.case, stop, z)


def decide(model: CombinedCostModel) -> Verdict:
    uv = compute_uv(model)
    v = interval_condition(model, uv)
    if v is None:
        cert = construct_certificate(model, uv)
        report = verify_certificate(model, cert)
        if not report.ok:
            raise InternalInconsistency(f"certificate failed verification: {report.failures}")
        return NoArbitrage(cert)
    v = complete_violation(model, uv, v)
    strategy = construct_arbitrage(model, v)
    if not is_arbitrage(model, strategy):
        raise InternalInconsistency(f"constructed strategy is not an arbitrage ({v})")
    return Arbitrage(strategy, v)


def fixed_cost_decide(S: Process, C: Process, tree: EventTree) -> Verdict:
    return decide(fixed_cost_model(tree, S, C))


def embedded_fixed_cost(model: CombinedCostModel) -> Optional[dict]:
    verdict = decide(model)
    if verdict.arbitrage:
        return None
    return dict(verdict.certificate.S)
