"""Combined-cost market model: solvency, liquidation, self-financing, arbitrage.

Everything here is a direct check against the model definitions and is the
ground truth that both `decide` and the oracle are both tested against.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, NamedTuple, Optional

from .errors import IncompleteStrategy, InvariantViolation, NotSelfFinancing, UnknownNode
from .tree import EventTree, Process

ZERO = Fraction(0)


class Portfolio(NamedTuple):
    x: Fraction  # cash
    y: Fraction  # shares

    def __sub__(self, other):
        return Portfolio(self.x - other.x, self.y - other.y)


ORIGIN = Portfolio(ZERO, ZERO)


@dataclass(frozen=True)
class CombinedCostModel:
    """Ask ``A``, bid ``B`` and fixed cost ``C`` adapted to ``tree``.

    Requires ``0 < B <= A`` and ``0 < C`` at every node; violations raise
    :class:`InvariantViolation` naming the node.
    """

    tree: EventTree
    ask: Process
    bid: Process
    fixed: Process

    def __post_init__(self):
        for name in ("ask", "bid", "fixed"):
            proc = {n: Fraction(v) for n, v in getattr(self, name).items()}
            for n in self.tree.order:
                if n not in proc:
                    raise InvariantViolation(n, f"missing {name} value")
            extra = set(proc) - set(self.tree.order)
            if extra:
                raise InvariantViolation(sorted(extra)[0], f"{name} given for unknown node")
            object.__setattr__(self, name, proc)
        for n in self.tree.order:
            a, b, c = self.ask[n], self.bid[n], self.fixed[n]
            if b <= 0:
                raise InvariantViolation(n, f"bid {b} is not positive")
            if b > a:
                raise InvariantViolation(n, f"bid {b} exceeds ask {a}")
            if c <= 0:
                raise InvariantViolation(n, f"fixed cost {c} is not positive")

    def prices(self, node: str) -> tuple[Fraction, Fraction, Fraction]:
        try:
            return self.ask[node], self.bid[node], self.fixed[node]
        except KeyError:
            raise UnknownNode(node) from None

    def scaled(self, k) -> "CombinedCostModel":
        k = Fraction(k)
        return CombinedCostModel(
            self.tree,
            {n: k * v for n, v in self.ask.items()},
            {n: k * v for n, v in self.bid.items()},
            {n: k * v for n, v in self.fixed.items()},
        )

    def with_fixed(self, fixed: Process) -> "CombinedCostModel":
        return CombinedCostModel(self.tree, self.ask, self.bid, fixed)

    @property
    def is_fixed_cost(self) -> bool:
        return all(self.ask[n] == self.bid[n] for n in self.tree.order)


def fixed_cost_model(tree: EventTree, price: Process, fixed: Process) -> CombinedCostModel:
    return CombinedCostModel(tree, dict(price), dict(price), fixed)


def liquidation_value(model: CombinedCostModel, node: str, p: Portfolio) -> Fraction:
    """Cash after closing the share position, skipping the close when
    ``0 <= y <= C/B`` (the closed interval)."""
    a, b, c = model.prices(node)
    x, y = Fraction(p[0]), Fraction(p[1])
    if 0 <= y <= c / b:
        return x
    return x + (b * y if y > 0 else a * y) - c


def is_solvent(model: CombinedCostModel, node: str, p: Portfolio) -> bool:
    a, b, c = model.prices(node)
    x, y = p
    if x >= 0 and y >= 0:
        return True
    return x + (b * y if y > 0 else a * y) - c >= 0


@dataclass(frozen=True)
class Strategy:
    """Predictable strategy: ``post_trade[n]`` is the holding chosen at node
    ``n`` and carried into its successors (``(X_{t+1}, Y_{t+1})`` on the
    atoms of ``F_t``)."""

    initial: Portfolio
    post_trade: Mapping[str, Portfolio]

    def pre_trade(self, tree: EventTree, node: str) -> Portfolio:
        parent = tree.parent(node)
        return self.initial if parent is None else self.post_trade[parent]

    def terminal(self, tree: EventTree) -> dict[str, Portfolio]:
        return {n: self.post_trade[n] for n in tree.terminals()}


def zero_strategy(tree: EventTree) -> Strategy:
    return Strategy(ORIGIN, {n: ORIGIN for n in tree.order})


def _check_complete(tree: EventTree, s: Strategy):
    missing = [n for n in tree.order if n not in s.post_trade]
    if missing:
        raise IncompleteStrategy(f"no post-trade holding at {missing}")


@dataclass(frozen=True)
class SelfFinancingReport:
    ok: bool
    violations: list = field(default_factory=list)  # (node, delta portfolio)


def is_self_financing(model: CombinedCostModel, s: Strategy) -> SelfFinancingReport:
    tree = model.tree
    _check_complete(tree, s)
    violations = []
    for n in tree.order:
        delta = Portfolio(*s.pre_trade(tree, n)) - Portfolio(*s.post_trade[n])
        if not is_solvent(model, n, delta):
            violations.append((n, delta))
    return SelfFinancingReport(not violations, violations)


def is_arbitrage(model: CombinedCostModel, s: Strategy) -> bool:
    tree = model.tree
    _check_complete(tree, s)
    if tuple(s.initial) != (0, 0):
        return False
    term = s.terminal(tree)
    if any(p.x < 0 or p.y < 0 for p in term.values()):
        return False
    if not any(p.x > 0 for p in term.values()):
        return False
    return is_self_financing(model, s).ok


def na_liquidation_characterisation(model: CombinedCostModel, s: Strategy) -> Fraction:
    """Smallest liquidation value of the terminal holdings over all
    time-``T`` nodes, for a self-financing strategy started from zero."""
    if tuple(s.initial) != (0, 0) or not is_self_financing(model, s).ok:
        raise NotSelfFinancing("strategy must be self-financing from (0, 0)")
    tree = model.tree
    return min(liquidation_value(model, n, s.post_trade[n]) for n in tree.terminals())


def round_trip_strategy(
    model: CombinedCostModel, node: str, cut, side: str, z: Fraction
) -> Strategy:
    """Open ``z`` shares at ``node`` and close them on the exercise nodes of
    ``cut``; zero holdings everywhere outside the subtree of ``node``.

    ``side="buy"`` buys at the ask and later sells at the bid;
    ``side="sell"`` shorts at the bid and later covers at the ask.
    """
    tree = model.tree
    a_t, b_t, c_t = model.prices(node)
    z = Fraction(z)
    if side == "buy":
        opened = Portfolio(-a_t * z - c_t, z)
    elif side == "sell":
        opened = Portfolio(b_t * z - c_t, -z)
    else:
        raise ValueError(f"unknown side {side!r}")
    post = {n: ORIGIN for n in tree.order}
    post[node] = opened
    stack = list(tree.children(node))
    while stack:
        n = stack.pop()
        if n in cut:
            a_s, b_s, c_s = model.prices(n)
            if side == "buy":
                closed = Portfolio(opened.x + b_s * z - c_s, ZERO)
            else:
                closed = Portfolio(opened.x - a_s * z - c_s, ZERO)
            for m in tree.subtree(n):
                post[m] = closed
        else:
            post[n] = opened
            stack.extend(tree.children(n))
    return Strategy(ORIGIN, post)


def required_quantity(model: CombinedCostModel, node: str, cut, side: str) -> Fraction:
    """One plus the largest break-even quantity over the exercise nodes."""
    a_t, b_t, c_t = model.prices(node)
    bound = ZERO
    for n in cut:
        a_s, b_s, c_s = model.prices(n)
        gap = b_s - a_t if side == "buy" else b_t - a_s
        if gap <= 0:
            raise ValueError(f"no price gap at exercise node {n!r}")
        bound = max(bound, (c_t + c_s) / gap)
    return bound + 1


def portfolio(x, y) -> Portfolio:
    return Portfolio(Fraction(x), Fraction(y))


def strategy_from_holdings(holdings: Mapping[str, tuple], initial: Optional[tuple] = None) -> Strategy:
    init = ORIGIN if initial is None else portfolio(*initial)
    return Strategy(init, {n: portfolio(*p) for n, p in holdings.items()})
