"""Separating measures and the one-step counterexample model.

A separating measure must make the expected terminal liquidation value of
every zero-endowment strategy nonpositive.  :func:`espm_falsify` searches
buy-and-hold (and short-and-hold) positions of escalating size for one
whose expected liquidation value is strictly positive, which rules the
measure out.  On :func:`example1_model` it succeeds for every fully
supported measure even though the model has no arbitrage.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Optional

from .errors import BadMeasure, MeasureNotEquivalent, NotSelfFinancing, NotSingleStep
from .market import (
    ORIGIN,
    CombinedCostModel,
    Portfolio,
    Strategy,
    fixed_cost_model,
    is_self_financing,
    liquidation_value,
)
from .tree import NodeSpec, build_tree


@dataclass(frozen=True)
class TerminalMeasure:
    weights: Mapping[str, Fraction]

    @property
    def equivalent(self) -> bool:
        return all(w > 0 for w in self.weights.values())


def terminal_measure(weights: Mapping[str, object]) -> TerminalMeasure:
    return TerminalMeasure({n: Fraction(w) for n, w in weights.items()})


def _check_measure(model: CombinedCostModel, q: TerminalMeasure):
    leaves = set(model.tree.terminals())
    if set(q.weights) != leaves:
        raise BadMeasure("measure must weight exactly the time-T nodes")
    if any(w < 0 for w in q.weights.values()) or sum(q.weights.values()) != 1:
        raise BadMeasure("weights must be nonnegative and sum to 1")


def expected_liquidation(model: CombinedCostModel, q: TerminalMeasure, s: Strategy) -> Fraction:
    _check_measure(model, q)
    if tuple(s.initial) != (0, 0) or not is_self_financing(model, s).ok:
        raise NotSelfFinancing("strategy must be self-financing from (0, 0)")
    return sum(
        (w * liquidation_value(model, n, s.post_trade[n]) for n, w in q.weights.items()),
        Fraction(0),
    )


def hold_strategy(model: CombinedCostModel, y: Fraction) -> Strategy:
    """Trade ``y`` shares at the root (buy if positive, short if negative),
    pay the fixed cost, and hold to the horizon."""
    tree = model.tree
    a, b, c = model.prices(tree.root)
    y = Fraction(y)
    cash = -a * y - c if y > 0 else -b * y - c
    opened = Portfolio(cash, y)
    return Strategy(ORIGIN, {n: opened for n in tree.order})


def size_grid(q: TerminalMeasure) -> list[Fraction]:
    """Powers of two from 1 up to the first one at or above
    ``2 * max(1/weight) + 4``."""
    cap = 2 * max(1 / w for w in q.weights.values()) + 4
    grid = [Fraction(1)]
    while grid[-1] < cap:
        grid.append(grid[-1] * 2)
    return grid


def espm_falsify(model: CombinedCostModel, q: TerminalMeasure) -> Optional[Strategy]:
    if model.tree.horizon != 1:
        raise NotSingleStep(f"model has horizon {model.tree.horizon}")
    _check_measure(model, q)
    if not q.equivalent:
        raise MeasureNotEquivalent("measure must give every time-T node positive weight")
    grid = size_grid(q)
    for sign in (1, -1):
        for y in grid:
            s = hold_strategy(model, sign * y)
            if expected_liquidation(model, q, s) > 0:
                return s
    return None


def example1_model() -> CombinedCostModel:
    """One step: price 1 moves to 2 (node ``u``) or stays at 1 (node ``d``);
    no spread, fixed cost 1 everywhere."""
    tree = build_tree([NodeSpec("root"), NodeSpec("u", "root"), NodeSpec("d", "root")])
    price = {"root": Fraction(1), "u": Fraction(2), "d": Fraction(1)}
    fixed = {n: Fraction(1) for n in tree.order}
    return fixed_cost_model(tree, price, fixed)
