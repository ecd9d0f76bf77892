"""Brute-force arbitrage search that does not rely on the envelope recursion.

The solvency set at a node is the union of three polyhedra in the traded
amount ``(dx, dy) = (X_t - X_{t+1}, Y_t - Y_{t+1})``:

* ``Throwaway``: ``dx >= 0, dy >= 0``
* ``SellSide``:  ``dy >= 0, dx + B*dy >= C``
* ``BuySide``:   ``dy <= 0, dx + A*dy >= C``

Fixing one region per node (a trade pattern) turns the arbitrage question
into a linear program over the post-trade holdings, solved exactly.
:func:`exhaustive_search` visits patterns in lexicographic order (node
order, then region order as listed).  A block of patterns sharing a prefix
is skipped only when the LP in which the unassigned nodes are relaxed to
the closed convex hull ``{dx + B*dy >= 0, dx + A*dy >= 0}`` has no
positive value; the first successful pattern is therefore the same one a
full enumeration finds.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from typing import Mapping, Optional, Sequence

from .errors import InternalInconsistency, ModelTooLarge, SubtreeTooLarge
from .lp import Constraint, Infeasible, LinearProgram, Optimal, SolveStats, Unbounded, solve_lp
from .market import (
    ORIGIN,
    CombinedCostModel,
    Portfolio,
    Strategy,
    is_arbitrage,
    is_solvent,
    required_quantity,
    round_trip_strategy,
)
from .tree import enumerate_stopping_times

THROWAWAY = "Throwaway"
SELL_SIDE = "SellSide"
BUY_SIDE = "BuySide"
REGIONS = (THROWAWAY, SELL_SIDE, BUY_SIDE)

MAX_NODES = 12
MAX_DEPTH = 4

ZERO = Fraction(0)
ONE = Fraction(1)


@dataclass(frozen=True)
class TradePattern:
    assignment: Mapping[str, str]


def in_region(model: CombinedCostModel, node: str, region: str, delta) -> bool:
    a, b, c = model.prices(node)
    dx, dy = delta
    if region == THROWAWAY:
        return dx >= 0 and dy >= 0
    if region == SELL_SIDE:
        return dy >= 0 and dx + b * dy >= c
    if region == BUY_SIDE:
        return dy <= 0 and dx + a * dy >= c
    raise ValueError(f"unknown region {region!r}")


def region_union_covers(model: CombinedCostModel, node: str, sample: Portfolio) -> bool:
    """Whether the three regions reproduce solvency at ``sample`` exactly."""
    in_union = any(in_region(model, node, r, sample) for r in REGIONS)
    return in_union == is_solvent(model, node, sample)


def _xv(n):
    return f"x:{n}"


def _yv(n):
    return f"y:{n}"


def _delta_terms(tree, n, cx, cy):
    """Coefficients of ``cx*dx + cy*dy`` in the holding variables."""
    coeffs = {}
    p = tree.parent(n)
    if cx:
        coeffs[_xv(n)] = -cx
        if p is not None:
            coeffs[_xv(p)] = cx
    if cy:
        coeffs[_yv(n)] = -cy
        if p is not None:
            coeffs[_yv(p)] = cy
    return coeffs


def _region_rows(model: CombinedCostModel, n: str, region: Optional[str]):
    tree = model.tree
    a, b, c = model.prices(n)
    if region == THROWAWAY:
        return [
            Constraint(_delta_terms(tree, n, ONE, ZERO), ">=", ZERO),
            Constraint(_delta_terms(tree, n, ZERO, ONE), ">=", ZERO),
        ]
    if region == SELL_SIDE:
        return [
            Constraint(_delta_terms(tree, n, ZERO, ONE), ">=", ZERO),
            Constraint(_delta_terms(tree, n, ONE, b), ">=", c),
        ]
    if region == BUY_SIDE:
        return [
            Constraint(_delta_terms(tree, n, ZERO, ONE), "<=", ZERO),
            Constraint(_delta_terms(tree, n, ONE, a), ">=", c),
        ]
    if region is None:  # closed convex hull of the solvency set
        return [
            Constraint(_delta_terms(tree, n, ONE, b), ">=", ZERO),
            Constraint(_delta_terms(tree, n, ONE, a), ">=", ZERO),
        ]
    raise ValueError(f"unknown region {region!r}")


def _pattern_lp(model: CombinedCostModel, regions: Sequence[Optional[str]]) -> LinearProgram:
    tree = model.tree
    variables = []
    for n in tree.order:
        variables += [_xv(n), _yv(n)]
    cons = []
    for n, r in zip(tree.order, regions):
        cons += _region_rows(model, n, r)
    for n in tree.terminals():
        cons.append(Constraint({_xv(n): ONE}, ">=", ZERO))
        cons.append(Constraint({_yv(n): ONE}, ">=", ZERO))
    objective = {_xv(n): ONE for n in tree.terminals()}
    return LinearProgram(tuple(variables), tuple(cons), objective)


def build_lp(model: CombinedCostModel, pattern: TradePattern) -> LinearProgram:
    """Holdings LP for one trade pattern: maximize total terminal cash."""
    missing = [n for n in model.tree.order if n not in pattern.assignment]
    if missing:
        raise ValueError(f"pattern has no region at {missing}")
    return _pattern_lp(model, [pattern.assignment[n] for n in model.tree.order])


def _strategy_from_point(model, point) -> Strategy:
    return Strategy(ORIGIN, {n: Portfolio(point[_xv(n)], point[_yv(n)]) for n in model.tree.order})


def strategy_from_result(model: CombinedCostModel, result) -> Optional[Strategy]:
    """Strategy behind a successful pattern LP, or ``None``."""
    if isinstance(result, Optimal):
        if result.value > 0:
            return _strategy_from_point(model, result.assignment)
        return None
    if isinstance(result, Unbounded):
        leaves = model.tree.terminals()
        scale = ONE
        while not all(
            result.point[_xv(n)] + scale * result.ray[_xv(n)] > 0
            for n in leaves if result.ray[_xv(n)] > 0
        ):
            scale *= 2
        point = {v: result.point[v] + scale * result.ray[v] for v in result.point}
        return _strategy_from_point(model, point)
    return None


@dataclass
class SearchStats:
    lps: int = 0
    pruned: int = 0
    lp: SolveStats = field(default_factory=SolveStats)


def exhaustive_search(
    model: CombinedCostModel,
    max_nodes: int = MAX_NODES,
    prune: bool = True,
    stats: Optional[SearchStats] = None,
    backend: Optional[str] = None,
) -> Optional[Strategy]:
    """Arbitrage strategy from the first successful trade pattern, or ``None``.

    With ``prune=False`` every one of the ``3**N`` pattern LPs is solved in
    order until one succeeds.
    """
    tree = model.tree
    N = len(tree)
    if N > max_nodes:
        raise ModelTooLarge(f"{N} nodes exceeds the oracle limit of {max_nodes}")
    if stats is None:
        stats = SearchStats()

    def solve(regions):
        stats.lps += 1
        return solve_lp(_pattern_lp(model, regions), backend=backend, stats=stats.lp)

    def confirm(result):
        s = strategy_from_result(model, result)
        if s is None:
            return None
        if not is_arbitrage(model, s):
            raise InternalInconsistency("pattern LP solution is not an arbitrage")
        return s

    if not prune:
        for regions in product(REGIONS, repeat=N):
            s = confirm(solve(list(regions)))
            if s is not None:
                return s
        return None

    def hopeless(result):
        return isinstance(result, Infeasible) or (isinstance(result, Optimal) and result.value <= 0)

    regions: list = [None] * N
    if hopeless(solve(regions)):
        stats.pruned += 1
        return None

    def dfs(k):
        for r in REGIONS:
            regions[k] = r
            result = solve(regions)
            if k == N - 1:
                s = confirm(result)
                if s is not None:
                    return s
            elif hopeless(result):
                stats.pruned += 1
            else:
                s = dfs(k + 1)
                if s is not None:
                    return s
        regions[k] = None
        return None

    return dfs(0)


def simple_search(model: CombinedCostModel, max_depth: int = MAX_DEPTH) -> Optional[Strategy]:
    """Search single round trips: open at a node, close on a stopping time.

    Buy-then-sell is tried when every exercise bid beats the opening ask,
    sell-then-cover when every exercise ask undercuts the opening bid.
    """
    tree = model.tree
    if tree.horizon > max_depth:
        raise ModelTooLarge(f"horizon {tree.horizon} exceeds stopping-time depth limit {max_depth}")
    for lam in tree.nonterminals():
        a_t, b_t, _ = model.prices(lam)
        try:
            stops = enumerate_stopping_times(tree, (tree.time(lam), lam), max_depth)
        except SubtreeTooLarge as exc:
            raise ModelTooLarge(str(exc)) from exc
        for st in stops:
            for side in ("buy", "sell"):
                if side == "buy":
                    ok = all(model.bid[e] > a_t for e in st.cut)
                else:
                    ok = all(model.ask[e] < b_t for e in st.cut)
                if not ok:
                    continue
                z = required_quantity(model, lam, st.cut, side)
                s = round_trip_strategy(model, lam, st.cut, side, z)
                if not is_arbitrage(model, s):
                    raise InternalInconsistency(f"round trip at {lam!r} is not an arbitrage")
                return s
    return None
