from fractions import Fraction as F

import pytest
from hypothesis import strategies as st

from arbcert.espm import example1_model
from arbcert.market import CombinedCostModel
from arbcert.tree import NodeSpec, build_tree


def one_step(root, kids, fixed=1, names=None):
    """One-step model from ``(ask, bid)`` pairs; plain numbers mean ask == bid."""

    def ab(v):
        return (F(v[0]), F(v[1])) if isinstance(v, tuple) else (F(v), F(v))

    names = names or [f"c{k}" for k in range(len(kids))]
    tree = build_tree([NodeSpec("r")] + [NodeSpec(n, "r") for n in names])
    ask, bid = {}, {}
    for n, v in zip(["r"] + names, [root] + list(kids)):
        ask[n], bid[n] = ab(v)
    return CombinedCostModel(tree, ask, bid, {n: F(fixed) for n in tree.order})


def binary_tree(depth):
    specs = [NodeSpec("r")]
    frontier = ["r"]
    for _ in range(depth):
        nxt = []
        for p in frontier:
            for s in ("u", "d"):
                specs.append(NodeSpec(p + s if p != "r" else s, p))
                nxt.append(specs[-1].id)
        frontier = nxt
    return build_tree(specs)


@pytest.fixture
def example1():
    return example1_model()


@pytest.fixture
def bid_above_ask():
    # root ask 1 / bid 1/2, children at 2 and 3, all fixed costs 1
    return one_step((1, F(1, 2)), [2, 3], names=["u", "d"])


@pytest.fixture
def wide_spread():
    tree = build_tree([NodeSpec("r")])
    return CombinedCostModel(tree, {"r": F(3, 2)}, {"r": F(1, 2)}, {"r": F(1)})


PRICE_GRID = [F(k, 2) for k in range(1, 7)]


@st.composite
def small_trees(draw, max_depth=2, max_nodes=10):
    depth = draw(st.integers(0, max_depth))
    specs = [NodeSpec("r")]
    frontier = ["r"]
    for _ in range(depth):
        nxt = []
        for p in frontier:
            for k in range(draw(st.integers(1, 3))):
                specs.append(NodeSpec(f"{p}{k}", p))
                nxt.append(f"{p}{k}")
        frontier = nxt
    if len(specs) > max_nodes:
        specs = specs[: 1]
        frontier = ["r"]
        for t in range(depth):
            specs.append(NodeSpec(f"r{'0' * (t + 1)}", specs[-1].id))
    return build_tree(specs)


@st.composite
def small_models(draw, max_depth=2, max_nodes=10, spread=True):
    """Models on a coarse price grid, so that price ties (boundary cases) are common."""
    tree = draw(small_trees(max_depth, max_nodes))
    ask, bid, fixed = {}, {}, {}
    for n in tree.order:
        b = draw(st.sampled_from(PRICE_GRID))
        a = b + (draw(st.sampled_from([F(0), F(0), F(1, 2), F(1)])) if spread else 0)
        ask[n], bid[n] = a, b
        fixed[n] = draw(st.sampled_from([F(1, 4), F(1, 2), F(1), F(2)]))
    return CombinedCostModel(tree, ask, bid, fixed)
