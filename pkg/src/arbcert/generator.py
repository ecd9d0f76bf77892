"""Seeded random model generator.

The bit stream is xorshift64* (Vigna 2014: shifts 12, 25, 27 and
multiplier 0x2545F4914F6CDD1D) whose 64-bit state is initialized with one
splitmix64 step applied to the seed.  Bounded integers use rejection
sampling on ``next() % n``.  Any implementation following this recipe and
the draw order documented in :func:`generate_model` reproduces the same
models bit for bit.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from fractions import Fraction
from math import ceil, floor

from .errors import BadConfig
from .market import CombinedCostModel
from .tree import NodeSpec, build_tree

MASK64 = (1 << 64) - 1


def splitmix64(x: int) -> int:
    x = (x + 0x9E3779B97F4A7C15) & MASK64
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & MASK64
    return x ^ (x >> 31)


class XorShift64Star:
    def __init__(self, seed: int):
        self.state = splitmix64(seed & MASK64) or 1

    def next(self) -> int:
        x = self.state
        x ^= x >> 12
        x ^= (x << 25) & MASK64
        x ^= x >> 27
        self.state = x
        return (x * 0x2545F4914F6CDD1D) & MASK64

    def below(self, n: int) -> int:
        """Uniform integer in ``[0, n)``."""
        if n <= 0:
            raise ValueError("n must be positive")
        limit = (1 << 64) - ((1 << 64) % n)
        while True:
            r = self.next()
            if r < limit:
                return r % n

    def integer(self, lo: int, hi: int) -> int:
        return lo + self.below(hi - lo + 1)

    def chance(self, p: Fraction) -> bool:
        """True with probability ``p`` (resolved on a 2**32 grid)."""
        return self.below(1 << 32) < Fraction(p) * (1 << 32)

    def rational(self, lo: Fraction, hi: Fraction, den: int) -> Fraction:
        """Uniform on the grid ``k/den`` inside ``[lo, hi]``."""
        return Fraction(self.integer(ceil(lo * den), floor(hi * den)), den)


@dataclass(frozen=True)
class GeneratorConfig:
    """Knobs for :func:`generate_model`.

    Mid-prices live on a grid of step ``1/price_den``, spreads on
    ``1/spread_den`` (ask and bid sit half a spread either side of the
    mid), fixed costs on ``1/fixed_den``.
    """

    seed: int = 0
    depth: int = 2
    branching: tuple = (2, 3)
    price_range: tuple = (Fraction(1), Fraction(3))
    price_den: int = 4
    spread_prob: Fraction = Fraction(1, 2)
    spread_range: tuple = (Fraction(0), Fraction(1))
    spread_den: int = 4
    fixed_range: tuple = (Fraction(1, 8), Fraction(1))
    fixed_den: int = 8
    max_nodes: int = 0  # 0: no limit; otherwise redraw tree shapes until small enough

    def validate(self):
        if self.depth < 0:
            raise BadConfig("depth must be nonnegative")
        lo, hi = self.branching
        if not 1 <= lo <= hi:
            raise BadConfig(f"bad branching range {self.branching}")
        for name in ("price_range", "spread_range", "fixed_range"):
            lo, hi = map(Fraction, getattr(self, name))
            if lo > hi:
                raise BadConfig(f"{name} is empty")
        for name, (lo, hi), den in (
            ("price_range", self.price_range, self.price_den),
            ("spread_range", self.spread_range, self.spread_den),
            ("fixed_range", self.fixed_range, self.fixed_den),
        ):
            if not 1 <= den <= 32:
                raise BadConfig(f"{name} grid denominator must be in 1..32")
            if ceil(Fraction(lo) * den) > floor(Fraction(hi) * den):
                raise BadConfig(f"{name} contains no grid point")
        if Fraction(self.price_range[0]) <= 0:
            raise BadConfig("mid-prices must be positive")
        if Fraction(self.spread_range[0]) < 0:
            raise BadConfig("spreads must be nonnegative")
        if Fraction(self.fixed_range[0]) <= 0:
            raise BadConfig("fixed costs must be positive")
        if not 0 <= Fraction(self.spread_prob) <= 1:
            raise BadConfig("spread_prob must lie in [0, 1]")
        lo = self.branching[0]
        min_nodes = sum(lo ** t for t in range(self.depth + 1))
        if self.max_nodes and min_nodes > self.max_nodes:
            raise BadConfig(f"max_nodes={self.max_nodes} below the smallest tree ({min_nodes})")


def _shape(rng: XorShift64Star, cfg: GeneratorConfig) -> list[NodeSpec]:
    specs = [NodeSpec("n", None, 0)]
    frontier = ["n"]
    for t in range(1, cfg.depth + 1):
        nxt = []
        for p in frontier:
            for k in range(rng.integer(*cfg.branching)):
                cid = f"{p}{k}"
                specs.append(NodeSpec(cid, p, t))
                nxt.append(cid)
        frontier = nxt
    return specs


def generate_model(cfg: GeneratorConfig) -> CombinedCostModel:
    """Draw a model.

    Draw order: branching factors breadth-first (redrawn whole while the
    tree exceeds ``max_nodes``), then per node in node order: mid-price,
    spread coin, spread (only if the coin came up), fixed cost.
    """
    cfg.validate()
    rng = XorShift64Star(cfg.seed)
    specs = _shape(rng, cfg)
    while cfg.max_nodes and len(specs) > cfg.max_nodes:
        specs = _shape(rng, cfg)
    tree = build_tree(specs, cfg.depth)
    pr = tuple(map(Fraction, cfg.price_range))
    sr = tuple(map(Fraction, cfg.spread_range))
    fr = tuple(map(Fraction, cfg.fixed_range))
    ask, bid, fixed = {}, {}, {}
    for n in tree.order:
        mid = rng.rational(*pr, cfg.price_den)
        spread = Fraction(0)
        if rng.chance(cfg.spread_prob):
            spread = rng.rational(*sr, cfg.spread_den)
        a, b = mid + spread / 2, mid - spread / 2
        if b <= 0:
            b = mid / 2
        ask[n], bid[n] = a, b
        fixed[n] = rng.rational(*fr, cfg.fixed_den)
    return CombinedCostModel(tree, ask, bid, fixed)


CORPUS_SEED = 20_190_417
CORPUS_REGIMES = (Fraction(0), Fraction(1, 2), Fraction(1))


def corpus_config(i: int, seed: int = CORPUS_SEED) -> GeneratorConfig:
    """Config of the ``i``-th corpus model: horizons 1 and 2, branching 2..3,
    cycling through fixed-cost only, mixed and always-spread regimes,
    alternating a coarse price grid (frequent price ties) with a finer one,
    and capped at the oracle's node limit."""
    return GeneratorConfig(
        seed=splitmix64(seed + i),
        depth=1 if i % 4 == 0 else 2,
        branching=(2, 3),
        spread_prob=CORPUS_REGIMES[i % 3],
        price_den=2 if (i // 3) % 2 else 4,
        max_nodes=12,
    )


def corpus(n: int = 200, seed: int = CORPUS_SEED) -> list[CombinedCostModel]:
    return [generate_model(corpus_config(i, seed)) for i in range(n)]


def fixed_cost_corpus(n: int = 50, seed: int = CORPUS_SEED + 1) -> list[CombinedCostModel]:
    return [generate_model(replace(corpus_config(i, seed), spread_prob=Fraction(0))) for i in range(n)]
