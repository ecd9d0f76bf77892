"""Arbitrage detection with certificates for bid/ask models with fixed costs."""

from .errors import ArbcertError
from .ftap import (
    Arbitrage,
    Certificate,
    NoArbitrage,
    Violation,
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
from .market import (
    CombinedCostModel,
    Portfolio,
    Strategy,
    fixed_cost_model,
    is_arbitrage,
    is_self_financing,
    is_solvent,
    liquidation_value,
)
from .tree import EventTree, NodeSpec, SingleStepMeasureFamily, StoppingTime, build_tree

__version__ = "0.1.0"
