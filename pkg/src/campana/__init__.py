"""Campana points of bounded height on the Heisenberg compactification of P^3."""

from .arith import INF, PrimitivePoint, is_mfull, mfull_up_to, padic_fractional_part, padic_valuation, primitive_rep
from .heisenberg import GroupElement, compose, embed, inverse, left_act, right_act
from .orbifold import MODEL_NAMES, BoundaryDivisor, OrbifoldModel, build_model, is_campana, predict_invariants

__all__ = [
    "INF",
    "PrimitivePoint",
    "is_mfull",
    "mfull_up_to",
    "padic_fractional_part",
    "padic_valuation",
    "primitive_rep",
    "GroupElement",
    "compose",
    "embed",
    "inverse",
    "left_act",
    "right_act",
    "MODEL_NAMES",
    "BoundaryDivisor",
    "OrbifoldModel",
    "build_model",
    "is_campana",
    "predict_invariants",
]
