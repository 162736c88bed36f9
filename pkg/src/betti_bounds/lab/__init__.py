"""Desk-scale geometry: rasterization, cubical homology and the approximation constructions."""

from .constructions import (
    EpsilonSchedule,
    SignCondition,
    build_S_delta,
    build_S_delta_eps,
    build_T,
    closed_approximation,
    sign_decompose,
)
from .homology import BettiVector, betti, betti_by_complement
from .raster import CubicalSet, rasterize
from .verify import CapabilityError, compare_sets, verify_domination

__all__ = [
    "BettiVector",
    "CapabilityError",
    "CubicalSet",
    "EpsilonSchedule",
    "SignCondition",
    "betti",
    "betti_by_complement",
    "build_S_delta",
    "build_S_delta_eps",
    "build_T",
    "closed_approximation",
    "compare_sets",
    "rasterize",
    "sign_decompose",
    "verify_domination",
]
