"""Betti-number bounds for sets defined by sign conditions, with a grid oracle to check them."""

from .bounds import (
    Bound,
    BoundTooLargeError,
    OConstants,
    QuantifierProfile,
    bound_formula,
    bound_quantified,
    boolean_combination_bound,
    closed_set_bound,
    equalities_bound,
    mixed_bound,
    nonstrict_bound,
    quantified_bound,
    sign_conditions_bound,
)
from .complexity import ComplexityMeasure, degree_measure, gamma, get_measure, kappa, omega, pfaffian_measure
from .formula import classify, normalize, parse_formula, parse_quantified, to_text
from .polynomial import Polynomial

__version__ = "0.1.0"

__all__ = [
    "Bound",
    "BoundTooLargeError",
    "ComplexityMeasure",
    "OConstants",
    "Polynomial",
    "QuantifierProfile",
    "boolean_combination_bound",
    "bound_formula",
    "bound_quantified",
    "classify",
    "closed_set_bound",
    "degree_measure",
    "equalities_bound",
    "gamma",
    "get_measure",
    "kappa",
    "mixed_bound",
    "nonstrict_bound",
    "normalize",
    "omega",
    "parse_formula",
    "parse_quantified",
    "pfaffian_measure",
    "quantified_bound",
    "sign_conditions_bound",
    "to_text",
]
