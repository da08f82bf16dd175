"""IBNR claims reserving with the Mack and half-normal Bayesian chain ladders."""

from .distributions import HalfNormal, InverseGamma
from .estimators import HalfNormalChainLadder, MackChainLadder, TriangleCumulator
from .reserving import (
    Comparison,
    DevFactors,
    PriorSpec,
    ReserveReport,
    bayes_factors,
    bayes_posteriors,
    compare,
    elicit_prior,
    mack_factors,
    project,
)
from .simulator import GenerativeSpec, recovery_study, simulate_triangle
from .triangle import Triangle, cumulate, decumulate, emit_csv, parse_csv, read_csv

__version__ = "0.1.0"

__all__ = [
    "Comparison",
    "DevFactors",
    "GenerativeSpec",
    "HalfNormal",
    "HalfNormalChainLadder",
    "InverseGamma",
    "MackChainLadder",
    "PriorSpec",
    "ReserveReport",
    "Triangle",
    "TriangleCumulator",
    "bayes_factors",
    "bayes_posteriors",
    "compare",
    "cumulate",
    "decumulate",
    "elicit_prior",
    "emit_csv",
    "mack_factors",
    "parse_csv",
    "project",
    "read_csv",
    "recovery_study",
    "simulate_triangle",
]
