"""Quantification of temporal fault trees under triangular fuzzy failure rates.

The library models fault trees whose gates include the temporal PAND
(priority AND: inputs must fail in order) and POR (priority OR: the first
input must fail before any other) in addition to Boolean AND/OR, with basic
event failure rates given either crisp or as triangular fuzzy numbers.  It
computes the fuzzy top-event probability over mission time, a defuzzified
value, and a fuzzy importance ranking of basic events, and ships an
independent Monte Carlo oracle for verifying the closed forms.
"""

__version__ = "0.1.0"

from .engine import (
    AnalysisConfig,
    AnalysisReport,
    ImportanceRow,
    TimePointResult,
    evaluate,
    fuzzy_importance,
    rank_events,
    sweep,
)
from .errors import (
    DegeneratePoleError,
    DomainError,
    FuzzyTftError,
    NumericError,
    SaturationError,
    TreeFormatError,
    TreeStructureError,
)
from .gates import (
    crisp_and,
    crisp_or,
    crisp_pand,
    crisp_por,
    fuzzy_and,
    fuzzy_or,
    fuzzy_pand,
    fuzzy_por,
    heaviside_sum,
    pole_sequence,
    prob_to_rate,
    rate_to_prob,
)
from .mc import SimulationConfig, SimulationEstimate, simulate_gate, simulate_tree
from .model import BasicEvent, Diagnostic, FaultTree, GateKind, GateNode, validate
from .parser import dump_structured, load_structured, parse_expression, parse_tree, serialize_tree
from .tfn import TFN, Spread, distance, fuzzify

__all__ = [
    "AnalysisConfig",
    "AnalysisReport",
    "BasicEvent",
    "DegeneratePoleError",
    "Diagnostic",
    "DomainError",
    "FaultTree",
    "FuzzyTftError",
    "GateKind",
    "GateNode",
    "ImportanceRow",
    "NumericError",
    "SaturationError",
    "SimulationConfig",
    "SimulationEstimate",
    "Spread",
    "TFN",
    "TimePointResult",
    "TreeFormatError",
    "TreeStructureError",
    "crisp_and",
    "crisp_or",
    "crisp_pand",
    "crisp_por",
    "distance",
    "dump_structured",
    "evaluate",
    "fuzzify",
    "fuzzy_and",
    "fuzzy_importance",
    "fuzzy_or",
    "fuzzy_pand",
    "fuzzy_por",
    "heaviside_sum",
    "load_structured",
    "parse_expression",
    "parse_tree",
    "pole_sequence",
    "prob_to_rate",
    "rank_events",
    "rate_to_prob",
    "serialize_tree",
    "simulate_gate",
    "simulate_tree",
    "sweep",
    "validate",
]
