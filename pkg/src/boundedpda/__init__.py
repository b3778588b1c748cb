"""Emptiness of multi-head pushdown automata modulo bounded expressions.

The reduction chain contracts a machine against a bounded expression,
shuffles the heads into one pushdown automaton, converts it to a grammar and
expresses the grammar's Parikh image in existential Presburger arithmetic.
Counter machines and CFSMs compile to families of such machines.
"""
from .errors import ModelError, ParseError, VerificationMismatch
from .mhpda import Mhpda, Tpda, accepts_shared, intersection, simulate_budgeted, union
from .pipeline import (
    DecideConfig, decide_emptiness, decide_family, emptiness_formula, run_pipeline,
)
from .presburger import PresburgerFormula, Truth, evaluate, solve_box, to_smtlib
from .verdicts import EmptinessVerdict
from .words import BoundedExpression, expand, parse_bounded_expression

__version__ = "0.1.0"

__all__ = [
    "BoundedExpression", "DecideConfig", "EmptinessVerdict", "Mhpda", "ModelError",
    "ParseError", "PresburgerFormula", "Tpda", "Truth", "VerificationMismatch",
    "accepts_shared", "decide_emptiness", "decide_family", "emptiness_formula", "evaluate",
    "expand", "intersection", "parse_bounded_expression", "run_pipeline", "simulate_budgeted",
    "solve_box", "to_smtlib", "union",
]
