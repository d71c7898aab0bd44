"""The 105 Wick contractions of the N5 fourth moment: graphs, classes, reduction and exact sums."""

from __future__ import annotations

from .graph import DiagramClass, DiagramGraph, canonical_form, classify, compare_with_reference, pairing_to_graph
from .numeric import (
    contraction_sum_numeric,
    exact_fourth_moment,
    n5_moment_mc,
    n5_operator_bound,
    operator_bound_violations,
)
from .pairings import enumerate_pairings, format_pairing, parse_pairing
from .reduction import ReductionTrace, Step, reduce, verify_trace
from .reference import REFERENCE_GROUPS

__all__ = [
    "DiagramClass",
    "DiagramGraph",
    "REFERENCE_GROUPS",
    "ReductionTrace",
    "Step",
    "canonical_form",
    "classify",
    "compare_with_reference",
    "contraction_sum_numeric",
    "enumerate_pairings",
    "exact_fourth_moment",
    "format_pairing",
    "n5_moment_mc",
    "n5_operator_bound",
    "operator_bound_violations",
    "pairing_to_graph",
    "parse_pairing",
    "reduce",
    "verify_trace",
]
