"""Liveness-to-safety checking of FO-LTL properties with temporal prophecy."""

from .checker import (
    CTI, HOLDS, INCONCLUSIVE, LASSO, NO_LASSO, CheckResult, check_inductive_invariant, check_property,
    search_abstract_lasso, validate_witness,
)
from .corpus import load_corpus_entry
from .l2s import ProphecySpec, WitnessSpec, build_monitor, build_witness_system
from .parser import load_model, load_property
from .tableau import find_fair_lasso

__all__ = [
    "CTI", "HOLDS", "INCONCLUSIVE", "LASSO", "NO_LASSO", "CheckResult", "ProphecySpec", "WitnessSpec",
    "build_monitor", "build_witness_system", "check_inductive_invariant", "check_property", "find_fair_lasso",
    "load_corpus_entry", "load_model", "load_property", "search_abstract_lasso", "validate_witness",
]
