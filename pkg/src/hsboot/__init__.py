"""Hitting-set bootstrapping for polynomial identity testing over finite fields."""

from .algebra import FieldElement, FieldSpec, MultiPoly, UniPoly
from .bootstrap import cost_report, derive_hard_polynomial, run_toy, schedule_from_paper
from .circuits import ABP, Circuit, compose, evaluate, expand, horner_formula
from .designs import Design, build_design, verify_design
from .errors import HsbootError, ParameterError, ResourceError
from .hitting import ClassDescriptor, HittingSet, find_annihilator, grid_hitting_set, verify_hitting_exhaustive
from .reduction import NWSubstitution, ki_extract, nw_substitute

__version__ = "0.1.0"

__all__ = [
    "ABP", "Circuit", "ClassDescriptor", "Design", "FieldElement", "FieldSpec", "HittingSet", "HsbootError",
    "MultiPoly", "NWSubstitution", "ParameterError", "ResourceError", "UniPoly", "build_design", "compose",
    "cost_report", "derive_hard_polynomial", "evaluate", "expand", "find_annihilator", "grid_hitting_set",
    "horner_formula", "ki_extract", "nw_substitute", "run_toy", "schedule_from_paper", "verify_design",
    "verify_hitting_exhaustive",
]
