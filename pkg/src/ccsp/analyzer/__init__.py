"""Enumeration, equivalence, law checking and compensation consistency."""

from .consistency import ConsistencyReport, check_compensation_consistency
from .core import (
    BadArgs,
    EnumerationResult,
    EquivalenceVerdict,
    UndefinedEntry,
    check_equivalence,
    entry_term,
    enumerate_traces,
    parse_args,
    rename_trace,
)
from .generate import TermGenerator, expand_derived
from .laws import LAWS, LawReport, UnknownLaw, check_law, law_names

__all__ = [
    "BadArgs",
    "ConsistencyReport",
    "EnumerationResult",
    "EquivalenceVerdict",
    "LAWS",
    "LawReport",
    "TermGenerator",
    "UndefinedEntry",
    "UnknownLaw",
    "check_compensation_consistency",
    "check_equivalence",
    "check_law",
    "entry_term",
    "enumerate_traces",
    "expand_derived",
    "law_names",
    "parse_args",
    "rename_trace",
]
