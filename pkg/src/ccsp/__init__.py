"""Compensating CSP workbench.

Parse cCSP models and a BPEL subset, compute bounded trace semantics of
standard and compensable processes, and check laws and trace equivalence.
"""

from .analyzer import (
    check_compensation_consistency,
    check_equivalence,
    check_law,
    enumerate_traces,
)
from .bpel import default_naming, parse_bpel, translate
from .dsl import ParseError, parse_model, parse_term, print_model, print_term
from .kernel import IMPLEMENTATION
from .semantics import Evaluator, block_close, traces_compensable, traces_standard
from .terms import (
    Bounds,
    BoundExceeded,
    CcspError,
    CompletedTrace,
    Event,
    Model,
    Terminal,
    TracePair,
)

__version__ = "0.1.0"

__all__ = [
    "IMPLEMENTATION",
    "BoundExceeded",
    "Bounds",
    "CcspError",
    "CompletedTrace",
    "Evaluator",
    "Event",
    "Model",
    "ParseError",
    "Terminal",
    "TracePair",
    "block_close",
    "check_compensation_consistency",
    "check_equivalence",
    "check_law",
    "default_naming",
    "enumerate_traces",
    "parse_bpel",
    "parse_model",
    "parse_term",
    "print_model",
    "print_term",
    "traces_compensable",
    "traces_standard",
    "translate",
]
