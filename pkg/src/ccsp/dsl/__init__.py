"""Concrete syntax for cCSP models (``.ccsp`` files)."""

from .lexer import ParseDiagnostic, ParseError, tokenize
from .parser import SourceFile, parse_model, parse_term
from .printer import print_model, print_term

__all__ = [
    "ParseDiagnostic",
    "ParseError",
    "SourceFile",
    "parse_model",
    "parse_term",
    "print_model",
    "print_term",
    "tokenize",
]
