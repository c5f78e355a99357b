"""Tokenizer for ``.ccsp`` source text."""

from __future__ import annotations

import re
from dataclasses import dataclass

KEYWORDS = {"SKIP", "THROW", "YIELD", "SKIPP", "THROWW", "YIELDD", "set"}


@dataclass(frozen=True)
class ParseDiagnostic:
    severity: str
    line: int
    column: int
    message: str

    def __str__(self):
        return f"{self.line}:{self.column}: {self.severity}: {self.message}"


class ParseError(Exception):
    """Raised with one or more positioned diagnostics."""

    def __init__(self, diagnostics):
        self.diagnostics = list(diagnostics)
        super().__init__("\n".join(str(d) for d in self.diagnostics))


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    line: int
    column: int


_TOKEN_RE = re.compile(
    r"""
    (?P<ws>[ \t\r\n]+)
  | (?P<comment>--[^\n]*)
  | (?P<tx>tx\{)
  | (?P<ident>[A-Za-z][A-Za-z0-9_]*)
  | (?P<int>[0-9]+)
  | (?P<op>\|\[|\]\||\[\]|\|\||\|>|[;%(){},=?!.:@])
    """,
    re.VERBOSE,
)


def tokenize(text: str) -> list:
    tokens = []
    pos = 0
    line = 1
    line_start = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise ParseError(
                [ParseDiagnostic("error", line, pos - line_start + 1, f"unexpected character {text[pos]!r}")]
            )
        kind = m.lastgroup
        value = m.group()
        col = pos - line_start + 1
        if kind == "ident" and value in KEYWORDS:
            kind = "kw"
        if kind not in ("ws", "comment"):
            tokens.append(Token(kind if kind != "op" else value, value, line, col))
        newlines = value.count("\n")
        if newlines:
            line += newlines
            line_start = pos + value.rindex("\n") + 1
        pos = m.end()
    tokens.append(Token("eof", "", line, pos - line_start + 1))
    return tokens
