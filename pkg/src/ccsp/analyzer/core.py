"""Bounded enumeration and trace equivalence over models."""

from __future__ import annotations

import re
import time
from dataclasses import dataclass, field
from typing import Optional

from .. import terms as t
from ..dsl import parse_term
from ..dsl.lexer import KEYWORDS
from ..semantics import Evaluator


class UndefinedEntry(t.UndefinedName):
    pass


class BadArgs(t.CcspError):
    pass


_IDENT = re.compile(r"^[A-Za-z][A-Za-z0-9_]*$")


def parse_args(text) -> tuple:
    """``"m1, 5000"`` -> ``("m1", 5000)``; already-split sequences pass through."""
    if text is None:
        return ()
    items = text.split(",") if isinstance(text, str) else list(text)
    out = []
    for item in items:
        if isinstance(item, int):
            out.append(item)
            continue
        item = item.strip()
        if item.isdigit():
            out.append(int(item))
        elif _IDENT.match(item):
            out.append(item)
        else:
            raise BadArgs(f"malformed argument {item!r}")
    return tuple(out)


def entry_term(model: t.Model, entry: str, args=()):
    """Standard term for ``entry``: a definition name or a process expression.

    Compensable entries are closed in a transaction block so that they
    denote completed traces.
    """
    args = parse_args(args)
    entry = entry.strip()
    if _IDENT.match(entry) and entry not in KEYWORDS:
        if entry not in model.definitions:
            raise UndefinedEntry(f"undefined entry {entry}")
        d = model.definitions[entry]
        if len(d.params) != len(args):
            raise BadArgs(f"{entry} expects {len(d.params)} argument(s), got {len(args)}")
        term = (t.CCall if d.compensable else t.Call)(entry, args)
    else:
        if args:
            raise BadArgs("arguments are only accepted with a named entry")
        term = parse_term(entry, model)
    return t.Block(term) if term.compensable else term


@dataclass
class EnumerationResult:
    entry: str
    traces: tuple
    exhaustive: bool
    truncations: list = field(default_factory=list)
    elapsed: float = 0.0

    @property
    def stats(self) -> dict:
        return {
            "traces": len(self.traces),
            "max_length": max((len(tr.events) for tr in self.traces), default=0),
        }


def enumerate_traces(model: t.Model, entry: str, args=(), bounds: t.Bounds | None = None):
    """All completed traces of ``entry`` within ``bounds``, in canonical order."""
    term = entry_term(model, entry, args)
    ev = Evaluator(model, bounds)
    start = time.perf_counter()
    traces = ev.standard(term)
    return EnumerationResult(
        entry=entry,
        traces=tuple(t.canonical(traces)),
        exhaustive=ev.exhaustive,
        truncations=list(ev.truncations),
        elapsed=time.perf_counter() - start,
    )


def rename_trace(trace: t.CompletedTrace, mapping: dict) -> t.CompletedTrace:
    """Rename channels.  A target with a payload (``Reply.Accept``) is prefixed to the original payload."""
    if not mapping:
        return trace
    events = []
    for e in trace.events:
        target = mapping.get(e.channel)
        if target is None:
            events.append(e)
            continue
        new = t.parse_event(target) if isinstance(target, str) else target
        events.append(t.Event(new.channel, new.payload + e.payload))
    return t.CompletedTrace(tuple(events), trace.terminal)


@dataclass
class EquivalenceVerdict:
    equal: bool
    up_to_bound: bool
    counterexample: Optional[t.CompletedTrace] = None
    side: Optional[str] = None
    first: Optional[EnumerationResult] = None
    second: Optional[EnumerationResult] = None


def check_equivalence(
    m1: t.Model,
    e1: str,
    m2: t.Model,
    e2: str,
    bounds: t.Bounds | None = None,
    mapping: dict | None = None,
    args1=(),
    args2=(),
) -> EquivalenceVerdict:
    """Compare completed-trace sets; ``mapping`` renames channels on the second side.

    The counterexample is the canonically least trace in the symmetric
    difference, with ``side`` naming the model that has it.
    """
    r1 = enumerate_traces(m1, e1, args1, bounds)
    r2 = enumerate_traces(m2, e2, args2, bounds)
    s1 = set(r1.traces)
    s2 = {rename_trace(tr, mapping or {}) for tr in r2.traces}
    up_to_bound = not (r1.exhaustive and r2.exhaustive)
    diff = t.canonical(s1 ^ s2)
    if not diff:
        return EquivalenceVerdict(True, up_to_bound, first=r1, second=r2)
    witness = diff[0]
    side = "first" if witness in s1 else "second"
    return EquivalenceVerdict(False, up_to_bound, witness, side, r1, r2)
