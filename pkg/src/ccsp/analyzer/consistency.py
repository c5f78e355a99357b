"""Compensation consistency of transaction blocks.

Every interrupted run observed at a block boundary is checked against the
pairs that actually completed on its way: the compensation that ran must be
one the completed pairs could produce, with sequential steps undone in
reverse order and parallel ones interleaved.  The expected set is rebuilt
here from the provenance tree alone, without the semantic combinators or
the merge kernel.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field

from .. import terms as t
from ..semantics import Evaluator
from .core import entry_term


def _interleave(a: tuple, b: tuple):
    if not a:
        yield b
        return
    if not b:
        yield a
        return
    for rest in _interleave(a[1:], b):
        yield (a[0],) + rest
    for rest in _interleave(a, b[1:]):
        yield (b[0],) + rest


def expected_compensations(prov) -> set:
    kind = prov[0]
    if kind == "none":
        return {t.EMPTY_COMMIT}
    if kind == "leaf":
        return {prov[2]}
    if kind == "seq":
        out = set()
        earlier = expected_compensations(prov[1])
        for later in expected_compensations(prov[2]):
            if later.terminal != t.COMMIT:
                out.add(later)
                continue
            for first in earlier:
                out.add(t.CompletedTrace(later.events + first.events, first.terminal))
        return out
    if kind == "par":
        out = set()
        for x in expected_compensations(prov[1]):
            for y in expected_compensations(prov[2]):
                terminal = min(x.terminal, y.terminal)
                out.update(t.CompletedTrace(m, terminal) for m in _interleave(x.events, y.events))
        return out
    raise ValueError(f"malformed provenance {prov!r}")


def _leaf_events(prov) -> Counter:
    """Events the completed pairs must have contributed to the forward trace."""
    if prov[0] == "leaf":
        return Counter(prov[1])
    if prov[0] == "seq":
        return _leaf_events(prov[1]) + _leaf_events(prov[2])
    if prov[0] == "par":
        left, right, sync = _leaf_events(prov[1]), _leaf_events(prov[2]), prov[3]
        # a synchronised event is shared by both sides, so it occurs once
        shared = {e for e in left | right if e.channel in sync}
        out = Counter({e: n for e, n in (left + right).items() if e not in shared})
        out.update({e: max(left[e], right[e]) for e in shared})
        return out
    return Counter()


@dataclass
class ConsistencyReport:
    entry: str
    consistent: bool
    observations: int
    exhaustive: bool
    failures: list = field(default_factory=list)


def check_compensation_consistency(model: t.Model, entry: str, args=(), bounds=None):
    """Check every interrupted run of every block reached from ``entry``."""
    term = entry_term(model, entry, args)
    ev = Evaluator(model, bounds, instrument=True)
    ev.standard(term)
    failures = []
    seen = set()
    for forward, comp, prov in ev.block_observations:
        key = (forward, comp, repr(prov))
        if key in seen:
            continue
        seen.add(key)
        if _leaf_events(prov) - Counter(forward.events):
            failures.append(
                f"{forward.render()}: completed pairs not found in the forward trace"
            )
        elif comp not in expected_compensations(prov):
            failures.append(
                f"{forward.render()}: compensation {comp.render()} does not undo the completed pairs"
            )
    return ConsistencyReport(entry, not failures, len(seen), ev.exhaustive, failures)
