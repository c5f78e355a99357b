"""Seeded random terms for law checking and fuzzing.

Each node picks uniformly among the constructors allowed at its position:
composites only above ``min_depth``, leaves only at ``max_depth``, and any
constructor in between.  Without the lower bound most terms would be a
single leaf.
"""

from __future__ import annotations

import random

from .. import terms as t

ALPHABET = ("a", "b", "c", "d")


class TermGenerator:
    def __init__(self, rng: random.Random, alphabet=ALPHABET, max_depth: int = 4, var=None,
                 min_depth: int = 2):
        if not 1 <= len(alphabet) <= 4:
            raise ValueError("alphabet must have between 1 and 4 channels")
        self.rng = rng
        self.alphabet = tuple(alphabet)
        self.max_depth = max_depth
        self.min_depth = min(min_depth, max_depth)
        # when set, event leaves may carry this variable as payload
        self.var = var

    def _options(self, depth, leaves, nodes):
        if depth >= self.max_depth:
            return leaves
        if depth < self.min_depth:
            return nodes
        return leaves + nodes

    def sync_set(self) -> frozenset:
        return frozenset(c for c in self.alphabet if self.rng.random() < 0.5)

    def event(self) -> t.AtomicEvent:
        channel = self.rng.choice(self.alphabet)
        if self.var is not None and self.rng.random() < 0.5:
            return t.AtomicEvent(channel, (t.Var(self.var),))
        return t.AtomicEvent(channel)

    def standard(self, depth: int = 0, committing: bool = False):
        """A standard term; ``committing`` restricts to terms whose traces all end in COMMIT."""
        leaves = ["event", "skip"] if committing else ["event", "skip", "throw", "yield"]
        nodes = ["seq", "choice", "par"] if committing else ["seq", "choice", "par", "interrupt", "block"]
        kind = self.rng.choice(self._options(depth, leaves, nodes))
        sub = lambda: self.standard(depth + 1, committing)  # noqa: E731
        if kind == "event":
            return self.event()
        if kind == "skip":
            return t.Skip()
        if kind == "throw":
            return t.Throw()
        if kind == "yield":
            return t.Yield()
        if kind == "seq":
            return t.Seq(sub(), sub())
        if kind == "choice":
            return t.Choice(sub(), sub())
        if kind == "par":
            return t.Par(sub(), sub(), self.sync_set())
        if kind == "interrupt":
            return t.Interrupt(sub(), sub())
        return t.Block(self.compensable(depth + 1))

    def compensable(self, depth: int = 0, committing: bool = False):
        """A compensable term; ``committing`` makes every installed compensation end in COMMIT."""
        leaves = ["pair", "skipp", "throww", "yieldd"]
        nodes = ["cseq", "cpar", "cchoice"]
        kind = self.rng.choice(self._options(depth, leaves, nodes))
        sub = lambda: self.compensable(depth + 1, committing)  # noqa: E731
        if kind == "pair":
            forward = self.standard(min(depth + 1, self.max_depth))
            return t.Pair(forward, self.standard(min(depth + 1, self.max_depth), committing))
        if kind == "skipp":
            return t.Skipp()
        if kind == "throww":
            return t.Throww()
        if kind == "yieldd":
            return t.Yieldd()
        if kind == "cseq":
            return t.CSeq(sub(), sub())
        if kind == "cpar":
            return t.CPar(sub(), sub(), self.sync_set())
        return t.CChoice(sub(), sub())


def expand_derived(term):
    """Replace SKIPP, THROWW and YIELDD by the pairs that define them."""
    if isinstance(term, t.Skipp):
        return t.Pair(t.Skip(), t.Skip())
    if isinstance(term, t.Throww):
        return t.Pair(t.Throw(), t.Skip())
    if isinstance(term, t.Yieldd):
        return t.Pair(t.Yield(), t.Skip())
    if isinstance(term, (t.Seq, t.Choice, t.Interrupt, t.CSeq, t.CChoice)):
        return type(term)(expand_derived(term.left), expand_derived(term.right))
    if isinstance(term, (t.Par, t.CPar)):
        return type(term)(expand_derived(term.left), expand_derived(term.right), term.sync)
    if isinstance(term, t.Pair):
        return t.Pair(expand_derived(term.forward), expand_derived(term.compensation))
    if isinstance(term, t.Block):
        return t.Block(expand_derived(term.body))
    return term
