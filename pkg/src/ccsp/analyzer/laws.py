"""Algebraic laws checked on seeded random instances.

Each law draws instances from its own ``random.Random`` seeded with
``"<seed>:<law>"``, so one law's result never depends on which other laws
ran.  Instances whose evaluation hits the law bounds are skipped and
replaced, so every counted instance was compared on exhaustive sets.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from typing import Callable, Iterator, Optional

from .. import terms as t
from ..dsl import print_term
from ..semantics import Evaluator, block_close, expand_input, expand_input_pair, join_terminals
from .generate import TermGenerator, expand_derived

# Small enough that a generated instance evaluates in milliseconds.
LAW_BOUNDS = t.Bounds(max_events=12, max_traces=20_000)
# Give up after this many draws per requested sample.
_ATTEMPTS_PER_SAMPLE = 10


class UnknownLaw(t.CcspError):
    pass


class _Skip(Exception):
    """The instance hit a bound; draw another."""


class _Check:
    """Evaluates terms for one instance and flags truncation."""

    def __init__(self, model: t.Model | None = None):
        self.model = model or t.Model()

    def std(self, term):
        ev = Evaluator(self.model, LAW_BOUNDS)
        out = ev.standard(term)
        if not ev.exhaustive:
            raise _Skip
        return out

    def comp(self, term):
        ev = Evaluator(self.model, LAW_BOUNDS)
        out = ev.compensable(term)
        if not ev.exhaustive:
            raise _Skip
        return out


@dataclass
class Instance:
    text: str
    # returns True when the law holds on this instance; may raise _Skip
    holds: Callable[[], bool]


@dataclass
class Law:
    name: str
    description: str
    # a mutation of the semantics under which the law fails
    mutation: str
    instances: Callable[[random.Random, int], Iterator[Instance]]
    exhaustive: bool = False


@dataclass
class LawReport:
    law: str
    passed: bool
    instances: int
    skipped: int
    counterexample: Optional[str] = None


def _sampled(make):
    """Turn ``make(rng) -> Instance`` into an unbounded instance stream."""

    def instances(rng, samples):
        while True:
            yield make(rng)

    return instances


def _sync_op(sync) -> str:
    return "||" if not sync else f"|[{', '.join(sorted(sync))}]|"


# -- laws ---------------------------------------------------------------------------


def _assoc_par(rng):
    gen = TermGenerator(rng)
    p, q, r = gen.standard(), gen.standard(), gen.standard()
    x = gen.sync_set()
    lhs = t.Par(t.Par(p, q, x), r, x)
    rhs = t.Par(p, t.Par(q, r, x), x)
    c = _Check()
    return Instance(f"{print_term(lhs)}  =  {print_term(rhs)}", lambda: c.std(lhs) == c.std(rhs))


def _comm_par(rng):
    gen = TermGenerator(rng)
    p, q = gen.standard(), gen.standard()
    x = gen.sync_set()
    lhs, rhs = t.Par(p, q, x), t.Par(q, p, x)
    c = _Check()
    return Instance(f"{print_term(lhs)}  =  {print_term(rhs)}", lambda: c.std(lhs) == c.std(rhs))


def _seq_unit(rng):
    p = TermGenerator(rng).standard()
    c = _Check()

    def holds():
        base = c.std(p)
        return c.std(t.Seq(t.Skip(), p)) == base and c.std(t.Seq(p, t.Skip())) == base

    text = print_term(p)
    return Instance(f"SKIP ; ({text})  =  ({text}) ; SKIP  =  {text}", holds)


def _choice_union(rng):
    gen = TermGenerator(rng)
    p, q = gen.standard(), gen.standard()
    c = _Check()
    term = t.Choice(p, q)
    return Instance(
        f"traces({print_term(term)})  =  traces({print_term(p)}) + traces({print_term(q)})",
        lambda: c.std(term) == c.std(p) | c.std(q),
    )


def _derived_forms(rng):
    term = TermGenerator(rng).compensable()
    expanded = expand_derived(term)
    c = _Check()
    return Instance(
        f"{print_term(term)}  =  {print_term(expanded)}", lambda: c.comp(term) == c.comp(expanded)
    )


def _input_expansion(rng):
    k = rng.randint(1, 3)
    model = t.Model.build({"S": tuple(range(1, k + 1))})
    gen = TermGenerator(rng, var="x")
    channel = rng.choice(gen.alphabet)
    c = _Check(model)
    header = f"set S = {{{', '.join(map(str, range(1, k + 1)))}}} ; "
    if rng.random() < 0.5:
        body = gen.standard(1)
        term = t.Input(channel, "S", "x", body)
        expanded = expand_input(channel, "S", "x", body, model)
        return Instance(
            f"{header}{print_term(term)}  =  {print_term(expanded)}",
            lambda: c.std(term) == c.std(expanded),
        )
    comp = gen.standard(2, committing=True)
    body = gen.compensable(1)
    term = t.CInputPair(channel, "S", "x", comp, body)
    expanded = expand_input_pair(channel, "S", "x", comp, body, model)
    return Instance(
        f"{header}{print_term(term)}  =  {print_term(expanded)}",
        lambda: c.comp(term) == c.comp(expanded),
    )


def reversal_instance(n: int, rng: random.Random | None = None):
    """``tx{ (A1 % A1_undo) ; ... ; (An % An_undo) ; THROWW }`` with a random bracketing."""
    pairs = [t.Pair(t.AtomicEvent(f"A{i}"), t.AtomicEvent(f"A{i}_undo")) for i in range(1, n + 1)]
    items = pairs + [t.Throww()]

    def bracket(xs):
        if len(xs) == 1:
            return xs[0]
        cut = rng.randint(1, len(xs) - 1) if rng else len(xs) - 1
        return t.CSeq(bracket(xs[:cut]), bracket(xs[cut:]))

    term = t.Block(bracket(items))
    events = [t.Event(f"A{i}") for i in range(1, n + 1)]
    events += [t.Event(f"A{i}_undo") for i in range(n, 0, -1)]
    return term, frozenset({t.CompletedTrace(tuple(events), t.COMMIT)})


def _reversal_instances(rng, samples):
    i = 0
    while True:
        n = 1 + i % 5
        i += 1
        term, expected = reversal_instance(n, rng)
        c = _Check()
        yield Instance(print_term(term), lambda term=term, expected=expected: c.std(term) == expected)


def _join_instances(rng, samples):
    values = list(t.Terminal)
    for a, b in itertools.product(values, repeat=2):
        yield Instance(
            f"join({a.name}, {b.name})",
            lambda a=a, b=b: join_terminals(a, b) == join_terminals(b, a)
            and join_terminals(a, t.COMMIT) == a
            and join_terminals(a, t.THROW) == t.THROW
            and join_terminals(a, b) in (a, b),
        )
    for a, b, c in itertools.product(values, repeat=3):
        yield Instance(
            f"join(join({a.name}, {b.name}), {c.name})",
            lambda a=a, b=b, c=c: join_terminals(join_terminals(a, b), c)
            == join_terminals(a, join_terminals(b, c)),
        )


def _block_absorption(rng):
    body = TermGenerator(rng).compensable(committing=True)
    c = _Check()
    return Instance(
        print_term(t.Block(body)),
        lambda: all(tr.terminal != t.THROW for tr in block_close(c.comp(body))),
    )


LAWS = {
    law.name: law
    for law in [
        Law("terminal-join-table", "terminal join is commutative and associative, "
            "THROW absorbs and COMMIT is the identity", "join-max", _join_instances, exhaustive=True),
        Law("assoc-par", "(P |[X]| Q) |[X]| R = P |[X]| (Q |[X]| R)", "par-reverse-right",
            _sampled(_assoc_par)),
        Law("comm-par", "P |[X]| Q = Q |[X]| P", "par-left-first", _sampled(_comm_par)),
        Law("seq-unit", "SKIP ; P = P = P ; SKIP", "seq-keep-left-terminal", _sampled(_seq_unit)),
        Law("choice-union", "traces(P [] Q) is the union of traces(P) and traces(Q)",
            "choice-left-only", _sampled(_choice_union)),
        Law("derived-forms", "SKIPP = SKIP % SKIP, THROWW = THROW % SKIP, YIELDD = YIELD % SKIP",
            "throww-no-yield", _sampled(_derived_forms)),
        Law("input-expansion", "c?x:S ; P(x) is the choice over v in S of c.v ; P(v)",
            "input-first-value-only", _sampled(_input_expansion)),
        Law("compensation-reversal", "a throw after n pairs runs their compensations in reverse order",
            "comp-seq-forward-order", _reversal_instances),
        Law("block-absorption", "a block with committing compensations never ends in THROW",
            "block-keep-throw", _sampled(_block_absorption)),
    ]
}


def law_names() -> list:
    return list(LAWS)


def check_law(law: str, samples: int = 200, seed: int = 0) -> LawReport:
    """Check ``law`` on ``samples`` instances (all of them for exhaustive laws)."""
    try:
        spec = LAWS[law]
    except KeyError:
        raise UnknownLaw(f"unknown law {law}") from None
    if samples < 1:
        raise ValueError("samples must be positive")
    rng = random.Random(f"{seed}:{law}")
    checked = skipped = 0
    budget = samples * _ATTEMPTS_PER_SAMPLE
    for instance in spec.instances(rng, samples):
        if not spec.exhaustive and (checked >= samples or checked + skipped >= budget):
            break
        try:
            ok = instance.holds()
        except _Skip:
            skipped += 1
            continue
        checked += 1
        if not ok:
            return LawReport(law, False, checked, skipped, instance.text)
    passed = spec.exhaustive or checked >= samples
    return LawReport(law, passed, checked, skipped)
