"""Bounded denotational trace semantics.

Standard processes denote sets of :class:`CompletedTrace`; compensable
processes denote sets of :class:`TracePair`.  The module-level combinators
are pure functions over those sets.  :class:`Evaluator` walks a term,
applies the combinators bottom-up and enforces :class:`Bounds`.
"""

from __future__ import annotations

import contextlib
import contextvars
from collections import defaultdict

from . import kernel
from .terms import (
    COMMIT,
    EMPTY_COMMIT,
    EMPTY_THROW,
    EMPTY_YIELD,
    THROW,
    YIELD,
    AtomicEvent,
    Block,
    BoundExceeded,
    Bounds,
    Call,
    CCall,
    CChoice,
    CIndexedChoice,
    CInputPair,
    CompletedTrace,
    CPar,
    CSeq,
    Choice,
    Event,
    IndexedChoice,
    Input,
    Interrupt,
    Model,
    Output,
    Pair,
    Par,
    Seq,
    Skip,
    Skipp,
    SortError,
    Terminal,
    Throw,
    Throww,
    TracePair,
    UnboundVariable,
    Var,
    Yield,
    Yieldd,
    canonical,
)

# Deliberately broken variants of the semantics, used to show that every
# registered law can fail.  Never active outside ``mutated``.
MUTATIONS = frozenset(
    {
        "join-max",
        "par-left-first",
        "par-reverse-right",
        "seq-keep-left-terminal",
        "choice-left-only",
        "throww-no-yield",
        "input-first-value-only",
        "comp-seq-forward-order",
        "block-keep-throw",
    }
)

_mutation: contextvars.ContextVar = contextvars.ContextVar("ccsp_mutation", default=None)


@contextlib.contextmanager
def mutated(name: str):
    if name not in MUTATIONS:
        raise ValueError(f"unknown mutation {name}")
    token = _mutation.set(name)
    try:
        yield
    finally:
        _mutation.reset(token)


def join_terminals(a: Terminal, b: Terminal) -> Terminal:
    """THROW absorbs, COMMIT is the identity: the minimum under THROW < YIELD < COMMIT."""
    if _mutation.get() == "join-max":
        return a if a >= b else b
    return a if a <= b else b


# -- standard combinators ------------------------------------------------------


def _seq(s1, s2, limit):
    keep_left = _mutation.get() == "seq-keep-left-terminal"
    out = set()
    dropped = False
    tails = list(s2)
    for p in s1:
        if p.terminal is not COMMIT:
            out.add(p)
            continue
        for q in tails:
            events = p.events + q.events
            if limit is not None and len(events) > limit:
                dropped = True
                continue
            out.add(CompletedTrace(events, p.terminal if keep_left else q.terminal))
    return out, dropped


def seq_compose(s1, s2) -> frozenset:
    return frozenset(_seq(s1, s2, None)[0])


def choice_compose(s1, s2) -> frozenset:
    if _mutation.get() == "choice-left-only":
        return frozenset(s1)
    return frozenset(s1) | frozenset(s2)


class _Merger:
    """Caches kernel results for repeated (a, b) pairs within one composition."""

    def __init__(self, sync):
        self.sync = frozenset(sync)
        self.cache = {}
        self.mutation = _mutation.get()

    def merges(self, a, b):
        key = (a, b)
        hit = self.cache.get(key)
        if hit is None:
            if self.mutation == "par-reverse-right":
                b = b[::-1]
            if self.mutation == "par-left-first" and not self.sync:
                hit = {a + b}
            else:
                hit = kernel.interleavings(a, b, self.sync)
            self.cache[key] = hit
        return hit

    def project(self, events):
        if not self.sync:
            return ()
        return kernel.sync_projection(events, self.sync)


def _par(s1, s2, sync, limit):
    merger = _Merger(sync)
    by_projection = defaultdict(list)
    for q in s2:
        by_projection[merger.project(q.events)].append(q)
    out = set()
    dropped = False
    for p in s1:
        key = merger.project(p.events)
        partners = by_projection.get(key)
        if not partners:
            continue
        base = len(p.events) - len(key)
        for q in partners:
            if limit is not None and base + len(q.events) > limit:
                dropped = True
                continue
            terminal = join_terminals(p.terminal, q.terminal)
            for events in merger.merges(p.events, q.events):
                out.add(CompletedTrace(events, terminal))
    return out, dropped


def par_compose(s1, s2, sync=frozenset()) -> frozenset:
    """Parallel composition synchronising on the channels in ``sync``."""
    return frozenset(_par(s1, s2, sync, None)[0])


def _interrupt(s1, s2, limit):
    out = set()
    dropped = False
    handlers = list(s2)
    for p in s1:
        if p.terminal is not THROW:
            out.add(p)
            continue
        for q in handlers:
            events = p.events + q.events
            if limit is not None and len(events) > limit:
                dropped = True
                continue
            out.add(CompletedTrace(events, q.terminal))
    return out, dropped


def interrupt_compose(s1, s2) -> frozenset:
    return frozenset(_interrupt(s1, s2, None)[0])


# -- compensable combinators ---------------------------------------------------

# Provenance records which compensation pairs completed and how they were
# composed, in forward order: ("leaf", events, compensation), ("seq", first,
# second), ("par", left, right, sync) or NO_PAIRS.  Only instrumented evaluation
# builds it.
NO_PAIRS = ("none",)


def _pair(forwards, compensations, instrument=False):
    out = {TracePair(EMPTY_YIELD, EMPTY_COMMIT, NO_PAIRS if instrument else None)}
    comps = list(compensations)
    for p in forwards:
        if p.terminal is COMMIT:
            for q in comps:
                out.add(TracePair(p, q, ("leaf", p.events, q) if instrument else None))
        else:
            out.add(TracePair(p, EMPTY_COMMIT, NO_PAIRS if instrument else None))
    return out


def pair_compose(forwards, compensations) -> frozenset:
    """Denotation of ``P % Q`` from the trace sets of ``P`` and ``Q``."""
    return frozenset(_pair(forwards, compensations))


def _comp_seq(t1, t2, limit):
    forward_order = _mutation.get() == "comp-seq-forward-order"
    out = set()
    dropped = False
    tails = list(t2)
    for p, pc, pv in t1:
        if p.terminal is not COMMIT:
            out.add(TracePair(p, pc, pv))
            continue
        for qf, qc, qv in tails:
            events = p.events + qf.events
            if qc.terminal is COMMIT:
                if forward_order:
                    comp = CompletedTrace(pc.events + qc.events, pc.terminal)
                else:
                    comp = CompletedTrace(qc.events + pc.events, pc.terminal)
            else:
                comp = qc
            if limit is not None and (len(events) > limit or len(comp.events) > limit):
                dropped = True
                continue
            prov = None if pv is None else ("seq", pv, qv)
            out.add(TracePair(CompletedTrace(events, qf.terminal), comp, prov))
    return out, dropped


def comp_seq_compose(t1, t2) -> frozenset:
    """Sequential composition; compensations accumulate in reverse order."""
    return frozenset(_comp_seq(t1, t2, None)[0])


def _comp_par(t1, t2, sync, limit):
    forward = _Merger(sync)
    backward = _Merger(frozenset())
    by_projection = defaultdict(list)
    for item in t2:
        by_projection[forward.project(item[0].events)].append(item)
    out = set()
    dropped = False
    for p, pc, pv in t1:
        key = forward.project(p.events)
        for qf, qc, qv in by_projection.get(key, ()):
            if limit is not None and (
                len(p.events) + len(qf.events) - len(key) > limit
                or len(pc.events) + len(qc.events) > limit
            ):
                dropped = True
                continue
            fterm = join_terminals(p.terminal, qf.terminal)
            cterm = join_terminals(pc.terminal, qc.terminal)
            comps = [CompletedTrace(c, cterm) for c in backward.merges(pc.events, qc.events)]
            prov = None if pv is None else ("par", pv, qv, forward.sync)
            for f in forward.merges(p.events, qf.events):
                ft = CompletedTrace(f, fterm)
                for c in comps:
                    out.add(TracePair(ft, c, prov))
    return out, dropped


def comp_par_compose(t1, t2, sync=frozenset()) -> frozenset:
    """Compensable parallel: forwards interleave (or synchronise on ``sync``),
    compensations always interleave."""
    return frozenset(_comp_par(t1, t2, sync, None)[0])


def _block(pairs, limit, observe=None):
    keep_throw = _mutation.get() == "block-keep-throw"
    out = set()
    dropped = False
    for p, c, prov in pairs:
        if p.terminal is COMMIT:
            out.add(p)
        elif p.terminal is THROW:
            if keep_throw:
                out.add(p)
                continue
            events = p.events + c.events
            if limit is not None and len(events) > limit:
                dropped = True
                continue
            out.add(CompletedTrace(events, c.terminal))
            if observe is not None:
                observe.append((p, c, prov))
    return out, dropped


def block_close(pairs) -> frozenset:
    """Close a transaction: commits pass, throws run their compensation, yields vanish."""
    return frozenset(_block(pairs, None)[0])


# -- syntactic helpers -----------------------------------------------------------


def resolve(item, env):
    if isinstance(item, Var):
        try:
            return env[item.name]
        except KeyError:
            raise UnboundVariable(f"unbound variable {item.name}") from None
    return item


def substitute(term, name: str, value):
    """Replace free occurrences of variable ``name`` by ``value``."""

    def atom(x):
        return value if isinstance(x, Var) and x.name == name else x

    def go(t):
        if isinstance(t, AtomicEvent):
            return AtomicEvent(t.channel, tuple(atom(x) for x in t.payload))
        if isinstance(t, Output):
            return Output(t.channel, atom(t.value))
        if isinstance(t, (Call, CCall)):
            return type(t)(t.name, tuple(atom(x) for x in t.args))
        if isinstance(t, (Seq, Choice, Interrupt, CSeq, CChoice)):
            return type(t)(go(t.left), go(t.right))
        if isinstance(t, (Par, CPar)):
            return type(t)(go(t.left), go(t.right), t.sync)
        if isinstance(t, Pair):
            return Pair(go(t.forward), go(t.compensation))
        if isinstance(t, Block):
            return Block(go(t.body))
        if isinstance(t, Input):
            return t if t.var == name else Input(t.channel, t.set_name, t.var, go(t.body))
        if isinstance(t, (IndexedChoice, CIndexedChoice)):
            return t if t.var == name else type(t)(t.var, t.set_name, go(t.body))
        if isinstance(t, CInputPair):
            if t.var == name:
                return t
            return CInputPair(t.channel, t.set_name, t.var, go(t.compensation), go(t.body))
        return t

    return go(term)


def _choice_of(branches, binary):
    result = branches[-1]
    for branch in reversed(branches[:-1]):
        result = binary(branch, result)
    return result


def expand_input(channel: str, set_name: str, var: str, body, model: Model):
    """Rewrite ``channel?var:set ; body`` into the indexed choice it abbreviates."""
    branches = [
        Seq(AtomicEvent(channel, (v,)), substitute(body, var, v)) for v in model.values(set_name)
    ]
    return _choice_of(branches, Choice)


def expand_input_pair(channel: str, set_name: str, var: str, compensation, body, model: Model):
    """``(c?x:S % Q(x)) ; PP(x)`` as a choice over ``(c.v % Q(v)) ; PP(v)``."""
    branches = [
        CSeq(Pair(AtomicEvent(channel, (v,)), substitute(compensation, var, v)), substitute(body, var, v))
        for v in model.values(set_name)
    ]
    return _choice_of(branches, CChoice)


def expand_indexed_choice(term, model: Model):
    binary = CChoice if isinstance(term, CIndexedChoice) else Choice
    branches = [substitute(term.body, term.var, v) for v in model.values(term.set_name)]
    return _choice_of(branches, binary)


# -- evaluation --------------------------------------------------------------------


def _pair_key(tp):
    return (tp.forward.sort_key(), tp.compensation.sort_key(), repr(tp.provenance))


class Evaluator:
    """One bounded evaluation over a model.

    Not shared between threads; every public entry point builds its own.
    ``exhaustive`` drops to False the first time a bound truncates a set.
    """

    def __init__(self, model: Model | None = None, bounds: Bounds | None = None, instrument=False):
        self.model = model if model is not None else Model()
        self.bounds = bounds or Bounds()
        self.instrument = instrument
        self.exhaustive = True
        self.truncations: list = []
        self.block_observations: list = []
        self._memo: dict = {}

    def _note(self, reason: str):
        self.exhaustive = False
        if reason not in self.truncations:
            self.truncations.append(reason)

    def _cap(self, traces, dropped=False, key=CompletedTrace.sort_key):
        if dropped:
            self._note(f"max_events={self.bounds.max_events}")
        if len(traces) > self.bounds.max_traces:
            self._note(f"max_traces={self.bounds.max_traces}")
            traces = sorted(traces, key=key)[: self.bounds.max_traces]
        return frozenset(traces)

    def _cap_pairs(self, pairs, dropped=False):
        return self._cap(pairs, dropped, key=_pair_key)

    # standard ---------------------------------------------------------------

    def standard(self, term, env=None) -> frozenset:
        env = env or {}
        if term.compensable:
            raise SortError(f"expected a standard process, got {type(term).__name__}")
        limit = self.bounds.max_events
        if isinstance(term, Skip):
            return frozenset({EMPTY_COMMIT})
        if isinstance(term, Throw):
            return frozenset({EMPTY_THROW})
        if isinstance(term, Yield):
            return frozenset({EMPTY_YIELD, EMPTY_COMMIT})
        if isinstance(term, AtomicEvent):
            ev = Event(term.channel, tuple(resolve(x, env) for x in term.payload))
            return self._event(ev)
        if isinstance(term, Output):
            return self._event(Event(term.channel, (resolve(term.value, env),)))
        if isinstance(term, Seq):
            left = self.standard(term.left, env)
            right = self.standard(term.right, env)
            return self._cap(*_seq(left, right, limit))
        if isinstance(term, Choice):
            return self._cap(
                choice_compose(self.standard(term.left, env), self.standard(term.right, env))
            )
        if isinstance(term, Par):
            left = self.standard(term.left, env)
            right = self.standard(term.right, env)
            return self._cap(*_par(left, right, term.sync, limit))
        if isinstance(term, Interrupt):
            left = self.standard(term.left, env)
            right = self.standard(term.right, env)
            return self._cap(*_interrupt(left, right, limit))
        if isinstance(term, Block):
            pairs = self.compensable(term.body, env)
            observe = self.block_observations if self.instrument else None
            return self._cap(*_block(pairs, limit, observe))
        if isinstance(term, Input):
            values = self.model.values(term.set_name)
            if _mutation.get() == "input-first-value-only":
                values = values[:1]
            out = set()
            for v in values:
                head = self._event(Event(term.channel, (v,)))
                body = self.standard(term.body, {**env, term.var: v})
                out |= self._cap(*_seq(head, body, limit))
            return self._cap(out)
        if isinstance(term, IndexedChoice):
            out = set()
            for v in self.model.values(term.set_name):
                out |= self.standard(term.body, {**env, term.var: v})
            return self._cap(out)
        if isinstance(term, Call):
            return self._call(term, env, self.standard)
        raise TypeError(f"not a standard term: {term!r}")

    def _event(self, ev):
        return frozenset({CompletedTrace((ev,), COMMIT)})

    def _call(self, term, env, evaluate):
        d = self.model.lookup(term.name)
        args = tuple(resolve(a, env) for a in term.args)
        key = (term.name, args)
        hit = self._memo.get(key)
        if hit is None:
            hit = evaluate(d.body, dict(zip(d.params, args)))
            self._memo[key] = hit
        return hit

    # compensable ------------------------------------------------------------

    def compensable(self, term, env=None) -> frozenset:
        env = env or {}
        if not term.compensable:
            raise SortError(f"expected a compensable process, got {type(term).__name__}")
        limit = self.bounds.max_events
        inst = self.instrument
        if isinstance(term, Pair):
            fwd = self.standard(term.forward, env)
            comp = self.standard(term.compensation, env)
            return self._cap_pairs(_pair(fwd, comp, inst))
        if isinstance(term, Skipp):
            return self.compensable(Pair(Skip(), Skip()), env)
        if isinstance(term, Yieldd):
            return self.compensable(Pair(Yield(), Skip()), env)
        if isinstance(term, Throww):
            if _mutation.get() == "throww-no-yield":
                return frozenset({TracePair(EMPTY_THROW, EMPTY_COMMIT, NO_PAIRS if inst else None)})
            return self.compensable(Pair(Throw(), Skip()), env)
        if isinstance(term, CSeq):
            left = self.compensable(term.left, env)
            right = self.compensable(term.right, env)
            return self._cap_pairs(*_comp_seq(left, right, limit))
        if isinstance(term, CPar):
            left = self.compensable(term.left, env)
            right = self.compensable(term.right, env)
            return self._cap_pairs(*_comp_par(left, right, term.sync, limit))
        if isinstance(term, CChoice):
            left = self.compensable(term.left, env)
            right = self.compensable(term.right, env)
            if _mutation.get() == "choice-left-only":
                return left
            return self._cap_pairs(left | right)
        if isinstance(term, CInputPair):
            out = set()
            for v in self.model.values(term.set_name):
                inner = {**env, term.var: v}
                head = _pair(
                    self._event(Event(term.channel, (v,))),
                    self.standard(term.compensation, inner),
                    inst,
                )
                body = self.compensable(term.body, inner)
                out |= self._cap_pairs(*_comp_seq(head, body, limit))
            return self._cap_pairs(out)
        if isinstance(term, CIndexedChoice):
            out = set()
            for v in self.model.values(term.set_name):
                out |= self.compensable(term.body, {**env, term.var: v})
            return self._cap_pairs(out)
        if isinstance(term, CCall):
            return self._call(term, env, self.compensable)
        raise TypeError(f"not a compensable term: {term!r}")


def traces_standard(term, model=None, env=None, bounds=None) -> frozenset:
    """Trace set of a standard process.

    Raises :class:`BoundExceeded` carrying the partial set when a bound was hit.
    """
    ev = Evaluator(model, bounds)
    result = ev.standard(term, env)
    if not ev.exhaustive:
        raise BoundExceeded("bound exceeded: " + ", ".join(ev.truncations), result)
    return result


def traces_compensable(term, model=None, env=None, bounds=None) -> frozenset:
    """Trace-pair set of a compensable process; bounds behave as in :func:`traces_standard`."""
    ev = Evaluator(model, bounds)
    result = ev.compensable(term, env)
    if not ev.exhaustive:
        raise BoundExceeded("bound exceeded: " + ", ".join(ev.truncations), result)
    return result


def render_set(traces) -> list:
    return [t.render() for t in canonical(traces)]
