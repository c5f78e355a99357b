"""Values and abstract syntax of compensating CSP.

Semantic values (events, completed traces, trace pairs) are plain named
tuples so that hashing and equality stay in C; they are compared a great
deal during enumeration.  Syntax nodes are frozen dataclasses split into
the two sorts, standard and compensable.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import NamedTuple, Union

Atom = Union[str, int]


class CcspError(Exception):
    """Base class for semantic errors raised by the library."""


class UndefinedName(CcspError):
    pass


class UnboundVariable(CcspError):
    pass


class UnknownSet(CcspError):
    pass


class ArityError(CcspError):
    pass


class CyclicDefinition(CcspError):
    pass


class SortError(CcspError):
    """A standard process was required where a compensable one was given, or vice versa."""


class BoundExceeded(CcspError):
    """Enumeration hit a bound; ``partial`` holds what was computed."""

    def __init__(self, message: str, partial=frozenset()):
        super().__init__(message)
        self.partial = partial
        self.exhaustive = False


# -- semantic values ---------------------------------------------------------


class Terminal(enum.IntEnum):
    """How a completed trace ends.  Integer order is the join order."""

    THROW = 0
    YIELD = 1
    COMMIT = 2

    def symbol(self) -> str:
        return "✓" if self is Terminal.COMMIT else self.name


COMMIT = Terminal.COMMIT
THROW = Terminal.THROW
YIELD = Terminal.YIELD


_render_cache: dict = {}


class Event(NamedTuple):
    channel: str
    payload: tuple = ()

    def render(self) -> str:
        text = _render_cache.get(self)
        if text is None:
            if self.payload:
                text = ".".join([self.channel, *map(str, self.payload)])
            else:
                text = self.channel
            _render_cache[self] = text
        return text

    def __str__(self) -> str:
        return self.render()


def parse_event(text: str) -> Event:
    """Parse ``chan.v1.v2`` into an :class:`Event`; decimal parts become ints."""
    parts = text.strip().split(".")
    if not parts[0] or not all(parts):
        raise ValueError(f"malformed event {text!r}")
    return Event(parts[0], tuple(int(p) if p.isdigit() else p for p in parts[1:]))


class CompletedTrace(NamedTuple):
    events: tuple
    terminal: Terminal

    def render(self) -> str:
        inner = ",".join(e.render() for e in self.events)
        return f"⟨{inner}⟩{self.terminal.symbol()}"

    def sort_key(self):
        return (tuple(e.render() for e in self.events), self.terminal)

    def to_json(self) -> dict:
        return {"events": [e.render() for e in self.events], "terminal": self.terminal.name}


class TracePair(NamedTuple):
    """Forward behaviour paired with the compensation it has installed.

    ``provenance`` is only populated by instrumented evaluation and records
    which pairs completed; it takes part in equality so that distinct
    histories are not merged.
    """

    forward: CompletedTrace
    compensation: CompletedTrace
    provenance: object = None


EMPTY_COMMIT = CompletedTrace((), COMMIT)
EMPTY_THROW = CompletedTrace((), THROW)
EMPTY_YIELD = CompletedTrace((), YIELD)


def canonical(traces) -> list:
    """Deterministic order: event renderings lexicographically, then terminal."""
    return sorted(traces, key=CompletedTrace.sort_key)


@dataclass(frozen=True)
class Bounds:
    max_events: int = 24
    max_traces: int = 100_000

    def __post_init__(self):
        if self.max_events < 1 or self.max_traces < 1:
            raise ValueError("bounds must be positive")


# -- syntax --------------------------------------------------------------------


@dataclass(frozen=True)
class Var:
    """Reference to a bound variable inside an event payload or call argument."""

    name: str


class StandardTerm:
    __slots__ = ()
    compensable = False


class CompensableTerm:
    __slots__ = ()
    compensable = True


@dataclass(frozen=True)
class AtomicEvent(StandardTerm):
    channel: str
    payload: tuple = ()


@dataclass(frozen=True)
class Skip(StandardTerm):
    pass


@dataclass(frozen=True)
class Throw(StandardTerm):
    pass


@dataclass(frozen=True)
class Yield(StandardTerm):
    pass


@dataclass(frozen=True)
class Seq(StandardTerm):
    left: StandardTerm
    right: StandardTerm


@dataclass(frozen=True)
class Choice(StandardTerm):
    left: StandardTerm
    right: StandardTerm


@dataclass(frozen=True)
class Par(StandardTerm):
    left: StandardTerm
    right: StandardTerm
    sync: frozenset = field(default_factory=frozenset)


@dataclass(frozen=True)
class Interrupt(StandardTerm):
    left: StandardTerm
    right: StandardTerm


@dataclass(frozen=True)
class Block(StandardTerm):
    body: CompensableTerm


@dataclass(frozen=True)
class Input(StandardTerm):
    """``channel?var:set_name ; body``"""

    channel: str
    set_name: str
    var: str
    body: StandardTerm = Skip()


@dataclass(frozen=True)
class Output(StandardTerm):
    channel: str
    value: object


@dataclass(frozen=True)
class IndexedChoice(StandardTerm):
    var: str
    set_name: str
    body: StandardTerm


@dataclass(frozen=True)
class Call(StandardTerm):
    name: str
    args: tuple = ()


@dataclass(frozen=True)
class Pair(CompensableTerm):
    forward: StandardTerm
    compensation: StandardTerm


@dataclass(frozen=True)
class Skipp(CompensableTerm):
    pass


@dataclass(frozen=True)
class Throww(CompensableTerm):
    pass


@dataclass(frozen=True)
class Yieldd(CompensableTerm):
    pass


@dataclass(frozen=True)
class CSeq(CompensableTerm):
    left: CompensableTerm
    right: CompensableTerm


@dataclass(frozen=True)
class CPar(CompensableTerm):
    left: CompensableTerm
    right: CompensableTerm
    sync: frozenset = field(default_factory=frozenset)


@dataclass(frozen=True)
class CChoice(CompensableTerm):
    left: CompensableTerm
    right: CompensableTerm


@dataclass(frozen=True)
class CInputPair(CompensableTerm):
    """``(channel?var:set_name % compensation) ; body`` with ``var`` bound in both."""

    channel: str
    set_name: str
    var: str
    compensation: StandardTerm
    body: CompensableTerm = Skipp()


@dataclass(frozen=True)
class CIndexedChoice(CompensableTerm):
    var: str
    set_name: str
    body: CompensableTerm


@dataclass(frozen=True)
class CCall(CompensableTerm):
    name: str
    args: tuple = ()


def children(term):
    """Immediate subterms, in source order."""
    if isinstance(term, (Seq, Choice, Par, Interrupt, CSeq, CPar, CChoice)):
        return (term.left, term.right)
    if isinstance(term, Pair):
        return (term.forward, term.compensation)
    if isinstance(term, CInputPair):
        return (term.compensation, term.body)
    if isinstance(term, (Block, Input, IndexedChoice, CIndexedChoice)):
        return (term.body,)
    return ()


def walk(term):
    stack = [term]
    while stack:
        node = stack.pop()
        yield node
        stack.extend(reversed(children(node)))


# -- models ----------------------------------------------------------------------


@dataclass(frozen=True)
class Definition:
    name: str
    params: tuple
    body: object

    @property
    def compensable(self) -> bool:
        return self.body.compensable


@dataclass(frozen=True)
class Model:
    """Named definitions plus finite value sets.

    Construct through :meth:`build`, which validates names, arities, set
    declarations and acyclicity of the call graph.
    """

    value_sets: dict = field(default_factory=dict)
    definitions: dict = field(default_factory=dict)

    @classmethod
    def build(cls, value_sets=None, definitions=()) -> "Model":
        sets = {name: tuple(values) for name, values in (value_sets or {}).items()}
        defs = {}
        for d in definitions:
            if d.name in defs:
                raise CcspError(f"duplicate definition {d.name}")
            defs[d.name] = d
        model = cls(sets, defs)
        model.validate()
        return model

    @property
    def standard_defs(self) -> dict:
        return {n: d for n, d in self.definitions.items() if not d.compensable}

    @property
    def compensable_defs(self) -> dict:
        return {n: d for n, d in self.definitions.items() if d.compensable}

    def values(self, set_name: str) -> tuple:
        try:
            return self.value_sets[set_name]
        except KeyError:
            raise UnknownSet(f"unknown set {set_name}") from None

    def lookup(self, name: str) -> Definition:
        try:
            return self.definitions[name]
        except KeyError:
            raise UndefinedName(f"undefined name {name}") from None

    def with_definitions(self, *definitions) -> "Model":
        defs = dict(self.definitions)
        for d in definitions:
            defs[d.name] = d
        model = Model(dict(self.value_sets), defs)
        model.validate()
        return model

    def validate(self) -> None:
        for name, values in self.value_sets.items():
            if not values:
                raise UnknownSet(f"set {name} is empty")
        for d in self.definitions.values():
            validate_term(d.body, self, d.name)
        self._check_acyclic()

    def _check_acyclic(self) -> None:
        state: dict = {}

        def visit(name, path):
            mark = state.get(name)
            if mark == 2:
                return
            if mark == 1:
                cycle = " -> ".join(path[path.index(name):] + [name])
                raise CyclicDefinition(f"cyclic definition: {cycle}")
            state[name] = 1
            for callee in calls_in(self.definitions[name].body):
                visit(callee, path + [name])
            state[name] = 2

        for name in self.definitions:
            visit(name, [])


def calls_in(term) -> list:
    return [n.name for n in walk(term) if isinstance(n, (Call, CCall))]


def validate_term(term, model: Model, where: str = "<term>") -> None:
    """Check call targets, arities, set names and sorts inside ``term``."""
    for node in walk(term):
        if isinstance(node, (Call, CCall)):
            d = model.lookup(node.name)
            if len(d.params) != len(node.args):
                raise ArityError(
                    f"{where}: {node.name} expects {len(d.params)} argument(s), got {len(node.args)}"
                )
            if d.compensable != isinstance(node, CCall):
                sort = "compensable" if d.compensable else "standard"
                raise SortError(f"{where}: call to {sort} process {node.name} used in the wrong sort")
        if isinstance(node, (Input, IndexedChoice, CInputPair, CIndexedChoice)):
            model.values(node.set_name)
        _check_sorts(node, where)


_STANDARD_OPERANDS = (Seq, Choice, Par, Interrupt, Input, IndexedChoice, Pair)
_COMPENSABLE_OPERANDS = (CSeq, CPar, CChoice, CIndexedChoice, Block)


def _check_sorts(node, where: str) -> None:
    if isinstance(node, Pair):
        if node.forward.compensable or node.compensation.compensable:
            raise SortError(f"{where}: compensation pair operands must be standard processes")
    elif isinstance(node, _STANDARD_OPERANDS):
        if any(c.compensable for c in children(node)):
            raise SortError(f"{where}: {type(node).__name__} takes standard operands")
    elif isinstance(node, _COMPENSABLE_OPERANDS):
        if not all(c.compensable for c in children(node)):
            raise SortError(f"{where}: {type(node).__name__} takes compensable operands")
    elif isinstance(node, CInputPair):
        if node.compensation.compensable or not node.body.compensable:
            raise SortError(f"{where}: malformed input pair")
