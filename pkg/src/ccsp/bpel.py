"""BPEL subset: parsing, event naming and translation to cCSP.

Supported elements are ``process``, ``scope``, ``compensationHandler``,
``sequence``, ``flow``, ``receive``, ``invoke`` and ``reply``;
``partnerLinks``/``variables`` declarations are accepted and ignored.
Namespaces are ignored.
"""

from __future__ import annotations

import re
import xml.etree.ElementTree as ET
from collections import Counter
from dataclasses import dataclass, field
from typing import Optional, Union

from . import terms as t


class BpelError(Exception):
    """Malformed input or a document outside the subset's structural rules."""


class UnsupportedElement(BpelError):
    def __init__(self, element: str):
        super().__init__(f"unsupported element <{element}>")
        self.element = element


class TranslationError(BpelError):
    pass


# -- activity tree ---------------------------------------------------------------


@dataclass(frozen=True)
class Receive:
    partner_link: str
    variable: Optional[str] = None
    index: int = 0
    kind = "receive"


@dataclass(frozen=True)
class Invoke:
    partner_link: str
    operation: Optional[str] = None
    input_variable: Optional[str] = None
    output_variable: Optional[str] = None
    index: int = 0
    kind = "invoke"


@dataclass(frozen=True)
class Reply:
    partner_link: str
    variable: Optional[str] = None
    index: int = 0
    kind = "reply"


@dataclass(frozen=True)
class Sequence:
    children: tuple


@dataclass(frozen=True)
class Flow:
    children: tuple


@dataclass(frozen=True)
class Scope:
    handler: Optional[object]
    body: object


@dataclass(frozen=True)
class Process:
    name: str
    body: object


Basic = Union[Receive, Invoke, Reply]
BASIC = (Receive, Invoke, Reply)
_DECLARATIONS = {"partnerLinks", "partnerLink", "variables", "variable"}


def _local(tag: str) -> str:
    return tag.rsplit("}", 1)[-1]


def _attr(el, name):
    """Attribute lookup tolerant of case (listings write ``Variable``)."""
    for key, value in el.attrib.items():
        if _local(key).lower() == name.lower():
            return value.strip()
    return None


class _Builder:
    def __init__(self):
        self.counter = 0

    def activities(self, el, where):
        out = []
        for child in el:
            tag = _local(child.tag)
            if tag in _DECLARATIONS or tag == "compensationHandler":
                continue
            out.append(self.activity(child))
        return out

    def single(self, el, where):
        acts = self.activities(el, where)
        if len(acts) != 1:
            raise BpelError(f"<{where}> must contain exactly one activity, found {len(acts)}")
        return acts[0]

    def activity(self, el):
        tag = _local(el.tag)
        if tag in ("sequence", "flow"):
            children = self.activities(el, tag)
            if not children:
                raise BpelError(f"empty {tag}")
            return (Sequence if tag == "sequence" else Flow)(tuple(children))
        if tag == "scope":
            handlers = [c for c in el if _local(c.tag) == "compensationHandler"]
            if len(handlers) > 1:
                raise BpelError("scope with multiple compensation handlers")
            handler = None
            if handlers:
                handler = self.single(handlers[0], "compensationHandler")
                if _has_handler(handler):
                    raise BpelError("compensation handler contains a scope with its own handler")
            return Scope(handler, self.single(el, "scope"))
        if tag in ("receive", "invoke", "reply"):
            if any(_local(c.tag) not in _DECLARATIONS for c in el):
                raise BpelError(f"<{tag}> must not contain activities")
            partner = _attr(el, "partnerLink")
            if not partner:
                raise BpelError(f"<{tag}> without partnerLink")
            self.counter += 1
            if tag == "invoke":
                return Invoke(
                    partner,
                    _attr(el, "operation"),
                    _attr(el, "inputVariable"),
                    _attr(el, "outputVariable"),
                    index=self.counter,
                )
            cls = Receive if tag == "receive" else Reply
            return cls(partner, _attr(el, "variable"), index=self.counter)
        raise UnsupportedElement(tag)


def _has_handler(node) -> bool:
    if isinstance(node, Scope):
        return node.handler is not None or _has_handler(node.body)
    if isinstance(node, (Sequence, Flow)):
        return any(_has_handler(c) for c in node.children)
    return False


def parse_bpel(xml: str) -> Process:
    """Parse a BPEL document into an activity tree.

    Raises :class:`UnsupportedElement` for elements outside the subset and
    :class:`BpelError` for malformed or structurally invalid input.
    """
    try:
        root = ET.fromstring(xml)
    except ET.ParseError as exc:
        raise BpelError(f"malformed XML: {exc}") from None
    if _local(root.tag) != "process":
        if _local(root.tag) in ("scope", "sequence", "flow", "receive", "invoke", "reply"):
            raise BpelError(f"document root must be <process>, found <{_local(root.tag)}>")
        raise UnsupportedElement(_local(root.tag))
    builder = _Builder()
    body = builder.single(root, "process")
    return Process(_attr(root, "name") or "Process", body)


def basics(node) -> list:
    """Basic activities in document order, handlers included."""
    if isinstance(node, BASIC):
        return [node]
    if isinstance(node, Process):
        return basics(node.body)
    if isinstance(node, Scope):
        return (basics(node.handler) if node.handler is not None else []) + basics(node.body)
    return [b for c in node.children for b in basics(c)]


def count_nodes(node, cls) -> int:
    here = 1 if isinstance(node, cls) else 0
    if isinstance(node, Process):
        return here + count_nodes(node.body, cls)
    if isinstance(node, Scope):
        inner = count_nodes(node.body, cls)
        if node.handler is not None:
            inner += count_nodes(node.handler, cls)
        return here + inner
    if isinstance(node, (Sequence, Flow)):
        return here + sum(count_nodes(c, cls) for c in node.children)
    return here


# -- naming ---------------------------------------------------------------------

SILENT = "_"


def sanitize(text: str) -> str:
    name = re.sub(r"[^A-Za-z0-9_]", "_", text.strip())
    if not name or not name[0].isalpha():
        name = "e" + name
    return name


def _base_name(act) -> str:
    if isinstance(act, Invoke):
        detail = act.operation or act.input_variable or act.output_variable
    else:
        detail = act.variable
    parts = [act.kind, act.partner_link] + ([detail] if detail else [])
    return sanitize("_".join(p.strip() for p in parts))


@dataclass(frozen=True)
class EventNaming:
    """Default channel per basic activity plus a user alias table.

    Alias targets are a channel, an event literal such as ``Reply.Accept``,
    or ``_`` to make the activity silent.
    """

    defaults: dict = field(default_factory=dict)
    aliases: dict = field(default_factory=dict)

    def default(self, act) -> str:
        try:
            return self.defaults[act.index]
        except KeyError:
            raise TranslationError(f"no event name for {act.kind} #{act.index}") from None

    def event(self, act):
        """The event an activity translates to, or None when silenced."""
        name = self.default(act)
        target = self.aliases.get(name, name)
        if target == SILENT:
            return None
        return t.parse_event(target)

    def with_aliases(self, table: dict):
        """Return (naming, warnings); unknown default names only warn."""
        known = set(self.defaults.values())
        warnings = [f"alias for unknown default name {k}" for k in table if k not in known]
        merged = {**self.aliases, **{k: v for k, v in table.items() if k in known}}
        return EventNaming(dict(self.defaults), merged), warnings

    def table(self) -> list:
        rows = []
        for index in sorted(self.defaults):
            name = self.defaults[index]
            rows.append((name, self.aliases.get(name, name)))
        return rows


def default_naming(tree) -> EventNaming:
    """Deterministic names ``<kind>_<partnerLink>[_<operation|variable>]``.

    Names shared by several activities get ``_1``, ``_2``... in document order.
    """
    acts = basics(tree)
    bases = [_base_name(a) for a in acts]
    counts = Counter(bases)
    taken = {b for b in bases if counts[b] == 1}
    seen: Counter = Counter()
    defaults = {}
    for act, base in zip(acts, bases):
        if counts[base] == 1:
            defaults[act.index] = base
            continue
        seen[base] += 1
        n = seen[base]
        name = f"{base}_{n}"
        while name in taken:
            n += 1
            name = f"{base}_{n}"
        seen[base] = n
        taken.add(name)
        defaults[act.index] = name
    return EventNaming(defaults)


_ALIAS_TARGET = re.compile(r"^(_|[A-Za-z][A-Za-z0-9_]*(\.([A-Za-z][A-Za-z0-9_]*|[0-9]+))*)$")


def parse_alias_table(text: str) -> dict:
    """Two whitespace-separated columns, ``default_name alias``; ``#`` starts a comment."""
    table = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 2 or not _ALIAS_TARGET.match(parts[1]):
            raise BpelError(f"alias table line {lineno}: expected 'default_name alias'")
        table[parts[0]] = parts[1]
    return table


def load_alias_table(path) -> dict:
    with open(path, encoding="utf-8") as fh:
        return parse_alias_table(fh.read())


# -- translation ------------------------------------------------------------------


def _fold(items, binary, **extra):
    node = items[0]
    for item in items[1:]:
        node = binary(node, item, **extra)
    return node


class _Translator:
    def __init__(self, naming: EventNaming):
        self.naming = naming

    def std(self, node):
        if isinstance(node, BASIC):
            ev = self.naming.event(node)
            return t.Skip() if ev is None else t.AtomicEvent(ev.channel, ev.payload)
        if isinstance(node, Sequence):
            return _fold([self.std(c) for c in node.children], t.Seq)
        if isinstance(node, Flow):
            return _fold([self.std(c) for c in node.children], t.Par)
        if isinstance(node, Scope):
            if node.handler is not None:
                raise TranslationError("nested compensation handler inside a handler or basic block")
            return self.std(node.body)
        raise TranslationError(f"cannot translate {node!r}")

    def comp(self, node):
        if isinstance(node, BASIC):
            return t.Pair(self.std(node), t.Skip())
        if isinstance(node, Sequence):
            return _fold([self.comp(c) for c in node.children], t.CSeq)
        if isinstance(node, Flow):
            return _fold([self.comp(c) for c in node.children], t.CPar)
        if isinstance(node, Scope):
            if node.handler is None:
                return self.comp(node.body)
            if _has_handler(node.handler):
                raise TranslationError("nested compensation handler inside a handler")
            handler = self.std(node.handler)
            if not _has_handler(node.body):
                return t.Pair(self.std(node.body), handler)
            return self.grouped(node.body, handler)
        raise TranslationError(f"cannot translate {node!r}")

    def grouped(self, body, handler):
        """Attach ``handler`` to the scope's own basic work, leaving nested scopes alone."""
        if isinstance(body, Flow):
            plain = [c for c in body.children if not _has_handler(c)]
            nested = [self.comp(c) for c in body.children if _has_handler(c)]
            head = t.Pair(self.std(Flow(tuple(plain))) if plain else t.Skip(), handler)
            return _fold([head] + nested, t.CPar)
        children = list(body.children) if isinstance(body, Sequence) else [body]
        start = next((i for i, c in enumerate(children) if not _has_handler(c)), None)
        if start is None:
            items = [t.Pair(t.Skip(), handler)] + [self.comp(c) for c in children]
            return _fold(items, t.CSeq)
        end = start
        while end < len(children) and not _has_handler(children[end]):
            end += 1
        run = children[start:end]
        items = [self.comp(c) for c in children[:start]]
        items.append(t.Pair(self.std(Sequence(tuple(run))), handler))
        items.extend(self.comp(c) for c in children[end:])
        return _fold(items, t.CSeq)


def translate(tree: Process, naming: EventNaming | None = None) -> t.Model:
    """Translate a parsed process into a model with one transaction-block definition."""
    naming = naming if naming is not None else default_naming(tree)
    body = _Translator(naming).comp(tree.body)
    name = sanitize(tree.name)
    return t.Model.build({}, [t.Definition(name, (), t.Block(body))])
