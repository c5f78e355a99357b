"""Recursive-descent parser for ``.ccsp`` models.

Parsing runs in two passes.  The first builds a raw tree that only knows
about syntax; the second resolves names against the whole file (process
references may appear before their definitions), binds variables, infers
the sort of every definition and lifts standard operands that appear in
compensable context to ``P % SKIP``.

Precedence, loosest first: ``||``/``|[..]|``, ``[]``, ``|>``, ``;``, ``%``.
All binary operators associate to the left.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

from .. import terms as t
from .lexer import ParseDiagnostic, ParseError, Token, tokenize


class Raw(NamedTuple):
    kind: str
    pos: tuple
    args: tuple


@dataclass(frozen=True)
class SourceFile:
    path: str
    text: str

    @classmethod
    def read(cls, path) -> "SourceFile":
        with open(path, encoding="utf-8") as fh:
            return cls(str(path), fh.read())


class _Fail(Exception):
    def __init__(self, diagnostic=None):
        self.diagnostic = diagnostic


def _error(pos, message):
    return _Fail(ParseDiagnostic("error", pos[0], pos[1], message))


_CONSTANTS = {
    "SKIP": t.Skip(),
    "THROW": t.Throw(),
    "YIELD": t.Yield(),
    "SKIPP": t.Skipp(),
    "THROWW": t.Throww(),
    "YIELDD": t.Yieldd(),
}


class _SyntaxParser:
    def __init__(self, tokens):
        self.tokens = tokens
        self.i = 0

    # token helpers

    @property
    def tok(self) -> Token:
        return self.tokens[self.i]

    def pos(self, tok=None):
        tok = tok or self.tok
        return (tok.line, tok.column)

    def advance(self) -> Token:
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect(self, kind, what=None) -> Token:
        if self.tok.kind != kind:
            found = self.tok.text or "end of input"
            raise _error(self.pos(), f"expected {what or repr(kind)}, found {found!r}")
        return self.advance()

    # declarations

    def declarations(self) -> list:
        decls = []
        while self.tok.kind != "eof":
            if self.tok.kind == "kw" and self.tok.text == "set":
                decls.append(self.set_decl())
            elif self.tok.kind == "ident":
                decls.append(self.definition())
            else:
                raise _error(self.pos(), f"expected a declaration, found {self.tok.text!r}")
        return decls

    def set_decl(self):
        start = self.pos()
        self.advance()
        name = self.expect("ident", "set name").text
        self.expect("=")
        self.expect("{")
        values = [self.atom()]
        while self.tok.kind == ",":
            self.advance()
            values.append(self.atom())
        self.expect("}")
        return ("set", name, tuple(v if isinstance(v, int) else v[1] for v in values), start)

    def definition(self):
        start = self.pos()
        name = self.advance().text
        params = []
        if self.tok.kind == "(":
            self.advance()
            if self.tok.kind != ")":
                params.append(self.expect("ident", "parameter").text)
                while self.tok.kind == ",":
                    self.advance()
                    params.append(self.expect("ident", "parameter").text)
            self.expect(")")
        self.expect("=", "'=' after definition name")
        body_start = self.i
        body = close(self.expr())
        lone = self.i - body_start == 1 and body.kind == "ident"
        return ("def", name, tuple(params), body, start, lone)

    def entry(self):
        body_start = self.i
        body = close(self.expr())
        if self.tok.kind != "eof":
            raise _error(self.pos(), f"unexpected {self.tok.text!r} after expression")
        return body, self.i - body_start == 1 and body.kind == "ident"

    # expressions

    def expr(self):
        return self.par()

    def par(self):
        left = self.choice()
        while self.tok.kind in ("||", "|["):
            pos = self.pos()
            if self.advance().kind == "||":
                sync = frozenset()
            else:
                chans = []
                if self.tok.kind != "]|":
                    chans.append(self.expect("ident", "channel").text)
                    while self.tok.kind == ",":
                        self.advance()
                        chans.append(self.expect("ident", "channel").text)
                self.expect("]|")
                sync = frozenset(chans)
            right = self.choice()
            left = Raw("par", pos, (close(left), close(right), sync))
        return left

    def choice(self):
        left = self.interrupt()
        while self.tok.kind == "[]":
            pos = self.pos()
            self.advance()
            right = self.interrupt()
            left = Raw("choice", pos, (close(left), close(right)))
        return left

    def interrupt(self):
        left = self.seq()
        while self.tok.kind == "|>":
            pos = self.pos()
            self.advance()
            right = self.seq()
            left = Raw("interrupt", pos, (close(left), close(right)))
        return left

    def seq(self):
        items = [self.pair()]
        while self.tok.kind == ";":
            self.advance()
            items.append(self.pair())
        return fold_sequence(items)

    def pair(self):
        left = self.primary()
        while self.tok.kind == "%":
            pos = self.pos()
            self.advance()
            right = close(self.primary())
            if left.kind == "input":
                left = Raw("pbinder", left.pos, left.args + (right,))
            else:
                left = Raw("pair", pos, (close(left), right))
        return left

    def primary(self):
        tok = self.tok
        pos = self.pos()
        if tok.kind == "(":
            self.advance()
            inner = self.expr()
            self.expect(")", "')'")
            return inner
        if tok.kind == "tx":
            self.advance()
            body = close(self.expr())
            self.expect("}", "'}' closing tx{")
            return Raw("tx", pos, (body,))
        if tok.kind == "[]":
            self.advance()
            var = self.expect("ident", "bound variable").text
            self.expect(":")
            set_name = self.expect("ident", "set name").text
            self.expect("@")
            body = close(self.expr())
            return Raw("ichoice", pos, (var, set_name, body))
        if tok.kind == "kw" and tok.text in _CONSTANTS:
            self.advance()
            return Raw("const", pos, (tok.text,))
        if tok.kind == "ident":
            name = self.advance().text
            nxt = self.tok.kind
            if nxt == ".":
                atoms = []
                while self.tok.kind == ".":
                    self.advance()
                    atoms.append(self.atom())
                return Raw("event", pos, (name, tuple(atoms)))
            if nxt == "?":
                self.advance()
                value = self.atom()
                if self.tok.kind == ":":
                    if isinstance(value, int):
                        raise _error(pos, "input variable must be an identifier")
                    self.advance()
                    set_tok = self.expect("ident", "set name")
                    return Raw("input", pos, (name, value[1], set_tok.text, self.pos(set_tok)))
                # c?Literal is the event c.Literal
                return Raw("event", pos, (name, (value,)))
            if nxt == "!":
                self.advance()
                return Raw("output", pos, (name, self.atom()))
            if nxt == "(":
                self.advance()
                args = []
                if self.tok.kind != ")":
                    args.append(self.atom())
                    while self.tok.kind == ",":
                        self.advance()
                        args.append(self.atom())
                self.expect(")", "')'")
                return Raw("call", pos, (name, tuple(args)))
            return Raw("ident", pos, (name,))
        found = tok.text or "end of input"
        raise _error(pos, f"expected a process, found {found!r}")

    def atom(self):
        tok = self.tok
        if tok.kind == "int":
            self.advance()
            return int(tok.text)
        if tok.kind == "ident":
            self.advance()
            return ("id", tok.text, self.pos(tok))
        raise _error(self.pos(), f"expected an identifier or integer, found {tok.text!r}")


def _is_binder(node) -> bool:
    return node.kind in ("input", "pbinder")


def close(node):
    """A binder used outside a sequence scopes over nothing."""
    if _is_binder(node):
        return Raw("bind", node.pos, (node, None))
    return node


def fold_sequence(items):
    """Left-fold a ``;`` chain; the first binder scopes over everything after it."""
    if len(items) == 1:
        return items[0]
    for k, item in enumerate(items):
        if _is_binder(item):
            rest = items[k + 1 :]
            body = close(fold_sequence(rest)) if rest else None
            items = items[:k] + [Raw("bind", item.pos, (item, body))]
            break
    node = close(items[0])
    for item in items[1:]:
        node = Raw("seq", item.pos, (node, close(item)))
    return node


# -- resolution -----------------------------------------------------------------


def _lift(term):
    return t.Pair(term, t.Skip()) if not term.compensable else term


class _Resolver:
    def __init__(self, value_sets=None, definitions=None):
        self.sets = dict(value_sets or {})
        self.defs = dict(definitions or {})
        self.raw = {}
        self.stack = []
        self.failed = set()
        self.diagnostics = []

    def add_declarations(self, decls):
        for decl in decls:
            if decl[0] == "set":
                _, name, values, pos = decl
                if name in self.sets:
                    self.diagnostics.append(ParseDiagnostic("error", *pos, f"duplicate set {name}"))
                elif len(set(values)) != len(values):
                    self.diagnostics.append(
                        ParseDiagnostic("error", *pos, f"set {name} lists a value twice")
                    )
                self.sets[name] = values
            else:
                _, name, params, body, pos, lone = decl
                if name in self.raw or name in self.defs:
                    self.diagnostics.append(ParseDiagnostic("error", *pos, f"duplicate definition {name}"))
                    continue
                if len(set(params)) != len(params):
                    self.diagnostics.append(
                        ParseDiagnostic("error", *pos, f"{name} repeats a parameter name")
                    )
                self.raw[name] = (params, body, pos, lone)

    def resolve_all(self):
        for name in self.raw:
            try:
                self.definition(name)
            except _Fail as exc:
                if exc.diagnostic is not None:
                    self.diagnostics.append(exc.diagnostic)

    def definition(self, name, use_pos=None):
        if name in self.defs:
            return self.defs[name]
        if name in self.failed:
            raise _Fail()
        if name in self.stack:
            cycle = " -> ".join(self.stack[self.stack.index(name):] + [name])
            raise _error(use_pos or self.raw[name][2], f"cyclic call graph: {cycle}")
        params, body, pos, lone = self.raw[name]
        if lone and body.args[0] not in self.raw and body.args[0] not in self.defs:
            self.failed.add(name)
            raise _error(body.pos, f"undefined name {body.args[0]}")
        self.stack.append(name)
        try:
            term = self.term(body, frozenset(params))
        except _Fail:
            self.failed.add(name)
            raise
        finally:
            self.stack.pop()
        d = t.Definition(name, params, term)
        self.defs[name] = d
        return d

    def known(self, name):
        return name in self.raw or name in self.defs

    def atom(self, a, scope):
        if isinstance(a, int):
            return a
        name = a[1]
        return t.Var(name) if name in scope else name

    def check_set(self, name, pos):
        if name not in self.sets:
            raise _error(pos, f"unknown set {name}")

    def call(self, name, args, pos):
        if not self.known(name):
            raise _error(pos, f"undefined name {name}")
        d = self.definition(name, pos)
        if len(d.params) != len(args):
            raise _error(
                pos, f"arity mismatch: {name} expects {len(d.params)} argument(s), got {len(args)}"
            )
        return (t.CCall if d.compensable else t.Call)(name, args)

    def term(self, node, scope):
        kind, pos, args = node
        if kind == "const":
            return _CONSTANTS[args[0]]
        if kind == "ident":
            name = args[0]
            if name in scope:
                raise _error(pos, f"variable {name} used as a process")
            if self.known(name):
                return self.call(name, (), pos)
            return t.AtomicEvent(name)
        if kind == "event":
            return t.AtomicEvent(args[0], tuple(self.atom(a, scope) for a in args[1]))
        if kind == "output":
            return t.Output(args[0], self.atom(args[1], scope))
        if kind == "call":
            return self.call(args[0], tuple(self.atom(a, scope) for a in args[1]), pos)
        if kind in ("seq", "choice", "par"):
            left = self.term(args[0], scope)
            right = self.term(args[1], scope)
            if left.compensable or right.compensable:
                left, right = _lift(left), _lift(right)
                if kind == "seq":
                    return t.CSeq(left, right)
                if kind == "choice":
                    return t.CChoice(left, right)
                return t.CPar(left, right, args[2])
            if kind == "seq":
                return t.Seq(left, right)
            if kind == "choice":
                return t.Choice(left, right)
            return t.Par(left, right, args[2])
        if kind == "interrupt":
            left = self.term(args[0], scope)
            right = self.term(args[1], scope)
            if left.compensable or right.compensable:
                raise _error(pos, "interrupt handler operands must be standard processes")
            return t.Interrupt(left, right)
        if kind == "pair":
            forward = self.term(args[0], scope)
            comp = self.term(args[1], scope)
            if forward.compensable or comp.compensable:
                raise _error(pos, "compensation pair operands must be standard processes")
            return t.Pair(forward, comp)
        if kind == "tx":
            return t.Block(_lift(self.term(args[0], scope)))
        if kind == "ichoice":
            var, set_name, body = args
            self.check_set(set_name, pos)
            inner = self.term(body, scope | {var})
            cls = t.CIndexedChoice if inner.compensable else t.IndexedChoice
            return cls(var, set_name, inner)
        if kind == "bind":
            binder, body = args
            if binder.kind == "input":
                channel, var, set_name, set_pos = binder.args
                comp = None
            else:
                channel, var, set_name, set_pos, comp_raw = binder.args
            self.check_set(set_name, set_pos)
            inner_scope = scope | {var}
            cont = self.term(body, inner_scope) if body is not None else None
            if binder.kind == "input" and (cont is None or not cont.compensable):
                return t.Input(channel, set_name, var, cont if cont is not None else t.Skip())
            if binder.kind == "input":
                comp = t.Skip()
            else:
                comp = self.term(comp_raw, inner_scope)
                if comp.compensable:
                    raise _error(binder.pos, "compensation pair operands must be standard processes")
            cont = _lift(cont) if cont is not None else t.Skipp()
            return t.CInputPair(channel, set_name, var, comp, cont)
        raise AssertionError(kind)


def parse_model(source) -> t.Model:
    """Parse a ``.ccsp`` text (or :class:`SourceFile`) into a validated model.

    Raises :class:`ParseError` listing positioned diagnostics.
    """
    text = source.text if isinstance(source, SourceFile) else source
    try:
        decls = _SyntaxParser(tokenize(text)).declarations()
    except _Fail as exc:
        raise ParseError([exc.diagnostic]) from None
    resolver = _Resolver()
    resolver.add_declarations(decls)
    resolver.resolve_all()
    if resolver.diagnostics:
        raise ParseError(sorted(resolver.diagnostics, key=lambda d: (d.line, d.column)))
    try:
        return t.Model.build(resolver.sets, [resolver.defs[name] for name in resolver.raw])
    except t.CcspError as exc:  # pragma: no cover - resolver should have caught it
        raise ParseError([ParseDiagnostic("error", 1, 1, str(exc))]) from None


def parse_term(text: str, model: t.Model | None = None):
    """Parse a single process expression in the context of ``model``.

    A lone identifier must name a definition of the model.
    """
    model = model or t.Model()
    try:
        raw, lone = _SyntaxParser(tokenize(text)).entry()
    except _Fail as exc:
        raise ParseError([exc.diagnostic]) from None
    if lone and raw.args[0] not in model.definitions:
        raise t.UndefinedName(f"undefined entry {raw.args[0]}")
    resolver = _Resolver(model.value_sets, model.definitions)
    try:
        return resolver.term(raw, frozenset())
    except _Fail as exc:
        raise ParseError([exc.diagnostic]) from None
