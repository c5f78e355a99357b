"""Canonical text for models and terms.

The output re-parses to a structurally equal model.  Parentheses are only
emitted where precedence or binder scoping requires them.
"""

from __future__ import annotations

from .. import terms as t

_PAR, _CHOICE, _INTERRUPT, _SEQ, _PAIR, _ATOM = 1, 2, 3, 4, 5, 6
# Indexed choice bodies extend as far right as possible, so the construct
# is looser than every binary operator.
_LOOSEST = 0


def _atom(x) -> str:
    if isinstance(x, t.Var):
        return x.name
    return str(x)


def _event(channel, payload) -> str:
    return ".".join([channel, *(_atom(x) for x in payload)])


def _binary(op, left, right, prec):
    return f"{_fmt(left, prec)} {op} {_fmt(right, prec + 1)}", prec


def _render(term):
    """Return (text, precedence) for ``term``."""
    if isinstance(term, t.AtomicEvent):
        return _event(term.channel, term.payload), _ATOM
    if isinstance(term, t.Output):
        return f"{term.channel}!{_atom(term.value)}", _ATOM
    if isinstance(term, (t.Skip, t.Throw, t.Yield, t.Skipp, t.Throww, t.Yieldd)):
        return type(term).__name__.upper(), _ATOM
    if isinstance(term, (t.Call, t.CCall)):
        if not term.args:
            return term.name, _ATOM
        return f"{term.name}({', '.join(_atom(a) for a in term.args)})", _ATOM
    if isinstance(term, (t.Seq, t.CSeq)):
        left = _fmt(term.left, _SEQ)
        if isinstance(term.left, (t.Input, t.CInputPair)):
            left = f"({left})"
        return f"{left} ; {_fmt(term.right, _SEQ + 1)}", _SEQ
    if isinstance(term, (t.Choice, t.CChoice)):
        return _binary("[]", term.left, term.right, _CHOICE)
    if isinstance(term, (t.Par, t.CPar)):
        op = "||" if not term.sync else f"|[{', '.join(sorted(term.sync))}]|"
        return _binary(op, term.left, term.right, _PAR)
    if isinstance(term, t.Interrupt):
        return _binary("|>", term.left, term.right, _INTERRUPT)
    if isinstance(term, t.Pair):
        return f"{_fmt(term.forward, _ATOM)} % {_fmt(term.compensation, _ATOM)}", _PAIR
    if isinstance(term, t.Block):
        return f"tx{{ {_fmt(term.body, _LOOSEST)} }}", _ATOM
    if isinstance(term, (t.IndexedChoice, t.CIndexedChoice)):
        return f"[] {term.var} : {term.set_name} @ {_fmt(term.body, _LOOSEST)}", _LOOSEST
    if isinstance(term, t.Input):
        return f"{term.channel}?{term.var}:{term.set_name} ; {_fmt(term.body, _SEQ)}", _SEQ
    if isinstance(term, t.CInputPair):
        head = f"({term.channel}?{term.var}:{term.set_name} % {_fmt(term.compensation, _ATOM)})"
        return f"{head} ; {_fmt(term.body, _SEQ)}", _SEQ
    raise TypeError(f"cannot print {term!r}")


def _fmt(term, required) -> str:
    text, prec = _render(term)
    return f"({text})" if prec < required else text


def print_term(term) -> str:
    return _fmt(term, _LOOSEST)


def print_model(model: t.Model) -> str:
    lines = []
    for name, values in model.value_sets.items():
        lines.append(f"set {name} = {{{', '.join(map(str, values))}}}")
    if lines:
        lines.append("")
    for d in model.definitions.values():
        head = d.name if not d.params else f"{d.name}({', '.join(d.params)})"
        body = print_term(d.body)
        if isinstance(d.body, t.AtomicEvent) and not d.body.payload:
            # a lone identifier body would read as a process reference
            body = f"({body})"
        lines.append(f"{head} = {body}")
    return "\n".join(lines) + "\n"
