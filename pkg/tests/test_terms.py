import pytest

from ccsp import terms as t


def test_terminal_order_is_join_order():
    assert t.THROW < t.YIELD < t.COMMIT
    assert t.COMMIT.symbol() == "✓"
    assert t.THROW.symbol() == "THROW"


def test_event_render_and_parse():
    ev = t.parse_event("Order.m1.5000")
    assert ev == t.Event("Order", ("m1", 5000))
    assert ev.render() == "Order.m1.5000"
    assert t.parse_event("Ack") == t.Event("Ack")


@pytest.mark.parametrize("bad", ["", ".x", "a..b", "a."])
def test_parse_event_rejects_malformed(bad):
    with pytest.raises(ValueError):
        t.parse_event(bad)


def test_trace_render_and_json():
    tr = t.CompletedTrace((t.Event("A"), t.Event("B", (2,))), t.THROW)
    assert tr.render() == "⟨A,B.2⟩THROW"
    assert tr.to_json() == {"events": ["A", "B.2"], "terminal": "THROW"}


def test_canonical_orders_by_events_then_terminal():
    a = t.CompletedTrace((t.Event("A"),), t.COMMIT)
    b = t.CompletedTrace((t.Event("A"),), t.THROW)
    c = t.CompletedTrace((), t.COMMIT)
    assert t.canonical({a, b, c}) == [c, b, a]


def test_bounds_must_be_positive():
    with pytest.raises(ValueError):
        t.Bounds(max_events=0)
    with pytest.raises(ValueError):
        t.Bounds(max_traces=0)
    assert t.Bounds() == t.Bounds(24, 100_000)


def test_model_validation_errors():
    with pytest.raises(t.UndefinedName):
        t.Model.build({}, [t.Definition("P", (), t.Call("Q"))])
    with pytest.raises(t.ArityError):
        t.Model.build({}, [t.Definition("P", ("x",), t.Skip()), t.Definition("Q", (), t.Call("P"))])
    with pytest.raises(t.CyclicDefinition, match="P -> Q -> P"):
        t.Model.build({}, [t.Definition("P", (), t.Call("Q")), t.Definition("Q", (), t.Call("P"))])
    with pytest.raises(t.UnknownSet):
        t.Model.build({}, [t.Definition("P", (), t.Input("c", "S", "x"))])
    with pytest.raises(t.UnknownSet, match="empty"):
        t.Model.build({"S": ()})
    with pytest.raises(t.CcspError, match="duplicate"):
        t.Model.build({}, [t.Definition("P", (), t.Skip()), t.Definition("P", (), t.Skip())])


def test_sort_errors():
    with pytest.raises(t.SortError):
        t.Model.build({}, [t.Definition("P", (), t.Seq(t.Skipp(), t.Skip()))])
    with pytest.raises(t.SortError):
        t.Model.build({}, [t.Definition("P", (), t.CSeq(t.Skip(), t.Skipp()))])
    with pytest.raises(t.SortError):
        t.Model.build(
            {}, [t.Definition("PP", (), t.Skipp()), t.Definition("Q", (), t.Call("PP"))]
        )


def test_walk_visits_every_node():
    term = t.Block(t.CSeq(t.Pair(t.AtomicEvent("A"), t.Skip()), t.Throww()))
    kinds = [type(n).__name__ for n in t.walk(term)]
    assert kinds == ["Block", "CSeq", "Pair", "AtomicEvent", "Skip", "Throww"]
