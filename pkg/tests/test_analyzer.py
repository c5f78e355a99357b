import json
import random
import re

import jsonschema
import pytest

from conftest import load
from ccsp import terms as t
from ccsp.analyzer import (
    LAWS,
    BadArgs,
    TermGenerator,
    UndefinedEntry,
    UnknownLaw,
    check_compensation_consistency,
    check_equivalence,
    check_law,
    enumerate_traces,
    rename_trace,
)
from ccsp.analyzer import reports
from ccsp.analyzer.consistency import expected_compensations
from ccsp.dsl import parse_model, print_term
from ccsp.semantics import MUTATIONS, mutated

EMPTY = t.Model()


def rendered(result):
    return [tr.render() for tr in result.traces]


# -- enumeration ------------------------------------------------------------------


def test_enumerate_block_expression():
    result = enumerate_traces(EMPTY, "tx{(A%A2);THROWW}")
    assert rendered(result) == ["⟨A,A2⟩✓"]
    assert result.exhaustive
    assert result.stats == {"traces": 1, "max_length": 2}


def test_enumerate_skip():
    assert rendered(enumerate_traces(EMPTY, "SKIP")) == ["⟨⟩✓"]


def test_compensable_entry_is_closed():
    model = parse_model("PP = (A % A2) ; THROWW\n")
    assert rendered(enumerate_traces(model, "PP")) == ["⟨A,A2⟩✓"]


def test_entry_errors():
    model = parse_model("P(x) = A.x\n")
    with pytest.raises(UndefinedEntry, match="undefined entry Nope"):
        enumerate_traces(model, "Nope")
    with pytest.raises(BadArgs):
        enumerate_traces(model, "P")
    with pytest.raises(BadArgs):
        enumerate_traces(model, "P", "a-b")
    with pytest.raises(BadArgs):
        enumerate_traces(model, "A ; B", "1")
    assert rendered(enumerate_traces(model, "P", "5")) == ["⟨A.5⟩✓"]
    assert rendered(enumerate_traces(model, "P", ["m1"])) == ["⟨A.m1⟩✓"]


def test_enumeration_is_deterministic():
    model = load("supplier.ccsp")
    a = enumerate_traces(model, "System")
    b = enumerate_traces(model, "System")
    assert a.traces == b.traces
    assert list(a.traces) == t.canonical(a.traces)


def test_truncated_enumeration():
    result = enumerate_traces(load("broker.ccsp"), "System", bounds=t.Bounds(max_traces=10))
    assert not result.exhaustive
    assert result.truncations
    assert len(result.traces) <= 10


def test_loanstar_without_threshold_has_five_paths_per_amount():
    result = enumerate_traces(load("loanstar.ccsp"), "LoanStar")
    assert result.exhaustive
    assert len(result.traces) == 10
    shapes = {tuple(e.channel for e in tr.events) for tr in result.traces}
    assert len(shapes) == 5


def test_loanstar_process_with_argument():
    result = enumerate_traces(load("loanstar.ccsp"), "FirstRate", "5000")
    assert rendered(result) == ["⟨Assess.5000,NotOk,Reply.Reject⟩✓", "⟨Assess.5000,Ok,Reply.Accept⟩✓"]


# -- equivalence -----------------------------------------------------------------------


def test_equivalence_examples():
    verdict = check_equivalence(EMPTY, "A ; B", EMPTY, "A ; B")
    assert verdict.equal and not verdict.up_to_bound and verdict.counterexample is None
    verdict = check_equivalence(EMPTY, "A ; B", EMPTY, "B ; A")
    assert not verdict.equal
    assert verdict.counterexample.render() == "⟨A,B⟩✓"
    assert verdict.side == "first"
    verdict = check_equivalence(EMPTY, "B ; A", EMPTY, "A ; B")
    assert verdict.side == "second"


def test_equivalence_up_to_bound():
    verdict = check_equivalence(EMPTY, "A ; B ; C", EMPTY, "A ; B ; D", t.Bounds(max_events=2))
    assert verdict.equal and verdict.up_to_bound


def test_mapping_renames_second_side():
    verdict = check_equivalence(EMPTY, "Order.1 ; Reply.Accept", EMPTY, "o.1 ; r", mapping={"o": "Order", "r": "Reply.Accept"})
    assert verdict.equal
    tr = t.CompletedTrace((t.Event("r", (1,)),), t.COMMIT)
    assert rename_trace(tr, {"r": "Reply.Accept"}).render() == "⟨Reply.Accept.1⟩✓"


def test_equivalence_is_an_equivalence_relation():
    rng = random.Random(7)
    gen = TermGenerator(rng, alphabet=("a", "b"), max_depth=2)
    sample = [print_term(gen.standard()) for _ in range(20)]
    # known-equal spellings so that some triples are all equal
    sample += ["a ; SKIP", "SKIP ; a", "(a) [] (a)"]

    def eq(x, y):
        return check_equivalence(EMPTY, x, EMPTY, y).equal

    for x in sample:
        assert eq(x, x)
    for x in sample:
        for y in sample:
            assert eq(x, y) == eq(y, x)
            if eq(x, y):
                for z in sample:
                    if eq(y, z):
                        assert eq(x, z)


# -- laws --------------------------------------------------------------------------------


def test_registry():
    assert set(LAWS) >= {
        "assoc-par", "comm-par", "seq-unit", "choice-union", "derived-forms",
        "input-expansion", "compensation-reversal", "terminal-join-table",
    }
    assert {law.mutation for law in LAWS.values()} <= MUTATIONS


def test_terminal_join_table_is_exhaustive():
    report = check_law("terminal-join-table", samples=1)
    assert report.passed and report.instances == 9 + 27


@pytest.mark.parametrize("name", list(LAWS))
def test_law_passes(name):
    report = check_law(name, samples=200, seed=42)
    assert report.passed, report.counterexample
    assert report.counterexample is None


@pytest.mark.parametrize("name", list(LAWS))
def test_law_is_falsifiable(name):
    with mutated(LAWS[name].mutation):
        report = check_law(name, samples=200, seed=42)
    assert not report.passed
    assert report.counterexample


def test_law_reports_are_reproducible():
    assert check_law("assoc-par", 50, 3) == check_law("assoc-par", 50, 3)


def test_counterexample_is_dsl():
    with mutated("comp-seq-forward-order"):
        report = check_law("compensation-reversal", samples=5, seed=1)
    text = report.counterexample
    assert text.startswith("tx{") and "%" in text and "THROWW" in text
    from ccsp.dsl import parse_term

    parse_term(text)


def test_unknown_law():
    with pytest.raises(UnknownLaw):
        check_law("no-such")
    with pytest.raises(ValueError):
        check_law("assoc-par", samples=0)


# -- compensation consistency -------------------------------------------------------


@pytest.mark.parametrize(
    "entry, observations",
    [("tx{(A%A2);(B%B2);THROWW}", 1), ("tx{(A%A2)}", 0), ("tx{THROWW;(A%A2)}", 1)],
)
def test_consistency_examples(entry, observations):
    report = check_compensation_consistency(EMPTY, entry)
    assert report.consistent
    assert report.observations == observations


def test_consistency_detects_forward_order_compensation():
    with mutated("comp-seq-forward-order"):
        report = check_compensation_consistency(EMPTY, "tx{(A%A2);(B%B2);THROWW}")
    assert not report.consistent
    assert "⟨A2,B2⟩" in report.failures[0]


def test_expected_compensations_oracle():
    a2 = t.CompletedTrace((t.Event("A2"),), t.COMMIT)
    b2 = t.CompletedTrace((t.Event("B2"),), t.COMMIT)
    leaf_a = ("leaf", (t.Event("A"),), a2)
    leaf_b = ("leaf", (t.Event("B"),), b2)
    assert {c.render() for c in expected_compensations(("seq", leaf_a, leaf_b))} == {"⟨B2,A2⟩✓"}
    assert {c.render() for c in expected_compensations(("par", leaf_a, leaf_b, frozenset()))} == {
        "⟨A2,B2⟩✓", "⟨B2,A2⟩✓"}
    assert expected_compensations(("none",)) == {t.EMPTY_COMMIT}


@pytest.mark.parametrize("fixture", ["supplier.ccsp", "broker.ccsp"])
def test_case_studies_are_consistent(fixture):
    report = check_compensation_consistency(load(fixture), "System")
    assert report.consistent, report.failures[:3]
    assert report.observations > 0
    assert report.exhaustive


# -- case studies ----------------------------------------------------------------------


def _index(events, channel, payload=None):
    for k, e in enumerate(events):
        if e.channel == channel and (payload is None or e.payload == payload):
            return k
    return -1


def test_supplier_alone_cancels_order_rejected_before_dealer_order():
    result = enumerate_traces(load("supplier.ccsp"), "Supplier")
    assert result.exhaustive
    rendered_traces = set(rendered(result))
    # with |M| = |Q| = 2 the path exists for every order and quote
    assert "⟨Order.m1,RFQ.m1,RecQuote.q1,Quote.q1,Ack.Reject,CancelOrder.m1⟩✓" in rendered_traces


def test_broker_system_cancellations():
    result = enumerate_traces(load("broker.ccsp"), "System")
    assert result.exhaustive
    assert len(result.traces) > 0
    rejected = accepted = 0
    cancels = {"CancelOrder", "CancelLoan", "Cancel"}
    for tr in result.traces:
        events = tr.events
        ack = _index(events, "Ack", ("Reject",))
        m = events[_index(events, "Order")].payload
        if ack >= 0:
            rejected += 1
            after = events[ack + 1:]
            assert t.Event("CancelOrder", m) in after
            loan = _index(events, "ReqLoan")
            if loan >= 0:
                assert t.Event("CancelLoan", events[loan].payload) in after
            placed = _index(events, "PlaceOrder")
            if placed >= 0:
                assert t.Event("Cancel", events[placed].payload) in after
        if _index(events, "Ack", ("Accept",)) >= 0 and _index(events, "Reply", ("Accept",)) >= 0:
            accepted += 1
            assert not any(e.channel in cancels for e in events)
    assert rejected and accepted


# -- reports -------------------------------------------------------------------------------


def test_reports_validate_against_schema():
    schema = reports.load_schema()
    model = load("supplier.ccsp")
    documents = [
        reports.run_report(enumerate_traces(model, "System")),
        reports.compare_report(check_equivalence(EMPTY, "A ; B", EMPTY, "B ; A")),
        reports.compare_report(check_equivalence(EMPTY, "(A)", EMPTY, "A ; SKIP")),
        reports.law_report([check_law("seq-unit", 10, 1)], 1, 10),
        reports.consistency_report(check_compensation_consistency(EMPTY, "tx{(A%A2);THROWW}")),
        reports.translate_report("P = a\n", "out.ccsp", [("a", "A")], ["w"]),
    ]
    for doc in documents:
        jsonschema.validate(json.loads(reports.dumps(doc)), schema)


def test_report_has_no_timing():
    text = reports.dumps(reports.run_report(enumerate_traces(EMPTY, "A ; B")))
    assert not re.search(r"elapsed|time", text)
