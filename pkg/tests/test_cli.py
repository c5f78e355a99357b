import json
import shutil
import subprocess

import pytest

from conftest import FIXTURES
from ccsp.cli import main
from ccsp.dsl import parse_model

F = str(FIXTURES)


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_run_supplier_system(capsys):
    code, out, err = run(capsys, "run", f"{F}/supplier.ccsp", "--entry", "System")
    assert code == 0
    assert "⟨Order.m1,RFQ.m1," in out
    assert out.strip().endswith("-- 24 trace(s)")
    assert err == ""


def test_run_defaults_to_system(capsys):
    assert run(capsys, "run", f"{F}/supplier.ccsp")[1] == run(capsys, "run", f"{F}/supplier.ccsp", "--entry", "System")[1]


def test_run_missing_file(capsys):
    code, out, err = run(capsys, "run", "missing.ccsp")
    assert code == 1
    assert "file not found" in err
    assert out == ""


def test_run_undefined_entry(capsys):
    code, _, err = run(capsys, "run", f"{F}/supplier.ccsp", "--entry", "Nope")
    assert code == 2
    assert "undefined entry" in err


def test_run_parse_error(capsys, tmp_path):
    bad = tmp_path / "bad.ccsp"
    bad.write_text("P = A ;\n")
    code, _, err = run(capsys, "run", str(bad))
    assert code == 1
    assert f"{bad}:2:1: error:" in err


def test_run_semantic_error_in_file(capsys, tmp_path):
    bad = tmp_path / "bad.ccsp"
    bad.write_text("P = Q\n")
    code, _, err = run(capsys, "run", str(bad))
    assert code == 1
    assert "undefined name Q" in err


def test_run_with_arguments(capsys):
    code, out, _ = run(capsys, "run", f"{F}/loanstar.ccsp", "--entry", "FirstRate", "--args", "5000")
    assert code == 0
    assert "⟨Assess.5000,Ok,Reply.Accept⟩✓" in out


def test_run_bad_arguments(capsys):
    code, _, err = run(capsys, "run", f"{F}/loanstar.ccsp", "--entry", "FirstRate")
    assert code == 2


def test_run_truncated(capsys):
    code, out, _ = run(capsys, "run", f"{F}/broker.ccsp", "--max-traces", "5")
    assert code == 3
    assert "truncated at max_traces=5" in out


def test_run_json_and_output_file(capsys, tmp_path):
    target = tmp_path / "r.json"
    code, out, _ = run(capsys, "run", f"{F}/loanstar.ccsp", "--entry", "LoanService", "--format", "json", "-o", str(target))
    assert code == 0 and out == ""
    doc = json.loads(target.read_text())
    assert doc["stats"]["traces"] == 5 and doc["exhaustive"]


def test_run_color(capsys, monkeypatch):
    monkeypatch.setenv("CCSP_COLOR", "1")
    _, out, _ = run(capsys, "run", f"{F}/loanstar.ccsp", "--entry", "LoanService")
    assert "\x1b[32m✓\x1b[0m" in out
    monkeypatch.setenv("CCSP_COLOR", "0")
    _, out, _ = run(capsys, "run", f"{F}/loanstar.ccsp", "--entry", "LoanService")
    assert "\x1b[" not in out


@pytest.mark.parametrize(
    "argv",
    [
        ["run", "missing.ccsp", "--max-events", "0"],
        ["run", "missing.ccsp", "--max-traces", "x"],
        ["run", "missing.ccsp", "--format", "xml"],
        ["check", "--samples", "-1"],
    ],
)
def test_invalid_flags_rejected_before_reading(capsys, argv):
    with pytest.raises(SystemExit) as info:
        main(argv)
    assert info.value.code == 2
    assert "file not found" not in capsys.readouterr().err


def test_translate_writes_reparseable_model(capsys, tmp_path):
    out_file = tmp_path / "out.ccsp"
    code, out, _ = run(capsys, "translate", f"{F}/loanstar.bpel", "-o", str(out_file))
    assert code == 0
    model = parse_model(out_file.read_text())
    assert "LoanStar" in model.definitions
    assert "receive_Loan_Req_Amt  receive_Loan_Req_Amt" in out


def test_translate_with_aliases_to_stdout(capsys):
    code, out, err = run(capsys, "translate", f"{F}/supplier.bpel", "--aliases", f"{F}/supplier.aliases")
    assert code == 0
    assert out.startswith("Supplier = tx{")
    assert "invoke_RFQ_Dealer_orderReq  RFQ" in err


def test_translate_json_carries_model(capsys):
    code, out, err = run(capsys, "translate", f"{F}/broker.bpel", "--format", "json")
    assert code == 0 and err == ""
    doc = json.loads(out)
    assert doc["output"] is None
    assert list(parse_model(doc["model"]).definitions) == ["CarBroker"]


def test_translate_unsupported_element(capsys, tmp_path):
    doc = tmp_path / "w.bpel"
    doc.write_text("<process name='x'><while/></process>")
    code, _, err = run(capsys, "translate", str(doc))
    assert code == 2
    assert "<while>" in err


def test_translate_malformed(capsys, tmp_path):
    doc = tmp_path / "m.bpel"
    doc.write_text("<process>")
    assert run(capsys, "translate", str(doc))[0] == 1


def test_translate_unknown_alias_warns(capsys, tmp_path):
    table = tmp_path / "a.aliases"
    table.write_text("no_such_name X\n")
    code, _, err = run(capsys, "translate", f"{F}/loanstar.bpel", "--aliases", str(table), "-o", str(tmp_path / "o.ccsp"))
    assert code == 0
    assert "warning: alias for unknown default name no_such_name" in err


def test_compare_bpel_against_listing(capsys):
    code, out, _ = run(capsys, "compare", f"{F}/supplier.bpel", f"{F}/supplier_listing.ccsp",
                       "--aliases", f"{F}/supplier.aliases")
    assert code == 0
    assert out == "equal\n"


def test_compare_unequal(capsys, tmp_path):
    model = tmp_path / "ab.ccsp"
    model.write_text("P = A ; B\nQ = B ; A\n")
    code, out, _ = run(capsys, "compare", f"{model}:P", f"{model}:Q")
    assert code == 4
    assert "⟨A,B⟩✓" in out


def test_compare_expression_entries(capsys, tmp_path):
    model = tmp_path / "s.ccsp"
    model.write_text("set S = {1, 2}\nP = SKIP\n")
    code, _, _ = run(capsys, "compare", f"{model}:c?x:S ; d.x", f"{model}:c.1 ; d.1 [] c.2 ; d.2")
    assert code == 0


def test_compare_up_to_bound(capsys):
    code, out, _ = run(capsys, "compare", f"{F}/broker.ccsp", f"{F}/broker.ccsp", "--max-traces", "10")
    assert code == 3
    assert out == "equal up to bound\n"


def test_check_laws(capsys):
    code, out, _ = run(capsys, "check", "--laws", "all", "--samples", "200", "--seed", "42")
    assert code == 0
    assert out.count("pass ") == 9


def test_check_selected_laws(capsys):
    code, out, _ = run(capsys, "check", "--law", "seq-unit,comm-par", "--samples", "5")
    assert code == 0
    assert out.count("pass ") == 2


def test_check_unknown_law(capsys):
    code, _, err = run(capsys, "check", "--law", "no-such")
    assert code == 2
    assert "unknown law no-such" in err


def test_check_failing_law(capsys):
    from ccsp.semantics import mutated

    with mutated("choice-left-only"):
        code, out, _ = run(capsys, "check", "--law", "choice-union", "--samples", "50")
    assert code == 4
    assert "counterexample: traces(" in out


def test_check_compensation(capsys):
    code, out, _ = run(capsys, "check", "--compensation", f"{F}/broker.ccsp", "--entry", "System")
    assert code == 0
    assert out.startswith("consistent:")


def test_json_is_byte_identical(capsys):
    argv = ["check", "--laws", "all", "--samples", "30", "--seed", "9", "--format", "json"]
    first = run(capsys, *argv)[1]
    assert first == run(capsys, *argv)[1]
    assert json.loads(first)["passed"]


@pytest.mark.skipif(shutil.which("ccsp") is None, reason="console script not installed")
def test_console_script():
    out = subprocess.run(["ccsp", "run", f"{F}/loanstar.ccsp", "--entry", "LoanService"], capture_output=True, text=True)
    assert out.returncode == 0
    assert "-- 5 trace(s)" in out.stdout
