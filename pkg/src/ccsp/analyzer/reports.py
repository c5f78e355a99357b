"""JSON reports.

Reports contain no timings or paths that vary between runs, and are dumped
with sorted keys, so identical invocations give byte-identical output.
"""

from __future__ import annotations

import json

from .. import terms as t
from .consistency import ConsistencyReport
from .core import EnumerationResult, EquivalenceVerdict
from .laws import LawReport

SCHEMA_VERSION = 1


def _trace(trace: t.CompletedTrace | None):
    return None if trace is None else trace.to_json()


def _enumeration(result: EnumerationResult) -> dict:
    return {
        "entry": result.entry,
        "exhaustive": result.exhaustive,
        "truncations": list(result.truncations),
        "stats": result.stats,
    }


def run_report(result: EnumerationResult) -> dict:
    return {
        "version": SCHEMA_VERSION,
        "command": "run",
        **_enumeration(result),
        "traces": [tr.to_json() for tr in result.traces],
    }


def compare_report(verdict: EquivalenceVerdict) -> dict:
    witness = None
    if verdict.counterexample is not None:
        witness = {**_trace(verdict.counterexample), "side": verdict.side}
    return {
        "version": SCHEMA_VERSION,
        "command": "compare",
        "equal": verdict.equal,
        "up_to_bound": verdict.up_to_bound,
        "counterexample": witness,
        "first": _enumeration(verdict.first),
        "second": _enumeration(verdict.second),
    }


def law_report(reports: list[LawReport], seed: int, samples: int) -> dict:
    return {
        "version": SCHEMA_VERSION,
        "command": "check",
        "kind": "laws",
        "seed": seed,
        "samples": samples,
        "passed": all(r.passed for r in reports),
        "laws": [
            {
                "law": r.law,
                "passed": r.passed,
                "instances": r.instances,
                "skipped": r.skipped,
                "counterexample": r.counterexample,
            }
            for r in reports
        ],
    }


def consistency_report(report: ConsistencyReport) -> dict:
    return {
        "version": SCHEMA_VERSION,
        "command": "check",
        "kind": "compensation",
        "entry": report.entry,
        "passed": report.consistent,
        "observations": report.observations,
        "exhaustive": report.exhaustive,
        "failures": list(report.failures),
    }


def translate_report(model: str, output: str | None, naming: list, warnings: list) -> dict:
    return {
        "version": SCHEMA_VERSION,
        "command": "translate",
        "model": model,
        "output": output,
        "naming": [{"default": d, "event": e} for d, e in naming],
        "warnings": list(warnings),
    }


def dumps(report: dict) -> str:
    return json.dumps(report, sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def load_schema() -> dict:
    from importlib import resources

    text = resources.files("ccsp").joinpath("schemas/report.schema.json").read_text("utf-8")
    return json.loads(text)
