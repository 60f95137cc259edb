import json

import pytest

from filter_verifier.io.job import Pass
from filter_verifier.io.report import ExitCode, Outcome, PassResult, Report, validate_report

WITNESS = {"k": 3, "omega": 0.29, "observed": -6.0, "bound": -1.0, "band": "passband"}
COUNTEREXAMPLE = {"inputs": ["63/32", "63/32"], "inputs_raw": [63, 63], "step": 1, "site": "output",
                  "term": None, "wide_value": "63/16", "wide_raw": 126, "bound": "v_max"}


def report(*results):
    return Report({"source": "test", "format": "1,5"}, list(results))


@pytest.mark.parametrize("outcomes, code", [
    ([Outcome.PASS, Outcome.PASS], ExitCode.OK),
    ([Outcome.PASS, Outcome.SKIPPED], ExitCode.OK),
    ([Outcome.INDETERMINATE, Outcome.PASS], ExitCode.INDETERMINATE),
    ([Outcome.INDETERMINATE, Outcome.ERROR], ExitCode.USAGE),
    ([Outcome.ERROR, Outcome.VIOLATION], ExitCode.VIOLATION),
    ([], ExitCode.OK),
])
def test_exit_code_precedence(outcomes, code):
    passes = list(Pass)
    assert report(*(PassResult(passes[i], o) for i, o in enumerate(outcomes))).exit_code == code


def test_report_document_validates():
    r = report(
        PassResult(Pass.STABILITY, Outcome.PASS, "stable", details={"max_root": 0.4}),
        PassResult(Pass.MAGNITUDE, Outcome.VIOLATION, "FP", witness=WITNESS),
        PassResult(Pass.PHASE, Outcome.SKIPPED, reason="spec has no phase threshold"),
        PassResult(Pass.OVERFLOW, Outcome.VIOLATION, "F", counterexample=COUNTEREXAMPLE),
    )
    doc = json.loads(r.to_json())
    assert validate_report(doc) == []
    assert doc["summary"] == {"exit_code": 1, "violations": ["magnitude", "overflow"], "indeterminate": []}
    assert doc["passes"][2]["status"] is None
    assert set(doc["timing"]) == {"stability", "magnitude", "phase", "overflow"}


def test_report_without_timing_is_stable():
    r = report(PassResult(Pass.STABILITY, Outcome.PASS, "stable", seconds=0.25))
    assert "timing" not in r.to_dict(include_timing=False)
    assert r.to_json(include_timing=False) == r.to_json(include_timing=False)
    assert r.to_json().endswith("\n")


@pytest.mark.parametrize("mutate, problem", [
    (lambda d: d.update(schema_version=3), "schema_version"),
    (lambda d: d.pop("summary"), "missing key: summary"),
    (lambda d: d["passes"][0].update(status="ok"), "passes[0].status"),
    (lambda d: d["passes"][0].update(outcome="maybe"), "passes[0].outcome"),
    (lambda d: d["passes"][1].pop("witness"), "passes[1].witness"),
    (lambda d: d["passes"][1].update(status="F"), "passes[1].status"),
    (lambda d: d["passes"][2].pop("counterexample"), "passes[2].counterexample"),
    (lambda d: d["passes"][2].update(**{"pass": "timing"}), "passes[2].pass"),
    (lambda d: d["summary"].update(exit_code=7), "summary.exit_code"),
])
def test_validate_report_flags_problems(mutate, problem):
    doc = report(
        PassResult(Pass.STABILITY, Outcome.PASS, "stable"),
        PassResult(Pass.MAGNITUDE, Outcome.VIOLATION, "FS", witness=WITNESS),
        PassResult(Pass.OVERFLOW, Outcome.VIOLATION, "F", counterexample=COUNTEREXAMPLE),
    ).to_dict()
    mutate(doc)
    problems = validate_report(doc)
    assert any(p.startswith(problem) for p in problems), problems


def test_status_vocabulary_is_closed():
    doc = report(PassResult(Pass.PHASE, Outcome.VIOLATION, "FP", witness=WITNESS)).to_dict()
    assert validate_report(doc) == ["passes[0].status: 'FP' is not valid for the phase pass"]


def test_summary_lines():
    lines = report(
        PassResult(Pass.MAGNITUDE, Outcome.VIOLATION, "FP", witness=WITNESS),
        PassResult(Pass.OVERFLOW, Outcome.VIOLATION, "F", counterexample=COUNTEREXAMPLE),
    ).summary_lines()
    assert lines[0] == "filter_verifier: test at <1,5>"
    assert "passband bin 3" in lines[1]
    assert "step 1 at output: 63/16 beyond v_max" in lines[2]
    assert lines[-1] == "exit code 1"
