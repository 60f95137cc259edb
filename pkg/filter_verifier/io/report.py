"""
Verification reports: per-pass outcomes, counterexamples and an echo of the
job configuration, serialized as JSON with a versioned schema.
"""
import json
from dataclasses import dataclass, field
from enum import Enum
from typing import Any

from .job import SCHEMA_VERSION, Pass

TOOL_NAME = "filter_verifier"


class Outcome(str, Enum):
    PASS = "pass"
    VIOLATION = "violation"
    SKIPPED = "skipped"
    INDETERMINATE = "indeterminate"
    ERROR = "error"


STATUS_VOCABULARY = {
    Pass.STABILITY.value: {"stable", "unstable", "marginal"},
    Pass.MAGNITUDE.value: {"S", "FP", "FS", "FC"},
    Pass.PHASE.value: {"S", "F"},
    Pass.OVERFLOW.value: {"S", "F"},
}


class ExitCode:
    OK = 0
    VIOLATION = 1
    USAGE = 2
    INDETERMINATE = 3


@dataclass
class PassResult:
    name: Pass
    outcome: Outcome
    status: str | None = None
    reason: str | None = None
    details: dict[str, Any] = field(default_factory=dict)
    witness: dict[str, Any] | None = None
    counterexample: dict[str, Any] | None = None
    seconds: float = 0.0

    def to_dict(self) -> dict[str, Any]:
        out: dict[str, Any] = {
            "pass": self.name.value,
            "outcome": self.outcome.value,
            "status": self.status,
        }
        if self.reason is not None:
            out["reason"] = self.reason
        if self.details:
            out["details"] = self.details
        if self.witness is not None:
            out["witness"] = self.witness
        if self.counterexample is not None:
            out["counterexample"] = self.counterexample
        return out


@dataclass
class Report:
    config: dict[str, Any]
    results: list[PassResult] = field(default_factory=list)

    def add(self, result: PassResult) -> PassResult:
        self.results.append(result)
        return result

    def result(self, name: Pass) -> PassResult | None:
        return next((r for r in self.results if r.name is name), None)

    @property
    def exit_code(self) -> int:
        """
        A definite violation outranks errors, which outrank indeterminate verdicts.
        """
        outcomes = {r.outcome for r in self.results}
        if Outcome.VIOLATION in outcomes:
            return ExitCode.VIOLATION
        if Outcome.ERROR in outcomes:
            return ExitCode.USAGE
        if Outcome.INDETERMINATE in outcomes:
            return ExitCode.INDETERMINATE
        return ExitCode.OK

    def to_dict(self, include_timing: bool = True) -> dict[str, Any]:
        doc: dict[str, Any] = {
            "schema_version": SCHEMA_VERSION,
            "tool": TOOL_NAME,
            "config": self.config,
            "passes": [r.to_dict() for r in self.results],
            "summary": {
                "exit_code": self.exit_code,
                "violations": [r.name.value for r in self.results if r.outcome is Outcome.VIOLATION],
                "indeterminate": [r.name.value for r in self.results if r.outcome is Outcome.INDETERMINATE],
            },
        }
        if include_timing:
            doc["timing"] = {r.name.value: round(r.seconds, 6) for r in self.results}
        return doc

    def to_json(self, include_timing: bool = True) -> str:
        return json.dumps(self.to_dict(include_timing), indent=2, sort_keys=True) + "\n"

    def summary_lines(self) -> list[str]:
        lines = [f"filter_verifier: {self.config.get('source', '')} at <{self.config.get('format', '?')}>"]
        for r in self.results:
            text = f"  {r.name.value:<10} {r.status or r.outcome.value:<9}"
            if r.witness:
                w = r.witness
                text += f" {w['band']} bin {w['k']} (w={w['omega']:.4f}): {w['observed']:.6g} vs {w['bound']:.6g}"
            if r.counterexample:
                c = r.counterexample
                site = c["site"] if c["term"] is None else f"{c['site']}[{c['term']}]"
                text += f" step {c['step']} at {site}: {c['wide_value']} beyond {c['bound']}, inputs {c['inputs']}"
            if r.reason:
                text += f" ({r.reason})"
            text += f"  [{r.seconds:.3f}s]"
            lines.append(text)
        lines.append(f"exit code {self.exit_code}")
        return lines


def validate_report(doc: Any) -> list[str]:
    """
    Check a report document against the published schema. Returns the list
    of problems found, empty when the document conforms.
    """
    problems: list[str] = []
    if not isinstance(doc, dict):
        return ["report must be a JSON object"]
    if doc.get("schema_version") != SCHEMA_VERSION:
        problems.append(f"schema_version must be {SCHEMA_VERSION}")
    for key in ("tool", "config", "passes", "summary"):
        if key not in doc:
            problems.append(f"missing key: {key}")
    if problems:
        return problems

    if not isinstance(doc["passes"], list):
        return ["passes must be a list"]
    outcomes = {o.value for o in Outcome}
    for i, entry in enumerate(doc["passes"]):
        where = f"passes[{i}]"
        name = entry.get("pass")
        if name not in STATUS_VOCABULARY:
            problems.append(f"{where}.pass: unknown pass {name!r}")
            continue
        if entry.get("outcome") not in outcomes:
            problems.append(f"{where}.outcome: {entry.get('outcome')!r} is not one of {sorted(outcomes)}")
        status = entry.get("status")
        if status is not None and status not in STATUS_VOCABULARY[name]:
            problems.append(f"{where}.status: {status!r} is not valid for the {name} pass")
        if entry.get("outcome") in ("pass", "violation") and status is None:
            problems.append(f"{where}.status: required for a decided pass")
        if status in ("FP", "FS", "FC") or (name == Pass.PHASE.value and status == "F"):
            witness = entry.get("witness")
            if not isinstance(witness, dict) or not {"k", "omega", "observed", "bound", "band"} <= witness.keys():
                problems.append(f"{where}.witness: a failing {name} verdict needs a witness")
        if name == Pass.OVERFLOW.value and status == "F":
            cex = entry.get("counterexample")
            if not isinstance(cex, dict) or not {"inputs", "inputs_raw", "step", "site", "wide_value", "bound"} <= cex.keys():
                problems.append(f"{where}.counterexample: a failing overflow verdict needs a counterexample")

    summary = doc["summary"]
    if not isinstance(summary, dict) or summary.get("exit_code") not in (0, 1, 2, 3):
        problems.append("summary.exit_code must be one of 0, 1, 2, 3")
    return problems
