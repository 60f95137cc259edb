import json

import pytest

from filter_verifier.cli import main, run
from filter_verifier.core.fixedpoint import OverflowMode
from filter_verifier.io.job import Pass, job_from_fixture, parse_job_document
from filter_verifier.io.report import Outcome, validate_report


def write_job(tmp_path, **sections):
    doc = {
        "schema_version": 1,
        "filter": {"b": [0.5, 0.5]},
        "spec": {"kind": "lowpass", "wp_hz": 1000, "ap_db": -1, "wr_hz": 23900, "ar_db": -20,
                 "phase_threshold_rad": 0.1},
        "fixedpoint": {"format": "1,5"},
    }
    doc.update(sections)
    path = tmp_path / "job.json"
    path.write_text(json.dumps(doc), encoding="utf-8")
    return path


def test_passing_job(tmp_path, capsys):
    assert main(["verify", "--job", str(write_job(tmp_path))]) == 0
    out = capsys.readouterr().out
    assert "stability  stable" in out
    assert out.strip().endswith("exit code 0")


def test_overflow_violation_exits_one(tmp_path, capsys):
    path = write_job(tmp_path, filter={"b": [1.0, 1.0]},
                     spec={"kind": "lowpass", "wp_hz": 1000, "ap_db": -1})
    assert main(["verify", "--job", str(path), "--json"]) == 1
    doc = json.loads(capsys.readouterr().out)
    assert validate_report(doc) == []
    overflow = doc["passes"][-1]
    assert overflow["status"] == "F"
    assert overflow["counterexample"]["inputs_raw"] == [-64, -64]


def test_missing_job_file_exits_two(tmp_path, capsys):
    assert main(["verify", "--job", str(tmp_path / "nope.json")]) == 2
    assert "file not found" in capsys.readouterr().err


def test_bad_job_exits_two(tmp_path, capsys):
    path = write_job(tmp_path, fixedpoint={"format": "1;5"})
    assert main(["verify", "--job", str(path)]) == 2
    assert "fixedpoint.format" in capsys.readouterr().err


def test_unrepresentable_coefficient_exits_two(tmp_path, capsys):
    path = write_job(tmp_path, filter={"b": [3.0]})
    assert main(["verify", "--job", str(path)]) == 2
    assert "b[0]" in capsys.readouterr().err


def test_bad_flags_exit_two(capsys):
    with pytest.raises(SystemExit) as info:
        main(["verify", "--fixture", "ilp2", "--strategy", "smt"])
    assert info.value.code == 2
    assert main(["verify", "--fixture", "ilp2", "--format", "x"]) == 2


def test_fixtures_listing(capsys):
    assert main(["fixtures"]) == 0
    out = capsys.readouterr().out
    for name in ("ilp2", "ihp2", "ilp8", "fbp"):
        assert name in out


def test_marginal_fixture_gates_response_passes(capsys):
    assert main(["verify", "--fixture", "ilp2EST", "--passes", "stability,magnitude,phase", "--json"]) == 3
    doc = json.loads(capsys.readouterr().out)
    outcomes = {p["pass"]: p["outcome"] for p in doc["passes"]}
    assert outcomes == {"stability": "indeterminate", "magnitude": "skipped", "phase": "skipped"}
    assert doc["passes"][0]["details"]["failed_condition"] == "R1"


def test_unstable_filter_skips_magnitude(tmp_path, capsys):
    path = write_job(tmp_path, filter={"b": [1.0], "a": [1.0, -1.5]},
                     verification={"passes": ["magnitude", "stability"]})
    assert main(["verify", "--job", str(path), "--json"]) == 1
    doc = json.loads(capsys.readouterr().out)
    stability, magnitude = doc["passes"]
    assert (stability["pass"], stability["status"]) == ("stability", "unstable")
    assert magnitude["outcome"] == "skipped"
    assert "unstable" in magnitude["reason"]


def test_phase_skipped_without_threshold():
    job = job_from_fixture("fma4", {"passes": (Pass.PHASE,)})
    result = run(job).result(Pass.PHASE)
    assert result.outcome is Outcome.SKIPPED


def test_truncation_reports_error_with_hint():
    doc = {
        "filter": {"b": [1e-4], "a": [1.0, -1.98, 0.9802]},
        "spec": {"kind": "lowpass", "wp_hz": 10, "ap_db": -1},
        "fixedpoint": {"format": "2,14"},
        "verification": {"passes": ["magnitude"], "grid": 64},
    }
    report = run(parse_job_document(doc))
    result = report.result(Pass.MAGNITUDE)
    assert result.outcome is Outcome.ERROR
    assert "--grid" in result.reason
    assert report.exit_code == 2


def test_saturate_mode_replays_counterexample():
    job = job_from_fixture("ihp2", {"passes": (Pass.OVERFLOW,), "overflow_mode": OverflowMode.SATURATE})
    result = run(job).result(Pass.OVERFLOW)
    assert result.status == "F"
    assert result.details["replay"]["mode"] == "saturate"
    assert result.details["replay"]["events"] >= 1


def test_outputs_written(tmp_path, capsys):
    csv, report, data = tmp_path / "r.csv", tmp_path / "out" / "r.json", tmp_path / "r.npz"
    code = main(["verify", "--fixture", "ilp2", "--grid", "256", "--emit-csv", str(csv),
                 "--report", str(report), "--emit-data", str(data)])
    assert code in (0, 1)
    assert len(csv.read_text().splitlines()) == 256 // 2 + 2
    assert validate_report(json.loads(report.read_text())) == []
    assert data.exists()


def test_same_seed_same_report(tmp_path):
    paths = [tmp_path / "a.json", tmp_path / "b.json"]
    for path in paths:
        main(["verify", "--fixture", "ihp2", "--seed", "0x2A", "--report", str(path)])
    first, second = (json.loads(p.read_text()) for p in paths)
    first.pop("timing"), second.pop("timing")
    assert first == second
    assert first["config"]["seed"] == 42
