"""
End-to-end behavior over the bundled fixtures and small exhaustive filter families.
"""
import itertools
import json

import pytest
from hypothesis import given, settings, strategies as st

from filter_verifier.cli import run
from filter_verifier.core.filtermodel import TransferFunction, quantize_filter
from filter_verifier.core.fixedpoint import FixedFormat, OverflowMode
from filter_verifier.core.fixtures import fixture_names, get_fixture
from filter_verifier.core.overflow import (OverflowCounterexample, SearchStrategy, search_overflow, simulate_fixed,
                                           worst_case_fir)
from filter_verifier.core.response import MagnitudeStatus, check_magnitude, response_of
from filter_verifier.io.job import job_from_fixture
from filter_verifier.io.report import STATUS_VOCABULARY, validate_report

Q13 = FixedFormat(1, 3)
Q15 = FixedFormat(1, 5)
HORIZON = 4


@pytest.mark.parametrize("n_taps", [1, 2, 3])
def test_overflow_search_complete_on_every_small_fir(n_taps):
    raws = range(Q13.raw_min, Q13.raw_max + 1)
    for taps in itertools.product(raws, repeat=n_taps):
        qf = quantize_filter(TransferFunction([r / Q13.scale for r in taps]), Q13)
        assert qf.b_raw == taps
        verdict = search_overflow(qf, HORIZON, SearchStrategy.EXHAUSTIVE)
        # Violations are monotone in the horizon: one within k steps exists
        # exactly when the earliest one lies before step k
        first = verdict.counterexample.step if verdict.violated else HORIZON
        for k in range(1, HORIZON + 1):
            assert (first < k) == worst_case_fir(qf, k).overflow, (taps, k)
        if verdict.violated:
            cex = verdict.counterexample
            again = simulate_fixed(qf, cex.inputs, OverflowMode.DETECT)
            assert (again.step, again.site, again.wide_raw) == (cex.step, cex.site, cex.wide_raw)


@settings(max_examples=100, deadline=None)
@given(st.lists(st.integers(-64, 63), min_size=1, max_size=6))
def test_gain_above_unity_overflows(raws):
    qf = quantize_filter(TransferFunction([r / Q15.scale for r in raws]), Q15)
    if sum(abs(r) for r in raws) > Q15.scale:
        verdict = search_overflow(qf, len(raws), SearchStrategy.ANALYTIC_FIR)
        assert verdict.violated
        assert isinstance(simulate_fixed(qf, verdict.counterexample.inputs), OverflowCounterexample)


@pytest.mark.parametrize("name", [n for n in fixture_names() if get_fixture(n).tf.is_fir])
def test_fir_fixtures_strategies_agree(name):
    fixture = get_fixture(name)
    qf = quantize_filter(fixture.tf, fixture.fmt)
    exhaustive = search_overflow(qf, 3, SearchStrategy.EXHAUSTIVE)
    analytic = search_overflow(qf, 3, SearchStrategy.ANALYTIC_FIR)
    assert exhaustive.violated == analytic.violated
    if exhaustive.violated:
        assert exhaustive.counterexample.step <= analytic.counterexample.step


def test_short_word_length_breaks_high_order_lowpass():
    fixture = get_fixture("ilp8")
    ideal = check_magnitude(response_of(fixture.tf, 1024), fixture.spec)
    assert ideal.passed

    coarse = quantize_filter(fixture.tf, fixture.fmt)
    assert fixture.fmt.frac_bits == 6
    verdict = check_magnitude(response_of(coarse, 1024), fixture.spec)
    assert verdict.status is not MagnitudeStatus.S
    assert verdict.witness is not None

    fine = quantize_filter(fixture.tf, FixedFormat(4, 16))
    assert check_magnitude(response_of(fine, 1024), fixture.spec).status is MagnitudeStatus.S


def full_matrix_reports():
    return [run(job_from_fixture(name, {"seed": 0x5EED})) for name in fixture_names()]


def test_reports_use_the_status_vocabulary():
    for report in full_matrix_reports():
        doc = json.loads(report.to_json())
        assert validate_report(doc) == [], doc["config"]["source"]
        for entry in doc["passes"]:
            if entry["status"] is not None:
                assert entry["status"] in STATUS_VOCABULARY[entry["pass"]]
            if entry["pass"] in ("magnitude", "phase") and entry["status"] not in (None, "S"):
                assert entry["witness"]["k"] >= 0


def test_fixture_matrix_is_deterministic():
    first = [r.to_json(include_timing=False) for r in full_matrix_reports()]
    second = [r.to_json(include_timing=False) for r in full_matrix_reports()]
    assert first == second
