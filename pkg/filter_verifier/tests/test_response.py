import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from filter_verifier.core.designers import design_butterworth2
from filter_verifier.core.filtermodel import TransferFunction, quantize_filter
from filter_verifier.core.fixedpoint import FixedFormat
from filter_verifier.core.fixtures import fixture_names, get_fixture
from filter_verifier.core.response import (BandKind, FilterSpecBand, FrequencyResponse, MagnitudeStatus,
                                           PhaseStatus, ResponseMethod, check_magnitude, check_magnitude_bp,
                                           check_magnitude_hp, check_magnitude_lp, check_phase, confirm_witness,
                                           db_to_lin, lin_to_db, response_of, sampled_dtft)
from filter_verifier.errors import GridError, SpecError, TruncationError

FS = 48000.0


def flat(n=64, gain=1.0):
    return FrequencyResponse(np.full(n, gain, dtype=complex))


def test_dtft_of_impulse_is_flat():
    resp = sampled_dtft([1.0], 16)
    np.testing.assert_allclose(resp.values, np.ones(16))


def test_dtft_of_two_tap_average():
    resp = sampled_dtft([0.5, 0.5], 4)
    np.testing.assert_allclose(resp.values, [1.0, 0.5 - 0.5j, 0.0, 0.5 + 0.5j], atol=1e-15)


def test_dtft_rejects_long_response():
    with pytest.raises(GridError):
        sampled_dtft(np.ones(20), 16)


@settings(max_examples=50)
@given(st.lists(st.floats(-10, 10, allow_nan=False), min_size=1, max_size=32))
def test_dtft_fft_matches_direct_sum(h):
    fast = sampled_dtft(h, 32)
    direct = sampled_dtft(h, 32, direct=True)
    np.testing.assert_allclose(fast.values, direct.values, atol=1e-9)


@settings(max_examples=50)
@given(st.lists(st.floats(-10, 10, allow_nan=False), min_size=1, max_size=64))
def test_dtft_symmetry_and_parseval(h):
    n = 64
    resp = sampled_dtft(h, n)
    k = np.arange(1, n)
    np.testing.assert_allclose(resp.values[n - k], np.conj(resp.values[k]), atol=1e-9)
    energy = float(np.sum(np.square(h)))
    assert np.sum(resp.magnitude ** 2) / n == pytest.approx(energy, rel=1e-6, abs=1e-9)


@given(st.lists(st.floats(-1, 1, allow_nan=False), min_size=1, max_size=16),
       st.lists(st.floats(-1, 1, allow_nan=False), min_size=1, max_size=16),
       st.floats(-4, 4, allow_nan=False))
def test_dtft_linear(x, y, alpha):
    x = np.pad(x, (0, 16 - len(x)))
    y = np.pad(y, (0, 16 - len(y)))
    lhs = sampled_dtft(alpha * x + y, 16).values
    rhs = alpha * sampled_dtft(x, 16).values + sampled_dtft(y, 16).values
    np.testing.assert_allclose(lhs, rhs, atol=1e-9)


@pytest.mark.parametrize("name", [n for n in fixture_names() if n != "ilp2EST"])
def test_truncation_agrees_with_rational_eval(name):
    fixture = get_fixture(name)
    a = response_of(fixture.tf, 1024)
    b = response_of(fixture.tf, 1024, ResponseMethod.RATIONAL_EVAL)
    np.testing.assert_allclose(a.values, b.values, atol=1e-4)


def test_truncation_detects_slow_decay():
    tf = design_butterworth2('lowpass', 20.0, FS)
    with pytest.raises(TruncationError) as info:
        response_of(tf, 64)
    assert info.value.suggested_n > 64


def test_fixed_response_source():
    qf = quantize_filter(TransferFunction((0.5, 0.5)), FixedFormat(1, 5))
    assert response_of(qf, 16).source == 'fixed'


def test_spec_from_hz():
    spec = FilterSpecBand.from_hz('lowpass', FS, wp_hz=4800, ap_db=-1, wr_hz=19200, ar_db=-20)
    assert spec.wp == pytest.approx(0.2 * math.pi)
    assert spec.wr == pytest.approx(0.8 * math.pi)


@pytest.mark.parametrize("kwargs", [
    dict(kind='lowpass', wp=0.5, ap_db=-80.0, wr=1.0, ar_db=-1.0),     # Ap <= Ar
    dict(kind='lowpass', wp=1.0, ap_db=-1.0, wr=0.5, ar_db=-20.0),     # edges swapped
    dict(kind='highpass', wp=0.5, ap_db=-1.0, wr=1.0, ar_db=-20.0),
    dict(kind='lowpass', wp=4.0, ap_db=-1.0),                          # beyond pi
    dict(kind='lowpass', wp=0.5),                                      # gain missing
    dict(kind='bandpass', wp=(1.0, 2.0), ap_db=-1.0, wr=(1.5, 2.5), ar_db=-20.0),
    dict(kind='lowpass', wp=0.5, ap_db=-1.0, phase_threshold=0.0),
])
def test_spec_rejects_inconsistent(kwargs):
    with pytest.raises(SpecError):
        FilterSpecBand(**kwargs)


def test_lp_passband_violation_has_witness():
    values = np.ones(64, dtype=complex)
    values[3] = 0.5      # -6 dB
    resp = FrequencyResponse(values)
    spec = FilterSpecBand(BandKind.LOWPASS, wp=0.5, ap_db=-1.0, wr=2.5, ar_db=-20.0)
    verdict = check_magnitude_lp(resp, spec)
    assert verdict.status is MagnitudeStatus.FP
    assert verdict.witness.k == 3
    assert confirm_witness(resp, verdict)


def test_lp_stopband_violation():
    verdict = check_magnitude_lp(flat(), FilterSpecBand(BandKind.LOWPASS, wp=0.5, ap_db=-1.0, wr=2.5,
                                                       ar_db=-20.0))
    assert verdict.status is MagnitudeStatus.FS
    assert verdict.witness.omega >= 2.5


def test_lp_cutoff_violation():
    spec = FilterSpecBand(BandKind.LOWPASS, wc=1.0, ac_db=-3.0)
    assert check_magnitude_lp(flat(), spec).status is MagnitudeStatus.FC


def test_hp_checks():
    values = np.ones(64, dtype=complex)
    values[:8] = 0.01
    values[-7:] = 0.01
    resp = FrequencyResponse(values)
    spec = FilterSpecBand(BandKind.HIGHPASS, wr=0.5, ar_db=-20.0, wp=1.5, ap_db=-1.0)
    assert check_magnitude_hp(resp, spec).status is MagnitudeStatus.S
    assert check_magnitude_hp(flat(), spec).status is MagnitudeStatus.FS
    assert check_magnitude_hp(flat(gain=0.5), FilterSpecBand(BandKind.HIGHPASS, wc=1.0, ac_db=-3.0)).status \
        is MagnitudeStatus.FC


def test_bp_checks():
    fixture = get_fixture("fbp")
    resp = response_of(fixture.tf, 1024)
    assert check_magnitude_bp(resp, fixture.spec).status is MagnitudeStatus.S
    spec = FilterSpecBand(BandKind.BANDPASS, wp=(1.0, 2.0), ap_db=-1.0, wr=(0.5, 2.5), ar_db=-20.0)
    verdict = check_magnitude_bp(flat(), spec)
    assert verdict.status is MagnitudeStatus.FS
    assert verdict.witness.band == "lower stopband"


def test_check_dispatch_rejects_wrong_kind():
    with pytest.raises(SpecError):
        check_magnitude_hp(flat(), FilterSpecBand(BandKind.LOWPASS, wp=0.5, ap_db=-1.0))


@pytest.mark.parametrize("name", ["ilp2", "ihp2", "flp10Hann", "fma4", "fbp"])
def test_ideal_fixtures_meet_their_specs(name):
    fixture = get_fixture(name)
    verdict = check_magnitude(response_of(fixture.tf, fixture.grid), fixture.spec)
    assert verdict.passed


def test_phase_identical_passes():
    resp = sampled_dtft([0.5, 0.5], 64)
    verdict = check_phase(resp, resp, 0.01)
    assert verdict.status is PhaseStatus.S
    assert verdict.max_delta == 0.0


def test_phase_difference_found():
    ideal = flat()
    fixed = FrequencyResponse(np.exp(1j * np.linspace(0, 1, 64)))
    verdict = check_phase(ideal, fixed, 0.2)
    assert verdict.status is PhaseStatus.F
    assert verdict.witness.observed > 0.2
    assert check_phase(ideal, fixed, 0.2, band=(0.0, 0.5)).status is PhaseStatus.S


def test_phase_wraps_difference():
    ideal = FrequencyResponse(np.full(16, np.exp(1j * (math.pi - 0.01))))
    fixed = FrequencyResponse(np.full(16, np.exp(-1j * (math.pi - 0.01))))
    assert check_phase(ideal, fixed, 0.1).max_delta == pytest.approx(0.02)


def test_phase_grid_mismatch():
    with pytest.raises(GridError):
        check_phase(flat(16), flat(32), 0.1)


def test_phase_of_quantized_response_against_itself_is_zero():
    fixture = get_fixture("ilp2")
    resp = response_of(quantize_filter(fixture.tf, fixture.fmt), 256)
    assert check_phase(resp, resp, 0.01).max_delta == 0.0


def test_phase_difference_of_pi_is_kept():
    ideal = flat(8)
    fixed = flat(8, gain=-1.0)
    assert check_phase(ideal, fixed, 0.1).max_delta == pytest.approx(math.pi)


def test_response_rejects_degenerate_grid():
    with pytest.raises(GridError):
        response_of(TransferFunction((1.0,), (1.0, -0.5)), 1)
    with pytest.raises(GridError):
        response_of(TransferFunction((0.5, 0.5)), 0, ResponseMethod.RATIONAL_EVAL)


@given(st.floats(1e-6, 10.0))
def test_lin_db_round_trip(x):
    assert abs(db_to_lin(lin_to_db(x)) - x) <= 1e-12


@pytest.mark.parametrize("name", [n for n in fixture_names() if n != "ilp2EST"])
def test_magnitude_deviation_shrinks_with_more_bits(name):
    fixture = get_fixture(name)
    ideal = response_of(fixture.tf, 512, ResponseMethod.RATIONAL_EVAL).magnitude
    deviations = []
    for frac_bits in (8, 12, 16, 20):
        qf = quantize_filter(fixture.tf, FixedFormat(fixture.fmt.int_bits, frac_bits))
        fixed = response_of(qf, 512, ResponseMethod.RATIONAL_EVAL).magnitude
        deviations.append(float(np.max(np.abs(fixed - ideal))))
    assert deviations == sorted(deviations, reverse=True), deviations
