import numpy as np
import pytest
from scipy.io import loadmat

from filter_verifier.core.filtermodel import TransferFunction, quantize_filter
from filter_verifier.core.fixedpoint import FixedFormat
from filter_verifier.core.fixtures import get_fixture
from filter_verifier.core.response import response_of, sampled_dtft
from filter_verifier.errors import GridError
from filter_verifier.io.export import CSV_HEADER, emit_response_csv, response_table, save_response_data

FS = 48000.0


@pytest.fixture
def ilp2_grids():
    fixture = get_fixture("ilp2")
    ideal = response_of(fixture.tf, 64)
    fixed = response_of(quantize_filter(fixture.tf, fixture.fmt), 64)
    return ideal, fixed


def test_csv_layout(tmp_path, ilp2_grids):
    path = emit_response_csv(*ilp2_grids, FS, tmp_path / "out" / "ilp2.csv")
    lines = path.read_text().splitlines()
    assert lines[0] == CSV_HEADER
    assert len(lines) == 64 // 2 + 1 + 1
    data = np.loadtxt(path, delimiter=",", skiprows=1)
    np.testing.assert_array_equal(data[:, 0], np.arange(33))
    assert data[-1, 1] == pytest.approx(FS / 2)
    assert lines[1].startswith("0,0,")


def test_identity_filter_is_flat(tmp_path):
    ident = sampled_dtft([1.0], 16)
    path = emit_response_csv(ident, ident, FS, tmp_path / "ident.csv")
    data = np.loadtxt(path, delimiter=",", skiprows=1)
    np.testing.assert_allclose(data[:, 2:4], 0.0, atol=1e-12)
    np.testing.assert_allclose(data[:, 4:6], 0.0, atol=1e-12)


def test_table_rejects_mismatched_grids():
    with pytest.raises(GridError):
        response_table(sampled_dtft([1.0], 16), sampled_dtft([1.0], 32), FS)


def test_save_npz(tmp_path, ilp2_grids):
    path = save_response_data(*ilp2_grids, FS, tmp_path / "grid.npz")
    with np.load(path) as data:
        assert len(data["k"]) == 33
        np.testing.assert_array_equal(data["h_ideal"], ilp2_grids[0].values)
        assert float(data["fs_hz"]) == FS


def test_save_mat_with_explicit_format(tmp_path, ilp2_grids):
    path = save_response_data(*ilp2_grids, FS, tmp_path / "grid", save_format='.mat')
    assert path.name == "grid.mat"
    data = loadmat(path)
    np.testing.assert_allclose(data["mag_fixed_db"].ravel(), ilp2_grids[1].magnitude_db()[:33])


def test_save_rejects_unknown_format(tmp_path, ilp2_grids):
    with pytest.raises(ValueError):
        save_response_data(*ilp2_grids, FS, tmp_path / "grid.h5")


def test_quantized_identity_matches_ideal(tmp_path):
    tf = TransferFunction((0.5, 0.5))
    ideal = response_of(tf, 32)
    fixed = response_of(quantize_filter(tf, FixedFormat(1, 5)), 32)
    table = response_table(ideal, fixed, FS)
    np.testing.assert_allclose(table["mag_ideal_db"], table["mag_fixed_db"])
