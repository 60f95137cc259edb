import pytest

pytest.importorskip("pyqtgraph")
pytest.importorskip("PyQt6")

from filter_verifier.core.filtermodel import quantize_filter  # noqa: E402
from filter_verifier.core.fixtures import get_fixture  # noqa: E402
from filter_verifier.core.response import response_of  # noqa: E402
from filter_verifier.io.export import response_table  # noqa: E402
from filter_verifier.utils.plotting import _check_color, render_response  # noqa: E402


@pytest.fixture(scope="module")
def table():
    fixture = get_fixture("ilp2")
    ideal = response_of(fixture.tf, 256)
    fixed = response_of(quantize_filter(fixture.tf, fixture.fmt), 256)
    return response_table(ideal, fixed, fixture.tf.sample_rate_hz)


@pytest.mark.parametrize("suffix", [".png", ".svg"])
def test_render(tmp_path, table, suffix):
    path = render_response(table, tmp_path / f"ilp2{suffix}", edges_hz=[4800.0, 19200.0], title="ilp2")
    assert path.exists()
    assert path.stat().st_size > 0


def test_render_rejects_unknown_format(tmp_path, table):
    with pytest.raises(ValueError):
        render_response(table, tmp_path / "ilp2.pdf")


def test_check_color():
    assert _check_color('r') == (255, 0, 0)
    assert _check_color((1, 2, 3)) == (1, 2, 3)
    with pytest.raises(ValueError):
        _check_color('purple')
