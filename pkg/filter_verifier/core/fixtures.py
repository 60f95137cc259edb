"""
Named benchmark filters, each with the spec and word length it is checked against.
"""
from dataclasses import dataclass
from functools import cache

from .designers import cascade, design_butterworth2, design_fir_movingavg, design_fir_window
from .filtermodel import TransferFunction
from .fixedpoint import FixedFormat
from .response import BandKind, FilterSpecBand

FS_HZ = 48000.0


@dataclass(frozen=True)
class Fixture:
    name: str
    description: str
    tf: TransferFunction
    spec: FilterSpecBand
    fmt: FixedFormat
    grid: int = 1024


def _ilp2() -> Fixture:
    return Fixture(
        "ilp2", "2nd-order Butterworth lowpass, fc 9.6 kHz",
        design_butterworth2('lowpass', 9600.0, FS_HZ),
        FilterSpecBand.from_hz(BandKind.LOWPASS, FS_HZ, wp_hz=4800.0, ap_db=-1.0, wr_hz=19200.0, ar_db=-20.0,
                               phase_threshold=0.5),
        FixedFormat(1, 5),
    )


def _ihp2() -> Fixture:
    return Fixture(
        "ihp2", "2nd-order Butterworth highpass, fc 9.6 kHz",
        design_butterworth2('highpass', 9600.0, FS_HZ),
        FilterSpecBand.from_hz(BandKind.HIGHPASS, FS_HZ, wr_hz=3000.0, ar_db=-20.0, wp_hz=19200.0, ap_db=-1.0,
                               phase_threshold=0.5),
        FixedFormat(1, 5),
    )


def _ilp2est() -> Fixture:
    return Fixture(
        "ilp2EST", "2nd-order Butterworth lowpass, narrow 100 Hz cutoff",
        design_butterworth2('lowpass', 100.0, FS_HZ),
        FilterSpecBand.from_hz(BandKind.LOWPASS, FS_HZ, wp_hz=40.0, ap_db=-1.0, wr_hz=1000.0, ar_db=-30.0),
        FixedFormat(4, 10),
        grid=16384,
    )


def _ilp8() -> Fixture:
    section = design_butterworth2('lowpass', 9600.0, FS_HZ)
    return Fixture(
        "ilp8", "8th-order lowpass, four cascaded 2nd-order sections",
        cascade(section, section, section, section),
        FilterSpecBand.from_hz(BandKind.LOWPASS, FS_HZ, wp_hz=5000.0, ap_db=-1.0, wr_hz=18500.0, ar_db=-80.0),
        FixedFormat(7, 6),
    )


def _flp10hann() -> Fixture:
    return Fixture(
        "flp10Hann", "Hann-windowed FIR lowpass of order 10",
        design_fir_window('hann', 10, 9600.0, FS_HZ),
        FilterSpecBand.from_hz(BandKind.LOWPASS, FS_HZ, wp_hz=1500.0, ap_db=-1.0, wr_hz=19000.0, ar_db=-30.0,
                               phase_threshold=0.5),
        FixedFormat(1, 5),
    )


def _fma4() -> Fixture:
    return Fixture(
        "fma4", "4-tap moving average",
        design_fir_movingavg(4, FS_HZ),
        FilterSpecBand.from_hz(BandKind.LOWPASS, FS_HZ, wp_hz=1000.0, ap_db=-1.0, wr_hz=22000.0, ar_db=-15.0),
        FixedFormat(1, 5),
    )


def _fbp() -> Fixture:
    return Fixture(
        "fbp", "FIR bandpass 0.5 - 0.5 z^-2 centred on fs/4",
        TransferFunction((0.5, 0.0, -0.5), (1.0,), FS_HZ),
        FilterSpecBand.from_hz(BandKind.BANDPASS, FS_HZ, wp_hz=(10800.0, 13200.0), ap_db=-1.0,
                               wr_hz=(480.0, 23520.0), ar_db=-20.0),
        FixedFormat(1, 5),
    )


_BUILDERS = {
    "ilp2": _ilp2,
    "ihp2": _ihp2,
    "ilp2EST": _ilp2est,
    "ilp8": _ilp8,
    "flp10Hann": _flp10hann,
    "fma4": _fma4,
    "fbp": _fbp,
}


def fixture_names() -> list[str]:
    return list(_BUILDERS)


@cache
def get_fixture(name: str) -> Fixture:
    try:
        return _BUILDERS[name]()
    except KeyError:
        raise KeyError(f"unknown fixture {name!r}; available: {', '.join(_BUILDERS)}") from None
