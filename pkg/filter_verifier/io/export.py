"""
Plot-ready response grids: the ideal and fixed-point responses side by side
on the half grid k = 0..N/2.
"""
import logging
from pathlib import Path
from typing import Literal

import numpy as np
from scipy.io import savemat

from ..core.response import FrequencyResponse
from ..errors import GridError

logger = logging.getLogger(__name__)

CSV_HEADER = "k,freq_hz,mag_ideal_db,mag_fixed_db,phase_ideal_rad,phase_fixed_rad"


def response_table(ideal: FrequencyResponse, fixed: FrequencyResponse, fs_hz: float) -> dict[str, np.ndarray]:
    if ideal.n != fixed.n:
        raise GridError(f"grid sizes differ: {ideal.n} vs {fixed.n}")
    half = ideal.half
    k = np.arange(half)
    return {
        "k": k,
        "freq_hz": k * fs_hz / ideal.n,
        "mag_ideal_db": ideal.magnitude_db()[:half],
        "mag_fixed_db": fixed.magnitude_db()[:half],
        "phase_ideal_rad": ideal.phase[:half],
        "phase_fixed_rad": fixed.phase[:half],
    }


def emit_response_csv(ideal: FrequencyResponse, fixed: FrequencyResponse, fs_hz: float,
                      path: str | Path) -> Path:
    """
    Write N/2+1 rows under the fixed header
    k,freq_hz,mag_ideal_db,mag_fixed_db,phase_ideal_rad,phase_fixed_rad.
    """
    table = response_table(ideal, fixed, fs_hz)
    p = Path(path)
    p.parent.mkdir(parents=True, exist_ok=True)
    columns = np.column_stack([table[name] for name in CSV_HEADER.split(",")])
    np.savetxt(p, columns, delimiter=",", header=CSV_HEADER, comments="",
               fmt=["%d"] + ["%.12g"] * (columns.shape[1] - 1))
    logger.info("wrote %d response rows to %s", len(columns), p)
    return p


def save_response_data(ideal: FrequencyResponse, fixed: FrequencyResponse, fs_hz: float,
                       path: str | Path,
                       save_format: Literal['.npz', '.mat'] | None = None) -> Path:
    """
    Save the response table plus the complex grids in numpy (.npz) or MATLAB
    (.mat) form. The format follows the suffix unless given explicitly, in
    which case a mismatching suffix is extended.
    """
    p = Path(path)
    if save_format is None:
        save_format = p.suffix.lower()
    elif p.suffix.lower() != save_format.lower():
        p = p.with_name(p.name + save_format)

    data = response_table(ideal, fixed, fs_hz)
    data["h_ideal"] = ideal.values
    data["h_fixed"] = fixed.values
    data["fs_hz"] = np.array(fs_hz)

    p.parent.mkdir(parents=True, exist_ok=True)
    if save_format == '.npz':
        np.savez(p, **data)
    elif save_format == '.mat':
        savemat(p, data)
    else:
        raise ValueError(f"Unsupported format: {save_format}")
    logger.info("saved response grids to %s", p)
    return p
