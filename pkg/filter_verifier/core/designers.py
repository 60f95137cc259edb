"""
Small closed-form designers used to build fixture filters.
"""
import math
from typing import Literal

import numpy as np
from scipy.signal import get_window

from ..errors import DesignError
from .filtermodel import TransferFunction


def _check_cutoff(fc_hz: float, fs_hz: float) -> None:
    if not fs_hz > 0:
        raise DesignError(f"sample rate must be positive, got {fs_hz!r}")
    if not 0 < fc_hz < fs_hz / 2:
        raise DesignError(f"cutoff {fc_hz!r} Hz must lie strictly between 0 and fs/2 = {fs_hz / 2!r} Hz")


def design_butterworth2(kind: Literal['lowpass', 'highpass'], fc_hz: float, fs_hz: float) -> TransferFunction:
    """
    Second-order Butterworth section by the bilinear transform with the cutoff
    prewarped, so |H| is exactly -3 dB at fc. Unity gain at DC (lowpass) or
    at Nyquist (highpass).
    """
    _check_cutoff(fc_hz, fs_hz)
    k = math.tan(math.pi * fc_hz / fs_hz)
    k2 = k * k
    norm = 1.0 / (1.0 + math.sqrt(2.0) * k + k2)
    a = (1.0, 2.0 * (k2 - 1.0) * norm, (1.0 - math.sqrt(2.0) * k + k2) * norm)

    if kind == 'lowpass':
        b0 = k2 * norm
        b = (b0, 2.0 * b0, b0)
    elif kind == 'highpass':
        b = (norm, -2.0 * norm, norm)
    else:
        raise DesignError(f"unsupported Butterworth kind: {kind!r}")
    return TransferFunction(b, a, fs_hz)


def design_fir_movingavg(taps: int, fs_hz: float = 48000.0) -> TransferFunction:
    if taps < 1:
        raise DesignError(f"moving average needs at least one tap, got {taps}")
    return TransferFunction((1.0 / taps,) * taps, (1.0,), fs_hz)


def design_fir_window(kind: Literal['hann'], order: int, fc_hz: float, fs_hz: float,
                      band: Literal['lowpass', 'highpass'] = 'lowpass') -> TransferFunction:
    """
    Windowed-sinc FIR of the given (even) order, normalized to unity DC gain.
    The highpass variant is the spectral inverse of the lowpass.
    """
    if kind != 'hann':
        raise DesignError(f"unsupported window: {kind!r}")
    if order < 2 or order % 2:
        raise DesignError(f"window design needs an even order >= 2, got {order}")
    _check_cutoff(fc_hz, fs_hz)

    cutoff = 2.0 * fc_hz / fs_hz
    n = np.arange(order + 1) - order / 2
    taps = cutoff * np.sinc(cutoff * n) * get_window('hann', order + 1, fftbins=False)
    taps /= taps.sum()

    if band == 'highpass':
        taps = -taps
        taps[order // 2] += 1.0
    elif band != 'lowpass':
        raise DesignError(f"unsupported band: {band!r}")
    return TransferFunction(tuple(taps), (1.0,), fs_hz)


def cascade(*sections: TransferFunction) -> TransferFunction:
    """
    Series connection: numerators and denominators multiply.
    """
    if not sections:
        raise DesignError("cascade needs at least one section")
    fs_hz = sections[0].sample_rate_hz
    if any(s.sample_rate_hz != fs_hz for s in sections):
        raise DesignError("cascaded sections must share a sample rate")

    b, a = np.array([1.0]), np.array([1.0])
    for s in sections:
        b = np.convolve(b, s.b)
        a = np.convolve(a, s.a)
    return TransferFunction(tuple(b), tuple(a), fs_hz)


def mirror(tf: TransferFunction) -> TransferFunction:
    """
    Substitute z -> -z: negates every odd coefficient, moving the response
    from w to pi - w (a lowpass at fc becomes a highpass at fs/2 - fc).
    """
    def flip(coeffs):
        return tuple(-c if i % 2 else c for i, c in enumerate(coeffs))
    return TransferFunction(flip(tf.b), flip(tf.a), tf.sample_rate_hz)
