"""
Transfer functions, coefficient quantization and the direct-form I recursion.
"""
import logging
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from ..errors import CoefficientRangeError, DesignError, OverflowDetected
from .fixedpoint import FixedFormat, FixedValue, OverflowMode, RoundingMode, quantize

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class TransferFunction:
    """
    H(z) = (b_0 + b_1 z^-1 + ... + b_M z^-M) / (a_0 + a_1 z^-1 + ... + a_N z^-N)

    a_0 is kept as designed (not normalized to 1) so the quantized twin holds
    exactly what an implementation would store.
    """
    b: tuple[float, ...]
    a: tuple[float, ...] = (1.0,)
    sample_rate_hz: float = 48000.0

    def __post_init__(self):
        object.__setattr__(self, 'b', tuple(float(c) for c in self.b))
        object.__setattr__(self, 'a', tuple(float(c) for c in self.a))
        if len(self.b) < 1 or len(self.a) < 1:
            raise DesignError("numerator and denominator need at least one coefficient")
        if self.a[0] == 0.0:
            raise DesignError("a[0] must be non-zero")
        if not self.sample_rate_hz > 0:
            raise DesignError(f"sample rate must be positive, got {self.sample_rate_hz!r}")
        if not all(np.isfinite(self.b)) or not all(np.isfinite(self.a)):
            raise DesignError("coefficients must be finite")

    @property
    def is_fir(self) -> bool:
        return all(c == 0.0 for c in self.a[1:])

    @property
    def order(self) -> int:
        return max(len(self.b), len(self.a)) - 1

    def to_dict(self) -> dict[str, Any]:
        return {"b": list(self.b), "a": list(self.a), "fs_hz": self.sample_rate_hz}

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> 'TransferFunction':
        return cls(tuple(data["b"]), tuple(data.get("a", [1.0])), float(data.get("fs_hz", 48000.0)))


@dataclass(frozen=True)
class QuantizedFilter:
    b_q: tuple[FixedValue, ...]
    a_q: tuple[FixedValue, ...]
    fmt: FixedFormat
    origin: TransferFunction
    rounding: RoundingMode = RoundingMode.NEAREST

    @property
    def is_fir(self) -> bool:
        return all(c.raw == 0 for c in self.a_q[1:])

    @property
    def b_raw(self) -> tuple[int, ...]:
        return tuple(c.raw for c in self.b_q)

    @property
    def a_raw(self) -> tuple[int, ...]:
        return tuple(c.raw for c in self.a_q)

    def as_transfer_function(self) -> TransferFunction:
        """
        The quantized coefficients read back as reals.
        """
        return TransferFunction(
            tuple(float(c) for c in self.b_q),
            tuple(float(c) for c in self.a_q),
            self.origin.sample_rate_hz,
        )


@dataclass(frozen=True)
class StateDF1:
    """
    Delay lines of the direct-form I datapath, newest sample first, as raw integers.
    """
    x_hist: tuple[int, ...] = field(default_factory=tuple)
    y_hist: tuple[int, ...] = field(default_factory=tuple)

    @classmethod
    def zeros(cls, qf: QuantizedFilter) -> 'StateDF1':
        return cls((0,) * (len(qf.b_q) - 1), (0,) * (len(qf.a_q) - 1))

    def shifted(self, x_raw: int, y_raw: int) -> 'StateDF1':
        x_hist = ((x_raw,) + self.x_hist)[:len(self.x_hist)]
        y_hist = ((y_raw,) + self.y_hist)[:len(self.y_hist)]
        return StateDF1(x_hist, y_hist)


def quantize_filter(tf: TransferFunction,
                    fmt: FixedFormat,
                    rmode: RoundingMode = RoundingMode.NEAREST) -> QuantizedFilter:
    def _quantize_all(name: str, coeffs: tuple[float, ...]) -> tuple[FixedValue, ...]:
        out = []
        for idx, c in enumerate(coeffs):
            try:
                out.append(quantize(c, fmt, rmode, OverflowMode.DETECT))
            except OverflowDetected:
                raise CoefficientRangeError(name, idx, c, fmt) from None
        return tuple(out)

    qf = QuantizedFilter(_quantize_all("b", tf.b), _quantize_all("a", tf.a), fmt, tf, rmode)
    if qf.a_q[0].raw == 0:
        raise CoefficientRangeError("a", 0, tf.a[0], fmt)
    logger.debug("quantized %d+%d coefficients to <%s> (%s)", len(tf.b), len(tf.a), fmt, rmode.value)
    return qf


def impulse_response(tf: TransferFunction, n: int) -> np.ndarray:
    """
    h[0..n-1] of the difference equation
        a_0 y[k] = sum_i b_i x[k-i] - sum_{j>=1} a_j y[k-j]
    driven by a unit impulse from a zero state, in double precision.
    """
    if n < 1:
        raise ValueError(f"impulse response length must be >= 1, got {n}")
    b = np.asarray(tf.b, dtype=float)
    a = np.asarray(tf.a, dtype=float)
    h = np.zeros(n)
    h[:min(n, len(b))] = b[:n]
    if tf.is_fir:
        return h / a[0]

    feedback = a[1:]
    for k in range(n):
        taps = min(k, len(feedback))
        if taps:
            h[k] -= np.dot(feedback[:taps], h[k - 1::-1][:taps])
        h[k] /= a[0]
    return h


def impulse_response_quantized(qf: QuantizedFilter, n: int) -> np.ndarray:
    """
    Same recursion with the quantized coefficients, still in double precision:
    this isolates coefficient error from datapath error.
    """
    return impulse_response(qf.as_transfer_function(), n)
