"""
Exact <m,n> fixed-point arithmetic.

A FixedFormat has one implicit sign bit, m integer bits and n fractional bits.
Values are stored as a signed raw integer counting steps of 2^-n, so the real
value raw * 2^-n is always exact (exposed as a Fraction).
"""
import logging
import math
import re
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Iterator

from ..errors import FormatError, FormatMismatchError, OverflowDetected

logger = logging.getLogger(__name__)

MAX_TOTAL_BITS = 64

_FORMAT_PATTERN = re.compile(r"^\s*<?\s*(\d+)\s*,\s*(\d+)\s*>?\s*$")


class RoundingMode(str, Enum):
    NEAREST = "nearest"      # ties to even
    TRUNCATE = "truncate"    # toward zero
    FLOOR = "floor"


class OverflowMode(str, Enum):
    DETECT = "detect"
    SATURATE = "saturate"
    WRAPAROUND = "wraparound"


@dataclass(frozen=True)
class FixedFormat:
    int_bits: int
    frac_bits: int

    def __post_init__(self):
        if self.int_bits < 0 or self.frac_bits < 0:
            raise FormatError(f"negative bit count in <{self.int_bits},{self.frac_bits}>")
        if self.total_bits > MAX_TOTAL_BITS:
            raise FormatError(f"<{self.int_bits},{self.frac_bits}> needs {self.total_bits} bits, at most {MAX_TOTAL_BITS} are supported")

    @classmethod
    def parse(cls, text: str) -> 'FixedFormat':
        """
        Parse "m,n" (CLI and JSON spelling) or "<m,n>".
        """
        match = _FORMAT_PATTERN.match(text)
        if match is None:
            raise FormatError(f"cannot parse fixed-point format {text!r}, expected 'm,n'")
        return cls(int(match.group(1)), int(match.group(2)))

    def __str__(self) -> str:
        return f"{self.int_bits},{self.frac_bits}"

    @property
    def total_bits(self) -> int:
        return self.int_bits + self.frac_bits + 1

    @property
    def scale(self) -> int:
        return 1 << self.frac_bits

    @property
    def raw_max(self) -> int:
        return (1 << (self.int_bits + self.frac_bits)) - 1

    @property
    def raw_min(self) -> int:
        return -(1 << (self.int_bits + self.frac_bits))

    @property
    def modulus(self) -> int:
        return 1 << (self.int_bits + self.frac_bits + 1)

    @property
    def lsb(self) -> Fraction:
        return Fraction(1, self.scale)

    def count(self) -> int:
        return self.raw_max - self.raw_min + 1

    def contains_raw(self, raw: int) -> bool:
        return self.raw_min <= raw <= self.raw_max

    def values(self) -> Iterator['FixedValue']:
        """
        Every representable value, in ascending order.
        """
        for raw in range(self.raw_min, self.raw_max + 1):
            yield FixedValue(raw, self)


def v_max(fmt: FixedFormat) -> Fraction:
    return Fraction(fmt.raw_max, fmt.scale)


def v_min(fmt: FixedFormat) -> Fraction:
    return Fraction(fmt.raw_min, fmt.scale)


@dataclass(frozen=True)
class FixedValue:
    raw: int
    fmt: FixedFormat

    @property
    def real_value(self) -> Fraction:
        return Fraction(self.raw, self.fmt.scale)

    def __float__(self) -> float:
        return self.raw / self.fmt.scale

    def __repr__(self) -> str:
        return f"FixedValue({float(self)!r}, raw={self.raw}, <{self.fmt}>)"


@dataclass(frozen=True)
class OverflowEvent:
    operation: str
    wide_raw: int
    fmt: FixedFormat

    @property
    def wide_value(self) -> Fraction:
        return Fraction(self.wide_raw, self.fmt.scale)

    @property
    def bound(self) -> str:
        return "v_max" if self.wide_raw > self.fmt.raw_max else "v_min"


def round_div(num, den, mode: RoundingMode):
    """
    Round num / den to an integer, den > 0.

    Written with plain operators so it works for Python ints and for numpy
    integer arrays alike.
    """
    q = num // den
    r = num - q * den
    if mode is RoundingMode.FLOOR:
        return q
    if mode is RoundingMode.TRUNCATE:
        return q + ((r != 0) & (num < 0))
    twice = 2 * r
    return q + (twice > den) + ((twice == den) & (q % 2 == 1))


def round_fraction(x: Fraction, mode: RoundingMode) -> int:
    if mode is RoundingMode.FLOOR:
        return math.floor(x)
    if mode is RoundingMode.TRUNCATE:
        return math.trunc(x)
    return round(x)


def wrap_raw(raw: int, fmt: FixedFormat) -> int:
    return (raw - fmt.raw_min) % fmt.modulus + fmt.raw_min


def saturate_raw(raw: int, fmt: FixedFormat) -> int:
    return min(max(raw, fmt.raw_min), fmt.raw_max)


def handle_range(raw: int, fmt: FixedFormat, mode: OverflowMode, operation: str) -> FixedValue:
    """
    Apply the overflow semantics to an exact result already on the 2^-n grid.
    """
    if fmt.contains_raw(raw):
        return FixedValue(raw, fmt)
    if mode is OverflowMode.DETECT:
        raise OverflowDetected(OverflowEvent(operation, raw, fmt))
    if mode is OverflowMode.SATURATE:
        return FixedValue(saturate_raw(raw, fmt), fmt)
    return FixedValue(wrap_raw(raw, fmt), fmt)


def quantize(x: float | int | Fraction,
             fmt: FixedFormat,
             mode: RoundingMode = RoundingMode.NEAREST,
             overflow: OverflowMode = OverflowMode.DETECT) -> FixedValue:
    if isinstance(x, float) and not math.isfinite(x):
        raise ValueError(f"cannot quantize non-finite value {x!r}")
    raw = round_fraction(Fraction(x) * fmt.scale, mode)
    return handle_range(raw, fmt, overflow, "quantize")


def _check_formats(a: FixedValue, b: FixedValue) -> FixedFormat:
    if a.fmt != b.fmt:
        raise FormatMismatchError(f"operands have formats <{a.fmt}> and <{b.fmt}>")
    return a.fmt


def fx_add(a: FixedValue, b: FixedValue, mode: OverflowMode = OverflowMode.DETECT) -> FixedValue:
    fmt = _check_formats(a, b)
    return handle_range(a.raw + b.raw, fmt, mode, "add")


def fx_sub(a: FixedValue, b: FixedValue, mode: OverflowMode = OverflowMode.DETECT) -> FixedValue:
    fmt = _check_formats(a, b)
    return handle_range(a.raw - b.raw, fmt, mode, "sub")


def fx_mul(a: FixedValue, b: FixedValue,
           mode: OverflowMode = OverflowMode.DETECT,
           rounding: RoundingMode = RoundingMode.NEAREST) -> FixedValue:
    fmt = _check_formats(a, b)
    # The wide product carries 2n fractional bits and is exact before re-rounding
    raw = round_div(a.raw * b.raw, fmt.scale, rounding)
    return handle_range(raw, fmt, mode, "mul")


def fx_div(a: FixedValue, b: FixedValue,
           mode: OverflowMode = OverflowMode.DETECT,
           rounding: RoundingMode = RoundingMode.NEAREST) -> FixedValue:
    fmt = _check_formats(a, b)
    if b.raw == 0:
        raise ZeroDivisionError("fixed-point division by zero")
    num, den = a.raw * fmt.scale, b.raw
    if den < 0:
        num, den = -num, -den
    raw = round_div(num, den, rounding)
    return handle_range(raw, fmt, mode, "div")
