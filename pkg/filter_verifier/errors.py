"""
Exception hierarchy shared by every filter_verifier module.

Every error derives from VerificationError, so callers embedding the library can
catch a single type. Errors that describe bad input also derive from ValueError.
"""
from __future__ import annotations

from typing import TYPE_CHECKING

if TYPE_CHECKING:
    from .core.fixedpoint import OverflowEvent


class VerificationError(Exception):
    pass


class FormatError(VerificationError, ValueError):
    pass


class FormatMismatchError(VerificationError, ValueError):
    pass


class OverflowDetected(VerificationError, ArithmeticError):
    def __init__(self, event: 'OverflowEvent'):
        super().__init__(f"{event.operation} overflow: {float(event.wide_value)!r} exceeds {event.bound} of <{event.fmt}>")
        self.event = event


class CoefficientRangeError(VerificationError, ValueError):
    def __init__(self, name: str, index: int, value: float, fmt: object):
        super().__init__(f"coefficient {name}[{index}] = {value!r} is outside the range of <{fmt}>")
        self.name = name
        self.index = index
        self.value = value


class DesignError(VerificationError, ValueError):
    pass


class SpecError(VerificationError, ValueError):
    pass


class GridError(VerificationError, ValueError):
    pass


class TruncationError(VerificationError):
    def __init__(self, message: str, suggested_n: int):
        super().__init__(f"{message}; try a grid of at least {suggested_n} points")
        self.suggested_n = suggested_n


class StrategyError(VerificationError, ValueError):
    pass


class BudgetExceededError(VerificationError):
    pass


class ConvergenceError(VerificationError, ArithmeticError):
    pass


class JobConfigError(VerificationError, ValueError):
    def __init__(self, path: str, message: str):
        super().__init__(f"{path}: {message}" if path else message)
        self.path = path
