"""
Verify that a fixed-point implementation of a digital filter still meets its
floating-point design: magnitude, phase, stability and bounded overflow.
"""
__version__ = "0.1.0"

from .core.filtermodel import QuantizedFilter, TransferFunction, quantize_filter
from .core.fixedpoint import FixedFormat, FixedValue, OverflowMode, RoundingMode, quantize
from .core.overflow import SearchStrategy, search_overflow, simulate_fixed, worst_case_fir
from .core.response import FilterSpecBand, check_magnitude, check_phase, response_of
from .core.stability import check_stability
from .errors import VerificationError

__all__ = [
    "FilterSpecBand", "FixedFormat", "FixedValue", "OverflowMode", "QuantizedFilter", "RoundingMode",
    "SearchStrategy", "TransferFunction", "VerificationError", "check_magnitude", "check_phase",
    "check_stability", "quantize", "quantize_filter", "response_of", "search_overflow", "simulate_fixed",
    "worst_case_fir",
]
