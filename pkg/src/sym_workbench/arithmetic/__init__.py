from sym_workbench.arithmetic.ring import (
    RingContext,
    RingParams,
    UnramifiedElement,
    frobenius,
    make_ring,
    required_denominator_budget,
)
from sym_workbench.arithmetic.series import RingMatrix, TruncatedSeries, frobenius_series, gauss_valuation

__all__ = [
    "RingContext",
    "RingMatrix",
    "RingParams",
    "TruncatedSeries",
    "UnramifiedElement",
    "frobenius",
    "frobenius_series",
    "gauss_valuation",
    "make_ring",
    "required_denominator_budget",
]
