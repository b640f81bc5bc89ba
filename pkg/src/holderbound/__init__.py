"""Hölder-type bounds: classical, weight-partition refinements, and a
sharpened trapezoid (Hermite-Hadamard) estimate, with randomized checks."""

__version__ = "0.1.0"

from .chain import ChainReport, ConjugateExponents  # noqa: E402
from .expr import DomainError, ExprSyntaxError, parse  # noqa: E402
from .quadrature import IntegralResult, Interval, QuadratureConfig, integrate  # noqa: E402
from .integral import (  # noqa: E402
    WeightPartition,
    classical_bound,
    lhs_integral,
    refined_bound_linear,
    refined_bound_weighted,
    split_point_bound,
    verify_chain,
    young_bound,
)
from .sums import (  # noqa: E402
    DiscreteWeightPartition,
    PositiveTuple,
    classical_sum_bound,
    refined_sum_linear,
    refined_sum_weighted,
    sum_lhs,
    verify_sum_chain,
)
from .hermite import (  # noqa: E402
    HHInput,
    HHReport,
    convexity_probe,
    dragomir_bound,
    hh_report,
    refined_hh_bound,
    trapezoid_defect,
)

__all__ = [
    "ChainReport", "ConjugateExponents", "DomainError", "ExprSyntaxError", "parse",
    "IntegralResult", "Interval", "QuadratureConfig", "integrate",
    "WeightPartition", "classical_bound", "lhs_integral", "refined_bound_linear",
    "refined_bound_weighted", "split_point_bound", "verify_chain", "young_bound",
    "DiscreteWeightPartition", "PositiveTuple", "classical_sum_bound", "refined_sum_linear",
    "refined_sum_weighted", "sum_lhs", "verify_sum_chain",
    "HHInput", "HHReport", "convexity_probe", "dragomir_bound", "hh_report",
    "refined_hh_bound", "trapezoid_defect",
]
