"""Difference polynomial algebra, orderings, Groebner bases and explicit systems."""

from .diffpoly import (
    DifferenceRing,
    Monomial,
    Poly,
    Var,
    VariableError,
    format_poly,
    poly_evaluate,
    poly_normalize,
    poly_shift,
)
from .groebner import (
    BasisStatus,
    BuchbergerOptions,
    GBasis,
    SolveOutcome,
    SolveStatus,
    SolverTimeout,
    buchberger,
    interreduce,
    normal_form,
    solve_unique,
)
from .linear import LinearSlice, LinearityError, gaussian_eliminate
from .ordering import (
    BoundedDegRevLex,
    ClockBased,
    Comparison,
    InnerOrder,
    OrderingError,
    OrderingSpec,
    ProductOrdering,
    monomial_compare,
)
from .parser import (
    ParseError,
    SystemDefinition,
    format_system,
    parse_polynomial,
    parse_polynomials,
    parse_system,
    parse_text,
)
from .system import (
    DifferenceBasis,
    DiffSystem,
    InverseResult,
    NotInvertibleError,
    PeriodResult,
    StateVec,
    SystemDefinitionError,
    TermCapExceeded,
    backstep,
    endo_iterate,
    invert_system,
    period,
    simulate,
    subsystem_split,
)

__all__ = [
    "BasisStatus",
    "BoundedDegRevLex",
    "BuchbergerOptions",
    "ClockBased",
    "Comparison",
    "DiffSystem",
    "DifferenceBasis",
    "DifferenceRing",
    "GBasis",
    "InnerOrder",
    "InverseResult",
    "LinearSlice",
    "LinearityError",
    "Monomial",
    "NotInvertibleError",
    "OrderingError",
    "OrderingSpec",
    "ParseError",
    "PeriodResult",
    "Poly",
    "ProductOrdering",
    "SolveOutcome",
    "SolveStatus",
    "SolverTimeout",
    "StateVec",
    "SystemDefinition",
    "SystemDefinitionError",
    "TermCapExceeded",
    "Var",
    "VariableError",
    "backstep",
    "buchberger",
    "endo_iterate",
    "format_poly",
    "format_system",
    "gaussian_eliminate",
    "interreduce",
    "invert_system",
    "monomial_compare",
    "normal_form",
    "parse_polynomial",
    "parse_polynomials",
    "parse_system",
    "parse_text",
    "period",
    "poly_evaluate",
    "poly_normalize",
    "poly_shift",
    "simulate",
    "solve_unique",
    "subsystem_split",
]
