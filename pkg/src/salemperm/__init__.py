"""Exact evaluation and analysis of digit-permuted Salem functions."""

from .numerals import (
    Cylinder,
    DigitExpansion,
    DomainError,
    MalformedDigitError,
    ParseError,
    PartitionParams,
    canonicalize,
    cylinder,
    digits_of,
    format_expansion,
    is_p3_rational,
    parse_expansion,
    parse_rational,
    shift,
    value_of,
)
from .salem import (
    DigitPermutation,
    SalemSystem,
    apply_permutation,
    builtin_permutations,
    check_functional_equation,
    eval_f,
    eval_f_at,
    eval_salem,
    iterate_solution,
    theta,
)

__version__ = "0.1.0"
