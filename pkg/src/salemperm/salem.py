"""Salem function and its digit-permuted relatives.

``f`` reads the P_q digits of ``x``, relabels each digit through a
permutation ``theta`` and re-evaluates the stream under the same weights.
With ``theta = (0, 2, 1)`` this is the function studied here; at equal
weights it reduces to the ternary digit swap 1 <-> 2.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .numerals import (
    DigitExpansion,
    DomainError,
    PartitionParams,
    ParseError,
    canonicalize,
    digits_of,
    partial_sum,
    shift,
    value_of,
)

# Rows of the ternary relabelling table; row 2 is the default map.
THETA_TABLE = {
    1: (0, 1, 2),
    2: (0, 2, 1),
    3: (1, 0, 2),
    4: (1, 2, 0),
    5: (2, 0, 1),
    6: (2, 1, 0),
}


@dataclass(frozen=True)
class DigitPermutation:
    table: tuple[int, ...]

    def __post_init__(self):
        table = tuple(int(d) for d in self.table)
        if sorted(table) != list(range(len(table))) or len(table) < 2:
            raise DomainError(f"{table} is not a permutation of 0..{len(table) - 1}")
        object.__setattr__(self, "table", table)

    @property
    def q(self) -> int:
        return len(self.table)

    def __call__(self, d: int) -> int:
        return self.table[d]

    def inverse(self) -> "DigitPermutation":
        inv = [0] * self.q
        for d, img in enumerate(self.table):
            inv[img] = d
        return DigitPermutation(tuple(inv))

    @property
    def is_identity(self) -> bool:
        return self.table == tuple(range(self.q))

    @classmethod
    def parse(cls, text: str) -> "DigitPermutation":
        try:
            return cls(tuple(int(s) for s in text.split(",")))
        except ValueError as exc:
            if isinstance(exc, DomainError):
                raise
            raise ParseError(f"malformed permutation: {text!r}") from None

    def __str__(self):
        return ",".join(map(str, self.table))


def theta(m: int) -> DigitPermutation:
    """Named ternary row ``m`` (1..6)."""
    if m not in THETA_TABLE:
        raise DomainError(f"no built-in row theta_{m}; rows are 1..6")
    return DigitPermutation(THETA_TABLE[m])


def builtin_permutations(q: int = 3) -> list[DigitPermutation]:
    if q != 3:
        raise DomainError("the named rows exist for q = 3 only")
    return [theta(m) for m in sorted(THETA_TABLE)]


@dataclass(frozen=True)
class SalemSystem:
    params: PartitionParams
    perm: DigitPermutation = field(default_factory=lambda: theta(2))

    def __post_init__(self):
        if self.params.q != self.perm.q:
            raise DomainError(f"params have q = {self.params.q}, permutation has q = {self.perm.q}")

    @property
    def q(self) -> int:
        return self.params.q

    @property
    def max_weight(self) -> Fraction:
        return max(self.params.p)


def _check_base(e: DigitExpansion, q: int):
    if e.q != q:
        raise DomainError(f"expansion is base {e.q}, expected {q}")


def eval_salem(e: DigitExpansion, params: PartitionParams) -> Fraction:
    """S(x) for the base-q digits of x: the digits reread under the weights."""
    _check_base(e, params.q)
    return value_of(canonicalize(e), params)


def permute_digits(e: DigitExpansion, perm: DigitPermutation) -> DigitExpansion:
    """Relabel every digit; spelling structure is kept as is.

    The implicit zero tail becomes an explicit theta(0) tail.
    """
    _check_base(e, perm.q)
    if e.truncated:
        return DigitExpansion(e.q, tuple(map(perm, e.prefix)), (), True)
    period = e.period or (0,)
    return DigitExpansion(e.q, tuple(map(perm, e.prefix)), tuple(map(perm, period)))


def apply_permutation(e: DigitExpansion, perm: DigitPermutation) -> DigitExpansion:
    return canonicalize(permute_digits(e, perm))


def f_of_spelling(e: DigitExpansion, sys: SalemSystem) -> Fraction:
    """Image of this exact digit stream, without choosing a canonical spelling.

    Agrees with :func:`eval_f` on canonical input; on the (q-1)-tail
    spelling of a boundary point it gives the left limit instead.
    """
    return value_of(permute_digits(e, sys.perm), sys.params)


def eval_f(e: DigitExpansion, sys: SalemSystem) -> Fraction:
    _check_base(e, sys.q)
    if e.truncated:
        raise DomainError("truncated expansion has no exact image; use iterate_solution")
    return f_of_spelling(canonicalize(e), sys)


def iterate_solution(sys: SalemSystem, e: DigitExpansion, depth: int) -> tuple[Fraction, Fraction]:
    """Unroll the functional equation ``depth`` times.

    Returns the partial sum and the remaining weight, which bounds the
    distance to ``eval_f(e)`` since the unknown tail value lies in [0, 1].
    """
    if depth < 0:
        raise DomainError("depth must be non-negative")
    _check_base(e, sys.q)
    e = canonicalize(e)
    return partial_sum(map(sys.perm, e.digits(depth)), sys.params)


def eval_f_at(y, sys: SalemSystem, max_digits: int = 64) -> tuple[Fraction, Fraction]:
    """f at a number: (value, error bound); the bound is 0 when exact."""
    e = digits_of(Fraction(y), sys.params, max_digits)
    if not e.truncated:
        return eval_f(e, sys), Fraction(0)
    return iterate_solution(sys, e, len(e.prefix))


def check_functional_equation(e: DigitExpansion, sys: SalemSystem, n: int) -> Fraction:
    """Residual of ``f(s^{n-1} x) = beta[theta(i_n)] + p[theta(i_n)] f(s^n x)``."""
    if n < 1:
        raise DomainError("n starts at 1")
    e = canonicalize(e)
    head = shift(e, n - 1)
    t = sys.perm(head.digit(1))
    rhs = sys.params.beta[t] + sys.params.p[t] * eval_f(shift(e, n), sys)
    return eval_f(head, sys) - rhs
