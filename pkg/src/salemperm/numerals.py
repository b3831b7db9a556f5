"""P_q digit expansions.

An expansion is a finite prefix followed by a repeating period; an empty
period stands for the all-zero tail.  Given weights ``p_0, ..., p_{q-1}``
(a probability vector) the digit stream ``i_1 i_2 ...`` denotes

    beta[i_1] + p[i_1] * (beta[i_2] + p[i_2] * (beta[i_3] + ...))

with ``beta[t] = p_0 + ... + p_{t-1}``.  Everything here is exact
(:class:`fractions.Fraction`).
"""

from __future__ import annotations

import re
from bisect import bisect_right
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

# The all-(q-1) string is kept as the spelling of the point 1.  Setting this
# to False rejects it instead (the stricter reading of the exclusion of
# (q-1)-tails).
ADMIT_ONE = True

MAX_BASE = 10


class ParseError(ValueError):
    """Text does not match the expansion or rational grammar."""


class MalformedDigitError(ParseError):
    """A digit character is not below the base."""


class DomainError(ValueError):
    """Argument is outside the mathematical domain of an operation."""


_RATIONAL_RE = re.compile(r"^(?:\d+/\d+|\d+(?:\.\d*)?|\.\d+)$")
_EXPANSION_RE = re.compile(r"^(?:([0-9]+)(?:\(([0-9]+)\))?|\(([0-9]+)\))$")


def parse_rational(text: str) -> Fraction:
    """Parse ``"a/b"`` or a plain decimal exactly."""
    text = text.strip()
    if not _RATIONAL_RE.match(text):
        raise ParseError(f"not a rational: {text!r}")
    try:
        return Fraction(text)
    except ZeroDivisionError:
        raise ParseError(f"zero denominator: {text!r}") from None


@dataclass(frozen=True)
class PartitionParams:
    """Digit weights ``p`` and their cumulative offsets ``beta``."""

    p: tuple[Fraction, ...]
    beta: tuple[Fraction, ...] = field(init=False, repr=False)

    def __post_init__(self):
        p = tuple(Fraction(v) for v in self.p)
        if not 2 <= len(p) <= MAX_BASE:
            raise DomainError(f"need between 2 and {MAX_BASE} weights, got {len(p)}")
        for t, v in enumerate(p):
            if not 0 < v < 1:
                raise DomainError(f"p_{t} = {v} is not in (0, 1)")
        if sum(p) != 1:
            raise DomainError(f"weights sum to {sum(p)}, not 1")
        beta = [Fraction(0)]
        for v in p[:-1]:
            beta.append(beta[-1] + v)
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "beta", tuple(beta))

    @property
    def q(self) -> int:
        return len(self.p)

    @classmethod
    def uniform(cls, q: int = 3) -> "PartitionParams":
        return cls(tuple(Fraction(1, q) for _ in range(q)))

    @classmethod
    def parse(cls, text: str) -> "PartitionParams":
        """``"1/2,1/4,1/4"`` -> params."""
        parts = [s for s in text.split(",")]
        if any(not s.strip() for s in parts):
            raise ParseError(f"empty weight in {text!r}")
        return cls(tuple(parse_rational(s) for s in parts))

    def __str__(self):
        return ",".join(str(v) for v in self.p)


@dataclass(frozen=True)
class DigitExpansion:
    """Eventually periodic digit string ``prefix (period)`` in base ``q``.

    ``truncated`` marks a finite prefix of an expansion whose tail is unknown
    (the greedy inverse gave up); such an object stands for a cylinder and
    has no period.
    """

    q: int
    prefix: tuple[int, ...] = ()
    period: tuple[int, ...] = ()
    truncated: bool = False

    def __post_init__(self):
        prefix = tuple(int(d) for d in self.prefix)
        period = tuple(int(d) for d in self.period)
        if not 2 <= self.q <= MAX_BASE:
            raise DomainError(f"base {self.q} not supported")
        for d in prefix + period:
            if not 0 <= d < self.q:
                raise MalformedDigitError(f"digit {d} not valid in base {self.q}")
        if self.truncated and period:
            raise DomainError("a truncated expansion has no period")
        object.__setattr__(self, "prefix", prefix)
        object.__setattr__(self, "period", period)

    def digit(self, k: int) -> int:
        """The k-th digit, 1-indexed."""
        if k < 1:
            raise IndexError(k)
        if k <= len(self.prefix):
            return self.prefix[k - 1]
        if self.truncated:
            raise IndexError(f"digit {k} lies beyond a truncated prefix")
        if not self.period:
            return 0
        return self.period[(k - 1 - len(self.prefix)) % len(self.period)]

    def digits(self, n: int) -> list[int]:
        return [self.digit(k) for k in range(1, n + 1)]

    @property
    def is_zero(self) -> bool:
        return not self.truncated and not self.period and not any(self.prefix)

    @property
    def is_one(self) -> bool:
        top = self.q - 1
        return (not self.truncated and bool(self.period)
                and all(d == top for d in self.prefix + self.period))

    def __str__(self):
        return format_expansion(self)


def format_expansion(e: DigitExpansion) -> str:
    head = "".join(map(str, e.prefix))
    if e.truncated:
        return head + "..."
    return head + "(" + ("".join(map(str, e.period)) or "0") + ")"


def parse_expansion(text: str, q: int = 3) -> DigitExpansion:
    """Parse ``digits [ "(" digits ")" ]`` or ``"(" digits ")"`` and canonicalize."""
    m = _EXPANSION_RE.match(text)
    if not m:
        raise ParseError(f"malformed expansion: {text!r}")
    prefix, period, bare_period = m.groups()
    prefix = prefix or ""
    period = period or bare_period or ""
    for ch in prefix + period:
        if int(ch) >= q:
            raise MalformedDigitError(f"digit {ch!r} in {text!r} is not below base {q}")
    return canonicalize(DigitExpansion(q, tuple(map(int, prefix)), tuple(map(int, period))))


def _primitive(word: tuple[int, ...]) -> tuple[int, ...]:
    n = len(word)
    for d in range(1, n + 1):
        if n % d == 0 and word[:d] * (n // d) == word:
            return word[:d]
    return word


def canonicalize(e: DigitExpansion) -> DigitExpansion:
    """Unique spelling with the same value.

    Periods are primitive, the prefix is as short as possible, a zero tail
    is stored as the empty period, and a (q-1)-tail after a lower digit is
    rewritten as ``...[i+1](0)``.  The all-(q-1) string (the point 1) stays.
    """
    if e.truncated:
        return e
    prefix = list(e.prefix)
    period = _primitive(e.period)
    if period == (0,):
        period = ()
    if not period:
        while prefix and prefix[-1] == 0:
            prefix.pop()
        return DigitExpansion(e.q, tuple(prefix), ())
    while prefix and prefix[-1] == period[-1]:
        prefix.pop()
        period = (period[-1],) + period[:-1]
    if period == (e.q - 1,):
        if not prefix:
            if not ADMIT_ONE:
                raise DomainError("the all-(q-1) spelling is excluded")
            return DigitExpansion(e.q, (), period)
        prefix[-1] += 1
        return DigitExpansion(e.q, tuple(prefix), ())
    return DigitExpansion(e.q, tuple(prefix), period)


def _check_base(e: DigitExpansion, params: PartitionParams):
    if e.q != params.q:
        raise DomainError(f"expansion is base {e.q} but params have q = {params.q}")


def partial_sum(digits: Iterable[int], params: PartitionParams) -> tuple[Fraction, Fraction]:
    """(sum of the series over ``digits``, product of their weights)."""
    total, weight = Fraction(0), Fraction(1)
    p, beta = params.p, params.beta
    for d in digits:
        total += weight * beta[d]
        weight *= p[d]
    return total, weight


def value_of(e: DigitExpansion, params: PartitionParams) -> Fraction:
    """Exact value of the digit stream as spelled (no canonicalization).

    A truncated expansion evaluates as if followed by zeros, i.e. the left
    end of its cylinder.
    """
    _check_base(e, params)
    total, weight = partial_sum(e.prefix, params)
    if e.period:
        ps, pw = partial_sum(e.period, params)
        total += weight * ps / (1 - pw)
    return total


def digits_of(y, params: PartitionParams, count: int = 64) -> DigitExpansion:
    """Greedy inverse of :func:`value_of`.

    Boundary points get the zero-tail spelling.  Rational inputs whose
    remainders recur produce an exact expansion regardless of ``count``;
    otherwise ``count`` digits are returned with the truncation mark.
    """
    y = Fraction(y)
    q = params.q
    if not 0 <= y <= 1:
        raise DomainError(f"{y} is outside [0, 1]")
    if y == 1:
        return DigitExpansion(q, (), (q - 1,))
    beta, p = params.beta, params.p
    digits: list[int] = []
    seen: dict[Fraction, int] = {}
    while True:
        if y == 0:
            return canonicalize(DigitExpansion(q, tuple(digits)))
        if y in seen:
            k = seen[y]
            return canonicalize(DigitExpansion(q, tuple(digits[:k]), tuple(digits[k:])))
        if len(digits) >= count:
            return DigitExpansion(q, tuple(digits), truncated=True)
        seen[y] = len(digits)
        t = bisect_right(beta, y) - 1
        digits.append(t)
        y = (y - beta[t]) / p[t]


def shift(e: DigitExpansion, n: int) -> DigitExpansion:
    """Drop the first ``n`` digits.  Canonical input gives canonical output."""
    if n < 0:
        raise DomainError("shift count must be non-negative")
    if n <= len(e.prefix):
        return DigitExpansion(e.q, e.prefix[n:], e.period, e.truncated)
    if e.truncated:
        return DigitExpansion(e.q, (), (), True)
    if not e.period:
        return DigitExpansion(e.q)
    k = (n - len(e.prefix)) % len(e.period)
    return DigitExpansion(e.q, (), e.period[k:] + e.period[:k])


@dataclass(frozen=True)
class Cylinder:
    params: PartitionParams
    base: tuple[int, ...]
    inf: Fraction
    length: Fraction

    @property
    def sup(self) -> Fraction:
        return self.inf + self.length

    def __contains__(self, x) -> bool:
        return self.inf <= x <= self.sup


def cylinder(base: Sequence[int], params: PartitionParams) -> Cylinder:
    """Closed interval of points whose expansion starts with ``base``."""
    base = tuple(int(d) for d in base)
    for d in base:
        if not 0 <= d < params.q:
            raise MalformedDigitError(f"digit {d} not valid in base {params.q}")
    inf, length = partial_sum(base, params)
    return Cylinder(params, base, inf, length)


def is_p3_rational(e: DigitExpansion) -> bool:
    """True for points with two spellings (tail 0 vs tail q-1), and for 1."""
    e = canonicalize(e)
    if e.truncated:
        return False
    return (not e.period and not e.is_zero) or e.is_one


def parse_digits(text: str, q: int) -> tuple[int, ...]:
    """Plain digit word such as a cylinder base ``"02"``; empty is allowed."""
    if not re.fullmatch(r"[0-9]*", text):
        raise ParseError(f"malformed digit word: {text!r}")
    for ch in text:
        if int(ch) >= q:
            raise MalformedDigitError(f"digit {ch!r} in {text!r} is not below base {q}")
    return tuple(map(int, text))
