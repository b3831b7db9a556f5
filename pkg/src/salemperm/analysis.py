"""Integral, one-sided limits, collisions, increments and digit statistics of f."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Mapping, Sequence, Union

import numpy as np

from .numerals import (
    DigitExpansion,
    DomainError,
    PartitionParams,
    canonicalize,
    cylinder,
    is_p3_rational,
    partial_sum,
    shift,
    value_of,
)
from .salem import SalemSystem, eval_f, f_of_spelling

DEFAULT_MAX_CYLINDERS = 3 ** 14


# -- integral ---------------------------------------------------------------

def overlap(sys: SalemSystem) -> Fraction:
    """sum_t p[theta(t)] p[t]: the factor by which the integral recurs on itself."""
    p = sys.params.p
    return sum(p[sys.perm(t)] * p[t] for t in range(sys.q))


def integral_closed_form(sys: SalemSystem) -> Fraction:
    """Lebesgue integral of f over [0, 1].

    Splitting [0, 1] into the first-rank cylinders and using
    ``f(x) = beta[theta(t)] + p[theta(t)] f(sigma x)`` on cylinder t gives
    ``I = sum_t beta[theta(t)] p[t] + I * overlap``.
    """
    p, beta = sys.params.p, sys.params.beta
    head = sum(beta[sys.perm(t)] * p[t] for t in range(sys.q))
    return head / (1 - overlap(sys))


class BracketLimitError(DomainError):
    """Too many cylinders; carries the bracket at the largest feasible rank."""

    def __init__(self, msg, rank, lower, upper):
        super().__init__(msg)
        self.rank = rank
        self.lower = lower
        self.upper = upper


def integral_bracket(sys: SalemSystem, rank: int,
                     max_cylinders: int = DEFAULT_MAX_CYLINDERS) -> tuple[Fraction, Fraction]:
    """Lower/upper Darboux sums of f over all rank-``rank`` cylinders.

    On a cylinder with base c, ``f = A_c + P_c * f(sigma^m x)`` where A_c is
    the partial image sum and P_c the product of image weights.  Since
    0 <= f <= 1 with both ends attained, f ranges over [A_c, A_c + P_c]
    there.  The gap is exactly ``overlap ** rank``.
    """
    if rank < 1:
        raise DomainError("rank must be at least 1")
    q = sys.q
    if q ** rank > max_cylinders:
        feasible = max(1, int(math.log(max_cylinders, q)))
        while q ** feasible > max_cylinders and feasible > 1:
            feasible -= 1
        lo, hi = integral_bracket(sys, feasible, max_cylinders)
        raise BracketLimitError(
            f"{q}^{rank} cylinders exceeds the limit {max_cylinders}; "
            f"rank {feasible} gives [{float(lo)}, {float(hi)}]",
            feasible, lo, hi)

    # integer arithmetic over the common denominator of the weights
    p, beta = sys.params.p, sys.params.beta
    den = math.lcm(*(v.denominator for v in p))
    pi = [int(v * den) for v in p]
    bi = [int(v * den) for v in beta]
    img = [sys.perm(t) for t in range(q)]

    lower_num = 0
    gap_num = 0
    # state per node: (image partial sum * den^k, image weight * den^k, length * den^k)
    stack = [(0, 0, 1, 1)]
    while stack:
        level, a, w, length = stack.pop()
        if level == rank:
            lower_num += a * length
            gap_num += w * length
            continue
        for t in range(q):
            u = img[t]
            stack.append((level + 1, a * den + bi[u] * w, w * pi[u], length * pi[t]))
    scale = Fraction(1, den ** (2 * rank))
    lower = lower_num * scale
    return lower, lower + gap_num * scale


def integral_monte_carlo(sys: SalemSystem, n: int, seed: int = 0, streams: int = 8,
                         tol: float = 1e-12, chunk: int = 1 << 16) -> tuple[float, float]:
    """Sample mean of f at ``n`` Lebesgue-uniform points, with its standard error.

    A point is drawn as an i.i.d. digit stream with P(digit t) = p_t: the
    cylinder with base c then has probability prod p_{c_r} = its length, so
    the stream is Lebesgue-distributed.  Each stream is cut after enough
    digits that the remaining image weight is below ``tol``.
    Work is split into ``streams`` seeded substreams; the result depends
    only on ``(seed, streams)``.
    """
    if n < 1:
        raise DomainError("need at least one sample")
    q = sys.q
    pf = np.array([float(v) for v in sys.params.p])
    bf = np.array([float(v) for v in sys.params.beta])
    img = np.array([sys.perm(t) for t in range(q)])
    depth = max(1, math.ceil(math.log(tol) / math.log(float(sys.max_weight))))
    probs = pf / pf.sum()

    children = np.random.SeedSequence(seed).spawn(streams)
    sizes = [n // streams + (1 if k < n % streams else 0) for k in range(streams)]
    total = 0.0
    total_sq = 0.0
    for child, size in zip(children, sizes):
        rng = np.random.default_rng(child)
        done = 0
        while done < size:
            m = min(chunk, size - done)
            digits = img[rng.choice(q, size=(m, depth), p=probs)]
            vals = np.zeros(m)
            for k in range(depth - 1, -1, -1):
                d = digits[:, k]
                vals = bf[d] + pf[d] * vals
            total += vals.sum()
            total_sq += (vals * vals).sum()
            done += m
    mean = total / n
    if n == 1:
        return mean, 0.0
    var = max(total_sq - n * mean * mean, 0.0) / (n - 1)
    return mean, math.sqrt(var / n)


# -- cylinder increments ----------------------------------------------------

def increment_constant(sys: SalemSystem) -> Fraction:
    """f along (q-1)^inf minus f along 0^inf: the increment over [0, 1]."""
    p, beta = sys.params.p, sys.params.beta
    top, bottom = sys.perm(sys.q - 1), sys.perm(0)
    return beta[top] / (1 - p[top]) - beta[bottom] / (1 - p[bottom])


def cylinder_increment(base: Sequence[int], sys: SalemSystem) -> Fraction:
    """f(sup) - f(inf) over the cylinder, both ends read inside the cylinder.

    The right end is taken on the spelling ``base (q-1)``, i.e. as the limit
    from the left.  Signed: relabellings that reverse order give negatives.
    """
    base = tuple(base)
    cylinder(base, sys.params)  # validates digits
    q = sys.q
    top = f_of_spelling(DigitExpansion(q, base, (q - 1,)), sys)
    bottom = f_of_spelling(DigitExpansion(q, base, (0,)), sys)
    return top - bottom


def increment_formula(base: Sequence[int], sys: SalemSystem) -> Fraction:
    """K * prod p[theta(c_r)]; must agree with :func:`cylinder_increment`."""
    _, weight = partial_sum((sys.perm(d) for d in base), sys.params)
    return increment_constant(sys) * weight


def derivative_ratio(base: Sequence[int], sys: SalemSystem) -> Fraction:
    return cylinder_increment(base, sys) / cylinder(base, sys.params).length


# -- discontinuities --------------------------------------------------------

@dataclass(frozen=True)
class JumpReport:
    point: Fraction
    expansion: DigitExpansion
    left_limit: Fraction
    right_limit: Fraction

    @property
    def jump(self) -> Fraction:
        return self.right_limit - self.left_limit


def _boundary_check(x0: DigitExpansion):
    if x0.is_zero or x0.is_one or not is_p3_rational(x0):
        raise DomainError(f"{x0} is not an interior P-rational point; f is continuous there")


def jump_at(x0: DigitExpansion, sys: SalemSystem) -> JumpReport:
    """One-sided limits of f at a point with two spellings.

    From the right f follows the zero-tail spelling; from the left it
    follows ``... [i_m - 1] (q-1)``.
    """
    x0 = canonicalize(x0)
    _boundary_check(x0)
    q = x0.q
    left_spelling = DigitExpansion(q, x0.prefix[:-1] + (x0.prefix[-1] - 1,), (q - 1,))
    return JumpReport(
        point=value_of(x0, sys.params),
        expansion=x0,
        left_limit=f_of_spelling(left_spelling, sys),
        right_limit=eval_f(x0, sys),
    )


def approach_values(x0: DigitExpansion, sys: SalemSystem, depth: int) -> tuple[Fraction, Fraction]:
    """f at points ``depth`` digits to the left and right of ``x0``.

    Both points agree with the corresponding spelling of ``x0`` on their
    first ``len(prefix) + depth`` digits, so each is within
    ``max(p) ** depth`` of the matching one-sided limit.
    """
    x0 = canonicalize(x0)
    _boundary_check(x0)
    q = x0.q
    head = x0.prefix[:-1]
    left = DigitExpansion(q, head + (x0.prefix[-1] - 1,) + (q - 1,) * depth)
    right = DigitExpansion(q, x0.prefix + (0,) * depth + (1,))
    return eval_f(left, sys), eval_f(right, sys)


# -- non-injectivity, non-monotonicity, fixed points ------------------------

@dataclass(frozen=True)
class CollisionPair:
    x1: DigitExpansion
    x2: DigitExpansion
    image: Fraction


def collision_pair(prefix: Sequence[int], family: int, sys: SalemSystem) -> CollisionPair:
    """Two distinct points sharing one image.

    The images are the two spellings ``c' a (0)`` and ``c' [a-1] (q-1)`` of
    a boundary point, with ``a = family``; pulling them back through theta
    gives the pair.  For theta = (0, 2, 1), family 1 is
    ``(c 2 (0), c 0 (1))`` and family 2 is ``(c 1 (0), c 2 (1))``.
    """
    q = sys.q
    if not 1 <= family <= q - 1:
        raise DomainError(f"family must be in 1..{q - 1}")
    prefix = tuple(prefix)
    for d in prefix:
        if not 0 <= d < q:
            raise DomainError(f"digit {d} not valid in base {q}")
    inv = sys.perm.inverse()
    raw1 = DigitExpansion(q, prefix + (inv(family),), (inv(0),))
    raw2 = DigitExpansion(q, prefix + (inv(family - 1),), (inv(q - 1),))
    if any(r.period == (q - 1,) and not r.is_one for r in (raw1, raw2)):
        # a (q-1)-tail is not a legal spelling, so that preimage does not exist
        raise DomainError(f"family {family} has no collision under theta = {sys.perm}")
    x1, x2 = canonicalize(raw1), canonicalize(raw2)
    return CollisionPair(x1, x2, eval_f(x1, sys))


def collision_families(sys: SalemSystem) -> list[int]:
    out = []
    for a in range(1, sys.q):
        try:
            collision_pair((), a, sys)
        except DomainError:
            continue
        out.append(a)
    return out


def _short_expansions(q: int, length: int):
    """Canonical zero-tail expansions with exactly ``length`` digits (0 included at length 0)."""
    if length == 0:
        yield DigitExpansion(q)
        return
    for word in itertools.product(range(q), repeat=length):
        if word[-1] != 0:
            yield DigitExpansion(q, word)


def monotonicity_witness(sys: SalemSystem, max_len: int = 3) -> tuple[DigitExpansion, DigitExpansion] | None:
    """Points x1 < x2 with f(x1) > f(x2), shortest spellings first.

    Returns None when no pair exists among spellings up to ``max_len``
    digits (always so for the identity relabelling).
    """
    params = sys.params
    pool: list[DigitExpansion] = []
    for length in range(max_len + 1):
        pool.extend(_short_expansions(sys.q, length))
        pool.sort(key=lambda e: value_of(e, params))
        vals = [(value_of(e, params), eval_f(e, sys)) for e in pool]
        for i, j in itertools.combinations(range(len(pool)), 2):
            if vals[i][0] < vals[j][0] and vals[i][1] > vals[j][1]:
                return pool[i], pool[j]
    return None


def periodic_expansions(q: int, max_len: int):
    """Distinct canonical expansions with len(prefix) + len(period) <= max_len."""
    seen = set()
    for total in range(1, max_len + 1):
        for plen in range(total):
            for word in itertools.product(range(q), repeat=total):
                e = canonicalize(DigitExpansion(q, word[:plen], word[plen:]))
                if e not in seen:
                    seen.add(e)
                    yield e


def fixed_point_scan(sys: SalemSystem, max_len: int) -> list[DigitExpansion]:
    """Expansions of combined length <= ``max_len`` with f(x) = x exactly."""
    if max_len < 1:
        raise DomainError("max_len must be at least 1")
    if sys.perm.is_identity:
        raise DomainError("identity relabelling: every point is fixed")
    return [e for e in periodic_expansions(sys.q, max_len)
            if eval_f(e, sys) == value_of(e, sys.params)]


# -- difference quotients ---------------------------------------------------

@dataclass(frozen=True)
class QuotientTerm:
    n0: int
    old_digit: int
    new_digit: int
    quotient: Fraction
    factor: Fraction
    running_product: Fraction


DigitRule = Union[int, Mapping[int, int], Callable[[int], int]]


def _rule(j_rule: DigitRule) -> Callable[[int], int]:
    if isinstance(j_rule, int):
        return lambda i: j_rule
    if isinstance(j_rule, Mapping):
        return lambda i: j_rule.get(i, i)
    return j_rule


def difference_quotient_trace(x0: DigitExpansion, n0_max: int, j_rule: DigitRule,
                              sys: SalemSystem) -> list[QuotientTerm]:
    """(f(x_n) - f(x0)) / (x_n - x0) where x_n differs from x0 in digit n0 only.

    Each term also carries its factorisation: a bounded fraction built from
    the two digits and the common tail, times the running product
    prod_{r < n0} p[theta(c_r)] / p[c_r].
    """
    if x0.truncated:
        raise DomainError("x0 must be eventually periodic")
    rule = _rule(j_rule)
    p, beta = sys.params.p, sys.params.beta
    th = sys.perm
    fx0 = f_of_spelling(x0, sys)
    vx0 = value_of(x0, sys.params)
    out = []
    product = Fraction(1)
    for n0 in range(1, n0_max + 1):
        i = x0.digit(n0)
        j = rule(i)
        if not 0 <= j < sys.q:
            raise DomainError(f"replacement digit {j} not valid in base {sys.q}")
        if j != i:
            tail = shift(x0, n0)
            head = tuple(x0.digits(n0 - 1))
            xn = DigitExpansion(sys.q, head + (j,) + tail.prefix, tail.period)
            quotient = (f_of_spelling(xn, sys) - fx0) / (value_of(xn, sys.params) - vx0)
            X = value_of(tail, sys.params)
            F = f_of_spelling(tail, sys)
            factor = ((beta[th(j)] - beta[th(i)] + (p[th(j)] - p[th(i)]) * F)
                      / (beta[j] - beta[i] + (p[j] - p[i]) * X))
            out.append(QuotientTerm(n0, i, j, quotient, factor, product))
        product *= p[th(i)] / p[i]
    return out


# -- digit statistics -------------------------------------------------------

@dataclass(frozen=True)
class FrequencyReport:
    k: int
    counts: tuple[int, ...]
    log_ratio: float
    ratio_product: Fraction

    @property
    def frequencies(self) -> tuple[Fraction, ...]:
        return tuple(Fraction(c, self.k) for c in self.counts)


def digit_frequency(source: DigitExpansion | Sequence[int], k: int, sys: SalemSystem) -> FrequencyReport:
    """Digit counts over the first ``k`` digits and sum of ln(p[theta(c)] / p[c])."""
    if k < 1:
        raise DomainError("k must be at least 1")
    if isinstance(source, DigitExpansion):
        digits = source.digits(k)
    else:
        digits = list(source[:k])
        if len(digits) < k:
            raise DomainError(f"stream has only {len(digits)} digits, need {k}")
    q = sys.q
    counts = [0] * q
    for d in digits:
        counts[int(d)] += 1
    p = sys.params.p
    product = Fraction(1)
    log_ratio = 0.0
    for t, n in enumerate(counts):
        ratio = p[sys.perm(t)] / p[t]
        product *= ratio ** n
        log_ratio += n * math.log(ratio)
    return FrequencyReport(k, tuple(counts), log_ratio, product)


def expected_log_slope(sys: SalemSystem) -> float:
    """E ln(p[theta(d)] / p[d]) for a Lebesgue-random digit d.

    Non-positive by Jensen (sum_t p_t * p[theta(t)]/p_t = 1); the product of
    ratios along a typical stream decays like exp(k * this).
    """
    p = sys.params.p
    return sum(float(p[t]) * math.log(p[sys.perm(t)] / p[t]) for t in range(sys.q))


def lebesgue_streams(params: PartitionParams, count: int, length: int, seed: int = 0) -> np.ndarray:
    """``count`` Lebesgue-random digit streams of ``length`` digits each."""
    rng = np.random.default_rng(np.random.SeedSequence(seed))
    probs = np.array([float(v) for v in params.p])
    return rng.choice(params.q, size=(count, length), p=probs / probs.sum())


def log_abs(v: Fraction) -> float:
    """ln |v| for fractions too large for float."""
    v = abs(v)
    if v == 0:
        return -math.inf
    return math.log(v.numerator) - math.log(v.denominator)
