"""Randomized invariant suites run by ``salemperm verify``.

Each suite draws its cases from a seeded :class:`random.Random`, counts
failures, and keeps the first one for the report.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction

from .analysis import (
    approach_values,
    collision_families,
    collision_pair,
    cylinder_increment,
    increment_formula,
    integral_bracket,
    integral_closed_form,
    integral_monte_carlo,
    jump_at,
)
from .numerals import (
    DigitExpansion,
    PartitionParams,
    canonicalize,
    cylinder,
    format_expansion,
    parse_expansion,
    shift,
    value_of,
)
from .salem import SalemSystem, check_functional_equation, eval_f
from .selfaffine import deterministic_points, ifs_maps, off_graph

SUITES = ("numerals", "equations", "affine", "collisions", "jumps", "integral")


@dataclass
class SuiteResult:
    suite: str
    cases: int = 0
    failures: int = 0
    first_failure: str = ""

    def record(self, ok: bool, detail):
        self.cases += 1
        if not ok:
            self.failures += 1
            if not self.first_failure:
                self.first_failure = detail() if callable(detail) else str(detail)

    @property
    def passed(self) -> bool:
        return self.failures == 0


def random_expansion(rng: random.Random, q: int, max_prefix: int = 6, max_period: int = 4) -> DigitExpansion:
    prefix = tuple(rng.randrange(q) for _ in range(rng.randint(0, max_prefix)))
    period = tuple(rng.randrange(q) for _ in range(rng.randint(0, max_period)))
    return canonicalize(DigitExpansion(q, prefix, period))


def random_p_rational(rng: random.Random, q: int, max_len: int = 8) -> DigitExpansion:
    """Interior point with two spellings: a zero-tail word ending in a nonzero digit."""
    word = [rng.randrange(q) for _ in range(rng.randint(0, max_len - 1))]
    word.append(rng.randrange(1, q))
    return DigitExpansion(q, tuple(word))


def random_params(rng: random.Random, q: int = 3, den: int = 60):
    """Random weights with denominator ``den``, all positive."""
    cuts = sorted(rng.sample(range(1, den), q - 1))
    edges = [0] + cuts + [den]
    return PartitionParams(tuple(Fraction(b - a, den) for a, b in zip(edges, edges[1:])))


def suite_numerals(sys: SalemSystem, rng: random.Random, cases: int = 500) -> SuiteResult:
    res = SuiteResult("numerals")
    q, params = sys.q, sys.params
    p, beta = params.p, params.beta
    for _ in range(cases):
        e = random_expansion(rng, q)
        res.record(parse_expansion(format_expansion(e), q) == e, lambda: f"round trip {e}")
        d = shift(e, 1)
        i = e.digit(1)
        res.record(value_of(e, params) == beta[i] + p[i] * value_of(d, params),
                   lambda: f"shift telescoping at {e}")
        c = tuple(rng.randrange(q) for _ in range(rng.randint(0, 5)))
        j = rng.randrange(1, q)
        res.record(value_of(DigitExpansion(q, c + (j,)), params)
                   == value_of(DigitExpansion(q, c + (j - 1,), (q - 1,)), params),
                   lambda: f"dual spelling {c}+{j}")
        parent = cylinder(c, params)
        kids = [cylinder(c + (t,), params) for t in range(q)]
        ok = (sum(k.length for k in kids) == parent.length
              and all(parent.inf <= k.inf and k.sup <= parent.sup for k in kids))
        res.record(ok, lambda: f"cylinder nesting under {c}")
    return res


def suite_equations(sys: SalemSystem, rng: random.Random, cases: int = 1000) -> SuiteResult:
    res = SuiteResult("equations")
    for _ in range(cases):
        e = random_expansion(rng, sys.q)
        n = rng.randint(1, 10)
        r = check_functional_equation(e, sys, n)
        res.record(r == 0, lambda: f"residual {r} at {e}, n={n}")
    return res


def suite_affine(sys: SalemSystem, rng: random.Random, depth: int = 6, cases: int = 500) -> SuiteResult:
    res = SuiteResult("affine")
    seed = (Fraction(0), eval_f(DigitExpansion(sys.q), sys))
    pts = deterministic_points(sys, depth, seed_point=seed)
    bad = off_graph(pts.points, sys)
    res.cases += len(pts)
    if bad:
        res.failures += len(bad)
        res.first_failure = f"point {bad[0]} is off the graph"
    maps = ifs_maps(sys)
    for _ in range(cases):
        e = random_expansion(rng, sys.q)
        if e.is_one:
            continue
        pt = (value_of(e, sys.params), eval_f(e, sys))
        t = rng.randrange(sys.q)
        image = maps[t](pt)
        res.record(not off_graph([image], sys), lambda: f"map {t} sends {e} off the graph")
        back = maps[e.digit(1)]
        tail = shift(e, 1)
        res.record(back((value_of(tail, sys.params), eval_f(tail, sys))) == pt,
                   lambda: f"{e} is not the image of its shift")
    return res


def suite_collisions(sys: SalemSystem, rng: random.Random, prefixes: int = 500) -> SuiteResult:
    res = SuiteResult("collisions")
    families = collision_families(sys)
    for _ in range(prefixes):
        c = tuple(rng.randrange(sys.q) for _ in range(rng.randint(0, 8)))
        for fam in families:
            pair = collision_pair(c, fam, sys)
            ok = (eval_f(pair.x1, sys) == eval_f(pair.x2, sys)
                  and value_of(pair.x1, sys.params) != value_of(pair.x2, sys.params))
            res.record(ok, lambda: f"family {fam} prefix {c}")
    return res


def suite_jumps(sys: SalemSystem, rng: random.Random, cases: int = 100, depth: int = 40) -> SuiteResult:
    res = SuiteResult("jumps")
    bound = sys.max_weight ** depth
    require_jump = sys.perm.table == (0, 2, 1)
    for _ in range(cases):
        x0 = random_p_rational(rng, sys.q)
        rep = jump_at(x0, sys)
        left, right = approach_values(x0, sys, depth)
        ok = abs(left - rep.left_limit) <= bound and abs(right - rep.right_limit) <= bound
        if require_jump:
            ok = ok and rep.jump != 0
        res.record(ok, lambda: f"limits at {x0}")
    return res


def suite_integral(sys: SalemSystem, rng: random.Random, rank: int = 8,
                   samples: int = 100_000, seed: int = 0) -> SuiteResult:
    res = SuiteResult("integral")
    exact = integral_closed_form(sys)
    if sys.perm.table == (0, 2, 1):
        p0, p1, p2 = sys.params.p
        swap_form = (p1 * p1 + p0 * p1 + p0 * p2) / (1 - p0 * p0 - 2 * p1 * p2)
        res.record(exact == swap_form, lambda: f"closed form {exact} != {swap_form}")
    if sys.perm.is_identity:
        res.record(exact == Fraction(1, 2), lambda: f"identity integral {exact}")
    lo, hi = integral_bracket(sys, rank)
    res.record(lo <= exact <= hi, lambda: f"{exact} outside [{lo}, {hi}]")
    est, se = integral_monte_carlo(sys, samples, seed)
    res.record(abs(est - float(exact)) <= 4 * se, lambda: f"Monte Carlo {est} +- {se} vs {exact}")
    for _ in range(200):
        c = tuple(rng.randrange(sys.q) for _ in range(rng.randint(0, 8)))
        res.record(cylinder_increment(c, sys) == increment_formula(c, sys),
                   lambda: f"increment formula at {c}")
    return res


RUNNERS = {
    "numerals": suite_numerals,
    "equations": suite_equations,
    "affine": suite_affine,
    "collisions": suite_collisions,
    "jumps": suite_jumps,
    "integral": suite_integral,
}


def run_suites(sys: SalemSystem, suite: str = "all", seed: int = 0) -> list[SuiteResult]:
    names = SUITES if suite == "all" else (suite,)
    out = []
    for name in names:
        rng = random.Random(f"{seed}:{name}")
        out.append(RUNNERS[name](sys, rng))
    return out
