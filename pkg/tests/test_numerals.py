from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from oracles import base_q_value, series_bracket, stream
from salemperm.numerals import (
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

P = PartitionParams.parse("1/2,1/4,1/4")
U = PartitionParams.uniform(3)


def ex(text, q=3):
    return parse_expansion(text, q)


digit_words = st.lists(st.integers(0, 2), max_size=7).map(tuple)
raw_expansions = st.builds(lambda a, b: DigitExpansion(3, a, b), digit_words, digit_words)
expansions = raw_expansions.map(canonicalize)
weights = st.lists(st.integers(1, 20), min_size=3, max_size=3).map(
    lambda w: PartitionParams(tuple(Fraction(v, sum(w)) for v in w)))


# -- parsing ----------------------------------------------------------------

@pytest.mark.parametrize("text, prefix, period", [
    ("1(0)", (1,), ()),
    ("02(1)", (0, 2), (1,)),
    ("01(2)", (0, 2), ()),
    ("(2)", (), (2,)),
    ("(0)", (), ()),
    ("0", (), ()),
    ("1(21)", (), (1, 2)),
    ("2(2)", (), (2,)),
    ("012(1212)", (0,), (1, 2)),
])
def test_parse_canonical(text, prefix, period):
    e = ex(text)
    assert (e.prefix, e.period) == (prefix, period)


@pytest.mark.parametrize("text", ["", "()", "1()", "(1", "1)", " 1", "1(2)3", "a", "1 (0)"])
def test_parse_syntax_errors(text):
    with pytest.raises(ParseError):
        ex(text)


def test_parse_digit_too_large_names_token():
    with pytest.raises(MalformedDigitError, match="'3'"):
        ex("013")
    with pytest.raises(MalformedDigitError):
        parse_expansion("1(2)", 2)


def test_other_bases():
    e = parse_expansion("1(0)", 2)
    assert value_of(e, PartitionParams.uniform(2)) == Fraction(1, 2)
    assert parse_expansion("01(1)", 2) == parse_expansion("1", 2)


def test_format():
    assert format_expansion(ex("02(1)")) == "02(1)"
    assert format_expansion(ex("1")) == "1(0)"
    assert format_expansion(DigitExpansion(3)) == "(0)"
    assert format_expansion(DigitExpansion(3, (1, 2), truncated=True)) == "12..."


@given(expansions)
@settings(max_examples=1000)
def test_round_trip(e):
    assert parse_expansion(format_expansion(e), 3) == e


@pytest.mark.parametrize("text, value", [
    ("1/2", Fraction(1, 2)), ("0.25", Fraction(1, 4)), ("3", Fraction(3)), (".5", Fraction(1, 2)),
])
def test_parse_rational(text, value):
    assert parse_rational(text) == value


@pytest.mark.parametrize("text", ["1/0", "x", "1/-2", "1e-3", ""])
def test_parse_rational_rejects(text):
    with pytest.raises(ParseError):
        parse_rational(text)


# -- params -----------------------------------------------------------------

def test_params_beta():
    assert P.beta == (0, Fraction(1, 2), Fraction(3, 4))
    assert P.q == 3


def test_params_binary():
    assert PartitionParams.parse("1/2,1/2").q == 2


@pytest.mark.parametrize("text", ["1/2,1/4,1/8", "1,0,0", "0.5,0.5,0", "1/2"])
def test_params_invalid(text):
    with pytest.raises(DomainError):
        PartitionParams.parse(text)


# -- canonical forms --------------------------------------------------------

def test_canonicalize_examples():
    assert canonicalize(DigitExpansion(3, (1, 1), (2,))) == DigitExpansion(3, (1, 2))
    assert canonicalize(DigitExpansion(3, (), (2,))) == DigitExpansion(3, (), (2,))
    assert canonicalize(DigitExpansion(3, (0,), (0,))) == DigitExpansion(3)


@given(raw_expansions, weights)
def test_canonicalize_keeps_value_and_is_idempotent(e, params):
    c = canonicalize(e)
    assert value_of(c, params) == value_of(e, params)
    assert canonicalize(c) == c
    if c.period == (2,):
        assert c.prefix == ()
    if not c.period:
        assert not c.prefix or c.prefix[-1] != 0


# -- values -----------------------------------------------------------------

def test_value_examples():
    assert value_of(ex("1(0)"), P) == Fraction(1, 2)
    # 0 + (1/2)(3/4) + (1/2)(1/4)(1/2)/(1 - 1/4)
    assert value_of(ex("02(1)"), P) == Fraction(11, 24)
    assert value_of(ex("(2)"), P) == 1
    assert value_of(ex("(2)"), U) == 1


def test_value_base_mismatch():
    with pytest.raises(DomainError):
        value_of(parse_expansion("1", 2), P)


@given(expansions, weights)
def test_value_matches_series_oracle(e, params):
    lo, hi = series_bracket(stream(e.prefix, e.period), params.p, 40)
    assert lo <= value_of(e, params) <= hi


@given(expansions)
def test_uniform_weights_give_ternary_value(e):
    assert value_of(e, U) == base_q_value(e.prefix, e.period, 3)


def _lex_less(a, b):
    n = max(len(a.prefix), len(b.prefix)) + max(len(a.period), 1) * max(len(b.period), 1) + 1
    return a.digits(n) < b.digits(n)


@given(expansions, expansions, weights)
@settings(max_examples=300)
def test_value_order_agrees_with_lexicographic_order(a, b, params):
    va, vb = value_of(a, params), value_of(b, params)
    if a == b:
        assert va == vb
    else:
        assert (va < vb) == _lex_less(a, b)
        assert va != vb


@given(digit_words, st.integers(1, 2), weights)
def test_dual_spelling_identity(c, i, params):
    zero_tail = DigitExpansion(3, c + (i,))
    two_tail = DigitExpansion(3, c + (i - 1,), (2,))
    assert value_of(zero_tail, params) == value_of(two_tail, params)
    assert canonicalize(two_tail) == canonicalize(zero_tail)


# -- greedy inverse ---------------------------------------------------------

def test_digits_of_examples():
    assert digits_of(Fraction(1, 2), P) == ex("1(0)")
    assert digits_of(Fraction(11, 24), P) == ex("02(1)")
    assert digits_of(0, P) == DigitExpansion(3)
    assert digits_of(1, P) == ex("(2)")


def test_digits_of_truncates_when_remainders_do_not_recur():
    # dividing by 2/5 doubles the denominator's power of 2 on every 0/1 digit
    params = PartitionParams.parse("2/5,2/5,1/5")
    e = digits_of(Fraction(1, 3), params, count=30)
    assert e.truncated and len(e.prefix) == 30
    lo, hi = series_bracket(iter(e.prefix), params.p, 30)
    assert value_of(e, params) == lo
    assert lo <= Fraction(1, 3) < hi


def test_digits_of_rejects_out_of_range():
    with pytest.raises(DomainError):
        digits_of(Fraction(3, 2), P)
    with pytest.raises(DomainError):
        digits_of(-1, P)


@given(expansions, weights)
def test_digits_of_inverts_value(e, params):
    y = value_of(e, params)
    back = digits_of(y, params)
    assert not back.truncated
    assert back == e
    assert value_of(back, params) == y


# -- shift ------------------------------------------------------------------

def test_shift_examples():
    e = ex("02(1)")
    assert shift(e, 0) == e
    assert shift(e, 1) == ex("2(1)")
    assert shift(e, 3) == ex("(1)")
    assert shift(ex("1(0)"), 5) == DigitExpansion(3)
    assert shift(ex("(12)"), 1) == ex("(21)")
    assert value_of(e, P) == 0 + Fraction(1, 2) * value_of(shift(e, 1), P)
    assert value_of(shift(e, 1), P) == Fraction(11, 12)


@given(expansions, weights, st.integers(0, 12))
def test_shift_telescoping(e, params, n):
    s = shift(e, n)
    assert canonicalize(s) == s
    i = s.digit(1)
    assert value_of(s, params) == params.beta[i] + params.p[i] * value_of(shift(e, n + 1), params)


# -- cylinders --------------------------------------------------------------

def test_cylinder_examples():
    c = cylinder([0, 2], P)
    assert (c.inf, c.length, c.sup) == (Fraction(3, 8), Fraction(1, 8), Fraction(1, 2))
    c = cylinder([], P)
    assert (c.inf, c.length, c.sup) == (0, 1, 1)
    c = cylinder([2], U)
    assert (c.inf, c.length) == (Fraction(2, 3), Fraction(1, 3))
    with pytest.raises(MalformedDigitError):
        cylinder([3], P)


@given(digit_words, weights)
def test_cylinder_nesting(base, params):
    parent = cylinder(base, params)
    kids = [cylinder(base + (t,), params) for t in range(3)]
    assert sum(k.length for k in kids) == parent.length
    assert kids[0].inf == parent.inf and kids[-1].sup == parent.sup
    for a, b in zip(kids, kids[1:]):
        assert a.sup == b.inf
    assert parent.inf == value_of(DigitExpansion(3, base), params)


# -- boundary points --------------------------------------------------------

def test_is_p3_rational():
    assert is_p3_rational(ex("1(0)"))
    assert not is_p3_rational(ex("02(1)"))
    assert not is_p3_rational(ex("(0)"))
    assert is_p3_rational(ex("(2)"))
    assert is_p3_rational(DigitExpansion(3, (0, 1), (2,)))  # non-canonical spelling of 02(0)
