from fractions import Fraction
import random

import gmpy2
import pytest
from hypothesis import given, strategies as st

from bilevel_knapsack.errors import InputError, InvariantViolation
from bilevel_knapsack.pwl import (Pwl, Q, envelope_of_partials, evaluate, fmt, lower_envelope,
                                  maximize, maximizers, weighted_sum)
from oracles import interp
from example_data import CONV_ENV, FINITE_ENV, FIVE_F1, FIVE_F2


# ---- rationals

def test_q_accepts_exact_inputs():
    assert Q("3/6") == gmpy2.mpq(1, 2)
    assert Q(" -7 / 14 ") == gmpy2.mpq(-1, 2)
    assert Q(Fraction(2, 4)) == gmpy2.mpq(1, 2)
    assert Q(3, 9) == gmpy2.mpq(1, 3)
    assert Q(5).denominator == 1


@pytest.mark.parametrize("bad", [0.5, True, "1.5", "1/0", "abc", None])
def test_q_rejects_inexact_or_malformed(bad):
    with pytest.raises(InputError):
        Q(bad)


def test_q_zero_denominator():
    with pytest.raises(ZeroDivisionError):
        Q(1, 0)


def test_canonical_form():
    q = Q("-6/4")
    assert (q.numerator, q.denominator) == (-3, 2)
    assert fmt(q) == "-3/2"
    assert fmt(Q(4)) == "4"


# ---- construction and evaluation

def test_breakpoints_must_increase():
    with pytest.raises(InputError):
        Pwl([(0, 0), (0, 1)])
    with pytest.raises(InputError):
        Pwl([])


def test_collinear_points_are_pruned():
    f = Pwl([(0, 0), (1, 1), (2, 2), (3, 0)])
    assert f.points == [(0, 0), (2, 2), (3, 0)]
    assert f == Pwl([(0, 0), (2, 2), (3, 0)])


def test_evaluate_examples():
    assert evaluate(Pwl([(0, 0), (1, 2), (2, 1)]), Q(3, 2)) == Q(3, 2)
    assert evaluate(Pwl([(0, 0)]), 0) == 0
    assert evaluate(Pwl(CONV_ENV), Q(5, 3)) == Q(4, 3)


def test_evaluate_outside_domain():
    with pytest.raises(InputError):
        evaluate(Pwl([(0, 0), (1, 1)]), 2)


def test_slope_right_and_restrict():
    f = Pwl(FIVE_F1)
    assert f.slope_right(1) == -1
    assert f.slope_right(Q(1, 2)) == 2
    with pytest.raises(InputError):
        f.slope_right(5)
    assert f.restrict(Q(3, 2), Q(5, 2)).points == [(Q(3, 2), Q(3, 2)), (2, 1), (Q(5, 2), Q(3, 2))]
    assert f.restrict(2, 2).points == [(2, 1)]


# ---- lower envelope

def test_envelope_single_is_identity():
    f = Pwl(FIVE_F1)
    assert lower_envelope([f]) == f


def test_envelope_worked_example():
    g = lower_envelope([Pwl(FIVE_F1), Pwl(FIVE_F2)])
    assert g == Pwl(FINITE_ENV)
    assert len(g) == 9


def test_envelope_errors():
    with pytest.raises(InputError):
        lower_envelope([])
    with pytest.raises(InputError):
        lower_envelope([Pwl([(0, 0), (1, 0)]), Pwl([(0, 0), (2, 0)])])


def _random_pwl(rng, lo, hi, k):
    xs = sorted({lo, hi} | {Fraction(rng.randint(lo * 6, hi * 6), 6) for _ in range(k)})
    return Pwl([(x, Fraction(rng.randint(-12, 12), rng.randint(1, 4))) for x in xs])


def test_envelope_vs_naive_min_random():
    rng = random.Random(5)
    for _ in range(40):
        fs = [_random_pwl(rng, 0, 4, rng.randint(0, 6)) for _ in range(5)]
        g = lower_envelope(fs)
        for _ in range(200):
            b = Fraction(rng.randint(0, 4 * 97), 97)
            assert interp(g.points, b) == min(interp(f.points, b) for f in fs)


def test_envelope_breakpoints_canonical():
    rng = random.Random(9)
    for _ in range(30):
        g = lower_envelope([_random_pwl(rng, 0, 3, 4) for _ in range(4)])
        assert all(x0 < x1 for x0, x1 in zip(g.xs, g.xs[1:]))
        for k in range(1, len(g) - 1):
            s0 = (g.ys[k] - g.ys[k - 1]) / (g.xs[k] - g.xs[k - 1])
            s1 = (g.ys[k + 1] - g.ys[k]) / (g.xs[k + 1] - g.xs[k])
            assert s0 != s1


rat = st.fractions(min_value=-10, max_value=10, max_denominator=12)


@st.composite
def pwls(draw, lo=0, hi=4):
    inner = draw(st.lists(st.fractions(min_value=lo, max_value=hi, max_denominator=8), max_size=5))
    xs = sorted({Fraction(lo), Fraction(hi)} | set(inner))
    return Pwl([(x, draw(rat)) for x in xs])


@given(st.lists(pwls(), min_size=1, max_size=5), st.randoms())
def test_envelope_order_independent_and_idempotent(fs, r):
    g = lower_envelope(fs)
    shuffled = list(fs)
    r.shuffle(shuffled)
    assert lower_envelope(shuffled) == g
    assert lower_envelope([g, g]) == g
    assert lower_envelope(fs + [g]) == g


@given(pwls(), pwls(), st.fractions(min_value=0, max_value=4, max_denominator=50))
def test_envelope_pair_pointwise(f, g, b):
    assert evaluate(lower_envelope([f, g]), b) == min(evaluate(f, b), evaluate(g, b))


# ---- partial envelope

def test_partials_min_where_defined():
    f = Pwl([(0, 0), (2, 2)])
    g = Pwl([(1, 0), (3, 0)])
    h = Pwl([(1, 1), (3, 3)])
    with pytest.raises(InvariantViolation):
        envelope_of_partials([f, g])  # jumps from 1 to 0 at b=1
    e = envelope_of_partials([f, h])
    assert e.points == [(0, 0), (3, 3)]


def test_partials_gap_is_input_error():
    with pytest.raises(InputError):
        envelope_of_partials([Pwl([(0, 0), (1, 0)]), Pwl([(2, 0), (3, 0)])])


def test_partials_point_function():
    e = envelope_of_partials([Pwl.point(0, 0), Pwl([(0, 0), (1, -1)])])
    assert e.points == [(0, 0), (1, -1)]


# ---- weighted sum

def test_weighted_sum_examples():
    f1, f2 = Pwl(FIVE_F1), Pwl(FIVE_F2)
    s = weighted_sum([f1, f2], [Q(1, 2), Q(1, 2)])
    assert evaluate(s, 2) == Q(3, 2)
    assert weighted_sum([f1], [1]) == f1
    assert weighted_sum([f1, f2], [1, 0]) == f1


def test_weighted_sum_errors():
    f = Pwl(FIVE_F1)
    with pytest.raises(InputError):
        weighted_sum([], [])
    with pytest.raises(InputError):
        weighted_sum([f], [1, 2])
    with pytest.raises(InputError):
        weighted_sum([f], [-1])


@given(st.lists(pwls(), min_size=1, max_size=4), st.data())
def test_weighted_sum_linear_at_breakpoints(fs, data):
    ws = data.draw(st.lists(st.fractions(min_value=0, max_value=3, max_denominator=7),
                            min_size=len(fs), max_size=len(fs)))
    s = weighted_sum(fs, ws)
    for b in {x for f in fs for x in f.xs}:
        assert evaluate(s, b) == sum(Q(w) * evaluate(f, b) for f, w in zip(fs, ws))


# ---- maximize

def test_maximize_examples():
    assert maximize(Pwl([(0, 1), (5, 1)]), 0, 5) == (0, 1)
    assert maximize(Pwl(CONV_ENV), 0, 5) == (Q(5, 3), Q(4, 3))
    assert maximize(Pwl(FINITE_ENV), 0, 5) == (Q(5, 2), Q(3, 2))
    assert maximize(Pwl(FIVE_F1), Q(1, 2), Q(1, 2)) == (Q(1, 2), 1)


def test_maximize_errors():
    f = Pwl(FIVE_F1)
    with pytest.raises(InputError):
        maximize(f, 3, 2)
    with pytest.raises(InputError):
        maximize(f, 0, 6)


def test_maximizers_lists_all():
    assert maximizers(Pwl(CONV_ENV)) == [(Q(5, 3), Q(5, 3)), (Q(10, 3), Q(10, 3))]
    assert maximizers(Pwl([(0, 0), (1, 1), (2, 1), (3, 0)])) == [(1, 2)]


@given(pwls(), st.lists(st.fractions(min_value=0, max_value=4, max_denominator=1000), max_size=30))
def test_maximize_dominates_samples(f, bs):
    b, v = maximize(f)
    assert evaluate(f, b) == v
    assert all(evaluate(f, x) <= v for x in bs)
    assert all(evaluate(f, x) < v for x in f.xs if x < b)
