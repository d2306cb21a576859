import random
from fractions import Fraction
from itertools import combinations

import pytest
from hypothesis import given, strategies as st

from bilevel_knapsack import (CapacityRange, Items, Pwl, Q, TiePolicy, dantzig_min, follower_order,
                              follower_solve, leader_pwl, normalize_objective, solve_certain)
from bilevel_knapsack.certain import FractionalPrefix, fill
from bilevel_knapsack.errors import InputError
from bilevel_knapsack.pwl import evaluate
from oracles import follower_leader_value, prefix_min
from example_data import FIVE_A, FIVE_C1, FIVE_C2, FIVE_D, FIVE_F1, FIVE_F2

FIVE = Items(FIVE_A, FIVE_D)


def test_items_validation():
    with pytest.raises(InputError):
        Items([1, 0], [1, 1])
    with pytest.raises(InputError):
        Items([1, 2], [1])
    with pytest.raises(InputError):
        Items([], [])
    with pytest.raises(InputError):
        CapacityRange(2, 1)
    with pytest.raises(InputError):
        CapacityRange(0, 6).check(FIVE)


def test_tie_policy_coerce():
    assert TiePolicy.coerce("Optimistic") is TiePolicy.OPTIMISTIC
    with pytest.raises(InputError):
        TiePolicy.coerce("neutral")


# ---- objective forms

def test_normalize_examples():
    d_c, _, _ = normalize_objective([1, 2], 1, [1, 2])
    assert d_c == (0, 0)
    d_c, d_b, delta_b = normalize_objective([3, 1], 2, [1, 1])
    assert (d_c, d_b, delta_b) == ((1, -1), (2, 0), 1)
    d_c, _, _ = normalize_objective([4, -1], 0, [2, 1])
    assert d_c == (4, -1)
    with pytest.raises(InputError):
        normalize_objective([1], 1, [1, 1])


def test_normalize_three_forms_agree():
    rng = random.Random(3)
    for _ in range(200):
        n = rng.randint(1, 6)
        a = [Fraction(rng.randint(1, 9), rng.randint(1, 3)) for _ in range(n)]
        d = [Fraction(rng.randint(0, 12), rng.randint(1, 4)) for _ in range(n)]
        delta = Fraction(rng.randint(0, 8), rng.randint(1, 3))
        d_c, d_b, delta_b = normalize_objective(d, delta, a)
        assert all(v >= 0 for v in d_b) and delta_b >= 0
        x = [Fraction(rng.randint(0, 5), 5) for _ in range(n)]
        b = sum(ai * xi for ai, xi in zip(a, x))
        raw = sum(di * xi for di, xi in zip(d, x)) - delta * b
        assert sum(Q(v) * xi for v, xi in zip(d_c, x)) == raw
        assert sum(Q(v) * xi for v, xi in zip(d_b, x)) - delta_b * b == raw


# ---- follower

def test_follower_worked_example():
    x = follower_solve(FIVE, FIVE_C2, Q(3, 2))
    assert x == (Q(1, 2), 0, 0, 0, 1)
    assert sum(d * xi for d, xi in zip(FIVE.d, x)) == 1


def test_follower_extremes():
    assert follower_solve(FIVE, FIVE_C1, 5) == (1,) * 5
    assert follower_solve(FIVE, FIVE_C1, 0) == (0,) * 5
    with pytest.raises(InputError):
        follower_solve(FIVE, FIVE_C1, 6)
    with pytest.raises(InputError):
        follower_solve(FIVE, [1, 1, 1, 1, 0], 1)


def test_tie_rules():
    items = Items([1, 1, 1], [0, 3, -2])
    c = [2, 2, 2]
    assert follower_order(items, c, TiePolicy.OPTIMISTIC) == [1, 0, 2]
    assert follower_order(items, c, TiePolicy.PESSIMISTIC) == [2, 0, 1]
    same = Items([1, 2], [1, 2])
    assert follower_order(same, [1, 2], "optimistic") == [0, 1]


def test_fill_has_dedicated_last_item():
    items = Items([1, 1, 1], [0, 0, 0])
    p = fill(items, [2, 0, 1], 2)
    assert (p.J, p.j, p.lam) == (frozenset({0, 2}), 0, 1)
    assert fill(items, [0, 1, 2], 0) is FractionalPrefix.EMPTY


def _rand_instance(rng, n):
    a = [Fraction(rng.randint(1, 4), rng.randint(1, 2)) for _ in range(n)]
    c = [rng.randint(1, 4) * a[i] / rng.randint(1, 2) for i in range(n)]
    d = [Fraction(rng.randint(-4, 4)) for _ in range(n)]
    return a, c, d


@pytest.mark.parametrize("tie", ["optimistic", "pessimistic"])
def test_follower_matches_vertex_enumeration(tie):
    rng = random.Random(11)
    for _ in range(150):
        n = rng.randint(1, 5)
        a, c, d = _rand_instance(rng, n)
        items = Items(a, d)
        b = Fraction(rng.randint(0, 4 * int(sum(a))), 4)
        if b > sum(a):
            b = sum(a)
        x = follower_solve(items, c, b, tie)
        assert sum(Q(ai) * xi for ai, xi in zip(a, x)) == b
        assert sum(1 for xi in x if 0 < xi < 1) <= 1
        got = sum(Q(di) * xi for di, xi in zip(d, x))
        assert got == follower_leader_value(a, c, d, b, tie)
        assert got == evaluate(leader_pwl(items, c, tie), b)


# ---- minimizing Dantzig

def test_dantzig_min_examples():
    items = Items([1, 1, 1], [-1, 1, 0])
    p = dantzig_min({0, 1, 2}, items, Q(3, 2))
    assert (p.J, p.j, p.lam) == (frozenset({0, 2}), 2, Q(1, 2))
    assert p.value(items) == -1
    p = dantzig_min({0}, Items([2], [5]), 2)
    assert (p.J, p.j, p.lam) == (frozenset({0}), 0, 1)
    assert dantzig_min({0, 1}, Items([1, 1], [0, 0]), 1).value(Items([1, 1], [0, 0])) == 0
    with pytest.raises(InputError):
        dantzig_min({0}, items, 2)
    with pytest.raises(InputError):
        dantzig_min(set(), items, 1)


def test_dantzig_min_is_minimal():
    rng = random.Random(4)
    for _ in range(100):
        n = rng.randint(1, 6)
        a = [Fraction(rng.randint(1, 5), rng.randint(1, 2)) for _ in range(n)]
        d = [Fraction(rng.randint(-5, 5), rng.randint(1, 3)) for _ in range(n)]
        items = Items(a, d)
        for r in range(1, n + 1):
            for sub in combinations(range(n), r):
                cap = sum(a[i] for i in sub)
                b = cap * Fraction(rng.randint(1, 8), 8)
                p = dantzig_min(sub, items, b)
                assert p.J <= set(sub) and p.weight(items) == b and 0 < p.lam <= 1
                assert p.value(items) == prefix_min(a, d, sub, b)


# ---- leader profile

def test_leader_profiles_of_worked_example():
    assert leader_pwl(FIVE, FIVE_C1) == Pwl(FIVE_F1)
    assert leader_pwl(FIVE, FIVE_C2) == Pwl(FIVE_F2)
    clipped = leader_pwl(FIVE, FIVE_C1, lo=Q(3, 2), hi=Q(5, 2))
    assert clipped.points == [(Q(3, 2), Q(3, 2)), (2, 1), (Q(5, 2), Q(3, 2))]
    with pytest.raises(InputError):
        leader_pwl(FIVE, FIVE_C1, lo=3, hi=6)


def test_solve_certain_examples():
    r = solve_certain(FIVE, FIVE_C1, CapacityRange(0, 5))
    assert (r.b_star, r.value) == (1, 2)
    assert r.x == (1, 0, 0, 0, 0)
    r = solve_certain(FIVE, FIVE_C1, CapacityRange(Q(5, 2), Q(5, 2)))
    assert (r.b_star, r.value) == (Q(5, 2), Q(3, 2))
    r = solve_certain(Items(FIVE_A, [0] * 5), FIVE_C1, CapacityRange(1, 4))
    assert (r.b_star, r.value) == (1, 0)


@given(st.integers(1, 6), st.randoms(use_true_random=False))
def test_optimistic_profile_dominates(n, r):
    a, c, d = _rand_instance(r, n)
    items = Items(a, d)
    fo = leader_pwl(items, c, "optimistic")
    fp = leader_pwl(items, c, "pessimistic")
    for b in set(fo.xs) | set(fp.xs):
        assert evaluate(fo, b) >= evaluate(fp, b)
