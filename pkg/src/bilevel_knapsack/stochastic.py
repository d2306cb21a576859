"""Stochastic follower profits: maximize the expected leader value.

For a distribution with finite support the expected objective is a
probability weighted sum of the per-scenario profiles, so it is again
piecewise linear and can be maximized exactly.  Scenarios that induce the
same follower order share one profile, which keeps the sum small for the
product distributions used by the counting reduction.
"""
from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass
from itertools import product
from typing import Callable, Iterable, Optional, Sequence

import gmpy2
import numpy as np

from .certain import (CapacityRange, Instance, Items, SolveResult, TiePolicy, _check_capacity,
                      _check_profits, follower_order, follower_solve, profile_for_order, tie_key)
from .errors import BudgetExceeded, InputError, InvariantViolation
from .pwl import Pwl, Q, Rational, evaluate, fmt, maximize, qvec, weighted_sum

PRODUCT_BUDGET = 2 ** 20


@dataclass(frozen=True)
class FiniteSupportDistribution:
    scenarios: tuple
    probs: tuple

    def __init__(self, scenarios: Iterable, probs: Iterable):
        sc = tuple(qvec(c) for c in scenarios)
        pr = qvec(probs)
        if not sc:
            raise InputError("distribution has no scenarios")
        if len(sc) != len(pr):
            raise InputError(f"{len(sc)} scenarios but {len(pr)} probabilities")
        if any(not 0 < p <= 1 for p in pr):
            raise InputError("probabilities must lie in (0, 1]")
        if sum(pr) != 1:
            raise InputError(f"probabilities sum to {fmt(sum(pr))}, not 1")
        if any(len(c) != len(sc[0]) for c in sc):
            raise InputError("scenarios must all have the same length")
        if any(x <= 0 for c in sc for x in c):
            raise InputError("scenario profits must be positive")
        object.__setattr__(self, "scenarios", sc)
        object.__setattr__(self, "probs", pr)


@dataclass(frozen=True)
class ProductUniformDiscrete:
    """Independent components, each uniform on a finite set."""

    supports: tuple

    def __init__(self, supports: Iterable[Iterable]):
        sup = []
        for s in supports:
            s = tuple(sorted(set(qvec(s))))
            if not s:
                raise InputError("every support must be nonempty")
            if s[0] <= 0:
                raise InputError("support values must be positive")
            sup.append(s)
        if not sup:
            raise InputError("distribution needs at least one component")
        object.__setattr__(self, "supports", tuple(sup))

    @property
    def size(self) -> int:
        return math.prod(len(s) for s in self.supports)

    def expand(self, budget: int = PRODUCT_BUDGET) -> FiniteSupportDistribution:
        if self.size > budget:
            raise BudgetExceeded(f"product support has {self.size} points, budget is {budget}")
        p = Q(1, self.size)
        return FiniteSupportDistribution(product(*self.supports), [p] * self.size)


@dataclass(frozen=True)
class ProductUniformContinuous:
    """Independent components, each uniform on a closed interval ``[lo, hi]``."""

    boxes: tuple

    def __init__(self, boxes: Iterable):
        bx = []
        for box in boxes:
            lo, hi = qvec(box)
            if not 0 < lo <= hi:
                raise InputError(f"invalid box [{fmt(lo)}, {fmt(hi)}]")
            bx.append((lo, hi))
        if not bx:
            raise InputError("distribution needs at least one component")
        object.__setattr__(self, "boxes", tuple(bx))


@dataclass
class BisectionState:
    s_lo: Rational
    s_hi: Rational
    iteration: int = 0

    @property
    def mid(self) -> Rational:
        return (self.s_lo + self.s_hi) / 2

    def halve(self, upper: bool) -> None:
        """Keep the upper half when ``upper`` is set, the lower half otherwise."""
        if upper:
            self.s_lo = self.mid
        else:
            self.s_hi = self.mid
        self.iteration += 1


def _order_weights(items: Items, scenarios: Sequence, probs: Sequence, tie) -> Counter:
    tie = TiePolicy.coerce(tie)
    weights: Counter = Counter()
    for c, p in zip(scenarios, probs):
        weights[tuple(follower_order(items, c, tie))] += p
    return weights


def expected_pwl(items: Items, dist: FiniteSupportDistribution, tie=TiePolicy.PESSIMISTIC) -> Pwl:
    """Exact expected leader value as a function of ``b`` on ``[0, sum(a)]``."""
    for c in dist.scenarios:
        _check_profits(items, c)
    w = _order_weights(items, dist.scenarios, dist.probs, tie)
    orders = list(w)
    return weighted_sum([profile_for_order(items, o) for o in orders], [w[o] for o in orders])


def solve_stochastic_finite(items: Items, dist: FiniteSupportDistribution, rng: CapacityRange,
                            tie=TiePolicy.PESSIMISTIC) -> SolveResult:
    rng.check(items)
    f = expected_pwl(items, dist, tie).restrict(rng.lo, rng.hi)
    b, v = maximize(f)
    return SolveResult(b, v, profile=f, solver="stochastic_finite",
                       info={"support": len(dist.scenarios)})


def eval_stochastic_finite(items: Items, dist: FiniteSupportDistribution, b,
                           tie=TiePolicy.PESSIMISTIC) -> Rational:
    b = _check_capacity(items, b)
    tie = TiePolicy.coerce(tie)
    total = Q(0)
    for c, p in zip(dist.scenarios, dist.probs):
        x = follower_solve(items, c, b, tie)
        total += p * sum((di * xi for di, xi in zip(items.d, x)), Q(0))
    return total


def _product_order_weights(items: Items, dist: ProductUniformDiscrete, tie, budget: int) -> Counter:
    if len(dist.supports) != items.n:
        raise InputError(f"distribution has {len(dist.supports)} components, expected {items.n}")
    if dist.size > budget:
        raise BudgetExceeded(f"product support has {dist.size} points, budget is {budget}")
    tie = TiePolicy.coerce(tie)
    # sort keys per (component, value) computed once, not per scenario
    keys = [[(-v / items.a[i], tie_key(items, i, tie), i) for v in s]
            for i, s in enumerate(dist.supports)]
    weights: Counter = Counter()
    for combo in product(*keys):
        weights[tuple(k[2] for k in sorted(combo))] += 1
    p = Q(1, dist.size)
    return Counter({o: k * p for o, k in weights.items()})


def expected_pwl_product_discrete(items: Items, dist: ProductUniformDiscrete, tie=TiePolicy.PESSIMISTIC,
                                  budget: int = PRODUCT_BUDGET) -> Pwl:
    """Exact expected profile under independent uniform finite supports."""
    w = _product_order_weights(items, dist, tie, budget)
    orders = list(w)
    return weighted_sum([profile_for_order(items, o) for o in orders], [w[o] for o in orders])


def solve_stochastic_product_discrete(items: Items, dist: ProductUniformDiscrete, rng: CapacityRange,
                                      tie=TiePolicy.PESSIMISTIC, budget: int = PRODUCT_BUDGET) -> SolveResult:
    rng.check(items)
    f = expected_pwl_product_discrete(items, dist, tie, budget).restrict(rng.lo, rng.hi)
    b, v = maximize(f)
    return SolveResult(b, v, profile=f, solver="stochastic_product_discrete",
                       info={"support": dist.size})


def eval_stochastic_product_discrete(items: Items, dist: ProductUniformDiscrete, b,
                                     tie=TiePolicy.PESSIMISTIC, budget: int = PRODUCT_BUDGET) -> Rational:
    b = _check_capacity(items, b)
    w = _product_order_weights(items, dist, tie, budget)
    return sum((p * evaluate(profile_for_order(items, o), b) for o, p in w.items()), Q(0))


# ---------------------------------------------------------------------------
# counting gadget

def gen_gadget_stochastic(a_star: Sequence[int], b_star: int, tau=0, continuous: bool = False,
                          tie=TiePolicy.OPTIMISTIC) -> Instance:
    """Instance family whose expected slope at ``b_star`` counts knapsack solutions.

    The last item has fixed profit 1; the others are uniform on ``{eps, 1}``
    (or on ``[a_i/(2A), 3a_i/(2A)]`` with ``continuous``), so each lands ahead
    of the last item with probability one half.  With a single item the
    value 1 ties the last item exactly; the optimistic default packs it
    first, which is what the counting argument needs.
    """
    a_star = [int(x) for x in a_star]
    if not a_star or any(x <= 0 for x in a_star):
        raise InputError("a* must be a nonempty list of positive integers")
    b_star = int(b_star)
    if not 0 <= b_star <= sum(a_star):
        raise InputError(f"b* must lie in [0, {sum(a_star)}], got {b_star}")
    tau = Q(tau)
    if not -1 <= tau <= 1:
        raise InputError(f"tau must lie in [-1, 1], got {fmt(tau)}")
    big = sum(a_star)
    a = [Q(x) for x in a_star] + [Q(big)]
    d = [(1 + tau) * x for x in a[:-1]] + [(tau - 1) * a[-1]]
    eps = Q(min(a_star), 2 * big)
    if continuous:
        model = ProductUniformContinuous([(x / (2 * big), 3 * x / (2 * big)) for x in a[:-1]] + [(1, 1)])
    else:
        model = ProductUniformDiscrete([(eps, 1)] * len(a_star) + [(1,)])
    return Instance(Items(a, d), CapacityRange(0, big), model, TiePolicy.coerce(tie),
                    {"gadget": "stochastic", "a_star": a_star, "b_star": b_star, "tau": fmt(tau),
                     "eps": fmt(eps), "continuous": continuous})


def count_knapsack(a_star: Sequence[int], b: int) -> int:
    """``#{x in {0,1}^m : a* @ x <= b}`` by dynamic programming over sums."""
    counts = {0: 1}
    for w in a_star:
        nxt = Counter(counts)
        for s, k in counts.items():
            if s + w <= b:
                nxt[s + w] += k
        counts = nxt
    return sum(k for s, k in counts.items() if s <= b)


def _default_solver(inst: Instance):
    return solve_stochastic_product_discrete(inst.items, inst.model, inst.rng, inst.tie)


def count_knapsack_bisection(a_star: Sequence[int], b_star: int,
                             solver: Optional[Callable] = None, trace: Optional[list] = None) -> int:
    """Count knapsack solutions using only an optimizer for the stochastic gadget.

    ``solver`` maps an :class:`Instance` to a :class:`SolveResult` (or to the
    optimal capacity).  Each of the ``m + 1`` rounds halves a bracket for the
    expected slope at ``b_star`` with ``tau = 0``; the count follows by
    rounding.  ``trace`` collects ``(tau, b_opt, s_lo, s_hi)`` per round.
    """
    a_star = [int(x) for x in a_star]
    m = len(a_star)
    b_star = int(b_star)
    if b_star == sum(a_star):
        return 2 ** m
    if not 0 <= b_star < sum(a_star):
        raise InputError(f"b* must lie in [0, {sum(a_star)}], got {b_star}")
    solver = solver or _default_solver
    st = BisectionState(Q(-1), Q(1))
    for _ in range(m + 1):
        tau = -st.mid
        res = solver(gen_gadget_stochastic(a_star, b_star, tau))
        b_opt = res.b_star if isinstance(res, SolveResult) else Q(res)
        # concave objective: the slope at b* is at least -tau iff b* lies left of the maximizer
        st.halve(b_star < b_opt)
        if trace is not None:
            trace.append((tau, b_opt, st.s_lo, st.s_hi))
    if st.s_hi - st.s_lo != Q(1, 2 ** m):
        raise InvariantViolation("bisection bracket has the wrong width")
    est = Q(2) ** (m - 1) * (1 - st.mid)
    count = int(gmpy2.mpz(gmpy2.floor(est + Q(1, 2))))
    if abs(est - count) > Q(1, 4):
        raise InvariantViolation("bisection bracket does not pin down an integer count")
    return count


# ---------------------------------------------------------------------------
# Monte Carlo for continuous boxes

def _exact_order(items: Items, c: Sequence, tie) -> tuple:
    return tuple(follower_order(items, c, tie))


def eval_stochastic_mc(items: Items, dist: ProductUniformContinuous, b, tie=TiePolicy.PESSIMISTIC,
                       samples: int = 10000, seed: int = 0) -> tuple:
    """Sample mean of the leader value at ``b`` and its standard error.

    Each draw is turned into an exact rational profit vector, so the
    follower order and the value per draw are exact; only the sampling is
    random.  The estimate is returned as a rational, the standard error as
    a float.
    """
    b = _check_capacity(items, b)
    tie = TiePolicy.coerce(tie)
    samples = int(samples)
    if samples < 1:
        raise InputError("need at least one sample")
    if len(dist.boxes) != items.n:
        raise InputError(f"distribution has {len(dist.boxes)} components, expected {items.n}")
    gen = np.random.default_rng(seed)
    u = gen.random((samples, items.n))
    lo = [x for x, _ in dist.boxes]
    width = [y - x for x, y in dist.boxes]
    # approximate keys sort most rows; rows with near-ties are redone exactly
    lo_f = np.array([float(x) for x in lo])
    wd_f = np.array([float(x) for x in width])
    a_f = np.array([float(x) for x in items.a])
    ratios = (lo_f + u * wd_f) / a_f
    tk = np.array([float(tie_key(items, i, tie)) for i in range(items.n)])
    idx = np.broadcast_to(np.arange(items.n), ratios.shape)
    perm = np.lexsort((idx, np.broadcast_to(tk, ratios.shape), -ratios), axis=1)
    sr = np.take_along_axis(ratios, perm, axis=1)
    close = np.any(np.abs(np.diff(sr, axis=1)) <= 1e-9 * np.abs(sr[:, 1:]), axis=1) if items.n > 1 \
        else np.zeros(samples, dtype=bool)
    orders: Counter = Counter()
    for r in range(samples):
        if close[r]:
            c = [lo[i] + width[i] * gmpy2.mpq(float(u[r, i])) for i in range(items.n)]
            orders[_exact_order(items, c, tie)] += 1
        else:
            orders[tuple(int(i) for i in perm[r])] += 1
    total = Q(0)
    sq = Q(0)
    for o, k in orders.items():
        v = evaluate(profile_for_order(items, o), b)
        total += k * v
        sq += k * v * v
    mean = total / samples
    if samples > 1:
        var = (sq - samples * mean * mean) / (samples - 1)
        stderr = math.sqrt(float(var) / samples) if var > 0 else 0.0
    else:
        stderr = 0.0
    return mean, stderr
