"""Robust solver for interval uncertainty ``c_i in [c_lo_i, c_hi_i]``.

The adversary can only influence the order in which the follower packs
the items, and the reachable orders are the linear extensions of an
interval order on the flipped ratio intervals ``[-c_hi/a, -c_lo/a]``.
The adversary's problem for a fixed capacity is solved by iterating over
the possible heads of a fractional prefix and running a minimizing greedy
on the items whose interval contains the head's left endpoint; the
leader's problem does the same with whole piecewise-linear profiles.
"""
from __future__ import annotations

import heapq
from bisect import bisect_left
from dataclasses import dataclass
from itertools import accumulate
from typing import Iterable, Iterator, Optional, Sequence

from .certain import (CapacityRange, FractionalPrefix, Items, SolveResult, TiePolicy,
                      _check_capacity, dantzig_min, follower_order,
                      follower_solve, profile_for_order, tie_key)
from .errors import BudgetExceeded, InputError, InvariantViolation
from .pwl import Pwl, Q, envelope_of_partials, fmt, lower_envelope, maximize, qvec

ORACLE_BOUND = 9


@dataclass(frozen=True)
class IntervalUncertainty:
    c_lo: tuple
    c_hi: tuple

    def __init__(self, c_lo: Iterable, c_hi: Iterable):
        c_lo, c_hi = qvec(c_lo), qvec(c_hi)
        if len(c_lo) != len(c_hi):
            raise InputError("c_lo and c_hi differ in length")
        for lo, hi in zip(c_lo, c_hi):
            if not 0 < lo <= hi:
                raise InputError(f"need 0 < c_lo <= c_hi, got [{fmt(lo)}, {fmt(hi)}]")
        object.__setattr__(self, "c_lo", c_lo)
        object.__setattr__(self, "c_hi", c_hi)

    def __contains__(self, c) -> bool:
        return len(c) == len(self.c_lo) and all(
            lo <= ci <= hi for lo, ci, hi in zip(self.c_lo, c, self.c_hi))


@dataclass(frozen=True)
class IntervalOrder:
    """Interval order on items; ``i`` precedes ``j`` iff ``i``'s interval lies left of ``j``'s.

    ``p_lo[i] = -c_hi[i]/a[i]`` and ``p_hi[i] = -c_lo[i]/a[i]``.  When
    ``tiebreak`` is set, endpoints are compared lexicographically as
    ``(p, tiebreak[i], i)``; this resolves intervals that touch in a single
    point the way the follower's tie rule does.
    """

    p_lo: tuple
    p_hi: tuple
    tiebreak: Optional[tuple] = None

    @property
    def n(self) -> int:
        return len(self.p_lo)

    def left(self, i: int) -> tuple:
        if self.tiebreak is None:
            return (self.p_lo[i],)
        return (self.p_lo[i], self.tiebreak[i], i)

    def right(self, i: int) -> tuple:
        if self.tiebreak is None:
            return (self.p_hi[i],)
        return (self.p_hi[i], self.tiebreak[i], i)

    def precedes(self, i: int, j: int) -> bool:
        return self.right(i) < self.left(j)

    def relations(self) -> set:
        n = self.n
        return {(i, j) for i in range(n) for j in range(n) if self.precedes(i, j)}


def build_interval_order(items: Items, U: IntervalUncertainty) -> IntervalOrder:
    if len(U.c_lo) != items.n:
        raise InputError(f"uncertainty has {len(U.c_lo)} components, expected {items.n}")
    p_lo = tuple(-hi / a for hi, a in zip(U.c_hi, items.a))
    p_hi = tuple(-lo / a for lo, a in zip(U.c_lo, items.a))
    return IntervalOrder(p_lo, p_hi)


def optimistic_preprocess(items: Items, U: IntervalUncertainty, order: IntervalOrder) -> IntervalOrder:
    """Tighten ``order`` for the optimistic follower.

    If ``i``'s interval ends exactly where ``j``'s begins, ``j`` can only be
    packed before ``i`` when both ratios coincide, and then the optimistic
    follower packs the item with the larger ``d/a`` first.  So ``i`` must
    precede ``j`` whenever ``d_i/a_i > d_j/a_j`` (index decides exact ties).
    """
    return IntervalOrder(order.p_lo, order.p_hi,
                         tuple(tie_key(items, i, TiePolicy.OPTIMISTIC) for i in range(items.n)))


def interval_order_for(items: Items, U: IntervalUncertainty, tie) -> IntervalOrder:
    order = build_interval_order(items, U)
    if TiePolicy.coerce(tie) == TiePolicy.OPTIMISTIC:
        order = optimistic_preprocess(items, U, order)
    return order


@dataclass(frozen=True)
class _Head:
    k: int            # representative head item
    before: tuple     # predecessors of the head (I_k^-)
    a_before: object  # their total size
    d_before: object  # their total leader value
    pool: tuple       # items whose interval contains the head's left endpoint (I_k^0)
    a_pool: object


def _heads(items: Items, order: IntervalOrder) -> list:
    """Predecessor sets and candidate pools for every possible head.

    Heads with the same left endpoint share both sets and are reported once.
    """
    n = order.n
    by_right = sorted(range(n), key=order.right)
    right_keys = [order.right(i) for i in by_right]
    a_pre = [Q(0)] + list(accumulate(items.a[i] for i in by_right))
    d_pre = [Q(0)] + list(accumulate(items.d[i] for i in by_right))
    by_left = sorted(range(n), key=lambda i: (order.left(i), i))
    active: set = set()
    expiry: list = []
    out = []
    t = 0
    last_key = None
    for k in by_left:
        key = order.left(k)
        if key == last_key:
            continue
        last_key = key
        while t < n and order.left(by_left[t]) <= key:
            i = by_left[t]
            active.add(i)
            heapq.heappush(expiry, (order.right(i), i))
            t += 1
        while expiry and expiry[0][0] < key:
            active.discard(heapq.heappop(expiry)[1])
        cnt = bisect_left(right_keys, key)
        pool = tuple(sorted(active))
        out.append(_Head(k, tuple(sorted(by_right[:cnt])), a_pre[cnt], d_pre[cnt], pool,
                         sum((items.a[i] for i in pool), Q(0))))
    out.sort(key=lambda h: h.k)
    return out


def adversary_solve(items: Items, order: IntervalOrder, b, return_head: bool = False):
    """Worst fractional prefix of ``order`` filling capacity ``b`` exactly.

    Returns ``(prefix, value)``, or ``(prefix, value, head)`` with
    ``return_head``; the head is ``None`` for the empty prefix.
    """
    b = _check_capacity(items, b)
    if b == 0:
        res = (FractionalPrefix.EMPTY, Q(0), None)
        return res if return_head else res[:2]
    best = None
    for h in _heads(items, order):
        rest = b - h.a_before
        if 0 < rest <= h.a_pool:
            sub = dantzig_min(h.pool, items, rest)
            val = h.d_before + sub.value(items)
            if best is None or val < best[1]:
                best = (FractionalPrefix(sub.J | frozenset(h.before), sub.j, sub.lam), val, h.k)
    if best is None:
        raise InvariantViolation(f"no head admits capacity {fmt(b)}")
    return best if return_head else best[:2]


def recover_scenario(items: Items, U: IntervalUncertainty, order: IntervalOrder,
                     prefix: FractionalPrefix, head: int) -> tuple:
    """Profit vector in ``U`` under which the pessimistic follower packs ``prefix``.

    Items of the prefix get their largest profit, outside items their
    smallest, and the last item is put exactly at the head's extreme ratio.
    """
    if prefix.is_empty:
        return U.c_lo
    c = [U.c_hi[i] if i in prefix.J else U.c_lo[i] for i in range(items.n)]
    j = prefix.j
    c[j] = U.c_hi[head] / items.a[head] * items.a[j]
    c = tuple(c)
    if c not in U:
        raise InputError(f"prefix with last item {j} is inconsistent with head {head}")
    return c


def realize_order(items: Items, U: IntervalUncertainty, perm: Sequence[int], tie) -> Optional[tuple]:
    """A profit vector in ``U`` making the follower pack exactly in ``perm``, or ``None``."""
    tie = TiePolicy.coerce(tie)
    n = items.n
    p_lo = [-U.c_hi[i] / items.a[i] for i in range(n)]
    p_hi = [-U.c_lo[i] / items.a[i] for i in range(n)]
    ends = sorted(set(p_lo) | set(p_hi))
    gaps = [y - x for x, y in zip(ends, ends[1:])]
    step = (min(gaps) if gaps else Q(1)) / (n + 1)
    q = [None] * n
    prev = None
    for i in perm:
        if prev is None:
            qi = p_lo[i]
        else:
            strict = (tie_key(items, prev, tie), prev) > (tie_key(items, i, tie), i)
            qi = max(p_lo[i], q[prev] + (step if strict else 0))
        if qi > p_hi[i]:
            return None
        q[i] = qi
        prev = i
    c = tuple(-qi * a for qi, a in zip(q, items.a))
    if follower_order(items, c, tie) != list(perm):
        raise InvariantViolation("order realization failed")
    return c


def _optimistic_witness(items: Items, U: IntervalUncertainty, order: IntervalOrder, b, v) -> tuple:
    # With several items sharing one ratio exactly, a worst prefix of the
    # tightened order need not be reachable by the optimistic follower,
    # so every head attaining the optimum is tried.
    if b == 0:
        return U.c_lo, FractionalPrefix.EMPTY, None
    for h in _heads(items, order):
        rest = b - h.a_before
        if not 0 < rest <= h.a_pool:
            continue
        sub = dantzig_min(h.pool, items, rest)
        if h.d_before + sub.value(items) != v:
            continue
        prefix = FractionalPrefix(sub.J | frozenset(h.before), sub.j, sub.lam)
        for perm in _candidate_orders(order, prefix):
            c = realize_order(items, U, perm, TiePolicy.OPTIMISTIC)
            if c is not None:
                return c, prefix, h.k
    raise InvariantViolation(f"no reachable worst case scenario found at capacity {fmt(b)}")


def _candidate_orders(order: IntervalOrder, prefix: FractionalPrefix) -> Iterator[list]:
    keys = (lambda i: (order.left(i), i), lambda i: (order.right(i), i),
            lambda i: (order.p_lo[i], order.p_hi[i], i))
    for key in keys:
        inner = sorted((i for i in prefix.J if i != prefix.j), key=key)
        rest = sorted((i for i in range(order.n) if i not in prefix.J), key=key)
        yield inner + [prefix.j] + rest


def solve_robust_interval(items: Items, U: IntervalUncertainty, rng: CapacityRange,
                          tie=TiePolicy.PESSIMISTIC) -> SolveResult:
    rng.check(items)
    tie = TiePolicy.coerce(tie)
    order = interval_order_for(items, U, tie)
    lo, hi = rng.lo, rng.hi
    fs = []
    if lo == 0:
        fs.append(Pwl.point(0, 0))
    # the minimizing fill packs a pool by increasing d/a; sort once and filter per head
    by_ratio = sorted(range(items.n), key=lambda i: (items.ratio(i), i))
    for h in _heads(items, order):
        if 0 <= hi - h.a_before and lo - h.a_before <= h.a_pool:
            sub_lo = max(Q(0), lo - h.a_before)
            sub_hi = min(hi - h.a_before, h.a_pool)
            pool = set(h.pool)
            g = profile_for_order(items, [i for i in by_ratio if i in pool], sub_lo, sub_hi)
            fs.append(g.shift(h.a_before, h.d_before))
    try:
        f = envelope_of_partials(fs)
    except InputError as exc:
        raise InvariantViolation(f"head profiles do not cover the capacity range: {exc}") from exc
    if f.domain != (lo, hi):
        raise InvariantViolation("head profiles do not cover the capacity range")
    b, v = maximize(f)
    res = _evaluate(items, U, order, b, tie)
    if res.value != v:
        raise InvariantViolation(f"adversary value {fmt(res.value)} differs from envelope value {fmt(v)}")
    res.profile = f
    return res


def _evaluate(items: Items, U: IntervalUncertainty, order: IntervalOrder, b, tie) -> SolveResult:
    prefix, v, head = adversary_solve(items, order, b, return_head=True)
    if tie == TiePolicy.PESSIMISTIC:
        c = recover_scenario(items, U, order, prefix, head) if head is not None else U.c_lo
        x = follower_solve(items, c, b, tie)
        if x != prefix.x(items.n):
            raise InvariantViolation("recovered scenario does not reproduce the worst prefix")
    else:
        c, prefix, head = _optimistic_witness(items, U, order, b, v)
        x = follower_solve(items, c, b, tie)
    if sum((di * xi for di, xi in zip(items.d, x)), Q(0)) != v:
        raise InvariantViolation("witness scenario does not attain the worst case value")
    return SolveResult(Q(b), v, c=c, x=x, solver="robust_interval",
                       info={"head": head, "prefix": prefix})


def eval_robust_interval(items: Items, U: IntervalUncertainty, b, tie=TiePolicy.PESSIMISTIC) -> SolveResult:
    """Worst case leader value at a single ``b``, with the scenario attaining it."""
    b = _check_capacity(items, b)
    tie = TiePolicy.coerce(tie)
    return _evaluate(items, U, interval_order_for(items, U, tie), b, tie)


def enumerate_linear_extensions(order: IntervalOrder, bound: int = ORACLE_BOUND) -> Iterator[tuple]:
    """All linear extensions of ``order`` in lexicographic order."""
    n = order.n
    if n > bound:
        raise BudgetExceeded(f"{n} items exceed the linear extension bound {bound}")
    preds = [frozenset(i for i in range(n) if order.precedes(i, j)) for j in range(n)]
    perm: list = []
    placed: set = set()

    def rec():
        if len(perm) == n:
            yield tuple(perm)
            return
        for j in range(n):
            if j not in placed and preds[j] <= placed:
                perm.append(j)
                placed.add(j)
                yield from rec()
                placed.discard(j)
                perm.pop()

    yield from rec()


def oracle_solve_interval(items: Items, U: IntervalUncertainty, rng: CapacityRange,
                          tie=TiePolicy.PESSIMISTIC, bound: int = ORACLE_BOUND) -> SolveResult:
    """Brute force: envelope of the profiles of all linear extensions."""
    rng.check(items)
    order = interval_order_for(items, U, tie)
    profiles = {profile_for_order(items, perm) for perm in enumerate_linear_extensions(order, bound)}
    f = lower_envelope(list(profiles)).restrict(rng.lo, rng.hi)
    b, v = maximize(f)
    return SolveResult(b, v, profile=f, solver="interval_oracle",
                       info={"profiles": len(profiles)})
