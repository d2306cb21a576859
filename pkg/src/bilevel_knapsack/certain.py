"""The bilevel continuous knapsack problem without uncertainty.

The leader picks the capacity ``b``, the follower solves a continuous
knapsack with profits ``c`` (Dantzig's greedy), and the leader collects
``d @ x``.  As a function of ``b`` the leader's value is piecewise linear
with breakpoints at the prefix sums of the follower's item order.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

from .errors import InputError
from .pwl import Pwl, Q, Rational, fmt, maximize, qvec


class TiePolicy(str, enum.Enum):
    """How the follower breaks ties between items of equal profit ratio."""

    OPTIMISTIC = "optimistic"
    PESSIMISTIC = "pessimistic"

    @classmethod
    def coerce(cls, value) -> TiePolicy:
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).lower())
        except ValueError:
            raise InputError(f"unknown tie policy {value!r}") from None


@dataclass(frozen=True)
class Items:
    """Item sizes ``a`` (all positive) and leader values ``d``."""

    a: tuple
    d: tuple

    def __init__(self, a: Iterable, d: Iterable):
        a, d = qvec(a), qvec(d)
        if not a:
            raise InputError("at least one item is required")
        if len(a) != len(d):
            raise InputError(f"len(a)={len(a)} but len(d)={len(d)}")
        if any(ai <= 0 for ai in a):
            raise InputError("item sizes must be positive")
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "d", d)

    @property
    def n(self) -> int:
        return len(self.a)

    @property
    def total(self) -> Rational:
        return sum(self.a, Q(0))

    def ratio(self, i: int) -> Rational:
        return self.d[i] / self.a[i]


@dataclass(frozen=True)
class CapacityRange:
    lo: Rational
    hi: Rational

    def __init__(self, lo, hi):
        lo, hi = Q(lo), Q(hi)
        if not 0 <= lo <= hi:
            raise InputError(f"capacity range must satisfy 0 <= lo <= hi, got [{fmt(lo)}, {fmt(hi)}]")
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)

    def check(self, items: Items) -> None:
        if self.hi > items.total:
            raise InputError(
                f"capacity upper bound {fmt(self.hi)} exceeds total item size {fmt(items.total)}")


@dataclass(frozen=True)
class FractionalPrefix:
    """Items ``J`` packed completely except ``lam`` of the last item ``j``.

    The empty prefix has ``J = frozenset()`` and ``j = None``.
    """

    J: frozenset = frozenset()
    j: Optional[int] = None
    lam: Rational = Q(0)

    EMPTY = None  # set below

    @property
    def is_empty(self) -> bool:
        return self.j is None

    def x(self, n: int) -> tuple:
        x = [Q(0)] * n
        for i in self.J:
            x[i] = Q(1)
        if self.j is not None:
            x[self.j] = self.lam
        return tuple(x)

    def value(self, items: Items) -> Rational:
        return sum((items.d[i] * xi for i, xi in enumerate(self.x(items.n)) if xi), Q(0))

    def weight(self, items: Items) -> Rational:
        return sum((items.a[i] * xi for i, xi in enumerate(self.x(items.n)) if xi), Q(0))


FractionalPrefix.EMPTY = FractionalPrefix()


@dataclass(frozen=True)
class CertainProfits:
    """The follower's profit vector, known exactly."""

    c: tuple

    def __init__(self, c: Iterable):
        c = qvec(c)
        if not c or any(ci <= 0 for ci in c):
            raise InputError("follower profits must be positive")
        object.__setattr__(self, "c", c)


@dataclass
class SolveResult:
    """Optimal capacity, leader value and witnesses.

    ``c`` is the follower profit vector that realizes the worst case (or the
    certain profits), ``x`` the follower's answer to it at ``b_star``.
    ``info`` carries solver specific witnesses (scenario index, head, prefix).
    """

    b_star: Rational
    value: Rational
    profile: Optional[Pwl] = None
    c: Optional[tuple] = None
    x: Optional[tuple] = None
    solver: str = ""
    info: dict = field(default_factory=dict)


@dataclass
class Instance:
    """A complete problem: items, capacity range, tie rule and an uncertainty model.

    ``meta`` records provenance for generated instances (gadget kind and the
    source subset-sum or counting data).
    """

    items: Items
    rng: CapacityRange
    model: object
    tie: TiePolicy = TiePolicy.PESSIMISTIC
    meta: dict = field(default_factory=dict)


def normalize_objective(d_raw: Sequence, delta, a: Sequence) -> tuple:
    """Rewrite the leader objective ``d_raw @ x - delta * b``.

    Returns ``(d_c, d_b, delta_b)``: ``d_c @ x`` equals the objective when
    ``a @ x == b`` (no capacity price), and ``d_b @ x - delta_b * b`` is the
    form with nonnegative data whenever ``d_raw`` and ``delta`` are.
    """
    d_raw, a, delta = qvec(d_raw), qvec(a), Q(delta)
    if len(d_raw) != len(a):
        raise InputError(f"len(d)={len(d_raw)} but len(a)={len(a)}")
    if any(ai <= 0 for ai in a):
        raise InputError("item sizes must be positive")
    d_c = tuple(di - delta * ai for di, ai in zip(d_raw, a))
    eps = min([delta] + [di / ai for di, ai in zip(d_raw, a)])
    d_b = tuple(di - eps * ai for di, ai in zip(d_raw, a))
    return d_c, d_b, delta - eps


def _check_profits(items: Items, c: Sequence) -> tuple:
    c = qvec(c)
    if len(c) != items.n:
        raise InputError(f"profit vector has {len(c)} entries, expected {items.n}")
    if any(ci <= 0 for ci in c):
        raise InputError("follower profits must be positive")
    return c


def _check_capacity(items: Items, b) -> Rational:
    b = Q(b)
    if not 0 <= b <= items.total:
        raise InputError(f"capacity {fmt(b)} outside [0, {fmt(items.total)}]")
    return b


def tie_key(items: Items, i: int, tie: TiePolicy):
    """Secondary sort key among items of equal profit ratio (smaller packs first)."""
    r = items.ratio(i)
    return -r if tie == TiePolicy.OPTIMISTIC else r


def follower_order(items: Items, c: Sequence, tie=TiePolicy.PESSIMISTIC) -> list:
    """Order in which the follower packs: ``c/a`` descending, then the tie rule, then index."""
    c = _check_profits(items, c)
    tie = TiePolicy.coerce(tie)
    return sorted(range(items.n), key=lambda i: (-c[i] / items.a[i], tie_key(items, i, tie), i))


def fill(items: Items, order: Sequence[int], b) -> FractionalPrefix:
    """Pack items in ``order`` until exactly ``b`` is used.

    The item that completes the capacity is the dedicated last item, even
    when it fits completely (``lam == 1``).
    """
    b = Q(b)
    if b == 0:
        return FractionalPrefix.EMPTY
    used = Q(0)
    taken = []
    for i in order:
        ai = items.a[i]
        taken.append(i)
        if used + ai >= b:
            return FractionalPrefix(frozenset(taken), i, (b - used) / ai)
        used += ai
    raise InputError(f"capacity {fmt(b)} exceeds the total size {fmt(used)} of the given items")


def follower_solve(items: Items, c: Sequence, b, tie=TiePolicy.PESSIMISTIC) -> tuple:
    """Follower's optimal continuous knapsack solution ``x`` at capacity ``b``."""
    b = _check_capacity(items, b)
    return fill(items, follower_order(items, c, tie), b).x(items.n)


def dantzig_min(subset: Iterable[int], items: Items, b) -> FractionalPrefix:
    """Minimize ``d @ x`` subject to ``a @ x == b`` using only items of ``subset``."""
    subset = sorted(set(subset))
    b = Q(b)
    cap = sum((items.a[i] for i in subset), Q(0))
    if not 0 <= b <= cap:
        raise InputError(f"capacity {fmt(b)} outside [0, {fmt(cap)}] for the given subset")
    order = sorted(subset, key=lambda i: (items.ratio(i), i))
    return fill(items, order, b)


def profile_for_order(items: Items, order: Sequence[int], lo=None, hi=None) -> Pwl:
    """Leader value as a function of capacity when items are packed in ``order``.

    The full profile lives on ``[0, sum of sizes in order]``; ``lo``/``hi``
    clip it.
    """
    xs = [Q(0)]
    ys = [Q(0)]
    for i in order:
        if hi is not None and xs[-1] >= hi:
            break
        xs.append(xs[-1] + items.a[i])
        ys.append(ys[-1] + items.d[i])
    if lo is None and hi is None:
        return Pwl._from_sorted(xs, ys)
    f = Pwl._from_sorted(xs, ys, prune=False)
    f = f.restrict(f.lo if lo is None else lo, f.hi if hi is None else hi)
    return Pwl._from_sorted(f.xs, f.ys)


def leader_pwl(items: Items, c: Sequence, tie=TiePolicy.PESSIMISTIC, lo=None, hi=None) -> Pwl:
    """The leader's objective ``b -> d @ x(b)`` for fixed follower profits ``c``."""
    return profile_for_order(items, follower_order(items, c, tie), lo, hi)


def bilevel_dantzig(subset: Iterable[int], items: Items, lo, hi) -> Pwl:
    """Profile of :func:`dantzig_min` over ``b`` in ``[lo, hi]`` for ``subset``."""
    order = sorted(set(subset), key=lambda i: (items.ratio(i), i))
    return profile_for_order(items, order, lo, hi)


def solve_certain(items: Items, c: Sequence, rng: CapacityRange, tie=TiePolicy.PESSIMISTIC) -> SolveResult:
    rng.check(items)
    c = _check_profits(items, c)
    tie = TiePolicy.coerce(tie)
    f = leader_pwl(items, c, tie)
    b, v = maximize(f, rng.lo, rng.hi)
    return SolveResult(b, v, profile=f.restrict(rng.lo, rng.hi), c=c,
                       x=follower_solve(items, c, b, tie), solver="certain")
