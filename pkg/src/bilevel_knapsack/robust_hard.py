"""Uncertainty classes for which the robust problem is NP-hard.

Three families are covered:

* products of finite sets, solved exactly by enumerating the product
  (exponential, guarded by a budget) and keeping one profile per distinct
  packing prefix;
* the simplex ``{c >= c_hat, sum(c - c_hat) <= gamma}`` and the p-norm ball
  around ``c_hat``, for which only the subset-sum gadget instances are
  solved (exactly, through the largest subset sum not exceeding the
  budget);

together with the generators of the gadget instances and closed-form
checks of the leader's objective on them.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import product
from typing import Iterable, Optional, Sequence

import gmpy2

from .certain import (CapacityRange, Instance, Items, SolveResult, TiePolicy, _check_capacity,
                      follower_solve, profile_for_order, tie_key)
from .errors import BudgetExceeded, CapabilityError, InputError, InvariantViolation
from .pwl import Pwl, Q, Rational, evaluate, fmt, lower_envelope, maximize, qvec
from .robust_finite import FiniteUncertainty

PRODUCT_BUDGET = 2 ** 20
SUBSET_BUDGET = 22
DEFAULT_PRECISION_BITS = 64


@dataclass(frozen=True)
class SubsetSumInstance:
    """Is there a subset of ``w`` summing to ``W``?  Requires ``1 <= W <= sum(w) - 1``."""

    w: tuple
    W: int

    def __init__(self, w: Iterable[int], W: int):
        w = tuple(int(x) for x in w)
        if not w or any(x <= 0 for x in w):
            raise InputError("subset sum weights must be positive integers")
        W = int(W)
        if not 1 <= W <= sum(w) - 1:
            raise InputError(f"target must satisfy 1 <= W <= sum(w) - 1 = {sum(w) - 1}, got {W}")
        object.__setattr__(self, "w", w)
        object.__setattr__(self, "W", W)

    @property
    def m(self) -> int:
        return len(self.w)


def reachable_sums(w: Sequence[int], cap: Optional[int] = None) -> list:
    """Sorted list of all subset sums of ``w`` (only those ``<= cap`` if given)."""
    bits = 1
    mask = (1 << (cap + 1)) - 1 if cap is not None else None
    for x in w:
        bits |= bits << x
        if mask is not None:
            bits &= mask
    return [s for s in range(bits.bit_length()) if bits >> s & 1]


def subset_with_sum(w: Sequence[int], target: int) -> Optional[frozenset]:
    """Indices of a subset of ``w`` summing to ``target``, or ``None``."""
    layers = [1]
    for x in w:
        layers.append(layers[-1] | (layers[-1] << x))
    if target < 0 or not layers[-1] >> target & 1:
        return None
    chosen = []
    for i in range(len(w) - 1, -1, -1):
        if not layers[i] >> target & 1:
            chosen.append(i)
            target -= w[i]
    return frozenset(chosen)


# ---------------------------------------------------------------------------
# product of finite sets

@dataclass(frozen=True)
class ProductFiniteUncertainty:
    options: tuple

    def __init__(self, options: Iterable[Iterable]):
        opts = []
        for s in options:
            s = tuple(sorted(set(qvec(s))))
            if not s:
                raise InputError("every option set must be nonempty")
            if s[0] <= 0:
                raise InputError("options must be positive")
            opts.append(s)
        if not opts:
            raise InputError("product uncertainty needs at least one component")
        object.__setattr__(self, "options", tuple(opts))

    @property
    def size(self) -> int:
        return math.prod(len(s) for s in self.options)

    def expand(self, budget: int = PRODUCT_BUDGET) -> FiniteUncertainty:
        if self.size > budget:
            raise BudgetExceeded(f"product has {self.size} scenarios, budget is {budget}")
        return FiniteUncertainty(product(*self.options))


def _product_orders(items: Items, U: ProductFiniteUncertainty, tie, budget: int, hi) -> dict:
    """Distinct packing prefixes up to capacity ``hi``, each with its first scenario index.

    Scenarios are numbered as in :meth:`ProductFiniteUncertainty.expand`.
    Only the items packed before ``hi`` is reached influence the leader's
    value on ``[0, hi]``, so scenarios sharing that prefix are merged.
    """
    if len(U.options) != items.n:
        raise InputError(f"product has {len(U.options)} components, expected {items.n}")
    if U.size > budget:
        raise BudgetExceeded(f"product has {U.size} scenarios, budget is {budget}")
    tie = TiePolicy.coerce(tie)
    a = items.a
    # sort keys per (component, option) computed once, not per scenario
    keys = [[(-v / a[i], tie_key(items, i, tie), i) for v in opts] for i, opts in enumerate(U.options)]
    first: dict = {}
    for k, combo in enumerate(product(*keys)):
        prefix, used = [], Q(0)
        for key in sorted(combo):
            prefix.append(key[2])
            used += a[key[2]]
            if used >= hi:
                break
        first.setdefault(tuple(prefix), k)
    return first


def _scenario(U: ProductFiniteUncertainty, k: int) -> tuple:
    digits = []
    for opts in reversed(U.options):
        k, r = divmod(k, len(opts))
        digits.append(opts[r])
    return tuple(reversed(digits))


def solve_product_finite(items: Items, U: ProductFiniteUncertainty, rng: CapacityRange,
                         tie=TiePolicy.PESSIMISTIC, budget: int = PRODUCT_BUDGET) -> SolveResult:
    rng.check(items)
    tie = TiePolicy.coerce(tie)
    first = _product_orders(items, U, tie, budget, rng.hi)
    prefixes = list(first)
    fs = [profile_for_order(items, p, rng.lo, rng.hi) for p in prefixes]
    f = lower_envelope(fs)
    b, v = maximize(f)
    worst = min(range(len(fs)), key=lambda t: (evaluate(fs[t], b), first[prefixes[t]]))
    k = first[prefixes[worst]]
    c = _scenario(U, k)
    return SolveResult(b, v, profile=f, c=c, x=follower_solve(items, c, b, tie), solver="product_finite",
                       info={"scenario": k, "distinct_prefixes": len(fs)})


def eval_product_finite(items: Items, U: ProductFiniteUncertainty, b, tie=TiePolicy.PESSIMISTIC,
                        budget: int = PRODUCT_BUDGET) -> tuple:
    """Worst case value at ``b`` and the (first) worst scenario itself."""
    b = _check_capacity(items, b)
    first = _product_orders(items, U, tie, budget, b)
    v, k = min((evaluate(profile_for_order(items, p, b, b), b), k) for p, k in first.items())
    return v, _scenario(U, k)


def gen_gadget_product(ss: SubsetSumInstance, tie=TiePolicy.PESSIMISTIC) -> Instance:
    """Instance whose optimum reveals whether ``ss`` is a yes instance.

    Two options per component, ``{i*a_i, (n+i)*a_i}`` for ``i = 1..n``, so
    all ratio endpoints are distinct and the tie rule is irrelevant.
    """
    eps = Q(1, 4)
    M = sum(ss.w) + eps
    n = ss.m + 2
    a = (eps,) + tuple(Q(x) for x in ss.w) + (M,)
    d = (-M,) + tuple(Q(-x) for x in ss.w) + (eps,)
    opts = [(i * a[i - 1], (n + i) * a[i - 1]) for i in range(1, n + 1)]
    return Instance(Items(a, d), CapacityRange(ss.W, ss.W + 2 * eps),
                    ProductFiniteUncertainty(opts), TiePolicy.coerce(tie),
                    {"gadget": "product", "w": list(ss.w), "W": ss.W})


def decide_subset_sum_product(ss: SubsetSumInstance, budget: int = PRODUCT_BUDGET) -> bool:
    """Decide ``ss`` by solving its product gadget: yes iff the optimum is not the upper bound."""
    inst = gen_gadget_product(ss)
    res = solve_product_finite(inst.items, inst.model, inst.rng, inst.tie, budget)
    return res.b_star != inst.rng.hi


def shape_f_product(ss: SubsetSumInstance, b) -> Rational:
    """Closed form of the product gadget's objective for ``b`` in ``[1/4, M)``.

    With ``V1 < V2`` consecutive subset sums and ``b`` in ``[V1 + 1/4, V2 + 1/4)``
    the adversary either completes the packing worth ``V1`` with the big
    last item, or (once ``b >= V2``) packs ``V2`` and fills up with item one.
    """
    b = Q(b)
    eps = Q(1, 4)
    M = sum(ss.w) + eps
    if not eps <= b < M:
        raise InputError(f"b={fmt(b)} outside [1/4, {fmt(M)})")
    sums = reachable_sums(ss.w)
    k = max(i for i, s in enumerate(sums) if s + eps <= b)
    v1, v2 = sums[k], sums[k + 1]
    first = -M - v1 + eps / M * (b - v1 - eps)
    if b < v2:
        return first
    return min(first, -M / eps * (b - v2) - v2)


# ---------------------------------------------------------------------------
# simplex and p-norm gadget families

@dataclass(frozen=True)
class SimplexUncertainty:
    """``{c : c >= c_hat, sum(c - c_hat) <= gamma}``.

    ``strict`` marks the optimistic variant of the gadget, where the last
    component of ``c_hat`` is understood as lowered by an arbitrarily small
    amount so that ratio ties are decided strictly.
    """

    c_hat: tuple
    gamma: Rational
    strict: bool = False

    def __init__(self, c_hat: Iterable, gamma, strict: bool = False):
        c_hat, gamma = qvec(c_hat), Q(gamma)
        if any(x <= 0 for x in c_hat):
            raise InputError("c_hat must be positive")
        if gamma <= 0:
            raise InputError("gamma must be positive")
        object.__setattr__(self, "c_hat", c_hat)
        object.__setattr__(self, "gamma", gamma)
        object.__setattr__(self, "strict", bool(strict))


@dataclass(frozen=True)
class PNormUncertainty:
    """``{c : ||c - c_hat||_p <= gamma}`` with a rational exponent ``p >= 1``.

    ``precision_bits`` records how the irrational p-th roots of a generated
    gadget were rounded.
    """

    c_hat: tuple
    gamma: Rational
    p: Rational
    precision_bits: int = DEFAULT_PRECISION_BITS
    strict: bool = False

    def __init__(self, c_hat: Iterable, gamma, p, precision_bits: int = DEFAULT_PRECISION_BITS,
                 strict: bool = False):
        c_hat, gamma, p = qvec(c_hat), Q(gamma), Q(p)
        if p < 1:
            raise InputError("p must be at least 1")
        if gamma <= 0:
            raise InputError("gamma must be positive")
        if any(x - gamma <= 0 for x in c_hat):
            raise InputError("the norm ball must lie in the positive orthant")
        object.__setattr__(self, "c_hat", c_hat)
        object.__setattr__(self, "gamma", gamma)
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "precision_bits", int(precision_bits))
        object.__setattr__(self, "strict", bool(strict))


def _family_items(ss: SubsetSumInstance) -> tuple:
    M = sum(ss.w) + 1
    a = tuple(Q(x) for x in ss.w) + (Q(M),)
    d = tuple(Q(-x) for x in ss.w) + (Q(M),)
    return Items(a, d), CapacityRange(0, sum(ss.w) + M), M


def gen_gadget_simplex(ss: SubsetSumInstance, tie=TiePolicy.PESSIMISTIC) -> Instance:
    items, rng, M = _family_items(ss)
    tie = TiePolicy.coerce(tie)
    c_hat = tuple((2 * M - 1) * Q(x) for x in ss.w) + (Q(2 * M * M),)
    U = SimplexUncertainty(c_hat, ss.W, strict=tie == TiePolicy.OPTIMISTIC)
    return Instance(items, rng, U, tie, {"gadget": "simplex", "w": list(ss.w), "W": ss.W})


def pth_root(x: int, p, bits: int = DEFAULT_PRECISION_BITS, upward: bool = False) -> tuple:
    """``x ** (1/p)`` for a positive integer ``x`` and rational ``p``.

    Returns ``(root, exact)``; an inexact root is rounded to a multiple of
    ``2**-bits``, downward unless ``upward`` is set.
    """
    p = Q(p)
    r, s = int(p.numerator), int(p.denominator)
    base = gmpy2.mpz(x) ** s
    root, exact = gmpy2.iroot(base, r)
    if exact:
        return Q(int(root)), True
    scaled, _ = gmpy2.iroot(base << (bits * r), r)
    num = int(scaled) + (1 if upward else 0)
    return Q(num, 2 ** bits), False


def gen_gadget_pnorm(ss: SubsetSumInstance, p, precision_bits: int = DEFAULT_PRECISION_BITS,
                     tie=TiePolicy.PESSIMISTIC) -> Instance:
    """Norm-ball gadget: same items as the simplex gadget, roots rounded to ``precision_bits``.

    Per-item shifts are rounded down and the radius up, so a subset fits the
    radius exactly when its weights sum to at most ``W``.
    """
    items, rng, M = _family_items(ss)
    tie = TiePolicy.coerce(tie)
    shifts, exact = [], True
    for x in ss.w:
        r, ex = pth_root(x, p, precision_bits)
        shifts.append(r)
        exact &= ex
    gamma, ex = pth_root(ss.W, p, precision_bits, upward=True)
    exact &= ex
    c_hat = tuple(2 * M * Q(x) - r for x, r in zip(ss.w, shifts)) + (Q(2 * M * M),)
    U = PNormUncertainty(c_hat, gamma, p, precision_bits, strict=tie == TiePolicy.OPTIMISTIC)
    return Instance(items, rng, U, tie, {"gadget": "pnorm", "w": list(ss.w), "W": ss.W,
                                         "p": fmt(Q(p)), "precision_bits": precision_bits,
                                         "exact_roots": exact})


def _recognize(items: Items, U, rng: CapacityRange, ss: Optional[SubsetSumInstance]) -> SubsetSumInstance:
    # the family solvers only accept instances that regenerate bit for bit
    try:
        if ss is None:
            if not isinstance(U, SimplexUncertainty) or U.gamma.denominator != 1:
                raise InputError("not a gadget")
            ss = SubsetSumInstance([int(x) for x in items.a[:-1]], int(U.gamma))
            if any(Q(int(x)) != x for x in items.a[:-1]):
                raise InputError("not a gadget")
        if isinstance(U, SimplexUncertainty):
            ref = gen_gadget_simplex(ss)
        else:
            ref = gen_gadget_pnorm(ss, U.p, U.precision_bits)
    except InputError:
        raise CapabilityError("only generated subset-sum gadget instances are supported "
                              "for simplex and norm uncertainty") from None
    if (ref.items != items or ref.rng != rng or ref.model.c_hat != U.c_hat
            or ref.model.gamma != U.gamma):
        raise CapabilityError("only generated subset-sum gadget instances are supported "
                              "for simplex and norm uncertainty")
    return ss


def _family_profile(ss: SubsetSumInstance, v_star: int) -> Pwl:
    M = sum(ss.w) + 1
    total = sum(ss.w)
    return Pwl([(0, 0), (v_star, -v_star), (v_star + M, M - v_star), (total + M, M - total)]
               if v_star > 0 else [(0, 0), (M, M), (total + M, M - total)])


def _family_solve(items: Items, U, rng: CapacityRange, ss: SubsetSumInstance, tie, name: str) -> SolveResult:
    tie = TiePolicy.coerce(tie)
    if len(ss.w) > SUBSET_BUDGET:
        raise BudgetExceeded(f"{len(ss.w)} weights exceed the subset budget {SUBSET_BUDGET}")
    v_star = reachable_sums(ss.w, ss.W)[-1]
    M = sum(ss.w) + 1
    f = _family_profile(ss, v_star)
    b, v = maximize(f, rng.lo, rng.hi)
    if (b, v) != (v_star + M, M - v_star):
        raise InvariantViolation("gadget optimum is not at V* + M")
    # witness: raise the chosen items' ratios onto the last item's ratio
    S = subset_with_sum(ss.w, v_star)
    c = list(U.c_hat)
    for i in S:
        c[i] = Q(2 * M) * ss.w[i]
    lift = [ci - hi for ci, hi in zip(c, U.c_hat)]
    if isinstance(U, SimplexUncertainty):
        inside = sum(lift) <= U.gamma
    elif U.p.denominator == 1:
        inside = sum(x ** int(U.p) for x in lift) <= U.gamma ** int(U.p)
    else:
        inside = True  # fractional p: membership follows from the rounding directions
    if not inside:
        raise InvariantViolation("gadget witness lies outside the uncertainty set")
    if U.strict:
        # optimistic gadget: the last ratio sits just below 2M
        c[-1] = c[-1] - Q(1, 2)
    c = tuple(c)
    x = follower_solve(items, c, b, tie)
    if sum(di * xi for di, xi in zip(items.d, x)) != v:
        raise InvariantViolation("gadget witness does not attain the optimum")
    return SolveResult(b, v, profile=f.restrict(rng.lo, rng.hi), c=c, x=x, solver=name,
                       info={"v_star": v_star, "subset": sorted(S)})


def solve_simplex_family(items: Items, U: SimplexUncertainty, rng: CapacityRange,
                         tie=TiePolicy.PESSIMISTIC) -> SolveResult:
    """Exact solution of a generated simplex gadget.

    The leader's optimum is ``V* + M`` with value ``M - V*``, where ``V*`` is
    the largest subset sum not exceeding ``gamma``.
    """
    ss = _recognize(items, U, rng, None)
    return _family_solve(items, U, rng, ss, tie, "simplex_family")


def solve_pnorm_family(items: Items, U: PNormUncertainty, rng: CapacityRange,
                       ss: SubsetSumInstance, tie=TiePolicy.PESSIMISTIC) -> SolveResult:
    """Exact solution of a generated norm-ball gadget built from ``ss``."""
    ss = _recognize(items, U, rng, ss)
    return _family_solve(items, U, rng, ss, tie, "pnorm_family")


def eval_family(items: Items, U, b, ss: Optional[SubsetSumInstance] = None) -> Rational:
    """Leader value at ``b`` on a simplex or norm-ball gadget."""
    rng = CapacityRange(0, items.total)
    ss = _recognize(items, U, rng, ss)
    b = _check_capacity(items, b)
    return evaluate(_family_profile(ss, reachable_sums(ss.w, ss.W)[-1]), b)
