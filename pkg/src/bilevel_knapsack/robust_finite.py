"""Robust solver for an explicitly listed, finite set of follower profit vectors."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

from .certain import (CapacityRange, Items, SolveResult, TiePolicy, _check_capacity,
                      _check_profits, follower_solve, leader_pwl)
from .errors import InputError
from .pwl import evaluate, lower_envelope, maximize, qvec


@dataclass(frozen=True)
class FiniteUncertainty:
    scenarios: tuple

    def __init__(self, scenarios: Iterable):
        sc = tuple(qvec(c) for c in scenarios)
        if not sc:
            raise InputError("finite uncertainty set is empty")
        n = len(sc[0])
        for c in sc:
            if len(c) != n:
                raise InputError("scenarios must all have the same length")
            if any(ci <= 0 for ci in c):
                raise InputError("scenario profits must be positive")
        object.__setattr__(self, "scenarios", sc)


def _profiles(items: Items, U: FiniteUncertainty, tie) -> tuple:
    # distinct scenarios in first-occurrence order, with their profiles
    uniq = list(dict.fromkeys(U.scenarios))
    for c in uniq:
        _check_profits(items, c)
    return uniq, [leader_pwl(items, c, tie) for c in uniq]


def eval_robust_finite(items: Items, U: FiniteUncertainty, b, tie=TiePolicy.PESSIMISTIC) -> tuple:
    """Worst case leader value at ``b`` and the index of the (first) worst scenario."""
    b = _check_capacity(items, b)
    tie = TiePolicy.coerce(tie)
    best = None
    for idx, c in enumerate(U.scenarios):
        v = evaluate(leader_pwl(items, c, tie), b)
        if best is None or v < best[0]:
            best = (v, idx)
    return best


def solve_robust_finite(items: Items, U: FiniteUncertainty, rng: CapacityRange,
                        tie=TiePolicy.PESSIMISTIC) -> SolveResult:
    rng.check(items)
    tie = TiePolicy.coerce(tie)
    uniq, fs = _profiles(items, U, tie)
    fs = [g.restrict(rng.lo, rng.hi) for g in fs]
    f = lower_envelope(fs)
    b, v = maximize(f)
    at_b = {c: evaluate(g, b) for c, g in zip(uniq, fs)}
    worst = min(range(len(U.scenarios)), key=lambda k: (at_b[U.scenarios[k]], k))
    c = U.scenarios[worst]
    return SolveResult(b, v, profile=f, c=c,
                       x=follower_solve(items, c, b, tie), solver="robust_finite",
                       info={"scenario": worst, "distinct_scenarios": len(uniq)})
