"""Exact rationals and continuous piecewise-linear functions.

Every solver in the package reduces to a handful of operations on
piecewise-linear functions of the capacity: evaluation, pointwise minimum
(lower envelope), nonnegative weighted sums and maximization over a range.
All of them are carried out in exact rational arithmetic.
"""
from __future__ import annotations

import numbers
import re
from bisect import bisect_left, bisect_right
from typing import Iterable, Sequence

import gmpy2

from .errors import InputError, InvariantViolation

Rational = type(gmpy2.mpq())

_RATIONAL_RE = re.compile(r"^\s*([+-]?\d+)\s*(?:/\s*(\d+))?\s*$")


def Q(value, den=None) -> Rational:
    """Convert ``value`` (int, rational or ``"num/den"`` string) to an exact rational.

    Floats are rejected on purpose: a silently rounded input would break the
    exact tie detection the solvers rely on.
    """
    if den is not None:
        if den == 0:
            raise ZeroDivisionError("rational with zero denominator")
        return Q(value) / Q(den)
    if isinstance(value, Rational):
        return value
    if isinstance(value, bool):
        raise InputError(f"not a rational number: {value!r}")
    if isinstance(value, (int, numbers.Rational)):
        return gmpy2.mpq(value)
    if isinstance(value, str):
        m = _RATIONAL_RE.match(value)
        if not m:
            raise InputError(f"not a rational literal: {value!r}")
        num, d = m.group(1), m.group(2)
        if d is not None and int(d) == 0:
            raise InputError(f"zero denominator in {value!r}")
        return gmpy2.mpq(int(num), int(d) if d is not None else 1)
    if hasattr(value, "numerator") and hasattr(value, "denominator") and not isinstance(value, float):
        return gmpy2.mpq(int(value.numerator), int(value.denominator))
    raise InputError(f"not an exact rational: {value!r}")


def qvec(values: Iterable) -> tuple:
    return tuple(Q(v) for v in values)


def fmt(q: Rational) -> str:
    """Canonical string form, ``"n"`` or ``"n/d"``."""
    q = Q(q)
    if q.denominator == 1:
        return str(q.numerator)
    return f"{q.numerator}/{q.denominator}"


class Pwl:
    """Continuous piecewise-linear function on a closed interval.

    Stored as strictly increasing breakpoints ``xs`` with values ``ys``;
    between consecutive breakpoints the function interpolates linearly.
    Interior breakpoints that are collinear with their neighbours are removed
    on construction, so two equal functions have equal representations.
    A single breakpoint encodes a function on a one-point domain.
    """

    __slots__ = ("xs", "ys")

    def __init__(self, points: Iterable[tuple]):
        pts = [(Q(x), Q(y)) for x, y in points]
        if not pts:
            raise InputError("a piecewise-linear function needs at least one breakpoint")
        for (x0, _), (x1, _) in zip(pts, pts[1:]):
            if not x0 < x1:
                raise InputError("breakpoints must be strictly increasing")
        xs, ys = _prune([p[0] for p in pts], [p[1] for p in pts])
        self.xs = tuple(xs)
        self.ys = tuple(ys)

    @classmethod
    def _from_sorted(cls, xs: Sequence, ys: Sequence, prune: bool = True) -> Pwl:
        # trusted constructor; callers guarantee strictly increasing xs
        obj = cls.__new__(cls)
        if prune:
            xs, ys = _prune(list(xs), list(ys))
        obj.xs = tuple(xs)
        obj.ys = tuple(ys)
        return obj

    @classmethod
    def point(cls, b, v) -> Pwl:
        return cls._from_sorted((Q(b),), (Q(v),), prune=False)

    @property
    def lo(self) -> Rational:
        return self.xs[0]

    @property
    def hi(self) -> Rational:
        return self.xs[-1]

    @property
    def domain(self) -> tuple:
        return self.xs[0], self.xs[-1]

    @property
    def is_point(self) -> bool:
        return len(self.xs) == 1

    @property
    def points(self) -> list:
        return list(zip(self.xs, self.ys))

    def __len__(self) -> int:
        return len(self.xs)

    def __call__(self, b) -> Rational:
        return evaluate(self, b)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Pwl):
            return NotImplemented
        return self.xs == other.xs and self.ys == other.ys

    def __hash__(self) -> int:
        return hash((self.xs, self.ys))

    def __repr__(self) -> str:
        inner = ", ".join(f"({fmt(x)}, {fmt(y)})" for x, y in zip(self.xs, self.ys))
        return f"Pwl([{inner}])"

    def slopes(self) -> list:
        return [(y1 - y0) / (x1 - x0)
                for x0, x1, y0, y1 in zip(self.xs, self.xs[1:], self.ys, self.ys[1:])]

    def slope_right(self, b) -> Rational:
        """Slope of the linear piece directly right of ``b``."""
        b = Q(b)
        if not self.xs[0] <= b < self.xs[-1]:
            raise InputError(f"no linear piece right of {fmt(b)} in domain {self._dom_str()}")
        k = bisect_right(self.xs, b) - 1
        return (self.ys[k + 1] - self.ys[k]) / (self.xs[k + 1] - self.xs[k])

    def restrict(self, lo, hi) -> Pwl:
        """The same function on the sub-interval ``[lo, hi]``."""
        lo, hi = Q(lo), Q(hi)
        if lo > hi:
            raise InputError(f"empty range [{fmt(lo)}, {fmt(hi)}]")
        if lo < self.xs[0] or hi > self.xs[-1]:
            raise InputError(f"range [{fmt(lo)}, {fmt(hi)}] outside domain {self._dom_str()}")
        if lo == hi:
            return Pwl.point(lo, evaluate(self, lo))
        i = bisect_right(self.xs, lo)
        j = bisect_left(self.xs, hi)
        xs = [lo] + list(self.xs[i:j]) + [hi]
        ys = [evaluate(self, lo)] + list(self.ys[i:j]) + [evaluate(self, hi)]
        return Pwl._from_sorted(xs, ys, prune=False)

    def shift(self, dx, dy) -> Pwl:
        dx, dy = Q(dx), Q(dy)
        return Pwl._from_sorted([x + dx for x in self.xs], [y + dy for y in self.ys], prune=False)

    def _dom_str(self) -> str:
        return f"[{fmt(self.xs[0])}, {fmt(self.xs[-1])}]"


def _prune(xs: list, ys: list) -> tuple:
    if len(xs) <= 2:
        return xs, ys
    kx, ky = [xs[0], xs[1]], [ys[0], ys[1]]
    for x, y in zip(xs[2:], ys[2:]):
        x0, y0, x1, y1 = kx[-2], ky[-2], kx[-1], ky[-1]
        if (y1 - y0) * (x - x1) == (y - y1) * (x1 - x0):
            kx[-1], ky[-1] = x, y
        else:
            kx.append(x)
            ky.append(y)
    return kx, ky


def evaluate(f: Pwl, b) -> Rational:
    """Exact value of ``f`` at ``b``."""
    b = Q(b)
    xs = f.xs
    if b < xs[0] or b > xs[-1]:
        raise InputError(f"{fmt(b)} outside domain {f._dom_str()}")
    k = bisect_left(xs, b)
    if xs[k] == b:
        return f.ys[k]
    x0, x1, y0, y1 = xs[k - 1], xs[k], f.ys[k - 1], f.ys[k]
    return y0 + (y1 - y0) * (b - x0) / (x1 - x0)


def _values_at(f: Pwl, points: Sequence) -> list:
    # points sorted and inside the domain; linear walk instead of repeated bisection
    xs, ys = f.xs, f.ys
    out = []
    k = 0
    last = len(xs) - 1
    for b in points:
        while k < last and xs[k + 1] < b:
            k += 1
        if xs[k] == b:
            out.append(ys[k])
        elif k < last and xs[k + 1] == b:
            out.append(ys[k + 1])
        else:
            out.append(ys[k] + (ys[k + 1] - ys[k]) * (b - xs[k]) / (xs[k + 1] - xs[k]))
    return out


def _check_common_domain(fs: Sequence[Pwl]) -> None:
    lo, hi = fs[0].domain
    for f in fs[1:]:
        if f.domain != (lo, hi):
            raise InputError(
                f"functions must share one domain, got {fs[0]._dom_str()} and {f._dom_str()}")


def _min2(f: Pwl, g: Pwl) -> Pwl:
    if f.is_point:
        return f if f.ys[0] <= g.ys[0] else g
    xs = sorted(set(f.xs).union(g.xs))
    fv = _values_at(f, xs)
    gv = _values_at(g, xs)
    if all(u <= v for u, v in zip(fv, gv)):
        return f
    if all(v <= u for u, v in zip(fv, gv)):
        return g
    ox, oy = [], []
    for i in range(len(xs) - 1):
        f0, g0 = fv[i], gv[i]
        ox.append(xs[i])
        oy.append(f0 if f0 <= g0 else g0)
        d0 = f0 - g0
        d1 = fv[i + 1] - gv[i + 1]
        if (d0 < 0 < d1) or (d1 < 0 < d0):
            t = d0 / (d0 - d1)
            ox.append(xs[i] + t * (xs[i + 1] - xs[i]))
            oy.append(f0 + t * (fv[i + 1] - f0))
    ox.append(xs[-1])
    oy.append(min(fv[-1], gv[-1]))
    return Pwl._from_sorted(ox, oy)


def lower_envelope(fs: Sequence[Pwl]) -> Pwl:
    """Pointwise minimum of functions sharing one domain (divide and conquer)."""
    fs = list(fs)
    if not fs:
        raise InputError("lower envelope of an empty family")
    _check_common_domain(fs)
    return _pairwise_min(list(dict.fromkeys(fs)))


def _pairwise_min(fs: list) -> Pwl:
    while len(fs) > 1:
        merged = [_min2(fs[i], fs[i + 1]) for i in range(0, len(fs) - 1, 2)]
        if len(fs) % 2:
            merged.append(fs[-1])
        fs = merged
    return fs[0]


def envelope_of_partials(fs: Sequence[Pwl]) -> Pwl:
    """Pointwise minimum over functions defined on different sub-intervals.

    At each capacity the minimum runs over the functions whose domain
    contains it.  The union of the domains must be an interval and the
    resulting minimum must be continuous; both are checked.

    The domain endpoints cut the line into elementary segments.  Each
    function is stored at the O(log) nodes of a segment tree that exactly
    cover its domain, and envelopes are pushed from the root to the leaves,
    so no function is ever restricted to every segment it spans.
    """
    fs = list(fs)
    if not fs:
        raise InputError("lower envelope of an empty family")
    cuts = sorted({x for f in fs for x in (f.lo, f.hi)})
    if len(cuts) == 1:
        return Pwl.point(cuts[0], min(f.ys[0] for f in fs))
    pos = {x: i for i, x in enumerate(cuts)}
    own: dict = {}
    points = []

    def insert(f, i, j, s, e):
        if i <= s and e <= j:
            own.setdefault((s, e), []).append(f if (f.lo, f.hi) == (cuts[s], cuts[e])
                                               else f.restrict(cuts[s], cuts[e]))
            return
        mid = (s + e) // 2
        if i < mid:
            insert(f, i, j, s, mid)
        if j > mid:
            insert(f, i, j, mid, e)

    last = len(cuts) - 1
    for f in fs:
        if f.is_point:
            points.append(f)
        else:
            insert(f, pos[f.lo], pos[f.hi], 0, last)

    leaves = []

    def push(s, e, inherited):
        group = own.get((s, e), [])
        if inherited is not None:
            group = group + [inherited]
        env = _pairwise_min(group) if group else None
        if e - s == 1:
            if env is None:
                raise InputError(f"no function defined on ({fmt(cuts[s])}, {fmt(cuts[e])})")
            leaves.append(env)
            return
        mid = (s + e) // 2
        push(s, mid, None if env is None else env.restrict(cuts[s], cuts[mid]))
        push(mid, e, None if env is None else env.restrict(cuts[mid], cuts[e]))

    push(0, last, None)
    ox, oy = list(leaves[0].xs), list(leaves[0].ys)
    for piece in leaves[1:]:
        # a function spanning the cut appears on both sides, one ending there on one side only
        if piece.ys[0] != oy[-1]:
            raise InvariantViolation(f"envelope of partial functions is discontinuous at {fmt(piece.lo)}")
        ox.pop()
        oy.pop()
        ox.extend(piece.xs)
        oy.extend(piece.ys)
    out = Pwl._from_sorted(ox, oy)
    for f in points:
        if f.ys[0] < evaluate(out, f.lo):
            raise InvariantViolation(f"envelope of partial functions is discontinuous at {fmt(f.lo)}")
    return out


def weighted_sum(fs: Sequence[Pwl], weights: Sequence) -> Pwl:
    """Exact nonnegative combination ``sum_i weights[i] * fs[i]``.

    Computed by one left-to-right sweep over the slope changes of all inputs.
    """
    fs = list(fs)
    weights = [Q(w) for w in weights]
    if not fs:
        raise InputError("weighted sum of an empty family")
    if len(fs) != len(weights):
        raise InputError(f"{len(fs)} functions but {len(weights)} weights")
    if any(w < 0 for w in weights):
        raise InputError("weights must be nonnegative")
    _check_common_domain(fs)
    lo, hi = fs[0].domain
    value = Q(0)
    if lo == hi:
        return Pwl.point(lo, sum((w * f.ys[0] for f, w in zip(fs, weights)), value))
    slope = Q(0)
    delta: dict = {}
    for f, w in zip(fs, weights):
        if w == 0:
            continue
        value += w * f.ys[0]
        prev = None
        for k, s in enumerate(f.slopes()):
            if prev is None:
                slope += w * s
            elif s != prev:
                x = f.xs[k]
                delta[x] = delta.get(x, 0) + w * (s - prev)
            prev = s
    xs = [lo]
    ys = [value]
    for x in sorted(delta):
        value += slope * (x - xs[-1])
        slope += delta[x]
        xs.append(x)
        ys.append(value)
    ys.append(value + slope * (hi - xs[-1]))
    xs.append(hi)
    return Pwl._from_sorted(xs, ys)


def _check_range(f: Pwl, lo, hi) -> tuple:
    lo = f.lo if lo is None else Q(lo)
    hi = f.hi if hi is None else Q(hi)
    if lo > hi:
        raise InputError(f"empty range [{fmt(lo)}, {fmt(hi)}]")
    if lo < f.lo or hi > f.hi:
        raise InputError(f"range [{fmt(lo)}, {fmt(hi)}] outside domain {f._dom_str()}")
    return lo, hi


def maximize(f: Pwl, lo=None, hi=None) -> tuple:
    """Return ``(b, value)`` maximizing ``f`` on ``[lo, hi]``; the smallest maximizer wins."""
    lo, hi = _check_range(f, lo, hi)
    best_b, best_v = lo, evaluate(f, lo)
    i = bisect_right(f.xs, lo)
    j = bisect_left(f.xs, hi)
    for x, y in zip(f.xs[i:j], f.ys[i:j]):
        if y > best_v:
            best_b, best_v = x, y
    v_hi = evaluate(f, hi)
    if v_hi > best_v:
        best_b, best_v = hi, v_hi
    return best_b, best_v


def maximizers(f: Pwl, lo=None, hi=None) -> list:
    """All maximizers of ``f`` on ``[lo, hi]`` as maximal closed intervals ``(start, end)``.

    Isolated maximizers appear as degenerate intervals ``(b, b)``.
    """
    lo, hi = _check_range(f, lo, hi)
    g = f.restrict(lo, hi)
    best = max(g.ys)
    out: list = []
    for x, y in zip(g.xs, g.ys):
        if y != best:
            continue
        if out and out[-1][1] == _prev_x(g, x) and evaluate(g, out[-1][1]) == best:
            out[-1] = (out[-1][0], x)
        else:
            out.append((x, x))
    return out


def _prev_x(g: Pwl, x):
    k = g.xs.index(x)
    return g.xs[k - 1] if k else None
