"""Walk through the five-item example under several models of the follower's profits.

The leader picks the capacity b, the follower fills a continuous knapsack
greedily by profit ratio, and the leader collects d @ x.  Run with

    python3 demos/01_worked_examples.py
"""
from bilevel_knapsack import (CapacityRange, FiniteSupportDistribution, FiniteUncertainty,
                              IntervalUncertainty, Items, Q, adversary_solve, build_interval_order,
                              leader_pwl, recover_scenario, solve_certain, solve_robust_finite,
                              solve_robust_interval, solve_stochastic_finite)
from bilevel_knapsack.pwl import fmt, maximizers

items = Items([1, 1, 1, 1, 1], [2, -1, 1, -2, 0])
c1 = [5, 4, 3, 2, 1]
c2 = [5, 4, 3, 2, 6]
full = CapacityRange(0, 5)


def show(title, f):
    print(f"{title}:")
    print("   " + "  ".join(f"({fmt(b)}, {fmt(v)})" for b, v in f.points))


print("== Known profits")
for name, c in (("c1", c1), ("c2", c2)):
    show(f"leader value for {name}", leader_pwl(items, c))
    r = solve_certain(items, c, full)
    print(f"   best capacity {fmt(r.b_star)} with value {fmt(r.value)}\n")

print("== Robust against the finite set {c1, c2}")
r = solve_robust_finite(items, FiniteUncertainty([c1, c2]), full)
show("worst case over both scenarios", r.profile)
print(f"   optimum ({fmt(r.b_star)}, {fmt(r.value)}), adversary picks scenario {r.info['scenario']}\n")

print("== Robust against every c between c1 and c2 (componentwise intervals)")
r = solve_robust_interval(items, IntervalUncertainty(c1, c2), full)
show("worst case over the box", r.profile)
print("   optimal capacities:", ", ".join(fmt(b) for b, _ in maximizers(r.profile)),
      f"with value {fmt(r.value)}")
print(f"   worst profits at the first one: {[fmt(x) for x in r.c]}\n")

print("== Expected value when c1 and c2 are equally likely")
r = solve_stochastic_finite(items, FiniteSupportDistribution([c1, c2], [Q(1, 2), Q(1, 2)]), full)
show("average of the two profiles", r.profile)
print(f"   leftmost optimum ({fmt(r.b_star)}, {fmt(r.value)})\n")

print("== The adversary's problem at one capacity")
three = Items([1, 1, 1], [-1, 1, 0])
U = IntervalUncertainty([3, 2, 1], [3, 2, 4])
order = build_interval_order(three, U)
prefix, value, head = adversary_solve(three, order, Q(3, 2), return_head=True)
c = recover_scenario(three, U, order, prefix, head)
print(f"   at b = 3/2 the worst packing takes items {sorted(prefix.J)} "
      f"with item {prefix.j} at fraction {fmt(prefix.lam)}")
print(f"   leader value {fmt(value)}, realized by profits {[fmt(x) for x in c]}")
