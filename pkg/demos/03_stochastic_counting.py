"""Count knapsack solutions with an expected-value optimizer.

The counting gadget makes the slope of the expected leader value at b*
encode how many 0/1 vectors fit under b*.  A bisection over the extra
parameter tau reads that slope off using only optimal capacities.  Run with

    python3 demos/03_stochastic_counting.py
"""
from bilevel_knapsack import (Q, count_knapsack, count_knapsack_bisection, eval_stochastic_mc,
                              eval_stochastic_product_discrete, expected_pwl_product_discrete,
                              gen_gadget_stochastic)
from bilevel_knapsack.pwl import fmt

a_star, b_star = [2, 3, 4], 5
m = len(a_star)

print(f"== Gadget for a* = {a_star}")
g = gen_gadget_stochastic(a_star, b_star)
print(f"   sizes {[fmt(x) for x in g.items.a]}, leader weights {[fmt(x) for x in g.items.d]}, "
      f"eps = {g.meta['eps']}")
f = expected_pwl_product_discrete(g.items, g.model, g.tie).restrict(g.rng.lo, g.rng.hi)
print("   b   slope right of b   count   -count/2^(m-1) + 1")
for b in range(sum(a_star)):
    k = count_knapsack(a_star, b)
    print(f"   {b:<3} {fmt(f.slope_right(b)):>16}   {k:>5}   {fmt(1 - Q(k, 2 ** (m - 1))):>18}")

print(f"\n== Bisection for b* = {b_star}")
trace = []
count = count_knapsack_bisection(a_star, b_star, trace=trace)
for k, (tau, b_opt, lo, hi) in enumerate(trace):
    print(f"   round {k}: tau = {fmt(tau):>6}, optimal b = {fmt(b_opt):>4}, slope in [{fmt(lo)}, {fmt(hi)}]")
print(f"   count {count}, dynamic programming gives {count_knapsack(a_star, b_star)}")

print("\n== Continuous boxes instead of two points")
cont = gen_gadget_stochastic(a_star, b_star, continuous=True)
exact = eval_stochastic_product_discrete(g.items, g.model, b_star, g.tie)
for n in (1000, 10000):
    est, err = eval_stochastic_mc(cont.items, cont.model, b_star, cont.tie, samples=n, seed=0)
    print(f"   {n:>6} samples: {float(est):.4f} +- {err:.4f}   (exact two-point value {fmt(exact)})")
