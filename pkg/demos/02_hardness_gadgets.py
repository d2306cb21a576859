"""Decide subset sum with robust knapsack solvers.

Each generator turns a subset sum question (weights w, target W) into a
robust bilevel instance whose optimum reveals the answer.  Run with

    python3 demos/02_hardness_gadgets.py
"""
from bilevel_knapsack import (Q, SubsetSumInstance, decide_subset_sum_product, eval_family,
                              gen_gadget_pnorm, gen_gadget_product, gen_gadget_simplex,
                              shape_f_product, solve_pnorm_family, solve_product_finite,
                              solve_simplex_family)
from bilevel_knapsack.pwl import fmt
from bilevel_knapsack.robust_hard import reachable_sums

questions = [([1, 2], 2), ([2, 4], 3), ([3, 5, 7], 12), ([4, 6, 9], 11)]

print("== Product of two-point sets per item")
for w, W in questions:
    ss = SubsetSumInstance(w, W)
    g = gen_gadget_product(ss)
    r = solve_product_finite(g.items, g.model, g.rng, g.tie)
    print(f"   w={w} W={W}: {g.model.size} scenarios, optimum at b={fmt(r.b_star)} "
          f"(upper end {fmt(g.rng.hi)}) -> {'yes' if decide_subset_sum_product(ss) else 'no'}")

ss = SubsetSumInstance([1, 2], 2)
print("   closed form of the objective for w=[1, 2], W=2:")
for b in (Q(1, 2), Q(1), Q(3, 2), Q(2), Q(9, 4)):
    print(f"      f({fmt(b)}) = {fmt(shape_f_product(ss, b))}")

print("\n== Simplex budget around c_hat")
for w, W in questions:
    ss = SubsetSumInstance(w, W)
    g = gen_gadget_simplex(ss)
    r = solve_simplex_family(g.items, g.model, g.rng)
    best = max(s for s in reachable_sums(w) if s <= W)
    print(f"   w={w} W={W}: largest subset sum {r.info['v_star']} (check {best}), "
          f"f(W) = {fmt(eval_family(g.items, g.model, W))}, optimum ({fmt(r.b_star)}, {fmt(r.value)})")

print("\n== p-norm ball (rounded p-th roots)")
for p in (Q(1), Q(2), Q(3, 2)):
    ss = SubsetSumInstance([3, 5, 7], 12)
    g = gen_gadget_pnorm(ss, p)
    r = solve_pnorm_family(g.items, g.model, g.rng, ss)
    print(f"   p={fmt(p)}: exact roots {g.meta['exact_roots']}, V* = {r.info['v_star']}, "
          f"optimum ({fmt(r.b_star)}, {fmt(r.value)})")
