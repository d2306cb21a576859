"""Exact solvers for the bilevel continuous knapsack problem with uncertain follower profits.

The leader chooses the knapsack capacity ``b``, the follower packs items
greedily by profit ratio ``c/a``, and the leader earns ``d @ x``.  All
arithmetic is exact (``gmpy2.mpq``).
"""
from .certain import (CapacityRange, CertainProfits, FractionalPrefix, Instance, Items, SolveResult,
                      TiePolicy, bilevel_dantzig, dantzig_min, follower_order, follower_solve,
                      leader_pwl, normalize_objective, solve_certain)
from .dispatch import eval_instance, objective_profile, solve_instance
from .errors import (BudgetExceeded, CapabilityError, InputError, InvariantViolation,
                     KnapsackError)
from .instance_io import dump_instance, instance_from_dict, instance_to_dict, load_instance
from .pwl import (Pwl, Q, envelope_of_partials, evaluate, lower_envelope, maximize, maximizers,
                  weighted_sum)
from .robust_finite import FiniteUncertainty, eval_robust_finite, solve_robust_finite
from .robust_hard import (PNormUncertainty, ProductFiniteUncertainty, SimplexUncertainty,
                          SubsetSumInstance, decide_subset_sum_product, eval_family,
                          eval_product_finite, gen_gadget_pnorm, gen_gadget_product,
                          gen_gadget_simplex, shape_f_product, solve_pnorm_family,
                          solve_product_finite, solve_simplex_family)
from .robust_interval import (IntervalOrder, IntervalUncertainty, adversary_solve,
                              build_interval_order, eval_robust_interval, oracle_solve_interval,
                              optimistic_preprocess, recover_scenario, solve_robust_interval)
from .stochastic import (FiniteSupportDistribution, ProductUniformContinuous, ProductUniformDiscrete,
                         count_knapsack, count_knapsack_bisection, eval_stochastic_finite,
                         eval_stochastic_mc, eval_stochastic_product_discrete,
                         expected_pwl_product_discrete, gen_gadget_stochastic,
                         solve_stochastic_finite, solve_stochastic_product_discrete)

__version__ = "0.1.0"
