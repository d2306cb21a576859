"""Route an :class:`Instance` to the solver or evaluator for its model."""
from __future__ import annotations

from itertools import combinations
from typing import Optional

from .certain import (CertainProfits, Instance, SolveResult, _check_capacity,
                      follower_solve, solve_certain)
from .errors import CapabilityError, InvariantViolation
from .pwl import Pwl, Q, evaluate, fmt
from .robust_finite import FiniteUncertainty, eval_robust_finite, solve_robust_finite
from .robust_hard import (PRODUCT_BUDGET, PNormUncertainty, ProductFiniteUncertainty,
                          SimplexUncertainty, SubsetSumInstance, eval_family, eval_product_finite,
                          solve_pnorm_family, solve_product_finite,
                          solve_simplex_family)
from .robust_interval import (IntervalUncertainty, eval_robust_interval, oracle_solve_interval,
                              solve_robust_interval)
from .stochastic import (FiniteSupportDistribution, ProductUniformContinuous, ProductUniformDiscrete,
                         eval_stochastic_finite, eval_stochastic_mc, eval_stochastic_product_discrete,
                         gen_gadget_stochastic, solve_stochastic_finite,
                         solve_stochastic_product_discrete)


def _dot(d, x):
    return sum((di * xi for di, xi in zip(d, x)), Q(0))


def _gadget_ss(inst: Instance, kind: str) -> SubsetSumInstance:
    meta = inst.meta or {}
    if meta.get("gadget") != kind or "w" not in meta or "W" not in meta:
        raise CapabilityError(f"{kind} uncertainty is only solvable for generated gadget instances "
                              f"(provenance metadata 'gadget', 'w', 'W' missing)")
    return SubsetSumInstance(meta["w"], meta["W"])


def _two_point(inst: Instance) -> Instance:
    # continuous boxes of the counting gadget reduce exactly to its two-point version
    meta = inst.meta or {}
    if meta.get("gadget") != "stochastic" or not meta.get("continuous"):
        raise CapabilityError("exact solving of continuous distributions is only available for "
                              "generated counting gadgets; use eval with Monte Carlo sampling")
    ref = gen_gadget_stochastic(meta["a_star"], meta["b_star"], Q(meta["tau"]), continuous=True)
    if ref.items != inst.items or ref.rng != inst.rng or ref.model != inst.model:
        raise CapabilityError("instance does not match the counting gadget named in its metadata")
    return gen_gadget_stochastic(meta["a_star"], meta["b_star"], Q(meta["tau"]), tie=inst.tie)


def solve_instance(inst: Instance, budget: Optional[int] = None, oracle: bool = False) -> SolveResult:
    """Solve ``inst`` exactly.  With ``oracle`` an independent brute force check is run too."""
    budget = PRODUCT_BUDGET if budget is None else budget
    items, rng, model, tie = inst.items, inst.rng, inst.model, inst.tie
    if isinstance(model, CertainProfits):
        res = solve_certain(items, model.c, rng, tie)
    elif isinstance(model, FiniteUncertainty):
        res = solve_robust_finite(items, model, rng, tie)
    elif isinstance(model, IntervalUncertainty):
        res = solve_robust_interval(items, model, rng, tie)
    elif isinstance(model, ProductFiniteUncertainty):
        res = solve_product_finite(items, model, rng, tie, budget)
    elif isinstance(model, SimplexUncertainty):
        _gadget_ss(inst, "simplex")
        res = solve_simplex_family(items, model, rng, tie)
    elif isinstance(model, PNormUncertainty):
        res = solve_pnorm_family(items, model, rng, _gadget_ss(inst, "pnorm"), tie)
    elif isinstance(model, FiniteSupportDistribution):
        res = solve_stochastic_finite(items, model, rng, tie)
    elif isinstance(model, ProductUniformDiscrete):
        res = solve_stochastic_product_discrete(items, model, rng, tie, budget)
    elif isinstance(model, ProductUniformContinuous):
        ref = _two_point(inst)
        res = solve_stochastic_product_discrete(ref.items, ref.model, ref.rng, ref.tie, budget)
        res.solver = "stochastic_two_point"
    else:
        raise CapabilityError(f"no solver for model {type(model).__name__}")
    if oracle:
        res.info["oracle"] = _oracle(inst, res, budget)
    return res


def _oracle(inst: Instance, res: SolveResult, budget: int) -> str:
    """Cross-check ``res`` by a method that shares no code path with the solver."""
    items, model, tie = inst.items, inst.model, inst.tie
    if isinstance(model, IntervalUncertainty):
        ref = oracle_solve_interval(items, model, inst.rng, tie)
        if (ref.b_star, ref.value) != (res.b_star, res.value):
            raise InvariantViolation(f"oracle optimum ({fmt(ref.b_star)}, {fmt(ref.value)}) differs")
        return "linear extension enumeration agrees"
    if isinstance(model, (SimplexUncertainty, PNormUncertainty)):
        kind = "simplex" if isinstance(model, SimplexUncertainty) else "pnorm"
        ss = _gadget_ss(inst, kind)
        best = max(sum(s) for r in range(ss.m + 1) for s in combinations(ss.w, r) if sum(s) <= ss.W)
        if best != res.info["v_star"]:
            raise InvariantViolation(f"subset enumeration gives V*={best}")
        return "subset enumeration agrees"
    # every other model: the leader value at every breakpoint by direct evaluation
    f = res.profile
    for b in f.xs:
        v = _direct_value(inst, b, budget)
        if v != evaluate(f, b):
            raise InvariantViolation(f"direct evaluation at b={fmt(b)} gives {fmt(v)}")
    return f"direct evaluation agrees at {len(f.xs)} breakpoints"


def _direct_value(inst: Instance, b, budget: int):
    items, model, tie = inst.items, inst.model, inst.tie
    if isinstance(model, CertainProfits):
        return _dot(items.d, follower_solve(items, model.c, b, tie))
    if isinstance(model, FiniteUncertainty):
        return eval_robust_finite(items, model, b, tie)[0]
    if isinstance(model, ProductFiniteUncertainty):
        return eval_robust_finite(items, model.expand(budget), b, tie)[0]
    if isinstance(model, FiniteSupportDistribution):
        return eval_stochastic_finite(items, model, b, tie)
    if isinstance(model, ProductUniformDiscrete):
        return eval_stochastic_finite(items, model.expand(budget), b, tie)
    ref = _two_point(inst)
    return eval_stochastic_finite(ref.items, ref.model.expand(budget), b, ref.tie)


def eval_instance(inst: Instance, b, budget: Optional[int] = None, samples: int = 10000,
                  seed: int = 0) -> SolveResult:
    """Leader value at a single capacity ``b`` plus the witness available for the model."""
    budget = PRODUCT_BUDGET if budget is None else budget
    items, model, tie = inst.items, inst.model, inst.tie
    b = _check_capacity(items, b)
    out = SolveResult(b, Q(0), solver="eval")
    if isinstance(model, CertainProfits):
        out.c = model.c
        out.x = follower_solve(items, model.c, b, tie)
        out.value = _dot(items.d, out.x)
    elif isinstance(model, FiniteUncertainty):
        out.value, k = eval_robust_finite(items, model, b, tie)
        out.c = model.scenarios[k]
        out.x = follower_solve(items, out.c, b, tie)
        out.info["scenario"] = k
    elif isinstance(model, IntervalUncertainty):
        out = eval_robust_interval(items, model, b, tie)
        out.solver = "eval"
    elif isinstance(model, ProductFiniteUncertainty):
        out.value, out.c = eval_product_finite(items, model, b, tie, budget)
        out.x = follower_solve(items, out.c, b, tie)
    elif isinstance(model, SimplexUncertainty):
        out.value = eval_family(items, model, b, _gadget_ss(inst, "simplex"))
    elif isinstance(model, PNormUncertainty):
        out.value = eval_family(items, model, b, _gadget_ss(inst, "pnorm"))
    elif isinstance(model, FiniteSupportDistribution):
        out.value = eval_stochastic_finite(items, model, b, tie)
    elif isinstance(model, ProductUniformDiscrete):
        out.value = eval_stochastic_product_discrete(items, model, b, tie, budget)
    elif isinstance(model, ProductUniformContinuous):
        est, err = eval_stochastic_mc(items, model, b, tie, samples, seed)
        out.value = est
        out.solver = "monte_carlo"
        out.info.update(stderr=err, samples=samples, seed=seed)
    else:
        raise CapabilityError(f"no evaluator for model {type(model).__name__}")
    return out


def objective_profile(inst: Instance, budget: Optional[int] = None) -> Pwl:
    """The leader's objective on the capacity range, as an exact piecewise linear function."""
    return solve_instance(inst, budget).profile
