"""Command line front end: ``bilevel-knapsack {solve,eval,gen,export-pwl}``.

Results are printed as JSON with every rational given both exactly and as
a decimal.  Exit codes: 0 ok, 2 bad input, 3 unsupported model or budget
exceeded, 4 internal invariant violated.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import sys
import time
from pathlib import Path

from .certain import FractionalPrefix, TiePolicy
from .dispatch import eval_instance, solve_instance
from .errors import InputError, KnapsackError
from .instance_io import decimal_str, dump_instance, instance_from_dict
from .pwl import Q, Rational, fmt
from .robust_hard import (DEFAULT_PRECISION_BITS, PRODUCT_BUDGET, SubsetSumInstance,
                          gen_gadget_pnorm, gen_gadget_product, gen_gadget_simplex)
from .stochastic import gen_gadget_stochastic

CSV_HEADER = ["b_exact", "b_decimal", "v_exact", "v_decimal"]


def _int_list(text: str) -> list:
    try:
        return [int(t) for t in text.replace(",", " ").split()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma separated integers, got {text!r}") from None


def _jsonable(v):
    if isinstance(v, Rational):
        return fmt(v)
    if isinstance(v, FractionalPrefix):
        return {"J": sorted(v.J), "j": v.j, "lam": fmt(v.lam)}
    if isinstance(v, (set, frozenset)):
        return sorted(v)
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    if isinstance(v, dict):
        return {k: _jsonable(x) for k, x in v.items()}
    return v


def _record(res, elapsed: float) -> dict:
    witness = {}
    if res.c is not None:
        witness["c"] = _jsonable(res.c)
    if res.x is not None:
        witness["x"] = _jsonable(res.x)
    witness.update(_jsonable(res.info))
    return {
        "b_star": fmt(res.b_star),
        "b_star_decimal": decimal_str(res.b_star),
        "value": fmt(res.value),
        "value_decimal": decimal_str(res.value),
        "witness": witness,
        "solver": res.solver,
        "timing_s": round(elapsed, 6),
    }


def _load(path: str, tie=None):
    try:
        doc = json.loads(Path(path).read_text(encoding="utf-8"))
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise InputError(f"{path} is not valid JSON: {exc}") from None
    if tie is not None and isinstance(doc, dict):
        doc["tie"] = tie
    return instance_from_dict(doc)


def _emit(text: str, out) -> None:
    if out in (None, "-"):
        sys.stdout.write(text)
    else:
        Path(out).write_text(text, encoding="utf-8", newline="\n")


def cmd_solve(args) -> int:
    inst = _load(args.instance, args.tie)
    t = time.perf_counter()
    res = solve_instance(inst, args.model_budget, args.oracle)
    print(json.dumps(_record(res, time.perf_counter() - t), indent=2))
    return 0


def cmd_eval(args) -> int:
    inst = _load(args.instance, args.tie)
    t = time.perf_counter()
    res = eval_instance(inst, Q(args.b), args.model_budget, args.samples, args.seed)
    rec = _record(res, time.perf_counter() - t)
    rec["b"] = rec.pop("b_star")
    rec["b_decimal"] = rec.pop("b_star_decimal")
    print(json.dumps(rec, indent=2))
    return 0


def cmd_gen(args) -> int:
    if args.kind == "stochastic":
        if args.a_star is None or args.b_star is None:
            raise InputError("gen stochastic needs --a-star and --b-star")
        inst = gen_gadget_stochastic(args.a_star, args.b_star, Q(args.tau), args.continuous,
                                     tie=args.tie or TiePolicy.OPTIMISTIC)
    else:
        if args.w is None or args.W is None:
            raise InputError(f"gen {args.kind} needs --w and --W")
        ss = SubsetSumInstance(args.w, args.W)
        tie = args.tie or TiePolicy.PESSIMISTIC
        if args.kind == "product":
            inst = gen_gadget_product(ss, tie)
        elif args.kind == "simplex":
            inst = gen_gadget_simplex(ss, tie)
        else:
            inst = gen_gadget_pnorm(ss, Q(args.p), args.precision_bits, tie)
    _emit(dump_instance(inst), args.output)
    return 0


def cmd_export_pwl(args) -> int:
    inst = _load(args.instance, args.tie)
    f = solve_instance(inst, args.model_budget).profile
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_HEADER)
    for b, v in f.points:
        w.writerow([fmt(b), decimal_str(b), fmt(v), decimal_str(v)])
    _emit(buf.getvalue(), args.output)
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="bilevel-knapsack",
                                description="Exact solvers for the bilevel continuous knapsack problem "
                                            "under uncertain follower profits.")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, budget=True):
        sp.add_argument("--tie", choices=[t.value for t in TiePolicy],
                        help="override the tie rule stored in the file")
        if budget:
            sp.add_argument("--model-budget", type=int, default=PRODUCT_BUDGET,
                            help="largest number of scenarios to expand (default 2^20)")

    s = sub.add_parser("solve", help="optimal capacity and value")
    s.add_argument("instance")
    s.add_argument("--oracle", action="store_true", help="also run a brute force check")
    common(s)
    s.set_defaults(func=cmd_solve)

    e = sub.add_parser("eval", help="leader value at one capacity")
    e.add_argument("instance")
    e.add_argument("b", help="capacity, e.g. 3/2")
    e.add_argument("--samples", type=int, default=10000, help="Monte Carlo draws (continuous models)")
    e.add_argument("--seed", type=int, default=0)
    common(e)
    e.set_defaults(func=cmd_eval)

    g = sub.add_parser("gen", help="write a gadget instance")
    g.add_argument("kind", choices=["product", "simplex", "pnorm", "stochastic"])
    g.add_argument("--w", type=_int_list, help="subset sum weights, e.g. 1,2")
    g.add_argument("--W", type=int, help="subset sum target")
    g.add_argument("--p", default="2", help="norm exponent for pnorm")
    g.add_argument("--precision-bits", type=int, default=DEFAULT_PRECISION_BITS)
    g.add_argument("--a-star", type=_int_list, help="knapsack weights for the counting gadget")
    g.add_argument("--b-star", type=int, help="knapsack capacity for the counting gadget")
    g.add_argument("--tau", default="0")
    g.add_argument("--continuous", action="store_true", help="uniform boxes instead of two points")
    g.add_argument("-o", "--output", help="output path (default stdout)")
    common(g, budget=False)
    g.set_defaults(func=cmd_gen)

    x = sub.add_parser("export-pwl", help="breakpoints of the leader's objective as CSV")
    x.add_argument("instance")
    x.add_argument("-o", "--output", help="output path (default stdout)")
    common(x)
    x.set_defaults(func=cmd_export_pwl)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except KnapsackError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code


if __name__ == "__main__":
    sys.exit(main())
