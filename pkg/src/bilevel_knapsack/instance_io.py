"""JSON instance files.

Every number is an exact rational written as a string (``"3"``, ``"-5/2"``);
plain JSON integers are accepted on input as well.  Files are validated
against :data:`SCHEMA` before any model object is built.
"""
from __future__ import annotations

import json
from decimal import Decimal, localcontext
from pathlib import Path
from typing import Any

import jsonschema

from .certain import CapacityRange, CertainProfits, Instance, Items, TiePolicy
from .errors import InputError
from .pwl import Q, Rational, fmt
from .robust_finite import FiniteUncertainty
from .robust_hard import PNormUncertainty, ProductFiniteUncertainty, SimplexUncertainty
from .robust_interval import IntervalUncertainty
from .stochastic import FiniteSupportDistribution, ProductUniformContinuous, ProductUniformDiscrete

VERSION = 1

_RAT = {"oneOf": [{"type": "string", "pattern": r"^\s*-?\d+(\s*/\s*\d+)?\s*$"}, {"type": "integer"}]}
_VEC = {"type": "array", "items": _RAT, "minItems": 1}
_VECS = {"type": "array", "items": _VEC, "minItems": 1}


def _model(kind: str, **fields) -> dict:
    return {
        "type": "object",
        "properties": {"kind": {"const": kind}, **fields},
        "required": ["kind", *fields],
        "additionalProperties": False,
    }


MODEL_SCHEMAS = {
    "certain": _model("certain", c=_VEC),
    "finite": _model("finite", scenarios=_VECS),
    "interval": _model("interval", c_lo=_VEC, c_hi=_VEC),
    "product_finite": _model("product_finite", options=_VECS),
    "simplex": _model("simplex", c_hat=_VEC, gamma=_RAT),
    "pnorm": _model("pnorm", c_hat=_VEC, gamma=_RAT, p=_RAT,
                    precision_bits={"type": "integer", "minimum": 1}),
    "stoch_finite": _model("stoch_finite", scenarios=_VECS, probs=_VEC),
    "stoch_product_discrete": _model("stoch_product_discrete", supports=_VECS),
    "stoch_product_continuous": _model(
        "stoch_product_continuous",
        boxes={"type": "array", "minItems": 1,
               "items": {"type": "array", "items": _RAT, "minItems": 2, "maxItems": 2}}),
}

SCHEMA = {
    "type": "object",
    "properties": {
        "version": {"const": VERSION},
        "items": {
            "type": "object",
            "properties": {"a": _VEC, "d": _VEC},
            "required": ["a", "d"],
            "additionalProperties": False,
        },
        "range": {
            "type": "object",
            "properties": {"b_lo": _RAT, "b_hi": _RAT},
            "required": ["b_lo", "b_hi"],
            "additionalProperties": False,
        },
        "tie": {"enum": [t.value for t in TiePolicy]},
        "model": {"type": "object", "required": ["kind"],
                  "properties": {"kind": {"enum": list(MODEL_SCHEMAS)}}},
        "meta": {"type": "object"},
    },
    "required": ["version", "items", "range", "model"],
    "additionalProperties": False,
}


def _check_schema(doc: Any) -> None:
    if isinstance(doc, dict) and doc.get("version", VERSION) != VERSION:
        raise InputError(f"unsupported file version {doc['version']!r}, expected {VERSION}")
    try:
        jsonschema.validate(doc, SCHEMA)
        jsonschema.validate(doc["model"], MODEL_SCHEMAS[doc["model"]["kind"]])
    except jsonschema.ValidationError as exc:
        where = "/".join(str(p) for p in exc.absolute_path) or "<root>"
        msg = exc.message
        if exc.schema is _RAT:
            msg = f"expected an exact rational string such as \"3/2\" or an integer, got {exc.instance!r}"
        raise InputError(f"schema violation at {where}: {msg}") from None


def _vecs(rows) -> list:
    return [[Q(x) for x in r] for r in rows]


def _n_check(name: str, rows, n: int) -> None:
    for r in rows:
        if len(r) != n:
            raise InputError(f"{name} entries must have length {n}, got {len(r)}")


def model_from_dict(m: dict, n: int):
    kind = m["kind"]
    if kind == "certain":
        _n_check("c", [m["c"]], n)
        return CertainProfits(m["c"])
    if kind == "finite":
        _n_check("scenarios", m["scenarios"], n)
        return FiniteUncertainty(_vecs(m["scenarios"]))
    if kind == "interval":
        _n_check("interval bounds", [m["c_lo"], m["c_hi"]], n)
        return IntervalUncertainty(m["c_lo"], m["c_hi"])
    if kind == "product_finite":
        if len(m["options"]) != n:
            raise InputError(f"options must have {n} entries")
        return ProductFiniteUncertainty(_vecs(m["options"]))
    if kind == "simplex":
        _n_check("c_hat", [m["c_hat"]], n)
        return SimplexUncertainty(m["c_hat"], m["gamma"])
    if kind == "pnorm":
        _n_check("c_hat", [m["c_hat"]], n)
        return PNormUncertainty(m["c_hat"], m["gamma"], m["p"], m["precision_bits"])
    if kind == "stoch_finite":
        _n_check("scenarios", m["scenarios"], n)
        return FiniteSupportDistribution(_vecs(m["scenarios"]), m["probs"])
    if kind == "stoch_product_discrete":
        if len(m["supports"]) != n:
            raise InputError(f"supports must have {n} entries")
        return ProductUniformDiscrete(_vecs(m["supports"]))
    if len(m["boxes"]) != n:
        raise InputError(f"boxes must have {n} entries")
    return ProductUniformContinuous(_vecs(m["boxes"]))


def _s(v) -> list:
    return [fmt(x) for x in v]


def model_to_dict(model) -> dict:
    if isinstance(model, CertainProfits):
        return {"kind": "certain", "c": _s(model.c)}
    if isinstance(model, FiniteUncertainty):
        return {"kind": "finite", "scenarios": [_s(c) for c in model.scenarios]}
    if isinstance(model, IntervalUncertainty):
        return {"kind": "interval", "c_lo": _s(model.c_lo), "c_hi": _s(model.c_hi)}
    if isinstance(model, ProductFiniteUncertainty):
        return {"kind": "product_finite", "options": [_s(o) for o in model.options]}
    if isinstance(model, SimplexUncertainty):
        return {"kind": "simplex", "c_hat": _s(model.c_hat), "gamma": fmt(model.gamma)}
    if isinstance(model, PNormUncertainty):
        return {"kind": "pnorm", "c_hat": _s(model.c_hat), "gamma": fmt(model.gamma),
                "p": fmt(model.p), "precision_bits": model.precision_bits}
    if isinstance(model, FiniteSupportDistribution):
        return {"kind": "stoch_finite", "scenarios": [_s(c) for c in model.scenarios],
                "probs": _s(model.probs)}
    if isinstance(model, ProductUniformDiscrete):
        return {"kind": "stoch_product_discrete", "supports": [_s(s) for s in model.supports]}
    if isinstance(model, ProductUniformContinuous):
        return {"kind": "stoch_product_continuous", "boxes": [_s(b) for b in model.boxes]}
    raise InputError(f"unknown model type {type(model).__name__}")


def instance_from_dict(doc: Any) -> Instance:
    _check_schema(doc)
    items = Items(doc["items"]["a"], doc["items"]["d"])
    rng = CapacityRange(doc["range"]["b_lo"], doc["range"]["b_hi"])
    rng.check(items)
    model = model_from_dict(doc["model"], items.n)
    meta = dict(doc.get("meta", {}))
    # the optimistic variant of the simplex and norm gadgets is a property of the file
    if isinstance(model, (SimplexUncertainty, PNormUncertainty)) and doc.get("tie") == "optimistic":
        model = type(model)(**{**_fields(model), "strict": True})
    return Instance(items, rng, model, TiePolicy.coerce(doc.get("tie", "pessimistic")), meta)


def _fields(model) -> dict:
    if isinstance(model, SimplexUncertainty):
        return {"c_hat": model.c_hat, "gamma": model.gamma}
    return {"c_hat": model.c_hat, "gamma": model.gamma, "p": model.p,
            "precision_bits": model.precision_bits}


def instance_to_dict(inst: Instance) -> dict:
    doc = {
        "version": VERSION,
        "items": {"a": _s(inst.items.a), "d": _s(inst.items.d)},
        "range": {"b_lo": fmt(inst.rng.lo), "b_hi": fmt(inst.rng.hi)},
        "tie": TiePolicy.coerce(inst.tie).value,
        "model": model_to_dict(inst.model),
    }
    if inst.meta:
        doc["meta"] = inst.meta
    return doc


def load_instance(path) -> Instance:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from None
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"{path} is not valid JSON: {exc}") from None
    return instance_from_dict(doc)


def dump_instance(inst: Instance, path=None) -> str:
    text = json.dumps(instance_to_dict(inst), indent=2) + "\n"
    if path is not None:
        Path(path).write_text(text, encoding="utf-8")
    return text


def decimal_str(q: Rational, digits: int = 20) -> str:
    """Decimal rendering of a rational with ``digits`` significant digits."""
    q = Q(q)
    with localcontext() as ctx:
        ctx.prec = digits
        return str(Decimal(int(q.numerator)) / Decimal(int(q.denominator)))
