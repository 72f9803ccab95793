"""JSON encoding of polynomials and reports.

Complex numbers are ``[re, im]`` pairs, polynomials are ``{"coeffs": [...]}``
documents, dataclasses become objects keyed by field name.  Floats are
written with 17 significant digits so every stored real reloads bit for bit.
Decoding is driven by the target dataclass's type hints.
"""

from __future__ import annotations

import dataclasses
import json
import math
import typing
from typing import Any, Union

import numpy as np

from .polycore import Polynomial, PolynomialError, RootConfiguration, from_roots


class DocumentError(ValueError):
    """Malformed input document; the message starts with the offending position."""

    def __init__(self, where: str, message: str):
        super().__init__(f"{where}: {message}")
        self.where = where


# ----------------------------------------------------------------------------
# encoding


def to_jsonable(obj: Any) -> Any:
    if obj is None or isinstance(obj, (bool, str)):
        return obj
    if isinstance(obj, (int, np.integer)) and not isinstance(obj, np.bool_):
        return int(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    if isinstance(obj, (float, np.floating)):
        return float(obj)
    if isinstance(obj, (complex, np.complexfloating)):
        z = complex(obj)
        return [z.real, z.imag]
    if isinstance(obj, Polynomial):
        return polynomial_document(obj)
    if dataclasses.is_dataclass(obj) and not isinstance(obj, type):
        return {f.name: to_jsonable(getattr(obj, f.name)) for f in dataclasses.fields(obj)}
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple, np.ndarray)):
        return [to_jsonable(v) for v in obj]
    raise TypeError(f"cannot encode {type(obj).__name__}")


def format_float(x: float) -> str:
    if math.isnan(x):
        return "NaN"
    if math.isinf(x):
        return "Infinity" if x > 0 else "-Infinity"
    s = "%.17g" % x
    if not any(c in s for c in ".eEn"):
        s += ".0"
    return s


def dumps(obj: Any, indent: int = 2) -> str:
    """Serialize with 17-significant-digit floats."""
    data = to_jsonable(obj)

    def emit(v, level):
        pad = " " * (indent * (level + 1))
        end = " " * (indent * level)
        if isinstance(v, dict):
            if not v:
                return "{}"
            items = [f"{pad}{json.dumps(k)}: {emit(x, level + 1)}" for k, x in v.items()]
            return "{\n" + ",\n".join(items) + "\n" + end + "}"
        if isinstance(v, list):
            if not v:
                return "[]"
            if all(isinstance(x, (int, float)) and not isinstance(x, bool) for x in v):
                return "[" + ", ".join(emit(x, level) for x in v) + "]"
            return "[\n" + ",\n".join(pad + emit(x, level + 1) for x in v) + "\n" + end + "]"
        if isinstance(v, bool) or v is None or isinstance(v, str):
            return json.dumps(v)
        if isinstance(v, int):
            return str(v)
        return format_float(v)

    return emit(data, 0)


# ----------------------------------------------------------------------------
# decoding


def parse_complex(v: Any, where: str = "value") -> complex:
    if isinstance(v, bool):
        raise DocumentError(where, "expected a number or [re, im] pair")
    if isinstance(v, (int, float)):
        return complex(float(v), 0.0)
    if isinstance(v, list) and len(v) == 2 and all(
        isinstance(x, (int, float)) and not isinstance(x, bool) for x in v
    ):
        z = complex(float(v[0]), float(v[1]))
        if not (math.isfinite(z.real) and math.isfinite(z.imag)):
            raise DocumentError(where, "complex value must be finite")
        return z
    raise DocumentError(where, f"expected [re, im] pair, got {json.dumps(v)}")


def _parse_pairs(v: Any, where: str) -> list[complex]:
    if not isinstance(v, list):
        raise DocumentError(where, "expected a list of [re, im] pairs")
    return [parse_complex(x, f"{where}[{i}]") for i, x in enumerate(v)]


def polynomial_document(p: Polynomial) -> dict:
    return {"coeffs": [[float(a.real), float(a.imag)] for a in p.coeffs]}


def parse_polynomial(doc: Any, where: str = "poly") -> Polynomial:
    """Read a ``{"coeffs": ...}`` or ``{"roots": ..., "leading", "include_origin"}`` document."""
    if not isinstance(doc, dict):
        raise DocumentError(where, "expected an object with 'coeffs' or 'roots'")
    has_c, has_r = "coeffs" in doc, "roots" in doc
    if has_c == has_r:
        raise DocumentError(where, "exactly one of 'coeffs' and 'roots' is required")
    extra = set(doc) - {"coeffs", "roots", "leading", "include_origin"}
    if extra:
        raise DocumentError(where, f"unknown keys {sorted(extra)}")
    try:
        if has_c:
            coeffs = _parse_pairs(doc["coeffs"], f"{where}.coeffs")
            if not coeffs:
                raise DocumentError(f"{where}.coeffs", "needs at least one coefficient")
            return Polynomial(coeffs)
        roots = _parse_pairs(doc["roots"], f"{where}.roots")
        lead = parse_complex(doc.get("leading", [1.0, 0.0]), f"{where}.leading")
        origin = doc.get("include_origin", True)
        if not isinstance(origin, bool):
            raise DocumentError(f"{where}.include_origin", "expected true or false")
        return from_roots(RootConfiguration(tuple(roots), origin), lead)
    except PolynomialError as exc:
        raise DocumentError(where, str(exc)) from None


def loads_document(text: str, where: str = "input") -> Any:
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise DocumentError(f"{where} line {exc.lineno} column {exc.colno}", exc.msg) from None


def from_jsonable(data: Any, tp: Any, where: str = "$") -> Any:
    """Rebuild a value of type ``tp`` from its JSON form."""
    origin = typing.get_origin(tp)
    args = typing.get_args(tp)
    if tp is Any:
        return data
    if origin is Union:
        if data is None and type(None) in args:
            return None
        rest = [a for a in args if a is not type(None)]
        if len(rest) == 1:
            return from_jsonable(data, rest[0], where)
        raise DocumentError(where, f"cannot decode ambiguous union {tp}")
    if origin in (tuple, list):
        if not isinstance(data, list):
            raise DocumentError(where, "expected a list")
        if origin is tuple and len(args) == 2 and args[1] is Ellipsis:
            return tuple(from_jsonable(x, args[0], f"{where}[{i}]") for i, x in enumerate(data))
        if origin is tuple:
            return tuple(from_jsonable(x, a, f"{where}[{i}]") for i, (x, a) in enumerate(zip(data, args)))
        return [from_jsonable(x, args[0] if args else Any, f"{where}[{i}]") for i, x in enumerate(data)]
    if origin is dict:
        return {k: from_jsonable(v, args[1], f"{where}.{k}") for k, v in data.items()}
    if tp is complex:
        return parse_complex(data, where)
    if tp is float:
        if isinstance(data, bool) or not isinstance(data, (int, float)):
            raise DocumentError(where, "expected a number")
        return float(data)
    if tp is int:
        if isinstance(data, bool) or not isinstance(data, int):
            raise DocumentError(where, "expected an integer")
        return data
    if tp in (bool, str):
        if not isinstance(data, tp):
            raise DocumentError(where, f"expected {tp.__name__}")
        return data
    if tp is Polynomial:
        return parse_polynomial(data, where)
    if dataclasses.is_dataclass(tp):
        if not isinstance(data, dict):
            raise DocumentError(where, f"expected an object for {tp.__name__}")
        hints = typing.get_type_hints(tp)
        kwargs = {}
        for f in dataclasses.fields(tp):
            if f.name in data:
                kwargs[f.name] = from_jsonable(data[f.name], hints[f.name], f"{where}.{f.name}")
        return tp(**kwargs)
    raise DocumentError(where, f"cannot decode type {tp}")


def loads(text: str, tp: Any) -> Any:
    return from_jsonable(loads_document(text), tp)
