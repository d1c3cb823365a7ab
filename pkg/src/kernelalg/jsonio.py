"""Deterministic JSON emission.

The contract: rationals are "p/q" strings in lowest terms, finite floats are
numbers printed with 12 significant digits, infinity is the string "inf", and
key order is fixed by construction, so identical inputs and flags produce
byte-identical output.
"""

from __future__ import annotations

import json
import math
from fractions import Fraction

from .disintegration import DensityTable
from .measures import Kernel, Measure
from .scalar import Scalar
from .spaces import format_atom


def format_float(value: float) -> str:
    if math.isinf(value):
        return '"inf"'
    return format(value, ".12g")


def dumps(tree) -> str:
    """Serialize a tree of dicts/lists/scalars, preserving dict order."""
    if isinstance(tree, dict):
        inner = ",".join(f"{json.dumps(str(k))}:{dumps(v)}" for k, v in tree.items())
        return "{" + inner + "}"
    if isinstance(tree, (list, tuple)):
        return "[" + ",".join(dumps(v) for v in tree) + "]"
    if isinstance(tree, bool):
        return "true" if tree else "false"
    if isinstance(tree, float):
        return format_float(tree)
    if isinstance(tree, int):
        return str(tree)
    if isinstance(tree, (Fraction, Scalar)):
        return json.dumps(str(tree))
    if tree is None:
        return "null"
    return json.dumps(tree)


def render_value(value):
    """Turn a core value into a JSON-ready tree with stable key order."""
    if isinstance(value, Measure):
        return {
            "sort": "measure",
            "space": str(value.space),
            "weights": {
                format_atom(a): str(w) for a, w in value.items()
            },
        }
    if isinstance(value, Kernel):
        return {
            "sort": "kernel",
            "domain": str(value.domain),
            "codomain": str(value.codomain),
            "rows": {
                format_atom(a): {
                    format_atom(b): str(w) for b, w in row.items()
                }
                for a, row in zip(value.domain.atoms, value.rows)
            },
        }
    if isinstance(value, DensityTable):
        return {
            "sort": "density",
            "space": str(value.domain),
            "values": {
                format_atom(a): str(v)
                for a, v in zip(value.domain.atoms, value.values)
            },
        }
    if isinstance(value, bool) or isinstance(value, float):
        return value
    if isinstance(value, (Fraction, Scalar)):
        return str(value)
    if hasattr(value, "as_dict"):
        return value.as_dict()
    return value
