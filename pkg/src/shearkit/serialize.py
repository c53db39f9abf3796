"""Canonical JSON helpers for certificates and reports.

All documents carry a `schema_version` field, serialize scalars and
polynomials as grammar strings, and dump with sorted keys and fixed
separators so identical inputs produce byte-identical artifacts.
"""

from __future__ import annotations

import json

from .poly import format_poly, format_scalar, parse_poly, parse_scalar
from .fields import format_vector_field, parse_vector_field

SCHEMA_VERSION = 1

__all__ = [
    "SCHEMA_VERSION",
    "canonical_dumps",
    "scalar_to_text",
    "scalar_from_text",
    "poly_to_text",
    "poly_from_text",
    "field_to_text",
    "field_from_text",
    "combination_to_json",
    "combination_from_json",
]


def canonical_dumps(document: dict) -> str:
    return json.dumps(document, sort_keys=True, separators=(",", ":"))


scalar_to_text = format_scalar
scalar_from_text = parse_scalar
poly_to_text = format_poly


def poly_from_text(text: str, nvars: int):
    return parse_poly(text, nvars)


field_to_text = format_vector_field


def field_from_text(text: str, nvars: int):
    return parse_vector_field(text, nvars)


def combination_to_json(combination) -> list:
    """A list of (Scalar coefficient, int index) pairs as JSON."""
    return [[format_scalar(coeff), index] for coeff, index in combination]


def combination_from_json(data) -> list:
    return [(parse_scalar(coeff), index) for coeff, index in data]
