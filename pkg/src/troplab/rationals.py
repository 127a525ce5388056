"""Parsing and canonical serialization of exact rationals.

JSON carries exact values as integers or "p/q" strings; floats stay JSON
numbers.  Serialization is canonical (integer when the denominator is 1)
so identical inputs produce byte-identical output documents.
"""

from fractions import Fraction
from typing import Union

from .errors import SchemaError

Scalar = Union[Fraction, float]


def parse_rational(value, pointer: str = "/") -> Fraction:
    if isinstance(value, bool):
        raise SchemaError("expected a rational, got a boolean", pointer)
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        try:
            return Fraction(value)
        except (ValueError, ZeroDivisionError):
            raise SchemaError(f"cannot parse rational {value!r}", pointer)
    if isinstance(value, float):
        raise SchemaError(
            "float literal in exact context; write it as 'p/q'", pointer
        )
    raise SchemaError(f"cannot parse rational from {type(value).__name__}", pointer)


def parse_scalar(value, mode: str, pointer: str = "/") -> Scalar:
    if mode == "exact":
        return parse_rational(value, pointer)
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise SchemaError("expected a number in float mode", pointer)
    return float(value)


def format_rational(value: Fraction):
    if value.denominator == 1:
        return int(value)
    return f"{value.numerator}/{value.denominator}"


def format_scalar(value: Scalar):
    if isinstance(value, Fraction):
        return format_rational(value)
    return float(value)
