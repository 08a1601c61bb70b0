"""Decimal-faithful arithmetic for short closed-form expressions.

Inputs are read as the shortest decimal that round-trips their float value,
combined exactly as rationals, and rounded once on the way out. This is what
makes e.g. ``170000 * (0.8*0.9 - 0.8*0.7)`` come out as exactly ``27200.0``.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Iterable, Union

Number = Union[int, float, Fraction]


def dec(x: Number) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int) and not isinstance(x, bool):
        return Fraction(x)
    x = float(x)
    if not math.isfinite(x):
        raise ValueError(f"non-finite value {x!r}")
    return Fraction(repr(x))


def dot(xs: Iterable[Number], ys: Iterable[Number]) -> Fraction:
    return sum((dec(a) * dec(b) for a, b in zip(xs, ys, strict=True)), Fraction(0))


def sub(a: Number, b: Number) -> float:
    return float(dec(a) - dec(b))


def mul(a: Number, b: Number) -> float:
    return float(dec(a) * dec(b))
