"""Interval bounds on the reduced-setting utility difference.

Each group's two probabilities ``P(Y=1, Yhat=1)`` and ``P(Yhat=1)`` are only
known up to an interval. The utility difference is linear in each of them,
so its extremes over the box sit at endpoint combinations; for every
coordinate we pick the endpoint pair that pushes ``U~_k * dP_k`` in the
wanted direction.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from statistics import NormalDist

from ._exact import dec
from .core import ReducedUtilityMatrix, ValidationError, reduced_ud_formula


@dataclass(frozen=True)
class ProbInterval:
    lo: float
    hi: float

    def __post_init__(self):
        lo, hi = float(self.lo), float(self.hi)
        if not (math.isfinite(lo) and math.isfinite(hi) and 0.0 <= lo <= hi <= 1.0):
            raise ValidationError(f"need 0 <= lo <= hi <= 1, got [{lo!r}, {hi!r}]")
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)

    @classmethod
    def point(cls, x: float) -> "ProbInterval":
        return cls(x, x)

    @property
    def width(self) -> float:
        return self.hi - self.lo

    def as_list(self) -> list:
        return [self.lo, self.hi]


@dataclass(frozen=True)
class IntervalTable:
    p11: ProbInterval
    p_accept: ProbInterval

    def __post_init__(self):
        if self.p11.lo > self.p_accept.hi:
            raise ValidationError(
                f"P(Y=1,Yhat=1) lower end {self.p11.lo!r} exceeds P(Yhat=1) upper end {self.p_accept.hi!r}"
            )


@dataclass(frozen=True)
class CountData:
    """Accepted-and-good, accepted-and-bad and rejected counts of one group."""

    n11: int
    n01: int
    n0: int

    def __post_init__(self):
        for name in ("n11", "n01", "n0"):
            v = getattr(self, name)
            if int(v) != v or v < 0:
                raise ValidationError(f"{name} must be a nonnegative integer, got {v!r}")
            object.__setattr__(self, name, int(v))
        if self.n == 0:
            raise ValidationError("counts are empty")

    @property
    def n(self) -> int:
        return self.n11 + self.n01 + self.n0


def _pick(u_k: float, a: ProbInterval, b: ProbInterval, upper: bool):
    # maximise (or minimise) u_k * (x - y) over x in a, y in b
    if (u_k >= 0) == upper:
        return dec(a.hi) - dec(b.lo)
    return dec(a.lo) - dec(b.hi)


def _bound(std: IntervalTable, prot: IntervalTable, u: ReducedUtilityMatrix, upper: bool) -> float:
    u1, u2 = u.vector
    return reduced_ud_formula(u, _pick(u1, std.p11, prot.p11, upper),
                              _pick(u2, std.p_accept, prot.p_accept, upper))


def ud_upper_bound(std: IntervalTable, prot: IntervalTable, u: ReducedUtilityMatrix) -> float:
    """Largest utility difference over the two groups' probability boxes.

    For nonnegative ``U~`` this is ``U~ . (pi0_hi - pi1_lo)``; a negative
    component takes the opposite endpoints instead.
    """
    return _bound(std, prot, u, upper=True)


def ud_lower_bound(std: IntervalTable, prot: IntervalTable, u: ReducedUtilityMatrix) -> float:
    return _bound(std, prot, u, upper=False)


def normal_quantile(p: float) -> float:
    return NormalDist().inv_cdf(p)


def wilson_interval(successes: int, n: int, confidence: float = 0.95) -> ProbInterval:
    """Wilson score interval for a binomial proportion."""
    if n < 1:
        raise ValidationError(f"n must be at least 1, got {n!r}")
    if not 0 <= successes <= n:
        raise ValidationError(f"successes must lie in [0, n], got {successes!r} of {n!r}")
    if not 0 < confidence < 1:
        raise ValidationError(f"confidence must lie in (0, 1), got {confidence!r}")
    z = normal_quantile(0.5 + confidence / 2)
    phat = successes / n
    z2n = z * z / n
    denom = 1 + z2n
    centre = (phat + z2n / 2) / denom
    half = z / denom * math.sqrt(phat * (1 - phat) / n + z2n / (4 * n))
    lo = 0.0 if successes == 0 else max(0.0, centre - half)
    hi = 1.0 if successes == n else min(1.0, centre + half)
    return ProbInterval(lo, hi)


def counts_to_interval_table(c: CountData, confidence: float = 0.95) -> IntervalTable:
    p11 = wilson_interval(c.n11, c.n, confidence)
    acc = wilson_interval(c.n11 + c.n01, c.n, confidence)
    # Wilson ends are monotone in the success count; the clamp only guards rounding
    p11 = ProbInterval(min(p11.lo, acc.lo), min(p11.hi, acc.hi))
    return IntervalTable(p11, acc)
