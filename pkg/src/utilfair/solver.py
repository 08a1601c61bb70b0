"""Worked-example solvers: college admission, equal-utility acceptance rates, sweeps."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Union

from ._exact import dec
from .core import (
    JointTable,
    ReducedJointTable,
    ReducedUtilityMatrix,
    Scenario,
    UtilityMatrix,
    ValidationError,
    reduced_ud_formula,
)

FIXED_CONDITIONAL = "fixed-conditional"
FIXED_JOINT = "fixed-joint"


@dataclass(frozen=True)
class CollegeParams:
    """Admission rates ``q0``/``q1``, success gap ``delta`` and protected success rate ``q11``.

    The standard group's conditional success rate is ``q11 + delta``. Only
    ``u11`` and ``u01`` matter; both rejected outcomes have utility 0.
    """

    q0: float
    q1: float
    delta: float
    q11: float
    u11: float
    u01: float = 0.0

    def __post_init__(self):
        for name in ("q0", "q1", "delta", "q11"):
            v = float(getattr(self, name))
            if not 0 <= v <= 1:
                raise ValidationError(f"{name} must lie in [0, 1], got {v!r}")
            object.__setattr__(self, name, v)
        for name in ("u11", "u01"):
            v = float(getattr(self, name))
            if not math.isfinite(v):
                raise ValidationError(f"{name} must be finite, got {v!r}")
            object.__setattr__(self, name, v)
        if dec(self.q11) + dec(self.delta) > 1:
            raise ValidationError("q11 + delta must not exceed 1")

    def as_dict(self) -> dict:
        return {"q0": self.q0, "q1": self.q1, "delta": self.delta, "q11": self.q11,
                "u11": self.u11, "u01": self.u01}


def college_ud_formula(q0, q1, delta, q11, u11, u01=0.0) -> float:
    """Closed-form utility difference; accepts out-of-range rates for root checks."""
    q0, q1, delta, q11, u11, u01 = (dec(x) for x in (q0, q1, delta, q11, u11, u01))
    return float((u11 - u01) * (q11 * (q0 - q1) + q0 * delta) + u01 * (q0 - q1))


def college_ud(p: CollegeParams) -> float:
    return college_ud_formula(p.q0, p.q1, p.delta, p.q11, p.u11, p.u01)


def college_scenario(p: CollegeParams, npv0: float = 0.5, npv1: float = 0.5, tau: float = 0.0) -> Scenario:
    """Full-table embedding of the college model.

    The rejected mass split (``npv``) does not affect the utility difference
    because ``u00 == u10 == 0``.
    """
    std = JointTable.from_conditionals(p.q0, float(dec(p.q11) + dec(p.delta)), npv0)
    prot = JointTable.from_conditionals(p.q1, p.q11, npv1)
    return Scenario(std, prot, UtilityMatrix(p.u11, p.u01, 0.0, 0.0), tau)


@dataclass(frozen=True)
class Q1StarResult:
    q1_star: float
    attainable: bool

    def as_dict(self) -> dict:
        note = ("fairness reachable by admission rate" if self.attainable
                else "required rate exceeds 100%: admission rate alone cannot remove the disadvantage")
        return {"q1Star": self.q1_star, "attainable": self.attainable, "note": note}


def solve_q1_star(p: CollegeParams) -> Q1StarResult:
    """Protected admission rate at which the college utility difference vanishes.

    For ``u01 == 0`` this is ``q0 * (1 + delta / q11)``. The root is returned
    unclamped and flagged unattainable when it exceeds 1.
    """
    if p.q11 == 0:
        raise ValidationError("q11 = 0: the utility difference does not depend on q1 through successes")
    a = dec(p.u11) - dec(p.u01)
    slope = a * dec(p.q11) + dec(p.u01)
    if slope == 0:
        raise ValidationError("utility difference does not depend on q1; no root")
    q0 = dec(p.q0)
    root = q0 + a * q0 * dec(p.delta) / slope
    root_f = float(root)
    return Q1StarResult(root_f, 0 <= root_f <= 1)


@dataclass(frozen=True)
class SolveResult:
    mode: str
    p: Optional[float]
    ud_at_zero: float
    ud_at_one: float
    table_consistent: Optional[bool] = None
    details: str = ""

    def as_dict(self) -> dict:
        return {"mode": self.mode, "p": self.p, "udAtZero": self.ud_at_zero, "udAtOne": self.ud_at_one,
                "tableConsistent": self.table_consistent, "details": self.details}


def _linear_root(const: Fraction, slope: Fraction, fallback: Fraction):
    # solves const - slope * p = 0
    if slope == 0:
        return fallback if const == 0 else None
    return const / slope


def solve_equal_utility_acceptance(std: ReducedJointTable, prot_conditional: float,
                                   u: ReducedUtilityMatrix, mode: str = FIXED_CONDITIONAL,
                                   prot_p11: Optional[float] = None) -> SolveResult:
    """Protected acceptance rate ``p`` that equalises the two groups' expected utilities.

    ``fixed-conditional`` keeps the protected success rate ``c`` so the
    protected table is ``(c p, p)``. ``fixed-joint`` keeps ``P(Y=1, Yhat=1)``
    at ``prot_p11`` and moves only the acceptance rate, which can produce a
    table with ``p11 > p``; ``table_consistent`` says whether it did.
    """
    a, b = (dec(x) for x in u.vector)
    s11, sa = dec(std.p11), dec(std.p_accept)
    if mode == FIXED_CONDITIONAL:
        if not 0 <= prot_conditional <= 1:
            raise ValidationError(f"protected conditional rate must lie in [0, 1], got {prot_conditional!r}")
        c = dec(prot_conditional)
        ud = lambda p: reduced_ud_formula(u, s11 - c * p, sa - p)  # noqa: E731
        root = _linear_root(a * s11 + b * sa, a * c + b, sa)
    elif mode == FIXED_JOINT:
        if prot_p11 is None:
            raise ValidationError("fixed-joint mode needs prot_p11")
        j = dec(prot_p11)
        ud = lambda p: reduced_ud_formula(u, s11 - j, sa - p)  # noqa: E731
        root = _linear_root(a * (s11 - j) + b * sa, b, sa)
    else:
        raise ValidationError(f"unknown mode {mode!r}")

    lo, hi = ud(Fraction(0)), ud(Fraction(1))
    if root is None:
        return SolveResult(mode, None, lo, hi, None, "no acceptance rate equalises utilities")
    p = float(root)
    if not 0 <= p <= 1:
        return SolveResult(mode, None, lo, hi, None,
                           f"root {p!r} lies outside [0, 1]; see boundary values")
    consistent = None
    details = ""
    if mode == FIXED_JOINT:
        consistent = dec(prot_p11) <= root
        if not consistent:
            details = f"P(Y=1,Yhat=1)={prot_p11!r} exceeds acceptance {p!r}: table infeasible"
    return SolveResult(mode, p, lo, hi, consistent, details)


@dataclass(frozen=True)
class FixedSlots:
    total_slots: int
    total_population: int
    protected_population: int

    def __post_init__(self):
        if min(self.total_slots, self.total_population, self.protected_population) <= 0:
            raise ValidationError("slot counts must be positive")
        if self.protected_population >= self.total_population:
            raise ValidationError("protected population must be smaller than the total")
        if self.total_slots > self.total_population:
            raise ValidationError("more slots than people")

    def standard_rate(self, q1) -> Fraction:
        """Standard admission rate left over once the protected group takes ``q1`` of its people."""
        return ((self.total_slots - dec(q1) * self.protected_population)
                / (self.total_population - self.protected_population))


@dataclass(frozen=True)
class SweepSpec:
    variable: str
    lo: float
    hi: float
    step: float
    fixed_slots: Optional[FixedSlots] = None

    def __post_init__(self):
        if not (math.isfinite(self.lo) and math.isfinite(self.hi) and self.lo <= self.hi):
            raise ValidationError(f"need lo <= hi, got {self.lo!r}, {self.hi!r}")
        if not (math.isfinite(self.step) and self.step > 0):
            raise ValidationError(f"step must be positive, got {self.step!r}")

    def grid(self) -> list[float]:
        lo, hi, step = dec(self.lo), dec(self.hi), dec(self.step)
        n = int((hi - lo) / step)
        return [float(lo + i * step) for i in range(n + 1)]


@dataclass(frozen=True)
class SweepRow:
    value: float
    ud: float
    feasible: bool


@dataclass(frozen=True)
class ReducedSweepBase:
    """Protected acceptance sweep at a fixed protected success rate."""

    standard: ReducedJointTable
    protected_conditional: float
    utilities: ReducedUtilityMatrix


def sweep_college(spec: SweepSpec, base: CollegeParams) -> list[SweepRow]:
    """Utility difference as a function of the protected admission rate."""
    if spec.variable != "q1":
        raise ValidationError(f"college sweeps vary q1, not {spec.variable!r}")
    rows = []
    for q1 in spec.grid():
        q0 = base.q0 if spec.fixed_slots is None else spec.fixed_slots.standard_rate(q1)
        feasible = 0 <= q0 <= 1 and 0 <= q1 <= 1
        ud = college_ud_formula(q0, q1, base.delta, base.q11, base.u11, base.u01) if feasible else math.nan
        rows.append(SweepRow(q1, ud, feasible))
    return rows


def sweep_reduced(spec: SweepSpec, base: ReducedSweepBase) -> list[SweepRow]:
    if spec.variable != "p_accept":
        raise ValidationError(f"reduced sweeps vary p_accept, not {spec.variable!r}")
    if spec.fixed_slots is not None:
        raise ValidationError("fixed slots apply to college sweeps only")
    s11, sa = dec(base.standard.p11), dec(base.standard.p_accept)
    c = dec(base.protected_conditional)
    rows = []
    for p in spec.grid():
        feasible = 0 <= p <= 1
        ud = reduced_ud_formula(base.utilities, s11 - c * dec(p), sa - dec(p)) if feasible else math.nan
        rows.append(SweepRow(p, ud, feasible))
    return rows


def sweep(spec: SweepSpec, base: Union[CollegeParams, ReducedSweepBase]) -> list[SweepRow]:
    if isinstance(base, CollegeParams):
        return sweep_college(spec, base)
    return sweep_reduced(spec, base)


def zero_crossing(rows: list[SweepRow]) -> Optional[float]:
    """Linear interpolation of the first sign change among feasible rows."""
    pts = [(r.value, r.ud) for r in rows if r.feasible]
    for (x0, y0), (x1, y1) in zip(pts, pts[1:]):
        if y0 == 0:
            return x0
        if (y0 > 0) != (y1 > 0) or y1 == 0:
            return x0 + (x1 - x0) * y0 / (y0 - y1)
    return None
