"""Probability tables, utilities and the utility difference between two groups.

Indexing follows the confusion-matrix convention ``p_{Y,Yhat}``: ``p10`` is
the probability that the true outcome is good (Y=1) while the decision was
negative (Yhat=0). Group ``standard`` is s=0, group ``protected`` is s=1 and
every difference is taken standard minus protected.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import NamedTuple, Optional

from ._exact import dec

SUM_TOL = 1e-12
INGEST_RENORM_TOL = 1e-9


class ValidationError(ValueError):
    """Raised when a table or utility block violates its invariants."""


class DegenerateMarginError(ValidationError):
    """A conditional probability is undefined because its margin is zero."""


def _check_finite(name: str, value: float) -> float:
    value = float(value)
    if not math.isfinite(value):
        raise ValidationError(f"{name} must be finite, got {value!r}")
    return value


def _check_prob(name: str, value: float) -> float:
    value = _check_finite(name, value)
    if not 0.0 <= value <= 1.0:
        raise ValidationError(f"{name} must lie in [0, 1], got {value!r}")
    return value


class UtilityVector(NamedTuple):
    """Utility differences ``(u11-u01, u00-u10, u01-u10)``."""

    u1: float
    u2: float
    u3: float

    def sup_norm(self) -> float:
        return max(abs(self.u1), abs(self.u2), abs(self.u3))


class ProbVector(NamedTuple):
    """``(P(Y=1,Yhat=1), P(Y=0,Yhat=0), P(Yhat=1))`` or a difference of two.

    No invariant is enforced here because differences live in [-1, 1].
    """

    q1: float
    q2: float
    q3: float

    def sup_norm(self) -> float:
        return max(abs(self.q1), abs(self.q2), abs(self.q3))


@dataclass(frozen=True)
class UtilityMatrix:
    u11: float
    u01: float
    u00: float
    u10: float

    def __post_init__(self):
        for name in ("u11", "u01", "u00", "u10"):
            object.__setattr__(self, name, _check_finite(name, getattr(self, name)))

    @property
    def vector(self) -> UtilityVector:
        return UtilityVector(
            float(dec(self.u11) - dec(self.u01)),
            float(dec(self.u00) - dec(self.u10)),
            float(dec(self.u01) - dec(self.u10)),
        )

    def shifted(self, c: float) -> "UtilityMatrix":
        return UtilityMatrix(self.u11 + c, self.u01 + c, self.u00 + c, self.u10 + c)

    def scaled(self, alpha: float) -> "UtilityMatrix":
        return UtilityMatrix(self.u11 * alpha, self.u01 * alpha, self.u00 * alpha, self.u10 * alpha)

    def as_dict(self) -> dict:
        return {"u11": self.u11, "u01": self.u01, "u00": self.u00, "u10": self.u10}


@dataclass(frozen=True)
class ReducedUtilityMatrix:
    """Utilities when both rejected cells share the single value ``u0``."""

    u11: float
    u01: float
    u0: float

    def __post_init__(self):
        for name in ("u11", "u01", "u0"):
            object.__setattr__(self, name, _check_finite(name, getattr(self, name)))

    @property
    def vector(self) -> tuple[float, float]:
        return (float(dec(self.u11) - dec(self.u01)), float(dec(self.u01) - dec(self.u0)))

    def as_full(self) -> UtilityMatrix:
        return UtilityMatrix(self.u11, self.u01, self.u0, self.u0)

    def as_dict(self) -> dict:
        return {"u11": self.u11, "u01": self.u01, "u0": self.u0}


@dataclass(frozen=True)
class JointTable:
    """One group's joint distribution over (Y, Yhat)."""

    p11: float
    p01: float
    p10: float
    p00: float

    def __post_init__(self):
        cells = [_check_prob(name, getattr(self, name)) for name in ("p11", "p01", "p10", "p00")]
        for name, value in zip(("p11", "p01", "p10", "p00"), cells):
            object.__setattr__(self, name, value)
        total = math.fsum(cells)
        if abs(total - 1.0) > SUM_TOL:
            raise ValidationError(f"cells must sum to 1 (got {total!r})")

    @classmethod
    def from_cells(cls, p11: float, p01: float, p10: float, p00: float,
                   renorm_tol: float = INGEST_RENORM_TOL) -> "JointTable":
        """Build from possibly slightly unnormalized data.

        Sums within ``SUM_TOL`` are kept verbatim; sums off by at most
        ``renorm_tol`` are rescaled; anything worse is rejected.
        """
        cells = [_check_prob(n, v) for n, v in zip(("p11", "p01", "p10", "p00"), (p11, p01, p10, p00))]
        total = math.fsum(cells)
        if abs(total - 1.0) > SUM_TOL:
            if abs(total - 1.0) > renorm_tol:
                raise ValidationError(
                    f"cells sum to {total!r}; deviation exceeds renormalization tolerance {renorm_tol:g}"
                )
            cells = [c / total for c in cells]
            cells[3] = max(0.0, 1.0 - math.fsum(cells[:3]))
        return cls(*cells)

    @classmethod
    def from_conditionals(cls, accept: float, ppv: float, npv: float) -> "JointTable":
        """Build from ``P(Yhat=1)``, ``P(Y=1|Yhat=1)`` and ``P(Y=0|Yhat=0)``."""
        a, c1, c0 = dec(_check_prob("accept", accept)), dec(_check_prob("ppv", ppv)), dec(_check_prob("npv", npv))
        p11 = a * c1
        p01 = a - p11
        p00 = (1 - a) * c0
        p10 = (1 - a) - p00
        return cls(float(p11), float(p01), float(p10), float(p00))

    @classmethod
    def from_counts(cls, n11: int, n01: int, n10: int, n00: int) -> "JointTable":
        n = n11 + n01 + n10 + n00
        if n <= 0:
            raise ValidationError("counts are empty")
        return cls(n11 / n, n01 / n, n10 / n, n00 / n)

    @property
    def cells(self) -> dict:
        return {"p11": self.p11, "p01": self.p01, "p10": self.p10, "p00": self.p00}

    def cell(self, y: int, yhat: int) -> float:
        return getattr(self, f"p{y}{yhat}")

    @property
    def accept_rate(self) -> float:
        return float(dec(self.p11) + dec(self.p01))

    @property
    def base_rate(self) -> float:
        return float(dec(self.p11) + dec(self.p10))

    def _ratio(self, num: float, den_cells: tuple[float, float], what: str) -> float:
        den = dec(den_cells[0]) + dec(den_cells[1])
        if den == 0:
            raise DegenerateMarginError(f"{what} undefined: margin is zero")
        return float(dec(num) / den)

    @property
    def ppv(self) -> float:
        """P(Y=1 | Yhat=1)."""
        return self._ratio(self.p11, (self.p11, self.p01), "P(Y=1|Yhat=1): P(Yhat=1)=0,")

    @property
    def npv(self) -> float:
        """P(Y=0 | Yhat=0)."""
        return self._ratio(self.p00, (self.p00, self.p10), "P(Y=0|Yhat=0): P(Yhat=0)=0,")

    @property
    def tpr(self) -> float:
        """P(Yhat=1 | Y=1)."""
        return self._ratio(self.p11, (self.p11, self.p10), "P(Yhat=1|Y=1): P(Y=1)=0,")

    @property
    def tnr(self) -> float:
        """P(Yhat=0 | Y=0)."""
        return self._ratio(self.p00, (self.p00, self.p01), "P(Yhat=0|Y=0): P(Y=0)=0,")

    @property
    def prob_vector(self) -> ProbVector:
        return ProbVector(self.p11, self.p00, self.accept_rate)

    def reduce(self) -> "ReducedJointTable":
        return ReducedJointTable(self.p11, self.accept_rate)


@dataclass(frozen=True)
class ReducedJointTable:
    """``P(Y=1, Yhat=1)`` and ``P(Yhat=1)``; the rejected cells are merged."""

    p11: float
    p_accept: float

    def __post_init__(self):
        object.__setattr__(self, "p11", _check_prob("p11", self.p11))
        object.__setattr__(self, "p_accept", _check_prob("p_accept", self.p_accept))
        if self.p11 > self.p_accept:
            raise ValidationError(f"p11={self.p11!r} exceeds p_accept={self.p_accept!r}")

    @classmethod
    def from_conditional(cls, accept: float, ppv: float) -> "ReducedJointTable":
        accept = _check_prob("accept", accept)
        return cls(float(dec(accept) * dec(_check_prob("ppv", ppv))), accept)

    @classmethod
    def from_counts(cls, n11: int, n01: int, n0: int) -> "ReducedJointTable":
        n = n11 + n01 + n0
        if n <= 0:
            raise ValidationError("counts are empty")
        return cls(n11 / n, (n11 + n01) / n)

    @property
    def ppv(self) -> float:
        if self.p_accept == 0:
            raise DegenerateMarginError("P(Y=1|Yhat=1) undefined: P(Yhat=1)=0")
        return float(dec(self.p11) / dec(self.p_accept))

    @property
    def p_reject(self) -> float:
        return float(1 - dec(self.p_accept))

    @property
    def vector(self) -> tuple[float, float]:
        return (self.p11, self.p_accept)


@dataclass(frozen=True)
class Scenario:
    standard: JointTable
    protected: JointTable
    utilities: UtilityMatrix
    tau: float = 0.0

    def __post_init__(self):
        tau = _check_finite("tau", self.tau)
        if tau < 0:
            raise ValidationError(f"tau must be nonnegative, got {tau!r}")
        object.__setattr__(self, "tau", tau)

    def swapped(self) -> "Scenario":
        return replace(self, standard=self.protected, protected=self.standard)


def expected_utility(joint: JointTable, u: UtilityMatrix) -> float:
    """Expected utility of one group via ``U . P_s + u10``."""
    uv = (dec(u.u11) - dec(u.u01), dec(u.u00) - dec(u.u10), dec(u.u01) - dec(u.u10))
    pv = (dec(joint.p11), dec(joint.p00), dec(joint.p11) + dec(joint.p01))
    return float(sum(a * b for a, b in zip(uv, pv)) + dec(u.u10))


def brute_force_expected_utility(joint: JointTable, u: UtilityMatrix) -> float:
    """Plain floating-point sum over the four outcomes; oracle for :func:`expected_utility`."""
    return math.fsum(joint.cell(k, j) * getattr(u, f"u{k}{j}") for k in (0, 1) for j in (0, 1))


def _pd_exact(a: JointTable, b: JointTable):
    return (
        dec(a.p11) - dec(b.p11),
        dec(a.p00) - dec(b.p00),
        (dec(a.p11) + dec(a.p01)) - (dec(b.p11) + dec(b.p01)),
    )


def prob_difference(a: JointTable, b: JointTable) -> ProbVector:
    return ProbVector(*(float(x) for x in _pd_exact(a, b)))


def utility_difference(s: Scenario) -> float:
    """Directed utility difference ``E_0[U] - E_1[U]`` computed as ``U . PD``."""
    u = s.utilities
    uv = (dec(u.u11) - dec(u.u01), dec(u.u00) - dec(u.u10), dec(u.u01) - dec(u.u10))
    return float(sum(a * b for a, b in zip(uv, _pd_exact(s.standard, s.protected))))


def reduced_expected_utility(joint: ReducedJointTable, u: ReducedUtilityMatrix) -> float:
    return float(
        (dec(u.u11) - dec(u.u01)) * dec(joint.p11)
        + (dec(u.u01) - dec(u.u0)) * dec(joint.p_accept)
        + dec(u.u0)
    )


def reduced_ud_formula(u: ReducedUtilityMatrix, d11, d_accept) -> float:
    """``U~ . dP~`` for arbitrary (possibly infeasible) probability differences."""
    return float((dec(u.u11) - dec(u.u01)) * dec(d11) + (dec(u.u01) - dec(u.u0)) * dec(d_accept))


def reduced_utility_difference(std: ReducedJointTable, prot: ReducedJointTable,
                               u: ReducedUtilityMatrix) -> float:
    return reduced_ud_formula(u, dec(std.p11) - dec(prot.p11), dec(std.p_accept) - dec(prot.p_accept))


def lift_reduced(joint: ReducedJointTable, npv: Optional[float] = None) -> JointTable:
    """Embed a reduced table into a full one by splitting the rejected mass.

    ``npv`` is P(Y=0 | Yhat=0); it defaults to putting all rejected mass on
    ``p00``. The split is immaterial for utilities with ``u00 == u10``.
    """
    a, p11 = dec(joint.p_accept), dec(joint.p11)
    c0 = dec(1.0 if npv is None else _check_prob("npv", npv))
    p00 = (1 - a) * c0
    return JointTable(float(p11), float(a - p11), float((1 - a) - p00), float(p00))
