"""Sufficient conditions for the absence of a disadvantage, and bounds on its size.

Every check returns a :class:`CertificateReport`. ``slack`` is the smallest
tolerance at which the certificate would have held, so a failing report
carries the offending deviation and a passing one carries 0.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Mapping, Optional

from ._exact import dec
from .core import (
    DegenerateMarginError,
    JointTable,
    ProbVector,
    ReducedJointTable,
    Scenario,
    UtilityVector,
    ValidationError,
    prob_difference,
)

DEFAULT_TOL = 1e-9


@dataclass(frozen=True)
class CertificateReport:
    name: str
    holds: bool
    slack: float = 0.0
    bound: Optional[float] = None
    details: str = ""

    def __post_init__(self):
        if self.holds and self.slack != 0:
            raise ValueError("a certificate that holds must have zero slack")
        if self.bound is not None and self.bound < 0:
            raise ValueError("bound must be nonnegative")

    def as_dict(self) -> dict:
        return {"name": self.name, "holds": self.holds, "slack": self.slack,
                "bound": self.bound, "details": self.details}


@dataclass(frozen=True)
class BoundParams:
    K: float
    eps: float
    gamma: float = 1.0

    def __post_init__(self):
        if not (math.isfinite(self.K) and self.K >= 0):
            raise ValidationError(f"K must be finite and nonnegative, got {self.K!r}")
        if not 0 <= self.eps <= 1:
            raise ValidationError(f"eps must lie in [0, 1], got {self.eps!r}")
        if not 0 <= self.gamma <= 1:
            raise ValidationError(f"gamma must lie in [0, 1], got {self.gamma!r}")


def _report(name: str, deviations: Mapping[str, float], tol: float, bound=None, extra="") -> CertificateReport:
    worst = max(deviations.values()) if deviations else 0.0
    holds = worst <= tol
    parts = ", ".join(f"|{k}|={v:.6g}" for k, v in deviations.items())
    details = parts if not extra else f"{parts}; {extra}" if parts else extra
    return CertificateReport(name, holds, 0.0 if holds else worst, bound, details)


def _absdiff(a: float, b: float) -> float:
    return abs(float(dec(a) - dec(b)))


def rough_bound(p: BoundParams) -> float:
    """Largest disadvantage compatible with ``|U_k| <= K`` and ``|PD_k| <= eps``."""
    return float(3 * dec(p.eps) * dec(p.K))


def cua_bound(p: BoundParams) -> float:
    """Tighter bound ``(1 + 2 gamma) eps K`` valid under equal conditional use accuracy."""
    return float((1 + 2 * dec(p.gamma)) * dec(p.eps) * dec(p.K))


def utility_bound_of(s: Scenario) -> float:
    """K-hat: the sup-norm of the scenario's utility vector."""
    return s.utilities.vector.sup_norm()


def epsilon_distance(a: JointTable, b: JointTable) -> float:
    """L-infinity distance between the probability vectors of two groups."""
    return prob_difference(a, b).sup_norm()


def active_term_bound(u: UtilityVector, pd: ProbVector) -> float:
    """Rough bound restricted to the terms where both factors are nonzero.

    With ``n`` active terms this is ``n * eps_active * K_active``; with a
    single active term it equals ``|UD|``.
    """
    active = [(abs(a), abs(b)) for a, b in zip(u, pd) if a != 0 and b != 0]
    if not active:
        return 0.0
    k = max(a for a, _ in active)
    eps = max(b for _, b in active)
    return float(len(active) * dec(k) * dec(eps))


def check_equal_joints(s: Scenario, tol: float = DEFAULT_TOL) -> CertificateReport:
    """Holds when at least three of the four cells agree across groups."""
    devs = {f"PD(p{k}{j})": _absdiff(s.standard.cell(k, j), s.protected.cell(k, j))
            for k in (1, 0) for j in (1, 0)}
    third = sorted(devs.values())[2]
    holds = third <= tol
    details = ", ".join(f"|{k}|={v:.6g}" for k, v in devs.items())
    return CertificateReport("equal_joints", holds, 0.0 if holds else third, None,
                             details + "; needs three equal cells")


def gamma_of(s: Scenario) -> float:
    """Larger of the two use accuracies of the standard group."""
    return max(s.standard.ppv, s.standard.npv)


def check_cua(s: Scenario, tol: float = DEFAULT_TOL) -> CertificateReport:
    """Equal conditional use accuracy; reports the ``(1+2 gamma) eps K`` bound when it holds."""
    for label, t in (("standard", s.standard), ("protected", s.protected)):
        a = t.accept_rate
        if a == 0:
            raise DegenerateMarginError(f"{label} group has P(Yhat=1)=0; conditional use accuracy undefined")
        if a == 1:
            raise DegenerateMarginError(f"{label} group has P(Yhat=0)=0; conditional use accuracy undefined")
    devs = {
        "PD(Y=1|Yhat=1)": _absdiff(s.standard.ppv, s.protected.ppv),
        "PD(Y=0|Yhat=0)": _absdiff(s.standard.npv, s.protected.npv),
    }
    if max(devs.values()) > tol:
        return _report("cua", devs, tol)
    eps_hat = _absdiff(s.standard.accept_rate, s.protected.accept_rate)
    gamma = gamma_of(s)
    bound = cua_bound(BoundParams(utility_bound_of(s), eps_hat, gamma))
    extra = f"gamma={gamma:.6g}, eps={eps_hat:.6g}, K={utility_bound_of(s):.6g}"
    if eps_hat <= tol:
        extra += "; acceptance rates equal"
    return _report("cua", devs, tol, bound=bound, extra=extra)


def check_demographic_parity(s: Scenario, tol: float = DEFAULT_TOL) -> CertificateReport:
    return _report("demographic_parity",
                   {"PD(Yhat=1)": _absdiff(s.standard.accept_rate, s.protected.accept_rate)}, tol)


def check_statistical_parity(s: Scenario, tol: float = DEFAULT_TOL) -> CertificateReport:
    return _report("statistical_parity",
                   {"PD(Y=1)": _absdiff(s.standard.base_rate, s.protected.base_rate)}, tol)


def check_equalized_odds(s: Scenario, tol: float = DEFAULT_TOL) -> CertificateReport:
    return _report("equalized_odds", {
        "PD(Yhat=1|Y=1)": _absdiff(s.standard.tpr, s.protected.tpr),
        "PD(Yhat=0|Y=0)": _absdiff(s.standard.tnr, s.protected.tnr),
    }, tol)


def certify_eo_sp(s: Scenario, tol: float = DEFAULT_TOL) -> CertificateReport:
    """Equalized odds plus statistical parity plus ``u01 == u10``."""
    devs = {"PD(Y=1)": _absdiff(s.standard.base_rate, s.protected.base_rate)}
    try:
        devs["PD(Yhat=1|Y=1)"] = _absdiff(s.standard.tpr, s.protected.tpr)
        devs["PD(Yhat=0|Y=0)"] = _absdiff(s.standard.tnr, s.protected.tnr)
    except DegenerateMarginError as exc:
        return CertificateReport("eo_sp", False, max(devs.values()), None,
                                 f"equalized odds undefined ({exc})")
    devs["u01-u10"] = _absdiff(s.utilities.u01, s.utilities.u10)
    return _report("eo_sp", devs, tol)


@dataclass(frozen=True)
class GroupedJointTable:
    """Three-way distribution over (S, Y, Yhat) for two groups.

    ``cells[(s, y, yhat)]`` is the unconditional probability.
    """

    cells: Mapping = field(default_factory=dict)

    def __post_init__(self):
        keys = {(s, y, j) for s in (0, 1) for y in (0, 1) for j in (0, 1)}
        if set(self.cells) != keys:
            raise ValidationError("three-way table needs exactly the 8 keys (s, y, yhat)")
        vals = [float(v) for v in self.cells.values()]
        if any(not math.isfinite(v) or v < 0 for v in vals):
            raise ValidationError("three-way table cells must be finite and nonnegative")
        if abs(math.fsum(vals) - 1.0) > 1e-12:
            raise ValidationError("three-way table must sum to 1")
        object.__setattr__(self, "cells", dict(self.cells))

    @classmethod
    def from_groups(cls, standard: JointTable, protected: JointTable,
                    standard_mass: float = 0.5) -> "GroupedJointTable":
        w = {0: dec(standard_mass), 1: 1 - dec(standard_mass)}
        cells = {(s, y, j): float(w[s] * dec(t.cell(y, j)))
                 for s, t in ((0, standard), (1, protected)) for y in (0, 1) for j in (0, 1)}
        return cls(cells)

    def group_mass(self, s: int) -> float:
        return math.fsum(self.cells[(s, y, j)] for y in (0, 1) for j in (0, 1))

    def conditional(self, s: int) -> dict:
        m = sum((dec(self.cells[(s, y, j)]) for y in (0, 1) for j in (0, 1)), dec(0))
        if m == 0:
            raise DegenerateMarginError(f"group {s} has zero mass")
        return {(y, j): dec(self.cells[(s, y, j)]) / m for y in (0, 1) for j in (0, 1)}

    def marginal(self) -> dict:
        return {(y, j): dec(self.cells[(0, y, j)]) + dec(self.cells[(1, y, j)])
                for y in (0, 1) for j in (0, 1)}


def check_independence(full: GroupedJointTable, tol: float = DEFAULT_TOL) -> CertificateReport:
    """(Y, Yhat) independent of S: each group's conditional table equals the pooled one."""
    cond = {s: full.conditional(s) for s in (0, 1)}
    pooled = full.marginal()
    worst = max(float(abs(cond[s][k] - pooled[k])) for s in (0, 1) for k in pooled)
    return _report("independence", {"P(Y,Yhat|S)-P(Y,Yhat)": worst}, tol)


def check_reduced_ua(std: ReducedJointTable, prot: ReducedJointTable,
                     tol: float = DEFAULT_TOL) -> CertificateReport:
    """Reduced-setting use accuracy: equal ``P(Y=1|Yhat=1)`` and equal rejection rates."""
    for label, t in (("standard", std), ("protected", prot)):
        if t.p_accept == 0:
            raise DegenerateMarginError(f"{label} group has P(Yhat=1)=0; use accuracy undefined")
    return _report("reduced_ua", {
        "PD(Y=1|Yhat=1)": _absdiff(std.ppv, prot.ppv),
        "PD(Yhat=0)": _absdiff(std.p_reject, prot.p_reject),
    }, tol)
