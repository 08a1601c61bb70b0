"""Utilities that make an almost-equal pair of groups arbitrarily unequal.

Given any probability difference with a nonzero diagonal component, one can
pick utilities whose utility difference equals any target, no matter how
small the distance between the two groups' tables is.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .core import (
    JointTable,
    ProbVector,
    Scenario,
    UtilityMatrix,
    ValidationError,
    prob_difference,
    utility_difference,
)

MIN_COMPONENT_RATIO = 1e-300
PD_MATCH_TOL = 1e-12


class AdversaryError(ValidationError):
    pass


@dataclass(frozen=True)
class AdversaryRequest:
    pd: ProbVector
    target_k: float

    def __post_init__(self):
        pd = ProbVector(*(float(x) for x in self.pd))
        if any(not math.isfinite(x) or abs(x) > 1 for x in pd):
            raise AdversaryError(f"probability differences must lie in [-1, 1], got {tuple(pd)}")
        if not (math.isfinite(self.target_k) and self.target_k > 0):
            raise AdversaryError(f"target K must be positive and finite, got {self.target_k!r}")
        if abs(pd.q1) + abs(pd.q2) == 0:
            raise AdversaryError("distance concentrated on off-diagonal; construction undefined")
        object.__setattr__(self, "pd", pd)
        object.__setattr__(self, "target_k", float(self.target_k))


def construct_adversarial_utilities(req: AdversaryRequest) -> UtilityMatrix:
    """Utilities with ``u01 == u10`` and a single active diagonal term worth ``target_k``.

    The diagonal component with the larger magnitude is used; ties go to
    ``PD(Y=1, Yhat=1)``. Dividing by a negative component flips the sign of
    the utility so the difference stays ``+target_k``.
    """
    q1, q2 = req.pd.q1, req.pd.q2
    use_q1 = abs(q1) >= abs(q2)
    comp = q1 if use_q1 else q2
    if abs(comp) < MIN_COMPONENT_RATIO * req.target_k:
        raise AdversaryError(f"component {comp!r} too small for K={req.target_k!r}: utility would overflow")
    value = req.target_k / comp
    if not math.isfinite(value):
        raise AdversaryError("constructed utility overflows")
    if use_q1:
        return UtilityMatrix(u11=value, u01=0.0, u00=0.0, u10=0.0)
    return UtilityMatrix(u11=0.0, u01=0.0, u00=value, u10=0.0)


def verify_adversary(req: AdversaryRequest, u: UtilityMatrix,
                     std: JointTable, prot: JointTable) -> float:
    """Utility difference of ``u`` on two tables that realise ``req.pd``."""
    pd = prob_difference(std, prot)
    gap = max(abs(a - b) for a, b in zip(pd, req.pd))
    if gap > PD_MATCH_TOL:
        raise AdversaryError(f"tables realise {tuple(pd)}, request says {tuple(req.pd)}")
    return utility_difference(Scenario(std, prot, u))
