"""Utility-based fairness audits for binary decision rules."""

from .core import (
    DegenerateMarginError,
    JointTable,
    ProbVector,
    ReducedJointTable,
    ReducedUtilityMatrix,
    Scenario,
    UtilityMatrix,
    UtilityVector,
    ValidationError,
    brute_force_expected_utility,
    expected_utility,
    prob_difference,
    reduced_expected_utility,
    reduced_utility_difference,
    utility_difference,
)

__version__ = "0.1.0"
