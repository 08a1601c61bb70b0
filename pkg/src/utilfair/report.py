"""Audit reports: point estimates, certificates, bounds and a verdict per group pair."""

from __future__ import annotations

from typing import Optional

from . import certificates as cert
from ._exact import mul, sub
from .core import (
    DegenerateMarginError,
    JointTable,
    ReducedJointTable,
    ReducedUtilityMatrix,
    Scenario,
    expected_utility,
    lift_reduced,
    prob_difference,
    reduced_expected_utility,
    reduced_utility_difference,
    utility_difference,
)
from .files import LoadedScenario
from .mortgage import expected_utilities, to_reduced_scenario
from .solver import (
    FIXED_CONDITIONAL,
    college_scenario,
    college_ud,
    solve_equal_utility_acceptance,
    solve_q1_star,
)
from .uncertainty import IntervalTable, ProbInterval, counts_to_interval_table, ud_lower_bound, ud_upper_bound

NO_DISADVANTAGE = "no-disadvantage"
NEGLIGIBLE = "negligible"
DISADVANTAGE = "disadvantage"
_SEVERITY = {NO_DISADVANTAGE: 0, NEGLIGIBLE: 1, DISADVANTAGE: 2}


def verdict(ud: float, tau: float) -> str:
    if ud > tau:
        return DISADVANTAGE
    if ud > 0:
        return NEGLIGIBLE
    return NO_DISADVANTAGE


def exit_code(report: dict) -> int:
    return 2 if report["verdict"] == DISADVANTAGE else 0


def _safe(fn, *args, name: str, **kwargs) -> dict:
    try:
        return fn(*args, **kwargs).as_dict()
    except DegenerateMarginError as exc:
        return cert.CertificateReport(name, False, 0.0, None, f"undefined: {exc}").as_dict()


def _standard_certificates(s: Scenario, tol: float) -> list[dict]:
    return [
        cert.check_equal_joints(s, tol).as_dict(),
        _safe(cert.check_cua, s, tol, name="cua"),
        cert.check_demographic_parity(s, tol).as_dict(),
        cert.check_statistical_parity(s, tol).as_dict(),
        _safe(cert.check_equalized_odds, s, tol, name="equalized_odds"),
        cert.certify_eo_sp(s, tol).as_dict(),
    ]


def _standard_bounds(s: Scenario) -> dict:
    pd = prob_difference(s.standard, s.protected)
    uv = s.utilities.vector
    k_hat, eps_hat = uv.sup_norm(), pd.sup_norm()
    return {
        "K": k_hat,
        "epsilon": eps_hat,
        "rough": cert.rough_bound(cert.BoundParams(k_hat, eps_hat)),
        "activeTerm": cert.active_term_bound(uv, pd),
        "terms": [mul(a, b) + 0.0 for a, b in zip(uv, pd)],
    }


def _interval_tables(ls: LoadedScenario, name: str) -> Optional[IntervalTable]:
    if name in ls.intervals:
        return ls.intervals[name]
    if name in ls.counts:
        return counts_to_interval_table(ls.counts[name], ls.confidence)
    return None


def _interval_bounds(ls: LoadedScenario, std_name: str, prot_name: str,
                     std: ReducedJointTable, prot: ReducedJointTable, u: ReducedUtilityMatrix) -> Optional[dict]:
    a = _interval_tables(ls, std_name)
    b = _interval_tables(ls, prot_name)
    if a is None and b is None:
        return None
    # a group without uncertainty information is treated as exactly known
    point = lambda t: IntervalTable(ProbInterval.point(t.p11), ProbInterval.point(t.p_accept))  # noqa: E731
    a = a or point(std)
    b = b or point(prot)
    return {
        "lower": ud_lower_bound(a, b, u),
        "upper": ud_upper_bound(a, b, u),
        "confidence": ls.confidence,
        "note": "group boxes treated as independent",
    }


def _pair_standard(ls: LoadedScenario, prot_name: str, tol: float, tau: float) -> dict:
    std_t, prot_t = ls.groups[ls.standard_name], ls.groups[prot_name]
    s = Scenario(std_t, prot_t, ls.utilities, tau)
    ud = utility_difference(s)
    out = {
        "protected": prot_name,
        "pointEstimates": {"E0": expected_utility(std_t, ls.utilities),
                           "E1": expected_utility(prot_t, ls.utilities), "UD": ud},
        "probDifference": prob_difference(std_t, prot_t)._asdict(),
        "epsilonDistance": cert.epsilon_distance(std_t, prot_t),
        "certificates": _standard_certificates(s, tol),
        "bounds": _standard_bounds(s),
        "verdict": verdict(ud, tau),
    }
    u = ls.utilities
    if u.u00 == u.u10 and (ls.intervals or ls.counts):
        ru = ReducedUtilityMatrix(u.u11, u.u01, u.u00)
        ib = _interval_bounds(ls, ls.standard_name, prot_name, std_t.reduce(), prot_t.reduce(), ru)
        if ib is not None:
            out["bounds"]["interval"] = ib
    return out


def _reduced_block(ls: LoadedScenario, prot_name: str, std_t: ReducedJointTable, prot_t: ReducedJointTable,
                   u: ReducedUtilityMatrix, tol: float, tau: float) -> dict:
    ud = reduced_utility_difference(std_t, prot_t, u)
    try:
        ua = cert.check_reduced_ua(std_t, prot_t, tol).as_dict()
    except DegenerateMarginError as exc:
        ua = cert.CertificateReport("reduced_ua", False, 0.0, None, f"undefined: {exc}").as_dict()
    lifted = Scenario(lift_reduced(std_t), lift_reduced(prot_t), u.as_full(), tau)
    out = {
        "protected": prot_name,
        "pointEstimates": {"E0": reduced_expected_utility(std_t, u),
                           "E1": reduced_expected_utility(prot_t, u), "UD": ud},
        "probDifference": {"p11": sub(std_t.p11, prot_t.p11), "pAccept": sub(std_t.p_accept, prot_t.p_accept)},
        "certificates": [ua],
        "bounds": _standard_bounds(lifted),
        "verdict": verdict(ud, tau),
    }
    ib = _interval_bounds(ls, ls.standard_name, prot_name, std_t, prot_t, u)
    if ib is not None:
        out["bounds"]["interval"] = ib
    solver = []
    if prot_t.p_accept > 0:
        solver.append(solve_equal_utility_acceptance(std_t, prot_t.ppv, u, FIXED_CONDITIONAL).as_dict())
    out["solverResults"] = solver
    return out


def _pair_reduced(ls: LoadedScenario, prot_name: str, tol: float, tau: float) -> dict:
    return _reduced_block(ls, prot_name, ls.groups[ls.standard_name], ls.groups[prot_name],
                          ls.utilities, tol, tau)


def _pair_mortgage(ls: LoadedScenario, prot_name: str, tol: float, tau: float) -> dict:
    sp, pp = ls.groups[ls.standard_name], ls.groups[prot_name]
    ms = to_reduced_scenario(sp, pp, ls.acceptance[ls.standard_name], ls.acceptance[prot_name], ls.utilities)
    shared = ms.shared_utilities
    if shared is not None:
        out = _reduced_block(ls, prot_name, ms.standard, ms.protected, shared, tol, tau)
    else:
        e0, e1 = ms.expected_utilities()
        ud = e0 - e1
        try:
            ua = cert.check_reduced_ua(ms.standard, ms.protected, tol).as_dict()
        except DegenerateMarginError as exc:
            ua = cert.CertificateReport("reduced_ua", False, 0.0, None, f"undefined: {exc}").as_dict()
        out = {
            "protected": prot_name,
            "pointEstimates": {"E0": e0, "E1": e1, "UD": ud},
            "probDifference": {"p11": sub(ms.standard.p11, ms.protected.p11),
                               "pAccept": sub(ms.standard.p_accept, ms.protected.p_accept)},
            "certificates": [ua],
            "bounds": {},
            "verdict": verdict(ud, tau),
            "notes": ["outcome utilities differ between groups; use-accuracy certificate assumes shared utilities"],
        }
    out["mortgage"] = {
        "standard": {"tables": {"p11": ms.standard.p11, "pAccept": ms.standard.p_accept},
                     "utilities": ms.standard_utilities.as_dict(),
                     "breakdown": expected_utilities(sp).as_dict()},
        "protected": {"tables": {"p11": ms.protected.p11, "pAccept": ms.protected.p_accept},
                      "utilities": ms.protected_utilities.as_dict(),
                      "breakdown": expected_utilities(pp).as_dict()},
    }
    return out


def _college(ls: LoadedScenario, tol: float, tau: float) -> dict:
    p = ls.college
    s = college_scenario(p, tau=tau)
    ud = college_ud(p)
    out = {
        "protected": "protected",
        "pointEstimates": {"E0": expected_utility(s.standard, s.utilities),
                           "E1": expected_utility(s.protected, s.utilities), "UD": ud},
        "probDifference": prob_difference(s.standard, s.protected)._asdict(),
        "epsilonDistance": cert.epsilon_distance(s.standard, s.protected),
        "certificates": _standard_certificates(s, tol),
        "bounds": _standard_bounds(s),
        "verdict": verdict(ud, tau),
        "solverResults": [],
    }
    if p.q11 > 0:
        out["solverResults"].append(solve_q1_star(p).as_dict())
    return out


def audit(ls: LoadedScenario, tol: float = cert.DEFAULT_TOL, tau: Optional[float] = None,
          include_meta: bool = True) -> dict:
    """Audit every protected group against the standard group.

    The overall verdict is the most severe pairwise one.
    """
    tau = ls.tau if tau is None else float(tau)
    if ls.setting == "college":
        comparisons = [_college(ls, tol, tau)]
    else:
        pair = {"standard": _pair_standard, "reduced": _pair_reduced, "mortgage": _pair_mortgage}[ls.setting]
        comparisons = [pair(ls, name, tol, tau) for name in ls.protected_names]
    worst = max((c["verdict"] for c in comparisons), key=_SEVERITY.__getitem__)
    report = {
        "schemaVersion": 1,
        "setting": ls.setting,
        "standardGroup": ls.standard_name,
        "tau": tau,
        "tolerance": tol,
        "scenario": _echo(ls),
        "comparisons": comparisons,
        "verdict": worst,
    }
    if include_meta and ls.metadata:
        report["metadata"] = ls.metadata
    return report


def _echo(ls: LoadedScenario) -> dict:
    if ls.setting == "college":
        return {"college": ls.college.as_dict()}
    groups = {}
    for name in ls.group_names:
        g = ls.groups[name]
        if isinstance(g, JointTable):
            groups[name] = g.cells
        elif isinstance(g, ReducedJointTable):
            groups[name] = {"p11": g.p11, "pAccept": g.p_accept}
        else:
            groups[name] = dict(g.as_dict(), acceptance=ls.acceptance[name])
    return {"groups": groups, "utilities": ls.utilities.as_dict() if ls.utilities is not None else None}
