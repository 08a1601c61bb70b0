"""Structural default model for a mortgage with normally distributed wealth.

The borrower's wealth at the payback date is ``X ~ N(mu, sigma^2)``. With
mortgage balance ``M``, house price ``P`` and fire-sale haircut ``lam`` the
borrower ends up in one of three regions::

    X > M                        no default     P + X - x0 - M
    M - P(1-lam) < X <= M        default D1     P(1-lam) + X - x0 - M
    X <= M - P(1-lam)            default D2     -x0

Closed forms use the standard normal CDF/pdf; :func:`quadrature_expected_payoff`
integrates the same payoff numerically as an independent check.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Optional

from .core import ReducedJointTable, ReducedUtilityMatrix, ValidationError, reduced_expected_utility

_INV_SQRT_2PI = 1.0 / math.sqrt(2.0 * math.pi)


def std_normal_cdf(x: float) -> float:
    if math.isinf(x):
        return 1.0 if x > 0 else 0.0
    return 0.5 * math.erfc(-x / math.sqrt(2.0))


def std_normal_pdf(x: float) -> float:
    if math.isinf(x):
        return 0.0
    return _INV_SQRT_2PI * math.exp(-0.5 * x * x)


def partial_expectation(a: float, b: float) -> float:
    """``E[xi * 1{a < xi <= b}]`` for a standard normal ``xi``."""
    if a > b:
        raise ValueError(f"need a <= b, got a={a!r}, b={b!r}")
    return std_normal_pdf(a) - std_normal_pdf(b)


@dataclass(frozen=True)
class MortgageParams:
    price_t: float          # house value at the payback date
    mortgage_t: float       # outstanding balance at the payback date
    capital0: float         # initial own capital
    haircut: float          # fraction lost in a forced sale
    mu: float               # mean wealth at the payback date
    sigma: float
    rent_cost: float        # living cost when no mortgage is granted
    horizon: float = 10.0   # years; documentary only

    def __post_init__(self):
        for name in ("price_t", "mortgage_t", "capital0", "haircut", "mu", "sigma", "rent_cost", "horizon"):
            v = float(getattr(self, name))
            if not math.isfinite(v):
                raise ValidationError(f"{name} must be finite, got {v!r}")
            object.__setattr__(self, name, v)
        if self.sigma <= 0:
            raise ValidationError(f"sigma must be positive, got {self.sigma!r}")
        if not 0 <= self.haircut < 1:
            raise ValidationError(f"haircut must lie in [0, 1), got {self.haircut!r}")
        if self.price_t < 0:
            raise ValidationError(f"price_t must be nonnegative, got {self.price_t!r}")

    @property
    def sale_value(self) -> float:
        return self.price_t * (1.0 - self.haircut)

    def with_(self, **changes) -> "MortgageParams":
        return replace(self, **changes)

    def as_dict(self) -> dict:
        return {"priceT": self.price_t, "mortgageT": self.mortgage_t, "capital0": self.capital0,
                "haircut": self.haircut, "mu": self.mu, "sigma": self.sigma, "rentCost": self.rent_cost,
                "horizonT": self.horizon}


PRESETS = {
    "base": MortgageParams(price_t=400_000, mortgage_t=200_000, capital0=90_000, haircut=0.2,
                           mu=220_000, sigma=30_000, rent_cost=100_000),
    "high-mean": MortgageParams(price_t=400_000, mortgage_t=200_000, capital0=90_000, haircut=0.2,
                                mu=250_000, sigma=30_000, rent_cost=100_000),
}


@dataclass(frozen=True)
class MortgageBreakdown:
    p_no_default: float
    p_d1: float
    p_d2: float
    eu11: float     # E[U 1{no default}]
    eu01: float     # E[U 1{default}]
    eu0: float      # expected utility without a mortgage

    @property
    def p_default(self) -> float:
        return self.p_d1 + self.p_d2

    def as_dict(self) -> dict:
        return {"pNoDefault": self.p_no_default, "pD1": self.p_d1, "pD2": self.p_d2,
                "pDefault": self.p_default, "eU11": self.eu11, "eU01": self.eu01, "eU0": self.eu0}


def _thresholds(p: MortgageParams) -> tuple[float, float]:
    # standardised upper edges of D2 and of D1
    return (p.mortgage_t - p.sale_value - p.mu) / p.sigma, (p.mortgage_t - p.mu) / p.sigma


def default_probabilities(p: MortgageParams) -> tuple[float, float, float]:
    """``(P(no default), P(D1), P(D2))``."""
    c_d2, c_d1 = _thresholds(p)
    p_no = std_normal_cdf(-c_d1)
    p_d2 = std_normal_cdf(c_d2)
    p_d1 = max(0.0, std_normal_cdf(c_d1) - p_d2)
    return p_no, p_d1, p_d2


def expected_utilities(p: MortgageParams) -> MortgageBreakdown:
    p_no, p_d1, p_d2 = default_probabilities(p)
    c_d2, c_d1 = _thresholds(p)
    eu11 = (p.price_t + p.mu - p.capital0 - p.mortgage_t) * p_no + p.sigma * std_normal_pdf(-c_d1)
    eu01 = (-p.capital0 * (p_d1 + p_d2)
            + (p.sale_value + p.mu - p.mortgage_t) * p_d1
            + p.sigma * partial_expectation(c_d2, c_d1))
    eu0 = p.capital0 + p.mu - p.rent_cost
    return MortgageBreakdown(p_no, p_d1, p_d2, eu11, eu01, eu0)


def payoff(x: float, p: MortgageParams) -> float:
    """Borrower's utility for wealth ``x`` when the mortgage is granted."""
    if x > p.mortgage_t:
        return p.price_t + x - p.capital0 - p.mortgage_t
    if x > p.mortgage_t - p.sale_value:
        return p.sale_value + x - p.capital0 - p.mortgage_t
    return -p.capital0


def quadrature_expected_payoff(p: MortgageParams, width: float = 14.0) -> float:
    """``E[payoff(X)]`` by adaptive Gauss-Kronrod quadrature, split at the kinks.

    Mass beyond ``width`` standard deviations is below 1e-44 and is ignored.
    """
    from scipy import integrate

    lo, hi = p.mu - width * p.sigma, p.mu + width * p.sigma
    cuts = sorted(c for c in (p.mortgage_t - p.sale_value, p.mortgage_t) if lo < c < hi)
    edges = [lo, *cuts, hi]

    def integrand(x: float) -> float:
        z = (x - p.mu) / p.sigma
        return payoff(x, p) * math.exp(-0.5 * z * z) * _INV_SQRT_2PI / p.sigma

    total = 0.0
    for a, b in zip(edges, edges[1:]):
        val, _ = integrate.quad(integrand, a, b, epsabs=0.0, epsrel=1e-12, limit=200)
        total += val
    return total


def group_expected_utility(p: MortgageParams, accept: float) -> float:
    """Direct mixture ``accept * E[payoff] + (1 - accept) * E[U_0]`` via quadrature."""
    eu0 = p.capital0 + p.mu - p.rent_cost
    return accept * quadrature_expected_payoff(p) + (1.0 - accept) * eu0


def conditional_utilities(p: MortgageParams, accept: float = 1.0) -> ReducedUtilityMatrix:
    """Per-outcome utilities ``(E[U|no default], E[U|default], E[U_0])``.

    A branch with probability zero has no conditional value; that is only
    tolerated when the group is never accepted, in which case ``u0`` stands in.
    """
    b = expected_utilities(p)
    if accept == 0:
        return ReducedUtilityMatrix(b.eu0, b.eu0, b.eu0)
    if b.p_no_default == 0 or b.p_default == 0:
        raise ValidationError(
            "conditional utility undefined: "
            + ("P(no default) is 0" if b.p_no_default == 0 else "P(default) is 0")
        )
    return ReducedUtilityMatrix(b.eu11 / b.p_no_default, b.eu01 / b.p_default, b.eu0)


@dataclass(frozen=True)
class MortgageReducedScenario:
    """Reduced tables for two groups plus each group's outcome utilities.

    Different wealth distributions give different conditional utilities, so
    each group carries its own matrix. With ``u_override`` both are the same.
    """

    standard: ReducedJointTable
    protected: ReducedJointTable
    standard_utilities: ReducedUtilityMatrix
    protected_utilities: ReducedUtilityMatrix

    @property
    def shared_utilities(self) -> Optional[ReducedUtilityMatrix]:
        if self.standard_utilities == self.protected_utilities:
            return self.standard_utilities
        return None

    def expected_utilities(self) -> tuple[float, float]:
        return (reduced_expected_utility(self.standard, self.standard_utilities),
                reduced_expected_utility(self.protected, self.protected_utilities))

    def utility_difference(self) -> float:
        e0, e1 = self.expected_utilities()
        return e0 - e1


def to_reduced_scenario(std: MortgageParams, prot: MortgageParams, accept_std: float,
                        accept_prot: float,
                        u_override: Optional[ReducedUtilityMatrix] = None) -> MortgageReducedScenario:
    tables = []
    for params, accept in ((std, accept_std), (prot, accept_prot)):
        p_no = default_probabilities(params)[0]
        tables.append(ReducedJointTable(accept * p_no, accept))
    if u_override is not None:
        u0 = u1 = u_override
    else:
        u0 = conditional_utilities(std, accept_std)
        u1 = conditional_utilities(prot, accept_prot)
    return MortgageReducedScenario(tables[0], tables[1], u0, u1)
