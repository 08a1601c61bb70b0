import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from utilfair.core import ReducedJointTable, ReducedUtilityMatrix, ValidationError, reduced_utility_difference
from utilfair.uncertainty import (
    CountData,
    IntervalTable,
    ProbInterval,
    counts_to_interval_table,
    normal_quantile,
    ud_lower_bound,
    ud_upper_bound,
    wilson_interval,
)

MORTGAGE_U = ReducedUtilityMatrix(310_000, 160_000, 190_000)   # U~ = (150000, -30000)
STD_BOX = IntervalTable(ProbInterval(0.74, 0.78), ProbInterval(0.79, 0.81))
PROT_BOX = IntervalTable(ProbInterval(0.70, 0.74), ProbInterval(0.79, 0.81))


def corner_extrema(std: IntervalTable, prot: IntervalTable, u: ReducedUtilityMatrix):
    """Min and max of U~ . dP over the 16 corners of the box, in plain floats."""
    u1, u2 = u.u11 - u.u01, u.u01 - u.u0
    vals = []
    for a, b, c, d in itertools.product(*(iv.as_list() for iv in (std.p11, std.p_accept, prot.p11, prot.p_accept))):
        vals.append(u1 * (a - c) + u2 * (b - d))
    return min(vals), max(vals)


@st.composite
def intervals(draw):
    a, b = sorted((draw(st.floats(0, 1)), draw(st.floats(0, 1))))
    return ProbInterval(a, b)


@st.composite
def interval_tables(draw):
    p11 = draw(intervals())
    lo = draw(st.floats(0, 1))
    hi = draw(st.floats(max(lo, p11.lo), 1))
    return IntervalTable(p11, ProbInterval(lo, hi))


MONEY = st.floats(-1e6, 1e6)


def test_mortgage_box_upper_bound():
    assert ud_upper_bound(STD_BOX, PROT_BOX, MORTGAGE_U) == 12_600


def test_mortgage_box_lower_bound():
    assert ud_lower_bound(STD_BOX, PROT_BOX, MORTGAGE_U) == -600


def test_mortgage_box_matches_corner_enumeration():
    lo, hi = corner_extrema(STD_BOX, PROT_BOX, MORTGAGE_U)
    assert hi == pytest.approx(12_600, abs=1e-9)
    assert lo == pytest.approx(-600, abs=1e-9)


def test_point_intervals_give_point_value():
    std, prot = ReducedJointTable(0.76, 0.8), ReducedJointTable(0.72, 0.8)
    point = lambda t: IntervalTable(ProbInterval.point(t.p11), ProbInterval.point(t.p_accept))  # noqa: E731
    ud = reduced_utility_difference(std, prot, MORTGAGE_U)
    assert ud_upper_bound(point(std), point(prot), MORTGAGE_U) == ud == 6000
    assert ud_lower_bound(point(std), point(prot), MORTGAGE_U) == ud


def test_nonnegative_utilities_use_plain_formula():
    u = ReducedUtilityMatrix(3, 2, 1)   # U~ = (1, 1)
    expected = 1 * (0.78 - 0.70) + 1 * (0.81 - 0.79)
    assert ud_upper_bound(STD_BOX, PROT_BOX, u) == pytest.approx(expected, abs=1e-16)


def test_interval_validation():
    with pytest.raises(ValidationError):
        ProbInterval(0.6, 0.5)
    with pytest.raises(ValidationError):
        ProbInterval(-0.1, 0.5)
    with pytest.raises(ValidationError):
        IntervalTable(ProbInterval(0.6, 0.7), ProbInterval(0.4, 0.5))


@settings(max_examples=400)
@given(interval_tables(), interval_tables(), MONEY, MONEY, MONEY)
def test_bounds_equal_corner_extrema(std, prot, u11, u01, u0):
    u = ReducedUtilityMatrix(u11, u01, u0)
    lo, hi = corner_extrema(std, prot, u)
    scale = max(1.0, abs(u11 - u01) + abs(u01 - u0))
    assert abs(ud_upper_bound(std, prot, u) - hi) <= 1e-12 * scale
    assert abs(ud_lower_bound(std, prot, u) - lo) <= 1e-12 * scale


@settings(max_examples=300)
@given(interval_tables(), interval_tables(), MONEY, MONEY, MONEY, st.floats(0, 1), st.floats(0, 1))
def test_point_inside_box_lies_between_bounds(std, prot, u11, u01, u0, s, t):
    u = ReducedUtilityMatrix(u11, u01, u0)

    def inside(box: IntervalTable):
        a = box.p11.lo + s * box.p11.width
        b = max(a, box.p_accept.lo + t * box.p_accept.width)
        return ReducedJointTable(a, min(b, box.p_accept.hi)) if a <= box.p_accept.hi else None

    x, y = inside(std), inside(prot)
    if x is None or y is None:
        return
    ud = reduced_utility_difference(x, y, u)
    slack = 1e-12 * max(1.0, abs(u11 - u01) + abs(u01 - u0))
    assert ud_lower_bound(std, prot, u) - slack <= ud <= ud_upper_bound(std, prot, u) + slack


@settings(max_examples=300)
@given(interval_tables(), interval_tables(), MONEY, MONEY, MONEY, st.floats(0, 0.2))
def test_widening_never_tightens(std, prot, u11, u01, u0, w):
    u = ReducedUtilityMatrix(u11, u01, u0)
    wide = IntervalTable(ProbInterval(max(0.0, std.p11.lo - w), min(1.0, std.p11.hi + w)),
                         ProbInterval(max(0.0, std.p_accept.lo - w), min(1.0, std.p_accept.hi + w)))
    assert ud_upper_bound(wide, prot, u) >= ud_upper_bound(std, prot, u)
    assert ud_lower_bound(wide, prot, u) <= ud_lower_bound(std, prot, u)


# ---- Wilson intervals

def test_normal_quantile():
    assert normal_quantile(0.975) == pytest.approx(1.959963984540054, abs=1e-12)


def test_wilson_half():
    iv = wilson_interval(50, 100)
    assert iv.lo == pytest.approx(0.4038, abs=5e-4)
    assert iv.hi == pytest.approx(0.5962, abs=5e-4)
    assert iv.lo + iv.hi == pytest.approx(1.0, abs=1e-15)


@pytest.mark.parametrize("k, n", [(0, 10), (3, 10), (50, 100), (99, 100), (7, 7), (1, 1000)])
def test_wilson_endpoints_invert_the_score_test(k, n):
    # the ends are exactly where |phat - p| = z sqrt(p (1 - p) / n)
    z = normal_quantile(0.975)
    iv = wilson_interval(k, n)
    phat = k / n
    for p in (iv.lo, iv.hi):
        if p in (0.0, 1.0):
            continue
        assert abs(phat - p) == pytest.approx(z * math.sqrt(p * (1 - p) / n), rel=1e-9)


def test_wilson_boundaries():
    assert wilson_interval(0, 20).lo == 0
    assert wilson_interval(20, 20).hi == 1
    with pytest.raises(ValidationError):
        wilson_interval(0, 0)
    with pytest.raises(ValidationError):
        wilson_interval(5, 4)
    with pytest.raises(ValidationError):
        wilson_interval(1, 4, confidence=1.0)


def test_wilson_shrinks_with_n():
    widths = [wilson_interval(3 * m, 10 * m).width for m in (1, 10, 100, 1000)]
    assert widths == sorted(widths, reverse=True)
    assert widths[-1] < 0.02


@pytest.mark.parametrize("p", [0.1, 0.5, 0.9])
def test_wilson_coverage(p):
    rng = np.random.default_rng(20240601)
    n, reps = 100, 10_000
    hits = rng.binomial(n, p, size=reps)
    table = {k: wilson_interval(k, n) for k in np.unique(hits).tolist()}
    covered = sum(table[k].lo <= p <= table[k].hi for k in hits.tolist())
    assert covered / reps >= 0.93


def test_counts_to_intervals_centered_near_point():
    box = counts_to_interval_table(CountData(76, 4, 20))
    # the Wilson centre (phat + z^2/2n) / (1 + z^2/n) is pulled slightly toward 1/2
    centre = (box.p_accept.lo + box.p_accept.hi) / 2
    z2n = normal_quantile(0.975) ** 2 / 100
    assert centre == pytest.approx((0.8 + z2n / 2) / (1 + z2n), abs=1e-12)
    assert centre == pytest.approx(0.8, abs=0.02)
    assert box.p_accept.lo < 0.8 < box.p_accept.hi
    assert box.p11.lo < 0.76 < box.p11.hi


def test_counts_all_rejected():
    box = counts_to_interval_table(CountData(0, 0, 20))
    assert box.p_accept.lo == 0 and box.p11.lo == 0


def test_counts_validation():
    with pytest.raises(ValidationError):
        CountData(0, 0, 0)
    with pytest.raises(ValidationError):
        CountData(-1, 2, 3)


def test_counts_shrink_to_point():
    box = counts_to_interval_table(CountData(76_000, 4_000, 20_000))
    assert box.p_accept.width < 0.006
    assert box.p11.lo <= 0.76 <= box.p11.hi


@settings(max_examples=200)
@given(st.integers(0, 500), st.integers(0, 500), st.integers(0, 500))
def test_count_boxes_are_valid(n11, n01, n0):
    if n11 + n01 + n0 == 0:
        return
    box = counts_to_interval_table(CountData(n11, n01, n0))
    assert box.p11.lo <= box.p_accept.lo and box.p11.hi <= box.p_accept.hi
