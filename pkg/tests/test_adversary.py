import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from utilfair.adversary import (
    AdversaryError,
    AdversaryRequest,
    construct_adversarial_utilities,
    verify_adversary,
)
from utilfair.certificates import epsilon_distance
from utilfair.core import JointTable, ProbVector, Scenario, prob_difference, utility_difference

from strategies import realize_pd


def test_proof_case():
    req = AdversaryRequest(ProbVector(0.01, 0.0, 0.01), 1e6)
    u = construct_adversarial_utilities(req)
    assert (u.u11, u.u01, u.u00, u.u10) == (1e8, 0, 0, 0)
    std, prot = realize_pd(0.01, 0.0, 0.01)
    assert verify_adversary(req, u, std, prot) == 1e6


def test_second_diagonal_case():
    req = AdversaryRequest(ProbVector(0.0, 0.02, 0.0), 1000)
    u = construct_adversarial_utilities(req)
    assert u.u00 == 50_000 and u.u01 == u.u10
    std, prot = realize_pd(0.0, 0.02, 0.0)
    assert verify_adversary(req, u, std, prot) == 1000


def test_negative_component_mirrors_sign():
    req = AdversaryRequest(ProbVector(-0.01, 0.0, 0.0), 1)
    u = construct_adversarial_utilities(req)
    assert u.u11 < 0
    std, prot = realize_pd(-0.01, 0.0, 0.0)
    assert verify_adversary(req, u, std, prot) == pytest.approx(1, rel=1e-12)


def test_larger_component_wins_ties_to_q1():
    u = construct_adversarial_utilities(AdversaryRequest(ProbVector(0.01, -0.03, 0), 1))
    assert u.u11 == 0 and u.u00 < 0
    u = construct_adversarial_utilities(AdversaryRequest(ProbVector(0.02, 0.02, 0), 1))
    assert u.u11 == 50 and u.u00 == 0


@pytest.mark.parametrize("pd, k, msg", [
    ((0.0, 0.0, 0.1), 1.0, "off-diagonal"),
    ((0.1, 0.0, 0.0), 0.0, "positive"),
    ((0.1, 0.0, 0.0), -1.0, "positive"),
    ((0.1, 0.0, 0.0), math.inf, "positive"),
    ((1.5, 0.0, 0.0), 1.0, "lie in"),
])
def test_invalid_requests(pd, k, msg):
    with pytest.raises(AdversaryError, match=msg):
        AdversaryRequest(ProbVector(*pd), k)


def test_tiny_component_rejected():
    with pytest.raises(AdversaryError, match="overflow"):
        construct_adversarial_utilities(AdversaryRequest(ProbVector(1e-310, 0, 0), 1e9))


def test_verify_rejects_mismatched_tables():
    req = AdversaryRequest(ProbVector(0.01, 0.0, 0.01), 1)
    t = JointTable(0.25, 0.25, 0.25, 0.25)
    with pytest.raises(AdversaryError, match="realise"):
        verify_adversary(req, construct_adversarial_utilities(req), t, t)


@settings(max_examples=300)
@given(st.floats(-0.05, 0.05), st.floats(-0.05, 0.05), st.floats(-0.05, 0.05),
       st.sampled_from([1.0, 1e3, 1e9]))
def test_construction_reaches_target(q1, q2, q3, k):
    std, prot = realize_pd(q1, q2, q3)
    pd = prob_difference(std, prot)
    if pd.q1 == 0 and pd.q2 == 0:
        return
    req = AdversaryRequest(pd, k)
    eps_before = epsilon_distance(std, prot)
    u = construct_adversarial_utilities(req)
    ud = utility_difference(Scenario(std, prot, u))
    assert ud >= k * (1 - 1e-9)
    assert ud == pytest.approx(k, rel=1e-9)
    # utilities never touch the probabilities
    assert epsilon_distance(std, prot) == eps_before
