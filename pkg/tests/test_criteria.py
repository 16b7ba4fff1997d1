import numpy as np
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from radialblowup.criteria import (BOTH_BLOW_UP, BOTH_BLOWUP, BOTH_BOUNDED, CONVERGENT, DIVERGENT,
                                   GLOBAL_EXISTENCE, INCONCLUSIVE, NO_POSITIVE_SOLUTION,
                                   U_BOUNDED_V_BLOWS, classify_ball, classify_entire, eval_A,
                                   eval_Dfun, eval_H, integrated_H, invert_monotone, ko_condition,
                                   ko_profile, regime_from_inequalities, sqrt_vs_F)
from radialblowup.errors import IneligibleError, MonotonicityError, SpecError
from radialblowup.model import Ball, NonlinearityDesc, ProblemSpec


def ball(**kw):
    return ProblemSpec(domain=Ball(kw.pop("R", 1.0)), **kw)


def test_H_of_power():
    # H(t) = t^3/3 for h = t^2, and its integral t^4/12
    h = NonlinearityDesc.power(1.0, 2.0)
    assert eval_H(h, 2.0) == pytest.approx(2.0**3 / 3)
    assert integrated_H(h, 2.0) == pytest.approx(2.0**4 / 12)


def test_A_and_D_functionals_are_increasing():
    spec = ball(p=1.5, s=2.0)
    xs = np.linspace(0.1, 5.0, 20)
    A = [eval_A(spec, 0.5, x) for x in xs]
    D = [eval_Dfun(spec, 1.0, x) for x in xs]
    assert np.all(np.diff(A) > 0) and np.all(np.diff(D) > 0)


def test_sqrt_vs_F_inequality():
    spec = ball(p=1.0, s=2.0)
    for sigma in (0.5, 1.0, 3.0):
        lhs, rhs = sqrt_vs_F(spec, sigma, 1.0)
        assert lhs <= rhs * (1 + 1e-9)


def test_invert_monotone():
    x = invert_monotone(lambda t: t**3 + t, 10.0)
    assert x**3 + x == pytest.approx(10.0, rel=1e-12)
    with pytest.raises(MonotonicityError):
        invert_monotone(lambda t: 1.0 - t, 5.0)


@pytest.mark.parametrize("p, s, tag", [
    (1, 1, BOTH_BOUNDED), (0.5, 2, BOTH_BOUNDED), (1, 2, BOTH_BLOW_UP), (1, 4, BOTH_BLOW_UP),
    (1, 5, U_BOUNDED_V_BLOWS), (2, 4, U_BOUNDED_V_BLOWS), (4, 1, BOTH_BLOW_UP),
])
def test_regime_examples(p, s, tag):
    assert regime_from_inequalities(p, s) == tag
    assert classify_ball(ball(p=p, s=s)).tag == tag


@pytest.mark.parametrize("p, s", [(1, 1.5), (1, 3), (1, 6), (0.5, 3), (2, 3.5), (0.25, 8)])
def test_numeric_matches_analytic(p, s):
    spec = ball(p=p, s=s)
    assert classify_ball(spec, method="numeric").tag == classify_ball(spec, method="analytic").tag


def test_numeric_tail_exponent():
    plain, weighted = ko_profile(ball(p=1.0, s=1.5), "bounded")
    e = 1.0 * 3.5 / 3.0
    assert plain.tail_exponent_est == pytest.approx(e, abs=1e-3)
    assert plain.verdict == CONVERGENT and weighted.verdict == DIVERGENT


def test_exact_boundary_numeric_is_inconclusive():
    # s = 2 + 2/p makes the weighted integral borderline
    v = ko_condition(ball(p=1.0, s=4.0), "u_bounded", method="numeric")
    assert v.verdict == INCONCLUSIVE
    assert classify_ball(ball(p=1.0, s=4.0), method="numeric").tag == "Inconclusive"


def test_both_blowup_pair():
    plain, weighted = ko_condition(ball(p=1, s=2), BOTH_BLOWUP)
    assert (plain.verdict, weighted.verdict) == (CONVERGENT, DIVERGENT)


def test_condition_errors():
    with pytest.raises(SpecError):
        ko_condition(ball(p=1, s=2), "nope")
    with pytest.raises(SpecError):
        ko_condition(ball(p=1, s=2), "bounded", C=0.0)
    with pytest.raises(IneligibleError):
        classify_ball(ProblemSpec(p=1, s=2))


def test_tabulated_h_classification():
    xs = np.r_[0.0, np.geomspace(1e-3, 50, 120)]
    h = NonlinearityDesc.sampled_from(lambda t: t**5, xs, 5.0)
    reg = classify_ball(ball(p=1.0, s=None, h=h))
    assert reg.tag == U_BOUNDED_V_BLOWS
    assert reg.flags["method"] == "numeric"


def test_general_g_uses_four_certificates():
    xs = np.r_[0.0, np.geomspace(1e-3, 50, 80)]
    g = (NonlinearityDesc.power(1.0, 0.0), NonlinearityDesc.sampled_from(lambda t: t**2, xs, 2.0))
    reg = classify_ball(ProblemSpec(p=None, s=1.5, g_general=g, domain=Ball(1.0)))
    assert len(reg.certificates) == 4
    assert reg.tag in (BOTH_BLOW_UP, "Inconclusive")


def test_classify_entire():
    assert classify_entire(ProblemSpec(p=1, s=2)).tag == NO_POSITIVE_SOLUTION
    reg = classify_entire(ProblemSpec(N=3, p=0.5, s=1))
    assert reg.tag == GLOBAL_EXISTENCE and reg.flags["asymptotics_eligible"]
    assert not classify_entire(ProblemSpec(p=1, s=1)).flags["asymptotics_eligible"]
    with pytest.raises(IneligibleError):
        classify_entire(ball(p=1, s=2))


@settings(max_examples=40, deadline=None)
@given(p=st.floats(0.2, 5.0), s=st.floats(1.0, 10.0))
def test_numeric_never_contradicts_analytic(p, s):
    spec = ball(p=p, s=s)
    num = classify_ball(spec, method="numeric").tag
    assert num in ("Inconclusive", regime_from_inequalities(p, s))


@settings(max_examples=40, deadline=None)
@given(p=st.floats(0.2, 5.0), s=st.floats(1.0, 10.0))
def test_decided_away_from_boundaries(p, s):
    assume(abs(p * s - 1) > 0.05 and abs(s - 2 - 2 / p) > 0.05)
    assert classify_ball(ball(p=p, s=s), method="numeric").decided
