import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from radialblowup.errors import SpecError
from radialblowup.model import (Ball, EntireSpace, InitialData, NonlinearityDesc, ProblemSpec,
                                load_problem, problem_from_dict, problem_to_dict, require_initial,
                                validate_problem)


def test_entire_space_half_one_is_valid_and_eligible_for_rates():
    rep = validate_problem(ProblemSpec(N=3, a=0, b=0, p=0.5, s=1))
    assert rep.ok
    assert rep.eligible_for("entire_asymptotics")
    assert rep.eligible_for("divergence_condition")
    assert "s_equals_one" in [c for c, _ in rep.warnings]


def test_dimension_one_rejected():
    rep = validate_problem(ProblemSpec(N=1))
    assert not rep.ok
    assert "dimension" in rep.codes


def test_decreasing_table_flags_monotonicity():
    h = NonlinearityDesc.tabulated([0, 1, 2], [0, 2, 1], 1.0)
    rep = validate_problem(ProblemSpec(p=1, s=None, h=h, domain=Ball(1)))
    assert "monotonicity" in rep.codes


@pytest.mark.parametrize("kw, code", [
    (dict(a=-1.0), "weight_sign"),
    (dict(p=0.0), "exponent_range"),
    (dict(s=0.5), "exponent_range"),
    (dict(domain=Ball(0.0)), "radius"),
    (dict(domain=Ball(-2.0)), "radius"),
    (dict(g_coef=0.0), "coefficient"),
    (dict(p=None), "mode"),
])
def test_violation_codes(kw, code):
    assert code in validate_problem(ProblemSpec(**kw)).codes


def test_ball_rates_ineligible_and_ps_above_one_flags():
    rep = validate_problem(ProblemSpec(p=1, s=2, domain=Ball(1)))
    assert rep.ok and rep.eligible_for("ball_regimes")
    assert not rep.eligible_for("entire_asymptotics")
    rep = validate_problem(ProblemSpec(p=1, s=1))
    assert "borderline_ps" in [c for c, _ in rep.warnings]
    assert not rep.eligible_for("entire_asymptotics")


@settings(max_examples=60, deadline=None)
@given(N=st.integers(0, 6), a=st.floats(-1, 3), p=st.floats(0.01, 5), s=st.floats(0.5, 9))
def test_validation_is_pure(N, a, p, s):
    spec = ProblemSpec(N=N, a=a, p=p, s=s)
    r1, r2 = validate_problem(spec), validate_problem(spec)
    assert r1 == r2
    assert json.dumps(r1.to_dict(), sort_keys=True) == json.dumps(r2.to_dict(), sort_keys=True)


def test_power_desc_evaluation_and_integral():
    d = NonlinearityDesc.power(2.0, 1.5)
    assert d(4.0) == pytest.approx(16.0)
    assert d.power_integral(2.0) == pytest.approx(2.0 * 2**2.5 / 2.5)
    assert d.log_value(math.log(4.0)) == pytest.approx(math.log(16.0))


def test_tabulated_matches_power_and_extends_with_tail():
    xs = np.r_[0.0, np.geomspace(1e-3, 10, 60)]
    d = NonlinearityDesc.sampled_from(lambda t: t**1.5, xs, 1.5)
    assert d(3.3) == pytest.approx(3.3**1.5, rel=1e-4)
    assert d(100.0) == pytest.approx(1000.0, rel=1e-12)
    assert d.power_integral(5.0) == pytest.approx(5.0**2.5 / 2.5, rel=1e-5)
    assert d.power_integral(50.0) == pytest.approx(50.0**2.5 / 2.5, rel=1e-5)
    assert d.power_integral(2.0, q=-0.5) == pytest.approx(2.0**2 / 2, rel=1e-5)


def test_scaled_descriptor():
    d = NonlinearityDesc.power(1.0, 2.0).scaled(3.0, 2.0)
    assert d(1.0) == pytest.approx(18.0)
    t = NonlinearityDesc.tabulated([0, 1, 2], [0, 1, 4], 2.0).scaled(2.0, 1.0)
    assert t(0.5) == pytest.approx(1.0)


def test_initial_data_guard():
    with pytest.raises(SpecError):
        require_initial(InitialData(1.0, 1e-13))
    with pytest.raises(SpecError):
        require_initial(InitialData(-1.0, 1.0))
    require_initial(InitialData(1e-6, 1e-6))


def test_json_roundtrip(tmp_path):
    doc = {"N": 4, "a": 1, "b": 0.5, "p": 0.5, "s": 1, "domain": {"ball": 2.0}, "u0": 2, "v0": 3}
    spec, init = problem_from_dict(doc)
    assert spec.R == 2.0 and spec.N == 4 and init == InitialData(2.0, 3.0)
    path = tmp_path / "p.json"
    path.write_text(json.dumps(problem_to_dict(spec, init)))
    assert load_problem(path) == (spec, init)
    spec, _ = problem_from_dict({"p": 1, "s": 2, "domain": "entire"})
    assert isinstance(spec.domain, EntireSpace)


@pytest.mark.parametrize("doc", [
    {"p": 1, "extra": 3},
    {"domain": "torus"},
    {"domain": {"ball": 1, "x": 2}},
    {"p": "abc"},
])
def test_json_rejects(doc):
    with pytest.raises(SpecError):
        problem_from_dict(doc)
