import math

import pytest

from radialblowup.asymptotics import (CANDIDATE_BD, SWEEP_COLUMNS, predicted_constants, sweep_row,
                                      verify_asymptotics)
from radialblowup.dynsys import DynParams
from radialblowup.errors import IneligibleError
from radialblowup.model import InitialData, ProblemSpec


def test_pinned_predictions():
    pr = predicted_constants(DynParams(3, 0, 0, 0.5, 1))
    assert (pr.A, pr.B, pr.K, pr.D) == (6.0, 6.0, 7.0, 5.0)
    assert pr.v_prefactor == pytest.approx(252.0**-2)
    assert pr.u_prefactor_stated == pytest.approx(1 / 8820)
    assert pr.u_prefactor_consistent == pytest.approx(1 / 7560)
    assert pr.u_exponent == 5.0
    assert pr.u_exponent_alt == pytest.approx(3.0)


def test_u_exponent_is_D_with_weight():
    pr = predicted_constants(DynParams(4, 1.0, 0.0, 0.5, 1.0))
    assert pr.u_exponent == pytest.approx(pr.D)
    assert pr.u_exponent_gap > 0


def test_pinned_rates():
    rep = verify_asymptotics(ProblemSpec(N=3, p=0.5, s=1))
    assert rep.relative_errors["v_exponent"] < 0.01
    assert rep.relative_errors["u_exponent"] < 0.01
    assert rep.relative_errors["v_prefactor"] < 0.02
    assert rep.u_prefactor_winner == CANDIDATE_BD
    assert rep.discrimination > 5
    assert rep.prefactor_identity_error < 0.05


def test_rates_independent_of_data():
    rep = verify_asymptotics(ProblemSpec(N=3, p=0.5, s=1), InitialData(5.0, 2.0))
    assert rep.relative_errors["v_exponent"] < 0.01
    assert rep.u_prefactor_winner == CANDIDATE_BD


def test_weighted_case_picks_D():
    rep = verify_asymptotics(ProblemSpec(N=4, a=1.0, b=0.0, p=0.5, s=1))
    assert rep.relative_errors["u_exponent"] < 0.01
    assert rep.relative_errors["u_exponent_alt"] > 0.05


@pytest.mark.parametrize("spec", [
    ProblemSpec(p=1, s=2),
    ProblemSpec(p=0.5, s=1, g_coef=2.0),
    ProblemSpec(p=1.0, s=0.9 + 0.1),
])
def test_ineligible(spec):
    with pytest.raises(IneligibleError):
        verify_asymptotics(spec)


def test_sweep_row_status():
    row = sweep_row(ProblemSpec(p=1, s=2))
    assert set(row) == set(SWEEP_COLUMNS)
    assert row["status"].startswith("ineligible")
    row = sweep_row(ProblemSpec(N=3, p=0.5, s=1))
    assert row["status"] == "ok" and math.isclose(row["v_exponent_pred"], 6.0)
