import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from radialblowup.errors import StiffnessError
from radialblowup.ode import dopri54


def test_exponential_decay():
    res = dopri54(lambda t, y: -y, 0.0, [1.0], 5.0, rtol=1e-10, atol=1e-14)
    assert res.t[-1] == 5.0
    assert res.y[-1, 0] == pytest.approx(math.exp(-5.0), rel=1e-8)


def test_harmonic_oscillator_backward():
    f = lambda t, y: np.array([y[1], -y[0]])
    res = dopri54(f, 0.0, [0.0, 1.0], -3.0, rtol=1e-10, atol=1e-12)
    assert res.y[-1, 0] == pytest.approx(math.sin(-3.0), abs=1e-8)


def test_lands_on_eval_points():
    grid = [0.5, 1.0, 1.7]
    res = dopri54(lambda t, y: y, 0.0, [1.0], 2.0, t_eval=grid, rtol=1e-10)
    t, y = res.at_marks()
    assert np.array_equal(t, grid)
    assert np.allclose(y[:, 0], np.exp(grid), rtol=1e-8)


def test_callback_stops():
    res = dopri54(lambda t, y: y, 0.0, [1.0], 10.0, callback=lambda t, y: y[0] > 100.0)
    assert res.stopped
    assert res.y[-1, 0] > 100.0 and res.t[-1] < 10.0


def test_step_cap_respected():
    res = dopri54(lambda t, y: -y, 0.0, [1.0], 1.0, step_cap=lambda t, y: 0.01)
    assert np.max(np.diff(res.t)) <= 0.01 + 1e-15


def test_finite_time_singularity_raises():
    # y' = y^2 blows up at t = 1
    with pytest.raises(StiffnessError):
        dopri54(lambda t, y: y**2, 0.0, [1.0], 2.0, max_steps=5000)


@settings(max_examples=25, deadline=None)
@given(lam=st.floats(-3, 3), t1=st.floats(0.1, 4))
def test_linear_scalar_accuracy(lam, t1):
    res = dopri54(lambda t, y: lam * y, 0.0, [1.0], t1, rtol=1e-10, atol=1e-13)
    assert res.y[-1, 0] == pytest.approx(math.exp(lam * t1), rel=1e-7)
