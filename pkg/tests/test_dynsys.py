import numpy as np
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from radialblowup.dynsys import (CONVERGED_XI2, DynParams, box_violation, char_poly,
                                 charpoly_by_interpolation, check_hirsch_conditions, distance_to,
                                 divergence, equilibria, flow, is_asymptotically_stable, jacobian,
                                 linearization_matrix, omega_limit, origin_limit_W, to_dynamical,
                                 vector_field)
from radialblowup.errors import IneligibleError, SpecError
from radialblowup.model import InitialData, ProblemSpec
from radialblowup.radial_ode import SolverConfig, integrate_radial

PINNED = DynParams(N=3, a=0.0, b=0.0, p=0.5, s=1.0)

subcritical = st.builds(
    lambda N, a, b, p, frac: DynParams(N, a, b, p, max(1.0, frac / p)),
    st.integers(2, 8), st.floats(0, 3), st.floats(0, 3), st.floats(0.05, 0.95), st.floats(0.0, 0.95),
).filter(lambda q: q.ps < 0.99)


def test_pinned_equilibria_and_polynomial():
    xi1, xi2 = equilibria(PINNED)
    assert xi1.point == (0.0, 3.0, 4.0)
    assert xi2.point == (6.0, 6.0, 7.0)
    M = jacobian(PINNED)
    assert char_poly(M, PINNED.ps) == (19.0, 120.0, 126.0)
    rep = is_asymptotically_stable(PINNED)
    assert rep.routh_margin == 19 * 120 - 126
    assert rep.stable
    assert rep.decay_rate == pytest.approx(1.2989, abs=1e-4)


def test_supercritical_has_no_interior_equilibrium():
    with pytest.raises(IneligibleError):
        equilibria(DynParams(p=1.0, s=1.0))
    with pytest.raises(SpecError):
        DynParams(N=1).validate()


@settings(max_examples=200, deadline=None)
@given(q=subcritical)
def test_equilibria_are_zeros(q):
    for eq in equilibria(q):
        x = np.array(eq.point)
        assert np.max(np.abs(vector_field(x, q))) <= 1e-12 * max(1.0, np.max(x)) ** 2


@settings(max_examples=200, deadline=None)
@given(q=subcritical)
def test_jacobian_at_xi2_is_structured(q):
    xi2 = equilibria(q)[1].point
    assert np.allclose(jacobian(q, xi2), linearization_matrix(xi2, q), rtol=1e-12, atol=1e-10)


@settings(max_examples=200, deadline=None)
@given(q=subcritical)
def test_routh_hurwitz_agrees_with_eigenvalues(q):
    rep = is_asymptotically_stable(q)
    assert rep.routh_margin > 0 and rep.stable
    assert np.all(rep.eigenvalues.real < 0)
    coeffs = charpoly_by_interpolation(rep.jacobian)
    assert np.allclose(coeffs, (rep.alpha, rep.beta, rep.constant_term), rtol=1e-10)


@settings(max_examples=50, deadline=None)
@given(q=subcritical, xi=st.tuples(*[st.floats(0.1, 20)] * 3))
def test_finite_difference_jacobian(q, xi):
    x = np.array(xi)
    J = jacobian(q, x)
    eps = 1e-6
    fd = np.column_stack([(vector_field(x + eps * e, q) - vector_field(x - eps * e, q)) / (2 * eps)
                          for e in np.eye(3)])
    assert np.allclose(fd, J, rtol=1e-6, atol=1e-6)


def test_divergence_is_trace():
    x = np.array([1.0, 2.0, 3.0])
    assert divergence(x, PINNED) == pytest.approx(np.trace(jacobian(PINNED, x)))


def test_hirsch_pinned():
    rep = check_hirsch_conditions(PINNED)
    assert rep.cooperative and rep.divergence_condition and rep.div_negative


def test_origin_limit():
    ell = origin_limit_W(PINNED)
    # ℓ - (N-1) = s(N+a) - s(N-1) + b + 1 = 2
    assert ell == pytest.approx(4.0)


def test_flow_converges_to_xi2():
    traj = flow(PINNED, (1.0, 3.0, 4.0), (0.0, 60.0))
    assert omega_limit(traj) == CONVERGED_XI2
    assert distance_to(traj, (6, 6, 7))[-1] < 1e-8


def test_omega_limit_needs_span():
    traj = flow(PINNED, (1.0, 3.0, 4.0), (0.0, 5.0))
    with pytest.raises(SpecError):
        omega_limit(traj)


def test_radial_trajectory_in_box():
    spec = ProblemSpec(N=3, p=0.5, s=1)
    sol = integrate_radial(spec, InitialData(), SolverConfig(r_max=1e5, r_start=1e-10))
    traj = to_dynamical(sol)
    assert box_violation(traj) < 1e-4
    assert omega_limit(traj) == CONVERGED_XI2


@settings(max_examples=30, deadline=None)
@given(q=subcritical, x=st.tuples(*[st.floats(0.1, 10)] * 3),
       d=st.tuples(*[st.floats(0.0, 3)] * 3))
def test_flow_preserves_order(q, x, d):
    assume(sum(d) > 1e-3)
    lo = flow(q, x, (0.0, 5.0), t_eval=np.linspace(0, 5, 11))
    hi = flow(q, np.add(x, d), (0.0, 5.0), t_eval=np.linspace(0, 5, 11))
    assert np.all(hi.xi - lo.xi >= -1e-8 * (1 + np.abs(hi.xi)))


def test_csv(tmp_path):
    traj = flow(PINNED, (1.0, 3.0, 4.0), (0.0, 1.0))
    traj.to_csv(tmp_path / "t.csv")
    assert (tmp_path / "t.csv").read_text().splitlines()[0] == "t,Y,Z,W"
