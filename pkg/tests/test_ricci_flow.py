"""Tests for the reduced parabolic flow of the radial profile.

Two exact references pin the scheme: the flat profile phi = e^t is a fixed
point of both the continuous equation and the discrete step (including the
boundary rows), and the soliton profile is a unit-speed traveling wave, so
the instantaneous right-hand side evaluated on it must equal -phi_t up to
the O(h^2) error of the centered differences.
"""

import math

import numpy as np
import pytest

from solitonlab import ricci_flow
from solitonlab.profile import SolitonProfile, SolverError


def test_flat_profile_is_discrete_fixed_point():
    state = ricci_flow.flat_state(1, -12.0, 12.0, 481)
    evolved, _ = ricci_flow.evolve(state, 0.05, 20)
    drift = float(np.max(np.abs(evolved.phi - state.phi)))
    assert drift < 1e-10
    assert evolved.tau == pytest.approx(1.0, rel=1e-12)


def test_flat_fixed_point_other_dimension():
    state = ricci_flow.flat_state(3, -8.0, 8.0, 241)
    evolved, _ = ricci_flow.evolve(state, 0.1, 10)
    assert float(np.max(np.abs(evolved.phi - state.phi))) < 1e-10


def test_rhs_on_soliton_is_minus_transport():
    # traveling wave: d(phi)/d(tau) = -phi_t on the exact profile
    profile = SolitonProfile(2)
    state = ricci_flow.soliton_state(profile, -12.0, 12.0, 481)
    rhs = ricci_flow.reduced_rhs(state)
    i0 = int(np.argmin(np.abs(state.t_grid)))
    _, phi1, _ = profile.phi_derivatives(0.0)
    assert rhs[i0 - 1] == pytest.approx(-phi1, abs=1e-4)


def test_soliton_defect_is_second_order():
    profile = SolitonProfile(2)
    coarse = ricci_flow.soliton_defect(
        ricci_flow.soliton_state(profile, -12.0, 12.0, 481))
    fine = ricci_flow.soliton_defect(
        ricci_flow.soliton_state(profile, -12.0, 12.0, 961))
    assert coarse < 5e-4
    assert coarse / fine == pytest.approx(4.0, abs=0.2)


def test_soliton_translates_at_unit_speed():
    profile = SolitonProfile(2)
    state = ricci_flow.soliton_state(profile, -12.0, 12.0, 601)
    h = state.spacing
    tau_end = 0.25
    steps = int(math.ceil(tau_end / (0.1 * h * h)))
    evolved, _ = ricci_flow.evolve(state, tau_end / steps, steps)
    shift, sup_err = ricci_flow.soliton_deviation(evolved)
    assert shift == pytest.approx(tau_end, abs=1e-3)
    assert sup_err < 1e-4


def test_deviation_of_unevolved_soliton_is_zero_shift():
    profile = SolitonProfile(2)
    state = ricci_flow.soliton_state(profile, -10.0, 10.0, 401)
    shift, sup_err = ricci_flow.soliton_deviation(state)
    assert abs(shift) < 1e-6
    assert sup_err < 1e-10


def test_snapshots_include_initial_and_final():
    state = ricci_flow.flat_state(1, -6.0, 6.0, 121)
    _, snaps = ricci_flow.evolve(state, 0.01, 20, snapshot_every=5)
    assert len(snaps) == 5
    assert snaps[0][0] == 0.0
    assert snaps[-1][0] == pytest.approx(0.2, rel=1e-12)
    none_state, none_snaps = ricci_flow.evolve(state, 0.01, 3)
    assert none_snaps == []


def test_boundary_anchor_survives_evolution():
    profile = SolitonProfile(2)
    state = ricci_flow.soliton_state(profile, -10.0, 10.0, 401)
    evolved, _ = ricci_flow.evolve(state, 0.01, 10)
    assert evolved.w_left_initial == state.w_left_initial
    # Dirichlet value actually descended at the recorded speed
    expected_left = math.exp(state.w_left_initial - state.c_left * evolved.tau)
    assert evolved.phi[0] == pytest.approx(expected_left, rel=1e-12)


def test_state_validation():
    with pytest.raises(ValueError):
        ricci_flow.FlowState(n=1, t_grid=np.array([0.0, 1.0, 2.0]),
                             phi=np.array([1.0, 2.0, 3.0]))
    with pytest.raises(ValueError):
        ricci_flow.FlowState(n=1, t_grid=np.array([0.0, 0.5, 2.0, 3.0, 4.0]),
                             phi=np.ones(5))
    with pytest.raises(SolverError):
        ricci_flow.FlowState(n=1, t_grid=np.linspace(0.0, 1.0, 5),
                             phi=np.array([1.0, 1.0, -1.0, 1.0, 1.0]))
    state = ricci_flow.flat_state(1, -6.0, 6.0, 121)
    with pytest.raises(ValueError):
        ricci_flow.evolve(state, -0.1, 5)
    with pytest.raises(ValueError):
        ricci_flow.evolve(state, 0.1, -5)


def test_monotonicity_fault_is_a_named_solver_error():
    t = np.linspace(-1.0, 1.0, 41)
    phi = 1.0 + 0.1 * np.cos(4.0 * t)       # not monotone
    state = ricci_flow.state_from_values(1, t, phi)
    with pytest.raises(SolverError, match="monotonicity"):
        ricci_flow.reduced_rhs(state)
    with pytest.raises(SolverError, match="monotonicity"):
        ricci_flow.evolve(state, 0.01, 3)


def test_aggressive_left_boundary_faults_cleanly():
    # draining the left Dirichlet value fast enough breaks phi_t > 0
    state = ricci_flow.flat_state(1, -12.0, 12.0, 481)
    bad = ricci_flow.state_from_values(1, state.t_grid, state.phi,
                                       c_left=-50.0, g_right=state.g_right)
    with pytest.raises(SolverError, match="monotonicity"):
        ricci_flow.evolve(bad, 0.05, 40)


def test_custom_state_measures_right_slope():
    t = np.linspace(-2.0, 2.0, 321)
    state = ricci_flow.state_from_values(1, t, np.exp(t))
    # one-sided 3-point slope: error (h^2/3) phi''' ~ 5e-5 relative here
    assert state.g_right == pytest.approx(math.exp(2.0), rel=2e-4)
