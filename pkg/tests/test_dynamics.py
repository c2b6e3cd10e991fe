"""Tests for the Hamiltonian dynamics on level sets of the potential.

The unperturbed field generates rigid rotation with period exactly 2 pi on
every level, so orbit metrics have closed references: the implicit-midpoint
period is 2 pi (1 + h^2/12) + O(h^4), the circle at |z| = 1 (n = 1) has
metric length sqrt(2) pi and enclosed area 2 pi phi(0).  Perturbed-orbit
values were frozen from converged runs of the shooting iteration.
"""

import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from solitonlab import dynamics
from solitonlab.profile import SolitonProfile

TWO_PI = 2.0 * math.pi
LOG2 = math.log(2.0)

# frozen shooting results for H = f + eps * x_1 (n = 1, seed at |z| = 1)
SHOT_PERIOD_EPS_5E2 = 6.291496074853922
SHOT_LENGTH_EPS_5E2 = 4.553447570618019


def test_field_is_rotation_of_euler_field():
    # V_f = J z exactly, for every n and radius
    for n in (1, 2, 3):
        profile = SolitonProfile(n)
        rng = np.random.default_rng(3 + n)
        p = rng.normal(size=2 * n)
        v = dynamics.hamiltonian_field(profile, None, p)
        assert np.allclose(v, dynamics.apply_J(p), atol=1e-14)


def test_field_dual_route_through_linear_system():
    # solving omega(V, .) = -df must reproduce the closed-form field
    for n in (1, 2, 3):
        profile = SolitonProfile(n)
        rng = np.random.default_rng(17 + n)
        p = rng.normal(size=2 * n)
        direct = dynamics.hamiltonian_field(profile, None, p)
        linear = dynamics.field_from_form(profile, dynamics.grad_f_real(profile, p), p)
        assert np.max(np.abs(direct - linear)) < 1e-12


def test_primitive_pairing_reproduces_phi():
    for n in (1, 2):
        profile = SolitonProfile(n)
        for t in (-1.0, 0.0, 2.0):
            p = dynamics.radial_seed(profile, t)
            v = dynamics.hamiltonian_field(profile, None, p)
            assert dynamics.primitive_pairing(profile, p, v) == pytest.approx(
                profile.solve_phi(t), rel=1e-12)


def test_orbit_closes_with_midpoint_period_defect():
    profile = SolitonProfile(1)
    seed = dynamics.radial_seed(profile, 0.0)
    h = 1e-3
    orbit = dynamics.integrate_orbit(profile, None, seed, step=h)
    assert orbit.status == "closed"
    assert orbit.closure_error < 1e-12
    assert orbit.energy_drift < 1e-12
    # implicit midpoint on a circle: discrete period 2 pi (1 + h^2/12)
    assert orbit.period == pytest.approx(TWO_PI * (1.0 + h * h / 12.0), abs=1e-8)
    assert orbit.level == pytest.approx(LOG2, rel=1e-12)


def test_orbit_metrics_match_closed_forms():
    profile = SolitonProfile(1)
    orbit = dynamics.integrate_orbit(profile, None,
                                     dynamics.radial_seed(profile, 0.0), step=1e-3)
    # circle |z| = 1: length 2 pi sqrt(phi'), area 2 pi phi; the trapezoid
    # over the discrete orbit is accurate to the h^2/12 parameter defect
    _, phi1, _ = profile.phi_derivatives(0.0)
    assert orbit.g_length == pytest.approx(TWO_PI * math.sqrt(phi1), rel=1e-6)
    assert orbit.g_length == pytest.approx(math.sqrt(2.0) * math.pi, rel=1e-6)
    assert orbit.action == pytest.approx(TWO_PI * LOG2, rel=1e-6)


def test_orbit_period_is_level_independent():
    profile = SolitonProfile(2)
    periods = []
    for t in (-2.0, 0.0, 1.0):
        orbit = dynamics.integrate_orbit(profile, None,
                                         dynamics.radial_seed(profile, t), step=1e-3)
        assert orbit.status == "closed"
        periods.append(orbit.period)
    assert max(periods) - min(periods) < 1e-10


def test_level_to_t_roundtrip():
    profile = SolitonProfile(2)
    for lev in (0.1, 0.5, 1.7):
        t = dynamics.level_to_t(profile, lev)
        f, _ = profile.potential(t)
        assert f == pytest.approx(lev, abs=1e-11)
    with pytest.raises(ValueError):
        dynamics.level_to_t(profile, -0.5)


def test_scan_levels_reports_orbits_and_errors():
    profile = SolitonProfile(1)
    entries = dynamics.scan_levels_for_orbits(profile, None, [0.2, LOG2], step=1e-3)
    for entry in entries:
        assert entry["error"] is None
        orbit = entry["orbit"]
        assert orbit.status == "closed"
        assert orbit.period == pytest.approx(TWO_PI, abs=1e-5)
    bad = dynamics.scan_levels_for_orbits(profile, None, [-1.0], step=1e-3)
    assert bad[0]["orbit"] is None
    assert bad[0]["error"] is not None


def test_scan_plateau_levels_give_constant_orbits():
    ramp = dynamics.make_plateau_hamiltonian(1, LOG2, 5.0)
    entries = dynamics.scan_levels_for_orbits(SolitonProfile(1), ramp,
                                              [0.0, ramp.plateau], step=1e-3)
    for entry in entries:
        orbit = entry["orbit"]
        assert orbit is not None
        # chi' = 0 there: the seed does not move
        assert orbit.status == "constant"
        assert orbit.period == 0.0
        assert orbit.g_length == 0.0


def test_shooting_unperturbed_converges_immediately():
    profile = SolitonProfile(1)
    seed = dynamics.radial_seed(profile, 0.0)
    H = dynamics.PerturbedHamiltonian(profile, 0.0, np.array([1.0, 0.0]))
    res = dynamics.shoot_periodic(profile, H, seed, TWO_PI, step=5e-3)
    assert res.status == "closed"
    assert res.iterations <= 2
    assert float(np.linalg.norm(res.seed)) == pytest.approx(1.0, abs=1e-10)
    assert res.period == pytest.approx(TWO_PI, abs=1e-4)


def test_shooting_tracks_perturbed_orbit():
    profile = SolitonProfile(1)
    seed = dynamics.radial_seed(profile, 0.0)
    H = dynamics.PerturbedHamiltonian(profile, 5e-2, np.array([1.0, 0.0]))
    res = dynamics.shoot_periodic(profile, H, seed, TWO_PI, step=5e-3)
    assert res.status == "closed"
    assert res.closure_error < 1e-10
    # stays on the nearby orbit (level pinning prevents the jump to the
    # near-constant orbit at the perturbed critical point)
    assert float(np.linalg.norm(res.seed)) == pytest.approx(1.0, abs=1e-8)
    assert res.period == pytest.approx(SHOT_PERIOD_EPS_5E2, abs=1e-9)
    assert res.g_length == pytest.approx(SHOT_LENGTH_EPS_5E2, abs=1e-9)


def test_shooting_perturbation_continuity():
    # eps -> 0 recovers the unperturbed period quadratically
    profile = SolitonProfile(1)
    seed = dynamics.radial_seed(profile, 0.0)
    gaps = []
    for eps in (2e-2, 4e-2):
        H = dynamics.PerturbedHamiltonian(profile, eps, np.array([1.0, 0.0]))
        res = dynamics.shoot_periodic(profile, H, seed, TWO_PI, step=5e-3)
        assert res.status == "closed"
        gaps.append(abs(res.period - TWO_PI * (1.0 + 25e-6 / 12.0)))
    assert 3.0 < gaps[1] / gaps[0] < 5.0


def test_ramp_plateau_value_is_exact():
    ramp = dynamics.make_plateau_hamiltonian(2, 1.3, 4.0)
    assert ramp.plateau == ramp.max_slope * (ramp.f_outer - ramp.f_inner
                                             - ramp.ramp_width)
    assert ramp.value(ramp.f_outer + 0.1) == ramp.plateau
    assert ramp.value(ramp.f_inner * 0.5) == 0.0


def test_admissibility_conditions():
    ok = dynamics.check_admissible(dynamics.make_plateau_hamiltonian(1, LOG2, 5.0))
    assert ok.admissible
    assert all(ok.conditions.values())
    assert ok.measured_max_slope == pytest.approx(5.0, rel=1e-6)
    assert ok.lower_bound == pytest.approx(
        5.0 * LOG2 * (1.0 - 2 * 0.01 - 0.01), rel=1e-12)

    fast = dynamics.check_admissible(dynamics.make_plateau_hamiltonian(1, LOG2, 7.0))
    assert not fast.admissible
    assert not fast.conditions["d_no_fast_periodic_orbit"]
    assert fast.lower_bound == 0.0


def test_admissibility_threshold_is_two_pi():
    thr = dynamics.admissibility_threshold(1, LOG2)
    assert thr == pytest.approx(TWO_PI, abs=1e-5)


def test_make_plateau_validation():
    with pytest.raises(ValueError):
        dynamics.make_plateau_hamiltonian(1, -0.5, 5.0)
    with pytest.raises(ValueError):
        dynamics.make_plateau_hamiltonian(1, 1.0, 5.0, inner_margin=0.5,
                                          width_fraction=0.2)


@settings(max_examples=60, deadline=None)
@given(s=st.floats(min_value=0.0, max_value=1.0),
       slope=st.floats(min_value=0.5, max_value=6.0))
def test_property_ramp_is_monotone_and_pinched(s, slope):
    ramp = dynamics.make_plateau_hamiltonian(1, LOG2, slope)
    v = ramp.value(s)
    assert 0.0 <= v <= ramp.plateau
    assert ramp.value(s + 1e-3) >= v - 1e-15
    assert 0.0 <= ramp.slope(s) <= slope * (1.0 + 1e-12)
