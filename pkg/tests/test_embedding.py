"""Tests for the radial symplectic maps into the flat ball and the
capacity bounds built from them.

The map with a given source form is a pullback-exact symplectomorphism, so
the finite-difference Jacobian residual J^T Omega_0 J - Omega_source should
sit at the O(step^2) discretization floor (~1e-10).  For n = 1 the image
radii have closed forms: a(0) = sqrt(2 log 2) for the Kahler source and
a(0) = 1 for the Ricci source (phi'(0) = 1/2 on the cigar).
"""

import math

import numpy as np
import pytest

from solitonlab import embedding
from solitonlab.dynamics import level_to_t
from solitonlab.profile import SolitonProfile

LOG2 = math.log(2.0)

# frozen capacity bounds at level log 2, n = 1 (margin_fraction 1e-3)
CAP_LOWER = 4.337764557401318
CAP_UPPER = 5.167712780049969
CAP_UPPER_SHARP = 4.355172180607204      # 2 pi log 2


def test_image_radius_closed_forms_n1():
    profile = SolitonProfile(1)
    kahler = embedding.build_map(profile, "kahler")
    ricci = embedding.build_map(profile, "ricci")
    assert math.sqrt(kahler.image_radius_sq(0.0)) == pytest.approx(
        math.sqrt(2.0 * LOG2), rel=1e-12)
    assert math.sqrt(ricci.image_radius_sq(0.0)) == pytest.approx(1.0, rel=1e-12)


def test_build_map_rejects_unknown_tag():
    with pytest.raises(ValueError):
        embedding.build_map(SolitonProfile(1), "euclidean")


def test_pullback_residual_at_fd_floor():
    for n in (1, 2):
        profile = SolitonProfile(n)
        points = embedding.sample_sublevel(profile, 200, -6.0, 1.0)
        for tag in ("kahler", "ricci"):
            smap = embedding.build_map(profile, tag)
            worst = embedding.pullback_residual(smap, profile, points)
            assert worst < 1e-7


def test_map_and_inverse_roundtrip():
    profile = SolitonProfile(2)
    smap = embedding.build_map(profile, "kahler")
    points = embedding.sample_sublevel(profile, 50, -4.0, 0.0)
    for p in points:
        q = smap.map_point(p)
        back = smap.inverse_point(q)
        assert np.max(np.abs(back - p)) < 1e-10
        # the map is radius-to-radius: directions are preserved
        assert abs(float(np.dot(p, q)) - np.linalg.norm(p) * np.linalg.norm(q)) < 1e-12


def test_inverse_rejects_points_outside_image_ball():
    # only the Ricci-source image is a bounded ball (radius sqrt(2n));
    # the Kahler-source map exhausts C^n and must invert anywhere
    profile = SolitonProfile(2)
    ricci = embedding.build_map(profile, "ricci")
    with pytest.raises(ValueError):
        ricci.inverse_point(np.array([10.0, 0.0, 0.0, 0.0]))
    kahler = embedding.build_map(profile, "kahler")
    far = np.array([10.0, 0.0, 0.0, 0.0])
    assert np.max(np.abs(kahler.map_point(kahler.inverse_point(far)) - far)) < 1e-9


def test_composition_carries_kahler_ball_to_ricci_chart():
    profile = SolitonProfile(1)
    t_c = level_to_t(profile, 0.5)
    points = embedding.sample_sublevel(profile, 100, -6.0, t_c - 1e-6)
    worst = embedding.composition_residual(profile, 0.5, points)
    assert worst < 1e-7
    with pytest.raises(ValueError):
        embedding.composition_residual(profile, 1.5, points)
    with pytest.raises(ValueError):
        embedding.composition_residual(profile, 0.5, [np.array([5.0, 0.0])])


def test_sample_sublevel_is_deterministic():
    profile = SolitonProfile(2)
    a = embedding.sample_sublevel(profile, 32, -5.0, 0.5)
    b = embedding.sample_sublevel(profile, 32, -5.0, 0.5)
    assert np.array_equal(a, b)
    assert a.shape == (32, 4)


def test_capacity_bounds_at_log2():
    bounds = embedding.capacity_bounds(SolitonProfile(1), LOG2)
    assert bounds.lower == pytest.approx(CAP_LOWER, rel=1e-12)
    assert bounds.upper == pytest.approx(CAP_UPPER, rel=1e-10)
    assert bounds.upper_sharp == pytest.approx(CAP_UPPER_SHARP, rel=1e-12)
    assert bounds.upper_sharp == pytest.approx(2.0 * math.pi * LOG2, rel=1e-12)
    assert bounds.admissible
    # ordering: ramp lower bound < sharp Gromov-type value < volume bound
    assert bounds.lower < bounds.upper_sharp < bounds.upper
    # the ramp construction approaches 2 pi c from below as margins shrink
    assert bounds.lower / (2.0 * math.pi * LOG2) == pytest.approx(1.0, abs=5e-3)


def test_capacity_bounds_scale_with_level():
    profile = SolitonProfile(1)
    small = embedding.capacity_bounds(profile, 0.3)
    large = embedding.capacity_bounds(profile, 0.9)
    assert small.upper_sharp < large.upper_sharp
    assert small.lower < large.lower
    with pytest.raises(ValueError):
        embedding.capacity_bounds(profile, 0.0)


def test_capacity_lower_tracks_margin():
    profile = SolitonProfile(1)
    loose = embedding.capacity_bounds(profile, LOG2, margin_fraction=1e-2)
    tight = embedding.capacity_bounds(profile, LOG2, margin_fraction=1e-4)
    assert loose.lower < tight.lower < 2.0 * math.pi * LOG2
