"""Lipschitz domains: membership, boundary distance, minimizers, patch atlases.

Oracles: geodesic-ball distances are |dist to center - r| in closed form; the
corner-domain core value at ztilde = (0, -0.1-0.1i) was derived by hand from
arcsin(|ztilde_n| / sqrt(|ztilde|^2 + 1)) and frozen; atlas answers are checked
against the closed forms they must reproduce.
"""

import numpy as np
import numpy.testing as npt
import pytest

from projpsh import domains as dom
from projpsh import geometry as geo

AXIS = np.array([1.0, 0.0, 0.0], dtype=complex)
SIDE = np.array([0.0, 1.0, 0.0], dtype=complex)


def _chartpt(*zt):
    return geo.chart_point(np.array(zt, dtype=complex))


def _fd_directional(domain, z, u, h=1e-5):
    """One-sided forward difference of delta along the unit tangent u."""
    step = geo.normalize(geo.exp_arrays(z.rep, u.vec / u.norm, h))
    return (domain.delta(step) - domain.delta(z)) / h


# ---------------------------------------------------------------------------
# membership


class TestMembership:
    def test_ball_radial(self, ball):
        assert ball.contains(ball.center)
        inside = geo.normalize(geo.exp_arrays(ball.center.rep, AXIS, 0.69))
        outside = geo.normalize(geo.exp_arrays(ball.center.rep, AXIS, 0.71))
        assert ball.contains(inside)
        assert not ball.contains(outside)

    def test_ball_membership_flips_across_boundary(self, ball, rng):
        dirs = dom._sphere_directions(rng, ball.center, 64)
        just_in = geo.exp_arrays(ball.center.rep, dirs, ball.r - 1e-6)
        just_out = geo.exp_arrays(ball.center.rep, dirs, ball.r + 1e-6)
        assert ball.contains_arrays(just_in).all()
        assert not ball.contains_arrays(just_out).any()

    def test_lens_axis(self, lens):
        mid = geo.normalize(geo.exp_arrays(lens.c1.rep, AXIS, 0.375))
        assert lens.contains(mid)
        # inside ball 1 only: behind c1, away from c2
        behind = geo.normalize(geo.exp_arrays(lens.c1.rep, AXIS, -0.3))
        assert not lens.contains(behind)
        assert not lens.contains(lens.c2) or lens.r1 > 0.75

    def test_quarter_truth_table(self, quarter):
        cases = [
            ((0, -0.5 - 0.5j), True),   # third quadrant of the last coordinate
            ((0, -0.5 + 0.5j), True),   # Re < 0 suffices
            ((0, 0.5 - 0.5j), True),    # Im < 0 suffices
            ((0, 0.5 + 0.5j), False),   # removed closed quadrant
            ((0, 0.0), False),          # corner edge is boundary
            ((0, 0.3), False),          # positive real ray is boundary
            ((0, 0.3j), False),         # positive imaginary ray is boundary
            ((0, 0.3 - 1e-3j), True),   # just below the real ray
            ((0, -2.0), False),         # outside the chart unit ball
            ((0.9, -0.5), False),       # outside the chart unit ball
            ((0.3 + 0.2j, -0.1 - 0.1j), True),
        ]
        for zt, expected in cases:
            assert quarter.contains(_chartpt(*zt)) is expected, zt

    def test_quarter_excludes_infinity(self, quarter):
        far = geo.ProjPoint(np.array([1.0, 0.0, 0.0], dtype=complex))
        assert not quarter.contains(far)

    def test_unknown_builtin(self):
        with pytest.raises(dom.DomainError):
            dom.builtin("wedge")


# ---------------------------------------------------------------------------
# boundary distance, closed forms


class TestDelta:
    def test_ball_exact(self, ball, rng):
        pts = ball.sample_interior(rng, 200)
        d = geo.dist_arrays(pts, ball.center.rep)
        npt.assert_allclose(ball.delta_many(pts), ball.r - d, atol=1e-12)

    def test_ball_boundary_vanishes(self, ball, rng):
        pts = ball.sample_boundary(rng, 200)
        npt.assert_allclose(ball.delta_many(pts), 0.0, atol=1e-12)

    def test_lens_boundary_vanishes(self, lens, rng):
        pts = lens.sample_boundary(rng, 200)
        npt.assert_allclose(lens.delta_many(pts), 0.0, atol=1e-9)

    def test_lens_mid_axis_value(self, lens):
        mid = geo.normalize(geo.exp_arrays(lens.c1.rep, AXIS, 0.375))
        assert lens.delta(mid) == pytest.approx(0.175, abs=1e-12)

    def test_quarter_core_hand_value(self, quarter):
        z = _chartpt(0, -0.1 - 0.1j)
        assert quarter.delta(z) == pytest.approx(0.14048970175352035, abs=1e-13)

    def test_quarter_core_formula(self, quarter, rng):
        # inside the core zone delta = arcsin of the last chart coordinate of
        # the unit representative
        zt = 0.12 * (rng.random((50, 2)) + 1j * rng.random((50, 2))) + np.array(
            [0.01 + 0.01j, -0.15 - 0.15j]
        )
        reps = geo.chart_lift_arrays(zt)
        assert quarter.core_zone(reps).all()
        expected = np.arcsin(np.abs(reps[:, -2]) / geo.vnorm(reps))
        npt.assert_allclose(quarter.delta_many(reps), expected, atol=1e-12)

    def test_sup_delta_below_half_pi(self, ball, lens, quarter, rng):
        for domain in (ball, lens):
            vals = domain.delta_many(domain.sample_interior(rng, 400))
            assert np.all(vals >= 0)
            assert np.max(vals) < geo.HALF_PI
        zt = 0.25 * (rng.random((200, 2)) + 1j * rng.random((200, 2))) - (
            0.27 + 0.27j
        )
        reps = geo.chart_lift_arrays(zt)
        reps = reps[quarter.core_zone(reps)]
        assert reps.shape[0] >= 50
        vals = quarter.delta_many(reps)
        assert np.all(vals >= 0)
        assert np.max(vals) < geo.HALF_PI

    def test_lipschitz_one_sampled(self, ball, lens, quarter, rng):
        # |delta(z) - delta(w)| <= dist(z, w) over sampled pairs
        for domain in (ball, lens):
            pts = domain.sample_interior(rng, 20_000)
            half = pts.shape[0] // 2
            a, b = pts[:half], pts[half : 2 * half]
            gap = np.abs(domain.delta_many(a) - domain.delta_many(b))
            npt.assert_array_less(gap, geo.dist_arrays(a, b) + 1e-10)
        zt = 0.25 * (rng.random((4000, 2)) + 1j * rng.random((4000, 2))) - (
            0.27 + 0.27j
        )
        reps = geo.chart_lift_arrays(zt)
        reps = reps[quarter.core_zone(reps)]
        assert reps.shape[0] >= 1000
        half = reps.shape[0] // 2
        a, b = reps[:half], reps[half : 2 * half]
        gap = np.abs(quarter.delta_many(a) - quarter.delta_many(b))
        npt.assert_array_less(gap, geo.dist_arrays(a, b) + 1e-10)


# ---------------------------------------------------------------------------
# patch atlases


class TestAtlas:
    def test_ball_atlas_covers_boundary(self, ball, rng):
        centers = np.stack([p.center.rep for p in ball.atlas])
        radii = np.array([p.radius for p in ball.atlas])
        probes = ball.sample_boundary(rng, 500)
        d = geo.dist_arrays(probes[:, None, :], centers[None, :, :])
        assert np.all((d < dom.COVER_FRACTION * radii[None, :]).any(axis=1))

    def test_ball_patch_graph_matches_membership(self, ball, rng):
        # fresh samples, not the ones used during construction
        for patch in ball.atlas[:2]:
            assert dom._validate_patch(patch, patch.center, rng, 4000, guard=1e-7)

    def test_quarter_patch_graph_matches_membership(self, quarter, rng):
        for patch in quarter.atlas[:2]:
            assert dom._validate_patch(patch, patch.center, rng, 4000, guard=1e-7)

    def test_patch_centers_on_boundary(self, ball):
        reps = np.stack([p.center.rep for p in ball.atlas[:40]])
        npt.assert_allclose(
            np.abs(geo.dist_arrays(reps, ball.center.rep) - ball.r), 0.0, atol=1e-9
        )

    def test_ball_atlas_delta_matches_exact(self, ball, rng):
        pts = ball.sample_interior(rng, 4)
        for rep in pts:
            z = geo.normalize(rep)
            assert ball.atlas_delta(z) == pytest.approx(ball.delta(z), abs=1e-6)

    def test_quarter_atlas_delta_matches_core_form(self, quarter, rng):
        zt = 0.1 * (rng.random((4, 2)) + 1j * rng.random((4, 2))) + np.array(
            [0.01 + 0.01j, -0.14 - 0.14j]
        )
        reps = geo.chart_lift_arrays(zt)
        assert quarter.core_zone(reps).all()
        for rep in reps:
            z = geo.normalize(rep)
            assert quarter.atlas_delta(z) == pytest.approx(quarter.delta(z), abs=1e-6)

    def test_quarter_off_core_minimizer_consistency(self, quarter):
        z = geo.normalize(np.array([0.1 + 0.05j, 0.3 - 0.2j, 1.0], dtype=complex))
        assert quarter.contains(z)
        assert not quarter.core_zone(z.rep[None, :])[0]
        mset = quarter.minimizers(z)
        assert len(mset) >= 1
        for p in mset.points:
            gap = abs(float(geo.dist_arrays(z.rep, p.rep)) - mset.value)
            assert gap <= mset.cluster_tol


# ---------------------------------------------------------------------------
# minimizers


class TestMinimizers:
    def test_ball_radial_single(self, ball):
        z = geo.normalize(geo.exp_arrays(ball.center.rep, AXIS, 0.3))
        mset = ball.minimizers(z)
        assert len(mset) == 1
        assert mset.value == pytest.approx(0.4, abs=1e-12)
        expected = geo.normalize(geo.exp_arrays(ball.center.rep, AXIS, ball.r))
        assert geo.dist(mset.points[0], expected) < 1e-10

    def test_ball_center_reports_representatives(self, ball):
        mset = ball.minimizers(ball.center)
        assert len(mset) >= 10
        assert mset.value == pytest.approx(ball.r, abs=1e-9)
        for p in mset.points:
            d = float(geo.dist_arrays(ball.center.rep, p.rep))
            assert abs(d - mset.value) <= mset.cluster_tol

    def test_ball_cut_locus_reports_representatives(self, ball):
        far = geo.ProjPoint(np.array([1.0, 0.0, 0.0], dtype=complex))
        assert geo.dist(far, ball.center) == pytest.approx(geo.HALF_PI, abs=1e-15)
        mset = ball.minimizers(far)
        assert len(mset) >= 10
        assert mset.value == pytest.approx(geo.HALF_PI - ball.r, abs=1e-9)

    def test_lens_mid_axis_two_sheets(self, lens):
        mid = geo.normalize(geo.exp_arrays(lens.c1.rep, AXIS, 0.375))
        mset = lens.minimizers(mid)
        assert len(mset) == 2
        assert mset.value == pytest.approx(0.175, abs=1e-12)
        residuals = sorted(
            abs(float(geo.dist_arrays(p.rep, c.rep)) - r)
            for p in mset.points
            for c, r in ((lens.c1, lens.r1), (lens.c2, lens.r2))
        )
        # each point sits on one of the two spheres
        assert residuals[0] < 1e-10 and residuals[1] < 1e-10

    def test_consistency_randomized(self, ball, lens, quarter, rng):
        for domain in (ball, lens, quarter):
            pts = domain.sample_interior(rng, 40)
            if domain is quarter:
                pts = pts[domain.core_zone(pts)]
            for rep in pts[:12]:
                z = geo.normalize(rep)
                mset = domain.minimizers(z)
                assert mset.value == pytest.approx(domain.delta(z), abs=1e-9)
                for p in mset.points:
                    gap = abs(float(geo.dist_arrays(z.rep, p.rep)) - mset.value)
                    assert gap <= mset.cluster_tol

    def test_nearest_boundary_on_boundary(self, ball, rng):
        z = geo.normalize(ball.sample_interior(rng, 1)[0])
        p = ball.nearest_boundary(z)
        assert ball.delta(p) == pytest.approx(0.0, abs=1e-9)


# ---------------------------------------------------------------------------
# directional derivatives


class TestDirectional:
    def test_ball_radial_inward_is_one(self, ball):
        z = geo.normalize(geo.exp_arrays(ball.center.rep, AXIS, 0.3))
        u = geo.log_map_arrays(z.rep, ball.center.rep)
        u = geo.TangentVec(z, u / geo.vnorm(u))
        assert ball.delta_directional(z, u) == pytest.approx(1.0, abs=1e-10)
        assert _fd_directional(ball, z, u) == pytest.approx(1.0, abs=1e-4)

    def test_ball_level_tangent_vanishes(self, ball):
        z = geo.normalize(geo.exp_arrays(ball.center.rep, AXIS, 0.3))
        u = geo.log_map_arrays(z.rep, ball.center.rep)
        w = geo.TangentVec(z, 1j * u / geo.vnorm(u))
        assert ball.delta_directional(z, w) == pytest.approx(0.0, abs=1e-10)
        assert _fd_directional(ball, z, w) == pytest.approx(0.0, abs=1e-4)

    def test_generic_directions_match_fd(self, ball, quarter, rng):
        z = geo.normalize(geo.exp_arrays(ball.center.rep, 0.6 * AXIS + 0.8 * SIDE, 0.41))
        zq = _chartpt(0.05 - 0.02j, -0.12 - 0.09j)
        for domain, pt in ((ball, z), (quarter, zq)):
            for _ in range(3):
                u = geo.random_tangent(rng, pt)
                u = geo.TangentVec(pt, u.vec / u.norm)
                dd = domain.delta_directional(pt, u)
                assert abs(dd) <= 1.0 + 1e-12
                assert dd == pytest.approx(_fd_directional(domain, pt, u), abs=1e-4)

    def test_lens_two_sheet_kink(self, lens):
        mid = geo.normalize(geo.exp_arrays(lens.c1.rep, AXIS, 0.375))
        u = geo.log_map_arrays(mid.rep, lens.c2.rep)
        u = geo.TangentVec(mid, u / geo.vnorm(u))
        # min of two sheets: the derivative is -1 along the axis both ways
        assert lens.delta_directional(mid, u) == pytest.approx(-1.0, abs=1e-9)
        assert _fd_directional(lens, mid, u) == pytest.approx(-1.0, abs=1e-3)
        w = geo.TangentVec(mid, -u.vec)
        assert lens.delta_directional(mid, w) == pytest.approx(-1.0, abs=1e-9)
        assert _fd_directional(lens, mid, w) == pytest.approx(-1.0, abs=1e-3)
