"""Potential/isometry pair: exact identities, curvature oracle, Taylor orders."""

import numpy as np
import numpy.testing as npt
import pytest

from projpsh import geometry as geo
from projpsh import potential as pot


def _pt(*coords):
    return geo.normalize(np.array(coords, dtype=complex))


@pytest.fixture
def kp(rng):
    p, q = geo.random_pair(rng, 2, dmin=0.4, dmax=1.1)
    return pot.KahlerPotential.from_points(p, q)


class TestHandValues:
    def test_symmetric_point(self):
        """Point equidistant from both eigenlines: mu = (log 2)/2 exactly."""
        kp = pot.KahlerPotential.from_points(_pt(1, 0, 0), _pt(1, 1, 0))
        z = _pt(1, 0, 1)
        assert kp.mu(z) == pytest.approx(np.log(2) / 2, abs=1e-14)
        assert kp.dist_to_geodesic_arrays(z.rep) == pytest.approx(np.pi / 4, abs=1e-14)
        # and it saturates the log-sec lower bound
        assert kp.mu(z) == pytest.approx(np.log(1 / np.cos(np.pi / 4)), abs=1e-14)


class TestExactIdentities:
    def test_zero_on_geodesic(self, kp):
        for t in (-1.0, 0.0, 0.3, kp.frame.d, 2.9):
            z = kp.frame.point_at(t)
            assert abs(kp.mu_arrays(z)) < 1e-14

    def test_gradient_zero_on_geodesic(self, rng, kp):
        """mu vanishes to second order on the geodesic."""
        z = geo.normalize(kp.frame.point_at(0.4))
        for _ in range(5):
            u = geo.random_tangent(rng, z)
            fd = geo.fd_directional(lambda w: float(kp.mu_arrays(w.rep)), z, u, h=1e-6)
            assert abs(fd) < 1e-5

    def test_isometry_translates_geodesic(self, kp):
        for s, t in ((0.0, 0.7), (0.5, -0.2), (1.1, 2.0)):
            moved = kp.isometry_arrays(t, kp.frame.point_at(s))
            npt.assert_allclose(moved, kp.frame.point_at(s + t), atol=1e-14)

    def test_isometry_matrix_unitary_and_matches(self, rng, kp):
        t = 0.83
        m = kp.isometry_matrix(t)
        npt.assert_allclose(m @ m.conj().T, np.eye(3), atol=1e-14)
        z = geo.random_point(rng, 2)
        npt.assert_allclose(m @ z.rep, kp.isometry_arrays(t, z.rep), atol=1e-14)

    def test_isometry_group_law(self, rng, kp):
        z = geo.random_point(rng, 2)
        a = kp.isometry_arrays(0.4, kp.isometry_arrays(0.3, z.rep))
        npt.assert_allclose(a, kp.isometry_arrays(0.7, z.rep), atol=1e-14)

    def test_mu_invariant_under_flow(self, rng, kp):
        for _ in range(10):
            z = geo.random_point(rng, 2)
            if not kp.contains(z.rep):
                continue
            for t in (0.3, -1.2, 2.5):
                moved = kp.isometry_arrays(t, z.rep)
                assert kp.mu_arrays(moved) == pytest.approx(float(kp.mu_arrays(z.rep)), abs=1e-13)

    def test_mu_invariant_under_base_slide(self, rng, kp):
        """Rebasing the frame anywhere along the same geodesic keeps mu."""
        p2 = geo.normalize(kp.frame.point_at(0.9))
        q2 = geo.normalize(kp.frame.point_at(1.5))
        kp2 = pot.KahlerPotential.from_points(p2, q2)
        for _ in range(10):
            z = geo.random_point(rng, 2)
            assert kp2.mu_arrays(z.rep) == pytest.approx(float(kp.mu_arrays(z.rep)), abs=1e-12)

    def test_mu_unitary_invariance(self, rng, kp):
        u = geo.random_unitary(rng, 3)
        p2 = geo.normalize(u @ kp.frame.p.rep)
        q2 = geo.normalize(u @ kp.frame.q.rep)
        kp2 = pot.KahlerPotential.from_points(p2, q2)
        z = geo.random_point(rng, 2)
        assert kp2.mu_arrays(u @ z.rep) == pytest.approx(float(kp.mu_arrays(z.rep)), abs=1e-12)


class TestLowerBound:
    def test_log_sec_bound(self, rng, kp):
        hits = 0
        for _ in range(200):
            z = geo.random_point(rng, 2)
            if not kp.contains(z.rep):
                continue
            dg = float(kp.dist_to_geodesic_arrays(z.rep))
            if dg < geo.HALF_PI - 1e-6:
                assert float(kp.mu_arrays(z.rep)) >= np.log(1 / np.cos(dg)) - 1e-12
                hits += 1
        assert hits > 50

    def test_nonnegative(self, rng, kp):
        for _ in range(100):
            z = geo.random_point(rng, 2)
            if kp.contains(z.rep):
                assert float(kp.mu_arrays(z.rep)) >= -1e-14


class TestCurvature:
    def test_complex_hessian_is_fubini_study(self, rng, kp):
        """FD complex Hessian of mu in a chart equals the metric's Hessian."""
        checked = 0
        while checked < 3:
            zt = 0.6 * (rng.standard_normal(2) + 1j * rng.standard_normal(2))
            z = geo.chart_point(zt)
            if kp.domain_margin(z.rep) < 0.3:
                continue
            f = lambda w: float(kp.mu_arrays(geo.chart_lift_arrays(w)))
            fd = pot.complex_hessian_fd(f, zt, h=1e-3)
            npt.assert_allclose(fd, pot.fs_chart_hessian(zt), atol=5e-6)
            checked += 1

    def test_fs_chart_hessian_matches_norm(self, rng):
        """2 wbar^T H w is the squared chart metric norm, exactly."""
        zt = rng.standard_normal(3) + 1j * rng.standard_normal(3)
        w = rng.standard_normal(3) + 1j * rng.standard_normal(3)
        quad = 2 * np.real(w @ pot.fs_chart_hessian(zt) @ np.conj(w))
        assert quad == pytest.approx(float(geo.chart_metric_norm2(zt, w)), rel=1e-12)


def _perturbed_mu(p, q, z, u_p, u_q, s):
    p2 = geo.normalize(geo.exp_arrays(p.rep, u_p.vec / u_p.norm, s * u_p.norm))
    q2 = geo.normalize(geo.exp_arrays(q.rep, u_q.vec / u_q.norm, s * u_q.norm))
    return float(pot.KahlerPotential.from_points(p2, q2).mu_arrays(z.rep))


class TestTaylorModels:
    def test_quadratic_model_third_order(self, rng):
        """|mu - model| decays like dist(z,p)^3 under radial shrinking."""
        for _ in range(5):
            p, q = geo.random_pair(rng, 2, dmin=0.6, dmax=1.0)
            kp = pot.KahlerPotential.from_points(p, q)
            u = geo.random_tangent(rng, p)
            errs = []
            for d in (0.1, 0.05):
                z = geo.normalize(geo.exp_arrays(p.rep, u.vec / u.norm, d))
                errs.append(abs(float(kp.mu_arrays(z.rep)) - pot.quadratic_model(p, q, z)))
            # third order: halving d cuts the error by ~8; allow slack for
            # the next term in the series
            assert errs[1] <= errs[0] / 5.0 + 1e-14

    def test_pair_derivative_second_order(self, rng):
        """Joint (p,q)-derivative matches the stated leading term to O(d^2)."""
        for _ in range(5):
            p, q = geo.random_pair(rng, 2, dmin=0.6, dmax=1.0)
            u_p = geo.random_tangent(rng, p)
            u_q = geo.random_tangent(rng, q)
            w = geo.random_tangent(rng, p)
            errs = []
            for d in (0.1, 0.05):
                z = geo.normalize(geo.exp_arrays(p.rep, w.vec / w.norm, d))
                h = 1e-6
                fd = (
                    _perturbed_mu(p, q, z, u_p, u_q, h)
                    - _perturbed_mu(p, q, z, u_p, u_q, -h)
                ) / (2 * h)
                errs.append(abs(fd - pot.pair_derivative_model(p, q, z, u_p)))
            assert errs[1] <= errs[0] / 2.5 + 1e-9

    def test_model_value_scale(self, rng):
        """The quadratic model itself is O(d^2) with the stated coefficient."""
        p, q = geo.random_pair(rng, 2, dmin=0.6, dmax=1.0)
        kp = pot.KahlerPotential.from_points(p, q)
        u = geo.random_tangent(rng, p)
        d = 0.02
        z = geo.normalize(geo.exp_arrays(p.rep, u.vec / u.norm, d))
        assert float(kp.mu_arrays(z.rep)) == pytest.approx(
            pot.quadratic_model(p, q, z), abs=3 * d**3
        )
