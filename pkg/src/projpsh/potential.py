"""Kahler potentials adapted to a geodesic, and their isometry flows.

Each closed geodesic of CP^n is diagonalized by an orthonormal pair (alpha,
beta) of representatives.  The potential

    mu(z) = -1/2 log(2 |z . conj(alpha)| |z . conj(beta)| / |z|^2)

generates the Fubini-Study form, vanishes exactly on the geodesic, and is
invariant under the one-parameter unitary group that rotates the alpha and
beta eigenlines in opposite phases.  That group restricts to translation
along the geodesic, which is what the exhaustion construction flows with.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import geometry as geo


@dataclass(frozen=True)
class KahlerPotential:
    """Potential and isometry flow attached to the geodesic through (p, q)."""

    frame: geo.GeodesicFrame

    @classmethod
    def from_points(cls, p: geo.ProjPoint, q: geo.ProjPoint) -> "KahlerPotential":
        return cls(geo.GeodesicFrame.from_points(p, q))

    # -- domain ------------------------------------------------------------

    def domain_margin(self, zreps: np.ndarray) -> np.ndarray:
        """min over the pair of (pi/2 - dist to the eigenline), > 0 inside."""
        da = geo.dist_arrays(zreps, self.frame.alpha)
        db = geo.dist_arrays(zreps, self.frame.beta)
        return geo.HALF_PI - np.maximum(da, db)

    def contains(self, zreps: np.ndarray) -> np.ndarray:
        return self.domain_margin(zreps) > 0

    # -- potential ----------------------------------------------------------

    def mu_arrays(self, zreps: np.ndarray) -> np.ndarray:
        a = np.abs(geo.hdot(zreps, self.frame.alpha))
        b = np.abs(geo.hdot(zreps, self.frame.beta))
        n2 = geo.vnorm(zreps) ** 2
        with np.errstate(divide="ignore"):
            return -0.5 * np.log(2 * a * b / n2)

    def mu(self, z: geo.ProjPoint) -> float:
        return float(self.mu_arrays(z.rep))

    def dist_to_geodesic_arrays(self, zreps: np.ndarray) -> np.ndarray:
        return geo.dist_to_geodesic_arrays(zreps, self.frame.alpha, self.frame.beta)

    # -- isometry flow -------------------------------------------------------

    def isometry_arrays(self, t: float, zreps: np.ndarray) -> np.ndarray:
        """Apply the time-t isometry to representatives (rank-2 update of id).

        Moves the geodesic point at arclength s to the one at s + t and fixes
        the orthogonal complement of the (alpha, beta) plane pointwise.
        """
        alpha = self.frame.alpha
        beta = self.frame.beta
        ca = geo.hdot(zreps, alpha)[..., None]
        cb = geo.hdot(zreps, beta)[..., None]
        return zreps + (np.exp(-1j * t) - 1) * ca * alpha + (np.exp(1j * t) - 1) * cb * beta

    def isometry(self, t: float, z: geo.ProjPoint) -> geo.ProjPoint:
        return geo.normalize(self.isometry_arrays(t, z.rep))

    def isometry_matrix(self, t: float) -> np.ndarray:
        """The same isometry as a unitary matrix on C^{n+1}."""
        alpha = self.frame.alpha
        beta = self.frame.beta
        eye = np.eye(alpha.shape[0], dtype=complex)
        return (
            eye
            + (np.exp(-1j * t) - 1) * np.outer(alpha, np.conj(alpha))
            + (np.exp(1j * t) - 1) * np.outer(beta, np.conj(beta))
        )


def quadratic_model(p: geo.ProjPoint, q: geo.ProjPoint, z: geo.ProjPoint) -> float:
    """Leading behavior of the potential near p.

    Equals (1/2) dist(z,p)^2 (1 - Re((gamma0'(p,z) . conj(gamma0'(p,q)))^2));
    the true potential differs by O(dist(z,p)^3).
    """
    d = geo.dist(p, z)
    uz = geo.log_map_arrays(p.rep, z.rep)
    uq = geo.log_map_arrays(p.rep, q.rep)
    return 0.5 * d * d * float(1.0 - np.real(geo.hdot(uz, uq) ** 2))


def pair_derivative_model(
    p: geo.ProjPoint,
    q: geo.ProjPoint,
    z: geo.ProjPoint,
    u_p: geo.TangentVec,
) -> float:
    """Leading term of the joint derivative of the potential in (p, q).

    The derivative of mu_{p,q}(z) when p moves along u_p and q along any u_q
    is, up to O(dist(z,p)^2),

        -dist(z,p) Re(g . conj(u_p) - (g . conj(h)) (u_p . conj(h)))

    with g = gamma0'(p,z) and h = gamma0'(p,q); the u_q motion only enters at
    higher order.
    """
    d = geo.dist(p, z)
    g = geo.log_map_arrays(p.rep, z.rep)
    h = geo.log_map_arrays(p.rep, q.rep)
    return -d * float(
        np.real(geo.hdot(g, u_p.vec) - geo.hdot(g, h) * geo.hdot(u_p.vec, h))
    )


def fs_chart_hessian(zt: np.ndarray) -> np.ndarray:
    """Complex Hessian of the Fubini-Study chart potential (1/2)log(1+|zt|^2).

    Entry (j,k) is the z_j zbar_k derivative; any local potential for the
    metric has this same complex Hessian.
    """
    zt = np.asarray(zt, dtype=complex)
    s = 1.0 + float(np.sum(np.abs(zt) ** 2))
    n = zt.shape[0]
    return (np.eye(n) * s - np.outer(np.conj(zt), zt)) / (2 * s * s)


def complex_hessian_fd(f, zt: np.ndarray, h: float = 1e-3) -> np.ndarray:
    """Finite-difference complex Hessian of a real function of chart coords."""
    zt = np.asarray(zt, dtype=complex)
    n = zt.shape[0]

    def step(j, re, im):
        e = np.zeros(n, dtype=complex)
        e[j] = re + 1j * im
        return e

    def d2(a, b):
        return (f(zt + a + b) - f(zt + a - b) - f(zt - a + b) + f(zt - a - b)) / (4 * h * h)

    out = np.zeros((n, n), dtype=complex)
    for j in range(n):
        for k in range(n):
            xx = d2(step(j, h, 0), step(k, h, 0))
            yy = d2(step(j, 0, h), step(k, 0, h))
            xy = d2(step(j, h, 0), step(k, 0, h))
            yx = d2(step(j, 0, h), step(k, h, 0))
            out[j, k] = (xx + yy + 1j * (xy - yx)) / 4
    return out
