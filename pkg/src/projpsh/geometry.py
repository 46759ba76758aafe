"""Fubini-Study geometry on complex projective space.

Points of CP^n are stored as unit representatives in C^{n+1}.  The metric is
normalized so that omega = i ddbar log|w|, which makes the diameter pi/2 and
gives geodesics, distances and their derivatives closed trigonometric forms.
Everything here is written against ndarrays whose last axis has length n+1,
so the same kernels serve scalar calls and large vectorized batches.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

HALF_PI = float(np.pi / 2)
UNIT_TOL = 1e-12
ORTHO_TOL = 1e-10
DEGENERATE_TOL = 1e-9


class GeodesicError(ValueError):
    """Endpoints coincide or are too close to the cut locus."""


class ChartError(ValueError):
    """Point does not lie in the requested affine chart."""


def hdot(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Hermitian product a . conj(b), contracted over the last axis."""
    return np.sum(a * np.conj(b), axis=-1)


def vnorm(a: np.ndarray) -> np.ndarray:
    a = np.asarray(a)
    if a.dtype.kind == "c":
        return np.sqrt(np.sum(a.real * a.real + a.imag * a.imag, axis=-1))
    return np.sqrt(np.sum(a * a, axis=-1))


def canonical_phase(raw: np.ndarray) -> np.ndarray:
    """Rotate a representative so its first largest-modulus entry is real >= 0.

    The choice is stable under small perturbations away from modulus ties and
    pins down a unique unit representative for each projective point.
    """
    raw = np.asarray(raw, dtype=complex)
    mags = np.abs(raw)
    idx = np.argmax(mags, axis=-1)
    lead = np.take_along_axis(raw, idx[..., None], axis=-1)[..., 0]
    phase = lead / np.abs(lead)
    return raw * np.conj(phase)[..., None]


@dataclass(frozen=True)
class ProjPoint:
    """A point of CP^n: unit representative with canonical phase."""

    rep: np.ndarray

    def __post_init__(self):
        rep = np.asarray(self.rep, dtype=complex)
        if rep.ndim != 1 or rep.shape[0] < 2:
            raise ValueError("representative must be a vector in C^{n+1}, n >= 1")
        if abs(vnorm(rep) - 1.0) > 1e-9:
            raise ValueError("representative must have unit norm")
        object.__setattr__(self, "rep", rep)

    @property
    def n(self) -> int:
        return self.rep.shape[0] - 1


def normalize(raw) -> ProjPoint:
    """Unit representative with canonical phase; rejects the zero vector."""
    raw = np.asarray(raw, dtype=complex)
    nrm = vnorm(raw)
    if nrm < UNIT_TOL:
        raise ValueError("cannot normalize a (near-)zero vector")
    return ProjPoint(canonical_phase(raw / nrm))


def normalize_many(raw: np.ndarray) -> np.ndarray:
    """Unit representatives for a batch of nonzero vectors (phases untouched)."""
    raw = np.asarray(raw, dtype=complex)
    return raw / vnorm(raw)[..., None]


@dataclass(frozen=True)
class TangentVec:
    """Tangent vector at a point: ambient vector orthogonal to the base rep.

    With this representation the Fubini-Study norm is the Euclidean norm of
    ``vec`` and the Riemannian inner product is Re(u . conj(v)).
    """

    base: ProjPoint
    vec: np.ndarray

    def __post_init__(self):
        vec = np.asarray(self.vec, dtype=complex)
        if vec.shape != self.base.rep.shape:
            raise ValueError("tangent vector shape must match the base point")
        if abs(hdot(vec, self.base.rep)) > ORTHO_TOL * max(1.0, float(vnorm(vec))):
            raise ValueError("tangent vector must be orthogonal to the base point")
        object.__setattr__(self, "vec", vec)

    @property
    def norm(self) -> float:
        return float(vnorm(self.vec))


def inner(u: TangentVec, v: TangentVec) -> float:
    """Riemannian inner product of two tangent vectors at the same base."""
    if not np.allclose(u.base.rep, v.base.rep, atol=1e-10):
        raise ValueError("tangent vectors must share a base point")
    return float(np.real(hdot(u.vec, v.vec)))


def tangent_project(base: np.ndarray, w: np.ndarray) -> np.ndarray:
    """Component of w orthogonal to the unit vector(s) base."""
    return w - hdot(w, base)[..., None] * base


# ---------------------------------------------------------------------------
# distance and geodesics


def dist_arrays(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Fubini-Study distance arccos(|a.conj(b)|/(|a||b|)), in [0, pi/2]."""
    c = np.abs(hdot(a, b)) / (vnorm(a) * vnorm(b))
    return np.arccos(np.clip(c, 0.0, 1.0))


def dist(p: ProjPoint, q: ProjPoint) -> float:
    return float(dist_arrays(p.rep, q.rep))


def _check_span(d, ctx: str):
    dmin = float(np.min(d))
    dmax = float(np.max(d))
    if dmin <= DEGENERATE_TOL:
        raise GeodesicError(f"{ctx}: points are {dmin:.3e} apart, too close to coincide")
    if dmax >= HALF_PI - DEGENERATE_TOL:
        raise GeodesicError(f"{ctx}: points are {dmax:.6f} apart, too close to the cut locus")


def log_map_arrays(p: np.ndarray, q: np.ndarray) -> np.ndarray:
    """Initial unit velocity of the geodesic from p to q (unit reps).

    Equals cot(d) (q / (q.conj(p)) - p); it is orthogonal to p, has unit
    norm, and scaling q by a phase leaves it unchanged.
    """
    d = dist_arrays(p, q)
    _check_span(d, "log_map")
    return (q / hdot(q, p)[..., None] - p) / np.tan(d)[..., None]


def log_map(p: ProjPoint, q: ProjPoint) -> TangentVec:
    return TangentVec(p, log_map_arrays(p.rep, q.rep))


def geodesic_arrays(p: np.ndarray, q: np.ndarray, t) -> np.ndarray:
    """Representative of the point at arclength t along the geodesic p -> q."""
    u0 = log_map_arrays(p, q)
    t = np.asarray(t, dtype=float)[..., None]
    return np.cos(t) * p + np.sin(t) * u0


def geodesic(p: ProjPoint, q: ProjPoint, t: float) -> ProjPoint:
    return normalize(geodesic_arrays(p.rep, q.rep, float(t)))


def geodesic_velocity_arrays(p: np.ndarray, q: np.ndarray, t) -> np.ndarray:
    """Velocity -sin(t) p + cos(t) u0 of the unit-speed geodesic p -> q."""
    u0 = log_map_arrays(p, q)
    t = np.asarray(t, dtype=float)[..., None]
    return -np.sin(t) * p + np.cos(t) * u0


def exp_arrays(p: np.ndarray, u_unit: np.ndarray, t) -> np.ndarray:
    """Point at arclength t along the geodesic with initial velocity u_unit."""
    t = np.asarray(t, dtype=float)[..., None]
    return np.cos(t) * p + np.sin(t) * u_unit


def exp_map(p: ProjPoint, u: TangentVec, t: float) -> ProjPoint:
    if abs(u.norm - 1.0) > 1e-9:
        raise ValueError("exp_map expects a unit tangent vector")
    return normalize(exp_arrays(p.rep, u.vec, float(t)))


def dist_gradient(p: ProjPoint, q: ProjPoint) -> TangentVec:
    """Gradient of dist(., q) at p, which is minus the unit vector toward q."""
    return TangentVec(p, -log_map_arrays(p.rep, q.rep))


# ---------------------------------------------------------------------------
# derivatives of geodesics in their endpoints

def _second_slot_parts(p: np.ndarray, q: np.ndarray, u: np.ndarray):
    """Shared pieces for differentiating in the second endpoint.

    Returns (d, phase, projected, im_part) where phase = |q.conj(p)|/(q.conj(p)),
    projected = u minus its component along the return velocity at q, and
    im_part = Im(u . conj(return velocity)).
    """
    d = dist_arrays(p, q)
    _check_span(d, "geodesic derivative")
    qp = hdot(q, p)
    phase = np.abs(qp) / qp
    back = log_map_arrays(q, p)
    coeff = hdot(u, back)
    projected = u - coeff[..., None] * back
    return d, phase, projected, np.imag(coeff)


def geodesic_direction_derivative_q(p: ProjPoint, q: ProjPoint, u: TangentVec) -> np.ndarray:
    """Euclidean derivative of q |-> log_map(p, q) in the direction u at q.

    The value lives in the tangent space at p; it is returned as a plain
    ambient vector.
    """
    d, phase, proj, im = _second_slot_parts(p.rep, q.rep, u.vec)
    u0 = log_map_arrays(p.rep, q.rep)
    return (phase / np.sin(d)) * proj - 1j * im / (np.cos(d) * np.sin(d)) * u0


def geodesic_derivative_q(p: ProjPoint, q: ProjPoint, u: TangentVec, t: float) -> TangentVec:
    """Derivative of q |-> geodesic(p, q, t) in the direction u at q."""
    d, phase, proj, im = _second_slot_parts(p.rep, q.rep, u.vec)
    vel = geodesic_velocity_arrays(p.rep, q.rep, t)
    first = (np.sin(t) / np.sin(d)) * phase * proj
    second = (np.sin(2 * t) / np.sin(2 * d)) * 1j * im * vel
    base = normalize(geodesic_arrays(p.rep, q.rep, t))
    raw = first - second
    # the formula lands orthogonal to the geodesic point; re-project only to
    # absorb roundoff, then align with the canonical representative's phase
    g = geodesic_arrays(p.rep, q.rep, t)
    g = g / vnorm(g)
    raw = tangent_project(g, raw)
    phase_fix = hdot(base.rep, g)
    return TangentVec(base, raw * phase_fix)


def geodesic_derivative_p(p: ProjPoint, q: ProjPoint, u: TangentVec, t: float) -> TangentVec:
    """Derivative of p |-> geodesic(p, q, t) in the direction u at p.

    Computed from the second-slot formula through the reversal identity
    [geodesic(p,q,t)] = [geodesic(q,p,d-t)], whose right side moves p both
    through the slot and through d = dist(p, q).
    """
    d = dist(p, q)
    s = d - t
    dd = -float(np.real(hdot(u.vec, log_map_arrays(p.rep, q.rep))))
    dslot, phase, proj, im = _second_slot_parts(q.rep, p.rep, u.vec)
    vel_s = geodesic_velocity_arrays(q.rep, p.rep, s)
    slot = (np.sin(s) / np.sin(dslot)) * phase * proj \
        - (np.sin(2 * s) / np.sin(2 * dslot)) * 1j * im * vel_s
    total = slot + dd * vel_s
    g_direct = geodesic_arrays(p.rep, q.rep, t)
    g_direct = g_direct / vnorm(g_direct)
    g_swapped = geodesic_arrays(q.rep, p.rep, s)
    g_swapped = g_swapped / vnorm(g_swapped)
    align = hdot(g_direct, g_swapped)
    align = align / np.abs(align)
    base = normalize(g_direct)
    raw = tangent_project(g_direct, total * align)
    phase_fix = hdot(base.rep, g_direct)
    return TangentVec(base, raw * phase_fix)


def derivative_bound_q(d: float, t: float) -> float:
    """Norm bound max(|sin 2t|/sin 2d, |sin t|/sin d) for the q-derivative."""
    return max(abs(np.sin(2 * t)) / np.sin(2 * d), abs(np.sin(t)) / np.sin(d))


def derivative_bound_p(d: float, t: float) -> float:
    """Sharp norm bound for the p-derivative of p |-> geodesic(p, q, t).

    Moving p also moves d = dist(p, q), which contributes an extra velocity
    term; the exact squared norm for unit u with c = u . conj(log_map(p, q)) is

        (sin(t-d)/sin d)^2 (1 - |c|^2)
        + (sin 2(t-d)/sin 2d)^2 Im(c)^2 + Re(c)^2,

    whose supremum over unit u is max(1, |sin 2(t-d)|/sin 2d, |sin(t-d)|/sin d).
    At t = 0 this equals 1, matching the q-version of the bound there.
    """
    return max(1.0, derivative_bound_q(d, t - d))


def derivative_bound_direction(d: float) -> float:
    """Norm bound sec(d) csc(d) for the derivative of log_map in q."""
    return 1.0 / (np.cos(d) * np.sin(d))


# ---------------------------------------------------------------------------
# frames and distance to a geodesic


@dataclass(frozen=True)
class GeodesicFrame:
    """Geodesic through p and q together with its diagonalizing pair.

    alpha and beta are the orthonormal representatives (p + i u0)/sqrt(2) and
    (p - i u0)/sqrt(2); the geodesic point at arclength t is
    (alpha e^{-it} + beta e^{it})/sqrt(2).
    """

    p: ProjPoint
    q: ProjPoint
    d: float
    u0: np.ndarray
    alpha: np.ndarray
    beta: np.ndarray

    @classmethod
    def from_points(cls, p: ProjPoint, q: ProjPoint) -> "GeodesicFrame":
        d = dist(p, q)
        u0 = log_map_arrays(p.rep, q.rep)
        alpha = (p.rep + 1j * u0) / np.sqrt(2)
        beta = (p.rep - 1j * u0) / np.sqrt(2)
        return cls(p=p, q=q, d=d, u0=u0, alpha=alpha, beta=beta)

    def point_at(self, t) -> np.ndarray:
        t = np.asarray(t, dtype=float)[..., None]
        return (self.alpha * np.exp(-1j * t) + self.beta * np.exp(1j * t)) / np.sqrt(2)


def dist_to_geodesic_arrays(z: np.ndarray, alpha: np.ndarray, beta: np.ndarray) -> np.ndarray:
    """Distance from z to the closed geodesic with diagonalizing pair (alpha, beta)."""
    c = (np.abs(hdot(z, alpha)) + np.abs(hdot(z, beta))) / (np.sqrt(2) * vnorm(z))
    return np.arccos(np.clip(c, 0.0, 1.0))


def dist_to_geodesic(z: ProjPoint, frame: GeodesicFrame) -> float:
    return float(dist_to_geodesic_arrays(z.rep, frame.alpha, frame.beta))


# ---------------------------------------------------------------------------
# affine chart


def affine_chart(z: ProjPoint) -> np.ndarray:
    """Chart coordinates (z^1/z^{n+1}, ..., z^n/z^{n+1}) of a point."""
    last = z.rep[-1]
    if abs(last) < 1e-12:
        raise ChartError("point lies on the hyperplane at infinity of the chart")
    return z.rep[:-1] / last


def chart_point(zt: np.ndarray) -> ProjPoint:
    """Projective point [zt : 1] for chart coordinates zt."""
    zt = np.asarray(zt, dtype=complex)
    return normalize(np.concatenate([zt, [1.0]]))


def chart_lift_arrays(zt: np.ndarray) -> np.ndarray:
    """Unit representatives of [zt : 1] for a batch of chart coordinates."""
    zt = np.asarray(zt, dtype=complex)
    ones = np.ones(zt.shape[:-1] + (1,), dtype=complex)
    raw = np.concatenate([zt, ones], axis=-1)
    return raw / vnorm(raw)[..., None]


def chart_tangent(z: ProjPoint, w: np.ndarray) -> TangentVec:
    """Tangent vector at z whose chart image is the chart direction w."""
    zt = affine_chart(z)
    amb = np.concatenate([np.asarray(w, dtype=complex), [0.0]])
    scale = np.sqrt(1.0 + float(np.sum(np.abs(zt) ** 2)))
    lifted = tangent_project(z.rep, amb / scale)
    return TangentVec(z, lifted * hdot(z.rep, chart_lift_arrays(zt)))


def chart_metric_norm2(zt: np.ndarray, w: np.ndarray) -> np.ndarray:
    """Squared Fubini-Study norm of the chart direction w at chart point zt."""
    zt = np.asarray(zt, dtype=complex)
    w = np.asarray(w, dtype=complex)
    s = 1.0 + np.sum(np.abs(zt) ** 2, axis=-1)
    return (np.sum(np.abs(w) ** 2, axis=-1) * s - np.abs(hdot(w, zt)) ** 2) / s**2


# ---------------------------------------------------------------------------
# finite differences along geodesics


def fd_directional(f, p: ProjPoint, u: TangentVec, h: float = 1e-5, side: str = "central") -> float:
    """Difference quotient of a scalar function along the geodesic exp(p, u/|u|, .).

    side "+" and "-" form one-sided quotients scaled for the (possibly
    non-unit) direction u; "central" averages them.  One-sided quotients are
    the right tool for Lipschitz functions such as boundary distances.
    """
    nu = u.norm
    if nu < UNIT_TOL:
        raise ValueError("direction must be nonzero")
    uhat = u.vec / nu
    if side == "+":
        return (f(normalize(exp_arrays(p.rep, uhat, h * nu))) - f(p)) / h
    if side == "-":
        return (f(p) - f(normalize(exp_arrays(p.rep, uhat, -h * nu)))) / h
    if side == "central":
        fp = f(normalize(exp_arrays(p.rep, uhat, h * nu)))
        fm = f(normalize(exp_arrays(p.rep, uhat, -h * nu)))
        return (fp - fm) / (2 * h)
    raise ValueError(f"unknown side {side!r}")


def fd_vector_derivative(g, p: ProjPoint, u: TangentVec, h: float = 1e-4) -> np.ndarray:
    """Central difference quotient of a CP^n-valued map along exp(p, u/|u|, .).

    g maps unit representatives to representatives.  The quotient projects
    each sample orthogonally to g(p), which removes the phase freedom of the
    representatives up to O(h^2).
    """
    nu = u.norm
    if nu < UNIT_TOL:
        raise ValueError("direction must be nonzero")
    uhat = u.vec / nu
    g0 = np.asarray(g(p.rep), dtype=complex)
    g0 = g0 / vnorm(g0)
    vals = []
    for s in (h * nu, -h * nu):
        gh = np.asarray(g(exp_arrays(p.rep, uhat, s)), dtype=complex)
        gh = gh / vnorm(gh)
        vals.append(tangent_project(g0, gh))
    return (vals[0] - vals[1]) / (2 * h)


# ---------------------------------------------------------------------------
# samplers


def random_point(rng: np.random.Generator, n: int) -> ProjPoint:
    raw = rng.standard_normal(n + 1) + 1j * rng.standard_normal(n + 1)
    return normalize(raw)


def random_tangent(rng: np.random.Generator, p: ProjPoint, scale: float = 1.0) -> TangentVec:
    raw = rng.standard_normal(p.rep.shape[0]) + 1j * rng.standard_normal(p.rep.shape[0])
    vec = tangent_project(p.rep, raw)
    nrm = vnorm(vec)
    if nrm < 1e-9:
        return random_tangent(rng, p, scale)
    return TangentVec(p, vec * (scale / nrm))


def random_pair(rng: np.random.Generator, n: int, dmin: float = 0.2, dmax: float = 1.3):
    """A pair (p, q) with dist(p, q) drawn uniformly from [dmin, dmax]."""
    p = random_point(rng, n)
    u = random_tangent(rng, p)
    d = rng.uniform(dmin, dmax)
    q = normalize(exp_arrays(p.rep, u.vec, d))
    return p, q


def random_unitary(rng: np.random.Generator, m: int) -> np.ndarray:
    """Haar-ish unitary from the QR decomposition with positive R diagonal."""
    a = rng.standard_normal((m, m)) + 1j * rng.standard_normal((m, m))
    qmat, rmat = np.linalg.qr(a)
    diag = np.diagonal(rmat)
    return qmat * (diag / np.abs(diag))
