"""Lipschitz domains in complex projective space.

A domain is described by an exact membership predicate, an atlas of rotated
Lipschitz-graph boundary patches, and (where available) a closed form for the
boundary distance delta.  Graph values are recovered by bisecting the
membership predicate along patch fibers, so the atlas inherits the accuracy
of the predicate instead of a mesh.  Three built-in families cover the cases
the verification suites need: a geodesic ball, a lens (intersection of two
balls, whose boundary has a corner along a rim), and a quarter domain whose
boundary contains a Levi-flat three-quarter wedge meeting a sphere.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from . import geometry as geo

GRID_PER_AXIS = 9
SEED_CAP = 100_000
CLUSTER_TOL = 1e-6
# spatial resolution at which two minimizer candidates count as one point
POINT_RES = 1e-5
BISECT_ITERS = 34
# boundary points must lie within this fraction of a patch radius from the
# patch center; the slack between it and 1 hosts the transverse-field collar
COVER_FRACTION = 0.7


class DomainError(ValueError):
    """Query outside a method's supported configuration."""


@dataclass(frozen=True)
class MinimizerSet:
    """Nearest boundary points of a query, with their common distance.

    Multiplicity is resolution-limited at cluster_tol: the points are
    clustered representatives, and each satisfies
    |dist(z, point) - value| <= cluster_tol.
    """

    points: tuple
    value: float
    cluster_tol: float

    def __len__(self) -> int:
        return len(self.points)


def chart_ratio_coords(zreps: np.ndarray) -> np.ndarray:
    """Batch affine chart coordinates w_j / w_last for representatives."""
    zreps = np.asarray(zreps, dtype=complex)
    return zreps[..., :-1] / zreps[..., -1:]


# ---------------------------------------------------------------------------
# boundary patches


@dataclass(frozen=True)
class BoundaryPatch:
    """Rotated Lipschitz-graph description of a piece of the boundary.

    ``rotation`` is a unitary V with V(center rep) = last basis vector, so the
    patch chart of z is the affine chart of V z.  Within the patch ball,
    membership(z) is equivalent to Im zeta_n < graph(zeta', Re zeta_n).  The
    graph is evaluated by bisecting the membership predicate along the fiber
    {(zeta', t + i y) : |y| <= fiber_halfwidth}.
    """

    rotation: np.ndarray
    radius: float
    lip_const: float
    fiber_halfwidth: float
    box_halfwidth: float
    membership: object  # vectorized predicate on representatives

    @cached_property
    def center(self) -> geo.ProjPoint:
        e = np.zeros(self.rotation.shape[0], dtype=complex)
        e[-1] = 1.0
        return geo.normalize(self.rotation.conj().T @ e)

    @property
    def n(self) -> int:
        return self.rotation.shape[0] - 1

    @cached_property
    def reach(self) -> float:
        """Bound on dist(center, boundary point served by this patch).

        Graph values are only trusted inside the patch ball (that is where
        membership <=> below-graph was validated), so minimizations restrict
        to it and the reach equals the patch radius.
        """
        return float(self.radius)

    def patch_chart(self, zreps: np.ndarray) -> np.ndarray:
        return chart_ratio_coords(np.asarray(zreps, dtype=complex) @ self.rotation.T)

    def lift(self, zeta: np.ndarray) -> np.ndarray:
        """Unit representatives of patch-chart coordinates."""
        return geo.chart_lift_arrays(zeta) @ np.conj(self.rotation)

    def _fiber_points(self, zprime: np.ndarray, t: np.ndarray, y: np.ndarray) -> np.ndarray:
        zeta = np.concatenate([zprime, (t + 1j * y)[..., None]], axis=-1)
        return self.lift(zeta)

    def graph(self, zprime: np.ndarray, t: np.ndarray, iters: int = BISECT_ITERS) -> np.ndarray:
        """Graph height Im zeta_n over (zeta', Re zeta_n); NaN off the sheet.

        A NaN marks fibers whose endpoints fail to straddle the boundary,
        which can only happen outside the validated patch ball.
        """
        zprime = np.asarray(zprime, dtype=complex)
        t = np.asarray(t, dtype=float)
        lo = np.full(t.shape, -self.fiber_halfwidth)
        hi = np.full(t.shape, self.fiber_halfwidth)
        ok_lo = self.membership(self._fiber_points(zprime, t, lo))
        ok_hi = ~self.membership(self._fiber_points(zprime, t, hi))
        good = ok_lo & ok_hi
        for _ in range(iters):
            mid = 0.5 * (lo + hi)
            inside = self.membership(self._fiber_points(zprime, t, mid))
            lo = np.where(inside, mid, lo)
            hi = np.where(inside, hi, mid)
        out = 0.5 * (lo + hi)
        return np.where(good, out, np.nan)

    def boundary_points(self, zprime: np.ndarray, t: np.ndarray) -> np.ndarray:
        """Representatives of graph points over (zeta', Re zeta_n)."""
        y = self.graph(zprime, t)
        return self._fiber_points(zprime, np.asarray(t, dtype=float), y)

    def transversal(self) -> geo.ProjPoint:
        """The distinguished transverse point: patch chart (0, ..., 0, -i)."""
        zeta = np.zeros(self.n, dtype=complex)
        zeta[-1] = -1j
        return geo.normalize(self.lift(zeta))


def _patch_rotation(center: geo.ProjPoint, fiber: geo.TangentVec) -> np.ndarray:
    """Unitary sending center to the chart origin and fiber to -i e_n."""
    m = center.rep.shape[0]
    cols = np.zeros((m, m), dtype=complex)
    cols[:, -1] = center.rep
    cols[:, -2] = 1j * fiber.vec / fiber.norm
    filled = 2
    rng_free = np.eye(m, dtype=complex)
    for k in range(m):
        if filled == m:
            break
        v = rng_free[:, k]
        for j in range(m - 1, m - 1 - filled, -1):
            v = v - geo.hdot(v, cols[:, j]) * cols[:, j]
        nv = geo.vnorm(v)
        if nv > 1e-6:
            cols[:, m - 1 - filled] = v / nv
            filled += 1
    return cols.conj().T


def _validate_patch(
    patch: BoundaryPatch,
    center: geo.ProjPoint,
    rng: np.random.Generator,
    samples: int,
    guard: float = 1e-8,
) -> bool:
    """Check membership <=> below-graph on sampled points of the patch ball."""
    n = patch.n
    hw, fh = patch.box_halfwidth, patch.fiber_halfwidth
    zp = hw * (2 * rng.random((samples, n - 1)) - 1) + 1j * hw * (
        2 * rng.random((samples, n - 1)) - 1
    )
    t = hw * (2 * rng.random(samples) - 1)
    y = fh * (2 * rng.random(samples) - 1)
    pts = patch._fiber_points(zp, t, y)
    in_ball = geo.dist_arrays(pts, center.rep) < patch.radius
    if in_ball.sum() < 50:
        return False
    zp, t, y, pts = zp[in_ball], t[in_ball], y[in_ball], pts[in_ball]
    heights = patch.graph(zp, t)
    if np.any(np.isnan(heights)):
        return False
    member = patch.membership(pts)
    decided = np.abs(y - heights) > guard
    return bool(np.array_equal(member[decided], (y < heights)[decided]))


def build_patch(
    membership,
    center: geo.ProjPoint,
    fiber: geo.TangentVec,
    radius: float,
    rng: np.random.Generator,
    full_samples: int = 10_000,
    max_lip: float = 4.0,
):
    """Construct a validated patch, shrinking the radius until the graph form
    holds on the patch ball; returns None if no radius works.

    Each radius is tried with a deep fiber first and then a shallow one (thin
    domains need shallow fibers so the segment does not punch through the far
    boundary sheet).  Candidate radii get a quick screen; the accepted radius
    is revalidated on ``full_samples`` points before the Lipschitz constant
    is measured.
    """
    rotation = _patch_rotation(center, fiber)
    for _ in range(14):
        if radius < 1e-3:
            return None
        hw = float(np.tan(radius)) * 1.0001
        for fiber_factor in (2.5, 1.2):
            fh = fiber_factor * float(np.tan(radius))
            patch = BoundaryPatch(
                rotation=rotation,
                radius=radius,
                lip_const=np.nan,
                fiber_halfwidth=fh,
                box_halfwidth=hw,
                membership=membership,
            )
            if not (
                _validate_patch(patch, center, rng, 2000)
                and _validate_patch(patch, center, rng, full_samples)
            ):
                continue
            lip = _measure_lip(patch, rng)
            if not np.isfinite(lip) or lip > max_lip:
                continue
            return BoundaryPatch(
                rotation=rotation,
                radius=radius,
                lip_const=lip,
                fiber_halfwidth=fh,
                box_halfwidth=hw,
                membership=membership,
            )
        radius *= 0.7
    return None


def _measure_lip(patch: BoundaryPatch, rng: np.random.Generator, pairs: int = 600) -> float:
    """Sampled Lipschitz constant of the graph over the patch-ball footprint."""
    n = patch.n
    hw = float(np.tan(patch.radius))
    zp = hw * (2 * rng.random((2 * pairs, n - 1)) - 1) + 1j * hw * (
        2 * rng.random((2 * pairs, n - 1)) - 1
    )
    t = hw * (2 * rng.random(2 * pairs) - 1)
    h = patch.graph(zp, t)
    a, b = h[:pairs], h[pairs:]
    ok = np.isfinite(a) & np.isfinite(b)
    if ok.sum() < pairs // 4:
        return np.inf
    flat = np.concatenate(
        [zp.real, zp.imag, t[:, None]], axis=-1
    )
    gaps = np.linalg.norm(flat[:pairs] - flat[pairs:], axis=-1)
    ok &= gaps > 1e-9
    slopes = np.abs(a[ok] - b[ok]) / gaps[ok]
    return 1.05 * float(np.max(slopes)) if slopes.size else np.inf


# ---------------------------------------------------------------------------
# domains


@dataclass(frozen=True)
class LipschitzDomain:
    """Base for built-in domains; subclasses fill in the geometry."""

    name: str = field(init=False, default="")

    @property
    def n(self) -> int:
        raise NotImplementedError

    # subclasses: vectorized membership on representatives
    def contains_arrays(self, zreps: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def contains(self, z: geo.ProjPoint) -> bool:
        return bool(self.contains_arrays(z.rep))

    # subclasses: (values, valid_mask, minimizer_stack or None)
    def _exact_delta(self, zreps: np.ndarray):
        shape = np.asarray(zreps).shape[:-1]
        return np.zeros(shape), np.zeros(shape, dtype=bool), None

    def exact_zone(self, zreps: np.ndarray) -> np.ndarray:
        return self._exact_delta(np.asarray(zreps, dtype=complex))[1]

    def _atlas_seeds(self):
        raise NotImplementedError

    def _inward_fiber(self, b: geo.ProjPoint) -> geo.TangentVec:
        raise NotImplementedError

    def sample_boundary(self, rng: np.random.Generator, k: int) -> np.ndarray:
        raise NotImplementedError

    def sample_interior(self, rng: np.random.Generator, k: int) -> np.ndarray:
        raise NotImplementedError

    # -- atlas ---------------------------------------------------------------

    @cached_property
    def atlas(self) -> tuple:
        rng = np.random.default_rng(990331)
        patches = []
        probes = self.sample_boundary(rng, 8000)
        covered = np.zeros(probes.shape[0], dtype=bool)
        for center, fiber, radius in self._atlas_seeds():
            p = build_patch(self.contains_arrays, center, fiber, radius, rng)
            if p is not None:
                patches.append(p)
                covered |= geo.dist_arrays(probes, p.center.rep) < COVER_FRACTION * p.radius
        # greedy fill: every boundary point must sit within COVER_FRACTION of
        # a patch radius from that patch's center, which the transverse-field
        # cover relies on
        for _ in range(2000):
            if covered.all():
                break
            b = geo.normalize(probes[int(np.argmin(covered))])
            newp = build_patch(
                self.contains_arrays, b, self._inward_fiber(b), self._seed_radius(), rng
            )
            if newp is None:
                raise DomainError(f"could not build a patch at a boundary point of {self.name}")
            patches.append(newp)
            covered |= geo.dist_arrays(probes, newp.center.rep) < COVER_FRACTION * newp.radius
        else:
            raise DomainError(f"atlas for {self.name} failed to cover the boundary")
        return tuple(patches)

    def _seed_radius(self) -> float:
        return 0.35

    @cached_property
    def _atlas_center_reps(self) -> np.ndarray:
        return np.stack([p.center.rep for p in self.atlas])

    # -- boundary distance -----------------------------------------------------

    def delta_many(self, zreps: np.ndarray) -> np.ndarray:
        zreps = np.asarray(zreps, dtype=complex)
        vals, valid, _ = self._exact_delta(zreps)
        out = np.array(vals, dtype=float)
        flat_mask = ~np.asarray(valid).reshape(-1)
        if flat_mask.any():
            flat = zreps.reshape(-1, zreps.shape[-1])
            out = out.reshape(-1)
            for i in np.nonzero(flat_mask)[0]:
                out[i] = self._atlas_delta(flat[i])[0]
            out = out.reshape(vals.shape)
        return out

    def delta(self, z: geo.ProjPoint) -> float:
        return float(self.delta_many(z.rep[None, :])[0])

    def minimizer_feet_many(self, zreps: np.ndarray):
        """Batched minimizing boundary feet where a closed form provides them.

        Returns (values, feet, exact_rows): feet is a list of (..., m)
        candidate stacks with NaN rows where that candidate is absent or not
        within CLUSTER_TOL of the minimum; rows outside exact_rows carry no
        trustworthy feet and must go through minimizers() instead.
        """
        zreps = np.asarray(zreps, dtype=complex)
        vals, valid, mins = self._exact_delta(zreps)
        if mins is None:
            return vals, [], np.zeros(np.shape(vals), dtype=bool)
        valid = np.asarray(valid)
        return vals, [np.where(valid[..., None], m, np.nan) for m in mins], valid

    def atlas_delta(self, z: geo.ProjPoint) -> float:
        """Boundary distance through the patch atlas alone, bypassing any
        closed form; the reference implementation the fast paths must match."""
        return float(self._atlas_delta(z.rep)[0])

    def _atlas_delta(
        self, zrep: np.ndarray, want_points: bool = False, cluster_tol: float = CLUSTER_TOL
    ):
        """Distance to the boundary through the patch atlas.

        Seeds a per-patch grid, refines the best seeds by a synchronized
        compass search in graph coordinates, and keeps every candidate within
        cluster_tol of the best value.
        """
        bases = np.asarray(geo.dist_arrays(zrep[None, :], self._atlas_center_reps))
        order = np.argsort(bases)
        max_reach = max(p.reach for p in self.atlas)
        # phase 1: coarse mesh minima, pruned against a running upper bound
        # (patch centers are genuine boundary points, so min dist to centers
        # is already an upper bound for delta)
        upper = float(bases[order[0]])
        screened = []
        for idx in order:
            patch = self.atlas[idx]
            base = float(bases[idx])
            if base - max_reach > upper + CLUSTER_TOL:
                break
            if base - patch.reach > upper + CLUSTER_TOL:
                continue
            val, seeds, spacing, argpt = _patch_mesh_min(patch, zrep)
            if seeds is None:
                continue
            upper = min(upper, val)
            screened.append((val, patch, seeds, spacing, argpt))
        if not np.isfinite(upper):
            raise DomainError("no atlas patch produced a boundary candidate")
        # phase 2: keep entries whose mesh value could still win (a mesh
        # minimum overshoots the true one by at most a cell diagonal), then
        # group them by where their argmin landed; overlapping patches chase
        # the same minimizer, so a couple of refinements per group suffice
        live = [
            e for e in screened if e[0] <= upper + e[3] * np.sqrt(e[2].shape[-1]) + CLUSTER_TOL
        ]
        live.sort(key=lambda e: e[0])
        groups: list[list] = []
        for entry in live:
            for g in groups:
                if geo.dist_arrays(entry[4], g[0][4]) < 0.17:
                    g.append(entry)
                    break
            else:
                groups.append([entry])
        best = np.inf
        keep_vals: list[float] = []
        keep_pts: list[np.ndarray] = []
        for g in groups:
            anchor = g[0][4]
            nearest = min(g, key=lambda e: float(geo.dist_arrays(e[1].center.rep, anchor)))
            chosen = list(g[:2])
            if all(nearest is not c for c in chosen):
                chosen.append(nearest)
            for val, patch, seeds, spacing, argpt in chosen:
                ref, pts, ptvals = _patch_refine(patch, zrep, seeds, spacing, cluster_tol)
                if not np.isfinite(ref):
                    continue
                best = min(best, ref)
                keep_vals.extend(ptvals)
                keep_pts.extend(pts)
        if not np.isfinite(best):
            raise DomainError("no atlas patch produced a boundary candidate")
        if not want_points:
            return best, []
        sel = [p for v, p in zip(keep_vals, keep_pts) if v <= best + cluster_tol]
        # overlapping patches refine the same minimizer to copies a few 1e-6
        # apart (the search stalls where the value is flat to solver noise),
        # so points are merged at no finer than POINT_RES
        return best, _dedupe(sel, max(cluster_tol, POINT_RES))

    def minimizers(self, z: geo.ProjPoint, cluster_tol: float = CLUSTER_TOL) -> "MinimizerSet":
        """Nearest boundary points within cluster_tol of the minimum.

        Multiplicity is resolution-limited: when the minimizing set is a
        continuum, a capped list of clustered representatives is reported.
        """
        pts = self._minimizer_points(z, cluster_tol)
        if not pts:
            raise DomainError("minimizer search produced no boundary candidates")
        dists = [float(geo.dist_arrays(z.rep, p.rep)) for p in pts]
        value = min(dists)
        kept = tuple(p for p, dv in zip(pts, dists) if dv <= value + cluster_tol)
        return MinimizerSet(points=kept, value=value, cluster_tol=cluster_tol)

    def _minimizer_points(self, z: geo.ProjPoint, cluster_tol: float) -> list:
        vals, valid, mins = self._exact_delta(z.rep[None, :])
        if bool(valid[0]):
            pts = _dedupe([m[0] for m in mins], max(cluster_tol, POINT_RES))
            return [geo.normalize(m) for m in pts]
        _, pts = self._atlas_delta(z.rep, want_points=True, cluster_tol=cluster_tol)
        return [geo.normalize(p) for p in pts]

    def delta_directional(self, z: geo.ProjPoint, u: geo.TangentVec) -> float:
        """One-sided derivative of delta at an interior point along u."""
        mset = self.minimizers(z)
        vals = [
            geo.inner(u, geo.TangentVec(z, geo.log_map_arrays(z.rep, p.rep)))
            for p in mset.points
        ]
        return -max(vals)

    def nearest_boundary(self, z: geo.ProjPoint) -> geo.ProjPoint:
        return self.minimizers(z).points[0]


def _dedupe(points: list, tol: float = POINT_RES) -> list:
    out: list[np.ndarray] = []
    for p in points:
        if all(geo.dist_arrays(p, q) > tol for q in out):
            out.append(p)
    return out


def _patch_evaluator(patch: BoundaryPatch, zrep: np.ndarray, iters: int = BISECT_ITERS):
    """Distance to the patch graph as a function of (Re zeta', Im zeta', t).

    The graph is trusted only inside the patch ball, which in patch-chart
    coordinates is exactly |zeta'|^2 + t^2 + y^2 <= tan(radius)^2; points
    outside it evaluate to +inf.
    """
    tanr2 = float(np.tan(patch.radius)) ** 2 * 1.0001

    def evaluate(coords: np.ndarray):
        m = patch.n - 1
        zp = coords[..., :m] + 1j * coords[..., m : 2 * m]
        t = coords[..., -1]
        y = patch.graph(zp, t, iters)
        ok = np.isfinite(y) & (np.sum(coords**2, axis=-1) + np.nan_to_num(y) ** 2 <= tanr2)
        pts = patch._fiber_points(zp, t, np.nan_to_num(y))
        d = geo.dist_arrays(zrep, pts)
        return np.where(ok & np.isfinite(d), d, np.inf), pts

    return evaluate, tanr2


# bisection depth for survey-stage graph queries; the final value of any
# minimization is recomputed at full depth
FAST_ITERS = 18


def _patch_mesh_min(patch: BoundaryPatch, zrep: np.ndarray, top_k: int = 2):
    """Coarse minimum over the patch grid.

    Returns (value, seed coords, spacing, argmin point).  The value is a true
    upper bound for the distance to the patch's piece of the boundary, and
    overshoots the true minimum by at most about one grid cell diagonal.
    """
    dim = 2 * patch.n - 1
    per_axis = GRID_PER_AXIS
    while per_axis**dim > SEED_CAP:
        per_axis -= 2
    spacing = 2 * patch.box_halfwidth / (per_axis - 1)
    axes = [np.linspace(-patch.box_halfwidth, patch.box_halfwidth, per_axis)] * dim
    mesh = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, dim)
    evaluate, tanr2 = _patch_evaluator(patch, zrep, FAST_ITERS)
    mesh = mesh[np.sum(mesh**2, axis=-1) <= tanr2]
    if mesh.shape[0] == 0:
        return np.inf, None, spacing, None
    vals, pts = evaluate(mesh)
    if not np.isfinite(vals).any():
        return np.inf, None, spacing, None
    top = np.argsort(vals)[:top_k]
    return float(vals[top[0]]), mesh[top].copy(), spacing, pts[top[0]]


def _patch_refine(
    patch: BoundaryPatch,
    zrep: np.ndarray,
    coords: np.ndarray,
    spacing: float,
    cluster_tol: float = CLUSTER_TOL,
):
    """Pattern-search descent from mesh seeds.

    Returns (value, near-best points, their distances).

    Each sweep polls the coordinate directions for all walkers at once, then
    rides the best improving direction with doubling steps before the step is
    halved, which keeps the number of vectorized evaluations small.
    """
    dim = coords.shape[-1]
    hw = patch.box_halfwidth
    survey, _ = _patch_evaluator(patch, zrep, FAST_ITERS)
    coords = coords.copy()
    cur, _ = survey(coords)
    coords, cur = _pattern_descend(survey, coords, cur, spacing, 1e-6, hw)
    # the survey-depth graph noise stalls the walkers around 1e-4 from the
    # minimizer; polish the survivors at full depth down to the 1e-10 scale
    exact, _ = _patch_evaluator(patch, zrep)
    keep = cur <= np.min(cur) + 1e-3
    coords, cur = coords[keep], cur[keep]
    fine, _ = exact(coords)
    # a minimum clipped at the patch-ball edge can flicker out of the mask
    # when re-measured at full depth; keep its survey value there
    cur = np.where(np.isfinite(fine), fine, cur)
    coords, cur = _pattern_descend(exact, coords, cur, 2e-4, 2e-8, hw)
    _, pts = exact(coords)
    best = float(np.min(cur))
    win = [i for i in range(coords.shape[0]) if cur[i] <= best + cluster_tol]
    return best, [pts[i] for i in win], [float(cur[i]) for i in win]


def _pattern_descend(evaluate, coords, cur, step0, floor, hw, max_sweeps: int = 200):
    """Shared compass/ray loop: descend all walkers until the step floor."""
    k, dim = coords.shape
    idx = np.arange(k)
    offsets = np.concatenate([np.eye(dim), -np.eye(dim)], axis=0)
    step = step0
    sweeps = 0
    while step > floor and sweeps < max_sweeps:
        sweeps += 1
        trial = np.clip(coords[None, :, :] + step * offsets[:, None, :], -hw, hw)
        tv, _ = evaluate(trial.reshape(-1, dim))
        tv = tv.reshape(2 * dim, k)
        pick = np.argmin(tv, axis=0)
        low = tv[pick, idx]
        moving = low < cur
        if not moving.any():
            step *= 0.5
            continue
        coords = coords.copy()
        coords[moving] = trial[pick[moving], idx[moving]]
        cur = np.where(moving, low, cur)
        ray = offsets[pick] * step
        for _ in range(20):
            ray[moving] *= 2.0
            ext = np.clip(coords + ray, -hw, hw)
            ev, _ = evaluate(ext)
            gain = moving & (ev < cur)
            if not gain.any():
                break
            coords[gain] = ext[gain]
            cur = np.where(gain, ev, cur)
            moving = gain
    return coords, cur


# ---------------------------------------------------------------------------
# built-in: geodesic ball


def _origin(n: int) -> geo.ProjPoint:
    e = np.zeros(n + 1, dtype=complex)
    e[-1] = 1.0
    return geo.ProjPoint(e)


def _sphere_directions(rng: np.random.Generator, base: geo.ProjPoint, k: int) -> np.ndarray:
    m = base.rep.shape[0]
    raw = rng.standard_normal((k, m)) + 1j * rng.standard_normal((k, m))
    vec = raw - geo.hdot(raw, base.rep)[:, None] * base.rep
    return vec / geo.vnorm(vec)[:, None]


@dataclass(frozen=True)
class BallDomain(LipschitzDomain):
    """Geodesic ball B(center, r); delta is exact everywhere."""

    center_rep: tuple
    r: float

    def __post_init__(self):
        if not 0 < self.r < geo.HALF_PI:
            raise DomainError("ball radius must lie in (0, pi/2)")
        object.__setattr__(self, "name", "ball")

    @cached_property
    def center(self) -> geo.ProjPoint:
        return geo.ProjPoint(np.array(self.center_rep, dtype=complex))

    @property
    def n(self) -> int:
        return len(self.center_rep) - 1

    def contains_arrays(self, zreps: np.ndarray) -> np.ndarray:
        return geo.dist_arrays(np.asarray(zreps, dtype=complex), self.center.rep) < self.r

    def _exact_delta(self, zreps: np.ndarray):
        zreps = np.asarray(zreps, dtype=complex)
        d = geo.dist_arrays(zreps, self.center.rep)
        vals = np.abs(d - self.r)
        return vals, np.ones(d.shape, dtype=bool), None

    def delta_many(self, zreps: np.ndarray) -> np.ndarray:
        zreps = np.asarray(zreps, dtype=complex)
        d = geo.dist_arrays(zreps, self.center.rep)
        return np.abs(d - self.r)

    def minimizer_feet_many(self, zreps: np.ndarray):
        zreps = np.asarray(zreps, dtype=complex)
        d = geo.dist_arrays(zreps, self.center.rep)
        vals = np.abs(d - self.r)
        # radial feet are unique away from the center and its cut locus
        ok = (d > geo.DEGENERATE_TOL) & (d < geo.HALF_PI - geo.DEGENERATE_TOL)
        foot = geo.exp_arrays(self.center.rep, _safe_log(self.center.rep, zreps), self.r)
        return vals, [np.where(ok[..., None], foot, np.nan)], ok

    def _minimizer_points(self, z: geo.ProjPoint, cluster_tol: float) -> list:
        d = geo.dist(z, self.center)
        if d <= geo.DEGENERATE_TOL:
            # at the center the whole boundary sphere minimizes; report a
            # deterministic spread of representatives
            dirs = _sphere_directions(np.random.default_rng(8128), self.center, 12)
            return [
                geo.normalize(geo.exp_arrays(self.center.rep, u, self.r)) for u in dirs
            ]
        if d >= geo.HALF_PI - geo.DEGENERATE_TOL:
            # at the cut locus of the center a circle of geodesics minimizes;
            # report equally spaced representatives along it
            u = z.rep - geo.hdot(z.rep, self.center.rep) * self.center.rep
            u = u / geo.vnorm(u)
            phases = np.exp(2j * np.pi * np.arange(12) / 12)
            return [
                geo.normalize(geo.exp_arrays(self.center.rep, w * u, self.r))
                for w in phases
            ]
        u = geo.log_map_arrays(self.center.rep, z.rep)
        return [geo.normalize(geo.exp_arrays(self.center.rep, u, self.r))]

    def _atlas_seeds(self):
        rng = np.random.default_rng(441)
        radius = min(0.35, 0.8 * self.r, 0.8 * (geo.HALF_PI - self.r))
        dirs = _sphere_directions(rng, self.center, 250)
        seeds = []
        for u in dirs:
            b = geo.normalize(geo.exp_arrays(self.center.rep, u, self.r))
            seeds.append((b, self._inward_fiber(b), radius))
        return seeds

    def _seed_radius(self) -> float:
        return min(0.35, 0.8 * self.r, 0.8 * (geo.HALF_PI - self.r))

    def _inward_fiber(self, b: geo.ProjPoint) -> geo.TangentVec:
        return geo.TangentVec(b, geo.log_map_arrays(b.rep, self.center.rep))

    def sample_boundary(self, rng: np.random.Generator, k: int) -> np.ndarray:
        dirs = _sphere_directions(rng, self.center, k)
        return geo.normalize_many(geo.exp_arrays(self.center.rep, dirs, self.r))

    def sample_interior(self, rng: np.random.Generator, k: int) -> np.ndarray:
        dirs = _sphere_directions(rng, self.center, k)
        radii = self.r * rng.random(k) ** (1.0 / (2 * self.n))
        return geo.normalize_many(geo.exp_arrays(self.center.rep, dirs, radii))


# ---------------------------------------------------------------------------
# built-in: lens (intersection of two balls)


@dataclass(frozen=True)
class LensDomain(LipschitzDomain):
    """Intersection of two geodesic balls meeting along a corner rim.

    delta is exact wherever at least one radial projection onto a sphere
    lands on the actual boundary sheet and dominates the other sheet's
    lower bound; elsewhere (a neighborhood of the rim) the atlas
    minimization takes over.
    """

    c1_rep: tuple
    c2_rep: tuple
    r1: float
    r2: float

    def __post_init__(self):
        object.__setattr__(self, "name", "lens")
        sep = geo.dist(self.c1, self.c2)
        if not (abs(self.r1 - self.r2) < sep < min(self.r1 + self.r2, geo.HALF_PI)):
            raise DomainError("balls must overlap partially to form a lens")

    @cached_property
    def c1(self) -> geo.ProjPoint:
        return geo.ProjPoint(np.array(self.c1_rep, dtype=complex))

    @cached_property
    def c2(self) -> geo.ProjPoint:
        return geo.ProjPoint(np.array(self.c2_rep, dtype=complex))

    @property
    def n(self) -> int:
        return len(self.c1_rep) - 1

    def contains_arrays(self, zreps: np.ndarray) -> np.ndarray:
        zreps = np.asarray(zreps, dtype=complex)
        return (geo.dist_arrays(zreps, self.c1.rep) < self.r1) & (
            geo.dist_arrays(zreps, self.c2.rep) < self.r2
        )

    def _sheet_data(self, zreps: np.ndarray):
        """Per-sheet distances, validity of radial projection, projections."""
        out = []
        for c, r, co, ro in (
            (self.c1, self.r1, self.c2, self.r2),
            (self.c2, self.r2, self.c1, self.r1),
        ):
            d = geo.dist_arrays(zreps, c.rep)
            dist_sphere = np.abs(d - r)
            interior = (d > geo.DEGENERATE_TOL) & (d < geo.HALF_PI - geo.DEGENERATE_TOL)
            proj = np.where(
                interior[..., None],
                geo.exp_arrays(
                    c.rep,
                    np.where(
                        interior[..., None],
                        _safe_log(c.rep, zreps),
                        0.0,
                    ),
                    r,
                ),
                np.nan,
            )
            on_sheet = interior & (geo.dist_arrays(proj, co.rep) <= ro + 1e-12)
            out.append((dist_sphere, on_sheet, proj))
        return out

    def _exact_delta(self, zreps: np.ndarray):
        zreps = np.asarray(zreps, dtype=complex)
        (d1, v1, p1), (d2, v2, p2) = self._sheet_data(zreps)
        vals = np.where(v1 & (~v2 | (d1 <= d2)), d1, d2)
        valid = (v1 & v2) | (v1 & (d1 <= d2)) | (v2 & (d2 <= d1))
        near1 = v1 & (d1 <= vals + CLUSTER_TOL)
        near2 = v2 & (d2 <= vals + CLUSTER_TOL)
        m1 = np.where(near1[..., None], p1, np.nan)
        m2 = np.where(near2[..., None], p2, np.nan)
        return vals, valid, [m1, m2]

    def _minimizer_points(self, z: geo.ProjPoint, cluster_tol: float) -> list:
        vals, valid, mins = self._exact_delta(z.rep[None, :])
        if bool(np.asarray(valid)[0]):
            pts = [m[0] for m in mins if np.isfinite(m[0]).all()]
            return [geo.normalize(p) for p in _dedupe(pts, max(cluster_tol, POINT_RES))]
        _, pts = self._atlas_delta(z.rep, want_points=True, cluster_tol=cluster_tol)
        return [geo.normalize(p) for p in pts]

    def _atlas_seeds(self):
        rng = np.random.default_rng(772)
        seeds = []
        radius = 0.3 * min(self.r1, self.r2)
        for c, r, co, ro, cap_from in (
            (self.c1, self.r1, self.c2, self.r2, self.c2),
            (self.c2, self.r2, self.c1, self.r1, self.c1),
        ):
            dirs = _sphere_directions(rng, c, 600)
            pts = geo.normalize_many(geo.exp_arrays(c.rep, dirs, r))
            keep = geo.dist_arrays(pts, co.rep) < ro - 0.3 * radius
            for b in pts[keep][:140]:
                bp = geo.normalize(b)
                seeds.append((bp, geo.TangentVec(bp, geo.log_map_arrays(bp.rep, c.rep)), radius))
        for b in self._rim_points(rng, 80):
            bp = geo.normalize(b)
            seeds.append((bp, self._rim_fiber(bp), 0.6 * radius))
        return seeds

    def _seed_radius(self) -> float:
        return 0.25 * min(self.r1, self.r2)

    def _rim_points(self, rng: np.random.Generator, k: int) -> np.ndarray:
        """Corner rim: bisect sphere-1 meridians against the sphere-2 test."""
        pole_dir = geo.log_map_arrays(self.c1.rep, self.c2.rep)
        pole = geo.exp_arrays(self.c1.rep, pole_dir, self.r1)
        out = []
        tries = 0
        while len(out) < k and tries < 40 * k:
            tries += 1
            u = _sphere_directions(rng, self.c1, 1)[0]
            x = geo.exp_arrays(self.c1.rep, u, self.r1)
            if geo.dist_arrays(x, self.c2.rep) <= self.r2:
                continue
            lo, hi = 0.0, 1.0  # slerp parameter from pole (inside) to u (outside)
            for _ in range(60):
                mid = 0.5 * (lo + hi)
                w = _slerp(pole_dir, u, mid)
                xm = geo.exp_arrays(self.c1.rep, w, self.r1)
                if geo.dist_arrays(xm, self.c2.rep) <= self.r2:
                    lo = mid
                else:
                    hi = mid
            w = _slerp(pole_dir, u, 0.5 * (lo + hi))
            out.append(geo.exp_arrays(self.c1.rep, w, self.r1))
        if len(out) < k:
            raise DomainError("rim sampling failed")
        return geo.normalize_many(np.array(out))

    def _rim_fiber(self, b: geo.ProjPoint) -> geo.TangentVec:
        f = geo.log_map_arrays(b.rep, self.c1.rep) + geo.log_map_arrays(b.rep, self.c2.rep)
        return geo.TangentVec(b, f / geo.vnorm(f))

    def _inward_fiber(self, b: geo.ProjPoint) -> geo.TangentVec:
        d1 = float(geo.dist_arrays(b.rep, self.c1.rep)) - self.r1
        d2 = float(geo.dist_arrays(b.rep, self.c2.rep)) - self.r2
        # a patch near the rim sees both sheets, and a radial fiber is nearly
        # tangent to the other sheet there; use the bisector fiber instead
        if max(abs(d1), abs(d2)) < 1.6 * self._seed_radius():
            return self._rim_fiber(b)
        c = self.c1 if abs(d1) < abs(d2) else self.c2
        return geo.TangentVec(b, geo.log_map_arrays(b.rep, c.rep))

    def sample_boundary(self, rng: np.random.Generator, k: int) -> np.ndarray:
        out = []
        while len(out) < k:
            c, r, co, ro = (
                (self.c1, self.r1, self.c2, self.r2)
                if rng.random() < 0.5
                else (self.c2, self.r2, self.c1, self.r1)
            )
            u = _sphere_directions(rng, c, 1)[0]
            x = geo.exp_arrays(c.rep, u, r)
            if geo.dist_arrays(x, co.rep) <= ro:
                out.append(x)
        return geo.normalize_many(np.array(out))

    def sample_interior(self, rng: np.random.Generator, k: int) -> np.ndarray:
        out = []
        while len(out) < k:
            dirs = _sphere_directions(rng, self.c1, 1)
            s = self.r1 * rng.random() ** (1.0 / (2 * self.n))
            x = geo.exp_arrays(self.c1.rep, dirs[0], s)
            if self.contains_arrays(x[None, :])[0]:
                out.append(x)
        return geo.normalize_many(np.array(out))


def _safe_log(base: np.ndarray, zreps: np.ndarray) -> np.ndarray:
    """log_map_arrays that tolerates degenerate rows (they return zeros)."""
    d = geo.dist_arrays(base, zreps)
    good = (d > geo.DEGENERATE_TOL) & (d < geo.HALF_PI - geo.DEGENERATE_TOL)
    safe = np.where(good[..., None], zreps, np.roll(base, 1))
    u = geo.log_map_arrays(base, safe)
    return np.where(good[..., None], u, 0.0)


def _slerp(a: np.ndarray, b: np.ndarray, tau: float) -> np.ndarray:
    """Arc interpolation between two unit tangent directions."""
    c = np.clip(np.real(geo.hdot(a, b)), -1.0, 1.0)
    ang = np.arccos(c)
    if ang < 1e-12:
        return a
    w = (np.sin((1 - tau) * ang) * a + np.sin(tau * ang) * b) / np.sin(ang)
    return w / geo.vnorm(w)


# ---------------------------------------------------------------------------
# built-in: quarter domain


SQRT2M1 = float(np.sqrt(2) - 1)


def _quarter_face_roots(nb2: np.ndarray, nc2: np.ndarray, x: np.ndarray):
    """Critical parameters of s -> |b - s c|^2 / (1 + s^2) on a face ray.

    The derivative vanishes at the roots of x s^2 + (nc2 - nb2) s - x = 0
    (root product -1, so one negative and one positive root).  Rows with
    x ~ 0 degenerate to s = 0, which the disc candidates already cover.
    """
    disc = np.sqrt((nb2 - nc2) ** 2 + 4.0 * x**2)
    with np.errstate(divide="ignore", invalid="ignore"):
        ok = np.abs(x) > 1e-300
        xs = np.where(ok, x, 1.0)
        r1 = np.where(ok, ((nb2 - nc2) + disc) / (2 * xs), np.nan)
        r2 = np.where(ok, ((nb2 - nc2) - disc) / (2 * xs), np.nan)
    return r1, r2


def _quarter_face(u: np.ndarray, b: np.ndarray, c: np.ndarray, s: np.ndarray, imag_face: bool):
    """Nearest-point candidate on the face {w_n = s} (or {w_n = i s}).

    Projects the unit representative onto the complex hyperplane through the
    face; rows whose parameter leaves (0, 1) or whose foot leaves the unit
    ball are masked out (their face minimum sits on an edge that the disc,
    rim, and sphere candidates cover).
    """
    ok = np.isfinite(s) & (s > 1e-12) & (s < 1.0)
    s = np.where(ok, s, 0.5)
    mult = 1j * s if imag_face else s + 0j
    denom = np.sqrt(1.0 + s**2)
    kappa = (b - mult * c) / denom
    val = np.arcsin(np.clip(np.abs(kappa), 0.0, 1.0))
    foot = np.array(u, copy=True)
    foot[..., -2] -= kappa / denom
    foot[..., -1] += kappa * np.conj(mult) / denom
    nf = geo.vnorm(foot)
    ok &= nf > 1e-12
    foot = foot / np.where(nf > 1e-12, nf, 1.0)[..., None]
    ok &= np.abs(foot[..., -1]) ** 2 >= 0.5 - 1e-12
    return np.where(ok, val, np.inf), np.where(ok[..., None], foot, np.nan)


def _quarter_rim(
    u: np.ndarray,
    a: np.ndarray,
    b: np.ndarray,
    c: np.ndarray,
    na: np.ndarray,
    nb: np.ndarray,
    nc: np.ndarray,
    x: np.ndarray,
    imag_face: bool,
):
    """Nearest-point candidate on the sphere rim {|w'|^2 + t^2 = 1, w_n = t}
    (or w_n = i t) for t in [0, 1].

    cos dist to the rim point with parameter t and optimal w' phase is
    (na sqrt(1-t^2) + |b conj(w_n) + c|) / sqrt(2); a coarse grid plus a
    golden-section refinement maximizes it.
    """
    nb2, nc2 = nb**2, nc**2

    def fidelity(t):
        return na * np.sqrt(np.clip(1.0 - t**2, 0.0, None)) + np.sqrt(
            np.clip(nb2 * t**2 + 2.0 * t * x + nc2, 0.0, None)
        )

    grid = np.linspace(0.0, 1.0, 65)
    sampled = np.stack([fidelity(np.full_like(na, t)) for t in grid])
    idx = np.argmax(sampled, axis=0)
    lo = grid[np.maximum(idx - 1, 0)]
    hi = grid[np.minimum(idx + 1, len(grid) - 1)]
    golden = 0.5 * (np.sqrt(5.0) - 1.0)
    for _ in range(48):
        x1 = hi - golden * (hi - lo)
        x2 = lo + golden * (hi - lo)
        keep_hi = fidelity(x1) < fidelity(x2)
        lo = np.where(keep_hi, x1, lo)
        hi = np.where(keep_hi, hi, x2)
    t = 0.5 * (lo + hi)
    val = np.arccos(np.clip(fidelity(t) / np.sqrt(2.0), 0.0, 1.0))
    mult = 1j * t if imag_face else t + 0j
    tail = b * np.conj(mult) + c
    tmag = np.abs(tail)
    phase = np.where(tmag > 1e-300, tail / np.where(tmag > 1e-300, tmag, 1.0), 1.0)
    radial = np.sqrt(np.clip(1.0 - t**2, 0.0, None))
    foot = np.zeros(u.shape, dtype=complex)
    na_ok = na > 1e-300
    block = a * (radial / np.where(na_ok, na, 1.0) * np.conj(phase))[..., None]
    # with no w' mass the optimal rim direction is free; report one
    fallback = np.zeros_like(block)
    fallback[..., 0] = radial
    foot[..., :-2] = np.where(na_ok[..., None], block, fallback)
    foot[..., -2] = mult
    foot[..., -1] = 1.0
    return val, foot / geo.vnorm(foot)[..., None]


@dataclass(frozen=True)
class QuarterDomain(LipschitzDomain):
    """Chart-ball domain excluding the closed first quadrant of the last
    coordinate: {|z~| < 1 and (Re z~_n < 0 or Im z~_n < 0)}.

    Its boundary wedge {z~_n on the two quadrant rays} is foliated by complex
    hypersurfaces, so the domain is Levi flat along the wedge and pseudoconvex
    overall, yet only Lipschitz at the corner.  The boundary splits into
    finitely many pieces -- corner disc {z~_n = 0}, two half-hyperplane faces
    {z~_n on an open quadrant ray}, the unit-sphere part, and the rim circles
    where they meet -- and the nearest point on each piece has a closed form
    (the sphere rims take a 1-D line search), so delta and its minimizing
    feet are exact everywhere; the patch atlas stays as the generic
    cross-check and powers the patch machinery.
    """

    dim: int = 2

    def __post_init__(self):
        object.__setattr__(self, "name", "quarter")
        if self.dim < 2:
            raise DomainError("quarter domain needs n >= 2")

    @property
    def n(self) -> int:
        return self.dim

    def contains_arrays(self, zreps: np.ndarray) -> np.ndarray:
        zreps = np.asarray(zreps, dtype=complex)
        wlast = np.abs(zreps[..., -1]) ** 2
        norm2 = geo.vnorm(zreps) ** 2
        in_chart_ball = wlast > 0.5 * norm2
        with np.errstate(divide="ignore", invalid="ignore"):
            zn = np.where(
                np.abs(zreps[..., -1]) > 1e-300, zreps[..., -2] / zreps[..., -1], 1.0
            )
        return in_chart_ball & ((zn.real < 0) | (zn.imag < 0))

    def _exact_delta(self, zreps: np.ndarray):
        zreps = np.asarray(zreps, dtype=complex)
        u = zreps / geo.vnorm(zreps)[..., None]
        a = u[..., :-2]
        b = u[..., -2]
        c = u[..., -1]
        na = np.linalg.norm(a, axis=-1)
        nb = np.abs(b)
        nc = np.abs(c)
        pair = b * np.conj(c)

        vals = []
        feet = []

        # corner disc {w_n = 0, |w'| <= 1}: hyperplane projection, valid
        # while the foot stays inside the closed unit ball (|w'| <= 1 at the
        # foot is na <= nc)
        ok = na <= nc + 1e-15
        disc_foot = np.array(u, copy=True)
        disc_foot[..., -2] = 0.0
        nf = geo.vnorm(disc_foot)
        ok &= nf > 1e-12
        disc_foot = disc_foot / np.where(nf > 1e-12, nf, 1.0)[..., None]
        vals.append(np.where(ok, np.arcsin(np.clip(nb, 0.0, 1.0)), np.inf))
        feet.append(np.where(ok[..., None], disc_foot, np.nan))

        # disc rim {w_n = 0, |w'| = 1}: best phase alignment gives
        # cos dist = (na + nc)/sqrt(2)
        rim_foot = np.zeros(u.shape, dtype=complex)
        na_ok = na > 1e-300
        blk = a / np.where(na_ok, na, 1.0)[..., None]
        fb = np.zeros_like(blk)
        fb[..., 0] = 1.0
        rim_foot[..., :-2] = np.where(na_ok[..., None], blk, fb)
        rim_foot[..., -1] = np.where(nc > 1e-300, c / np.where(nc > 1e-300, nc, 1.0), 1.0)
        rim_foot = rim_foot / geo.vnorm(rim_foot)[..., None]
        vals.append(np.arccos(np.clip((na + nc) / np.sqrt(2.0), 0.0, 1.0)))
        feet.append(rim_foot)

        # faces {w_n = s} and {w_n = i s}: interior critical points of the
        # hyperplane distance (both roots; a maximum loses the min harmlessly)
        for imag_face, x in ((False, pair.real), (True, pair.imag)):
            for s in _quarter_face_roots(nb**2, nc**2, x):
                v, f = _quarter_face(u, b, c, s, imag_face)
                vals.append(v)
                feet.append(f)

        # sphere {|w| = 1}: radial projection, valid when the foot's w_n
        # leaves the open first quadrant
        nab = np.sqrt(na**2 + nb**2)
        ok = (nab > 1e-12) & (nc > 1e-12)
        sph_foot = np.zeros(u.shape, dtype=complex)
        sph_foot[..., :-1] = u[..., :-1] / np.where(ok, nab, 1.0)[..., None]
        sph_foot[..., -1] = np.where(ok, c / np.where(nc > 1e-300, nc, 1.0), 1.0)
        sph_foot = sph_foot / geo.vnorm(sph_foot)[..., None]
        wn_foot = np.where(
            ok,
            sph_foot[..., -2] / np.where(np.abs(sph_foot[..., -1]) > 1e-300, sph_foot[..., -1], 1.0),
            1.0,
        )
        ok &= (wn_foot.real <= 1e-12) | (wn_foot.imag <= 1e-12)
        vals.append(np.where(ok, np.abs(geo.HALF_PI / 2 - np.arccos(np.clip(nc, 0.0, 1.0))), np.inf))
        feet.append(np.where(ok[..., None], sph_foot, np.nan))

        # sphere rims {|w'|^2 + t^2 = 1} with w_n = t and w_n = i t
        for imag_face, x in ((False, pair.real), (True, pair.imag)):
            v, f = _quarter_rim(u, a, b, c, na, nb, nc, x, imag_face)
            vals.append(v)
            feet.append(f)

        best = np.min(np.stack(vals), axis=0)
        mins = []
        for v, f in zip(vals, feet):
            near = np.isfinite(v) & (v <= best + CLUSTER_TOL)
            mins.append(np.where(near[..., None], f, np.nan))
        return best, np.ones(best.shape, dtype=bool), mins

    def _minimizer_points(self, z: geo.ProjPoint, cluster_tol: float) -> list:
        _, _, mins = self._exact_delta(z.rep[None, :])
        pts = [m[0] for m in mins if np.isfinite(m[0]).all()]
        return [geo.normalize(p) for p in _dedupe(pts, max(cluster_tol, POINT_RES))]

    def core_zone(self, zreps: np.ndarray) -> np.ndarray:
        """Region where the corner-disc form arcsin |w_n| alone gives delta:
        |z~| below sqrt(2)-1 with z~_n in the open third quadrant."""
        zreps = np.asarray(zreps, dtype=complex)
        unit = zreps / geo.vnorm(zreps)[..., None]
        wlast2 = np.abs(unit[..., -1]) ** 2
        in_core = wlast2 > 1.0 / (1.0 + SQRT2M1**2)
        with np.errstate(divide="ignore", invalid="ignore"):
            zn = np.where(
                np.abs(unit[..., -1]) > 1e-300, unit[..., -2] / unit[..., -1], 1.0
            )
        return in_core & (zn.real < 0) & (zn.imag < 0)

    def _corner_dir(self, b: geo.ProjPoint) -> np.ndarray:
        w = np.zeros(self.n, dtype=complex)
        w[-1] = -(1.0 + 1.0j) / np.sqrt(2)
        return w

    def _atlas_seeds(self):
        rng = np.random.default_rng(58)
        seeds = []
        # wedge (flat part): centers on the corner edge and along both rays
        for zp, znv in self._wedge_grid():
            b = self._chart_pt(zp, znv)
            radius = min(
                0.3,
                0.8 * (geo.HALF_PI / 2 - float(geo.dist_arrays(b.rep, _origin(self.n).rep))),
            )
            if radius < 0.02:
                continue
            u = geo.chart_tangent(b, self._corner_dir(b))
            seeds.append((b, geo.TangentVec(b, u.vec / u.norm), radius))
        # sphere part: |z~| = 1 within the open complement quadrants
        origin = _origin(self.n)
        dirs = _sphere_directions(rng, origin, 300)
        pts = geo.normalize_many(geo.exp_arrays(origin.rep, dirs, geo.HALF_PI / 2))
        zn = chart_ratio_coords(pts)[:, -1]
        keep = np.minimum(zn.real, zn.imag) < -0.25
        for b in pts[keep][:80]:
            bp = geo.normalize(b)
            seeds.append(
                (bp, geo.TangentVec(bp, geo.log_map_arrays(bp.rep, origin.rep)), 0.2)
            )
        return seeds

    def _wedge_grid(self):
        out = []
        for ax in np.linspace(-0.8, 0.8, 6):
            for ay in np.linspace(-0.8, 0.8, 6):
                zp = np.full(self.n - 1, 0j)
                zp[-1] = ax + 1j * ay
                if np.linalg.norm(zp) > 0.8:
                    continue
                for znv in (0.0, 0.25, 0.5, 0.75):
                    for phase in (1.0, 1.0j):
                        if znv == 0.0 and phase == 1.0j:
                            continue
                        val = znv * phase
                        if np.sqrt(np.linalg.norm(zp) ** 2 + abs(val) ** 2) < 0.95:
                            out.append((zp.copy(), val))
        return out

    def _chart_pt(self, zp: np.ndarray, znv: complex) -> geo.ProjPoint:
        zt = np.concatenate([zp, [znv]])
        return geo.chart_point(zt)

    def _seed_radius(self) -> float:
        return 0.2

    def _inward_fiber(self, b: geo.ProjPoint) -> geo.TangentVec:
        zt = geo.affine_chart(b)
        r = float(np.linalg.norm(zt))
        origin = _origin(self.n)
        if r < 0.97:
            u = geo.chart_tangent(b, self._corner_dir(b))
            return geo.TangentVec(b, u.vec / u.norm)
        zn = zt[-1]
        if min(zn.real, zn.imag) < -0.08:
            return geo.TangentVec(b, geo.log_map_arrays(b.rep, origin.rep))
        uc = geo.chart_tangent(b, self._corner_dir(b))
        f = uc.vec / uc.norm + geo.log_map_arrays(b.rep, origin.rep)
        return geo.TangentVec(b, f / geo.vnorm(f))

    def sample_boundary(self, rng: np.random.Generator, k: int) -> np.ndarray:
        out = []
        while len(out) < k:
            zp = _disc_sample(rng, self.n - 1)
            if rng.random() < 0.55:
                # wedge: z~_n on a quadrant ray, inside the unit ball
                s = rng.random()
                znv = s * (1.0 if rng.random() < 0.5 else 1.0j)
                if np.linalg.norm(zp) ** 2 + abs(znv) ** 2 < 1.0:
                    out.append(np.concatenate([zp, [znv]]))
            else:
                # sphere: |z~| = 1, excluded quadrant of the last coordinate
                w = rng.standard_normal(2)
                zn = complex(*w)
                zn /= abs(zn)
                if min(zn.real, zn.imag) >= 0:
                    continue
                rad = np.sqrt(max(0.0, 1.0 - np.linalg.norm(zp) ** 2))
                out.append(np.concatenate([zp * 1.0, [zn * rad]]))
        zt = np.array(out)
        return geo.chart_lift_arrays(zt)

    def sample_interior(self, rng: np.random.Generator, k: int) -> np.ndarray:
        out = []
        while len(out) < k:
            zt = _disc_sample(rng, self.n)
            zn = zt[-1]
            if (zn.real < 0) or (zn.imag < 0):
                out.append(zt)
        return geo.chart_lift_arrays(np.array(out))


def _disc_sample(rng: np.random.Generator, m: int) -> np.ndarray:
    """Uniform point of the unit ball of C^m."""
    while True:
        v = rng.random(2 * m) * 2 - 1
        if np.linalg.norm(v) < 1.0:
            return v[:m] + 1j * v[m:]


# ---------------------------------------------------------------------------
# factory


def builtin(name: str, n: int = 2, **params) -> LipschitzDomain:
    """Built-in domain by name: 'ball', 'lens', or 'quarter'."""
    if name == "ball":
        center = params.get("center")
        if center is None:
            center = _origin(n).rep
        r = params.get("r", 0.9)
        return BallDomain(center_rep=tuple(np.asarray(center, dtype=complex)), r=float(r))
    if name == "lens":
        sep = params.get("sep", 0.75)
        r1 = params.get("r1", 0.55)
        r2 = params.get("r2", 0.55)
        c1 = params.get("c1")
        c2 = params.get("c2")
        if c1 is None or c2 is None:
            o = _origin(n)
            e1 = np.zeros(n + 1, dtype=complex)
            e1[0] = 1.0
            c1 = o.rep
            c2 = geo.exp_arrays(o.rep, e1, sep)
        return LensDomain(
            c1_rep=tuple(np.asarray(c1, dtype=complex)),
            c2_rep=tuple(np.asarray(c2, dtype=complex)),
            r1=float(r1),
            r2=float(r2),
        )
    if name == "quarter":
        return QuarterDomain(dim=n)
    raise DomainError(f"unknown builtin domain {name!r}")
