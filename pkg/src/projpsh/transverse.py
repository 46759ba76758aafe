"""Certified transverse boundary field for Lipschitz domains.

Every boundary point p of a Lipschitz domain gets a distinguished companion
v(p) at distance pi/4 whose geodesic pencil crosses the boundary uniformly:
flowing any nearby point z toward v(p) increases the boundary distance at
rate at least A0, and flowing away decreases it at the same rate.  The field
is built as a partition-of-unity blend of per-patch transversals, each patch
certified by sampling before it may contribute, and the blended field is then
certified again as a whole.  The certified pair (A0, R0) powers everything
downstream:

* ``check_monotone_flow`` -- the sampled monotonicity margins themselves;
* ``project_pi``          -- the boundary projection along the field geodesic,
  computed by bisection and sandwiched between delta and delta/A0;
* ``invert_flow``         -- inversion of the flow on a thin collar: given z,
  find the boundary point p and time t with gamma_t(p, v(p)) = z;
* ``gamma_ball_inclusion``-- a flood-fill check that the flow tube of width S
  and depth T around p stays inside a comparison ball.

All certificates are sampled bounds with recorded sample counts -- evidence,
not proofs.  Any certification shortfall raises TransverseError with
diagnostics instead of degrading silently.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass

import numpy as np

from . import domains
from . import geometry as geo

#: distance from a boundary point to its transverse companion
QUARTER_ARC = geo.HALF_PI / 2
#: below this boundary distance a point counts as lying on the boundary
BOUNDARY_EPS = 1e-9
#: interior samples keep their boundary distance above this floor so that
#: log maps toward minimizing feet stay numerically meaningful
DELTA_FLOOR = 1e-7
#: bisection depth for boundary crossings along field geodesics
BISECT_ITERS = 50
#: bumps live on cover balls at full radius; the greedy cover is built at
#: half radius and fresh probes only need to land within PROBE_COVER of a
#: center, so certified points see a raw weight >= cos^2(PROBE_COVER pi/2)
#: and arbitrary boundary points keep a 0.15-radius band of safety
HALF_COVER = 0.5
PROBE_COVER = 0.85


class TransverseError(RuntimeError):
    """A certification failed or a certified property broke at runtime."""


def patch_transversal(patch: domains.BoundaryPatch) -> geo.ProjPoint:
    """Distinguished transverse companion of a boundary patch center.

    The patch chart puts the center at the origin with the inward normal
    direction along -i times the last coordinate axis; the companion is the
    chart point (0, ..., 0, -i), which sits at distance pi/4 from the center
    and sees the patch graph under a uniformly positive angle.
    """
    return patch.transversal()


@dataclass(frozen=True)
class CoverEntry:
    """One certified member of the boundary cover."""

    center: geo.ProjPoint
    radius: float
    transversal: geo.ProjPoint
    lip_const: float
    margin_threshold: float
    worst_margin: float
    pairs: int


@dataclass(frozen=True, eq=False)
class Bumps:
    """Radial cos^2 bumps over the cover, normalized to a partition of unity.

    Each bump lives on the full cover ball and vanishes smoothly at its rim;
    since coverage is certified at half the ball radius, every certified
    point carries total raw weight at least cos^2(pi/4) = 1/2 before
    normalization.
    """

    centers: np.ndarray  # (k, m) unit representatives of the cover centers
    radii: np.ndarray  # (k,) cover ball radii

    def weights(self, unit_rows: np.ndarray) -> np.ndarray:
        rows = np.atleast_2d(np.asarray(unit_rows, dtype=complex))
        pair = rows @ self.centers.conj().T
        d = np.arccos(np.clip(np.abs(pair), 0.0, 1.0))
        scale = geo.HALF_PI / self.radii[None, :]
        raw = np.where(d < self.radii[None, :], np.cos(np.minimum(d * scale, geo.HALF_PI)) ** 2, 0.0)
        total = raw.sum(axis=1)
        uncovered = ~(total > 0.0)
        if uncovered.any():
            raise TransverseError(
                f"{int(uncovered.sum())} of {rows.shape[0]} points lie outside every cover bump"
            )
        return raw / total[:, None]


@dataclass(frozen=True, eq=False)
class TransverseField:
    """A certified transverse field over the boundary of a Lipschitz domain.

    ``a0`` and ``r0`` are the certified rate and radius: for sampled boundary
    points p and z in B(p, r0) inside the closed domain, the initial velocity
    toward v(p) pairs below -a0 with every velocity toward a minimizing
    boundary foot of z.  All further radii derive from these two numbers.
    """

    domain: domains.LipschitzDomain
    cover: tuple
    bumps: Bumps
    a0: float
    r0: float
    proj_radius: float
    collar: float
    lipschitz_v: float
    boundary_bank: np.ndarray
    certificate: dict

    @property
    def a_work(self) -> float:
        """Working transversality rate, strictly below the certified one."""
        return 0.9 * self.a0

    @property
    def pi_radius(self) -> float:
        """Radius on which the boundary projection is defined: flowing
        outward from B(p, pi_radius) exits within the certified ball."""
        return self.r0 / (1.0 + 1.0 / self.a0)

    def tangent_many(self, unit_rows: np.ndarray) -> np.ndarray:
        """Blended unit tangent directions toward the field companions."""
        return _blend_tangent(self.cover, self.bumps, unit_rows)

    def v_many(self, preps: np.ndarray) -> np.ndarray:
        """Raw representatives of v at boundary points.

        Each row is (unit p) + (unit tangent at p), so <v(p), p> = 1 and
        |v(p)|^2 = 2 hold exactly and dist(p, v(p)) = pi/4 up to rounding.
        """
        reps = np.atleast_2d(np.asarray(preps, dtype=complex))
        unit = reps / geo.vnorm(reps)[:, None]
        out = np.empty_like(unit)
        for lo in range(0, unit.shape[0], 2048):
            rows = unit[lo : lo + 2048]
            out[lo : lo + 2048] = rows + _blend_tangent(self.cover, self.bumps, rows)
        return out

    def v(self, p: geo.ProjPoint) -> geo.ProjPoint:
        return geo.normalize(self.v_many(p.rep[None, :])[0])


def _blend_tangent(cover: tuple, bumps: Bumps, unit_rows: np.ndarray) -> np.ndarray:
    """Partition-of-unity blend of the log directions toward the cover
    transversals, renormalized to unit length."""
    rows = np.atleast_2d(np.asarray(unit_rows, dtype=complex))
    w = bumps.weights(rows)
    acc = np.zeros_like(rows)
    for j in np.nonzero(w.any(axis=0))[0]:
        idx = np.nonzero(w[:, j])[0]
        acc[idx] += w[idx, j, None] * geo.log_map_arrays(rows[idx], cover[j].transversal.rep)
    nrm = geo.vnorm(acc)
    if np.any(nrm < 1e-9):
        raise TransverseError("blended transverse direction degenerated to zero")
    return acc / nrm[:, None]


# ---------------------------------------------------------------------------
# construction and certification


def build_field(
    domain: domains.LipschitzDomain,
    budget: int = 10_000,
    bank_size: int = 8000,
    seed: int = 1177,
) -> TransverseField:
    """Build and certify a transverse field over the domain boundary.

    Pipeline: greedily select atlas patches whose half-radius balls cover a
    boundary sample bank (building fresh patches where the atlas is thin);
    certify each selected patch by sampling, shrinking its ball until the
    pairing margin clears the patch threshold 0.9/sqrt(1 + M^2); repeat the
    coverage check against the certified radii and against fresh probe banks
    until no sampled boundary point escapes the cover; then certify the
    blended field as a whole on pairs drawn inside the uniform radius r0 and
    record the global rate a0, the sampled Lipschitz constant of v, and a
    sampled Lipschitz check of the boundary projection.

    ``budget`` counts the (z, q) certification pairs per stage, split across
    patches in the per-patch stage.  Raises TransverseError with diagnostics
    when any stage cannot be certified.
    """
    rng = np.random.default_rng(seed)
    cert: dict = {
        "domain": domain.name,
        "ambient_dim": int(domain.n),
        "seed": int(seed),
        "budget": int(budget),
        "bank_size": int(bank_size),
    }

    bank = geo.normalize_many(domain.sample_boundary(rng, bank_size))
    patches = _greedy_cover(domain, bank, rng)

    share = max(24, budget // max(1, len(patches)))
    entries = [_certify_patch(domain, p, rng, share) for p in patches]

    # repair: certification may have shrunk balls below coverage, and fresh
    # probe banks may expose boundary regions the original bank missed
    entries, rounds = _ensure_coverage(domain, entries, bank, rng, share, HALF_COVER)
    probe_rounds = 0
    for _ in range(8):
        probes = geo.normalize_many(domain.sample_boundary(rng, bank_size))
        before = len(entries)
        entries, extra = _ensure_coverage(domain, entries, probes, rng, share, PROBE_COVER)
        rounds += extra
        probe_rounds += 1
        bank = np.concatenate([bank, probes])
        if len(entries) == before and extra == 0:
            break
    else:
        raise TransverseError("boundary cover did not stabilize under fresh probes")

    radii = np.array([e.radius for e in entries])
    r0 = 0.3 * float(radii.min())
    bumps = Bumps(
        centers=np.stack([e.center.rep for e in entries]), radii=radii.astype(float)
    )
    cert["cover"] = {
        "entries": len(entries),
        "radius_min": float(radii.min()),
        "radius_max": float(radii.max()),
        "repair_rounds": int(rounds),
        "probe_rounds": int(probe_rounds),
        "patch_margins": [
            {
                "radius": float(e.radius),
                "lipschitz": float(e.lip_const),
                "threshold": float(e.margin_threshold),
                "worst_margin": float(e.worst_margin),
                "pairs": int(e.pairs),
            }
            for e in entries
        ],
    }

    worst, pairs, ident = _global_margin(domain, entries, bumps, bank, rng, budget, r0)
    if worst <= 0.0:
        raise TransverseError(
            "blended field failed transversality certification: "
            f"worst pairing margin {worst:.3e} over {pairs} pairs at radius {r0:.3e}"
        )
    a0 = 0.9 * worst
    cert["global"] = {
        "pairs": int(pairs),
        "worst_margin": float(worst),
        "a0": float(a0),
        "r0": float(r0),
    }
    cert["identities"] = ident

    lip_v, lip_pairs = _v_lipschitz(entries, bumps, bank, rng, r0)
    cert["lipschitz_v"] = {"bound": float(lip_v), "pairs": int(lip_pairs)}

    field = TransverseField(
        domain=domain,
        cover=tuple(entries),
        bumps=bumps,
        a0=float(a0),
        r0=float(r0),
        proj_radius=0.0,
        collar=0.0,
        lipschitz_v=float(lip_v),
        boundary_bank=bank,
        certificate=cert,
    )

    # the boundary projection must be Lipschitz with constant 1/a_work on the
    # certified balls; shrink the working radius until the sampled ratios say so
    proj_radius = 0.9 * field.pi_radius
    shrinks = 0
    for _ in range(6):
        trial = dataclasses.replace(
            field, proj_radius=proj_radius, collar=0.45 * a0 * proj_radius
        )
        ratio, ratio_pairs = _pi_lipschitz_probe(trial, rng)
        if ratio <= 1.0 / trial.a_work:
            cert["projection"] = {
                "proj_radius": float(proj_radius),
                "collar": float(trial.collar),
                "lipschitz_bound": float(1.0 / trial.a_work),
                "worst_ratio": float(ratio),
                "pairs": int(ratio_pairs),
                "shrinks": int(shrinks),
            }
            return trial
        proj_radius *= 0.7
        shrinks += 1
    raise TransverseError(
        "boundary projection failed its sampled Lipschitz certification "
        f"(last ratio {ratio:.3e} > {1.0 / (0.9 * a0):.3e})"
    )


def _greedy_cover(domain: domains.LipschitzDomain, bank: np.ndarray, rng) -> list:
    """Pick atlas patches whose half-radius balls greedily cover the bank,
    building fresh patches where no atlas patch reaches."""
    pool = list(domain.atlas)
    centers = np.stack([p.center.rep for p in pool])
    radii = np.array([p.radius for p in pool])
    n_bank = bank.shape[0]
    cover = np.zeros((n_bank, len(pool)), dtype=bool)
    for lo in range(0, n_bank, 2048):
        d = np.arccos(np.clip(np.abs(bank[lo : lo + 2048] @ centers.conj().T), 0.0, 1.0))
        cover[lo : lo + 2048] = d < HALF_COVER * radii[None, :]
    gains = cover.sum(axis=0)
    covered = np.zeros(n_bank, dtype=bool)
    chosen: list = []
    for _ in range(4 * n_bank):
        if covered.all():
            return chosen
        j = int(np.argmax(gains))
        if gains[j] > 0:
            chosen.append(pool[j])
            newly = cover[:, j] & ~covered
        else:
            i = int(np.argmin(covered))
            b = geo.normalize(bank[i])
            patch = domains.build_patch(
                domain.contains_arrays, b, domain._inward_fiber(b),
                domain._seed_radius(), rng,
            )
            if patch is None:
                raise TransverseError(
                    f"could not build a cover patch at a boundary point of {domain.name}"
                )
            chosen.append(patch)
            newly = (
                (geo.dist_arrays(bank, patch.center.rep) < HALF_COVER * patch.radius)
                | (np.arange(n_bank) == i)
            ) & ~covered
        covered |= newly
        gains -= cover[newly].sum(axis=0)
    raise TransverseError("greedy cover failed to terminate")


def _cone_axis_fiber(domain, b: geo.ProjPoint, rng, scales, want: int = 48):
    """Inward fiber along the axis of the boundary cone seen from b.

    Samples interior points in balls at the given scales, reads off the
    outward direction to each sample's minimizing feet, dedupes the resulting
    sheet normals, and points the fiber opposite their sum: the inward normal
    where one sheet dominates at these scales, the cone bisector where an
    edge or seam cuts through -- which is what balances a transversal's
    pairing against every boundary sheet the certification samples see.
    """
    dirs: list = []
    for scale in scales:
        z = _ball_members(domain, b.rep, scale, rng, want)
        if z is None:
            continue
        _, feet, ok = domain.minimizer_feet_many(z)
        for i in range(z.shape[0]):
            if ok[i]:
                rows = [mm[i] for mm in feet if np.isfinite(mm[i]).all()]
            else:
                rows = [q.rep for q in domain.minimizers(geo.ProjPoint(z[i])).points]
            for q in rows:
                u = geo.log_map_arrays(z[i], q)
                u = u - geo.hdot(u, b.rep) * b.rep
                nrm = float(geo.vnorm(u))
                if nrm > 1e-9:
                    dirs.append(u / nrm)
    if not dirs:
        return domain._inward_fiber(b)
    kept: list = []
    for u in dirs:
        if all(float(np.real(geo.hdot(u, v))) < np.cos(0.35) for v in kept):
            kept.append(u)
    axis = -np.sum(kept, axis=0)
    nrm = float(geo.vnorm(axis))
    if nrm < 1e-9:
        return domain._inward_fiber(b)
    return geo.TangentVec(b, axis / nrm)


def _ball_members(domain, prep: np.ndarray, radius: float, rng, want: int):
    """Sample interior points of the domain inside B(p, radius), biased
    toward the rim; returns None when the ball barely meets the domain."""
    found = []
    total = 0
    for _ in range(10):
        k = 3 * want
        g = rng.normal(size=(k, prep.shape[-1])) + 1j * rng.normal(size=(k, prep.shape[-1]))
        w = g - geo.hdot(g, prep)[:, None] * prep
        w = w / geo.vnorm(w)[:, None]
        r = radius * rng.random(k) ** 0.25
        z = geo.exp_arrays(prep, w, r)
        d = domain.delta_many(z)
        keep = domain.contains_arrays(z) & (d > DELTA_FLOOR)
        found.append(z[keep])
        total += int(keep.sum())
        if total >= want:
            break
    z = np.concatenate(found) if found else np.empty((0, prep.shape[-1]), complex)
    if z.shape[0] < max(8, want // 3):
        return None
    return z[:want]


def _pairing_margins(domain, zreps: np.ndarray, u1: np.ndarray):
    """Worst margin -<u1, u_q> over all minimizing feet q of each row.

    u1 holds unit initial velocities at the rows; feet come from the batched
    exact accessor with a per-point fallback for rows it cannot certify.
    """
    worst = np.inf
    pairs = 0
    _, feet, ok = domain.minimizer_feet_many(zreps)
    for m in feet:
        fin = np.isfinite(m).all(axis=-1) & ok
        if not fin.any():
            continue
        u2 = geo.log_map_arrays(zreps[fin], m[fin])
        margin = -np.real(np.sum(u1[fin] * np.conj(u2), axis=-1))
        worst = min(worst, float(margin.min()))
        pairs += int(fin.sum())
    for i in np.nonzero(~ok)[0]:
        for q in domain.minimizers(geo.ProjPoint(zreps[i])).points:
            u2 = geo.log_map_arrays(zreps[i], q.rep)
            worst = min(worst, float(-np.real(np.sum(u1[i] * np.conj(u2)))))
            pairs += 1
    return worst, pairs


def _certify_patch(domain, patch: domains.BoundaryPatch, rng, share: int) -> CoverEntry:
    """Certify one patch transversal, halving its ball until the sampled
    pairing margin clears the patch threshold.

    Patches whose chart fiber is one-sided near a boundary edge have margins
    that converge below their threshold at every radius, or clear it only on
    a tiny ball; both get a second attempt around the cone-axis fiber probed
    at the scale where the margins got stuck -- the scale of the binding
    sheet -- which recenters the transversal in the local boundary cone.
    The attempt certifying the larger ball wins.
    """
    entry, bail = _shrink_certify(domain, patch, rng, share)
    if entry is not None and entry.radius >= 0.25 * domain._seed_radius():
        return entry
    scales = (2.0 * bail, bail, 0.5 * bail)
    fiber = _cone_axis_fiber(domain, patch.center, rng, scales)
    rebuilt = domains.build_patch(
        domain.contains_arrays, patch.center, fiber, domain._seed_radius(), rng
    )
    if rebuilt is not None:
        second, _ = _shrink_certify(domain, rebuilt, rng, share)
        if second is not None and (entry is None or second.radius > entry.radius):
            entry = second
    if entry is not None:
        return entry
    a_req = 0.9 / float(np.sqrt(1.0 + patch.lip_const**2))
    raise TransverseError(
        f"patch at {np.round(patch.center.rep, 4)} failed transversality "
        f"certification at every radius (threshold {a_req:.3f})"
    )


def _shrink_certify(domain, patch: domains.BoundaryPatch, rng, share: int):
    """Inner certification loop: halve the ball until the margin clears the
    threshold, bailing out early when the margins have stopped improving.
    Returns (entry or None, radius at which certification gave up)."""
    a_req = 0.9 / float(np.sqrt(1.0 + patch.lip_const**2))
    vp = patch.transversal()
    radius = float(patch.radius)
    last = -np.inf
    while radius >= 1e-3:
        z = _ball_members(domain, patch.center.rep, radius, rng, share)
        if z is not None:
            u1 = geo.log_map_arrays(z, vp.rep)
            worst, pairs = _pairing_margins(domain, z, u1)
            if worst > a_req:
                return CoverEntry(
                    center=patch.center,
                    radius=radius,
                    transversal=vp,
                    lip_const=float(patch.lip_const),
                    margin_threshold=a_req,
                    worst_margin=worst,
                    pairs=pairs,
                ), radius
            if worst < last + 0.01:
                return None, radius
            last = worst
        radius *= 0.5
    return None, 1e-3


def _ensure_coverage(domain, entries: list, bank: np.ndarray, rng, share: int, frac: float):
    """Extend the certified cover until every bank point sits within frac of
    a certified radius of some center; returns (entries, fill_rounds)."""
    rounds = 0
    for _ in range(2000):
        centers = np.stack([e.center.rep for e in entries])
        radii = np.array([e.radius for e in entries])
        covered = _within_cover(bank, centers, radii, frac)
        if covered.all():
            return entries, rounds
        rounds += 1
        b = geo.normalize(bank[int(np.argmin(covered))])
        patch = domains.build_patch(
            domain.contains_arrays, b, domain._inward_fiber(b),
            domain._seed_radius(), rng,
        )
        if patch is None:
            raise TransverseError(
                f"could not build a cover patch at a boundary point of {domain.name}"
            )
        entries = entries + [_certify_patch(domain, patch, rng, share)]
    raise TransverseError("cover repair failed to terminate")


def _within_cover(rows: np.ndarray, centers: np.ndarray, radii: np.ndarray, frac: float):
    out = np.zeros(rows.shape[0], dtype=bool)
    for lo in range(0, rows.shape[0], 4096):
        d = np.arccos(np.clip(np.abs(rows[lo : lo + 4096] @ centers.conj().T), 0.0, 1.0))
        out[lo : lo + 4096] = (d < frac * radii[None, :]).any(axis=1)
    return out


def _global_margin(domain, entries, bumps, bank, rng, budget: int, r0: float):
    """Certify the blended field: for z in B(p, r0) inside the domain the
    blended velocity at z toward v(p) must pair negatively with every
    velocity toward a minimizing foot of z.  Also records how far the
    algebraic identities of v drift from their exact values."""
    worst = np.inf
    pairs = 0
    ident_pairing = 0.0
    ident_norm = 0.0
    done = 0
    cover = tuple(entries)
    while done < budget:
        k = min(512, budget - done)
        base = bank[rng.integers(0, bank.shape[0], k)]
        g = rng.normal(size=base.shape) + 1j * rng.normal(size=base.shape)
        w = g - geo.hdot(g, base)[:, None] * base
        w = w / geo.vnorm(w)[:, None]
        r = r0 * rng.random(k) ** 0.25
        z = geo.exp_arrays(base, w, r)
        d = domain.delta_many(z)
        keep = domain.contains_arrays(z) & (d > DELTA_FLOOR)
        done += k
        if not keep.any():
            continue
        z, base = z[keep], base[keep]
        vrows = base + _blend_tangent(cover, bumps, base)
        ident_pairing = max(
            ident_pairing, float(np.abs(geo.hdot(vrows, base) - 1.0).max())
        )
        ident_norm = max(
            ident_norm, float(np.abs(geo.vnorm(vrows) ** 2 - 2.0).max())
        )
        u1 = geo.log_map_arrays(z, vrows)
        w_batch, p_batch = _pairing_margins(domain, z, u1)
        worst = min(worst, w_batch)
        pairs += p_batch
    ident = {"pairing_drift": ident_pairing, "norm_drift": ident_norm}
    return worst, pairs, ident


def _v_lipschitz(entries, bumps, bank, rng, r0: float, subset: int = 600):
    """Sampled Lipschitz bound for p -> v(p) over nearby boundary pairs."""
    cover = tuple(entries)
    idx = rng.choice(bank.shape[0], size=min(subset, bank.shape[0]), replace=False)
    rows = bank[idx]
    d = np.arccos(np.clip(np.abs(rows @ rows.conj().T), 0.0, 1.0))
    ii, jj = np.nonzero(np.triu((d > 1e-7) & (d < r0), k=1))
    if ii.size == 0:
        raise TransverseError("no boundary pairs found inside r0 for the Lipschitz probe")
    if ii.size > 4000:
        sel = rng.choice(ii.size, size=4000, replace=False)
        ii, jj = ii[sel], jj[sel]
    va = rows[ii] + _blend_tangent(cover, bumps, rows[ii])
    vb = rows[jj] + _blend_tangent(cover, bumps, rows[jj])
    ratio = geo.dist_arrays(va, vb) / d[ii, jj]
    return 1.1 * float(ratio.max()), int(ii.size)


def _pi_lipschitz_probe(field: TransverseField, rng, bases: int = 6, want: int = 40):
    """Worst sampled ratio |pi_p(z) - pi_p(w)| / dist(z, w) over pairs inside
    the working projection balls."""
    dom = field.domain
    worst = 0.0
    pairs = 0
    for i in range(bases):
        p = field.boundary_bank[rng.integers(0, field.boundary_bank.shape[0])]
        z = _ball_members(dom, p, field.proj_radius, rng, want)
        if z is None:
            continue
        vp = field.v_many(p[None, :])[0]
        t, out = _project_rows(dom, np.broadcast_to(vp, z.shape), z, dom.delta_many(z), field.a0)
        if not out.all():
            raise TransverseError(
                "outward flow failed to exit the domain inside a certified ball"
            )
        dz = geo.dist_arrays(z[:, None, :], z[None, :, :])
        dt = np.abs(t[:, None] - t[None, :])
        ok = dz > 1e-7
        if ok.any():
            worst = max(worst, float((dt[ok] / dz[ok]).max()))
            pairs += int(ok.sum()) // 2
    if pairs == 0:
        raise TransverseError("projection Lipschitz probe drew no usable pairs")
    return worst, pairs


# ---------------------------------------------------------------------------
# certified operations


def _signed_delta(domain, zreps: np.ndarray) -> np.ndarray:
    """Boundary distance signed positive inside the domain."""
    d = domain.delta_many(zreps)
    return np.where(domain.contains_arrays(zreps), d, -d)


def _project_rows(domain, vrows: np.ndarray, zreps: np.ndarray, deltas: np.ndarray, a0: float):
    """Bisection times t with gamma_{-t}(z, v) on the boundary, one per row.

    Rows must already satisfy the projection precondition.  Returns (t, ok)
    where ok flags rows whose outward flow actually exits by delta/a0; a
    False entry contradicts the certificate and is the caller's to report.
    """
    deltas = np.asarray(deltas, dtype=float)
    hi = deltas / a0
    lo = np.zeros_like(hi)
    x_hi = geo.geodesic_arrays(zreps, vrows, -hi)
    ok = ~domain.contains_arrays(x_hi)
    for _ in range(BISECT_ITERS):
        mid = 0.5 * (lo + hi)
        inside = domain.contains_arrays(geo.geodesic_arrays(zreps, vrows, -mid))
        lo = np.where(inside, mid, lo)
        hi = np.where(inside, hi, mid)
    return 0.5 * (lo + hi), ok


def check_monotone_flow(field: TransverseField, p: geo.ProjPoint, z: geo.ProjPoint, t: float):
    """Sampled monotonicity margins of the flow toward v(p) at z.

    Returns (inward, outward): inward = delta(gamma_t(z, v(p))) - delta(z)
    - t*a0 and outward is the analogue for gamma_{-t} with boundary distance
    signed negative outside the domain.  Both are positive for 0 < t inside
    the certified range; t = 0 returns (0, 0) exactly.
    """
    dom = field.domain
    dz = float(dom.delta(z))
    if not (dom.contains(z) or dz <= BOUNDARY_EPS):
        raise TransverseError("flow check needs a point of the closed domain")
    dpz = geo.dist(p, z)
    if dpz > field.r0 + 1e-12:
        raise TransverseError("point lies outside the certified ball around p")
    if not 0.0 <= t < field.r0 - dpz:
        raise TransverseError("flow time outside the certified range [0, r0 - dist(p, z))")
    if t == 0.0:
        return 0.0, 0.0
    vp = field.v_many(p.rep[None, :])[0]
    sd = _signed_delta(dom, geo.geodesic_arrays(z.rep, vp, np.array([t, -t])))
    inward = float(sd[0]) - dz - t * field.a0
    outward = dz - float(sd[1]) - t * field.a0
    return inward, outward


def project_pi(field: TransverseField, p: geo.ProjPoint, z: geo.ProjPoint) -> float:
    """Boundary projection time: the t >= 0 with gamma_{-t}(z, v(p)) on the
    boundary, certified to satisfy delta(z) <= t <= delta(z)/a0."""
    dom = field.domain
    dz = float(dom.delta(z))
    if geo.dist(p, z) > field.pi_radius + 1e-12:
        raise TransverseError("projection point lies outside the certified ball around p")
    if dz <= BOUNDARY_EPS:
        return 0.0
    if not dom.contains(z):
        raise TransverseError("projection needs a point of the closed domain")
    vp = field.v_many(p.rep[None, :])[0]
    t, ok = _project_rows(dom, vp[None, :], z.rep[None, :], np.array([dz]), field.a0)
    if not ok[0]:
        raise TransverseError(
            "outward flow failed to exit the domain within delta/a0 -- "
            "transversality certificate is inconsistent here"
        )
    t = float(t[0])
    if not dz - 1e-9 <= t <= dz / field.a0 + 1e-9:
        raise TransverseError(
            f"projection time {t:.3e} escapes the certified sandwich "
            f"[{dz:.3e}, {dz / field.a0:.3e}]"
        )
    return t


def _flow_fixed_point(field: TransverseField, z: geo.ProjPoint, q0: np.ndarray, iters: int = 60):
    """Iterate q -> landing point of z flowed backward along v(q).

    Returns (residual, boundary rep, t); the residual measures how far
    gamma_t(p, v(p)) lands from z.  The iteration contracts because v
    changes slowly (lipschitz_v) and t stays below the collar depth / a0.
    """
    dom = field.domain
    q = q0 / np.linalg.norm(q0)
    best = (np.inf, q, 0.0)
    for _ in range(iters):
        if float(geo.dist_arrays(z.rep, q)) > field.pi_radius:
            break
        vq = field.v_many(q[None, :])[0]
        dz = float(dom.delta(z))
        t, ok = _project_rows(dom, vq[None, :], z.rep[None, :], np.array([dz]), field.a0)
        if not ok[0]:
            break
        t = float(t[0])
        p_new = geo.geodesic_arrays(z.rep, vq, -t)
        p_new = p_new / np.linalg.norm(p_new)
        vnew = field.v_many(p_new[None, :])[0]
        x = geo.geodesic_arrays(p_new, vnew, t)
        res = float(geo.dist_arrays(x, z.rep))
        if res < best[0]:
            best = (res, p_new, t)
        if res < 1e-9:
            break
        q = p_new
    return best


def invert_flow(field: TransverseField, z: geo.ProjPoint):
    """Invert the boundary flow on the collar: find (p, t) with
    gamma_t(p, v(p)) = z within 1e-8 and t <= delta(z)/a0.

    Seeds the fixed-point iteration with the minimizing feet of z and falls
    back to nearby bank points; raises TransverseError with the best residual
    when no seed converges.
    """
    dom = field.domain
    dz = float(dom.delta(z))
    if not (dom.contains(z) or dz <= BOUNDARY_EPS):
        raise TransverseError("flow inversion needs a point of the closed domain")
    if dz > field.collar + 1e-12:
        raise TransverseError(
            f"point lies deeper than the certified collar ({dz:.3e} > {field.collar:.3e})"
        )
    if dz <= BOUNDARY_EPS:
        return geo.normalize(z.rep), 0.0
    seeds = [q.rep for q in dom.minimizers(z).points]
    order = np.argsort(geo.dist_arrays(z.rep, field.boundary_bank))[:8]
    seeds.extend(field.boundary_bank[i] for i in order)
    best = (np.inf, None, 0.0)
    for q0 in seeds:
        res, prep, t = _flow_fixed_point(field, z, q0)
        if res < best[0]:
            best = (res, prep, t)
        if res < 1e-9:
            break
    res, prep, t = best
    if res > 1e-8 or prep is None:
        raise TransverseError(
            f"flow inversion did not converge: best residual {res:.3e} over "
            f"{len(seeds)} seeds"
        )
    if t > dz / field.a0 + 1e-9:
        raise TransverseError("inverted flow time exceeds delta/a0 -- certificate inconsistent")
    return geo.normalize(prep), float(t)


def gamma_ball_inclusion(
    field: TransverseField,
    p: geo.ProjPoint,
    s_tube: float,
    t_collar: float,
    r_ball: float,
    samples: int = 4000,
    seed: int = 1923,
) -> bool:
    """Sampled certificate that the flow tube of width s_tube and collar
    depth t_collar around p stays inside the closed ball B(p, r_ball).

    The tube component containing p is explored by flood fill over random
    samples concentrated around the geodesic through p and v(p); the
    certificate holds when every reached sample stays within r_ball.  The
    working rate is a_work < a0; (1 + 1/a_work) s_tube + t_collar / a_work
    <= r_ball is required for the certified inclusion, and a call violating
    it still runs but only as a diagnostic (expected False).  r_ball beyond
    the certified projection radius raises, as does exhaustion of the
    sampling budget.
    """
    dom = field.domain
    if s_tube < 0 or t_collar < 0:
        raise TransverseError("tube width and collar depth must be nonnegative")
    if not r_ball < field.proj_radius:
        raise TransverseError("comparison ball exceeds the certified projection radius")
    vp = field.v_many(p.rep[None, :])[0]
    frame = geo.GeodesicFrame.from_points(geo.normalize(p.rep), geo.normalize(vp))
    rng = np.random.default_rng(seed)
    span = min(field.proj_radius, 1.2 * r_ball)
    base = frame.point_at(rng.uniform(-span, span, samples))
    g = rng.normal(size=base.shape) + 1j * rng.normal(size=base.shape)
    w = g - geo.hdot(g, base)[:, None] * base
    w = w / geo.vnorm(w)[:, None]
    rad = s_tube * rng.random(samples) ** 0.25
    x = geo.exp_arrays(base, w, rad)
    d = dom.delta_many(x)
    pred = (
        (dom.contains_arrays(x) | (d <= BOUNDARY_EPS))
        & (geo.dist_to_geodesic_arrays(x, frame.alpha, frame.beta) <= s_tube + 1e-12)
        & (d <= t_collar + 1e-12)
    )
    pts = x[pred]
    if pts.shape[0] == 0 and min(s_tube, t_collar) > 1e-2 * field.proj_radius:
        raise TransverseError("sampling budget exhausted: the flow tube caught no samples")
    if pts.shape[0] > 2500:
        pts = pts[rng.choice(pts.shape[0], size=2500, replace=False)]
    pts = np.concatenate([geo.normalize(p.rep).rep[None, :], pts])
    # flood fill from p with a generous link radius: over-connecting can only
    # add reached points, which keeps the certificate on the safe side
    link = 0.4 * r_ball
    k = pts.shape[0]
    reached = np.zeros(k, dtype=bool)
    reached[0] = True
    frontier = [0]
    while frontier:
        d_front = np.arccos(
            np.clip(np.abs(pts @ pts[frontier].conj().T), 0.0, 1.0)
        ).min(axis=1)
        newly = (d_front < link) & ~reached
        if not newly.any():
            break
        reached |= newly
        frontier = list(np.nonzero(newly)[0])
    span_out = geo.dist_arrays(pts[reached], geo.normalize(p.rep).rep)
    return bool(span_out.max() <= r_ball + 1e-9)
