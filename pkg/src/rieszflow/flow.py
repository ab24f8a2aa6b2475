"""Tangential blow-up flow: rescalings, sup profiles, densities, convergence.

Sup estimation uses nested low-discrepancy point sets: the same unit-scale
cloud serves every radius and smaller-radius samples are folded into larger
ones, so the estimated maximum is monotone in the radius by construction and
difference quotients of exactly radial fields come out exact.
"""

import math
from dataclasses import dataclass, field as dc_field
from typing import Optional

import numpy as np
from scipy.special import gammaln, ndtri
from scipy.stats import qmc

from .fields import FLOOR, ScalarField, make_field
from .linalg import frame
from .rng import stable_hash

SATURATION_LEVEL = FLOOR * 1e-3  # anything at or below counts as a minus-infinity sample


@dataclass(frozen=True)
class FlowSchedule:
    p: float
    radii: tuple
    ns: int = 10000
    nb: int = 4096
    annulus: tuple = (0.5, 1.0)
    seed: int = 0

    def __post_init__(self):
        radii = tuple(float(r) for r in self.radii)
        object.__setattr__(self, "radii", radii)
        object.__setattr__(self, "annulus", (float(self.annulus[0]), float(self.annulus[1])))
        if self.p < 1:
            raise ValueError("flow parameter must be >= 1")
        if len(radii) < 2:
            raise ValueError("need at least two radii")
        if any(r <= 0 for r in radii) or any(a <= b for a, b in zip(radii, radii[1:])):
            raise ValueError("radii must be positive and strictly decreasing")
        a, b = self.annulus
        if not 0 < a < b:
            raise ValueError("annulus must satisfy 0 < a < b")
        if self.ns < 2 or self.nb < 1:
            raise ValueError("sample counts must be positive")


def geometric_radii(j_from: int = 1, j_to: int = 10, base: float = 2.0) -> tuple:
    return tuple(base ** (-j) for j in range(j_from, j_to + 1))


def riesz_kernel(p: float, t):
    """Radial kernel value; strictly increasing in t for every p >= 1."""
    if p < 1:
        raise ValueError("kernel parameter must be >= 1")
    t_arr = np.asarray(t, dtype=np.float64)
    if np.any(t_arr <= 0):
        raise ValueError("kernel argument must be positive")
    if p < 2.0:
        out = t_arr ** (2.0 - p)
    elif p == 2.0:
        out = np.log(t_arr)
    else:
        out = -(t_arr ** (2.0 - p))
    return float(out) if np.isscalar(t) else out


def sphere_area(d: int) -> float:
    """Surface area of the unit sphere in R^d."""
    return float(2.0 * np.pi ** (d / 2.0) / np.exp(gammaln(d / 2.0)))


# ---------------------------------------------------------------------------
# low-discrepancy point clouds


def _sobol(n: int, d: int, seed: int) -> np.ndarray:
    sampler = qmc.Sobol(d, scramble=True, seed=seed)
    m = max(1, int(math.ceil(math.log2(max(2, n)))))
    pts = sampler.random_base2(m)
    return np.clip(pts[:n], 1e-12, 1.0 - 1e-12)


def sphere_cloud(n: int, d: int, seed: int) -> np.ndarray:
    """Antipodally symmetric quasi-uniform points on S^{d-1} (2*(n//2) points)."""
    half = max(1, n // 2)
    g = ndtri(_sobol(half, d, seed))
    g /= np.linalg.norm(g, axis=1, keepdims=True)
    return np.vstack([g, -g])


def ball_cloud(n: int, d: int, seed: int) -> np.ndarray:
    """Quasi-uniform points in the closed unit ball, origin included."""
    u = _sobol(n, d + 1, seed)
    g = ndtri(u[:, :d])
    g /= np.linalg.norm(g, axis=1, keepdims=True)
    radii = u[:, d] ** (1.0 / d)
    pts = g * radii[:, None]
    return np.vstack([np.zeros((1, d)), pts])


def annulus_cloud(n: int, d: int, a: float, b: float, seed: int):
    """Quasi-uniform annulus points plus the integration volume."""
    u = _sobol(n, d + 1, seed)
    g = ndtri(u[:, :d])
    g /= np.linalg.norm(g, axis=1, keepdims=True)
    radii = (a**d + u[:, d] * (b**d - a**d)) ** (1.0 / d)
    vol = sphere_area(d) * (b**d - a**d) / d
    return g * radii[:, None], vol


class _PointBank:
    """Clouds shared by every operation running under one schedule."""

    def __init__(self, schedule: FlowSchedule, dim: int):
        tag = stable_hash("flow-bank", schedule.seed, dim) % (2**32)
        self.sphere = sphere_cloud(schedule.ns, dim, tag)
        self.ball = ball_cloud(schedule.nb, dim, tag + 1)
        self.annulus, self.annulus_volume = annulus_cloud(
            schedule.nb, dim, schedule.annulus[0], schedule.annulus[1], tag + 2
        )
        self.sup_points = np.vstack([self.sphere, self.ball])
        # the first half of each cloud is itself quasi-uniform; the gap between
        # full- and half-sample maxima serves as a data-driven noise floor
        half_sphere = len(self.sphere) // 2
        half_ball = len(self.ball) // 2
        self.half_mask = np.zeros(len(self.sup_points), dtype=bool)
        self.half_mask[: half_sphere // 2] = True
        self.half_mask[half_sphere : half_sphere + half_sphere // 2] = True
        self.half_mask[len(self.sphere) : len(self.sphere) + half_ball] = True


@dataclass
class SupProfile:
    radii: tuple
    values: np.ndarray
    half_values: np.ndarray
    noise: np.ndarray
    saturation: np.ndarray


def sup_profile(u: ScalarField, schedule: FlowSchedule, bank: Optional[_PointBank] = None) -> SupProfile:
    """Nested-maximum profile M(u, r) over the schedule radii."""
    bank = bank or _PointBank(schedule, u.dim)
    radii = schedule.radii
    k = len(radii)
    values = np.empty(k)
    halves = np.empty(k)
    saturation = np.empty(k)
    prev = -np.inf
    prev_half = -np.inf
    for idx in range(k - 1, -1, -1):
        r = radii[idx]
        vals = u.evaluate(r * bank.sup_points)
        prev = max(prev, float(vals.max()))
        prev_half = max(prev_half, float(vals[bank.half_mask].max()))
        values[idx] = prev
        halves[idx] = prev_half
        saturation[idx] = float((vals <= SATURATION_LEVEL).mean())
    if np.all(values <= SATURATION_LEVEL):
        raise ValueError("all samples are minus-infinity saturated")
    noise = np.abs(values - halves)
    return SupProfile(radii=radii, values=values, half_values=halves, noise=noise, saturation=saturation)


def sup_on_ball(u: ScalarField, r: float, n: int, seed: int) -> float:
    """Quasi-uniform estimate of the maximum of u over the closed ball |x| <= r."""
    if r <= 0:
        raise ValueError("radius must be positive")
    tag = stable_hash("sup-on-ball", seed, u.dim) % (2**32)
    pts = np.vstack([sphere_cloud(n // 2, u.dim, tag), ball_cloud(n - n // 2, u.dim, tag + 1)])
    vals = u.evaluate(r * pts)
    if np.all(vals <= SATURATION_LEVEL):
        raise ValueError("all samples are minus-infinity saturated")
    return float(vals.max())


# ---------------------------------------------------------------------------
# the flow


def flow_rescale(u: ScalarField, r: float, p: float, sup_value: Optional[float] = None, schedule: Optional[FlowSchedule] = None) -> ScalarField:
    """One blow-up step.

    For p != 2 the rescaled evaluator is r^{p-2} u(r x); successive rescalings
    compose by multiplying the scale, so (u_r)_s and u_{rs} are the same
    function, not merely close.  For p = 2 the step is u(r x) - M(u, r) with
    the maximum estimated from `sup_value` or the supplied schedule.
    """
    if r <= 0:
        raise ValueError("scale must be positive")
    if p == 2.0:
        if sup_value is None:
            if schedule is None:
                raise ValueError("p = 2 rescaling needs sup_value or a schedule")
            sup_value = sup_on_ball(u, r, schedule.ns, schedule.seed)
        off = float(sup_value)
        ev = lambda pts, _u=u, _r=r, _off=off: _u.evaluate(_r * np.atleast_2d(pts)) - _off
        return make_field(u.dim, f"{u.field_id}@log-scale({r})", ev, kernel_p=u.kernel_p, tags=u.tags)
    base = getattr(u.evaluate, "_flow_base", u)
    scale = getattr(u.evaluate, "_flow_scale", 1.0) * r

    def ev(pts, _b=base, _s=scale, _p=p):
        return _s ** (_p - 2.0) * _b.evaluate(_s * np.atleast_2d(pts))

    ev._flow_base = base
    ev._flow_scale = scale
    out = ScalarField(
        dim=u.dim,
        field_id=f"{base.field_id}@scale({scale})",
        evaluate=ev,
        tags=u.tags,
        kernel_p=u.kernel_p,
    )
    return out


def p2_semigroup_defect(u: ScalarField, r: float, s: float, schedule: FlowSchedule) -> float:
    """Arithmetic defect M(u, r) + M(u_r, s) - M(u, rs) of the p = 2 flow."""
    m_r = sup_on_ball(u, r, schedule.ns, schedule.seed)
    u_r = flow_rescale(u, r, 2.0, sup_value=m_r)
    m_s = sup_on_ball(u_r, s, schedule.ns, schedule.seed)
    m_rs = sup_on_ball(u, r * s, schedule.ns, schedule.seed)
    return m_r + m_s - m_rs


# ---------------------------------------------------------------------------
# density


@dataclass
class QuotientRow:
    r: float
    s: float
    m_r: float
    m_s: float
    k_r: float
    k_s: float
    quotient: float

    def to_dict(self):
        return {
            "r": self.r,
            "s": self.s,
            "m_r": self.m_r,
            "m_s": self.m_s,
            "kp_r": self.k_r,
            "kp_s": self.k_s,
            "quotient": self.quotient,
        }


@dataclass
class DensityReport:
    field_id: str
    p: float
    radii: tuple
    m_values: list
    noise: list
    saturation: list
    rows: list
    theta: float
    theta_richardson: Optional[float]
    violations: list
    sphere_means: list
    ball_means: list
    polar: bool = False

    def to_dict(self):
        return {
            "field": self.field_id,
            "p": self.p,
            "radii": list(self.radii),
            "m_values": self.m_values,
            "noise": self.noise,
            "saturation": self.saturation,
            "pairs": [row.to_dict() for row in self.rows],
            "theta": self.theta,
            "theta_richardson": self.theta_richardson,
            "violations": self.violations,
            "sphere_means": self.sphere_means,
            "ball_means": self.ball_means,
            "polar": self.polar,
        }

    def csv_rows(self):
        header = ["r", "s", "m_r", "m_s", "kp_r", "kp_s", "quotient"]
        rows = [[row.r, row.s, row.m_r, row.m_s, row.k_r, row.k_s, row.quotient] for row in self.rows]
        return header, rows


def _aitken(seq):
    a, b, c = seq[-3], seq[-2], seq[-1]
    denom = c - 2.0 * b + a
    if abs(denom) < 1e-300:
        return c
    return c - (c - b) ** 2 / denom


def density(u: ScalarField, schedule: FlowSchedule, bank: Optional[_PointBank] = None) -> DensityReport:
    """Difference-quotient table, extrapolated density, monotonicity audit."""
    bank = bank or _PointBank(schedule, u.dim)
    profile = sup_profile(u, schedule, bank)
    radii = schedule.radii
    k = len(radii)
    kvals = [riesz_kernel(schedule.p, r) for r in radii]

    rows = []
    quotient = {}
    qnoise = {}
    for i in range(k):
        for j in range(i + 1, k):
            # radii are decreasing: s = radii[i] > r = radii[j]
            dk = kvals[j] - kvals[i]
            if abs(dk) < 1e-14:
                raise ValueError("degenerate kernel difference between schedule radii")
            q = (profile.values[j] - profile.values[i]) / dk
            quotient[(i, j)] = q
            qnoise[(i, j)] = (profile.noise[i] + profile.noise[j]) / abs(dk)
            rows.append(
                QuotientRow(
                    r=radii[j],
                    s=radii[i],
                    m_r=float(profile.values[j]),
                    m_s=float(profile.values[i]),
                    k_r=kvals[j],
                    k_s=kvals[i],
                    quotient=float(q),
                )
            )

    consecutive = [quotient[(i, i + 1)] for i in range(k - 1)]
    theta = float(consecutive[-1])
    theta_rich = None
    if len(consecutive) >= 3:
        tail = consecutive[-3:]
        if (tail[0] <= tail[1] <= tail[2]) or (tail[0] >= tail[1] >= tail[2]):
            theta_rich = float(_aitken(consecutive))

    violations = []
    keys = list(quotient)
    for p1 in keys:
        for p2 in keys:
            if p1 == p2:
                continue
            # pair p1 lies inside pair p2 when both its radii are smaller
            if p1[0] >= p2[0] and p1[1] >= p2[1]:
                floor_noise = 3.0 * max(qnoise[p1], qnoise[p2], 1e-12 * max(1.0, abs(quotient[p2])))
                excess = quotient[p1] - quotient[p2] - floor_noise
                if excess > 0:
                    violations.append(
                        {
                            "inner": [radii[p1[1]], radii[p1[0]]],
                            "outer": [radii[p2[1]], radii[p2[0]]],
                            "excess": float(excess),
                        }
                    )

    sphere_means = []
    ball_means = []
    for r in radii:
        sphere_means.append(float(u.evaluate(r * bank.sphere).mean()))
        ball_means.append(float(u.evaluate(r * bank.ball).mean()))

    return DensityReport(
        field_id=u.field_id,
        p=schedule.p,
        radii=radii,
        m_values=[float(v) for v in profile.values],
        noise=[float(v) for v in profile.noise],
        saturation=[float(v) for v in profile.saturation],
        rows=rows,
        theta=theta,
        theta_richardson=theta_rich,
        violations=violations,
        sphere_means=sphere_means,
        ball_means=ball_means,
    )


def area_volume_averages(u: ScalarField, r: float, n: int, seed: int):
    """Monte-Carlo sphere and ball averages with standard errors."""
    rng = np.random.default_rng(np.random.SeedSequence([seed, stable_hash("area-volume", u.dim)]))
    g = rng.standard_normal((n, u.dim))
    g /= np.linalg.norm(g, axis=1, keepdims=True)
    sphere_vals = u.evaluate(r * g)
    radii = rng.uniform(size=n) ** (1.0 / u.dim)
    ball_vals = u.evaluate(r * g * radii[:, None])
    for vals in (sphere_vals, ball_vals):
        if (vals <= SATURATION_LEVEL).mean() > 0.5:
            raise ValueError("more than half of the samples are minus-infinity saturated")
    return {
        "sphere_mean": float(sphere_vals.mean()),
        "sphere_stderr": float(sphere_vals.std(ddof=1) / math.sqrt(n)),
        "ball_mean": float(ball_vals.mean()),
        "ball_stderr": float(ball_vals.std(ddof=1) / math.sqrt(n)),
    }


# ---------------------------------------------------------------------------
# convergence to a candidate tangent


@dataclass
class ConvergenceReport:
    field_id: str
    candidate_id: str
    p: float
    radii: tuple
    distances: list
    saturations: list
    converged: bool

    def to_dict(self):
        return {
            "field": self.field_id,
            "candidate": self.candidate_id,
            "p": self.p,
            "radii": list(self.radii),
            "distances": self.distances,
            "saturations": self.saturations,
            "converged": self.converged,
        }

    def csv_rows(self):
        header = ["r", "distance", "saturation"]
        rows = [[r, d, s] for r, d, s in zip(self.radii, self.distances, self.saturations)]
        return header, rows


def tangent_convergence(
    u: ScalarField,
    schedule: FlowSchedule,
    candidate: ScalarField,
    tol: float = 1e-3,
    bank: Optional[_PointBank] = None,
) -> ConvergenceReport:
    """L1 annulus distances between the rescaled field and a candidate tangent.

    Convergence verdict: the final distance is below tol and the last three
    distances decrease.
    """
    if candidate.dim != u.dim:
        raise ValueError("candidate lives in a different dimension")
    bank = bank or _PointBank(schedule, u.dim)
    pts = bank.annulus
    vol = bank.annulus_volume
    cand_vals = candidate.evaluate(pts)
    profile = sup_profile(u, schedule, bank) if schedule.p == 2.0 else None
    distances = []
    saturations = []
    for idx, r in enumerate(schedule.radii):
        if schedule.p == 2.0:
            u_r = flow_rescale(u, r, 2.0, sup_value=float(profile.values[idx]))
        else:
            u_r = flow_rescale(u, r, schedule.p)
        vals = u_r.evaluate(pts)
        sat = (vals <= SATURATION_LEVEL).mean()
        if sat > 0.5:
            raise ValueError("rescaled field is minus-infinity saturated on the annulus")
        mask = vals > SATURATION_LEVEL
        distances.append(float(vol * np.abs(vals[mask] - cand_vals[mask]).mean()))
        saturations.append(float(sat))
    tail = distances[-3:]
    converged = distances[-1] < tol and all(a >= b for a, b in zip(tail, tail[1:]))
    return ConvergenceReport(
        field_id=u.field_id,
        candidate_id=candidate.field_id,
        p=schedule.p,
        radii=schedule.radii,
        distances=distances,
        saturations=saturations,
        converged=converged,
    )


def homogeneity_check(
    u: ScalarField,
    p: float,
    scales,
    tol: float,
    theta: Optional[float] = None,
    n_samples: int = 2048,
    seed: int = 0,
    annulus: tuple = (0.5, 1.5),
) -> dict:
    """Residuals of the scaling law u(tau x) = tau^{2-p} u(x) (log form at p = 2)."""
    pts, _ = annulus_cloud(n_samples, u.dim, annulus[0], annulus[1], stable_hash("homog", seed) % (2**32))
    base = u.evaluate(pts)
    if p == 2.0 and theta is None:
        theta = u.density
        if theta is None:
            hi = sup_on_ball(u, 1.0, 4096, seed)
            lo = sup_on_ball(u, 0.5, 4096, seed)
            theta = (lo - hi) / (riesz_kernel(2.0, 0.5) - riesz_kernel(2.0, 1.0))
    residuals = {}
    for tau in scales:
        if tau <= 0:
            raise ValueError("scales must be positive")
        scaled = u.evaluate(tau * pts)
        if p == 2.0:
            res = np.abs(scaled - theta * math.log(tau) - base)
        else:
            res = np.abs(scaled - tau ** (2.0 - p) * base)
        residuals[float(tau)] = float(res.max())
    return {
        "field": u.field_id,
        "p": p,
        "theta": theta,
        "residuals": residuals,
        "passed": all(v <= tol for v in residuals.values()),
        "tol": tol,
    }


def plane_restriction_density(u: ScalarField, w, schedule: FlowSchedule):
    """Density of the restriction of u to the span of a frame.

    Returns (report, polar): the polar flag is set when more than half of all
    restriction samples are minus-infinity saturated.
    """
    w = frame(w)
    pdim = w.shape[1]
    if w.shape[0] != u.dim:
        raise ValueError("frame does not match the ambient dimension")
    if float(schedule.p) != float(pdim):
        raise ValueError("the schedule kernel parameter must equal the plane dimension")
    restricted = make_field(pdim, f"{u.field_id}|plane", lambda ts: u.evaluate(np.atleast_2d(ts) @ w.T))
    bank = _PointBank(schedule, pdim)
    try:
        report = density(restricted, schedule, bank)
    except ValueError:
        # fully saturated restriction: emit a degenerate, flagged report
        sat = [1.0 for _ in schedule.radii]
        report = DensityReport(
            field_id=restricted.field_id,
            p=schedule.p,
            radii=schedule.radii,
            m_values=[FLOOR for _ in schedule.radii],
            noise=[0.0 for _ in schedule.radii],
            saturation=sat,
            rows=[],
            theta=math.nan,
            theta_richardson=None,
            violations=[],
            sphere_means=[FLOOR for _ in schedule.radii],
            ball_means=[FLOOR for _ in schedule.radii],
            polar=True,
        )
        return report, True
    polar = bool(np.mean(report.saturation) > 0.5)
    report.polar = polar
    return report, polar


# ---------------------------------------------------------------------------
# the convex case (p = 1 with the affine-normalized flow)


@dataclass
class ConvexReport:
    field_id: str
    radii: tuple
    monotone_violations: int
    max_monotone_excess: float
    support_error: Optional[float]
    theta_s: float
    limit_sup: float

    def to_dict(self):
        return {
            "field": self.field_id,
            "radii": list(self.radii),
            "monotone_violations": self.monotone_violations,
            "max_monotone_excess": self.max_monotone_excess,
            "support_error": self.support_error,
            "theta_s": self.theta_s,
            "limit_sup": self.limit_sup,
        }


def convex_tangent(
    u: ScalarField,
    schedule: FlowSchedule,
    support: Optional[ScalarField] = None,
    tol: float = 1e-6,
    monotone_tol: float = 1e-9,
    strict: bool = True,
) -> ConvexReport:
    """Blow-up of a convex field: (u(rx) - u(0)) / r on a fixed grid.

    Verifies the pointwise monotone decrease of the rescalings, compares the
    per-point extrapolated limit with a known support function when one is
    available, and reports the spherical density at the origin.  The sphere
    grid is antipodal, so smooth fields give an exactly zero spherical
    density.
    """
    if "convex" not in u.tags:
        raise ValueError("convex_tangent requires a field tagged convex")
    bank = _PointBank(schedule, u.dim)
    n_sphere = len(bank.sphere)
    grid = np.vstack([bank.sphere, bank.ball])
    u0 = float(u.evaluate(np.zeros((1, u.dim)))[0])
    radii = schedule.radii
    table = np.empty((len(radii), len(grid)))
    for i, r in enumerate(radii):
        table[i] = (u.evaluate(r * grid) - u0) / r

    drops = table[1:] - table[:-1]  # must be <= 0 up to tolerance: u_r decreases as r does
    excess = float(drops.max()) if drops.size else 0.0
    violations = int((drops > monotone_tol).sum())
    if strict and violations:
        raise ValueError(f"rescalings increased at {violations} grid points (field not convex)")

    if len(radii) >= 3:
        a, b, c = table[-3], table[-2], table[-1]
        denom = c - 2.0 * b + a
        limits = np.where(np.abs(denom) < 1e-300, c, c - (c - b) ** 2 / np.where(denom == 0, 1.0, denom))
    else:
        limits = table[-1]

    support_field = support or u.tangent
    support_error = None
    if support_field is not None:
        support_error = float(np.abs(limits - support_field.evaluate(grid)).max())

    half = n_sphere // 2
    sphere_limits = limits[:n_sphere]
    theta_s = float(np.sum(sphere_limits[:half] + sphere_limits[half:]) / n_sphere)

    return ConvexReport(
        field_id=u.field_id,
        radii=radii,
        monotone_violations=violations,
        max_monotone_excess=excess,
        support_error=support_error,
        theta_s=theta_s,
        limit_sup=float(limits.max()),
    )
