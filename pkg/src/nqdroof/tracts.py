"""Growth and positivity diagnostics for roof candidates.

Implements the linear-growth ratio table, the tract machinery (arclengths of
sign/level regions on circles |z| = t), the Phragmen-Lindelof lower-bound
chain that forces superlinear growth whenever three disjoint unbounded
regions exist, and the Heins functional for disjoint non-negative
subharmonic functions.  Everything operates through circle samplers so the
same code drives both constructed roof candidates and closed-form synthetic
fields used as oracles.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from .errors import HeinsInputError, TractPinchError
from .roof import RoofCandidate

DEFAULT_M_ANG = 4096


@dataclass
class CircleSample:
    """Field values on the circle |z| = t restricted to the valid region."""

    t: float
    angles: np.ndarray
    values: np.ndarray       # nan where the point is outside the valid region
    valid: np.ndarray

    @property
    def d_theta(self) -> float:
        return 2 * np.pi / len(self.angles)


class FunctionSampler:
    """Closed-form field, optionally masked to a region (synthetic oracles)."""

    def __init__(self, fn: Callable, mask: Optional[Callable] = None):
        self.fn = fn
        self.mask = mask

    def sample_circle(self, t: float, m_ang: int = DEFAULT_M_ANG) -> CircleSample:
        angles = 2 * np.pi * np.arange(m_ang) / m_ang
        z = t * np.exp(1j * angles)
        valid = np.ones(m_ang, dtype=bool) if self.mask is None else np.asarray(self.mask(z), bool)
        vals = np.full(m_ang, np.nan)
        vals[valid] = np.asarray(self.fn(z[valid]), dtype=float)
        return CircleSample(float(t), angles, vals, valid)


class RoofSampler:
    """Circle sampler backed by a constructed roof candidate.

    Within each in-domain angular run the primitive is advanced chord by
    chord, so a full circle costs one path from the basepoint plus one
    closed-form kernel call.
    """

    def __init__(self, candidate: RoofCandidate):
        self.cand = candidate
        self._cache = {}

    def sample_circle(self, t: float, m_ang: int = DEFAULT_M_ANG) -> CircleSample:
        key = (float(t), int(m_ang))
        if key in self._cache:
            return self._cache[key]
        angles = 2 * np.pi * np.arange(m_ang) / m_ang
        z = t * np.exp(1j * angles)
        margin, _, _ = self.cand.ext.clearance(z)
        valid = (margin > 0) & self.cand.domain.contains_many(z)
        if t >= self.cand.ext.r_safe:
            valid[:] = False
        vals = np.full(m_ang, np.nan)
        for lo, hi in _circular_runs(valid):
            idx = np.arange(lo, hi) % m_ang
            chain = z[idx]
            fv = self.cand.eval_f_chain(chain)
            vals[idx] = fv.real + self.cand.C
        sample = CircleSample(float(t), angles, vals, valid)
        self._cache[key] = sample
        return sample


def _circular_runs(mask: np.ndarray):
    """Maximal runs of True on a circular index set, as (lo, hi) with hi > lo.

    Indices are taken mod n; a run crossing the wrap is reported with
    hi > n.  A fully-True mask is the single run (0, n).
    """
    n = len(mask)
    if mask.all():
        return [(0, n)]
    if not mask.any():
        return []
    # roll so position 0 is False, then find ordinary runs
    start = int(np.argmin(mask))
    rolled = np.roll(mask, -start)
    runs = []
    in_run = False
    for i, v in enumerate(rolled):
        if v and not in_run:
            lo = i
            in_run = True
        elif not v and in_run:
            runs.append(((lo + start), (i + start)))
            in_run = False
    if in_run:
        runs.append(((lo + start), (n + start)))
    return runs


@dataclass
class TractArc:
    """One predicate run on a circle: asymptotic region cross-section."""

    tract_id: int
    t: float
    theta: float             # arclength t * delta-angle * count
    lo: int
    hi: int
    max_abs: float

    def overlaps(self, other: "TractArc", n: int) -> bool:
        a = set(np.arange(self.lo, self.hi) % n)
        b = set(np.arange(other.lo, other.hi) % n)
        return bool(a & b)


def _arcs_from_sample(sample: CircleSample, predicate: tuple) -> list:
    mode, level = predicate
    with np.errstate(invalid="ignore"):
        if mode == "below":
            hit = sample.valid & (sample.values < level)
        elif mode == "above":
            hit = sample.valid & (sample.values > level)
        else:
            raise ValueError(f"unknown predicate mode {mode!r}")
    arcs = []
    n = len(hit)
    for k, (lo, hi) in enumerate(_circular_runs(hit)):
        idx = np.arange(lo, hi) % n
        arcs.append(TractArc(
            tract_id=k, t=sample.t,
            theta=float(sample.t * sample.d_theta * (hi - lo)),
            lo=lo, hi=hi,
            max_abs=float(np.nanmax(np.abs(sample.values[idx]))),
        ))
    return arcs


def tract_lengths(sampler, t: float, predicate: tuple = ("below", 0.0),
                  m_ang: int = DEFAULT_M_ANG) -> list:
    """Arclengths of the angular runs where the predicate holds on |z| = t.

    predicate: ("below", level) selects values < level, ("above", level)
    selects values > level.  Returns TractArc entries (ids local to this
    radius, ordered by start angle); empty when the circle misses the region.
    """
    return _arcs_from_sample(sampler.sample_circle(t, m_ang), predicate)


def _match_tracts(prev: list, arcs: list, n: int, next_id: list) -> None:
    """Propagate tract ids by angular overlap with the previous radius."""
    for arc in arcs:
        best = None
        for p in prev:
            if arc.overlaps(p, n):
                if best is None or p.theta > best.theta:
                    best = p
        if best is not None:
            arc.tract_id = best.tract_id
        else:
            arc.tract_id = next_id[0]
            next_id[0] += 1


@dataclass
class TractReport:
    """Tract geometry and growth data over a radius schedule."""

    radii: np.ndarray
    predicate: tuple
    arcs: list                     # list per radius of TractArc
    m_ang: int
    theta_sum_ok: bool             # sum_k theta_k <= 2 pi t at every radius
    global_max: np.ndarray         # running max of |u| over sampled circles
    tract_max: dict                # tract_id -> running max of |u| inside the tract

    def theta_table(self, tract_id: int):
        """(radii, thetas) for one tract; nan where it is absent."""
        th = np.full(len(self.radii), np.nan)
        for i, arcs in enumerate(self.arcs):
            tot = sum(a.theta for a in arcs if a.tract_id == tract_id)
            if tot > 0:
                th[i] = tot
        return self.radii, th

    def tract_ids(self):
        ids = []
        for arcs in self.arcs:
            for a in arcs:
                if a.tract_id not in ids:
                    ids.append(a.tract_id)
        return ids


def analyze_tracts(sampler, radii: Sequence[float],
                   predicate: tuple = ("below", 0.0),
                   m_ang: int = DEFAULT_M_ANG) -> TractReport:
    """Sample circles over the radius schedule and track tract identity."""
    radii = np.asarray(sorted(radii), dtype=float)
    all_arcs = []
    prev = []
    next_id = [0]
    sum_ok = True
    gmax = np.zeros(len(radii))
    tmax: dict = {}
    running = 0.0
    for i, t in enumerate(radii):
        sample = sampler.sample_circle(t, m_ang)
        arcs = _arcs_from_sample(sample, predicate)
        if prev:
            _match_tracts(prev, arcs, m_ang, next_id)
        else:
            for a in arcs:
                a.tract_id = next_id[0]
                next_id[0] += 1
        theta_tot = sum(a.theta for a in arcs)
        if theta_tot > 2 * np.pi * t * (1 + 2.0 / m_ang) + 1e-12:
            sum_ok = False
        with np.errstate(invalid="ignore"):
            circle_max = float(np.nanmax(np.abs(sample.values))) if sample.valid.any() else 0.0
        running = max(running, circle_max)
        gmax[i] = running
        for a in arcs:
            tmax[a.tract_id] = max(tmax.get(a.tract_id, 0.0), a.max_abs)
            a.max_abs = tmax[a.tract_id]
        all_arcs.append(arcs)
        prev = arcs
    return TractReport(radii, predicate, all_arcs, m_ang, sum_ok, gmax, tmax)


def pl_lower_bound(ts, thetas, r: float) -> float:
    """pi * integral of 1/theta from the first tabulated radius up to r.

    The caller compares the result (plus a fitted constant) against
    log of the running maximum; a vanishing theta inside the range means the
    tract pinches off and the bound is undefined there.
    """
    ts = np.asarray(ts, dtype=float)
    thetas = np.asarray(thetas, dtype=float)
    sel = ts <= r + 1e-12
    ts, thetas = ts[sel], thetas[sel]
    if len(ts) < 2:
        raise ValueError("need at least two radii up to r")
    if np.any(~np.isfinite(thetas)) or np.any(thetas <= 0):
        raise TractPinchError("tract arclength vanishes inside the radius range")
    return float(np.pi * np.trapz(1.0 / thetas, ts))


@dataclass
class GrowthReport:
    radii: np.ndarray
    max_abs: np.ndarray
    ratio: np.ndarray            # max |u| on the circle / t
    sup_grad: Optional[float] = None
    base_value: Optional[float] = None

    @property
    def max_ratio(self) -> float:
        return float(np.nanmax(self.ratio))

    def linear_bound(self, r: float) -> Optional[float]:
        """Constructive segment bound |u| <= |z - z*| sup|grad u| + |u(z*)|."""
        if self.sup_grad is None:
            return None
        return r * self.sup_grad + (self.base_value or 0.0)

    def to_rows(self):
        return [
            {"r": float(r), "max_abs_u": float(m), "ratio": float(q)}
            for r, m, q in zip(self.radii, self.max_abs, self.ratio)
        ]


def growth_ratio(sampler, radii: Sequence[float], m_ang: int = 1024,
                 candidate: Optional[RoofCandidate] = None,
                 grad_points=None) -> GrowthReport:
    """max |u| / t over the radius schedule, plus the gradient-based bound."""
    radii = np.asarray(sorted(radii), dtype=float)
    mx = np.full(len(radii), np.nan)
    for i, t in enumerate(radii):
        s = sampler.sample_circle(t, m_ang)
        if s.valid.any():
            with np.errstate(invalid="ignore"):
                mx[i] = np.nanmax(np.abs(s.values))
    sup_grad = None
    base = None
    if candidate is not None:
        if grad_points is None:
            rng = np.random.default_rng(0)
            from .roof import _interior_points
            grad_points = _interior_points(candidate, 200, rng)
        if len(grad_points):
            sup_grad = float(np.abs(candidate.grad_u(grad_points)).max())
        base = float(max(c + candidate.C for c in candidate.boundary_constants))
        base = max(base, abs(float(candidate.eval_u([candidate.z0])[0])))
    return GrowthReport(radii, mx, mx / radii, sup_grad, base)


@dataclass
class CertificateReport:
    verdict: str                  # positive-on-grid | contradiction | inconclusive
    details: dict = field(default_factory=dict)

    def to_dict(self):
        return {"verdict": self.verdict, "details": self.details}


def three_tract_certificate(sampler, radii: Sequence[float],
                            m_ang: int = DEFAULT_M_ANG,
                            level: Optional[float] = None,
                            candidate: Optional[RoofCandidate] = None,
                            extra_points=None) -> CertificateReport:
    """Positivity certificate via the three-region growth contradiction.

    Searches for a negative region; with none, the verdict is positive on the
    sampled set.  Otherwise the negative tract and two disjoint super-level
    tracts (above the largest boundary value) are assembled, and the
    Phragmen-Lindelof chain is evaluated: three disjoint unbounded tracts
    force the running maximum to grow at least like r^(3/2), contradicting
    the linear growth bound; the report carries that bound chain.
    """
    radii = np.asarray(sorted(radii), dtype=float)
    neg = analyze_tracts(sampler, radii, ("below", 0.0), m_ang)
    has_negative = any(len(arcs) > 0 for arcs in neg.arcs)
    if extra_points is not None and candidate is not None and len(extra_points):
        vals = candidate.eval_u(extra_points)
        if float(vals.min()) < 0:
            has_negative = True
    if not has_negative:
        return CertificateReport("positive-on-grid", {
            "radii": radii.tolist(), "m_ang": m_ang,
            "n_extra_points": int(len(extra_points)) if extra_points is not None else 0,
        })

    if level is None:
        if candidate is not None:
            level = float(max(c + candidate.C for c in candidate.boundary_constants))
        else:
            level = 0.0
    pos = analyze_tracts(sampler, radii, ("above", level), m_ang)

    # negative tract with the largest attained |u|
    neg_ids = neg.tract_ids()
    if not neg_ids:
        return CertificateReport("inconclusive", {"reason": "negative region not tract-like"})
    neg_id = max(neg_ids, key=lambda k: neg.tract_max.get(k, 0.0))

    # two distinct persistent super-level tracts
    pos_ids = pos.tract_ids()
    persistence = {}
    for k in pos_ids:
        _, th = pos.theta_table(k)
        persistence[k] = np.sum(np.isfinite(th))
    pos_ids = sorted(pos_ids, key=lambda k: (-persistence[k], k))[:2]
    if len(pos_ids) < 2:
        return CertificateReport("inconclusive", {
            "reason": "fewer than two super-level tracts found",
            "level": level,
        })

    tables = [neg.theta_table(neg_id)] + [pos.theta_table(k) for k in pos_ids]
    reports = [neg, pos, pos]
    ids = [neg_id] + pos_ids
    r0, r1 = radii[0], radii[-1]
    combined = 0.0
    chains = []
    try:
        for (ts, th), rep, k in zip(tables, reports, ids):
            good = np.isfinite(th)
            if good.sum() < 2:
                return CertificateReport("inconclusive", {
                    "reason": f"tract {k} not present across radii"})
            bound = pl_lower_bound(ts[good], th[good], r1)
            combined += bound
            chains.append({
                "tract": int(k),
                "pl_integral": bound,
                "log_Mk": float(np.log(max(rep.tract_max.get(k, 0.0), 1e-300))),
            })
    except TractPinchError as exc:
        return CertificateReport("inconclusive", {"reason": str(exc)})

    # 3 log M(r) >= pi * integral of sum 1/theta_k + const; normalized by the
    # radius range this forces at least (3/2) log growth of M
    span = np.log(r1 / radii[np.isfinite(neg.global_max)][0])
    rate = combined / 3.0 / max(span, 1e-12)
    logM = float(np.log(max(neg.global_max[-1], pos.global_max[-1], 1e-300)))
    return CertificateReport("contradiction", {
        "level": level,
        "tracts": chains,
        "combined_pl_integral": combined,
        "superlinear_rate": rate,
        "log_M_total": logM,
        "note": "three disjoint tracts force superlinear growth of the "
                "running maximum, impossible under the linear growth bound",
    })


@dataclass
class HeinsReport:
    radii: np.ndarray
    values: np.ndarray
    n: int

    def to_rows(self):
        return [{"r": float(r), "value": float(v)}
                for r, v in zip(self.radii, self.values)]


def heins_functional(samplers: list, radii: Sequence[float],
                     m_ang: int = 2048, tol: float = 1e-9) -> HeinsReport:
    """r^(-n/2) * sqrt(sum_k of the circle integrals of u_k^2).

    Inputs must be non-negative, non-constant on the sample set, and
    pairwise disjoint (min(u_j, u_k) = 0 everywhere); a strictly positive
    lower limit of the functional is the growth obstruction for n disjoint
    regions.  Violations raise HeinsInputError naming the pair and point.
    """
    n = len(samplers)
    if n < 2:
        raise HeinsInputError("need at least two samplers")
    radii = np.asarray(sorted(radii), dtype=float)
    values = np.zeros(len(radii))
    seen_spread = [0.0] * n
    for i, t in enumerate(radii):
        circles = [s.sample_circle(t, m_ang) for s in samplers]
        for k, c in enumerate(circles):
            v = np.where(c.valid, c.values, 0.0)
            if np.nanmin(v) < -tol * (1 + np.nanmax(np.abs(v))):
                j = int(np.nanargmin(v))
                raise HeinsInputError(
                    f"sampler {k} is negative at {t * np.exp(1j * c.angles[j])}",
                    pair=(k,), point=t * np.exp(1j * c.angles[j]))
            seen_spread[k] = max(seen_spread[k], float(np.nanmax(v) - np.nanmin(v)))
        for a in range(n):
            for b in range(a + 1, n):
                va = np.where(circles[a].valid, circles[a].values, 0.0)
                vb = np.where(circles[b].valid, circles[b].values, 0.0)
                m = np.minimum(va, vb)
                j = int(np.argmax(np.abs(m)))
                if abs(m[j]) > tol * (1 + max(np.max(va), np.max(vb))):
                    raise HeinsInputError(
                        f"samplers {a} and {b} overlap at "
                        f"{t * np.exp(1j * circles[a].angles[j])}",
                        pair=(a, b), point=t * np.exp(1j * circles[a].angles[j]))
        total = 0.0
        for c in circles:
            v = np.where(c.valid, c.values, 0.0)
            total += np.sum(v**2) * c.d_theta
        values[i] = t ** (-n / 2) * np.sqrt(total)
    for k, spread in enumerate(seen_spread):
        if spread <= tol:
            raise HeinsInputError(f"sampler {k} is constant on the sample set",
                                  pair=(k,))
    return HeinsReport(radii, values, n)
