"""Arclength null-quadrature residual testing against rational test functions.

The identity under test requires the boundary arclength integral of every
admissible analytic function to vanish.  Numerically we probe a finite
dictionary of simple poles g(z) = (z - a)^-k with a in the complement; this
is a necessary-condition test only, with the ellipse exterior kept as a
negative control against a vacuous harness.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .errors import ConfigError, InadmissibleError
from .geometry import Domain
from .quadrature import (DEFAULT_T_SCHEDULE, boundary_integral_task,
                         build_rule, integrate_ds, refine_until)

DEFAULT_STANDOFF = 0.5
DEFAULT_ORDERS = (2, 3)
DICT_MIN = 20
DICT_MAX = 48
GRID_OFFSET = (0.137, 0.071)   # grid origin offset (in spacing units) to avoid symmetry axes


@dataclass(frozen=True)
class TestFunction:
    """Rational probe g(z) = (z - pole)^-order."""

    pole: complex
    order: int

    def __post_init__(self):
        if self.order < 1:
            raise InadmissibleError("order must be a positive integer")

    def __call__(self, z):
        return (np.asarray(z, dtype=complex) - self.pole) ** (-self.order)

    def ray_tail_ds(self, endpoint: complex, outward: complex) -> complex:
        """Exact arclength tail over the outgoing ray endpoint + s*outward."""
        k = self.order
        if k < 2:
            raise InadmissibleError("arclength ray tail diverges for order 1")
        return (endpoint - self.pole) ** (1 - k) * np.conj(outward) / (k - 1)

    def ray_tail_dz(self, endpoint: complex, outward: complex, sign: int) -> complex:
        """Exact dz tail over the ray; sign +1 outgoing, -1 incoming."""
        k = self.order
        if k < 2:
            raise InadmissibleError("contour ray tail diverges for order 1")
        return sign * (endpoint - self.pole) ** (1 - k) / (k - 1)


@dataclass
class Admissibility:
    ok: bool
    reason: str
    tail_increments: list = field(default_factory=list)


def e1_admissible(domain: Domain, g: TestFunction,
                  standoff: float = DEFAULT_STANDOFF,
                  t_schedule: Sequence[float] = DEFAULT_T_SCHEDULE) -> Admissibility:
    """Check that g qualifies as a test function for this domain.

    Pole must sit strictly in the complement at the standoff distance, the
    order must make |g| integrable in arclength (order >= 2 whenever some
    boundary component is unbounded), and the numerical arclength tail of
    |g| must shrink along the truncation schedule.
    """
    dist = domain.boundary_distance(g.pole)
    if dist < standoff:
        return Admissibility(False, f"pole within standoff of boundary (dist {dist:.3g})")
    if domain.contains_many([g.pole])[0]:
        return Admissibility(False, "pole lies inside the domain")
    if domain.has_unbounded and g.order < 2:
        return Admissibility(False, "order 1 is not arclength-integrable on unbounded boundaries")

    increments = []
    if domain.has_unbounded:
        prev = None
        for T in t_schedule[:3]:
            rule = build_rule(domain, n_closed=64, n_unbounded=256, T=T)
            val = integrate_ds(rule, lambda z: np.abs(g(z)), tails="none").value.real
            if prev is not None:
                increments.append(val - prev)
            prev = val
        if len(increments) >= 2 and not (increments[-1] < 0.8 * increments[0] + 1e-14):
            return Admissibility(False, "arclength tail of |g| is not decreasing along the "
                                 "truncation schedule", increments)
    return Admissibility(True, "admissible", increments)


@dataclass
class ResidualRow:
    pole: complex
    order: int
    value: complex
    error_estimate: float
    converged: bool

    @property
    def magnitude(self) -> float:
        return abs(self.value)

    def to_dict(self) -> dict:
        return {
            "pole": [self.pole.real, self.pole.imag],
            "order": self.order,
            "residual": [self.value.real, self.value.imag],
            "abs_residual": self.magnitude,
            "error_estimate": self.error_estimate,
            "converged": self.converged,
        }


def nqd_residual(domain: Domain, g: TestFunction, tol: float = 1e-10,
                 n_closed: int = 256, n_unbounded: int = 512,
                 n_max: int = 4096,
                 t_schedule: Sequence[float] = DEFAULT_T_SCHEDULE,
                 standoff: float = DEFAULT_STANDOFF) -> ResidualRow:
    """Refined boundary arclength integral of an admissible test function."""
    adm = e1_admissible(domain, g, standoff=standoff, t_schedule=t_schedule)
    if not adm.ok:
        raise InadmissibleError(adm.reason)
    task = boundary_integral_task(domain, g, measure="ds", n_closed=n_closed,
                                  n_unbounded=n_unbounded, n_max=n_max, tails=g)
    res = refine_until(task, tol=tol, n_max=n_max, t_schedule=t_schedule)
    return ResidualRow(g.pole, g.order, res.value, res.error_estimate, res.converged)


def default_dictionary(domain: Domain, standoff: float = DEFAULT_STANDOFF,
                       orders: Sequence[int] = DEFAULT_ORDERS,
                       min_size: int = DICT_MIN, max_size: int = DICT_MAX) -> list:
    """Poles on a coarse complement grid at the standoff distance.

    The grid is refined until at least ``min_size`` admissible members exist;
    the origin carries a fixed fractional offset so mirror-symmetric domains
    still receive symmetry-breaking probes.
    """
    ref = domain.ref
    core = ref.nodes[np.abs(ref.nodes) <= 10 * np.median(np.abs(ref.nodes))]
    center = core.mean()
    half = max(2.0 * ref.scale, abs(domain.basepoint - center) + ref.scale,
               4.0 * standoff)
    x0, x1 = center.real - half, center.real + half
    y0, y1 = center.imag - half, center.imag + half
    span = max(x1 - x0, y1 - y0)

    orders = tuple(orders)
    if not domain.has_unbounded and 1 not in orders:
        orders = (1,) + orders

    spacing = span / 8
    for _ in range(8):
        nx = max(2, int(np.ceil((x1 - x0) / spacing)))
        ny = max(2, int(np.ceil((y1 - y0) / spacing)))
        gx = x0 + (np.arange(nx) + GRID_OFFSET[0]) * spacing
        gy = y0 + (np.arange(ny) + GRID_OFFSET[1]) * spacing
        pts = (gx[:, None] + 1j * gy[None, :]).ravel()
        dist, _ = domain.nearest_boundary(pts)
        inside = domain.contains_many(pts)
        ok = (~inside) & (dist >= standoff)
        poles = pts[ok]
        if len(poles) * len(orders) >= min_size:
            break
        spacing /= 2
    if len(poles) == 0:
        raise ConfigError("no admissible poles found in the complement")
    # deterministic selection: closest to the boundary first
    dsel, _ = domain.nearest_boundary(poles)
    order_idx = np.lexsort((poles.imag, poles.real, np.round(dsel, 6)))
    poles = poles[order_idx][:max(1, max_size // len(orders))]
    out = [TestFunction(complex(p), int(k)) for p in poles for k in orders]
    return out[:max_size]


@dataclass
class VerificationReport:
    domain_name: str
    tol: float
    rows: list
    verdict: str            # "pass" | "fail" | "unconverged"
    max_abs_residual: float

    @property
    def passed(self) -> bool:
        return self.verdict == "pass"

    def to_dict(self) -> dict:
        return {
            "domain": self.domain_name,
            "tol": self.tol,
            "verdict": self.verdict,
            "max_abs_residual": self.max_abs_residual,
            "n_tests": len(self.rows),
            "rows": [r.to_dict() for r in self.rows],
        }


def verify_nqd(domain: Domain, dictionary: Optional[list] = None,
               tol: float = 1e-6, standoff: float = DEFAULT_STANDOFF,
               orders: Sequence[int] = DEFAULT_ORDERS,
               n_closed: int = 256, n_unbounded: int = 512,
               n_max: int = 4096,
               t_schedule: Sequence[float] = DEFAULT_T_SCHEDULE) -> VerificationReport:
    """Aggregate the residual test over a dictionary of admissible poles."""
    if dictionary is None:
        dictionary = default_dictionary(domain, standoff=standoff, orders=orders)
    if not dictionary:
        raise ConfigError("empty test-function dictionary")
    rows = []
    refine_tol = 0.1 * tol
    for g in dictionary:
        adm = e1_admissible(domain, g, standoff=standoff, t_schedule=t_schedule)
        if not adm.ok:
            continue
        rows.append(nqd_residual(domain, g, tol=refine_tol,
                                 n_closed=n_closed, n_unbounded=n_unbounded,
                                 n_max=n_max, t_schedule=t_schedule,
                                 standoff=standoff))
    if not rows:
        raise ConfigError("no admissible members in the dictionary")
    max_abs = max(r.magnitude for r in rows)
    failed = any(max(r.magnitude - r.error_estimate, 0.0) >= tol for r in rows)
    unconv = any(not r.converged for r in rows)
    verdict = "fail" if failed else ("unconverged" if unconv else "pass")
    return VerificationReport(domain.name, tol, rows, verdict, max_abs)
