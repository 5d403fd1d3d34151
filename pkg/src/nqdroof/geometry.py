"""Planar domains bounded by finitely many smooth oriented curves.

A domain is represented by its boundary components, each a smooth regular
parameterization oriented so the domain lies on the left.  With that
convention the inward unit normal is exactly ``i * T`` where ``T`` is the
unit tangent.  Closed components are 2*pi-periodic Jordan curves; unbounded
components are arcs z(t) with |z(t)| -> infinity as t -> +-infinity,
carrying the limits of the conjugate unit tangent at each end.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable, Optional, Sequence

import numpy as np

from . import kernels
from .errors import AmbiguousPointError, DomainError, MalformedCurveError

DERIV_EPS = 1e-13          # |z'(t)| below this counts as a degenerate node
MEMBERSHIP_TOL = 1e-9      # relative boundary-distance tolerance for contains()
REF_N_CLOSED = 512         # reference sampling used for membership / distances
REF_N_UNBOUNDED = 1024
DEFAULT_WINDOW = 200.0     # parameter window when a component does not cap it


@dataclass(frozen=True)
class CurveComponent:
    """One oriented boundary curve.

    kind        "closed" (t in [0, 2*pi) periodic) or "unbounded" (t in R).
    param       vectorized map t -> z(t).
    deriv       vectorized map t -> z'(t).
    t_max       hard parameter window cap for unbounded components.
    asym        (c_minus, c_plus): limits of conj(z'/|z'|) as t -> -/+ infinity.
    """

    kind: str
    param: Callable
    deriv: Callable
    t_max: Optional[float] = None
    asym: Optional[tuple] = None
    label: str = ""

    def __post_init__(self):
        if self.kind not in ("closed", "unbounded"):
            raise MalformedCurveError(f"unknown curve kind {self.kind!r}")

    def point(self, t):
        return np.asarray(self.param(np.asarray(t, dtype=float)), dtype=complex)

    def derivative(self, t):
        return np.asarray(self.deriv(np.asarray(t, dtype=float)), dtype=complex)

    def reversed(self) -> "CurveComponent":
        """Same trace, opposite traversal (domain switches side)."""
        p, d = self.param, self.deriv
        asym = None
        if self.asym is not None:
            cm, cp = self.asym
            asym = (-cp, -cm)
        return CurveComponent(
            kind=self.kind,
            param=lambda t: p(-np.asarray(t, dtype=float)),
            deriv=lambda t: -d(-np.asarray(t, dtype=float)),
            t_max=self.t_max,
            asym=asym,
            label=self.label + "~reversed" if self.label else "reversed",
        )

    def window(self, requested: float) -> float:
        """Effective truncation parameter for a requested window."""
        if self.t_max is None:
            return float(requested)
        return float(min(requested, self.t_max))


def tangent_at(c: CurveComponent, t) -> complex:
    """Unit tangent z'(t)/|z'(t)| at parameter t."""
    d = c.derivative(t)
    mag = np.abs(d)
    if np.any(mag < DERIV_EPS):
        raise MalformedCurveError(f"degenerate derivative |z'({t})| = {np.min(mag):.3e}")
    return d / mag


def inward_normal_at(c: CurveComponent, t) -> complex:
    """Inward unit normal i*T (domain on the left of the traversal)."""
    return 1j * tangent_at(c, t)


@dataclass(frozen=True)
class _RefSampling:
    """Fixed-resolution boundary sampling backing membership and distances."""

    nodes: np.ndarray          # concatenated sample points
    tangents: np.ndarray       # unit tangents at the samples
    comp_ids: np.ndarray       # component index per sample
    t_values: np.ndarray       # parameter per sample
    spacing: np.ndarray        # local arclength spacing per sample
    closed_slices: tuple       # (comp_index, slice) for closed components
    scale: float               # coarse geometric scale of the core region


def _reference_sampling(components) -> _RefSampling:
    nodes, tangents, comp_ids, t_vals, spacing = [], [], [], [], []
    closed_slices = []
    offset = 0
    for ci, comp in enumerate(components):
        if comp.kind == "closed":
            n = REF_N_CLOSED
            t = 2 * np.pi * np.arange(n) / n
            w = np.full(n, 2 * np.pi / n)
            closed_slices.append((ci, slice(offset, offset + n)))
        else:
            n = REF_N_UNBOUNDED
            T = comp.window(DEFAULT_WINDOW)
            S = np.arcsinh(T)
            s = np.linspace(-S, S, n)
            t = np.sinh(s)
            w = np.gradient(t)
        z = comp.point(t)
        dz = comp.derivative(t)
        mag = np.abs(dz)
        if np.any(mag < DERIV_EPS):
            raise MalformedCurveError(
                f"component {ci}: degenerate derivative at sampled parameter")
        nodes.append(z)
        tangents.append(dz / mag)
        comp_ids.append(np.full(n, ci))
        t_vals.append(t)
        spacing.append(np.abs(w) * mag)
        offset += n
    nodes = np.concatenate(nodes)
    core = nodes[np.abs(nodes) <= 10 * np.median(np.abs(nodes))]
    scale = float(np.median(np.abs(core - core.mean()))) or 1.0
    return _RefSampling(
        nodes=nodes,
        tangents=np.concatenate(tangents),
        comp_ids=np.concatenate(comp_ids),
        t_values=np.concatenate(t_vals),
        spacing=np.concatenate(spacing),
        closed_slices=tuple(closed_slices),
        scale=scale,
    )


@dataclass(frozen=True)
class Domain:
    """Open connected region bounded by the given components (domain on left)."""

    components: tuple
    basepoint: complex
    name: str = "custom"

    @cached_property
    def ref(self) -> _RefSampling:
        return _reference_sampling(self.components)

    @property
    def has_unbounded(self) -> bool:
        return any(c.kind == "unbounded" for c in self.components)

    # -- membership ----------------------------------------------------

    def nearest_boundary(self, points):
        """(distance, sample index) of the closest reference boundary sample."""
        pts = np.atleast_1d(np.asarray(points, dtype=complex))
        return kernels.nearest_node(self.ref.nodes, pts)

    def contains_many(self, points) -> np.ndarray:
        """Vectorized membership; points on a boundary sample classify as outside."""
        pts = np.atleast_1d(np.asarray(points, dtype=complex))
        inside = np.ones(pts.shape, dtype=bool)
        dist, idx = self.nearest_boundary(pts)
        on_boundary = dist < 1e-12 * (1.0 + np.abs(pts))
        # winding of all closed components must vanish for points of the domain
        with np.errstate(divide="ignore", invalid="ignore"):
            for _, sl in self.ref.closed_slices:
                z = self.ref.nodes[sl]
                znext = np.roll(z, -1)
                ang = np.angle((znext[None, :] - pts[:, None]) / (z[None, :] - pts[:, None]))
                wind = np.rint(np.nansum(ang, axis=1) / (2 * np.pi)).astype(int)
                inside &= wind == 0
        if self.has_unbounded:
            unb = np.array([self.components[c].kind == "unbounded"
                            for c in self.ref.comp_ids[idx]])
            side = np.imag(np.conj(self.ref.tangents[idx]) * (pts - self.ref.nodes[idx]))
            inside &= np.where(unb, side > 0, True)
        inside[on_boundary] = False
        return inside

    def contains(self, p) -> bool:
        """Membership of a single point; ambiguous near the boundary."""
        p = complex(p)
        dist, idx = self.nearest_boundary(p)
        tol = MEMBERSHIP_TOL * (1.0 + abs(p))
        if dist[0] < tol:
            raise AmbiguousPointError(
                f"point {p} is within {dist[0]:.3e} of the boundary")
        return bool(self.contains_many([p])[0])

    def boundary_distance(self, p) -> float:
        return float(self.nearest_boundary(p)[0][0])


def contains(d: Domain, p) -> bool:
    return d.contains(p)


def feature_size(d: Domain, sample_index: int) -> float:
    """Coarse local feature size at a reference boundary sample.

    Minimum of the distance to the other components and the local radius of
    curvature proxy; used to place membership probes.
    """
    ref = d.ref
    z = ref.nodes[sample_index]
    ci = ref.comp_ids[sample_index]
    other = ref.nodes[ref.comp_ids != ci]
    d_other = np.min(np.abs(other - z)) if other.size else np.inf
    # curvature proxy from neighboring samples of the same component
    mask = ref.comp_ids == ci
    zs = ref.nodes[mask]
    j = int(np.argmin(np.abs(zs - z)))
    lo, hi = max(0, j - 2), min(len(zs) - 1, j + 2)
    chord = abs(zs[hi] - zs[lo])
    arc = np.sum(np.abs(np.diff(zs[lo:hi + 1])))
    if arc > 0 and arc > chord:
        kappa_proxy = np.sqrt(max(arc**2 - chord**2, 0.0)) / arc**2 * 8
        r_curv = 1.0 / kappa_proxy if kappa_proxy > 0 else np.inf
    else:
        r_curv = np.inf
    return float(min(d_other, r_curv, 10 * ref.scale))


# -- catalog ------------------------------------------------------------

def _disk_exterior(r: float) -> Domain:
    if r <= 0:
        raise DomainError("disk-exterior radius must be positive")
    comp = CurveComponent(
        kind="closed",
        param=lambda t: r * np.exp(-1j * t),
        deriv=lambda t: -1j * r * np.exp(-1j * t),
        label=f"circle(r={r}, clockwise)",
    )
    return Domain((comp,), basepoint=complex(3 * r), name=f"disk-exterior({r:g})")


def _halfplane() -> Domain:
    comp = CurveComponent(
        kind="unbounded",
        param=lambda t: t + 0j,
        deriv=lambda t: np.ones_like(np.asarray(t, dtype=float)) + 0j,
        t_max=None,
        asym=(1.0 + 0j, 1.0 + 0j),
        label="real axis (left to right)",
    )
    return Domain((comp,), basepoint=1j, name="halfplane")


HHP_WINDOW = 18.0  # cosh(18) ~ 3.3e7: tail densities match their limits to ~1e-8


def _hhp() -> Domain:
    # region between y = pi/2 + cosh(x) and y = -pi/2 - cosh(x)
    upper = CurveComponent(
        kind="unbounded",
        param=lambda t: -t + 1j * (np.pi / 2 + np.cosh(t)),
        deriv=lambda t: -np.ones_like(np.asarray(t, dtype=float)) + 1j * np.sinh(t),
        t_max=HHP_WINDOW,
        asym=(1j, -1j),
        label="upper cosh curve (right to left)",
    )
    lower = CurveComponent(
        kind="unbounded",
        param=lambda t: t - 1j * (np.pi / 2 + np.cosh(t)),
        deriv=lambda t: np.ones_like(np.asarray(t, dtype=float)) - 1j * np.sinh(t),
        t_max=HHP_WINDOW,
        asym=(-1j, 1j),
        label="lower cosh curve (left to right)",
    )
    return Domain((upper, lower), basepoint=0j, name="hhp")


def _ellipse_exterior(a: float, b: float) -> Domain:
    if a <= 0 or b <= 0:
        raise DomainError("ellipse semi-axes must be positive")
    comp = CurveComponent(
        kind="closed",
        param=lambda t: a * np.cos(t) - 1j * b * np.sin(t),
        deriv=lambda t: -a * np.sin(t) - 1j * b * np.cos(t),
        label=f"ellipse(a={a}, b={b}, clockwise)",
    )
    return Domain((comp,), basepoint=complex(3 * max(a, b)),
                  name=f"ellipse-exterior({a:g},{b:g})")


CATALOG_INFO = {
    "disk-exterior": dict(
        params="r (default 1)",
        classification="compact boundary: the only case, verified positive",
    ),
    "halfplane": dict(
        params="none",
        classification="one unbounded boundary component: the only case, verified positive",
    ),
    "hhp": dict(
        params="none",
        classification=("two unbounded components, simply connected: "
                        "the region -pi/2 - cosh(x) < y < pi/2 + cosh(x)"),
    ),
    "ellipse-exterior": dict(
        params="a,b (default 2,1)",
        classification=("negative control: satisfies the area identity "
                        "but not the arclength identity"),
    ),
}


def catalog(name: str, params: Sequence[float] = ()) -> Domain:
    """Construct one of the built-in classified domains."""
    params = tuple(float(p) for p in params)
    if name == "disk-exterior":
        return _disk_exterior(params[0] if params else 1.0)
    if name == "halfplane":
        return _halfplane()
    if name == "hhp":
        return _hhp()
    if name == "ellipse-exterior":
        if params and len(params) != 2:
            raise DomainError("ellipse-exterior takes two parameters a,b")
        a, b = params if params else (2.0, 1.0)
        return _ellipse_exterior(a, b)
    raise DomainError(f"unknown catalog name {name!r}")


def catalog_from_spec(spec: str) -> Domain:
    """Parse 'name' or 'name:p1,p2' into a catalog domain."""
    if ":" in spec:
        name, rest = spec.split(":", 1)
        params = [float(x) for x in rest.split(",") if x.strip()]
    else:
        name, params = spec, []
    return catalog(name, params)


# -- validation ----------------------------------------------------------

def validate_domain(d: Domain) -> dict:
    """Check structural invariants; raises DomainError / MalformedCurveError.

    Returns a small diagnostics dict (tail-convergence thresholds etc.).
    """
    ref = d.ref
    diag = {}
    # regular parameterization was already enforced while sampling
    # closed components must be simple at the sampled resolution
    for ci, sl in ref.closed_slices:
        z = ref.nodes[sl]
        n = len(z)
        sp = np.median(ref.spacing[sl])
        dmat = np.abs(z[None, :] - z[:, None])
        gap = np.minimum(np.abs(np.arange(n)[None, :] - np.arange(n)[:, None]),
                         n - np.abs(np.arange(n)[None, :] - np.arange(n)[:, None]))
        far = gap > 4
        if far.any() and dmat[far].min() < 0.5 * sp:
            raise MalformedCurveError(f"component {ci} self-intersects at sampled resolution")
    # pairwise disjoint components
    for i in range(len(d.components)):
        zi = ref.nodes[ref.comp_ids == i]
        for j in range(i + 1, len(d.components)):
            zj = ref.nodes[ref.comp_ids == j]
            dmin = np.min(np.abs(zi[:, None] - zj[None, ::4]))
            if dmin < 1e-9 * ref.scale:
                raise DomainError(f"components {i} and {j} are not disjoint")
    # basepoint strictly inside
    dist, _ = d.nearest_boundary(d.basepoint)
    if dist[0] <= 0:
        raise DomainError("basepoint lies on the boundary")
    if not d.contains_many([d.basepoint])[0]:
        raise DomainError("basepoint is not inside the domain")
    diag["basepoint_clearance"] = float(dist[0])
    # the domain must be unbounded; probe far directions within the sampled
    # range, including the bisectors of the sectors between unbounded ends
    # (funnel-shaped domains can be missed by uniform directions alone)
    core = np.abs(ref.nodes[np.abs(ref.nodes) <= 10 * np.median(np.abs(ref.nodes))])
    r_far = 8.0 * float(core.max() + 1.0)
    angles = list(np.pi / 7 + 2 * np.pi * np.arange(32) / 32)
    end_angles = []
    for ci, comp in enumerate(d.components):
        if comp.kind != "unbounded":
            continue
        T = comp.window(DEFAULT_WINDOW)
        end_angles.extend(np.angle(comp.point(np.array([-T, T]))) % (2 * np.pi))
    if end_angles:
        ea = np.sort(np.asarray(end_angles))
        mids = (ea + np.diff(np.append(ea, ea[0] + 2 * np.pi)) / 2)
        angles.extend(mids)
    far = r_far * np.exp(1j * np.asarray(angles))
    if not d.contains_many(far).any():
        raise DomainError("domain appears bounded; only unbounded domains are supported")
    # unbounded components: conjugate tangent must settle on its limits
    for ci, comp in enumerate(d.components):
        if comp.kind != "unbounded":
            continue
        if comp.asym is None:
            raise DomainError(f"component {ci} lacks asymptotic tangent data")
        T = comp.window(DEFAULT_WINDOW)
        for sign, c_lim in ((-1, comp.asym[0]), (1, comp.asym[1])):
            t = sign * T * np.linspace(0.5, 1.0, 9)
            dz = comp.derivative(t)
            dev = np.abs(np.conj(dz / np.abs(dz)) - c_lim)
            # the invariant asks for monotone decay toward the limit, not a
            # size bound (algebraic approach is legitimate); the achieved
            # deviation is reported for truncation-error awareness
            if np.any(np.diff(dev) > 1e-12 + 0.02 * dev[:-1]):
                raise DomainError(
                    f"component {ci}: conjugate tangent deviation is not "
                    "monotonically decreasing toward the window end")
            settled = t[np.argmax(dev < 1e-3)] if (dev < 1e-3).any() else t[-1]
            tag = "+" if sign > 0 else "-"
            diag[f"component_{ci}_tail_threshold_{tag}"] = float(settled)
            diag[f"component_{ci}_tail_deviation_{tag}"] = float(dev[-1])
    return diag


# -- JSON ingestion -------------------------------------------------------

def _component_from_json(spec: dict) -> CurveComponent:
    kind = spec.get("kind")
    ctype = spec.get("type")
    params = spec.get("params", {})
    orientation = spec.get("orientation", "ccw")
    t_max = spec.get("t_max")

    if ctype == "circle":
        cx, cy = params.get("center", [0.0, 0.0])
        r = float(params["radius"])
        center = complex(cx, cy)
        comp = CurveComponent(
            kind="closed",
            param=lambda t: center + r * np.exp(1j * t),
            deriv=lambda t: 1j * r * np.exp(1j * t),
            label=f"circle(r={r})",
        )
        if orientation == "cw":
            comp = comp.reversed()
        return comp

    if ctype == "line":
        px, py = params.get("point", [0.0, 0.0])
        dx, dy = params.get("direction", [1.0, 0.0])
        p0 = complex(px, py)
        dirc = complex(dx, dy)
        dirc /= abs(dirc)
        if orientation == "cw":
            dirc = -dirc
        c = np.conj(dirc)
        return CurveComponent(
            kind="unbounded",
            param=lambda t: p0 + dirc * t,
            deriv=lambda t: np.full_like(np.asarray(t, dtype=float), dirc, dtype=complex),
            t_max=t_max,
            asym=(c, c),
            label="line",
        )

    if ctype == "graph":
        family = params.get("family", "poly")
        if family == "poly":
            coeffs = np.asarray(params["coeffs"], dtype=float)
            g = lambda x: np.polyval(coeffs[::-1], x)
            gp = lambda x: np.polyval(np.polyder(np.poly1d(coeffs[::-1])), x)
        elif family == "cosh":
            amp = float(params.get("amplitude", 1.0))
            off = float(params.get("offset", 0.0))
            sgn = float(params.get("sign", 1.0))
            g = lambda x: sgn * (off + amp * np.cosh(x))
            gp = lambda x: sgn * amp * np.sinh(x)
        else:
            raise DomainError(f"unknown graph family {family!r}")
        comp = CurveComponent(
            kind="unbounded",
            param=lambda t: t + 1j * g(t),
            deriv=lambda t: 1.0 + 1j * gp(t),
            t_max=t_max,
            asym=None,
            label=f"graph({family})",
        )
        if orientation == "cw":
            comp = comp.reversed()
        return _with_estimated_asym(comp)

    if ctype == "samples":
        pts = np.asarray(params["points"], dtype=float)
        if kind != "closed":
            raise DomainError("sampled components must be closed")
        from scipy.interpolate import CubicSpline
        zs = pts[:, 0] + 1j * pts[:, 1]
        if abs(zs[0] - zs[-1]) > 1e-12:
            zs = np.append(zs, zs[0])
        tt = np.linspace(0, 2 * np.pi, len(zs))
        sx = CubicSpline(tt, zs.real, bc_type="periodic")
        sy = CubicSpline(tt, zs.imag, bc_type="periodic")
        comp = CurveComponent(
            kind="closed",
            param=lambda t: sx(np.mod(t, 2 * np.pi)) + 1j * sy(np.mod(t, 2 * np.pi)),
            deriv=lambda t: sx(np.mod(t, 2 * np.pi), 1) + 1j * sy(np.mod(t, 2 * np.pi), 1),
            label="sampled closed curve",
        )
        if orientation == "cw":
            comp = comp.reversed()
        return comp

    raise DomainError(f"unknown component type {ctype!r}")


def _with_estimated_asym(comp: CurveComponent) -> CurveComponent:
    """Estimate the conjugate-tangent limits from the parameter tails.

    Fits conj(T)(t) = c + a/t on the outer half of the window (the generic
    algebraic approach) and takes the unimodular part of the intercept.
    """
    if comp.asym is not None or comp.kind != "unbounded":
        return comp
    T = comp.window(DEFAULT_WINDOW)
    lims = []
    for sign in (-1, 1):
        t = sign * T * np.linspace(0.6, 1.0, 9)
        dz = comp.derivative(t)
        vals = np.conj(dz / np.abs(dz))
        A = np.vander(1.0 / t, 2, increasing=True)
        cre, *_ = np.linalg.lstsq(A, vals.real, rcond=None)
        cim, *_ = np.linalg.lstsq(A, vals.imag, rcond=None)
        c = cre[0] + 1j * cim[0]
        lims.append(c / abs(c))
    cm, cp = lims
    return CurveComponent(comp.kind, comp.param, comp.deriv, comp.t_max,
                          (cm, cp), comp.label)


def domain_from_dict(spec: dict) -> Domain:
    comps = tuple(_component_from_json(c) for c in spec["components"])
    bx, by = spec["basepoint"]
    d = Domain(comps, complex(bx, by), name=spec.get("name", "custom"))
    validate_domain(d)
    return d


def load_domain(source: str) -> Domain:
    """Domain from a catalog spec ('hhp', 'ellipse-exterior:2,1') or JSON file."""
    base = source.split(":", 1)[0]
    if base in CATALOG_INFO:
        d = catalog_from_spec(source)
        validate_domain(d)
        return d
    with open(source) as fh:
        return domain_from_dict(json.load(fh))
