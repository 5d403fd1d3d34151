import json

import numpy as np
import pytest

from nqdroof import catalog, catalog_from_spec, inward_normal_at, tangent_at, validate_domain
from nqdroof.errors import AmbiguousPointError, DomainError, MalformedCurveError
from nqdroof.geometry import CurveComponent, Domain, domain_from_dict, feature_size


def test_tangent_circle_clockwise(disk_domain):
    # z(t) = exp(-it): unit-speed clockwise, exterior on the left
    T = tangent_at(disk_domain.components[0], 0.0)
    assert T == pytest.approx(-1j, abs=1e-14)


def test_tangent_real_line(halfplane_domain):
    for t in (-3.0, 0.0, 17.2):
        assert tangent_at(halfplane_domain.components[0], t) == pytest.approx(1.0, abs=1e-14)


def test_tangent_cosh_curve_at_zero(hhp_domain):
    # oracle: finite differences of the parameterization at the crest
    upper = hhp_domain.components[0]
    h = 1e-6
    fd = (upper.point(h) - upper.point(-h)) / (2 * h)
    fd /= abs(fd)
    T = tangent_at(upper, 0.0)
    assert T == pytest.approx(fd, abs=1e-9)
    assert T == pytest.approx(-1.0, abs=1e-14)  # traversed right to left


def test_tangent_is_unit_everywhere():
    for name, params in [("disk-exterior", [1.0]), ("hhp", []),
                         ("ellipse-exterior", [2.0, 1.0])]:
        d = catalog(name, params)
        for comp in d.components:
            t = np.linspace(-3, 3, 41) if comp.kind == "unbounded" \
                else np.linspace(0, 2 * np.pi, 41)
            dz = comp.derivative(t)
            assert np.max(np.abs(np.abs(dz / np.abs(dz)) - 1)) < 1e-14


def test_inward_normal_circle(disk_domain):
    n = inward_normal_at(disk_domain.components[0], 0.0)
    assert n == pytest.approx(1.0, abs=1e-14)  # at z=1, points into the exterior


def test_inward_normal_real_line(halfplane_domain):
    n = inward_normal_at(halfplane_domain.components[0], 0.0)
    assert n == pytest.approx(1j, abs=1e-14)


def test_inward_normal_ellipse_rightmost(ellipse_domain):
    # derived check: probing along the normal must enter the domain
    comp = ellipse_domain.components[0]
    z = comp.point(0.0)
    n = inward_normal_at(comp, 0.0)
    eps = 1e-3 * feature_size(ellipse_domain, int(np.argmin(np.abs(ellipse_domain.ref.nodes - z))))
    assert ellipse_domain.contains_many([z + eps * n])[0]
    assert not ellipse_domain.contains_many([z - eps * n])[0]


def test_degenerate_derivative_raises():
    comp = CurveComponent(
        kind="closed",
        param=lambda t: np.cos(t) ** 3 + 1j * np.sin(t) ** 3,  # astroid cusps
        deriv=lambda t: -3 * np.cos(t) ** 2 * np.sin(t) + 3j * np.sin(t) ** 2 * np.cos(t),
    )
    with pytest.raises(MalformedCurveError):
        tangent_at(comp, 0.0)


def test_catalog_disk():
    d = catalog("disk-exterior", [1.0])
    assert len(d.components) == 1
    assert d.basepoint == pytest.approx(3.0)
    assert d.contains(2.0)
    assert not d.contains(0.5)


def test_catalog_hhp_membership(hhp_domain):
    # pi/2 + cosh(0) = pi/2 + 1 > 0, so the origin is inside
    assert np.pi / 2 + np.cosh(0.0) == pytest.approx(2.5708, abs=1e-4)
    assert hhp_domain.contains(0.0)
    assert not hhp_domain.contains(4j)  # 4 > pi/2 + 1


def test_catalog_halfplane(halfplane_domain):
    assert halfplane_domain.contains(1j)
    assert not halfplane_domain.contains(-1j)
    assert halfplane_domain.contains(10 + 0.001j)


def test_catalog_unknown_name():
    with pytest.raises(DomainError):
        catalog("moebius-strip")
    with pytest.raises(DomainError):
        catalog("disk-exterior", [-2.0])


def test_catalog_spec_parsing():
    d = catalog_from_spec("ellipse-exterior:2,1")
    assert d.name == "ellipse-exterior(2,1)"


def test_contains_ambiguous_near_boundary(disk_domain):
    node = disk_domain.ref.nodes[7]
    with pytest.raises(AmbiguousPointError):
        disk_domain.contains(node * (1 + 1e-13))


def test_membership_probe_invariant():
    # contains(z + eps*n) is true and contains(z - eps*n) is false at samples
    for name, params in [("disk-exterior", [1.0]), ("halfplane", []), ("hhp", [])]:
        d = catalog(name, params)
        ref = d.ref
        for j in range(0, len(ref.nodes), max(1, len(ref.nodes) // 40)):
            if abs(ref.nodes[j]) > 50:
                continue
            eps = 1e-3 * feature_size(d, j)
            n = 1j * ref.tangents[j]
            inside, outside = d.contains_many(
                [ref.nodes[j] + eps * n, ref.nodes[j] - eps * n])
            assert inside, f"{name}: probe at node {j} should be inside"
            assert not outside, f"{name}: probe at node {j} should be outside"


def test_hhp_nodes_satisfy_region_formula(hhp_domain):
    ref = hhp_domain.ref
    for ci, comp in enumerate(hhp_domain.components):
        z = ref.nodes[ref.comp_ids == ci]
        target = np.pi / 2 + np.cosh(z.real)
        assert np.max(np.abs(np.abs(z.imag) - target)) < 1e-12 * np.max(target)


def test_validate_rejects_bounded_domain():
    # ccw circle puts the bounded disk on the left: not allowed
    comp = CurveComponent(
        kind="closed",
        param=lambda t: np.exp(1j * t),
        deriv=lambda t: 1j * np.exp(1j * t),
    )
    d = Domain((comp,), basepoint=0.1 + 0j)
    with pytest.raises(DomainError):
        validate_domain(d)


def test_validate_rejects_outside_basepoint(disk_domain):
    d = Domain(disk_domain.components, basepoint=0.2 + 0j)
    with pytest.raises(DomainError):
        validate_domain(d)


def test_domain_json_roundtrip(tmp_path):
    spec = {
        "components": [
            {"kind": "closed", "type": "circle",
             "params": {"center": [0.0, 0.0], "radius": 1.0},
             "orientation": "cw"},
        ],
        "basepoint": [3.0, 0.0],
    }
    d = domain_from_dict(spec)
    assert d.contains(2.5)
    assert not d.contains(0.0)
    # through the file loader as well
    p = tmp_path / "dom.json"
    p.write_text(json.dumps(spec))
    from nqdroof import load_domain
    d2 = load_domain(str(p))
    assert d2.contains(2.5)


def test_domain_json_line_and_graph():
    spec = {
        "components": [
            {"kind": "unbounded", "type": "line",
             "params": {"point": [0.0, 0.0], "direction": [1.0, 0.0]},
             "orientation": "ccw", "t_max": 200},
        ],
        "basepoint": [0.0, 1.0],
    }
    d = domain_from_dict(spec)
    assert d.contains(5 + 2j)
    assert not d.contains(5 - 2j)

    spec2 = {
        "components": [
            {"kind": "unbounded", "type": "graph",
             "params": {"family": "poly", "coeffs": [0.0, 0.0, 0.05]},
             "orientation": "ccw", "t_max": 60},
        ],
        "basepoint": [0.0, 5.0],
    }
    d2 = domain_from_dict(spec2)
    assert d2.contains(0 + 6j)
    assert not d2.contains(0 - 6j)


def test_reversed_component_flips_normal(disk_domain):
    comp = disk_domain.components[0]
    rev = comp.reversed()
    assert tangent_at(rev, 0.0) == pytest.approx(-tangent_at(comp, 0.0), abs=1e-14)
    assert abs(comp.point(0.5) - rev.point(-0.5)) < 1e-14


def test_validation_diagnostics_reported(hhp_domain):
    diag = validate_domain(hhp_domain)
    assert diag["basepoint_clearance"] > 2.5
    assert any(k.startswith("component_0_tail_threshold") for k in diag)
