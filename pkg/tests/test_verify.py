import numpy as np
import pytest

from nqdroof import catalog, default_dictionary, e1_admissible, nqd_residual, verify_nqd
from nqdroof.errors import InadmissibleError
from nqdroof.verify import TestFunction


def test_admissible_halfplane_order2(halfplane_domain):
    adm = e1_admissible(halfplane_domain, TestFunction(-1j, 2))
    assert adm.ok


def test_inadmissible_halfplane_order1(halfplane_domain):
    # arclength integral of |x+i|^-1 diverges logarithmically
    adm = e1_admissible(halfplane_domain, TestFunction(-1j, 1))
    assert not adm.ok
    assert "order 1" in adm.reason


def test_admissible_disk_order1(disk_domain):
    # compact boundary admits first-order poles
    adm = e1_admissible(disk_domain, TestFunction(0.3 + 0j, 1))
    assert adm.ok


def test_inadmissible_pole_inside(disk_domain):
    adm = e1_admissible(disk_domain, TestFunction(5.0 + 0j, 2))
    assert not adm.ok


def test_inadmissible_pole_near_boundary(disk_domain):
    adm = e1_admissible(disk_domain, TestFunction(0.9 + 0j, 2))
    assert not adm.ok
    assert "standoff" in adm.reason


def test_residual_disk_center(disk_domain):
    # residue oracle: ds = dz/(i z) on the unit circle turns the integral into
    # a z^-3 residue, which vanishes
    row = nqd_residual(disk_domain, TestFunction(0.0 + 0j, 2))
    assert row.magnitude < 1e-10
    assert row.converged


def test_residual_disk_offcenter(disk_domain):
    # residues at 0 and at the pole cancel: 1/a^2 - 1/a^2
    row = nqd_residual(disk_domain, TestFunction(0.3 + 0j, 2))
    assert row.magnitude < 1e-10


def test_residual_rejects_inadmissible(disk_domain):
    with pytest.raises(InadmissibleError):
        nqd_residual(disk_domain, TestFunction(0.95 + 0j, 2))


def test_residual_linearity(disk_domain):
    # residual of a combination equals the combination of residuals
    g1 = TestFunction(0.2 + 0.1j, 2)
    g2 = TestFunction(-0.3 + 0.2j, 3)
    from nqdroof import build_rule, integrate_ds
    rule = build_rule(disk_domain)
    a, b = 2.0 - 1.0j, 0.7 + 0.3j
    r1 = integrate_ds(rule, g1).value
    r2 = integrate_ds(rule, g2).value
    r12 = integrate_ds(rule, lambda z: a * g1(z) + b * g2(z)).value
    assert abs(r12 - (a * r1 + b * r2)) < 1e-13 * (1 + abs(r12))


def test_translation_covariance():
    # translating domain and poles together leaves residuals unchanged
    c = 1.7 - 2.2j
    d0 = catalog("disk-exterior", [1.0])
    from nqdroof.geometry import CurveComponent, Domain
    comp = CurveComponent(
        kind="closed",
        param=lambda t: c + np.exp(-1j * t),
        deriv=lambda t: -1j * np.exp(-1j * t),
    )
    d1 = Domain((comp,), basepoint=c + 3.0)
    for pole, k in [(0.3 + 0.1j, 2), (-0.2j, 3)]:
        r0 = nqd_residual(d0, TestFunction(pole, k))
        r1 = nqd_residual(d1, TestFunction(pole + c, k))
        assert abs(r0.value - r1.value) < 1e-10


def test_rotation_covariance():
    w = np.exp(0.7j)
    d0 = catalog("ellipse-exterior", [2.0, 1.0])
    from nqdroof.geometry import CurveComponent, Domain
    comp = CurveComponent(
        kind="closed",
        param=lambda t: w * (2 * np.cos(t) - 1j * np.sin(t)),
        deriv=lambda t: w * (-2 * np.sin(t) - 1j * np.cos(t)),
    )
    d1 = Domain((comp,), basepoint=w * 6.0)
    for pole, k in [(0.8 + 0.3j, 2), (0.5 - 0.2j, 3)]:
        r0 = nqd_residual(d0, TestFunction(pole, k), tol=1e-9)
        r1 = nqd_residual(d1, TestFunction(w * pole, k), tol=1e-9)
        assert abs(r0.magnitude - r1.magnitude) < 1e-9 * (1 + r0.magnitude)


def test_verify_halfplane_passes(halfplane_domain):
    rep = verify_nqd(halfplane_domain, tol=1e-6)
    assert rep.verdict == "pass"


def test_verify_disk_passes(disk_domain):
    rep = verify_nqd(disk_domain, tol=1e-8)
    assert rep.verdict == "pass"
    assert len(rep.rows) >= 20


def test_verify_hhp_passes(hhp_domain):
    rep = verify_nqd(hhp_domain, tol=1e-4)
    assert rep.verdict == "pass"


def test_verify_ellipse_fails(ellipse_domain):
    # negative control: guards against a vacuous harness
    rep = verify_nqd(ellipse_domain, tol=1e-3)
    assert rep.verdict == "fail"
    assert rep.max_abs_residual > 1e-3


def test_ellipse_residual_confirmed_at_higher_resolution(ellipse_domain):
    rows = [r for r in verify_nqd(ellipse_domain, tol=1e-3).rows
            if r.magnitude > 1e-3]
    worst = max(rows, key=lambda r: r.magnitude)
    hi = nqd_residual(ellipse_domain, TestFunction(worst.pole, worst.order),
                      n_closed=4 * 256)
    assert abs(hi.value - worst.value) < 1e-6 * (1 + worst.magnitude)
    assert hi.magnitude > 1e-3


def test_default_dictionary_properties(disk_domain):
    dic = default_dictionary(disk_domain)
    assert len(dic) >= 20
    for g in dic:
        assert e1_admissible(disk_domain, g).ok


def test_report_serialization(disk_domain):
    rep = verify_nqd(disk_domain, tol=1e-8)
    d = rep.to_dict()
    assert d["verdict"] == "pass"
    assert len(d["rows"]) == len(rep.rows)
    assert all("abs_residual" in r for r in d["rows"])
