import numpy as np
import pytest

from nqdroof import build_rule, catalog, integrate_ds, integrate_dz, refine_until
from nqdroof.errors import EvaluationError
from nqdroof.quadrature import boundary_integral_task
from nqdroof.verify import TestFunction


def test_circumference(disk_domain):
    rule = build_rule(disk_domain, n_closed=64)
    res = integrate_ds(rule, lambda z: np.ones_like(z))
    assert abs(res.value - 2 * np.pi) < 1e-12


def test_odd_symmetry(disk_domain):
    rule = build_rule(disk_domain, n_closed=64)
    res = integrate_ds(rule, lambda z: z)
    assert abs(res.value) < 1e-12


def test_lorentzian_on_line(halfplane_domain):
    # oracle: arctan antiderivative, total = pi
    rule = build_rule(halfplane_domain, T=50.0)
    res = integrate_ds(rule, lambda z: 1.0 / (1.0 + z.real**2))
    assert abs(res.value - np.pi) < 1e-3
    assert res.converged


def test_residue_ccw(disk_domain):
    # counterclockwise circle: reverse the catalog orientation
    rev = disk_domain.components[0].reversed()
    from nqdroof.geometry import Domain
    d = Domain((rev,), basepoint=3.0, name="ccw")
    rule = build_rule(d, n_closed=128)
    res = integrate_dz(rule, lambda z: 1.0 / z)
    assert abs(res.value - 2j * np.pi) < 1e-12


def test_residue_cw(disk_domain):
    rule = build_rule(disk_domain, n_closed=128)
    res = integrate_dz(rule, lambda z: 1.0 / z)
    assert abs(res.value + 2j * np.pi) < 1e-12


def test_double_pole_on_line(halfplane_domain):
    # exact antiderivative -1/(x+i) vanishes at both infinities
    g = TestFunction(-1j, 2)
    rule = build_rule(halfplane_domain, T=100.0)
    res = integrate_dz(rule, g, tails=g)
    assert abs(res.value) < 1e-6


def test_orientation_antisymmetry_dz(disk_domain):
    from nqdroof.geometry import Domain
    rule = build_rule(disk_domain, n_closed=128)
    rev = Domain((disk_domain.components[0].reversed(),), basepoint=3.0)
    rule_rev = build_rule(rev, n_closed=128)
    f = lambda z: np.exp(z) / z**2
    a = integrate_dz(rule, f).value
    b = integrate_dz(rule_rev, f).value
    assert abs(a + b) <= 1e-14 * max(abs(a), 1.0)


def test_orientation_invariance_ds(disk_domain):
    from nqdroof.geometry import Domain
    rule = build_rule(disk_domain, n_closed=128)
    rev = Domain((disk_domain.components[0].reversed(),), basepoint=3.0)
    rule_rev = build_rule(rev, n_closed=128)
    f = lambda z: np.abs(z - 0.3) ** 2
    a = integrate_ds(rule, f).value
    b = integrate_ds(rule_rev, f).value
    assert abs(a - b) <= 1e-13 * abs(a)


def test_trapezoid_geometric_convergence(disk_domain):
    # error vs N decays geometrically on the residue benchmark until rounding
    errs = []
    for n in (8, 16, 32):
        rule = build_rule(disk_domain, n_closed=n)
        errs.append(abs(integrate_dz(rule, lambda z: 1.0 / z).value + 2j * np.pi))
    for e_n, e_2n in zip(errs[:-1], errs[1:]):
        if e_n < 1e-13:
            break
        assert e_2n <= e_n**1.5 + 1e-14


def test_non_finite_integrand_reports_node(disk_domain):
    rule = build_rule(disk_domain, n_closed=32)
    with pytest.raises(EvaluationError) as exc:
        integrate_ds(rule, lambda z: 1.0 / (z - rule.nodes[3]))
    assert exc.value.node is not None


def test_refine_until_residue(disk_domain):
    task = boundary_integral_task(disk_domain, lambda z: 1.0 / z, measure="dz",
                                  n_closed=16)
    res = refine_until(task, tol=1e-10)
    assert res.converged
    assert abs(res.value + 2j * np.pi) < 1e-10
    assert len(res.history) >= 2


def test_refine_until_halfplane_pole(halfplane_domain):
    g = TestFunction(-1j, 2)
    task = boundary_integral_task(halfplane_domain, g, measure="dz",
                                  n_closed=64, n_unbounded=128, tails=g)
    res = refine_until(task, tol=1e-8)
    assert res.converged
    assert abs(res.value) < 1e-8


def test_refine_until_log_divergent(halfplane_domain):
    # arclength integral of 1/|x+i| grows like log T: must flag non-convergence
    task = boundary_integral_task(halfplane_domain,
                                  lambda z: 1.0 / np.abs(z + 1j),
                                  measure="ds", n_unbounded=128, n_max=256)
    res = refine_until(task, tol=1e-3)
    assert not res.converged


def test_tail_exponent_reported(halfplane_domain):
    rule = build_rule(halfplane_domain, T=50.0)
    res = integrate_ds(rule, lambda z: 1.0 / (1.0 + z.real**2))
    exps = [v for k, v in res.details.items() if "tail_exponent" in k]
    assert exps and all(abs(e - 2.0) < 0.2 for e in exps)
