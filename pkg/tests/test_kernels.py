import numpy as np
import pytest

from nqdroof import _kernels_py
from nqdroof.kernels import backend_name

try:
    from nqdroof import _kernels
except ImportError:
    _kernels = None

RNG = np.random.default_rng(2024)


def _random_setup(n, p):
    nodes = np.exp(2j * np.pi * RNG.random(n)) * (1.5 + RNG.random(n))
    coeffs = RNG.standard_normal(n) + 1j * RNG.standard_normal(n)
    targets = 0.2 * (RNG.standard_normal(p) + 1j * RNG.standard_normal(p))
    return nodes, coeffs, targets


def test_cauchy_sum_brute_force():
    nodes, coeffs, targets = _random_setup(40, 7)
    out = _kernels_py.cauchy_sum(nodes, coeffs, targets)
    for k, t in enumerate(targets):
        brute = sum(c / (z - t) for c, z in zip(coeffs, nodes))
        assert abs(out[k] - brute) < 1e-12 * (1 + abs(brute))


def test_segment_log_sum_matches_quadrature():
    nodes, coeffs, _ = _random_setup(20, 1)
    a = np.array([0.1 + 0.05j])
    b = np.array([0.3 - 0.2j])
    out = _kernels_py.segment_log_sum(nodes, coeffs, a, b)
    # oracle: Gauss-Legendre quadrature of sum coeffs/(node - z) over [a, b]
    x, w = np.polynomial.legendre.leggauss(60)
    zs = 0.5 * (b[0] - a[0]) * x + 0.5 * (a[0] + b[0])
    integrand = np.array([np.sum(coeffs / (nodes - z)) for z in zs])
    brute = np.sum(integrand * w) * 0.5 * (b[0] - a[0])
    assert abs(out[0] - brute) < 1e-12 * (1 + abs(brute))


def test_nearest_node_brute_force():
    nodes, _, targets = _random_setup(64, 11)
    dist, idx = _kernels_py.nearest_node(nodes, targets)
    for k, t in enumerate(targets):
        d = np.abs(nodes - t)
        assert idx[k] == np.argmin(d)
        assert dist[k] == pytest.approx(d.min(), rel=1e-14)


@pytest.mark.skipif(_kernels is None, reason="compiled extension not built")
@pytest.mark.parametrize("n,p", [(64, 16), (512, 300), (1024, 33)])
def test_backend_parity(n, p):
    nodes, coeffs, targets = _random_setup(n, p)
    seg_b = targets + 0.05 * (RNG.standard_normal(p) + 1j * RNG.standard_normal(p))

    a1 = _kernels.cauchy_sum(nodes, coeffs, targets)
    a2 = _kernels_py.cauchy_sum(nodes, coeffs, targets)
    assert np.max(np.abs(a1 - a2)) < 1e-11 * (1 + np.max(np.abs(a2)))

    s1 = _kernels.segment_log_sum(nodes, coeffs, targets, seg_b)
    s2 = _kernels_py.segment_log_sum(nodes, coeffs, targets, seg_b)
    assert np.max(np.abs(s1 - s2)) < 1e-11 * (1 + np.max(np.abs(s2)))

    d1, i1 = _kernels.nearest_node(nodes, targets)
    d2, i2 = _kernels_py.nearest_node(nodes, targets)
    assert np.array_equal(i1, i2)
    assert np.allclose(d1, d2, rtol=1e-14)


@pytest.mark.skipif(_kernels is None, reason="compiled extension not built")
def test_segment_log_series_path_accuracy():
    # far nodes exercise the series branch, close nodes the clog branch
    nodes = np.concatenate([100.0 + 5j + RNG.standard_normal(50),
                            1.0 + 1j + 0.1 * RNG.standard_normal(50)])
    coeffs = RNG.standard_normal(100) + 1j * RNG.standard_normal(100)
    a = np.full(5, 0.0 + 0j)
    b = np.linspace(0.1, 0.5, 5) + 0.2j
    s1 = _kernels.segment_log_sum(nodes, coeffs, a, b)
    s2 = _kernels_py.segment_log_sum(nodes, coeffs, a, b)
    assert np.max(np.abs(s1 - s2)) < 1e-12 * (1 + np.max(np.abs(s2)))


def test_backend_selected():
    assert backend_name() in ("compiled", "python")
