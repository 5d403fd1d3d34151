import numpy as np
import pytest

from nqdroof import build_roof, catalog


def strip_map_inverse(z, tol=1e-14):
    """Invert w + sinh(w) = z on the strip |Im w| < pi/2 by Newton.

    Independent oracle for the two-cosh-curve catalog domain: the region is
    the image of the strip under w + sinh(w), and Re cosh(w(z)) is a positive
    harmonic function with unit inward-normal gradient on the boundary.
    """
    z = complex(z)
    w = np.arcsinh(z) if abs(z) > 2 else z / 2
    for _ in range(100):
        step = (w + np.sinh(w) - z) / (1 + np.cosh(w))
        w -= step
        if abs(step) < tol:
            break
    return w


def hhp_oracle_u(z):
    return float(np.cosh(strip_map_inverse(z)).real)


@pytest.fixture(scope="session")
def disk_domain():
    return catalog("disk-exterior", [1.0])


@pytest.fixture(scope="session")
def halfplane_domain():
    return catalog("halfplane")


@pytest.fixture(scope="session")
def hhp_domain():
    return catalog("hhp")


@pytest.fixture(scope="session")
def ellipse_domain():
    return catalog("ellipse-exterior", [2.0, 1.0])


@pytest.fixture(scope="session")
def disk_roof(disk_domain):
    return build_roof(disk_domain)


@pytest.fixture(scope="session")
def halfplane_roof(halfplane_domain):
    return build_roof(halfplane_domain)


@pytest.fixture(scope="session")
def hhp_roof(hhp_domain):
    return build_roof(hhp_domain, n_unbounded=1024)


@pytest.fixture(scope="session")
def ellipse_roof(ellipse_domain):
    return build_roof(ellipse_domain)
