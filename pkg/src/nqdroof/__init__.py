"""Arclength null-quadrature domain testing and roof-function construction."""

from .geometry import (CurveComponent, Domain, catalog, catalog_from_spec,
                       contains, inward_normal_at, load_domain, tangent_at,
                       validate_domain)
from .kernels import backend_name
from .quadrature import (IntegralResult, QuadratureRule, build_rule,
                         integrate_ds, integrate_dz, refine_until)
from .roof import (RoofCandidate, build_roof, cauchy_density, cauchy_transform,
                   check_roof, extend_tangent)
from .verify import (TestFunction, default_dictionary, e1_admissible,
                     nqd_residual, verify_nqd)

__version__ = "0.1.0"

__all__ = [
    "CurveComponent", "Domain", "catalog", "catalog_from_spec", "contains",
    "inward_normal_at", "load_domain", "tangent_at", "validate_domain",
    "backend_name", "IntegralResult", "QuadratureRule", "build_rule",
    "integrate_ds", "integrate_dz", "refine_until", "RoofCandidate",
    "build_roof", "cauchy_density", "cauchy_transform", "check_roof",
    "extend_tangent", "TestFunction", "default_dictionary", "e1_admissible",
    "nqd_residual", "verify_nqd", "__version__",
]
