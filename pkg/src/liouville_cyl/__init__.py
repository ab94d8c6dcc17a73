"""Timelike Liouville correlators on the cylinder R x S^1.

Modules: ``kernels`` (Green's functions), ``quadrature`` (adaptive and Monte
Carlo integration), ``oracles`` (closed forms), ``correlators`` (Euclidean,
Lorentzian and torus correlators), ``algebra`` (smeared observables and the
vacuum functional), ``verification`` (invariant suites) and ``cli``.
"""

__version__ = "0.1.0"

from .correlators import (
    CorrelatorResult,
    CorrelatorSpec,
    euclidean_correlator,
    exchange_adjacent,
    lorentzian_correlator,
    torus_correlator,
)
from .errors import LiouvilleError
from .kernels import CylinderPoint, TorusSpec, green_boundary, green_euclidean
from .oracles import tadpole_Ib
from .quadrature import IntegrationResult, QuadratureConfig

__all__ = [
    "__version__",
    "CorrelatorResult",
    "CorrelatorSpec",
    "CylinderPoint",
    "IntegrationResult",
    "LiouvilleError",
    "QuadratureConfig",
    "TorusSpec",
    "euclidean_correlator",
    "exchange_adjacent",
    "green_boundary",
    "green_euclidean",
    "lorentzian_correlator",
    "tadpole_Ib",
    "torus_correlator",
]
