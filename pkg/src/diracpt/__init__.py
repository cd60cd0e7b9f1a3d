"""One-dimensional Dirac scattering and bound states for PT-symmetric
vector, scalar and pseudoscalar potentials."""

from .core import AsymptoticLimits, BoundStateRecord, PhysicalParams, ScatteringResult
from .integrator import IntegratorConfig, scatter
from .kernels import BACKEND
from .potentials import make_from_expressions, make_model

__version__ = "0.1.0"

__all__ = [
    "AsymptoticLimits", "BoundStateRecord", "PhysicalParams", "ScatteringResult",
    "IntegratorConfig", "scatter", "BACKEND", "make_from_expressions", "make_model",
]
