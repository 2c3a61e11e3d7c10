"""Numerical laboratory for Hardy's Z-function on the critical line."""
from .errors import DomainError, ResourceError
from .zkernel import AfeParams, Method, PhaseValue, ZValue, theta, z_pow_afe, z_rs, zeta_dirichlet

__version__ = "0.1.0"

__all__ = [
    "AfeParams", "DomainError", "Method", "PhaseValue", "ResourceError", "ZValue",
    "theta", "z_pow_afe", "z_rs", "zeta_dirichlet", "__version__",
]
