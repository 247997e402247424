"""Secular three-body dynamics: heteroclinic orbit, Melnikov potential, splitting."""

__version__ = "0.1.0"

from .core import (  # noqa: E402
    DelaunayState, PoincareState, SecularParams, SeparatrixConstants, SystemParams,
    delaunay_to_poincare, derive_separatrix_constants, derive_system, eccentricity,
    mutual_inclination, poincare_to_delaunay,
)
from .errors import (  # noqa: E402
    ConfigError, DomainError, DynamicsError, QuadratureError, ReconciliationError,
    SecsplitError,
)
from .melnikov import (  # noqa: E402
    MelnikovValue, critical_points, melnikov_potential, melnikov_quadrature,
    melnikov_residues, melnikov_value, scan_parameter_set,
)
from .separatrix import (  # noqa: E402
    fixed_points, separatrix_identities, separatrix_residual, separatrix_sample,
)

__all__ = [
    "__version__",
    "DelaunayState", "PoincareState", "SecularParams", "SeparatrixConstants", "SystemParams",
    "delaunay_to_poincare", "derive_separatrix_constants", "derive_system", "eccentricity",
    "mutual_inclination", "poincare_to_delaunay",
    "ConfigError", "DomainError", "DynamicsError", "QuadratureError", "ReconciliationError",
    "SecsplitError",
    "MelnikovValue", "critical_points", "melnikov_potential", "melnikov_quadrature",
    "melnikov_residues", "melnikov_value", "scan_parameter_set",
    "fixed_points", "separatrix_identities", "separatrix_residual", "separatrix_sample",
]
