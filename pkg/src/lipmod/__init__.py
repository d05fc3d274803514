"""Lipschitz moduli of feasible-set mappings under the Hausdorff metric."""
from .config import DEFAULT_TOL, SweepConfig, ToleranceConfig
from .kernels import BACKEND
from .norms import L1, L2, LINF, NormSpec, coeff_norm, norm_value

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "DEFAULT_TOL",
    "L1",
    "L2",
    "LINF",
    "NormSpec",
    "SweepConfig",
    "ToleranceConfig",
    "coeff_norm",
    "norm_value",
    "__version__",
]
