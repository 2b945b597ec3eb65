"""Independent numerical checks: grid residuals, radial ODEs, sampled infima, the cone example."""

from .cone import ConeSolution, PolarResidual, beta_q, cone_example_solve, lambda1
from .grid import (
    GridFunction, TransformCheck, ResidualReport, StencilResidual, certify_supersolution,
    fd_residual, flat_set, remark2_transform_check, residual_field, sample_grid, stencil_residual,
)
from .radial import FloorCheck, harmonic_comparison, radial_ivp, serrin_zou_floor_check, sphere_infima
from .sampling import LowerBoundCheck, sampled_inf, verify_theorem1

__all__ = [
    "ConeSolution", "FloorCheck", "GridFunction", "PolarResidual", "TransformCheck", "ResidualReport",
    "StencilResidual", "LowerBoundCheck", "beta_q", "certify_supersolution", "cone_example_solve",
    "fd_residual", "flat_set", "harmonic_comparison", "lambda1", "radial_ivp", "remark2_transform_check",
    "residual_field", "sample_grid", "sampled_inf", "serrin_zou_floor_check", "sphere_infima",
    "stencil_residual", "verify_theorem1",
]
