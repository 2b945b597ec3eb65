"""Pointwise bounds, Liouville classification and numerical verification for

    -Laplace(u) >= rho(x) f(u) |grad u|^p,   0 <= p < 1.
"""

__version__ = "0.1.0"

from .bounds import (
    BoundCurve, ComparisonProfile, ExtremalProfile, PowerCaseBound, ProblemSpec, Saturated,
    WeightedExteriorBound, alpha, bound_curve, comparison_profile, extremal_profile,
    inf_ball_upper_bound, kappa, lower_bound_point, power_case_bound, weighted_exterior_bound,
)
from .classifier import (
    Certificate, Classification, Region, Verdict, classify, deadcore_region, deadcore_threshold,
    liouville_exponent_check,
)
from .geometry import (
    Annulus, Ball, Cone2D, Constant, CustomSampled, ExteriorOfBall, FullSpace, RadialPower,
    dist_to_boundary, sup_inradius,
)
from .nonlinearity import (
    Custom, Integrability, MaxPowers, PowerQ, SingularOneMinusU, SumPowers, big_f, big_f_inverse,
    big_g, big_g_inverse, classify_integrability, f_norm_infinity,
)
from .profiles import RadialProfile

__all__ = [name for name in dir() if not name.startswith("_")]
