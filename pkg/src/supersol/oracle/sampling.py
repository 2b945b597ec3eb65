"""Sampled ball infima and pointwise checks of the integral lower bound."""

import math
from dataclasses import dataclass

import numpy as np
from scipy import optimize
from scipy.stats import qmc

from ..bounds import ProblemSpec, alpha, kappa
from ..errors import InvalidRadius, NotApplicable
from ..geometry import dist_to_boundary, weight_integral
from ..nonlinearity import (
    Integrability, big_f, big_g, classify_integrability, has_big_g, primitive_integral,
)

HOLDS_TOL = 1e-6
FLAT_H = 1e-4


def _clamp(z):
    n = np.linalg.norm(z, axis=-1, keepdims=True)
    return z / np.maximum(1.0, n)


def sampled_inf(u, x, r: float, n: int = 1024, polish: bool = True) -> float:
    """Upper estimate of inf over the closed ball B_r(x) of u.

    Unscrambled Sobol points of [-1, 1]^N are mapped into the unit ball by
    radial clamping, so points outside it land on the sphere.  The best sample
    is refined with Nelder-Mead through the same clamp map.  With polish off,
    the estimate is non-increasing in n because the point sets are nested.
    """
    x = np.asarray(x, dtype=float)
    if r == 0:
        return float(np.asarray(u(x[None]))[0])
    N = x.size
    m = max(1, math.ceil(math.log2(n)))
    z = 2.0 * qmc.Sobol(d=N, scramble=False).random_base2(m)[:n] - 1.0
    pts = x + r * _clamp(z)
    vals = np.asarray(u(pts), dtype=float)
    best = int(np.argmin(vals))
    out = float(vals[best])
    if not polish:
        return out

    def obj(zz):
        return float(np.asarray(u((x + r * _clamp(zz))[None]))[0])

    res = optimize.minimize(
        obj, z[best], method="Nelder-Mead",
        options={"xatol": 1e-10, "fatol": 1e-14, "maxiter": 4000 * N},
    )
    return min(out, float(res.fun))


@dataclass(frozen=True)
class LowerBoundCheck:
    lhs: float
    rhs: float
    holds: bool
    m: float
    u_x: float


def _in_flat_interior(u, x, h=FLAT_H):
    """True when u is constant to rounding on the 2N axis points at distances h and 10 h."""
    N = x.size
    ux = float(np.asarray(u(x[None]))[0])
    tol = 1e-12 * max(1.0, abs(ux))
    pts = np.array([x + s * k * h * e for e in np.eye(N) for s in (1.0, -1.0) for k in (1.0, 10.0)])
    return bool(np.all(np.abs(np.asarray(u(pts), dtype=float) - ux) <= tol))


def verify_theorem1(spec: ProblemSpec, u, x, r: float, n: int = 1024) -> LowerBoundCheck:
    """Compare int_{m}^{u(x)} f^(-1/(1-p)) with kappa alpha int_0^r (s rho_x(s))^(1/(1-p)) ds."""
    x = np.asarray(x, dtype=float)
    d = dist_to_boundary(spec.domain, x)
    if r < 0 or r >= d:
        raise InvalidRadius(f"r={r} must lie in [0, d(x)={d})")
    if spec.p > 0 and _in_flat_interior(u, x):
        raise NotApplicable("x lies in the interior of the flat set of u")
    ux = float(np.asarray(u(x[None]))[0])
    if r == 0:
        return LowerBoundCheck(lhs=0.0, rhs=0.0, holds=True, m=ux, u_x=ux)
    m = min(sampled_inf(u, x, r, n), ux)
    f, p = spec.f, spec.p
    if classify_integrability(f, p) is Integrability.IntegrableAtZero:
        lhs = float(big_f(f, p, ux)) - float(big_f(f, p, m))
    elif has_big_g(f, p):
        lhs = float(big_g(f, p, m)) - float(big_g(f, p, ux))
    else:
        lhs = float(primitive_integral(f, p, m, ux))
    rhs = kappa(p) * alpha(spec.N, p) * weight_integral(spec.weight, p, x, r)
    return LowerBoundCheck(lhs=lhs, rhs=rhs, holds=lhs >= rhs - HOLDS_TOL, m=m, u_x=ux)
