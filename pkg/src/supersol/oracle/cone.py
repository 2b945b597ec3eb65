"""Unbounded positive solution on a planar sector, built by shooting.

On the sector {0 < theta < theta0} in R^2, u = r^(2/(1-q)) w(theta) solves
-Laplace(u) = u^q whenever -w'' - beta_q w = w^q on (0, theta0) with
w(0) = w(theta0) = 0 and beta_q = (2/(1-q))^2.  A positive w exists when
beta_q lies below the first Dirichlet eigenvalue (pi/theta0)^2.
"""

import math
from dataclasses import dataclass
from typing import Sequence, Tuple

import numpy as np
from scipy import integrate

from .. import kernels
from ..errors import ExistenceConditionFailed, InvalidSpec, NumericFailure
from ..profiles import RadialProfile

SHOOT_RTOL = 1e-13
SHOOT_ATOL = 1e-16
SHOOT_MAX_STEPS = 1_000_000
BISECT_ITERS = 200
DEFECT_TARGET = 1e-13
EXISTENCE_RTOL = 1e-12
ARC_MARGIN = 0.1


def beta_q(q: float, N: int = 2) -> float:
    g = 2.0 / (1.0 - q)
    return g * (N - 2 + g)


def lambda1(theta0: float) -> float:
    return (math.pi / theta0) ** 2


@dataclass(frozen=True)
class PolarResidual:
    hs: Tuple[float, ...]
    relative: Tuple[float, ...]
    orders: Tuple[float, ...]
    arc: Tuple[float, float]

    @property
    def finest(self):
        return self.relative[-1]


@dataclass(frozen=True)
class ConeSolution:
    theta0: float
    q: float
    beta_q: float
    lambda1: float
    slope: float
    boundary_defect: float
    w: RadialProfile
    energy: float
    energy_identity: float
    symmetry_defect: float
    residual: PolarResidual
    iterations: int

    @property
    def exponent(self):
        return 2.0 / (1.0 - self.q)

    def u(self, r, theta):
        return np.asarray(r, dtype=float) ** self.exponent * self.w(theta)


def _integrate(prm, slope, t_eval):
    ys, filled, _, _, _, status = kernels.dopri_solve(
        kernels.KIND_CONE, prm, 0.0, np.array([0.0, slope]), np.asarray(t_eval, dtype=float),
        SHOOT_RTOL, SHOOT_ATOL, SHOOT_MAX_STEPS, -1, 1e12,
    )
    if status != kernels.STATUS_OK:
        raise NumericFailure(f"cone ODE failed with status {status}")
    return ys


def _end_value(prm, slope, theta0):
    return float(_integrate(prm, slope, [theta0])[0, 0])


def _shoot(prm, theta0):
    s = 1e-3
    v = _end_value(prm, s, theta0)
    if v > 0:
        hi = s
        while v > 0:
            s *= 0.5
            if s < 1e-300:
                raise NumericFailure("no slope with negative end value found")
            v = _end_value(prm, s, theta0)
        lo = s
    else:
        lo = s
        while v <= 0:
            s *= 2.0
            if s > 1e12:
                raise NumericFailure("no slope with positive end value found")
            v = _end_value(prm, s, theta0)
        hi = s
    it = 0
    mid = 0.5 * (lo + hi)
    for it in range(1, BISECT_ITERS + 1):
        mid = 0.5 * (lo + hi)
        v = _end_value(prm, mid, theta0)
        if abs(v) < DEFECT_TARGET or hi - lo <= 1e-16 * hi:
            break
        if v > 0:
            hi = mid
        else:
            lo = mid
    return mid, it


def _polar_residual(prm, slope, theta0, q, levels):
    k = 2.0 / (1.0 - q)
    ta, tb = ARC_MARGIN * theta0, (1.0 - ARC_MARGIN) * theta0
    hs, rel = [], []
    for n in levels:
        th = np.linspace(ta, tb, n + 1)
        r = np.linspace(1.0, 2.0, n + 1)
        w = _integrate(prm, slope, th)[:, 0]
        R, _ = np.meshgrid(r, th, indexing="ij")
        U = R**k * w[None, :]
        hr, ht = r[1] - r[0], th[1] - th[0]
        c = U[1:-1, 1:-1]
        urr = (U[2:, 1:-1] - 2 * c + U[:-2, 1:-1]) / hr**2
        ur = (U[2:, 1:-1] - U[:-2, 1:-1]) / (2 * hr)
        utt = (U[1:-1, 2:] - 2 * c + U[1:-1, :-2]) / ht**2
        Ri = R[1:-1, 1:-1]
        lap = urr + ur / Ri + utt / Ri**2
        res = -lap - c**q
        hs.append(max(hr, ht))
        rel.append(float(np.max(np.abs(res)) / np.max(c**q)))
    orders = tuple(math.log2(rel[i] / rel[i + 1]) for i in range(len(rel) - 1))
    return PolarResidual(hs=tuple(hs), relative=tuple(rel), orders=orders, arc=(ta, tb))


def cone_example_solve(
    theta0: float, q: float, n_theta: int = 401, levels: Sequence[int] = (16, 32, 64, 128),
) -> ConeSolution:
    if not (0 < q < 1):
        raise InvalidSpec("q must lie in (0, 1)")
    if not (0 < theta0 < 2 * math.pi):
        raise InvalidSpec("theta0 must lie in (0, 2 pi)")
    b, lam = beta_q(q), lambda1(theta0)
    if b >= lam * (1.0 - EXISTENCE_RTOL):
        raise ExistenceConditionFailed(f"beta_q={b} is not below lambda_1={lam}")
    prm = np.array([b, q])
    slope, iters = _shoot(prm, theta0)
    if n_theta % 2 == 0:
        n_theta += 1
    th = np.linspace(0.0, theta0, n_theta)
    ys = np.vstack([[0.0, slope], _integrate(prm, slope, th[1:])])
    w, dw = ys[:, 0], ys[:, 1]
    defect = abs(float(w[-1]))
    w[0] = 0.0
    prof = RadialProfile(th, w, dw)
    wp = np.clip(w, 0.0, None)
    energy = float(integrate.simpson(0.5 * dw**2 - 0.5 * b * w**2 - wp ** (q + 1) / (q + 1), x=th))
    # for a solution the energy equals (1/2 - 1/(q+1)) int w^(q+1)
    identity = (0.5 - 1.0 / (q + 1)) * float(integrate.simpson(wp ** (q + 1), x=th))
    sym = float(np.max(np.abs(w - w[::-1])))
    return ConeSolution(
        theta0=theta0, q=q, beta_q=b, lambda1=lam, slope=slope, boundary_defect=defect,
        w=prof, energy=energy, energy_identity=identity, symmetry_defect=sym,
        residual=_polar_residual(prm, slope, theta0, q, levels), iterations=iters,
    )
