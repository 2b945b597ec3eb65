"""Finite-difference residuals on uniform grids and at scattered points."""

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np
from scipy import ndimage

from .. import kernels
from ..bounds import ProblemSpec
from ..errors import GridTooCoarse, NotApplicable
from ..geometry import weight_field
from ..nonlinearity import MaxPowers, primitive_integral

SLOPE_TOL = 0.3
EPS = np.finfo(float).eps


@dataclass(frozen=True)
class GridFunction:
    """Samples of u on a uniform axis-aligned grid starting at ``origin``."""

    origin: np.ndarray
    h: float
    samples: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "origin", np.asarray(self.origin, dtype=float))
        object.__setattr__(self, "samples", np.asarray(self.samples, dtype=float))
        if self.origin.shape != (self.samples.ndim,):
            raise ValueError("origin must have one coordinate per grid axis")
        if not self.h > 0:
            raise ValueError("spacing must be positive")

    @property
    def N(self):
        return self.samples.ndim

    @property
    def box(self):
        hi = self.origin + self.h * (np.asarray(self.samples.shape) - 1)
        return self.origin.copy(), hi

    def coords(self):
        axes = [self.origin[d] + self.h * np.arange(n) for d, n in enumerate(self.samples.shape)]
        return np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1)

    def subsample(self, k: int) -> "GridFunction":
        sl = tuple(slice(None, None, k) for _ in range(self.N))
        return GridFunction(self.origin, self.h * k, self.samples[sl])


def sample_grid(u: Callable, lo, hi, n: int) -> GridFunction:
    """Evaluate a vectorised evaluator on an n^N grid spanning [lo, hi] (equal spacing per axis)."""
    lo = np.asarray(lo, dtype=float)
    hi = np.asarray(hi, dtype=float)
    widths = hi - lo
    h = float(widths.max()) / (n - 1)
    shape = tuple(int(round(wd / h)) + 1 for wd in widths)
    g = GridFunction(lo, h, np.zeros(shape))
    pts = g.coords()
    vals = np.asarray(u(pts.reshape(-1, lo.size)), dtype=float).reshape(shape)
    return GridFunction(lo, h, vals)


def residual_field(spec: ProblemSpec, u: GridFunction, include_nonlinearity: bool = True, coefficient=None):
    """-Laplace_h(u) - rho f(u) |grad_h u|^p, NaN on the boundary layer.

    ``coefficient`` replaces rho f(u) by a given array or scalar.
    """
    lap, grad = kernels.fd_lap_grad(u.samples, u.h)
    res = -lap
    if include_nonlinearity:
        if coefficient is None:
            rho = weight_field(spec.weight, u.coords())
            coefficient = rho * spec.f(np.clip(u.samples, 0.0, None))
        res = res - coefficient * grad**spec.p
    return res, lap


@dataclass(frozen=True)
class ResidualReport:
    field: np.ndarray
    min: float
    max: float
    linf: float
    tol: float
    slope: float
    exact: bool
    h: float

    @property
    def supersolution(self):
        return self.min >= -self.tol


def _trim_for_richardson(u: GridFunction, mask):
    shape = np.asarray(u.samples.shape)
    keep = 4 * ((shape - 1) // 4) + 1
    if np.any(keep < 9):
        raise GridTooCoarse("need at least 9 nodes per axis for Richardson extrapolation")
    sl = tuple(slice(0, k) for k in keep)
    return GridFunction(u.origin, u.h, u.samples[sl]), (None if mask is None else mask[sl])


def fd_residual(
    spec: ProblemSpec,
    u: GridFunction,
    mask: Optional[np.ndarray] = None,
    include_nonlinearity: bool = True,
    coefficient_fn: Optional[Callable] = None,
) -> ResidualReport:
    """Residual of the supersolution inequality with a Richardson error estimate.

    The grid is compared with its 2h and 4h subsamplings on their common
    nodes.  If the residual does not change between levels (polynomial data
    of degree <= 3) the stencil is exact and the tolerance drops to a
    round-off floor; otherwise the observed order must be 2 +/- 0.3 and the
    tolerance is the estimated O(h^2) error.
    """
    u, mask = _trim_for_richardson(u, mask)

    def level(g):
        coef = None if coefficient_fn is None else coefficient_fn(g)
        return residual_field(spec, g, include_nonlinearity, coef)

    r1, lap1 = level(u)
    r2, _ = level(u.subsample(2))
    r4, _ = level(u.subsample(4))
    ok = np.isfinite(r1) if mask is None else (np.isfinite(r1) & mask)
    vals = r1[ok]
    if vals.size == 0:
        raise GridTooCoarse("no interior nodes inside the mask")

    common = tuple(slice(0, None, 4) for _ in range(u.N))
    c1 = r1[common]
    c2 = r2[tuple(slice(0, None, 2) for _ in range(u.N))]
    c4 = r4
    cm = np.isfinite(c4) & np.isfinite(c2) & np.isfinite(c1)
    if mask is not None:
        cm &= mask[common]
    scale = max(1.0, float(np.nanmax(np.abs(lap1[ok]))))
    floor = max(1e-10 * scale, 1e3 * EPS * float(np.abs(u.samples).max()) / u.h**2)
    if not np.any(cm):
        raise GridTooCoarse("no nodes common to all refinement levels")
    e1 = float(np.max(np.abs(c1[cm] - c2[cm])))
    e2 = float(np.max(np.abs(c2[cm] - c4[cm])))
    if e2 <= floor:
        exact, slope, tol = True, math.nan, floor
    else:
        exact = False
        slope = math.log2(e2 / e1) if e1 > 0 else math.inf
        if abs(slope - 2.0) > SLOPE_TOL:
            raise GridTooCoarse(f"Richardson slope {slope:.3f} deviates from 2")
        tol = max(e1, floor)
    return ResidualReport(
        field=r1, min=float(vals.min()), max=float(vals.max()), linf=float(np.abs(vals).max()),
        tol=tol, slope=slope, exact=exact, h=u.h,
    )


def certify_supersolution(spec: ProblemSpec, u: Callable, lo, hi, n: int = 33, inside=None) -> ResidualReport:
    """Sample ``u`` on a grid over [lo, hi] and run :func:`fd_residual`.

    ``inside`` is an optional predicate on an (M, N) array of points selecting
    the nodes that belong to the region of interest.
    """
    g = sample_grid(u, lo, hi, n)
    mask = None
    if inside is not None:
        pts = g.coords()
        mask = np.asarray(inside(pts.reshape(-1, g.N)), dtype=bool).reshape(g.samples.shape)
    return fd_residual(spec, g, mask=mask)


@dataclass(frozen=True)
class StencilResidual:
    residual: np.ndarray
    rhs: np.ndarray
    laplacian: np.ndarray

    @property
    def relative(self):
        return float(np.max(np.abs(self.residual)) / np.max(np.abs(self.rhs)))


def stencil_residual(p: float, u: Callable, points, h: float, coefficient) -> StencilResidual:
    """-Laplace_h(u) - c |grad_h u|^p at scattered points using 2N+1 evaluations each.

    ``coefficient`` is a scalar or a callable of the points.
    """
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    M, N = pts.shape
    u0 = np.asarray(u(pts), dtype=float)
    lap = np.zeros(M)
    g2 = np.zeros(M)
    for d in range(N):
        off = np.zeros(N)
        off[d] = h
        a = np.asarray(u(pts + off), dtype=float)
        b = np.asarray(u(pts - off), dtype=float)
        lap += (a - 2.0 * u0 + b) / h**2
        g2 += ((a - b) / (2.0 * h)) ** 2
    c = coefficient(pts) if callable(coefficient) else coefficient
    rhs = c * np.sqrt(g2) ** p
    return StencilResidual(residual=-lap - rhs, rhs=np.broadcast_to(rhs, (M,)).copy(), laplacian=lap)


def flat_set(u: GridFunction, grad_tol: Optional[float] = None):
    """K_u = {|grad u| <= grad_tol} on the grid and its discrete interior K_u^0."""
    if grad_tol is None:
        grad_tol = 10.0 * u.h
    _, grad = kernels.fd_lap_grad(u.samples, u.h)
    K = np.isfinite(grad) & (grad <= grad_tol)
    return K, ndimage.binary_erosion(K)


@dataclass(frozen=True)
class TransformCheck:
    holds: bool
    min_residual: float
    tol: float
    base: float
    report: ResidualReport


def remark2_transform_check(spec: ProblemSpec, u: Callable, lo, hi, n: int = 33) -> TransformCheck:
    """Check -Laplace(F(u)) >= rho |grad F(u)|^p for F(t) = int_m^t f^(-1/(1-p)).

    ``m`` is the smallest sampled value of u on the grid; the additive constant
    of F does not enter the inequality.
    """
    g = sample_grid(u, lo, hi, n)
    vals = g.samples
    base = float(vals.min())
    if base <= 0:
        raise NotApplicable("u must be positive on the region")
    if isinstance(spec.f, MaxPowers) and base < 1.0 <= float(vals.max()):
        raise NotApplicable("max{u^q, u^r} is not differentiable at the crossover u = 1")
    w = np.asarray(primitive_integral(spec.f, spec.p, base, vals.ravel()), dtype=float).reshape(vals.shape)
    wg = GridFunction(g.origin, g.h, w)
    rep = fd_residual(spec, wg, coefficient_fn=lambda gg: weight_field(spec.weight, gg.coords()))
    return TransformCheck(holds=rep.supersolution, min_residual=rep.min, tol=rep.tol, base=base, report=rep)
