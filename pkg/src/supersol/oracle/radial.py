"""Radial ODE integration and exterior-domain diagnostics for superharmonic functions."""

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np
from scipy import integrate, stats
from scipy.stats import qmc

from .. import kernels
from ..bounds import ProblemSpec, alpha, kappa
from ..errors import Blowup, InvalidSpec, NotApplicable
from ..geometry import Constant, RadialPower
from ..profiles import RadialProfile

IVP_RTOL = 1e-11
IVP_ATOL = 1e-13
BLOWUP = 1e12
MAX_STEPS = 2_000_000


def _weight_code(w):
    if isinstance(w, Constant):
        return kernels.W_CONSTANT, w.c
    if isinstance(w, RadialPower):
        return kernels.W_RADIAL_POWER, w.beta_w
    raise NotApplicable(f"radial integration does not support weight {w!r}")


def _pde_python(spec, wcode, wparam, source, fscale):
    N, p, f = spec.N, spec.p, spec.f

    def rhs(t, y):
        rho = wparam if wcode == kernels.W_CONSTANT else (t**wparam if t > 0 else 0.0)
        s = -source
        if fscale:
            s -= rho * float(f(max(y[0], 0.0))) * abs(y[1]) ** p
        return [y[1], s - (N - 1) * y[1] / t if t > 0 else s / N]

    return rhs


def radial_ivp(
    spec: ProblemSpec,
    u0: float,
    du0: float,
    r_start: float,
    r_end: float,
    n_out: int = 201,
    mode: str = "pde",
    source: float = 0.0,
    include_nonlinearity: bool = True,
) -> RadialProfile:
    """Integrate a radial profile outward from ``r_start``.

    mode="pde":      u'' + (N-1)/r u' = -source - rho f(u) |u'|^p; at r = 0 the
                     symmetric limit u''(0) = S/N is used (requires du0 = 0).
    mode="extremal": m' = -kappa alpha r^(kappa-1) (rho f(m))^(1/(1-p)), stopped
                     at m = 0 and held there.  Integrated with scipy's DOP853 so
                     that it is independent of the compiled extremal solver.
    """
    if r_start < 0 or not r_end > r_start:
        raise InvalidSpec("need 0 <= r_start < r_end")
    radii = np.linspace(float(r_start), float(r_end), n_out)
    if mode == "extremal":
        return _extremal_ivp(spec, float(u0), radii)
    if mode != "pde":
        raise ValueError(f"unknown mode {mode!r}")
    if r_start == 0 and du0 != 0:
        raise InvalidSpec("regular solutions at the origin need u'(0) = 0")
    wcode, wparam = _weight_code(spec.weight)
    fscale = 1.0 if include_nonlinearity else 0.0
    y0 = np.array([u0, du0], dtype=float)
    if spec.f.kernel_code is not None:
        a, b = spec.f.kernel_params()
        prm = np.array([spec.f.kernel_code, a, b, spec.p, spec.N, wcode, wparam, source, fscale], dtype=float)
        ys, filled, _, _, _, status = kernels.dopri_solve(
            kernels.KIND_RADIAL, prm, radii[0], y0, radii, IVP_RTOL, IVP_ATOL, MAX_STEPS, -1, BLOWUP,
        )
        if status == kernels.STATUS_BLOWUP:
            raise Blowup(f"|u| exceeded {BLOWUP:g} before r={radii[min(filled, n_out - 1)]}")
        if status != kernels.STATUS_OK:
            raise Blowup(f"integration stopped with status {status}")
        return RadialProfile(radii, ys[:, 0], ys[:, 1])

    def too_big(t, y):
        return BLOWUP - max(abs(y[0]), abs(y[1]))

    too_big.terminal = True
    sol = integrate.solve_ivp(
        _pde_python(spec, wcode, wparam, source, fscale), (radii[0], radii[-1]), y0,
        method="DOP853", t_eval=radii, rtol=IVP_RTOL, atol=IVP_ATOL, events=too_big,
    )
    if sol.status == 1 or sol.y.shape[1] < n_out:
        raise Blowup(f"|u| exceeded {BLOWUP:g}")
    return RadialProfile(radii, sol.y[0], sol.y[1])


def _extremal_ivp(spec, u0, radii):
    if not isinstance(spec.weight, Constant):
        raise NotApplicable("extremal equation needs a constant weight")
    g = 1.0 / (1.0 - spec.p)
    k = kappa(spec.p)
    c = k * alpha(spec.N, spec.p) * spec.weight.c**g
    f = spec.f

    def deriv(t, m):
        return -c * t ** (k - 1.0) * float(f(m)) ** g if m > 0 else 0.0

    def rhs(t, y):
        return [deriv(t, y[0])]

    def hit_zero(t, y):
        return y[0]

    hit_zero.terminal = True
    hit_zero.direction = -1
    sol = integrate.solve_ivp(
        rhs, (radii[0], radii[-1]), [u0], method="DOP853", t_eval=radii,
        rtol=1e-12, atol=1e-15, events=hit_zero, dense_output=False,
    )
    vals = np.zeros_like(radii)
    vals[: sol.y.shape[1]] = np.clip(sol.y[0], 0.0, None)
    ders = np.array([deriv(t, m) for t, m in zip(radii, vals)])
    return RadialProfile(radii, vals, ders)


def harmonic_comparison(N: int, R1: float, R2: float, I1: float, I2: float, x) -> float:
    """Radial harmonic function equal to I1 on |x| = R1 and I2 on |x| = R2."""
    n = float(np.linalg.norm(np.atleast_1d(np.asarray(x, dtype=float))))
    if not (0 < R1 < R2):
        raise InvalidSpec("need 0 < R1 < R2")
    if N == 2:
        return (I1 - I2) / (math.log(R1) - math.log(R2)) * (math.log(n) - math.log(R2)) + I2
    e = 2.0 - N
    return (I1 - I2) / (R1**e - R2**e) * (n**e - R2**e) + I2


def sphere_directions(N: int, n: int, seed: int = 0) -> np.ndarray:
    """n quasi-uniform unit vectors in R^N (scrambled Sobol mapped through the normal law)."""
    m = max(1, math.ceil(math.log2(n)))
    z = qmc.Sobol(d=N, scramble=True, seed=seed).random_base2(m)[:n]
    g = stats.norm.ppf(np.clip(z, 1e-12, 1 - 1e-12))
    return g / np.linalg.norm(g, axis=1, keepdims=True)


def sphere_infima(u, N: int, radii: Sequence[float], n_dirs: int = 512) -> np.ndarray:
    """Sampled I(R) = inf over |x| = R of u."""
    dirs = sphere_directions(N, n_dirs)
    return np.array([float(np.min(u(R * dirs))) for R in radii])


def _monotonicity(vals, rtol=1e-9):
    d = np.diff(vals)
    tol = rtol * max(1.0, float(np.max(np.abs(vals))))
    if np.all(np.abs(d) <= tol):
        return "constant"
    if np.all(d >= -tol):
        return "increasing"
    if np.all(d <= tol):
        return "decreasing"
    return "mixed"


@dataclass(frozen=True)
class FloorCheck:
    N: int
    radii: np.ndarray
    infima: np.ndarray
    constant: Optional[float]        # N > 2: largest C with u >= C |x|^(2-N) on the samples
    liminf_proxy: Optional[float]    # N = 2: min of u over the outermost sampled annulus
    log_slope: float                 # least-squares slope of I(R) against log R
    log_bound_holds: bool            # I(R) / log R is bounded on the ladder
    monotonicity: str


def serrin_zou_floor_check(u, N: int, radii: Sequence[float], n_dirs: int = 512, n_shell: int = 5) -> FloorCheck:
    """Empirical floor and growth diagnostics for a positive superharmonic u on an exterior domain."""
    radii = np.asarray(sorted(radii), dtype=float)
    if radii.size < 2:
        raise InvalidSpec("need at least two radii")
    I = sphere_infima(u, N, radii, n_dirs)
    constant = liminf = None
    if N > 2:
        constant = float(np.min(I * radii ** (N - 2.0)))
    else:
        shell = np.linspace(radii[-2], radii[-1], n_shell)
        liminf = float(np.min(sphere_infima(u, N, shell, n_dirs)))
    logs = np.log(radii)
    slope = float(np.polyfit(logs, I, 1)[0])
    big = radii > math.e
    if np.count_nonzero(big) >= 2:
        ratio = I[big] / logs[big]
        half = max(1, ratio.size // 2)
        # bounded on the ladder: the outer half never exceeds the inner half's maximum
        log_ok = bool(np.all(np.isfinite(ratio)) and ratio[half:].max() <= ratio[:half].max() * (1 + 1e-9))
    else:
        log_ok = False
    return FloorCheck(
        N=N, radii=radii, infima=I, constant=constant, liminf_proxy=liminf,
        log_slope=slope, log_bound_holds=log_ok, monotonicity=_monotonicity(I),
    )
