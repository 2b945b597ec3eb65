"""Explicit pointwise estimates on positive supersolutions.

Everything here is built on the comparison argument: inside B_r(x) a
supersolution lies above the frozen-coefficient profile w_r, which turns
into the integral inequality

    int_{m_x(r)}^{u(x)} f^(-1/(1-p)) ds >= kappa * alpha_{N,p} * int_0^r (s rho_x(s))^(1/(1-p)) ds

with kappa = (2-p)/(1-p).  Inverting the left side with F or G gives the
lower bound and the ball-infimum upper bound.
"""

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np
from scipy import integrate

from . import kernels
from ._accel import parallel_map
from .errors import InvalidRadius, InvalidSpec, NoPositivePrimitive, NotApplicable, NotIntegrable
from .geometry import (
    Constant, Domain, FullSpace, RadialPower, Weight, check_weight_on_domain,
    dist_to_boundary, rho_inf, weight_integral,
)
from .nonlinearity import (
    Integrability, Nonlinearity, PowerQ, big_f, big_f_inverse, big_g_inverse,
    classify_integrability, f_norm_infinity, has_big_g, solve_lower_endpoint,
)
from .profiles import RadialProfile

BRANCH_TOL = 1e-12
ODE_RTOL = 1e-12
ODE_ATOL = 1e-15
ODE_MAX_STEPS = 2_000_000


@dataclass(frozen=True)
class ProblemSpec:
    """Instance of -Laplace(u) >= rho(x) f(u) |grad u|^p on a domain."""

    N: int
    p: float
    f: Nonlinearity
    weight: Weight = field(default_factory=Constant)
    domain: Domain = field(default_factory=FullSpace)

    def __post_init__(self):
        if int(self.N) != self.N or self.N < 2:
            raise InvalidSpec(f"N must be an integer >= 2, got {self.N!r}")
        if not (0.0 <= self.p < 1.0):
            raise InvalidSpec(f"p must lie in [0, 1), got {self.p!r}")
        dim = getattr(self.domain, "dimension", None)
        if dim is not None and dim != self.N:
            raise InvalidSpec(f"domain is {dim}-dimensional but N={self.N}")
        check_weight_on_domain(self.weight, self.domain)

    @property
    def kappa(self):
        return kappa(self.p)


@dataclass(frozen=True)
class Saturated:
    """The bound argument reached ||F||_inf: u cannot be a non-flat supersolution here."""

    argument: float
    f_norm: float


@dataclass(frozen=True)
class BoundCurve:
    center: np.ndarray
    radii: np.ndarray
    values: list
    kind: str  # "LowerBound" or "InfUpperBound"

    def numeric_values(self, saturated_value=math.nan):
        return np.array([saturated_value if isinstance(v, Saturated) else v for v in self.values], dtype=float)


def alpha(N: int, p: float) -> float:
    """alpha_{N,p} = (1-p)/(2-p) * (N + p/(1-p))^(-1/(1-p))."""
    if N < 2 or not (0.0 <= p < 1.0):
        raise InvalidSpec("alpha needs N >= 2 and 0 <= p < 1")
    return (1.0 - p) / (2.0 - p) * (N + p / (1.0 - p)) ** (-1.0 / (1.0 - p))


def kappa(p: float) -> float:
    return (2.0 - p) / (1.0 - p)


def bound_argument(spec: ProblemSpec, x, r: float) -> float:
    """kappa * alpha * int_0^r (s rho_x(s))^(1/(1-p)) ds."""
    return kappa(spec.p) * alpha(spec.N, spec.p) * weight_integral(spec.weight, spec.p, x, r)


def _check_radius(spec, x, r):
    if r < 0:
        raise InvalidRadius("radius must be non-negative")
    d = dist_to_boundary(spec.domain, x)
    if r > 0 and r >= d:
        raise InvalidRadius(f"r={r} must be below d(x)={d}")


def lower_bound_point(spec: ProblemSpec, x, r: float):
    """u(x) >= F^-1(bound argument) for x outside the dead core, or Saturated."""
    if classify_integrability(spec.f, spec.p) is not Integrability.IntegrableAtZero:
        raise NotIntegrable("lower bound needs f^(-1/(1-p)) integrable at 0")
    _check_radius(spec, x, r)
    y = bound_argument(spec, x, r)
    norm = f_norm_infinity(spec.f, spec.p)
    if y >= norm:
        return Saturated(argument=y, f_norm=norm)
    return big_f_inverse(spec.f, spec.p, y)


def inf_ball_upper_bound(spec: ProblemSpec, x, r: float) -> float:
    """inf_{B_r(x)} u <= G^-1(bound argument)."""
    if classify_integrability(spec.f, spec.p) is not Integrability.NonIntegrableAtZero:
        raise NotApplicable("ball-infimum bound needs f^(-1/(1-p)) non-integrable at 0")
    if not has_big_g(spec.f, spec.p):
        raise NotApplicable("no positive primitive G: the tail integral diverges")
    _check_radius(spec, x, r)
    try:
        return big_g_inverse(spec.f, spec.p, bound_argument(spec, x, r))
    except NoPositivePrimitive as exc:  # pragma: no cover - guarded by has_big_g
        raise NotApplicable(str(exc)) from exc


def bound_curve(spec: ProblemSpec, x, radii: Sequence[float]) -> BoundCurve:
    x = np.asarray(x, dtype=float)
    radii = np.asarray(radii, dtype=float)
    if np.any(np.diff(radii) <= 0):
        raise InvalidRadius("radii must be strictly increasing")
    if classify_integrability(spec.f, spec.p) is Integrability.IntegrableAtZero:
        kind, fn = "LowerBound", lower_bound_point
    else:
        kind, fn = "InfUpperBound", inf_ball_upper_bound
    values = parallel_map(lambda r: fn(spec, x, float(r)), radii)
    return BoundCurve(center=x, radii=radii, values=values, kind=kind)


# --- power nonlinearity f(u) = u^q, rho = 1 --------------------------------

@dataclass(frozen=True)
class PowerCaseBound:
    branch: str  # "i", "ii" or "iii"
    coefficient: float
    exponent: float
    value: float
    factor: Optional[float] = None


def power_case_bound(N: int, p: float, q: float, x, r: float) -> PowerCaseBound:
    """Closed-form bound for -Laplace(u) >= u^q |grad u|^p.

    Branch i (q < 1-p): u(x) >= coefficient * r^exponent.
    Branch ii (q > 1-p): inf_{B_r(x)} u <= coefficient * r^exponent.
    Branch iii (q = 1-p): u(x) >= m_x(r) * factor with factor = exp(alpha r^kappa).
    """
    a = alpha(N, p)
    k = kappa(p)
    x = np.asarray(x, dtype=float)
    if abs(q - (1.0 - p)) < BRANCH_TOL:
        factor = math.exp(a * r**k)
        return PowerCaseBound("iii", coefficient=a, exponent=k, value=factor, factor=factor)
    if q < 1.0 - p:
        e = (1.0 - p) / (1.0 - p - q)
        coef = (a * (1.0 - p - q) / (1.0 - p)) ** e
        expo = (2.0 - p) / (1.0 - p - q)
        return PowerCaseBound("i", coefficient=coef, exponent=expo, value=coef * r**expo)
    e = (1.0 - p) / (p + q - 1.0)
    try:
        coef = ((1.0 - p) / ((p + q - 1.0) * a)) ** e
    except OverflowError:  # near-critical q: the constant is astronomically large
        coef = math.inf
    expo = (p - 2.0) / (p + q - 1.0)
    spec = ProblemSpec(N=N, p=p, f=PowerQ(q), weight=Constant(1.0), domain=FullSpace())
    value = inf_ball_upper_bound(spec, x, r) if r > 0 else math.inf
    return PowerCaseBound("ii", coefficient=coef, exponent=expo, value=value)


@dataclass(frozen=True)
class WeightedExteriorBound:
    constant: float
    printed_constant: float
    exponent: float
    integral: float
    gamma: float

    def value(self, x) -> float:
        return self.constant * float(np.linalg.norm(x)) ** self.exponent


def weighted_exterior_bound(N: int, p: float, q: float, beta_w: float, gamma: float, x=None) -> WeightedExteriorBound:
    """u(x) >= C |x|^((2+beta-p)/(1-p-q)) for |x| >= gamma in R^N minus B_1, rho = |x|^beta.

    ``constant`` is the value that follows from the lower bound with the
    kappa = (2-p)/(1-p) factor kept; ``printed_constant`` omits that factor
    and is therefore a weaker (smaller) admissible constant.
    """
    if not q / (1.0 - p) < 1.0:
        raise NotApplicable("weighted exterior bound needs q/(1-p) < 1")
    if not gamma > 1.0:
        raise InvalidRadius("gamma must exceed 1")
    if x is not None and float(np.linalg.norm(x)) < gamma:
        raise InvalidRadius("|x| must be at least gamma")
    g = 1.0 / (1.0 - p)
    sign = 1.0 if beta_w <= 0 else -1.0
    upper = (gamma - 1.0) / gamma
    integral, _ = integrate.quad(
        lambda t: (t * (1.0 + sign * t) ** beta_w) ** g, 0.0, upper, epsabs=1e-15, epsrel=1e-12, limit=200
    )
    a = alpha(N, p)
    e = (1.0 - p) / (1.0 - p - q)
    constant = (kappa(p) * a * (1.0 - p - q) / (1.0 - p) * integral) ** e
    printed = (a * (1.0 - p - q) / (1.0 - p)) ** e * integral**e
    exponent = (2.0 + beta_w - p) / (1.0 - p - q)
    return WeightedExteriorBound(constant=constant, printed_constant=printed, exponent=exponent, integral=integral, gamma=gamma)


# --- comparison and extremal profiles --------------------------------------

def _rows(y, N):
    y = np.asarray(y, dtype=float)
    return y.reshape(1, N) if y.ndim == 1 else y


@dataclass(frozen=True)
class ComparisonProfile:
    """w_r(y) = A (r^kappa - |y - x0|^kappa), A = alpha (rho f(m))^(1/(1-p)).

    It solves -Laplace(w) = rho f(m) |grad w|^p in B_r(x0) and vanishes on the sphere.
    """

    N: int
    p: float
    center: np.ndarray
    r: float
    rho: float
    f_m: float
    amplitude: float
    kappa: float

    @property
    def coefficient(self):
        return self.rho * self.f_m

    def _dist(self, y):
        return np.linalg.norm(_rows(y, self.N) - self.center, axis=-1)

    def value(self, y):
        return self.amplitude * (self.r**self.kappa - self._dist(y) ** self.kappa)

    def grad_norm(self, y):
        return self.amplitude * self.kappa * self._dist(y) ** (self.kappa - 1.0)

    def laplacian(self, y):
        k = self.kappa
        return -self.amplitude * k * (k + self.N - 2.0) * self._dist(y) ** (k - 2.0)

    def rhs(self, y):
        return self.coefficient * self.grad_norm(y) ** self.p

    def identity_defect(self, y):
        """-Laplace(w) - rho f(m) |grad w|^p evaluated analytically."""
        return -self.laplacian(y) - self.rhs(y)


def laplacian_of_power(N: int, k: float, radius):
    """Laplace(|y|^k) = k (k + N - 2) |y|^(k-2)."""
    return k * (k + N - 2.0) * np.asarray(radius, dtype=float) ** (k - 2.0)


def comparison_profile(spec: ProblemSpec, x0, r: float, m: float) -> ComparisonProfile:
    x0 = np.asarray(x0, dtype=float)
    if r <= 0 or m < 0:
        raise InvalidRadius("need r > 0 and m >= 0")
    rho = rho_inf(spec.weight, x0, r)
    fm = float(spec.f(m))
    a = alpha(spec.N, spec.p)
    amp = a * (rho * fm) ** (1.0 / (1.0 - spec.p))
    return ComparisonProfile(
        N=spec.N, p=spec.p, center=x0, r=float(r), rho=rho, f_m=fm, amplitude=amp, kappa=kappa(spec.p)
    )


@dataclass(frozen=True)
class ExtremalProfile:
    numeric: RadialProfile
    closed_form: Optional[RadialProfile]
    zero_radius: Optional[float]
    closed_form_zero_radius: Optional[float]
    n_steps: int
    n_rejected: int
    backend: str


def _extremal_rhs_python(spec, c):
    g = 1.0 / (1.0 - spec.p)
    k = kappa(spec.p)
    a = alpha(spec.N, spec.p)

    def rhs(r, y):
        m = y[0]
        if m <= 0:
            return [0.0]
        return [-k * a * r ** (k - 1.0) * (c * float(spec.f(m))) ** g]

    return rhs


def _integrate_extremal(spec, c, u0, radii):
    f = spec.f
    if f.kernel_code is not None:
        prm = np.array([f.kernel_code, *f.kernel_params(), spec.p, kappa(spec.p), alpha(spec.N, spec.p), c])
        ys, n, t_stop, n_steps, n_rej, status = kernels.dopri_solve(
            kernels.KIND_EXTREMAL, prm, 0.0, np.array([u0]), radii, ODE_RTOL, ODE_ATOL,
            ODE_MAX_STEPS, 0, 1e12,
        )
        if status not in (kernels.STATUS_OK, kernels.STATUS_STOPPED):
            raise ArithmeticError(f"extremal ODE integration failed with status {status}")
        vals = ys[:, 0].copy()
        vals[n:] = 0.0
        zero = float(t_stop) if status == kernels.STATUS_STOPPED else None
        return vals, zero, int(n_steps), int(n_rej), "kernel"
    event = lambda r, y: y[0]  # noqa: E731
    event.terminal = True
    event.direction = -1
    sol = integrate.solve_ivp(
        _extremal_rhs_python(spec, c), (0.0, radii[-1]), [u0], method="DOP853",
        t_eval=radii, rtol=ODE_RTOL, atol=ODE_ATOL, events=event,
    )
    vals = np.zeros_like(radii)
    vals[: sol.y.shape[1]] = sol.y[0]
    zero = float(sol.t_events[0][0]) if sol.t_events[0].size else None
    return vals, zero, int(sol.nfev), 0, "solve_ivp"


def extremal_profile(spec: ProblemSpec, u0: float, r_max: float, n_out: int = 201) -> ExtremalProfile:
    """Solve m' = -kappa alpha r^(kappa-1) (rho f(m))^(1/(1-p)), m(0) = u0, clamped at 0.

    Returns the Runge-Kutta solution next to the closed form obtained by
    inverting int_m^{u0} f^(-1/(1-p)) = alpha rho^(1/(1-p)) r^kappa.
    """
    if not isinstance(spec.weight, Constant):
        raise NotApplicable("extremal profile needs a constant weight")
    if not (0 < u0 < spec.f.a_f):
        raise InvalidSpec("u0 must lie in (0, a_f)")
    c = spec.weight.c
    g = 1.0 / (1.0 - spec.p)
    k = kappa(spec.p)
    a = alpha(spec.N, spec.p)
    radii = np.linspace(0.0, float(r_max), n_out)
    vals, zero, n_steps, n_rej, backend = _integrate_extremal(spec, c, float(u0), radii)

    def deriv(values):
        out = np.zeros_like(values)
        pos = values > 0
        out[pos] = -k * a * radii[pos] ** (k - 1.0) * (c * spec.f(values[pos])) ** g
        return out

    numeric = RadialProfile(radii, vals, deriv(vals))
    closed_vals = np.array([solve_lower_endpoint(spec.f, spec.p, float(u0), a * c**g * r**k) for r in radii])
    closed = RadialProfile(radii, closed_vals, deriv(closed_vals))
    cf_zero = None
    if classify_integrability(spec.f, spec.p) is Integrability.IntegrableAtZero:
        cf_zero = (float(big_f(spec.f, spec.p, float(u0))) / (a * c**g)) ** (1.0 / k)
    return ExtremalProfile(
        numeric=numeric, closed_form=closed, zero_radius=zero, closed_form_zero_radius=cf_zero,
        n_steps=n_steps, n_rejected=n_rej, backend=backend,
    )
