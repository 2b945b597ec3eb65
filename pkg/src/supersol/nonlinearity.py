"""Nonlinearities f and the transforms F, G built from f^(-1/(1-p)).

F(t) = int_0^t f(s)^(-1/(1-p)) ds exists when the integrand is integrable at
zero; otherwise G(t) = int_t^{a_f} f(s)^(-1/(1-p)) ds is used, provided that
tail converges.  Built-in families use closed forms; everything else goes
through adaptive quadrature with the zero singularity removed by substitution.
"""

import enum
import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
from scipy import integrate, optimize

from . import kernels
from .errors import DomainError, InvalidSpec, NoPositivePrimitive, NotIntegrable

QUAD_EPSABS = 1e-10
QUAD_EPSREL = 1e-8
QUAD_LIMIT = 200
BISECT_RTOL = 1e-12


class Integrability(enum.Enum):
    IntegrableAtZero = "IntegrableAtZero"
    NonIntegrableAtZero = "NonIntegrableAtZero"


class Nonlinearity:
    """Base class; subclasses are frozen dataclasses.

    Every subclass provides ``zero_exponent`` (gamma with f(s) = Theta(s^gamma)
    as s -> 0+) and ``a_f``, the right end of the domain [0, a_f).
    """

    a_f = math.inf
    kernel_code: Optional[int] = None
    zero_exponent: float

    def __call__(self, s):
        raise NotImplementedError

    @property
    def infinity_exponent(self) -> Optional[float]:
        """Growth exponent at infinity, when known in closed form."""
        return None

    def kernel_params(self):
        return (0.0, 0.0)

    def check_domain(self, s):
        s = np.asarray(s, dtype=float)
        if np.any(s < 0) or np.any(s >= self.a_f):
            raise DomainError(f"argument outside [0, {self.a_f}) for {self!r}")


def _positive(name, v):
    if not (v > 0 and math.isfinite(v)):
        raise InvalidSpec(f"{name} must be a positive finite real, got {v!r}")


@dataclass(frozen=True)
class PowerQ(Nonlinearity):
    q: float
    kernel_code = kernels.F_POWER

    def __post_init__(self):
        _positive("q", self.q)

    def __call__(self, s):
        return np.power(s, self.q)

    @property
    def zero_exponent(self):
        return self.q

    @property
    def infinity_exponent(self):
        return self.q

    def kernel_params(self):
        return (self.q, 0.0)


@dataclass(frozen=True)
class SumPowers(Nonlinearity):
    q: float
    r: float
    kernel_code = kernels.F_SUM

    def __post_init__(self):
        _positive("q", self.q)
        _positive("r", self.r)

    def __call__(self, s):
        return np.power(s, self.q) + np.power(s, self.r)

    @property
    def zero_exponent(self):
        return min(self.q, self.r)

    @property
    def infinity_exponent(self):
        return max(self.q, self.r)

    def kernel_params(self):
        return (self.q, self.r)


@dataclass(frozen=True)
class MaxPowers(Nonlinearity):
    q: float
    r: float
    kernel_code = kernels.F_MAX

    def __post_init__(self):
        _positive("q", self.q)
        _positive("r", self.r)

    def __call__(self, s):
        return np.maximum(np.power(s, self.q), np.power(s, self.r))

    @property
    def zero_exponent(self):
        return min(self.q, self.r)

    @property
    def infinity_exponent(self):
        return max(self.q, self.r)

    def kernel_params(self):
        return (self.q, self.r)


@dataclass(frozen=True)
class SingularOneMinusU(Nonlinearity):
    """f(s) = (1 - s)^(-q) on [0, 1)."""

    q: float
    kernel_code = kernels.F_SINGULAR
    a_f = 1.0

    def __post_init__(self):
        if not (self.q > 1 and math.isfinite(self.q)):
            raise InvalidSpec(f"SingularOneMinusU needs q > 1, got {self.q!r}")

    def __call__(self, s):
        return np.power(1.0 - np.asarray(s, dtype=float), -self.q)

    @property
    def zero_exponent(self):
        return 0.0

    def kernel_params(self):
        return (self.q, 0.0)


@dataclass(frozen=True)
class Custom(Nonlinearity):
    """User-supplied non-decreasing f with declared behaviour s^gamma at zero.

    The evaluator must accept numpy arrays.  Construction rejects evaluators
    that fail a sampled monotonicity/positivity check or whose ratio
    f(s)/s^gamma varies by more than a factor of 2 on [1e-12, 1e-2].
    """

    evaluator: Callable = field(compare=False)
    zero_exponent: float = 0.0
    upper_limit: float = math.inf
    name: str = "custom"

    def __post_init__(self):
        if not self.upper_limit > 0:
            raise InvalidSpec("upper_limit must be positive")
        top = self.upper_limit * (1 - 1e-9) if math.isfinite(self.upper_limit) else 1e6
        s = np.geomspace(1e-12, top, 400)
        v = np.asarray(self.evaluator(s), dtype=float)
        if np.any(~np.isfinite(v)) or np.any(v <= 0):
            raise InvalidSpec("custom f must be positive and finite on (0, a_f)")
        if np.any(np.diff(v) < -1e-12 * np.abs(v[1:])):
            raise InvalidSpec("custom f must be non-decreasing")
        small = np.geomspace(1e-12, min(1e-2, 0.5 * self.upper_limit), 60)
        ratio = np.asarray(self.evaluator(small), dtype=float) / small**self.zero_exponent
        if ratio.max() > 2.0 * ratio.min():
            raise InvalidSpec("declared zero_exponent inconsistent with f near 0")

    @property
    def a_f(self):  # type: ignore[override]
        return self.upper_limit

    def __call__(self, s):
        return np.asarray(self.evaluator(np.asarray(s, dtype=float)), dtype=float)


def eval_f(f: Nonlinearity, s):
    f.check_domain(s)
    v = f(s)
    return float(v) if np.ndim(v) == 0 else v


def _check_p(p):
    if not (0.0 <= p < 1.0):
        raise InvalidSpec(f"p must lie in [0, 1), got {p!r}")


def classify_integrability(f: Nonlinearity, p: float) -> Integrability:
    _check_p(p)
    if f.zero_exponent / (1.0 - p) < 1.0:
        return Integrability.IntegrableAtZero
    return Integrability.NonIntegrableAtZero


# --- power integrals -------------------------------------------------------

def _power_integral(e, a, b):
    """int_a^b s^(-e) ds for 0 <= a <= b <= inf, vectorised over b; may be inf."""
    b = np.asarray(b, dtype=float)
    if e == 1.0:
        with np.errstate(divide="ignore"):
            return np.log(b) - math.log(a) if a > 0 else np.full_like(b, math.inf)
    k = 1.0 - e
    with np.errstate(divide="ignore", over="ignore"):
        if k > 0:
            return (np.power(b, k) - a**k) / k
        # e > 1: integrable at infinity, singular at zero
        lo = math.inf if a == 0 else a**k
        return (lo - np.power(b, k)) / (-k)


def _pieces_max(f, p, a, b):
    lo, hi = sorted((f.q, f.r))
    e_lo, e_hi = lo / (1 - p), hi / (1 - p)
    b = np.asarray(b, dtype=float)
    below = _power_integral(e_lo, min(a, 1.0), np.minimum(b, 1.0)) if a < 1.0 else 0.0
    above = _power_integral(e_hi, max(a, 1.0), np.maximum(b, 1.0))
    return below + above


def _integrand(f, p):
    g = 1.0 / (1.0 - p)

    def h(s):
        return float(f(s)) ** -g

    return h


def _quad(fn, a, b, points=None):
    val, _err, *rest = integrate.quad(
        fn, a, b, epsabs=QUAD_EPSABS * 1e-2, epsrel=QUAD_EPSREL * 1e-2,
        limit=QUAD_LIMIT, points=points, full_output=1,
    )
    return val


def quad_integral(f: Nonlinearity, p: float, a: float, b: float) -> float:
    """int_a^b f(s)^(-1/(1-p)) ds by adaptive quadrature.

    On [0, s0] the substitution s = sigma^(1/(1-e)), e = gamma/(1-p), removes
    the integrable singularity; for e >= 1 a log substitution is used instead.
    """
    if b <= a:
        return 0.0
    h = _integrand(f, p)
    e = f.zero_exponent / (1.0 - p)
    split = min(b, 1.0, 0.5 * f.a_f)
    total = 0.0
    if a < split:
        if e < 1.0:
            k = 1.0 / (1.0 - e)
            if e > 0:
                # s = sigma^k, ds = k sigma^(k-1) dsigma
                total += _quad(lambda sg: h(sg**k) * k * sg ** (k - 1.0), a ** (1.0 / k), split ** (1.0 / k))
            else:
                total += _quad(h, a, split)
        else:
            if a == 0.0:
                return math.inf
            total += _quad(lambda tau: h(math.exp(tau)) * math.exp(tau), math.log(a), math.log(split))
        a = split
    if b > a:
        if math.isinf(b):
            total += _quad(h, a, math.inf)
        elif b < f.a_f or not math.isfinite(f.a_f):
            total += _quad(h, a, b, points=[1.0] if a < 1.0 < b else None)
        else:
            total += _quad(h, a, b)
    return total


def _tail_exponent(f: Nonlinearity, p: float) -> float:
    """Exponent e of the integrand s^(-e) at infinity; estimated for Custom."""
    if f.infinity_exponent is not None:
        return f.infinity_exponent / (1.0 - p)
    x1, x2 = 1e6, 1e12
    v1, v2 = float(f(x1)), float(f(x2))
    return math.log(v2 / v1) / math.log(x2 / x1) / (1.0 - p)


def primitive_integral(f: Nonlinearity, p: float, a: float, b):
    """int_a^b f(s)^(-1/(1-p)) ds for 0 <= a <= b <= a_f (vectorised over b)."""
    _check_p(p)
    scalar = np.ndim(b) == 0
    if isinstance(f, PowerQ):
        out = _power_integral(f.q / (1 - p), a, b)
    elif isinstance(f, MaxPowers):
        out = _pieces_max(f, p, a, b)
    elif isinstance(f, SingularOneMinusU):
        k1 = (1.0 + f.q - p) / (1.0 - p)
        bb = np.asarray(b, dtype=float)
        out = ((1.0 - a) ** k1 - np.power(1.0 - bb, k1)) / k1
    else:
        if not scalar:
            return np.array([primitive_integral(f, p, a, float(x)) for x in np.ravel(b)]).reshape(np.shape(b))
        if math.isinf(b) and not math.isinf(f.a_f):
            b = f.a_f
        if math.isinf(b) and _tail_exponent(f, p) <= 1.0 + 1e-6:
            return math.inf
        return quad_integral(f, p, a, float(b))
    return float(out) if scalar else out


# --- F and G ---------------------------------------------------------------

def _require_integrable(f, p):
    if classify_integrability(f, p) is not Integrability.IntegrableAtZero:
        raise NotIntegrable(f"f^(-1/(1-p)) not integrable at 0 for {f!r}, p={p}")


def big_f(f: Nonlinearity, p: float, t):
    """F(t) = int_0^t f(s)^(-1/(1-p)) ds; t = a_f is allowed and gives ||F||_inf."""
    _require_integrable(f, p)
    tt = np.asarray(t, dtype=float)
    if np.any(tt < 0) or np.any(tt > f.a_f):
        raise DomainError(f"t outside [0, {f.a_f}]")
    return primitive_integral(f, p, 0.0, t)


def f_norm_infinity(f: Nonlinearity, p: float) -> float:
    _require_integrable(f, p)
    if isinstance(f, PowerQ):
        return math.inf
    if isinstance(f, SingularOneMinusU):
        return (1.0 - p) / (1.0 + f.q - p)
    if math.isinf(f.a_f) and _tail_exponent(f, p) <= 1.0 + (0.0 if f.infinity_exponent is not None else 1e-6):
        return math.inf
    return float(primitive_integral(f, p, 0.0, f.a_f))


def _bisect_increasing(fn, y, lo, hi):
    """Solve fn(t) = y for increasing fn on [lo, hi] with fn(lo) <= y <= fn(hi)."""
    return optimize.bisect(lambda t: fn(t) - y, lo, hi, xtol=1e-300, rtol=BISECT_RTOL, maxiter=2000)


def _grow_upper(fn, y, a_f, start=1.0):
    """Find hi below a_f with fn(hi) >= y for increasing fn."""
    if math.isfinite(a_f):
        hi = a_f * (1.0 - 1e-16)
        return hi
    hi = start
    for _ in range(2000):
        if fn(hi) >= y:
            return hi
        hi *= 2.0
    raise NotIntegrable("could not bracket inverse")


def big_f_inverse(f: Nonlinearity, p: float, y: float) -> float:
    """Unique t with F(t) = y; saturates to a_f once y >= ||F||_inf."""
    _require_integrable(f, p)
    if y < 0:
        raise DomainError("y must be non-negative")
    if y == 0:
        return 0.0
    norm = f_norm_infinity(f, p)
    if y >= norm:
        return f.a_f
    if isinstance(f, PowerQ):
        e = 1.0 - f.q / (1.0 - p)
        return (y * e) ** (1.0 / e)
    if isinstance(f, SingularOneMinusU):
        k1 = (1.0 + f.q - p) / (1.0 - p)
        return 1.0 - (1.0 - y * k1) ** (1.0 / k1)
    if isinstance(f, MaxPowers):
        lo, hi = sorted((f.q, f.r))
        e_lo = 1.0 - lo / (1 - p)
        f1 = 1.0 / e_lo
        if y <= f1:
            return (y * e_lo) ** (1.0 / e_lo)
        e_hi = hi / (1 - p)
        rest = y - f1
        if e_hi == 1.0:
            return math.exp(rest)
        k = 1.0 - e_hi
        return (1.0 + k * rest) ** (1.0 / k)
    fn = lambda t: primitive_integral(f, p, 0.0, t)  # noqa: E731
    hi = _grow_upper(fn, y, f.a_f)
    return _bisect_increasing(fn, y, 0.0, hi)


def big_f_inverse_bisect(f: Nonlinearity, p: float, y: float) -> float:
    """Bisection inverse of F regardless of family, used to cross-check closed forms."""
    _require_integrable(f, p)
    if y == 0:
        return 0.0
    if y >= f_norm_infinity(f, p):
        return f.a_f
    fn = lambda t: float(primitive_integral(f, p, 0.0, t))  # noqa: E731
    hi = _grow_upper(fn, y, f.a_f)
    return _bisect_increasing(fn, y, 0.0, hi)


def has_big_g(f: Nonlinearity, p: float) -> bool:
    if classify_integrability(f, p) is not Integrability.NonIntegrableAtZero:
        return False
    if math.isfinite(f.a_f):
        return True
    return _tail_exponent(f, p) > 1.0


def _require_g(f, p):
    if classify_integrability(f, p) is not Integrability.NonIntegrableAtZero:
        raise NotIntegrable("G is only defined when f^(-1/(1-p)) is not integrable at 0")
    if not has_big_g(f, p):
        raise NoPositivePrimitive(f"tail of f^(-1/(1-p)) diverges for {f!r}, p={p}")


def big_g(f: Nonlinearity, p: float, t):
    """G(t) = int_t^{a_f} f(s)^(-1/(1-p)) ds, the positive primitive with inf G = 0."""
    _require_g(f, p)
    if np.any(np.asarray(t) <= 0):
        raise DomainError("G needs t > 0")
    if isinstance(f, PowerQ):
        e = f.q / (1.0 - p)
        out = np.power(np.asarray(t, dtype=float), 1.0 - e) / (e - 1.0)
        return float(out) if np.ndim(t) == 0 else out
    if np.ndim(t) != 0:
        return np.array([big_g(f, p, float(x)) for x in np.ravel(t)]).reshape(np.shape(t))
    return float(primitive_integral(f, p, float(t), f.a_f))


def big_g_inverse(f: Nonlinearity, p: float, y: float) -> float:
    _require_g(f, p)
    if y < 0:
        raise DomainError("y must be non-negative")
    if y == 0:
        return f.a_f
    if isinstance(f, PowerQ):
        e = f.q / (1.0 - p)
        try:
            return ((e - 1.0) * y) ** (-1.0 / (e - 1.0))
        except OverflowError:  # e -> 1+: the inverse leaves the double range
            return math.inf
    return big_g_inverse_bisect(f, p, y)


def big_g_inverse_bisect(f: Nonlinearity, p: float, y: float) -> float:
    _require_g(f, p)
    if y == 0:
        return f.a_f
    neg = lambda t: -big_g(f, p, t)  # noqa: E731  (increasing)
    lo = 1.0 if math.isinf(f.a_f) else 0.5 * f.a_f
    while big_g(f, p, lo) < y:
        lo *= 0.5
    hi = lo
    if math.isinf(f.a_f):
        while big_g(f, p, hi) > y:
            hi *= 2.0
    else:
        hi = f.a_f * (1.0 - 1e-15)
        if big_g(f, p, hi) > y:
            return f.a_f
    return _bisect_increasing(neg, -y, lo, hi)


def solve_lower_endpoint(f: Nonlinearity, p: float, upper: float, y: float) -> float:
    """m in [0, upper] with int_m^upper f^(-1/(1-p)) = y; 0 once y exhausts the integral."""
    if y <= 0:
        return upper
    if isinstance(f, PowerQ):
        e = f.q / (1.0 - p)
        if e == 1.0:
            return upper * math.exp(-y)
        k = 1.0 - e
        base = upper**k - k * y
        if k > 0:
            return base ** (1.0 / k) if base > 0 else 0.0
        return base ** (1.0 / k)
    if classify_integrability(f, p) is Integrability.IntegrableAtZero:
        rest = float(big_f(f, p, upper)) - y
        return big_f_inverse(f, p, rest) if rest > 0 else 0.0
    if has_big_g(f, p):
        return big_g_inverse(f, p, float(big_g(f, p, upper)) + y)
    fn = lambda m: -float(primitive_integral(f, p, m, upper))  # noqa: E731 (increasing in m)
    lo = upper
    while -fn(lo) < y:
        lo *= 0.5
    return _bisect_increasing(fn, -y, lo, upper)
