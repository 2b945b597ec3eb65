"""Domains, distance to the boundary, weights and their ball infima."""

import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Tuple

import numpy as np
from scipy import integrate
from scipy.stats import qmc

from .errors import InvalidRadius, InvalidSpec, OutsideDomain


def _point(x):
    x = np.asarray(x, dtype=float)
    if x.ndim != 1:
        raise ValueError("a point must be a 1-D coordinate vector")
    return x


class Domain:
    """Base class for the supported domain shapes (all centred at the origin)."""

    dimension: Optional[int] = None

    def distance(self, x) -> float:
        raise NotImplementedError

    def contains(self, x) -> bool:
        try:
            return self.distance(x) > 0
        except OutsideDomain:
            return False


@dataclass(frozen=True)
class FullSpace(Domain):
    def distance(self, x):
        _point(x)
        return math.inf


@dataclass(frozen=True)
class Ball(Domain):
    R: float

    def __post_init__(self):
        if not self.R > 0:
            raise InvalidSpec("Ball radius must be positive")

    def distance(self, x):
        d = self.R - float(np.linalg.norm(_point(x)))
        if d <= 0:
            raise OutsideDomain(f"{x} not in ball of radius {self.R}")
        return d


@dataclass(frozen=True)
class ExteriorOfBall(Domain):
    R: float

    def __post_init__(self):
        if not self.R > 0:
            raise InvalidSpec("ExteriorOfBall radius must be positive")

    def distance(self, x):
        d = float(np.linalg.norm(_point(x))) - self.R
        if d <= 0:
            raise OutsideDomain(f"{x} not outside ball of radius {self.R}")
        return d


@dataclass(frozen=True)
class Annulus(Domain):
    R1: float
    R2: float

    def __post_init__(self):
        if not (0 < self.R1 < self.R2):
            raise InvalidSpec("Annulus needs 0 < R1 < R2")

    def distance(self, x):
        n = float(np.linalg.norm(_point(x)))
        d = min(n - self.R1, self.R2 - n)
        if d <= 0:
            raise OutsideDomain(f"{x} not in annulus ({self.R1}, {self.R2})")
        return d


@dataclass(frozen=True)
class Cone2D(Domain):
    """Planar sector {r > 0, 0 < theta < theta0}."""

    theta0: float
    dimension = 2

    def __post_init__(self):
        if not (0 < self.theta0 < 2 * math.pi):
            raise InvalidSpec("Cone2D opening must lie in (0, 2 pi)")

    def distance(self, x):
        x = _point(x)
        if x.shape[0] != 2:
            raise OutsideDomain("Cone2D points are planar")
        r = float(np.hypot(x[0], x[1]))
        th = math.atan2(x[1], x[0]) % (2 * math.pi)
        if r == 0 or not (0 < th < self.theta0):
            raise OutsideDomain(f"{x} not in cone of opening {self.theta0}")

        def to_ray(angle_gap):
            return r * math.sin(angle_gap) if angle_gap < math.pi / 2 else r

        return min(to_ray(th), to_ray(self.theta0 - th))


@dataclass(frozen=True)
class CustomSampled(Domain):
    """Domain given by a distance evaluator; sup d is estimated by sampling ``box``.

    Construction checks the 1-Lipschitz property of the evaluator on random
    segments inside the box.
    """

    distance_fn: Callable = field(compare=False)
    box: Tuple[Tuple[float, ...], Tuple[float, ...]] = ((-1.0, -1.0), (1.0, 1.0))
    seed: int = 0

    def __post_init__(self):
        lo, hi = (np.asarray(b, dtype=float) for b in self.box)
        rng = np.random.default_rng(self.seed)
        a = rng.uniform(lo, hi, size=(200, lo.size))
        b = rng.uniform(lo, hi, size=(200, lo.size))
        for xa, xb in zip(a, b):
            da, db = float(self.distance_fn(xa)), float(self.distance_fn(xb))
            if abs(da - db) > np.linalg.norm(xa - xb) + 1e-9:
                raise InvalidSpec("custom distance evaluator is not 1-Lipschitz")

    @property
    def dimension(self):  # type: ignore[override]
        return len(self.box[0])

    def distance(self, x):
        d = float(self.distance_fn(_point(x)))
        if d <= 0:
            raise OutsideDomain(f"{x} not in custom domain")
        return d


def dist_to_boundary(dom: Domain, x) -> float:
    return dom.distance(x)


def sup_inradius(dom: Domain, n_samples: int = 4096) -> float:
    """sup of d over the domain; a sampled lower estimate for CustomSampled."""
    if isinstance(dom, (FullSpace, ExteriorOfBall, Cone2D)):
        return math.inf
    if isinstance(dom, Ball):
        return dom.R
    if isinstance(dom, Annulus):
        return (dom.R2 - dom.R1) / 2
    if isinstance(dom, CustomSampled):
        lo, hi = (np.asarray(b, dtype=float) for b in dom.box)
        pts = qmc.scale(qmc.Sobol(d=lo.size, scramble=False).random_base2(int(math.log2(n_samples))), lo, hi)
        vals = [float(dom.distance_fn(x)) for x in pts]
        return max(0.0, max(vals))
    raise TypeError(f"unknown domain {dom!r}")


class Weight:
    def value(self, x) -> float:
        raise NotImplementedError


@dataclass(frozen=True)
class Constant(Weight):
    c: float = 1.0

    def __post_init__(self):
        if not (self.c > 0 and math.isfinite(self.c)):
            raise InvalidSpec("constant weight must be positive")

    def value(self, x):
        return self.c


@dataclass(frozen=True)
class RadialPower(Weight):
    """rho(x) = |x|^beta_w."""

    beta_w: float

    def value(self, x):
        return float(np.linalg.norm(_point(x))) ** self.beta_w


def weight_field(w: Weight, coords):
    """rho evaluated at an array of points (..., N)."""
    if isinstance(w, Constant):
        return np.full(coords.shape[:-1], w.c)
    return np.linalg.norm(coords, axis=-1) ** w.beta_w


def check_weight_on_domain(w: Weight, dom: Domain):
    if isinstance(w, RadialPower) and w.beta_w != 0 and not isinstance(dom, (ExteriorOfBall, Annulus)):
        raise InvalidSpec("RadialPower weight with beta_w != 0 needs a domain excluding the origin")


def rho_inf(w: Weight, x, r: float) -> float:
    """Infimum of rho over B_r(x), in closed form."""
    if isinstance(w, Constant):
        return w.c
    n = float(np.linalg.norm(_point(x)))
    b = w.beta_w
    if b == 0:
        return 1.0
    if b < 0:
        return (n + r) ** b
    if r >= n:
        raise InvalidRadius(f"r={r} reaches the origin from |x|={n}")
    return (n - r) ** b


def _rho_radial(w: Weight, n: float, s):
    b = w.beta_w
    if b == 0:
        return np.ones_like(s)
    return (n + s) ** b if b < 0 else (n - s) ** b


def weight_integral(w: Weight, p: float, x, r: float) -> float:
    """int_0^r (s rho_x(s))^(1/(1-p)) ds."""
    if r < 0:
        raise InvalidRadius("radius must be non-negative")
    g = 1.0 / (1.0 - p)
    kappa = (2.0 - p) / (1.0 - p)
    if isinstance(w, Constant):
        return w.c**g * r**kappa / kappa
    rho_inf(w, x, r)  # validates the radius
    n = float(np.linalg.norm(_point(x)))
    val, _ = integrate.quad(lambda s: (s * _rho_radial(w, n, s)) ** g, 0.0, r, epsabs=1e-14, epsrel=1e-12, limit=200)
    return val


def weight_integral_scaled(w: RadialPower, p: float, x, r: float) -> float:
    """Same integral through s = |x| t: |x|^((2+beta-p)/(1-p)) int_0^{r/|x|} [t(1 +/- t)^beta]^(1/(1-p)) dt."""
    n = float(np.linalg.norm(_point(x)))
    g = 1.0 / (1.0 - p)
    b = w.beta_w
    sign = 1.0 if b <= 0 else -1.0
    val, _ = integrate.quad(lambda t: (t * (1.0 + sign * t) ** b) ** g, 0.0, r / n, epsabs=1e-15, epsrel=1e-12, limit=200)
    return n ** ((2.0 + b - p) / (1.0 - p)) * val
