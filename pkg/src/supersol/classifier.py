"""Decisions drawn from the bounds: nonexistence, Liouville, dead cores.

``classify`` walks a fixed rule list and returns the first verdict that
fires, together with a certificate listing the quantities it compared.
"""

import enum
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .bounds import ProblemSpec, alpha, kappa
from .errors import NotApplicable, NotIntegrable
from .geometry import (
    Annulus, Ball, Cone2D, Constant, CustomSampled, Domain, ExteriorOfBall, FullSpace,
    RadialPower, sup_inradius,
)
from .nonlinearity import (
    Integrability, Nonlinearity, PowerQ, classify_integrability, f_norm_infinity,
)

BRANCH_TOL = 1e-12

COR1_NOTE = (
    "The closed-form dead-core radius printed for max{u^q, u^r} omits alpha_{N,p} and uses "
    "the exponent (1-p-q)/(1-p); the threshold used here is (||F||_inf/alpha)^((1-p)/(2-p)), "
    "which follows from the saturation condition alpha d^((2-p)/(1-p)) > ||F||_inf."
)
P0_NOTE = (
    "For p = 0 a positive constant is not a supersolution, so the constancy argument "
    "rules out positive supersolutions altogether."
)
P0_DEADCORE_NOTE = (
    "For p = 0 the gradient cannot vanish on an open set, so a forced dead core also means "
    "no positive supersolution exists on this domain."
)
BOUNDED_NOTE = "Conclusion holds for bounded supersolutions only; the cone example shows boundedness is needed."


class Verdict(enum.Enum):
    NoPositiveSupersolution = "NoPositiveSupersolution"
    AllSupersolutionsConstant = "AllSupersolutionsConstant"
    EventuallyConstant = "EventuallyConstant"
    ConstantOutsideCollar = "ConstantOutsideCollar"
    DeadCoreForced = "DeadCoreForced"
    BoundedSolutionsConstantOutsideCollar = "BoundedSolutionsConstantOutsideCollar"
    Inconclusive = "Inconclusive"


@dataclass(frozen=True)
class Region:
    """Closed-form description of {x in Omega : d(x) >= threshold}."""

    kind: str  # "ball", "exterior", "shell", "whole", "distance_superlevel", "empty"
    threshold: float
    inner_radius: Optional[float] = None
    outer_radius: Optional[float] = None

    @property
    def empty(self):
        return self.kind == "empty"

    def contains(self, dom: Domain, x) -> bool:
        if self.empty:
            return False
        try:
            return dom.distance(x) >= self.threshold
        except Exception:
            return False


@dataclass
class Certificate:
    rule: str
    checked_values: list = field(default_factory=list)
    notes: list = field(default_factory=list)

    def add(self, name, value):
        self.checked_values.append((name, float(value)))

    def value(self, name):
        for k, v in self.checked_values:
            if k == name:
                return v
        raise KeyError(name)


@dataclass
class Classification:
    verdict: Verdict
    certificate: Certificate
    region: Optional[Region] = None
    M: Optional[float] = None


def deadcore_threshold(f: Nonlinearity, p: float, N: int, weight_scale: float = 1.0) -> float:
    """Critical distance (||F||_inf / (alpha c^(1/(1-p))))^((1-p)/(2-p)) for rho = c."""
    try:
        norm = f_norm_infinity(f, p)
    except NotIntegrable as exc:
        raise NotApplicable(str(exc)) from exc
    if math.isinf(norm):
        raise NotApplicable("||F||_inf is infinite: no dead-core threshold")
    a = alpha(N, p) * weight_scale ** (1.0 / (1.0 - p))
    return (norm / a) ** ((1.0 - p) / (2.0 - p))


def deadcore_region(dom: Domain, threshold: float) -> Region:
    if not threshold > 0:
        raise ValueError("threshold must be positive")
    if sup_inradius(dom) <= threshold:
        return Region("empty", threshold)
    if isinstance(dom, FullSpace):
        return Region("whole", threshold)
    if isinstance(dom, Ball):
        return Region("ball", threshold, outer_radius=dom.R - threshold)
    if isinstance(dom, ExteriorOfBall):
        return Region("exterior", threshold, inner_radius=dom.R + threshold)
    if isinstance(dom, Annulus):
        return Region("shell", threshold, inner_radius=dom.R1 + threshold, outer_radius=dom.R2 - threshold)
    return Region("distance_superlevel", threshold)


@dataclass(frozen=True)
class ExponentCheck:
    holds: bool
    lhs: float
    rhs: float

    @property
    def margin(self):
        return self.rhs - self.lhs


def liouville_exponent_check(N: int, p: float, q: float, beta_w: float = 0.0) -> ExponentCheck:
    """(N-2) q + (N-1) p < N + beta, strict."""
    lhs = (N - 2) * q + (N - 1) * p
    rhs = N + beta_w
    return ExponentCheck(holds=lhs < rhs, lhs=lhs, rhs=rhs)


def _power_regime(p, q):
    e = q / (1.0 - p)
    if abs(q - (1.0 - p)) < BRANCH_TOL:
        return "critical"
    return "sub" if e < 1.0 else "super"


def _is_exterior(dom):
    return isinstance(dom, (ExteriorOfBall, FullSpace))


def _constant_outcome(p, rule, cert, positive_verdict, **kw):
    if p == 0:
        cert.rule = "Prop1-p0"
        cert.notes.append(f"derived via {rule}")
        return Classification(Verdict.NoPositiveSupersolution, cert, **kw)
    cert.rule = rule
    return Classification(positive_verdict, cert, **kw)


def classify(spec: ProblemSpec) -> Classification:
    N, p, f, w, dom = spec.N, spec.p, spec.f, spec.weight, spec.domain
    cert = Certificate(rule="none")
    cert.add("alpha_N_p", alpha(N, p))
    integ = classify_integrability(f, p)

    # (a) saturation threshold reachable inside the domain
    if integ is Integrability.IntegrableAtZero and isinstance(w, Constant):
        norm = f_norm_infinity(f, p)
        if math.isfinite(norm):
            T = deadcore_threshold(f, p, N, w.c)
            sup_d = sup_inradius(dom)
            cert.add("F_norm_inf", norm)
            cert.add("threshold", T)
            cert.add("sup_inradius", sup_d)
            cert.notes.append(COR1_NOTE)
            if sup_d > T:
                region = deadcore_region(dom, T)
                if isinstance(dom, FullSpace):
                    return _constant_outcome(p, "Prop1-full-space", cert, Verdict.AllSupersolutionsConstant, region=region)
                if isinstance(dom, (Cone2D,)) or (isinstance(dom, CustomSampled) and math.isinf(sup_d)):
                    return _constant_outcome(p, "Prop1-collar", cert, Verdict.ConstantOutsideCollar, M=T)
                if region.outer_radius is not None:
                    cert.add("region_outer_radius", region.outer_radius)
                if region.inner_radius is not None:
                    cert.add("region_inner_radius", region.inner_radius)
                # reported as a dead core even for p = 0, where it means no positive supersolution exists
                cert.rule = "Prop1-deadcore"
                if p == 0:
                    cert.notes.append(P0_DEADCORE_NOTE)
                return Classification(Verdict.DeadCoreForced, cert, region=region)

    if not isinstance(f, PowerQ):
        return Classification(Verdict.Inconclusive, cert)
    q = f.q
    regime = _power_regime(p, q)
    cert.add("q_over_1_minus_p", q / (1.0 - p))

    # (b) full space, q <= 1-p: the lower bound grows without limit
    if isinstance(dom, FullSpace) and isinstance(w, Constant) and regime != "super":
        rule = "Thm2i-full-space" if regime == "sub" else "Thm2iii-full-space"
        if regime == "critical" and p == 0:
            cert.notes.append(P0_NOTE)
        return _constant_outcome(p, rule, cert, Verdict.AllSupersolutionsConstant)

    # (c) exterior domains
    if _is_exterior(dom):
        if p == 0:
            cert.notes.append(P0_NOTE)
        if isinstance(w, RadialPower) and w.beta_w != 0:
            b = w.beta_w
            cert.add("beta_w", b)
            if regime in ("sub", "critical"):
                cert.add("p_minus_2", p - 2.0)
                if b > p - 2.0:
                    cert.rule = "Thm3i"
                    return Classification(Verdict.EventuallyConstant, cert)
                cert.rule = "Thm3i-fails"
                return Classification(Verdict.Inconclusive, cert)
            chk = liouville_exponent_check(N, p, q, b)
            cert.add("exponent_lhs", chk.lhs)
            cert.add("exponent_rhs", chk.rhs)
            if chk.holds:
                cert.rule = "Thm3ii"
                return Classification(Verdict.EventuallyConstant, cert)
            cert.rule = "Thm3ii-fails"
            return Classification(Verdict.Inconclusive, cert)
        if regime == "sub":
            cert.rule = "Thm2i-exterior"
            return Classification(Verdict.EventuallyConstant, cert)
        if regime == "critical":
            cert.rule = "Thm2iii-exterior"
            return Classification(Verdict.EventuallyConstant, cert)
        chk = liouville_exponent_check(N, p, q, 0.0)
        cert.add("exponent_lhs", chk.lhs)
        cert.add("exponent_rhs", chk.rhs)
        if chk.holds:
            cert.rule = "Thm2ii"
            return Classification(Verdict.EventuallyConstant, cert)
        cert.rule = "Thm2ii-fails"
        return Classification(Verdict.Inconclusive, cert)

    # (e) unbounded domain of infinite inradius, q < 1-p: only bounded solutions are forced
    if regime == "sub" and isinstance(w, Constant) and math.isinf(sup_inradius(dom)):
        a = alpha(N, p) * w.c ** (1.0 / (1.0 - p))
        coef = (a * (1.0 - p - q) / (1.0 - p)) ** ((1.0 - p) / (1.0 - p - q))
        expo = (2.0 - p) / (1.0 - p - q)
        M = coef ** (-1.0 / expo)
        cert.rule = "Thm2i-bounded"
        cert.add("collar_coefficient", coef)
        cert.add("collar_exponent", expo)
        cert.add("collar_M_unit_bound", M)
        cert.notes.append(BOUNDED_NOTE)
        cert.notes.append("M scales as (sup u)^(1/collar_exponent); reported for sup u = 1.")
        return Classification(Verdict.BoundedSolutionsConstantOutsideCollar, cert, M=M)

    return Classification(Verdict.Inconclusive, cert)


def recompute_certificate_value(spec: ProblemSpec, name: str) -> float:
    """Recompute a certificate entry from the spec alone."""
    N, p, f, w, dom = spec.N, spec.p, spec.f, spec.weight, spec.domain
    c = w.c if isinstance(w, Constant) else 1.0
    if name == "alpha_N_p":
        return alpha(N, p)
    if name == "F_norm_inf":
        return f_norm_infinity(f, p)
    if name == "threshold":
        return deadcore_threshold(f, p, N, c)
    if name == "sup_inradius":
        return sup_inradius(dom)
    if name == "region_outer_radius":
        return deadcore_region(dom, deadcore_threshold(f, p, N, c)).outer_radius
    if name == "region_inner_radius":
        return deadcore_region(dom, deadcore_threshold(f, p, N, c)).inner_radius
    if name == "q_over_1_minus_p":
        return f.q / (1.0 - p)
    if name == "beta_w":
        return w.beta_w
    if name == "p_minus_2":
        return p - 2.0
    if name in ("exponent_lhs", "exponent_rhs"):
        chk = liouville_exponent_check(N, p, f.q, w.beta_w if isinstance(w, RadialPower) else 0.0)
        return chk.lhs if name == "exponent_lhs" else chk.rhs
    if name in ("collar_coefficient", "collar_exponent", "collar_M_unit_bound"):
        a = alpha(N, p) * c ** (1.0 / (1.0 - p))
        q = f.q
        coef = (a * (1.0 - p - q) / (1.0 - p)) ** ((1.0 - p) / (1.0 - p - q))
        expo = (2.0 - p) / (1.0 - p - q)
        return {"collar_coefficient": coef, "collar_exponent": expo, "collar_M_unit_bound": coef ** (-1.0 / expo)}[name]
    raise KeyError(name)


def verify_certificate(spec: ProblemSpec, result: Classification, rtol: float = 1e-12) -> list:
    """Names of certificate entries that do not match a fresh recomputation."""
    bad = []
    for name, value in result.certificate.checked_values:
        fresh = recompute_certificate_value(spec, name)
        if math.isinf(value) or math.isinf(fresh):
            if value != fresh:
                bad.append(name)
        elif not np.isclose(value, fresh, rtol=rtol, atol=0.0):
            bad.append(name)
    return bad
