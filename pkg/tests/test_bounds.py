import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from supersol.bounds import (
    ProblemSpec, Saturated, alpha, bound_argument, bound_curve, comparison_profile, extremal_profile,
    inf_ball_upper_bound, kappa, laplacian_of_power, lower_bound_point, power_case_bound,
    weighted_exterior_bound,
)
from supersol.errors import InvalidRadius, InvalidSpec, NotApplicable, NotIntegrable
from supersol.geometry import Ball, Constant, ExteriorOfBall, FullSpace, RadialPower
from supersol.nonlinearity import Custom, MaxPowers, PowerQ, SingularOneMinusU, big_f_inverse, f_norm_infinity

O3 = np.zeros(3)


def test_alpha_examples():
    assert alpha(3, 0.0) == pytest.approx(1 / 6, rel=1e-15)
    assert alpha(3, 0.5) == pytest.approx(1 / 48, rel=1e-15)
    assert alpha(2, 0.0) == pytest.approx(1 / 4, rel=1e-15)
    assert kappa(0.5) == 3.0


@pytest.mark.parametrize("kw", [dict(N=1, p=0.0), dict(N=3, p=1.0), dict(N=3, p=-0.1), dict(N=2.5, p=0.0)])
def test_spec_validation(kw):
    with pytest.raises(InvalidSpec):
        ProblemSpec(f=PowerQ(1), **kw)


def test_lower_bound_examples():
    spec = ProblemSpec(3, 0.0, PowerQ(0.5))
    assert lower_bound_point(spec, O3, 6.0) == pytest.approx(9.0, rel=1e-14)
    assert lower_bound_point(spec, O3, 0.0) == 0.0
    sat = lower_bound_point(ProblemSpec(3, 0.0, MaxPowers(0.5, 2)), O3, 5.0)
    assert isinstance(sat, Saturated)
    assert sat.argument == pytest.approx(25 / 6) and sat.f_norm == pytest.approx(3.0)


def test_lower_bound_errors():
    with pytest.raises(NotIntegrable):
        lower_bound_point(ProblemSpec(3, 0.0, PowerQ(2)), O3, 1.0)
    with pytest.raises(InvalidRadius):
        lower_bound_point(ProblemSpec(3, 0.0, PowerQ(0.5), domain=Ball(2)), O3, 2.0)


def test_inf_ball_upper_bound_examples():
    spec = ProblemSpec(3, 0.0, PowerQ(2))
    assert inf_ball_upper_bound(spec, O3, 1.0) == pytest.approx(6.0, rel=1e-13)
    assert inf_ball_upper_bound(spec, O3, math.sqrt(6)) == pytest.approx(1.0, rel=1e-13)
    with pytest.raises(NotApplicable):
        inf_ball_upper_bound(ProblemSpec(3, 0.0, PowerQ(1)), O3, 1.0)
    with pytest.raises(NotApplicable):
        inf_ball_upper_bound(ProblemSpec(3, 0.0, PowerQ(0.5)), O3, 1.0)


def test_saturation_duality():
    spec = ProblemSpec(3, 0.25, MaxPowers(0.5, 2))
    norm = f_norm_infinity(spec.f, spec.p)
    for r in np.linspace(0.1, 6, 40):
        val = lower_bound_point(spec, O3, r)
        assert isinstance(val, Saturated) == (bound_argument(spec, O3, r) >= norm)


def test_bound_curve_monotone():
    lo = bound_curve(ProblemSpec(3, 0.25, PowerQ(0.5)), O3, np.linspace(0.5, 8, 16))
    vals = lo.numeric_values()
    assert lo.kind == "LowerBound" and np.all(np.diff(vals) >= 0)
    up = bound_curve(ProblemSpec(3, 0.25, PowerQ(2)), O3, np.linspace(0.5, 8, 16))
    assert up.kind == "InfUpperBound" and np.all(np.diff(up.numeric_values()) <= 0)
    with pytest.raises(InvalidRadius):
        bound_curve(ProblemSpec(3, 0.0, PowerQ(0.5)), O3, [2.0, 1.0])


def test_power_case_examples():
    b = power_case_bound(3, 0.0, 0.5, O3, 6.0)
    assert b.branch == "i"
    assert b.coefficient == pytest.approx(1 / 144, rel=1e-14)
    assert b.exponent == pytest.approx(4.0)
    assert b.value == pytest.approx(9.0, rel=1e-13)
    assert power_case_bound(3, 0.0, 1.0, O3, 0.0).factor == 1.0
    assert power_case_bound(3, 0.0, 1.0, O3, math.sqrt(6)).factor == pytest.approx(math.e, rel=1e-14)
    ii = power_case_bound(3, 0.0, 2.0, O3, 1.0)
    assert ii.branch == "ii" and ii.exponent == pytest.approx(-2.0) and ii.value == pytest.approx(6.0)


def test_branch_tolerance():
    assert power_case_bound(3, 0.25, 0.75 + 1e-13, O3, 1.0).branch == "iii"
    assert power_case_bound(3, 0.25, 0.75 + 1e-9, O3, 1.0).branch == "ii"


def test_weighted_exterior_bound():
    b = weighted_exterior_bound(3, 0.0, 0.5, 1.0, 2.0)
    assert b.exponent == pytest.approx(6.0)
    assert b.constant > b.printed_constant > 0
    assert weighted_exterior_bound(3, 0.25, 0.3, -1.0, 3.0).exponent > 0  # beta > p - 2
    assert weighted_exterior_bound(3, 0.0, 0.5, 1.0, 1.0 + 1e-9).constant < 1e-15
    with pytest.raises(NotApplicable):
        weighted_exterior_bound(3, 0.0, 1.5, 1.0, 2.0)


def test_weighted_exterior_bound_is_a_consequence_of_lower_bound():
    # the kappa-kept constant equals the lower bound at r = |x|(gamma-1)/gamma
    N, p, q, beta, gamma = 3, 0.25, 0.4, 0.7, 2.5
    b = weighted_exterior_bound(N, p, q, beta, gamma)
    spec = ProblemSpec(N, p, PowerQ(q), RadialPower(beta), ExteriorOfBall(1.0))
    for n in (3.0, 4.0, 9.0):
        x = np.array([n, 0, 0])
        direct = lower_bound_point(spec, x, n * (gamma - 1) / gamma)
        assert b.value(x) == pytest.approx(direct, rel=1e-8)


@pytest.mark.parametrize("N", [2, 3, 5])
@pytest.mark.parametrize("p", [0.0, 0.25, 0.5, 0.75])
def test_comparison_profile_identity(N, p):
    spec = ProblemSpec(N, p, PowerQ(0.5))
    w = comparison_profile(spec, np.zeros(N), 2.0, 1.7)
    y = np.random.default_rng(0).uniform(-1, 1, size=(50, N))
    defect = w.identity_defect(y)
    assert np.max(np.abs(defect)) <= 1e-12 * np.max(np.abs(w.rhs(y)))
    assert np.allclose(w.value(y * 2.0 / np.linalg.norm(y, axis=1, keepdims=True)), 0.0, atol=1e-12)
    assert laplacian_of_power(N, 2.0, 1.3) == pytest.approx(2 * N)


def test_extremal_profile_zero_radius():
    ext = extremal_profile(ProblemSpec(3, 0.0, PowerQ(0.5)), 9.0, 7.0)
    assert ext.zero_radius == pytest.approx(6.0, abs=1e-6)
    assert ext.closed_form_zero_radius == pytest.approx(6.0, rel=1e-14)
    assert ext.numeric.values[0] == 9.0
    diff = np.abs(ext.numeric.values - ext.closed_form.values)
    assert diff.max() < 1e-8


def test_extremal_profile_nonintegrable():
    ext = extremal_profile(ProblemSpec(3, 0.0, PowerQ(1)), 1.0, 3.0)
    r = ext.numeric.radii
    assert np.max(np.abs(ext.numeric.values - np.exp(-r**2 / 6))) < 1e-8
    assert ext.zero_radius is None


def test_extremal_profile_custom():
    f = Custom(lambda s: np.sqrt(s), zero_exponent=0.5)
    ext = extremal_profile(ProblemSpec(3, 0.0, f), 9.0, 5.5)
    assert ext.backend == "solve_ivp"
    r = ext.numeric.radii
    assert np.max(np.abs(ext.numeric.values - (3 - r**2 / 12) ** 2)) < 1e-8


def test_extremal_requires_constant_weight():
    spec = ProblemSpec(3, 0.0, PowerQ(0.5), RadialPower(1.0), ExteriorOfBall(1))
    with pytest.raises(NotApplicable):
        extremal_profile(spec, 1.0, 1.0)


@settings(max_examples=100, deadline=None)
@given(st.sampled_from([2, 3, 4, 5]), st.floats(0.0, 0.9), st.floats(0.05, 0.95), st.floats(0.01, 20.0))
def test_lower_bound_matches_power_closed_form(N, p, frac, r):
    q = frac * (1 - p) * 0.999
    spec = ProblemSpec(N, p, PowerQ(q))
    a = lower_bound_point(spec, np.zeros(N), r)
    b = power_case_bound(N, p, q, np.zeros(N), r).value
    assert a == pytest.approx(b, rel=1e-10)
