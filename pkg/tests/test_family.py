import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from _oracles import finite_difference_jacobian, henon_fixed_points
from cascade_forge import (
    BoundedWave,
    CompactBump,
    FamilySpec,
    builtin_perturbations,
    evaluate,
    geometry_for,
    jacobian,
    newton_solve,
    parameter_derivative,
)
from cascade_forge.errors import NumericOverflowError, ThresholdViolationError, UnknownPerturbationError
from cascade_forge.family import estimate_beta, perturbation_bounds

reals = st.floats(-5, 5, allow_nan=False)
Bs = st.floats(-2, 2, allow_nan=False).filter(lambda b: abs(b) > 1e-3)


def test_evaluate_origin(henon03):
    assert evaluate(henon03, 1.0, (0.0, 0.0)) == pytest.approx((1.0, 0.0))


def test_evaluate_unit_point(henon03):
    assert evaluate(henon03, 1.0, (1.0, 1.0)) == pytest.approx((0.3, 1.0))


def test_evaluate_fixed_point_at_doubling(henon03):
    x = (1 - 0.3) / 2
    assert evaluate(henon03, 0.3675, (x, x)) == pytest.approx((x, x), abs=1e-14)


def test_evaluate_overflow(henon03):
    with pytest.raises(NumericOverflowError):
        evaluate(henon03, 1.0, (1e200, 0.0))


def test_jacobian_at_one(henon03):
    J = jacobian(henon03, 1.0, (1.0, 7.0))
    np.testing.assert_allclose(J, [[-2.0, 0.3], [1.0, 0.0]])
    assert np.linalg.det(J) == pytest.approx(-0.3)


def test_jacobian_at_zero():
    J = jacobian(FamilySpec(-0.7), 2.0, (0.0, 3.0))
    np.testing.assert_allclose(J, [[0.0, -0.7], [1.0, 0.0]])


def test_jacobian_eigenvalues_on_doubling_locus(henon03):
    ev = np.sort(np.linalg.eigvals(jacobian(henon03, 0.3675, (0.35, 0.35))).real)
    np.testing.assert_allclose(ev, [-1.0, 0.3], atol=1e-12)


def test_geometry_a1_nine():
    geo = geometry_for(FamilySpec(0.3), 9.0)
    assert (geo.s, geo.Q, geo.rho) == pytest.approx((3.0, 6.0, 0.65))
    assert geo.N == pytest.approx(2.7)
    assert geo.N1 == pytest.approx(9.0)
    assert geo.J1 == (-6.0, -1.5) and geo.J2 == (1.5, 6.0)


def test_geometry_threshold_violation():
    with pytest.raises(ThresholdViolationError) as info:
        geometry_for(FamilySpec(0.3), 1.0)
    assert info.value.inequality == "sqrt(A1) <= beta+|B|+max(1,|B|)"


def test_geometry_b_one_boundary():
    # with B=1 the threshold is sqrt(A1) > 2; A1=4 sits exactly on it and N = 1
    with pytest.raises(ThresholdViolationError):
        geometry_for(FamilySpec(1.0), 4.0)
    geo = geometry_for(FamilySpec(1.0), 9.0)
    assert geo.N == pytest.approx(2.0)


def test_geometry_rejects_support_radius_beyond_a1():
    spec = FamilySpec(0.3, r=30.0)
    with pytest.raises(ThresholdViolationError):
        geometry_for(spec, 20.0)


def test_zero_b_rejected():
    with pytest.raises(ValueError):
        FamilySpec(0.0)


def test_builtin_none_is_zero():
    g, alpha = builtin_perturbations("none")
    A = np.linspace(-3, 3, 7)
    assert np.all(g.value(A, A) == 0)
    assert all(np.all(a == 0) for a in alpha.value(A, A, A))


def test_builtin_bounded_wave_derivative_bound():
    g, _ = builtin_perturbations("bounded-wave", 0.5)
    x = np.linspace(-50, 50, 20001)
    assert np.max(np.abs(g.dx(0.0, x))) <= 0.5 + 1e-15
    assert np.max(np.abs(np.gradient(g.value(0.0, x), x))) <= 0.5 + 1e-6


def test_builtin_compact_bump_vanishes_outside_radius():
    _, alpha = builtin_perturbations("compact-bump", 1.0, 2.0)
    rng = np.random.default_rng(0)
    P = rng.normal(size=(3, 5000))
    P *= (2.0 + rng.uniform(0, 40, size=5000)) / np.linalg.norm(P, axis=0)
    values = np.abs(np.stack(alpha.value(*P)))
    jac = np.abs(np.stack([np.stack(row) for row in alpha.jac(*P)]))
    assert values.max() == 0 and jac.max() == 0
    peak = np.hypot(*alpha.value(0.0, 0.0, 0.0))
    assert peak == pytest.approx(1.0)


def test_builtin_unknown_name():
    with pytest.raises(UnknownPerturbationError):
        builtin_perturbations("gaussian", 1.0, 1.0)


def test_beta_estimate_covers_sampled_bounds():
    g, alpha = BoundedWave(0.5), CompactBump(1.0, 2.0)
    b = perturbation_bounds(g, alpha)
    beta = estimate_beta(g, alpha)
    assert beta == pytest.approx(1.1 * max(b["g0"] + b["alpha"], b["gx"]))
    spec = FamilySpec.build(0.3, g, alpha, r=2.0)
    assert spec.check_admissible()[0]


def test_fixed_points_match_quadratic(henon03):
    for A in (0.0, 0.5, 1.0, 3.0):
        for x in henon_fixed_points(A, 0.3):
            assert evaluate(henon03, A, (x, x)) == pytest.approx((x, x), abs=1e-12)


@given(Bs, reals, reals, reals)
def test_determinant_is_minus_b(B, A, x, y):
    J = jacobian(FamilySpec(B), A, (x, y))
    assert J[0, 0] * J[1, 1] - J[0, 1] * J[1, 0] == pytest.approx(-B, rel=1e-14, abs=1e-14)


@given(
    Bs,
    reals,
    reals,
    reals,
    st.sampled_from(["none", "bounded-wave", "compact-bump"]),
    st.floats(0.0, 2.0),
)
def test_jacobian_matches_finite_differences(B, A, x, y, name, magnitude):
    spec = FamilySpec.from_builtin(B, name, magnitude, r=3.0)
    J = jacobian(spec, A, (x, y))
    fd = finite_difference_jacobian(lambda p: evaluate(spec, A, p), (x, y))
    scale = max(1.0, np.max(np.abs(J)))
    assert np.max(np.abs(J - fd)) / scale < 1e-6
    dA = parameter_derivative(spec, A, (x, y))
    h = 1e-6
    fdA = (np.asarray(evaluate(spec, A + h, (x, y))) - np.asarray(evaluate(spec, A - h, (x, y)))) / (2 * h)
    assert np.max(np.abs(np.asarray(dA) - fdA)) < 1e-6 * max(1.0, np.max(np.abs(dA)))


@given(st.floats(-0.1, 20.0), st.integers(0, 20))
def test_f2_bound_on_found_orbits(A, seed):
    spec = FamilySpec(0.3)
    geo = geometry_for(spec, 20.0)
    rng = np.random.default_rng(seed)
    k = int(rng.integers(1, 5))
    seeds = rng.uniform(-geo.Q, geo.Q, size=(k, 2))
    try:
        orbit = newton_solve(spec, A, seeds, warn=False)
    except Exception:
        return
    assert np.max(np.abs(orbit.points[:, 0])) <= geo.f2_bound(A) + 1e-9


def test_f2_bound_inequality_at_a1(geo20):
    assert geo20.f2_bound(geo20.A1) < geo20.Q
    assert geo20.rho + math.sqrt(geo20.A1 + geo20.beta + geo20.rho**2) < 2 * math.sqrt(geo20.A1)
