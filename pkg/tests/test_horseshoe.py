from dataclasses import replace

import numpy as np
import pytest

from cascade_forge import (
    ConePair,
    PeriodicOrbit,
    FamilySpec,
    SymbolCycle,
    census,
    census_at_A1,
    certify,
    check_a0,
    check_cones,
    check_f1,
    check_f3,
    code_orbit,
    evaluate,
    geometry_for,
    jacobian,
    newton_solve,
    seed_points,
)
from cascade_forge.errors import CensusMismatchError, ThresholdViolationError, UncodableOrbitError
from cascade_forge.horseshoe import a0_threshold, cone_margins


@pytest.fixture(scope="module")
def geo100(henon03):
    return geometry_for(henon03, 100.0)


@pytest.fixture(scope="module")
def geo9(henon03):
    return geometry_for(henon03, 9.0)


def test_f1_at_a1_100(henon03, geo100):
    ok, margin = check_f1(henon03, geo100, 400)
    assert ok and margin > 0


def test_f1_origin_maps_off_square(henon03, geo100):
    x, y = evaluate(henon03, 100.0, (0.0, 0.0))
    assert (x, y) == (100.0, 0.0) and x > geo100.Q == 20.0


def test_f1_unreachable_below_threshold(henon03):
    with pytest.raises(ThresholdViolationError):
        geometry_for(henon03, 1.0)


def test_f3_endpoint_arithmetic(henon03, geo100):
    assert evaluate(henon03, 100.0, (-geo100.s / 2, 0.0))[0] == pytest.approx(75.0)
    assert evaluate(henon03, 100.0, (-2 * geo100.s, 0.0))[0] == pytest.approx(-300.0)
    ok, margin = check_f3(henon03, geo100, 400)
    assert ok and margin > 0


def test_f3_with_bounded_wave(henon03, geo100):
    spec = FamilySpec.from_builtin(0.3, "bounded-wave", 0.5)
    geo = geometry_for(spec, 100.0)
    ok, margin = check_f3(spec, geo, 400)
    _, base = check_f3(henon03, geo100, 400)
    assert ok and 0 < margin < base


def test_cone_single_direction_arithmetic(henon03, geo9):
    xi, eta = jacobian(henon03, 9.0, (3.0, 0.0)) @ np.array([1.0, 1.0])
    assert abs(xi) / abs(eta) == pytest.approx(5.7)
    xi, eta = jacobian(henon03, 9.0, (1.5, 0.0)) @ np.array([1.0, 0.0])
    assert abs(xi) / abs(eta) == pytest.approx(3.0) and 3.0 > geo9.N


def test_forward_cones_at_a1_nine(henon03, geo9):
    m = cone_margins(henon03, geo9, 200, 32)
    assert m["forward"] > 0
    assert m["forward_rate"] == pytest.approx(2.7)


def test_cones_default_rates_pass(henon03, geo9):
    ok, margin = check_cones(henon03, geo9, 200, 32)
    assert ok and margin > 0


def test_cones_large_b():
    spec = FamilySpec(1.1)
    geo = geometry_for(spec, 9.0)
    assert geo.N == pytest.approx(1.9) and 1 < geo.N1 < 2
    ok, _ = check_cones(spec, geo, 100, 16)
    assert ok


def test_cone_pair_contains_its_directions():
    for c in (0.5, 1.0, 3.0):
        for orient in ("stable", "unstable"):
            cone = ConePair(c, orient)
            xi, eta = cone.directions(17)
            assert np.all(ConePair(c * (1 + 1e-9), orient).contains(xi, eta) | ConePair(c, orient).contains(xi, eta))
    with pytest.raises(ValueError):
        ConePair(0.0, "stable")


def test_a0_threshold_examples(henon03, geo9):
    assert a0_threshold(henon03, geo9) == pytest.approx(-7.8)
    assert check_a0(henon03, geo9, -8.0, 200)[0]
    ok, margin = check_a0(henon03, geo9, -7.0, 200)
    assert not ok and margin < 0
    x, _ = evaluate(henon03, -8.0, (0.0, 6.0))
    assert x == pytest.approx(-6.2) and x < -geo9.Q


def test_certify_report(henon03, geo100):
    rep = certify(henon03, geo100, -30.0, grid=200, directions=32)
    assert rep.ok
    d = rep.to_dict()
    assert d["ok"] and d["geo"]["Q"] == 20.0


def test_code_fixed_points(henon03, geo20):
    for sym in (1, -1):
        o = newton_solve(henon03, 20.0, seed_points(SymbolCycle((sym,)), geo20))
        assert code_orbit(o, geo20) == SymbolCycle((sym,))


def test_code_period_two(henon03, geo20):
    o = newton_solve(henon03, 20.0, seed_points(SymbolCycle((1, -1)), geo20))
    assert code_orbit(o, geo20).word == (-1, 1)


def test_code_rejects_points_outside_strips(henon03, geo20):
    with pytest.raises(UncodableOrbitError):
        code_orbit(PeriodicOrbit(20.0, [(0.0, 0.0)]), geo20)


def test_census_small_rows(henon03, geo20):
    rows, orbits = census_at_A1(henon03, geo20, 3)
    assert [(r.found, r.nonflip) for r in rows] == [(2, 1), (1, 0), (2, 1)]
    assert all(r.ok for r in rows)
    assert len(orbits) == 5


def test_census_parallel_matches_serial(henon03, geo20):
    serial, _ = census_at_A1(henon03, geo20, 6)
    parallel, _ = census_at_A1(henon03, geo20, 6, jobs=2)
    assert serial == parallel


def test_census_parity_and_expanding_sign(henon03, geo20):
    _, orbits = census_at_A1(henon03, geo20, 7)
    for cycle, o in orbits.items():
        code = code_orbit(o, geo20)
        assert (o.flip is False) == (code.right_visits % 2 == 0)
        expanding = max(o.multipliers, key=abs).real
        if code.right_visits % 2:
            assert expanding < -1
        else:
            assert expanding > 1


def test_census_robust_to_compact_bump(geo20):
    spec = FamilySpec.from_builtin(0.3, "compact-bump", 1.0, 2.0)
    geo = geometry_for(spec, 20.0)
    rows, _ = census_at_A1(spec, geo, 6)
    assert [(r.found, r.nonflip) for r in rows] == [(census(k).orbits, census(k).even_orbits) for k in range(1, 7)]


def test_census_mismatch_is_raised(henon03, geo20):
    # strips shrunk to a third of their width no longer contain the orbits
    narrow = replace(geo20, s=geo20.s / 3)
    with pytest.raises(CensusMismatchError):
        census_at_A1(henon03, narrow, 2)
    rows, _ = census_at_A1(henon03, narrow, 2, strict=False)
    assert not any(r.ok for r in rows)
