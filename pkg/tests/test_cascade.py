import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from cascade_forge import (
    SymbolCycle,
    build_cascade,
    classify_stem,
    code_orbit,
    doubling_gaps,
    newton_solve,
    orbit_equal,
    seed_points,
    theorem1_census,
)
from cascade_forge.continuation import PERIOD_DOUBLING
from cascade_forge.errors import InvalidChainError
from cascade_forge.horseshoe import a0_threshold


@pytest.fixture(scope="module")
def window(henon03, geo20):
    return a0_threshold(henon03, geo20) - 1.0, geo20.A1


@pytest.fixture(scope="module")
def fixed_cascade(henon03, geo20, window):
    anchor = newton_solve(henon03, 20.0, seed_points(SymbolCycle((1,)), geo20))
    return build_cascade(henon03, anchor, window, depth=5, cycle=SymbolCycle((1,)))


@pytest.fixture(scope="module")
def census6(henon03, geo20):
    return theorem1_census(henon03, geo20, 6, depth=3)


def test_classify_stem_examples():
    assert classify_stem([3, 6, 12, 24]) == 3
    assert classify_stem([4, 2, 4, 8]) == 2
    assert classify_stem([6, 3]) == 3
    assert classify_stem([4, 2, 1, 2]) == 1


def test_classify_stem_rejects_invalid():
    with pytest.raises(InvalidChainError):
        classify_stem([])
    with pytest.raises(InvalidChainError):
        classify_stem([3, 9])
    with pytest.raises(InvalidChainError):
        classify_stem([2, 4, 12])


@given(st.integers(1, 15), st.lists(st.sampled_from([-1, 0, 1]), max_size=12))
def test_classify_stem_random_walks(m, moves):
    periods, e = [m], 0
    for d in moves:
        if e + d >= 0:
            e += d
            periods.append(m * 2**e)
    stem = classify_stem(periods)
    assert stem == min(periods)
    assert all(p % stem == 0 and (p // stem) & (p // stem - 1) == 0 for p in periods)


def test_fixed_point_cascade(fixed_cascade):
    c = fixed_cascade
    assert {1, 2, 4, 8, 16, 32} <= c.periods_seen
    assert c.stem_period == 1
    assert c.unbounded_status == "confirmed-depth-5"
    stars = [e.A_star for e in c.doublings]
    assert stars[0] == pytest.approx(0.3675, abs=1e-6)
    assert stars[1] == pytest.approx(0.9125, abs=1e-6)
    gaps = doubling_gaps(c)
    assert np.all(np.diff(gaps[-3:]) < 0)


def test_segments_join_at_doublings(fixed_cascade):
    segs = fixed_cascade.segments
    for a, b in zip(segs, segs[1:]):
        ev = a.final_event
        assert ev.kind == PERIOD_DOUBLING
        assert b.k == 2 * a.k
        assert abs(b.points[0].A - ev.A_star) < 1e-2


def test_odd_anchor_keeps_its_period(henon03, geo20, window):
    cycle = SymbolCycle((-1, -1, 1))
    anchor = newton_solve(henon03, 20.0, seed_points(cycle, geo20))
    c = build_cascade(henon03, anchor, window, depth=2, cycle=cycle)
    assert c.stem_period == 3
    assert c.periods_seen <= {3, 6, 12}


def test_flip_anchor_rejected(henon03, geo20, window):
    anchor = newton_solve(henon03, 20.0, seed_points(SymbolCycle((-1,)), geo20))
    with pytest.raises(ValueError):
        build_cascade(henon03, anchor, window)


def test_census_rows(census6):
    assert census6.ok
    assert [(k, e, b) for k, e, b, _ in census6.rows] == [
        (1, 1, 1),
        (2, 0, 0),
        (3, 1, 1),
        (4, 1, 1),
        (5, 3, 3),
        (6, 4, 4),
    ]
    assert all(row[3] for row in census6.rows)
    stems = {c.cycle.label(): c.stem_period for c in census6.cascades}
    assert all(stems[c.cycle.label()] == 5 for c in census6.cascades if c.cycle.k == 5)
    assert stems["+"] == 1 and stems["--+"] == 3


def test_census_anchor_uniqueness_and_coding(census6, geo20):
    for c in census6.cascades:
        at_a1 = [o for o in c.orbits if abs(o.A - geo20.A1) < 1e-9]
        assert len(at_a1) == 1
        assert code_orbit(c.anchor, geo20) == c.cycle


def test_census_disjointness(census6):
    cs = census6.cascades
    for i, a in enumerate(cs):
        for b in cs[i + 1 :]:
            for o in a.orbits:
                assert not any(orbit_equal(o, p) for p in b.orbits if p.k == o.k and abs(p.A - o.A) < 1e-6)


def test_window_confinement_and_no_exit(census6, geo20):
    for c in census6.cascades:
        for seg in c.segments:
            assert seg.end_status != "hit-A0"
        for o in c.orbits:
            assert o.A <= geo20.A1 + 1e-9
            assert np.max(np.abs(o.points)) <= geo20.Q


def test_parallel_census_matches_serial(henon03, geo20, census6):
    par = theorem1_census(henon03, geo20, 6, depth=3, jobs=2)
    assert par.rows == census6.rows
    assert [c.to_dict() for c in par.cascades] == [c.to_dict() for c in census6.cascades]
