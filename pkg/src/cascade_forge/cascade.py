"""Period-doubling cascades anchored at horseshoe orbits, and the census over even cycles."""

from __future__ import annotations

import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .continuation import (
    H_INIT,
    LOCALIZE_TOL,
    PERIOD_DOUBLING,
    continue_branch,
    halve_branch,
    switch_branch,
)
from .errors import (
    CascadeForgeError,
    InvalidChainError,
    UniquenessViolationError,
)
from .horseshoe import code_orbit
from .orbit import POINT_TOL, RESIDUAL_TOL, newton_solve, orbit_equal
from .symbolic import census, enumerate_cycles, is_even, seed_points

log = logging.getLogger(__name__)

__all__ = ["Cascade", "build_cascade", "classify_stem", "theorem1_census", "CascadeCensus", "doubling_gaps"]


def _is_power_of_two(n):
    return n >= 1 and n & (n - 1) == 0


def classify_stem(periods):
    """Minimal period along an arc whose periods change by factors of two."""
    periods = [int(p) for p in periods]
    if not periods:
        raise InvalidChainError("empty period chain")
    for a, b in zip(periods, periods[1:]):
        if a != b and 2 * a != b and 2 * b != a:
            raise InvalidChainError(f"period changes from {a} to {b}, not by a factor of two")
    lo, hi = min(periods), max(periods)
    if hi % lo or not _is_power_of_two(hi // lo):
        raise InvalidChainError(f"max/min period ratio {hi}/{lo} is not a power of two")
    return lo


@dataclass
class Cascade:
    segments: list
    anchor: object = None
    cycle: object = None
    stem_period: int = None
    unbounded_status: str = "unresolved"
    periods_along: list = field(default_factory=list)

    @property
    def periods_seen(self):
        return set(self.periods_along)

    @property
    def events(self):
        return [e for seg in self.segments for e in seg.events]

    @property
    def doublings(self):
        return [e for e in self.events if e.kind == PERIOD_DOUBLING]

    @property
    def orbits(self):
        return [bp.orbit for seg in self.segments for bp in seg.points]

    def to_dict(self):
        return {
            "anchor_cycle": self.cycle.label() if self.cycle is not None else None,
            "anchor": self.anchor.to_dict() if self.anchor is not None else None,
            "periods_seen": sorted(self.periods_seen),
            "periods_along": list(self.periods_along),
            "stem_period": self.stem_period,
            "status": self.unbounded_status,
            "events": [
                {"kind": e.kind, "A_star": float(e.A_star), "period": e.orbit_at.k, "halving": e.halving}
                for e in self.events
            ],
            "segments": [
                {"k": seg.k, "start": seg.start_status, "end": seg.end_status, "n_points": len(seg.points)}
                for seg in self.segments
            ],
        }


def doubling_gaps(cascade):
    """Parameter gaps between consecutive period-doubling (not halving) events."""
    stars = [e.A_star for e in cascade.doublings if not e.halving]
    return np.abs(np.diff(stars))


def build_cascade(spec, anchor, window, depth=5, cycle=None, max_segments=None, localize_tol=LOCALIZE_TOL):
    """Follow the arc through ``anchor`` into decreasing A, switching at each doubling.

    The arc is followed until ``depth`` period-doublings have been crossed, or
    until a segment ends without a period-doubling event (window exit or step
    failure).  Period-halving points send the arc onto the nonflip side of the
    half-period branch.
    """
    if anchor.flip is not False:
        raise ValueError("cascade anchor must be a classified nonflip orbit")
    max_segments = max_segments or 4 * (depth + 2)
    segments = []
    periods = [anchor.k]
    orbit, hint, direction = anchor, None, -1
    doublings = 0
    status = "unresolved"
    A0, A1 = window
    for _ in range(max_segments):
        h0 = H_INIT if hint is None else float(np.clip(np.linalg.norm(hint), 1e-5, H_INIT))
        seg = continue_branch(spec, orbit, window, direction, tangent_hint=hint, h0=h0, localize_tol=localize_tol)
        segments.append(seg)
        event = seg.final_event
        if event is None:
            if seg.end_status == "hit-A1" and len(segments) + len(seg.points) > 2:
                status = "reached-window-limit"
            elif seg.end_status == "hit-A0":
                status = "bounded"
            break
        if event.kind != PERIOD_DOUBLING:
            break
        if event.halving:
            orbit, hint = halve_branch(spec, event)
            periods.append(orbit.k)
            continue
        if doublings == depth:
            status = f"confirmed-depth-{depth}"
            break
        try:
            orbit = switch_branch(spec, event)
        except CascadeForgeError as exc:
            log.warning("%s", exc)
            break
        doublings += 1
        periods.append(orbit.k)
        z_bif = np.concatenate([[event.A_star], np.concatenate([event.orbit_at.points] * 2).ravel()])
        hint = np.concatenate([[orbit.A], orbit.points.ravel()]) - z_bif
    cascade = Cascade(segments, anchor=anchor, cycle=cycle, unbounded_status=status, periods_along=periods)
    cascade.stem_period = classify_stem(periods)
    return cascade


# -- census over the even cycles ----------------------------------------------


@dataclass
class CascadeCensus:
    cascades: list
    rows: list
    violations: list = field(default_factory=list)

    @property
    def ok(self):
        return not self.violations


def _anchor_count(cascade, A1, tol):
    return sum(1 for o in cascade.orbits if abs(o.A - A1) <= tol)


def _shared_orbit(c1, c2, tol=POINT_TOL):
    """First pair of orbit_equal snapshots between two cascades, or None."""
    by_k = {}
    for o in c2.orbits:
        by_k.setdefault(o.k, []).append(o)
    for k, group in by_k.items():
        group.sort(key=lambda o: o.A)
        by_k[k] = (np.array([o.A for o in group]), group)
    for o in c1.orbits:
        if o.k not in by_k:
            continue
        As, group = by_k[o.k]
        lo, hi = np.searchsorted(As, [o.A - tol, o.A + tol])
        for other in group[lo:hi]:
            if orbit_equal(o, other, tol):
                return o, other
    return None


def _build_one(args):
    spec, geo, cycle, window, depth, newton_tol, localize_tol = args
    anchor = newton_solve(spec, geo.A1, seed_points(cycle, geo), tol=newton_tol, warn=False)
    return build_cascade(spec, anchor, window, depth=depth, cycle=cycle, localize_tol=localize_tol)


def theorem1_census(
    spec, geo, kmax, depth=5, A0=None, jobs=1, tol=POINT_TOL, newton_tol=RESIDUAL_TOL, localize_tol=LOCALIZE_TOL
):
    """One cascade per even cycle of period <= kmax, with uniqueness checks.

    Checks that every cascade meets the horseshoe parameter exactly once (at
    its anchor), that cascades from distinct cycles share no orbit, and that
    stem periods are ``k`` for odd ``k`` and ``k / 2**m`` for even ``k``.
    Raises :class:`UniquenessViolationError` on the first shared orbit.
    """
    if A0 is None:
        A0 = -(spec.beta + (abs(spec.B) + 1) * geo.Q + spec.beta**2 / 4) - 1.0
    window = (A0, geo.A1)
    cycles = [c for k in range(1, kmax + 1) for c in enumerate_cycles(k) if is_even(c)]
    tasks = [(spec, geo, c, window, depth, newton_tol, localize_tol) for c in cycles]
    if jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            cascades = list(pool.map(_build_one, tasks))
    else:
        cascades = [_build_one(t) for t in tasks]

    violations = []
    for c in cascades:
        code = code_orbit(c.anchor, geo)
        if code != c.cycle:
            violations.append(f"anchor of {c.cycle.label()} codes as {code.label()}")
        n = _anchor_count(c, geo.A1, 1e-9 * max(1.0, geo.A1))
        if n != 1:
            violations.append(f"cascade {c.cycle.label()} meets A1 {n} times")
        k = c.cycle.k
        stem = c.stem_period
        if (k % 2 and stem != k) or (k % stem or not _is_power_of_two(k // stem)):
            violations.append(f"cascade {c.cycle.label()} has stem {stem}")
    for i, ci in enumerate(cascades):
        for cj in cascades[i + 1 :]:
            pair = _shared_orbit(ci, cj, tol)
            if pair is not None:
                raise UniquenessViolationError(
                    ci.cycle.label(), cj.cycle.label(), f"share a period-{pair[0].k} orbit at A={pair[0].A:.10g}"
                )
    rows = []
    for k in range(1, kmax + 1):
        built = [c for c in cascades if c.cycle.k == k]
        expected = census(k).even_orbits
        unique = all(_anchor_count(c, geo.A1, 1e-9 * max(1.0, geo.A1)) == 1 for c in built)
        rows.append((k, expected, len(built), unique and len(built) == expected))
    return CascadeCensus(cascades, rows, violations)
