"""Sampled certification of the horseshoe at large A1 and the periodic-orbit census there.

All checks evaluate the family on dense grids and report the worst slack of
the inequality they test; a check passes when that margin is positive.
"""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np

from .errors import CensusMismatchError, SingularJacobianError, UncodableOrbitError
from .family import jacobian_arrays, map_arrays
from .orbit import POINT_TOL, RESIDUAL_TOL, newton_solve, orbit_equal
from .symbolic import SymbolCycle, census, enumerate_cycles, is_even, seed_points

__all__ = [
    "ConePair",
    "CertificationReport",
    "CensusRow",
    "check_f1",
    "check_f3",
    "check_cones",
    "cone_margins",
    "check_a0",
    "a0_threshold",
    "certify",
    "code_orbit",
    "census_at_A1",
    "DEFAULT_GRID",
    "DEFAULT_DIRECTIONS",
]

DEFAULT_GRID = 400
DEFAULT_DIRECTIONS = 64


def _outside_distance(X, Y, Q):
    """Chebyshev distance of (X, Y) outside the square [-Q, Q]^2 (negative inside)."""
    return np.maximum(np.abs(X) - Q, np.abs(Y) - Q)


def check_f1(spec, geo, grid=DEFAULT_GRID):
    """The strip between J1 and J2 maps off the square E at A1."""
    s, Q = geo.s, geo.Q
    x = np.linspace(-0.5 * s, 0.5 * s, grid)
    y = np.linspace(-Q, Q, grid)
    X, Y = map_arrays(spec, geo.A1, *np.meshgrid(x, y, indexing="ij"))
    margin = float(np.min(_outside_distance(X, Y, Q)))
    return margin > 0, margin


def check_f3(spec, geo, grid=DEFAULT_GRID):
    """Each strip J_i x L is stretched monotonically across L and stays in its column.

    The margin is the smallest of: min |dF1/dx| on the strips (with a constant
    sign per horizontal line), the overshoot of the endpoint images beyond
    [-Q, Q], and the gap between the two column images.  Containment of
    F2(J_i x L) in J_i holds with equality for the unperturbed map, so it is
    checked up to the sampled size of alpha2 and does not enter the margin.
    """
    A1, Q = geo.A1, geo.Q
    y = np.linspace(-Q, Q, grid)
    margins = []
    images = []
    contain_ok = True
    for (lo, hi), near, far in ((geo.J1, geo.J1[1], geo.J1[0]), (geo.J2, geo.J2[0], geo.J2[1])):
        x = np.linspace(lo, hi, grid)
        xx, yy = np.meshgrid(x, y, indexing="ij")
        f1x = jacobian_arrays(spec, A1, xx, yy)[0]
        sign = np.sign(f1x[0:1, :])
        same = np.all(np.sign(f1x) == sign, axis=0)
        mono = np.where(same, np.min(np.abs(f1x), axis=0), -np.min(np.abs(f1x), axis=0))
        margins.append(float(np.min(mono)))
        X_near, _ = map_arrays(spec, A1, np.full_like(y, near), y)
        X_far, _ = map_arrays(spec, A1, np.full_like(y, far), y)
        margins.append(float(np.min(np.minimum(X_near - Q, -Q - X_far))))
        _, Y = map_arrays(spec, A1, xx, yy)
        a2 = spec.alpha.value(A1, xx, yy)[1]
        slack = float(np.max(np.abs(a2))) + 1e-12
        contain_ok &= bool(np.all((Y >= lo - slack) & (Y <= hi + slack)))
        images.append((float(np.min(Y)), float(np.max(Y))))
    margins.append(images[1][0] - images[0][1])
    margin = min(margins)
    return (margin > 0 and contain_ok), margin


@dataclass(frozen=True)
class ConePair:
    """Cone of slope ``c``: stable ``|xi| >= c|eta|`` or unstable ``|xi| <= c|eta|``."""

    c: float
    orientation: str

    def __post_init__(self):
        if not self.c > 0:
            raise ValueError("cone parameter must be positive")
        if self.orientation not in ("stable", "unstable"):
            raise ValueError("orientation must be 'stable' or 'unstable'")

    def contains(self, xi, eta):
        if self.orientation == "stable":
            return np.abs(xi) >= self.c * np.abs(eta)
        return np.abs(xi) <= self.c * np.abs(eta)

    def directions(self, n):
        """``n`` unit vectors spanning the cone, both edges included."""
        if self.orientation == "stable":
            half = np.arctan(1.0 / self.c)
            th = np.linspace(-half, half, n)
            return np.cos(th), np.sin(th)
        half = np.arctan(self.c)
        th = np.linspace(np.pi / 2 - half, np.pi / 2 + half, n)
        return np.cos(th), np.sin(th)


def _strip_points(geo, grid):
    # cell-centred samples of J x L; J's closure puts the tight case of the
    # stable-cone bound exactly on |x| = s/2
    n = max(grid // 2, 1)
    xs = []
    for lo, hi in (geo.J1, geo.J2):
        h = (hi - lo) / n
        xs.append(lo + h * (np.arange(n) + 0.5))
    hy = 2 * geo.Q / grid
    y = -geo.Q + hy * (np.arange(grid) + 0.5)
    return np.concatenate(xs), y


def cone_margins(spec, geo, grid=DEFAULT_GRID, directions=DEFAULT_DIRECTIONS, forward_rate=None, inverse_rate=None):
    """Worst slack of the stable-cone (forward) and unstable-cone (inverse) conditions.

    Forward: for (xi, eta) in S+_1, ``(xi', eta') = DF (xi, eta)`` must have
    ``|xi'|/|eta'|`` and ``|xi'|/|xi|`` at least ``forward_rate`` (default N).
    Inverse: for (xi, eta) in S-_1, ``(xi', eta') = DF^-1 (xi, eta)`` must have
    ``|eta'|/|xi'|`` and ``|eta'|/|eta|`` at least ``inverse_rate`` (default
    ``geo.inverse_cone_rate``).
    """
    fwd_rate = geo.N if forward_rate is None else forward_rate
    inv_rate = geo.inverse_cone_rate if inverse_rate is None else inverse_rate
    xs, ys = _strip_points(geo, grid)
    sxi, seta = ConePair(1.0, "stable").directions(directions)
    uxi, ueta = ConePair(1.0, "unstable").directions(directions)
    fwd = inv = np.inf
    for y in ys:
        f1x, f1y, f2x, f2y = (a[:, None] for a in jacobian_arrays(spec, geo.A1, xs, np.full_like(xs, y)))
        det = f1x * f2y - f1y * f2x
        if np.min(np.abs(det)) < 1e-12:
            raise SingularJacobianError(f"|det DF| < 1e-12 at y={y:g}")
        xi1 = f1x * sxi + f1y * seta
        eta1 = f2x * sxi + f2y * seta
        with np.errstate(divide="ignore"):
            r = np.minimum(np.abs(xi1) / np.abs(eta1), np.abs(xi1) / np.abs(sxi))
        fwd = min(fwd, float(np.min(r)))
        xim = (f2y * uxi - f1y * ueta) / det
        etam = (-f2x * uxi + f1x * ueta) / det
        with np.errstate(divide="ignore"):
            r = np.minimum(np.abs(etam) / np.abs(xim), np.abs(etam) / np.abs(ueta))
        inv = min(inv, float(np.min(r)))
    return {
        "forward": fwd - fwd_rate,
        "inverse": inv - inv_rate,
        "forward_ratio": fwd,
        "inverse_ratio": inv,
        "forward_rate": fwd_rate,
        "inverse_rate": inv_rate,
    }


def check_cones(spec, geo, grid=DEFAULT_GRID, directions=DEFAULT_DIRECTIONS, forward_rate=None, inverse_rate=None):
    m = cone_margins(spec, geo, grid, directions, forward_rate, inverse_rate)
    margin = min(m["forward"], m["inverse"])
    return margin > 0, margin


def a0_threshold(spec, geo):
    """Closed-form bound: the family has no orbits in E once A0 is below this."""
    beta = spec.beta
    return -(beta + (abs(spec.B) + 1.0) * geo.Q + beta * beta / 4.0)


def check_a0(spec, geo, A0, grid=DEFAULT_GRID):
    """No point of E maps into E at A0: closed-form inequality and grid check."""
    closed = a0_threshold(spec, geo) - A0
    Q = geo.Q
    axis = np.linspace(-Q, Q, grid)
    X, Y = map_arrays(spec, A0, *np.meshgrid(axis, axis, indexing="ij"))
    grid_margin = float(np.min(_outside_distance(X, Y, Q)))
    margin = min(closed, grid_margin)
    return margin > 0, margin


@dataclass
class CertificationReport:
    geo: object
    a0: float
    f1_ok: bool
    f1_margin: float
    f3_ok: bool
    f3_margin: float
    cone_ok: bool
    cone_margin: float
    a0_ok: bool
    a0_margin: float
    samples: dict = field(default_factory=dict)
    cone_detail: dict = field(default_factory=dict)

    @property
    def ok(self):
        return self.f1_ok and self.f3_ok and self.cone_ok and self.a0_ok

    def to_dict(self):
        d = asdict(self)
        d["geo"] = self.geo.to_dict()
        d["ok"] = self.ok
        return d


def certify(spec, geo, A0, grid=DEFAULT_GRID, directions=DEFAULT_DIRECTIONS):
    f1 = check_f1(spec, geo, grid)
    f3 = check_f3(spec, geo, grid)
    cones = cone_margins(spec, geo, grid, directions)
    a0 = check_a0(spec, geo, A0, grid)
    cone_margin = min(cones["forward"], cones["inverse"])
    return CertificationReport(
        geo=geo,
        a0=float(A0),
        f1_ok=bool(f1[0]),
        f1_margin=f1[1],
        f3_ok=bool(f3[0]),
        f3_margin=f3[1],
        cone_ok=bool(cone_margin > 0),
        cone_margin=cone_margin,
        a0_ok=bool(a0[0]),
        a0_margin=a0[1],
        samples={"f1": grid * grid, "f3": 2 * grid * grid, "cones": grid * (2 * (grid // 2)) * directions, "a0": grid * grid},
        cone_detail=cones,
    )


# -- coding and census --------------------------------------------------------


def code_orbit(orbit, geo, tol=1e-9):
    """Itinerary of an orbit at A1: +1 in the left strip J1 x L, -1 in the right strip J2 x L."""
    word = []
    for x, y in orbit.points:
        if abs(y) > geo.Q + tol:
            raise UncodableOrbitError(f"point ({x:g}, {y:g}) outside L")
        if geo.J1[0] - tol <= x <= geo.J1[1] + tol:
            word.append(1)
        elif geo.J2[0] - tol <= x <= geo.J2[1] + tol:
            word.append(-1)
        else:
            raise UncodableOrbitError(f"point ({x:g}, {y:g}) outside J x L")
    return SymbolCycle(tuple(word))


@dataclass
class CensusRow:
    k: int
    expected_orbits: int
    expected_even: int
    found: int
    nonflip: int
    roundtrip_ok: int
    parity_ok: int

    @property
    def ok(self):
        return (
            self.found == self.expected_orbits
            and self.nonflip == self.expected_even
            and self.roundtrip_ok == self.found
            and self.parity_ok == self.found
        )


def _solve_cycle(args):
    spec, geo, cycle, tol = args
    return cycle, newton_solve(spec, geo.A1, seed_points(cycle, geo), tol=tol, warn=False)


def census_at_A1(spec, geo, kmax=10, jobs=1, strict=True, tol=RESIDUAL_TOL, point_tol=POINT_TOL):
    """Solve for the orbit of every cycle with k <= kmax and compare with the shift counts.

    Returns ``(rows, orbits)`` where ``orbits`` maps each cycle to its solved
    orbit.  With ``strict`` a :class:`CensusMismatchError` is raised on the
    first period whose counts disagree.
    """
    tasks = [(spec, geo, c, tol) for k in range(1, kmax + 1) for c in enumerate_cycles(k)]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            solved = list(pool.map(_solve_cycle, tasks, chunksize=16))
    else:
        solved = [_solve_cycle(t) for t in tasks]
    orbits = dict(solved)
    rows = []
    for k in range(1, kmax + 1):
        cycles = [c for c in orbits if c.k == k]
        distinct = []
        for c in cycles:
            o = orbits[c]
            if o.k == k and not any(orbit_equal(o, d, point_tol) for d in distinct):
                distinct.append(o)
        roundtrip = parity = 0
        missing, extra = [], []
        for c in cycles:
            o = orbits[c]
            try:
                code = code_orbit(o, geo)
            except UncodableOrbitError:
                missing.append(c.label())
                continue
            if code == c:
                roundtrip += 1
            else:
                missing.append(c.label())
                extra.append(code.label())
            visits_even = code.right_visits % 2 == 0
            if (o.flip is False) == visits_even == is_even(code):
                parity += 1
        expected = census(k)
        row = CensusRow(
            k,
            expected.orbits,
            expected.even_orbits,
            len(distinct),
            sum(1 for o in distinct if o.flip is False),
            roundtrip,
            parity,
        )
        rows.append(row)
        if strict and not row.ok:
            raise CensusMismatchError(k, missing, extra, detail=f"row {row}")
    return rows, orbits
