"""Pseudo-arclength continuation of periodic-orbit branches in (A, orbit) space.

A period-k orbit is the state ``z = (A, x_0, y_0, ..., x_{k-1}, y_{k-1})`` of the
cyclic system ``F(A, p_i) - p_{i+1} = 0``.  Branches are followed with a
tangent predictor and a Keller corrector; bifurcations are detected from sign
changes of the test functions

    t_SN = det(M - I),   t_PD = det(M + I),   t_NS = det(M) - 1  (complex pair)

of the monodromy matrix ``M`` and localised by bisection in arclength.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import OrientationError, SwitchFailureError
from .orbit import (
    PeriodicOrbit,
    _jacobian_blocks,
    classify,
    cyclic_jacobian,
    cyclic_residual,
    least_period,
    monodromy,
    newton_solve,
)

log = logging.getLogger(__name__)

__all__ = [
    "BranchPoint",
    "BifurcationEvent",
    "Branch",
    "continue_branch",
    "detect_bifurcation",
    "switch_branch",
    "halve_branch",
    "orient",
    "test_functions",
]

SADDLE_NODE = "saddle-node"
PERIOD_DOUBLING = "period-doubling"
NEIMARK_SACKER = "neimark-sacker"
DEGENERATE = "degenerate"

H_INIT, H_MIN, H_MAX = 1e-2, 1e-6, 1e-1
MAX_HALVINGS = 8
LOCALIZE_TOL = 1e-8
CORRECTOR_TOL = 1e-10
CORRECTOR_ITERS = 10
MIN_TANGENT_COS = 0.8
MAX_DRIFT = 0.5


# -- state-vector plumbing ----------------------------------------------------


def _state(orbit):
    return np.concatenate([[orbit.A], orbit.points.ravel()])


def _split(z):
    return z[0], z[1:].reshape(-1, 2)


def _param_column(spec, A, points):
    x, y = points[:, 0], points[:, 1]
    (d1A, _, _), (d2A, _, _) = spec.alpha.jac(A, x, y)
    col = np.empty((len(points), 2))
    col[:, 0] = 1.0 + spec.g.dA(A, x) + d1A
    col[:, 1] = 0.0 + d2A
    return col.ravel()


def _residual(spec, z):
    A, pts = _split(z)
    return cyclic_residual(spec, A, pts)


def _full_jacobian(spec, z):
    A, pts = _split(z)
    return np.column_stack([_param_column(spec, A, pts), cyclic_jacobian(spec, A, pts)])


def _null_tangent(DG):
    _, _, vt = np.linalg.svd(DG)
    return vt[-1]


def _tangent(DG, prev):
    n = DG.shape[1]
    rhs = np.zeros(n)
    rhs[-1] = 1.0
    try:
        t = np.linalg.solve(np.vstack([DG, prev]), rhs)
    except np.linalg.LinAlgError:
        t = _null_tangent(DG)
        t = t if t @ prev >= 0 else -t
    return t / np.linalg.norm(t)


def _correct(spec, z_pred, t, tol=CORRECTOR_TOL, max_iter=CORRECTOR_ITERS):
    """Keller corrector: G(z) = 0 on the hyperplane through ``z_pred`` normal to ``t``.

    Returns ``(z, iterations)`` or ``(None, max_iter)`` on failure.
    """
    z = z_pred.copy()
    for it in range(1, max_iter + 1):
        H = np.concatenate([_residual(spec, z), [t @ (z - z_pred)]])
        try:
            dz = np.linalg.solve(np.vstack([_full_jacobian(spec, z), t]), -H)
        except np.linalg.LinAlgError:
            return None, max_iter
        z = z + dz
        if not np.all(np.isfinite(z)):
            return None, max_iter
        if np.max(np.abs(_residual(spec, z))) < tol and np.max(np.abs(dz)) < 1e-6:
            return z, it
    return None, max_iter


# -- data types ---------------------------------------------------------------


def test_functions(orbit):
    """``(t_SN, t_PD, t_NS)`` of a classified orbit; ``t_NS`` is nan for real multipliers."""
    s1, s2 = orbit.multipliers
    tr = (s1 + s2).real
    det = (s1 * s2).real
    t_ns = det - 1.0 if s1.imag != 0 else float("nan")
    return 1.0 - tr + det, 1.0 + tr + det, t_ns


@dataclass
class BranchPoint:
    orbit: PeriodicOrbit
    arclength: float
    tangent: np.ndarray

    @property
    def A(self):
        return self.orbit.A

    @property
    def state(self):
        return _state(self.orbit)

    def tests(self):
        return test_functions(self.orbit)


@dataclass
class BifurcationEvent:
    kind: str
    A_star: float
    orbit_at: PeriodicOrbit
    detected_between: tuple
    halving: bool = False
    tangent: np.ndarray = field(default=None, repr=False)

    def to_dict(self):
        return {
            "kind": self.kind,
            "A_star": float(self.A_star),
            "period": self.orbit_at.k,
            "halving": self.halving,
            "detected_between": [float(s) for s in self.detected_between],
            "orbit_at": self.orbit_at.to_dict(),
        }


@dataclass
class Branch:
    points: list
    events: list = field(default_factory=list)
    start_status: str = "seed"
    end_status: str = None
    orientation: int = None

    @property
    def k(self):
        return self.points[0].orbit.k

    @property
    def orbits(self):
        return [bp.orbit for bp in self.points]

    @property
    def endpoints(self):
        return (self.start_status, self.end_status)

    @property
    def final_event(self):
        return self.events[-1] if self.events and self.end_status == "joined-event" else None


# -- detection ----------------------------------------------------------------


def _sign_change(a, b):
    return np.isfinite(a) and np.isfinite(b) and (a > 0) != (b > 0)


def _fired(prev, nxt):
    pa, pb = prev.tests(), nxt.tests()
    fired = []
    if _sign_change(pa[0], pb[0]):
        fired.append(SADDLE_NODE)
    if _sign_change(pa[1], pb[1]):
        fired.append(PERIOD_DOUBLING)
    if _sign_change(pa[2], pb[2]):
        fired.append(NEIMARK_SACKER)
    return fired


def _correct_from(spec, z_anchor, t, z_start, tol=CORRECTOR_TOL, max_iter=30):
    z = z_start.copy()
    for _ in range(max_iter):
        H = np.concatenate([_residual(spec, z), [t @ (z - z_anchor)]])
        try:
            dz = np.linalg.solve(np.vstack([_full_jacobian(spec, z), t]), -H)
        except np.linalg.LinAlgError:
            return None
        z = z + dz
        if not np.all(np.isfinite(z)):
            return None
        if np.max(np.abs(_residual(spec, z))) < tol and np.max(np.abs(dz)) < 1e-9:
            return z
    return z if np.max(np.abs(_residual(spec, z))) < tol else None


def _localize(spec, prev, nxt, kind, tol=LOCALIZE_TOL):
    """Bisect in arclength on the sign of the test function for ``kind``."""
    which = {SADDLE_NODE: 0, PERIOD_DOUBLING: 1, NEIMARK_SACKER: 2}[kind]
    lo, hi = 0.0, nxt.arclength - prev.arclength
    f_lo = prev.tests()[which]
    best = nxt
    z_lo, z_hi = prev.state, nxt.state
    for _ in range(80):
        if hi - lo < tol * 0.1 and abs(z_hi[0] - z_lo[0]) < tol:
            break
        mid = 0.5 * (lo + hi)
        w = (mid - lo) / (hi - lo)
        guess = (1 - w) * z_lo + w * z_hi
        z = _correct_from(spec, prev.state + mid * prev.tangent, prev.tangent, guess)
        if z is None:
            break
        A, pts = _split(z)
        orbit = classify(spec, PeriodicOrbit(A, pts.copy()), warn=False)
        bp = BranchPoint(orbit, prev.arclength + mid, _tangent(_full_jacobian(spec, z), prev.tangent))
        f_mid = bp.tests()[which]
        if (f_mid > 0) == (f_lo > 0):
            lo, f_lo, z_lo = mid, f_mid, z
        else:
            hi, z_hi, best = mid, z, bp
    return best


def detect_bifurcation(spec, prev, nxt, at_min_step=False, tol=LOCALIZE_TOL):
    """Event between two consecutive branch points, or None.

    When several test functions change sign in one step the event is
    ``degenerate`` if the step is already minimal; otherwise None is returned
    and the caller is expected to refine (see :func:`continue_branch`).
    """
    fired = _fired(prev, nxt)
    if not fired:
        return None
    between = (prev.arclength, nxt.arclength)
    if len(fired) > 1:
        if not at_min_step:
            return None
        mid = nxt
        return BifurcationEvent(DEGENERATE, mid.A, mid.orbit, between, tangent=mid.tangent)
    kind = fired[0]
    bp = _localize(spec, prev, nxt, kind, tol)
    halving = False
    if kind == SADDLE_NODE and bp.orbit.k % 2 == 0:
        # a +1 multiplier on a 2m-orbit sitting on a doubled m-orbit is the
        # period-doubling point seen from the doubled side
        if least_period(bp.orbit.points, tol=1e-4) < bp.orbit.k:
            kind, halving = PERIOD_DOUBLING, True
    return BifurcationEvent(kind, bp.A, bp.orbit, between, halving=halving, tangent=bp.tangent)


# -- continuation driver ------------------------------------------------------


def _boundary_point(spec, prev, nxt, A_target):
    """Orbit at exactly ``A_target`` between two points straddling it."""
    w = (A_target - prev.A) / (nxt.A - prev.A)
    guess = (1 - w) * prev.orbit.points + w * nxt.orbit.points
    try:
        orbit = newton_solve(spec, A_target, guess, warn=False)
    except Exception:
        return None
    if orbit.k != prev.orbit.k:
        return None
    z = _state(orbit)
    s = prev.arclength + np.linalg.norm(z - prev.state)
    return BranchPoint(orbit, s, nxt.tangent)


def continue_branch(
    spec,
    start,
    window,
    direction=-1,
    *,
    h0=H_INIT,
    hmin=H_MIN,
    hmax=H_MAX,
    max_steps=200000,
    stop_kinds=(PERIOD_DOUBLING, NEIMARK_SACKER, DEGENERATE),
    tangent_hint=None,
    radius=None,
    localize_tol=LOCALIZE_TOL,
):
    """Follow the branch through ``start`` inside the parameter window ``(A0, A1)``.

    ``direction`` is the initial sign of dA/ds; ``tangent_hint`` (a vector in
    state space) overrides it when given.  The branch ends when it leaves the
    window, meets an event whose kind is in ``stop_kinds``, or when eight
    consecutive step halvings fail to produce a corrected point.
    """
    A0, A1 = window
    if not A0 < A1:
        raise ValueError("window must satisfy A0 < A1")
    if radius is None:
        radius = 20.0 * math.sqrt(max(abs(A0), abs(A1), 1.0))
    z0 = _state(start)
    if start.multipliers is None:
        start = classify(spec, start, warn=False)
    t0 = _null_tangent(_full_jacobian(spec, z0))
    if tangent_hint is not None:
        if t0 @ tangent_hint < 0:
            t0 = -t0
    elif np.sign(t0[0]) != np.sign(direction):
        t0 = -t0
    bp = BranchPoint(start, 0.0, t0)
    atol = 1e-9 * max(1.0, abs(A1))
    start_status = "hit-A1" if abs(start.A - A1) <= atol else ("hit-A0" if abs(start.A - A0) <= atol else "seed")
    branch = Branch([bp], start_status=start_status)
    k = start.k
    h = h0
    failures = 0
    for _ in range(max_steps):
        z_pred = bp.state + h * bp.tangent
        z, iters = _correct(spec, z_pred, bp.tangent)
        nxt = None
        if z is not None:
            A, pts = _split(z)
            tan = _tangent(_full_jacobian(spec, z), bp.tangent)
            drift = np.linalg.norm(z - z_pred)
            if (tan @ bp.tangent >= MIN_TANGENT_COS and drift <= MAX_DRIFT * h) or h <= hmin:
                orbit = classify(spec, PeriodicOrbit(A, pts.copy()), warn=False)
                nxt = BranchPoint(orbit, bp.arclength + h, tan)
        if nxt is not None and len(_fired(bp, nxt)) > 1 and h > hmin:
            nxt = None
        if nxt is None:
            failures += 1
            h *= 0.5
            if failures > MAX_HALVINGS or h < hmin:
                branch.end_status = "step-failure"
                log.info("step failure at A=%.10g (k=%d)", bp.A, k)
                return branch
            continue
        failures = 0

        if nxt.A > A1 or nxt.A < A0:
            target = A1 if nxt.A > A1 else A0
            end = _boundary_point(spec, bp, nxt, target)
            if end is not None:
                branch.points.append(end)
            branch.end_status = "hit-A1" if target == A1 else "hit-A0"
            return branch
        if np.max(np.hypot(nxt.orbit.points[:, 0], nxt.orbit.points[:, 1])) > radius:
            branch.points.append(nxt)
            branch.end_status = "left-window"
            return branch

        event = detect_bifurcation(spec, bp, nxt, at_min_step=h <= hmin, tol=localize_tol)
        if event is not None:
            branch.events.append(event)
            log.debug("%s at A=%.12g (k=%d)", event.kind, event.A_star, event.orbit_at.k)
            if event.kind in stop_kinds:
                branch.points.append(BranchPoint(event.orbit_at, event.detected_between[0], event.tangent))
                branch.end_status = "joined-event"
                return branch

        branch.points.append(nxt)
        bp = nxt
        if iters <= 2:
            h = min(h * 1.5, hmax)
        elif iters >= 5:
            h = max(h * 0.6, hmin)
    branch.end_status = "step-failure"
    return branch


# -- branch switching ---------------------------------------------------------


def _flip_eigvec(M):
    _, _, vt = np.linalg.svd(M + np.eye(2))
    return vt[-1]


def _doubling_direction(spec, orbit):
    """Null direction of the doubled cyclic system at a period-doubling point."""
    M, _ = monodromy(spec, orbit.A, orbit.points)
    v = _flip_eigvec(M)
    blocks = _jacobian_blocks(spec, orbit.A, orbit.points)
    vs = [v]
    for i in range(1, orbit.k):
        vs.append(blocks[i - 1] @ vs[-1])
    half = np.array(vs)
    w = np.concatenate([half, -half]).ravel()
    return w / np.linalg.norm(w)


def switch_branch(spec, event, amplitudes=(1e-5, 1e-4, 3e-4, 1e-3, 3e-3, 1e-2, 3e-2)):
    """A period-2k orbit on the branch emanating from a period-doubling event.

    First tries Newton at ``A_star +/- 1e-4`` from the doubled orbit displaced
    by ``1e-4`` along the flip eigenvector; if that collapses back onto the
    period-k orbit, solves the bordered system that pins the displacement
    along the doubled null direction and frees the parameter.
    """
    if event.kind != PERIOD_DOUBLING or event.halving:
        raise ValueError(f"switch_branch needs a period-doubling event, got {event.kind!r}")
    base = event.orbit_at
    k = base.k
    w = _doubling_direction(spec, base)
    doubled = np.concatenate([base.points, base.points])
    z_bif = np.concatenate([[event.A_star], doubled.ravel()])
    wd = w.reshape(-1, 2)

    def genuine(orbit, reach):
        # born orbits sit O(sqrt|A - A_star|) from the doubled orbit with a multiplier near +1
        if orbit.k != 2 * k or np.max(np.abs(orbit.points - doubled)) > reach:
            return False
        return min(abs(m - 1.0) for m in orbit.multipliers) < 0.5

    for side in (1.0, -1.0):
        A = event.A_star + side * 1e-4
        try:
            orbit = newton_solve(spec, A, doubled + 1e-4 * wd, warn=False)
        except Exception:
            continue
        if genuine(orbit, 0.05):
            return orbit
    t = np.concatenate([[0.0], w])
    for h in amplitudes:
        z_pred = z_bif + h * t
        z = _correct_from(spec, z_pred, t, z_pred)
        if z is None:
            continue
        A, pts = _split(z)
        if least_period(pts) != 2 * k:
            continue
        orbit = classify(spec, PeriodicOrbit(A, pts.copy()), warn=False)
        if genuine(orbit, 10 * h):
            return orbit
    raise SwitchFailureError(f"no period-{2 * k} orbit near A={event.A_star:.12g}")


def halve_branch(spec, event, h=1e-3):
    """Step from a period-halving point onto the nonflip side of the half-period branch.

    Returns ``(orbit, tangent_hint)`` for :func:`continue_branch`.
    """
    full = event.orbit_at
    m = full.k // 2
    pts = 0.5 * (full.points[:m] + full.points[m:])
    base = newton_solve(spec, event.A_star, pts, warn=False)
    if base.k != m:
        raise SwitchFailureError(f"half-period orbit did not converge at A={event.A_star:.12g}")
    z0 = _state(base)
    t = _null_tangent(_full_jacobian(spec, z0))
    for sign in (1.0, -1.0):
        z = _correct_from(spec, z0 + sign * h * t, sign * t, z0 + sign * h * t)
        if z is None:
            continue
        A, p = _split(z)
        orbit = classify(spec, PeriodicOrbit(A, p.copy()), warn=False)
        if orbit.flip is False and orbit.hyperbolic:
            return orbit, sign * t
    raise SwitchFailureError(f"no nonflip side at halving point A={event.A_star:.12g}")


# -- index orientation --------------------------------------------------------


def orient(branch, min_dA=1e-12):
    """Set ``branch.orientation`` so that index -1 <-> A decreasing, +1 <-> A increasing.

    ``orientation`` is +1 when the stored point order is the index orientation,
    -1 when the reverse order is, and None when no segment decides it.
    """
    pts = [bp for bp in branch.points if bp.orbit.hyperbolic]
    if any(bp.orbit.index == 0 for bp in pts[1:-1]):
        raise OrientationError("branch interior contains flip orbits; not a nonflip arc")
    fwd = bwd = 0
    for a, b in zip(pts, pts[1:]):
        dA = b.A - a.A
        if abs(dA) < min_dA or a.orbit.index != b.orbit.index or a.orbit.index not in (-1, 1):
            continue
        agrees = (a.orbit.index == -1) == (dA < 0)
        if agrees:
            fwd += 1
        else:
            bwd += 1
    if fwd and bwd:
        raise OrientationError(f"inconsistent index orientation ({fwd} forward, {bwd} backward segments)")
    branch.orientation = -1 if bwd else (1 if fwd else None)
    return branch
