"""Periodic orbits: multi-point Newton solver, multipliers and orbit index."""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import EscapedRegionError, NoConvergenceError, NonhyperbolicOrbitWarning
from .family import jacobian_arrays, map_arrays

__all__ = [
    "PeriodicOrbit",
    "RESIDUAL_TOL",
    "POINT_TOL",
    "HYPERBOLIC_MARGIN",
    "cyclic_residual",
    "cyclic_jacobian",
    "monodromy",
    "multipliers_of",
    "classify_multipliers",
    "classify",
    "least_period",
    "newton_solve",
    "orbit_equal",
    "hausdorff",
]

RESIDUAL_TOL = 1e-10
POINT_TOL = 1e-7
HYPERBOLIC_MARGIN = 1e-6
MAX_NEWTON = 50


@dataclass
class PeriodicOrbit:
    A: float
    points: np.ndarray
    multipliers: tuple = None
    flip: bool = None
    index: int = None
    hyperbolic: bool = None
    residual: float = field(default=float("nan"), compare=False)

    def __post_init__(self):
        self.points = np.atleast_2d(np.asarray(self.points, dtype=float)).reshape(-1, 2)

    @property
    def k(self):
        return len(self.points)

    @property
    def nonflip(self):
        return self.flip is False

    def shifted(self, n=1):
        return replace(self, points=np.roll(self.points, -n, axis=0))

    def to_dict(self):
        d = {
            "A": float(self.A),
            "k": self.k,
            "points": [[float(x), float(y)] for x, y in self.points],
            "multipliers": None,
            "flip": self.flip,
            "index": self.index,
            "hyperbolic": self.hyperbolic,
        }
        if self.multipliers is not None:
            d["multipliers"] = [[float(m.real), float(m.imag)] for m in self.multipliers]
        return d

    @classmethod
    def from_dict(cls, d):
        mult = d.get("multipliers")
        if mult is not None:
            mult = tuple(complex(re, im) for re, im in mult)
        return cls(
            A=float(d["A"]),
            points=np.array(d["points"], dtype=float),
            multipliers=mult,
            flip=d.get("flip"),
            index=d.get("index"),
            hyperbolic=d.get("hyperbolic"),
        )


# -- cyclic system ------------------------------------------------------------


def cyclic_residual(spec, A, points):
    """Stacked ``F(A, p_i) - p_{i+1}`` for an ordered set of points, shape (2k,)."""
    x, y = points[:, 0], points[:, 1]
    X, Y = map_arrays(spec, A, x, y)
    nxt = np.roll(points, -1, axis=0)
    return np.column_stack([X - nxt[:, 0], Y - nxt[:, 1]]).ravel()


def _jacobian_blocks(spec, A, points):
    f1x, f1y, f2x, f2y = jacobian_arrays(spec, A, points[:, 0], points[:, 1])
    blocks = np.empty((len(points), 2, 2))
    blocks[:, 0, 0], blocks[:, 0, 1] = f1x, f1y
    blocks[:, 1, 0], blocks[:, 1, 1] = f2x, f2y
    return blocks


def cyclic_jacobian(spec, A, points):
    """Dense (2k, 2k) derivative of :func:`cyclic_residual` in the orbit points."""
    k = len(points)
    blocks = _jacobian_blocks(spec, A, points)
    J = np.zeros((2 * k, 2 * k))
    for i in range(k):
        r = 2 * i
        J[r : r + 2, r : r + 2] += blocks[i]
        c = 2 * ((i + 1) % k)
        J[r : r + 2, c : c + 2] -= np.eye(2)
    return J


def monodromy(spec, A, points):
    """Ordered product ``DF(p_{k-1}) ... DF(p_0)`` and its determinant.

    The determinant is the product of the one-step determinants rather than
    the determinant of the product, which loses all digits for long orbits.
    """
    blocks = _jacobian_blocks(spec, A, points)
    M = np.eye(2)
    det = 1.0
    for Bk in blocks:
        M = Bk @ M
        det *= Bk[0, 0] * Bk[1, 1] - Bk[0, 1] * Bk[1, 0]
    return M, det


def multipliers_of(trace, det):
    """Eigenvalues of a 2x2 matrix from trace and determinant, real ones sorted."""
    half = 0.5 * trace
    disc = half * half - det
    if disc >= 0:
        big = half + math.copysign(math.sqrt(disc), half)
        small = det / big if big != 0 else 0.0
        s1, s2 = sorted((big, small))
        return complex(s1), complex(s2)
    im = math.sqrt(-disc)
    return complex(half, -im), complex(half, im)


def classify_multipliers(s1, s2, margin=HYPERBOLIC_MARGIN):
    """``(flip, hyperbolic, index)`` from a multiplier pair; index is None if nonhyperbolic."""
    s1, s2 = complex(s1), complex(s2)
    hyperbolic = all(abs(abs(s) - 1.0) > margin for s in (s1, s2))
    real = s1.imag == 0 and s2.imag == 0
    if real:
        a, b = sorted((s1.real, s2.real))
        flip = (a < -1) != (b < -1)
    else:
        flip = False
    if not hyperbolic:
        return flip, False, None
    if not real:
        return flip, True, 1

    def interval(v):
        return -1 if v < -1 else (1 if v > 1 else 0)

    ia, ib = interval(a), interval(b)
    if ia == ib:
        index = 1
    elif ia == 0 and ib == 1:
        index = -1
    else:
        index = 0
    return flip, True, index


def classify(spec, orbit, warn=True):
    M, det = monodromy(spec, orbit.A, orbit.points)
    s1, s2 = multipliers_of(M[0, 0] + M[1, 1], det)
    flip, hyperbolic, index = classify_multipliers(s1, s2)
    if not hyperbolic and warn:
        warnings.warn(
            f"nonhyperbolic period-{orbit.k} orbit at A={orbit.A:.12g}: multipliers {s1:.6g}, {s2:.6g}",
            NonhyperbolicOrbitWarning,
            stacklevel=2,
        )
    return replace(orbit, multipliers=(s1, s2), flip=flip, hyperbolic=hyperbolic, index=index)


def least_period(points, tol=POINT_TOL):
    k = len(points)
    for d in range(1, k):
        if k % d == 0 and np.max(np.abs(np.roll(points, -d, axis=0) - points)) < tol:
            return d
    return k


def _default_escape(A):
    return 20.0 * math.sqrt(max(abs(A), 1.0))


def newton_solve(spec, A, seeds, k=None, tol=RESIDUAL_TOL, max_iter=MAX_NEWTON, escape_radius=None, warn=True):
    """Solve ``F(A, p_i) = p_{i+1}`` (indices mod k) from the given seeds.

    Returns the classified orbit reduced to its least period.  Raises
    :class:`EscapedRegionError` when an iterate leaves the disc of radius
    ``escape_radius`` (default ``20 sqrt(max(|A|, 1))``, i.e. ten times the
    square half-width at that parameter) and :class:`NoConvergenceError` when
    the residual stays above ``tol``.
    """
    pts = np.array(seeds, dtype=float).reshape(-1, 2)
    if k is not None and k != len(pts):
        raise ValueError(f"expected {k} seed points, got {len(pts)}")
    if escape_radius is None:
        escape_radius = _default_escape(A)
    res = cyclic_residual(spec, A, pts)
    rnorm = np.max(np.abs(res))
    for _ in range(max_iter):
        if rnorm < tol:
            break
        J = cyclic_jacobian(spec, A, pts)
        try:
            step = np.linalg.solve(J, -res).reshape(-1, 2)
        except np.linalg.LinAlgError as exc:
            raise NoConvergenceError(f"singular Newton matrix at A={A}") from exc
        # halve until the residual does not blow up; keeps seeds in their basin
        lam = 1.0
        for _ in range(6):
            trial = pts + lam * step
            tres = cyclic_residual(spec, A, trial)
            tnorm = np.max(np.abs(tres))
            if np.isfinite(tnorm) and tnorm < max(rnorm, tol) * 2.0:
                break
            lam *= 0.5
        pts, res, rnorm = trial, tres, tnorm
        if not np.all(np.isfinite(pts)) or np.max(np.hypot(pts[:, 0], pts[:, 1])) > escape_radius:
            raise EscapedRegionError(f"Newton iterate left radius {escape_radius:g} at A={A}")
    if not rnorm < tol:
        raise NoConvergenceError(f"residual {rnorm:.3g} after {max_iter} iterations at A={A}")
    d = least_period(pts)
    if d < len(pts):
        pts = pts[:d]
    orbit = PeriodicOrbit(float(A), pts, residual=float(rnorm))
    return classify(spec, orbit, warn=warn)


def hausdorff(P, R):
    D = np.sqrt(((P[:, None, :] - R[None, :, :]) ** 2).sum(axis=-1))
    return max(D.min(axis=1).max(), D.min(axis=0).max())


def orbit_equal(a, b, tol=POINT_TOL):
    """Same parameter and same point set, up to ``tol`` in parameter plus Hausdorff distance."""
    if a.k != b.k:
        return False
    dA = abs(a.A - b.A)
    if dA > tol:
        return False
    return dA + hausdorff(a.points, b.points) <= tol
