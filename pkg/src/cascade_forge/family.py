"""The perturbed Hénon family and the constants of its horseshoe geometry.

The family is

    F(A, x, y) = (A + B*y - x**2 + g(A, x) + alpha1(A, x, y),  x + alpha2(A, x, y))

with ``g`` a uniformly C^1-bounded term in ``x`` and ``alpha`` small (in C^1)
outside a ball of radius ``r`` in ``(A, x, y)`` space.  Perturbations are plain
objects exposing analytic first derivatives; every method broadcasts over
numpy arrays so the grid checks in :mod:`cascade_forge.horseshoe` can
evaluate whole meshes at once.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import NumericOverflowError, ThresholdViolationError, UnknownPerturbationError

__all__ = [
    "ZeroG",
    "BoundedWave",
    "ZeroAlpha",
    "CompactBump",
    "FamilySpec",
    "HorseshoeGeometry",
    "evaluate",
    "jacobian",
    "parameter_derivative",
    "map_arrays",
    "geometry_for",
    "builtin_perturbations",
    "perturbation_bounds",
    "estimate_beta",
    "henon",
]

PERTURBATION_NAMES = ("none", "bounded-wave", "compact-bump")


# -- perturbation terms -------------------------------------------------------


@dataclass(frozen=True)
class ZeroG:
    def value(self, A, x):
        return np.zeros(np.broadcast(A, x).shape) if np.ndim(A) or np.ndim(x) else 0.0

    def dx(self, A, x):
        return self.value(A, x)

    def dA(self, A, x):
        return self.value(A, x)


@dataclass(frozen=True)
class BoundedWave:
    """g(A, x) = magnitude * sin(x); g(A, 0) = 0 and |dg/dx| <= magnitude."""

    magnitude: float

    def value(self, A, x):
        return self.magnitude * np.sin(x) + 0.0 * np.asarray(A)

    def dx(self, A, x):
        return self.magnitude * np.cos(x) + 0.0 * np.asarray(A)

    def dA(self, A, x):
        return 0.0 * np.asarray(x) + 0.0 * np.asarray(A)


@dataclass(frozen=True)
class ZeroAlpha:
    def value(self, A, x, y):
        z = np.zeros(np.broadcast(A, x, y).shape)
        return z, z.copy()

    def jac(self, A, x, y):
        """Rows (alpha1, alpha2), columns (d/dA, d/dx, d/dy)."""
        z = np.zeros(np.broadcast(A, x, y).shape)
        return ((z, z, z), (z, z, z))


@dataclass(frozen=True)
class CompactBump:
    """Smooth bump supported in the open ball ||(A, x, y)|| < radius.

    The profile is ``exp(1 - 1/(1 - t**2))`` with ``t = ||(A, x, y)|| / radius``;
    it peaks at the origin with Euclidean size ``magnitude`` and vanishes with
    all derivatives at ``t = 1``.
    """

    magnitude: float
    radius: float
    direction: tuple = (0.8, 0.6)

    def _profile(self, A, x, y):
        A, x, y = np.broadcast_arrays(*(np.asarray(v, dtype=float) for v in (A, x, y)))
        rho = np.sqrt(A * A + x * x + y * y)
        t = rho / self.radius
        inside = t < 1.0
        ts = np.where(inside, t, 0.0)
        phi = np.where(inside, np.exp(1.0 - 1.0 / (1.0 - ts * ts)), 0.0)
        # d(phi)/d(rho); the 1/rho in the chain rule is folded in below
        dphi_dt = np.where(inside, phi * (-2.0 * ts / (1.0 - ts * ts) ** 2), 0.0)
        safe_rho = np.where(rho > 0, rho, 1.0)
        scale = np.where(rho > 0, dphi_dt / (self.radius * safe_rho), 0.0)
        return phi, scale * A, scale * x, scale * y

    def value(self, A, x, y):
        phi, _, _, _ = self._profile(A, x, y)
        c1, c2 = self.direction
        return self.magnitude * c1 * phi, self.magnitude * c2 * phi

    def jac(self, A, x, y):
        _, pA, px, py = self._profile(A, x, y)
        c1, c2 = self.direction
        m = self.magnitude
        return ((m * c1 * pA, m * c1 * px, m * c1 * py), (m * c2 * pA, m * c2 * px, m * c2 * py))


def builtin_perturbations(name, magnitude=0.0, r=1.0):
    """Return ``(g, alpha)`` for one of the named perturbation families."""
    if name == "none":
        return ZeroG(), ZeroAlpha()
    if name == "bounded-wave":
        return BoundedWave(float(magnitude)), ZeroAlpha()
    if name == "compact-bump":
        if r <= 0:
            raise ValueError("compact-bump needs a positive radius")
        return ZeroG(), CompactBump(float(magnitude), float(r))
    raise UnknownPerturbationError(f"unknown perturbation {name!r}; expected one of {PERTURBATION_NAMES}")


# -- sampled bounds -----------------------------------------------------------

DEFAULT_BOX = (-50.0, 50.0)


def _sample_box(box, n):
    lo, hi = box
    axis = np.linspace(lo, hi, n)
    return np.meshgrid(axis, axis, axis, indexing="ij")


def perturbation_bounds(g, alpha, box=DEFAULT_BOX, n=41, r=None):
    """Sampled sup-bounds of the perturbation terms over a cubic ``(A, x, y)`` box.

    Returns a dict with ``g0`` = sup |g(A, 0)|, ``gx`` = sup |dg/dx|, ``alpha`` =
    sup |alpha|, and ``alpha_c1_outside`` = sup of the C^1 size of alpha over
    samples with ``||(A, x, y)|| > r`` (``nan`` when ``r`` is None).
    """
    A, x, y = _sample_box(box, n)
    g0 = float(np.max(np.abs(g.value(A[:, 0, 0], 0.0 * A[:, 0, 0]))))
    gx = float(np.max(np.abs(g.dx(A[:, :, 0], x[:, :, 0]))))
    a1, a2 = alpha.value(A, x, y)
    amag = np.hypot(a1, a2)
    out = {"g0": g0, "gx": gx, "alpha": float(np.max(amag)), "alpha_c1_outside": float("nan")}
    if r is not None:
        (d1A, d1x, d1y), (d2A, d2x, d2y) = alpha.jac(A, x, y)
        dmag = np.max(np.abs(np.stack(np.broadcast_arrays(d1A, d1x, d1y, d2A, d2x, d2y))), axis=0)
        c1 = np.maximum(np.maximum(np.abs(a1), np.abs(a2)), dmag)
        outside = np.sqrt(A * A + x * x + y * y) > r
        out["alpha_c1_outside"] = float(np.max(c1[outside])) if np.any(outside) else 0.0
    return out


def estimate_beta(g, alpha, box=DEFAULT_BOX, n=41, inflation=1.1):
    """Uniform bound ``beta`` for ``|g(A,0)| + |alpha|`` and ``|dg/dx|``, inflated 10%."""
    b = perturbation_bounds(g, alpha, box, n)
    return inflation * max(b["g0"] + b["alpha"], b["gx"])


# -- the family ---------------------------------------------------------------


@dataclass(frozen=True)
class FamilySpec:
    B: float
    g: object = field(default_factory=ZeroG)
    alpha: object = field(default_factory=ZeroAlpha)
    beta: float = 0.0
    delta: float = 1e-3
    r: float = 1.0

    def __post_init__(self):
        if self.B == 0 or not math.isfinite(self.B):
            raise ValueError("B must be a finite nonzero number")
        if self.beta < 0:
            raise ValueError("beta must be >= 0")
        if self.delta <= 0 or self.r <= 0:
            raise ValueError("delta and r must be positive")

    @classmethod
    def build(cls, B, g=None, alpha=None, beta=None, delta=1e-3, r=1.0, box=DEFAULT_BOX):
        """Construct a family, estimating ``beta`` by sampling when it is not given."""
        g = ZeroG() if g is None else g
        alpha = ZeroAlpha() if alpha is None else alpha
        if beta is None:
            beta = estimate_beta(g, alpha, box)
        return cls(float(B), g, alpha, float(beta), float(delta), float(r))

    @classmethod
    def from_builtin(cls, B, name="none", magnitude=0.0, r=1.0, **kw):
        g, alpha = builtin_perturbations(name, magnitude, r)
        return cls.build(B, g, alpha, r=r, **kw)

    @property
    def is_unperturbed(self):
        return isinstance(self.g, ZeroG) and isinstance(self.alpha, ZeroAlpha)

    def check_admissible(self, box=DEFAULT_BOX, n=41):
        """Sampled membership test for the perturbation classes."""
        b = perturbation_bounds(self.g, self.alpha, box, n, r=self.r)
        g_ok = (b["g0"] < self.beta and b["gx"] < self.beta) or (
            self.beta == 0 and b["g0"] == 0 and b["gx"] == 0
        )
        alpha_ok = b["alpha_c1_outside"] < self.delta
        return g_ok and alpha_ok, b


def henon(B):
    """The unperturbed Hénon family with coefficient ``B``."""
    return FamilySpec(float(B))


def map_arrays(spec, A, x, y):
    """Vectorised image ``(X, Y)`` of the family; no finiteness check."""
    a1, a2 = spec.alpha.value(A, x, y)
    X = A + spec.B * y - x * x + spec.g.value(A, x) + a1
    Y = x + a2
    return X, Y


def evaluate(spec, A, p):
    x, y = float(p[0]), float(p[1])
    X, Y = map_arrays(spec, A, x, y)
    out = np.array([float(X), float(Y)])
    if not np.all(np.isfinite(out)):
        raise NumericOverflowError(f"non-finite image at A={A}, p={tuple(p)}")
    return out


def jacobian_arrays(spec, A, x, y):
    """Vectorised entries ``(f1x, f1y, f2x, f2y)`` of the spatial derivative."""
    (_, d1x, d1y), (_, d2x, d2y) = spec.alpha.jac(A, x, y)
    f1x = -2.0 * x + spec.g.dx(A, x) + d1x
    f1y = spec.B + d1y
    f2x = 1.0 + d2x
    f2y = 0.0 + d2y
    return np.broadcast_arrays(f1x, f1y, f2x, f2y)


def jacobian(spec, A, p):
    f1x, f1y, f2x, f2y = jacobian_arrays(spec, A, float(p[0]), float(p[1]))
    return np.array([[float(f1x), float(f1y)], [float(f2x), float(f2y)]])


def parameter_derivative(spec, A, p):
    """dF/dA at a single point."""
    x, y = float(p[0]), float(p[1])
    (d1A, _, _), (d2A, _, _) = spec.alpha.jac(A, x, y)
    return np.array([1.0 + float(spec.g.dA(A, x)) + float(d1A), float(d2A)])


# -- horseshoe geometry -------------------------------------------------------


@dataclass(frozen=True)
class HorseshoeGeometry:
    A1: float
    B: float
    beta: float
    s: float
    Q: float
    rho: float
    N: float
    N1: float

    @property
    def E(self):
        return ((-self.Q, self.Q), (-self.Q, self.Q))

    @property
    def L(self):
        return (-self.Q, self.Q)

    @property
    def J1(self):
        return (-2.0 * self.s, -0.5 * self.s)

    @property
    def J2(self):
        return (0.5 * self.s, 2.0 * self.s)

    @property
    def inverse_cone_rate(self):
        # lower bound of |eta'|/|xi'| for DF^-1 on S^-_1 over J x L: |x| >= s/2 gives
        # |ratio| >= (s - beta - 1)/|B|; capped by N1 when |B| > 1
        return (self.s - self.beta - max(1.0, abs(self.B))) / abs(self.B)

    def f2_bound(self, A):
        """Largest |x| a periodic orbit can reach at parameter ``A``."""
        return self.rho + math.sqrt(max(A + self.beta + self.rho**2, 0.0))

    def in_E(self, p, tol=0.0):
        return abs(p[0]) <= self.Q + tol and abs(p[1]) <= self.Q + tol

    def to_dict(self):
        return {
            "A1": self.A1,
            "B": self.B,
            "beta": self.beta,
            "s": self.s,
            "Q": self.Q,
            "rho": self.rho,
            "N": self.N,
            "N1": self.N1,
            "J1": list(self.J1),
            "J2": list(self.J2),
        }


def geometry_for(spec, A1):
    """Derived constants of the horseshoe at ``A1``; raise on the first failed inequality."""
    if not A1 > 0:
        raise ThresholdViolationError("A1 <= 0", f"A1={A1}")
    B, beta = spec.B, spec.beta
    s = math.sqrt(A1)
    Q = 2.0 * s
    if not s > beta + abs(B) + max(1.0, abs(B)):
        raise ThresholdViolationError(
            "sqrt(A1) <= beta+|B|+max(1,|B|)",
            f"{s:g} <= {beta + abs(B) + max(1.0, abs(B)):g}",
        )
    rho = (abs(B) + beta + 1.0) / 2.0
    N = s - beta - abs(B)
    N1 = N / abs(B)
    if not N > 1:
        raise ThresholdViolationError("N <= 1", f"N={N:g}")
    if not N1 > 1:
        raise ThresholdViolationError("N1 <= 1", f"N1={N1:g}")
    if not A1 > spec.r:
        raise ThresholdViolationError("A1 <= r", f"A1={A1:g}, r={spec.r:g}")
    if not A1 > Q:
        raise ThresholdViolationError("A1 <= Q", f"A1={A1:g}, Q={Q:g}")
    bound = rho + math.sqrt(A1 + beta + rho * rho)
    if not bound < Q:
        raise ThresholdViolationError(
            "rho+sqrt(A1+beta+rho^2) >= Q", f"{bound:g} >= {Q:g}"
        )
    return HorseshoeGeometry(A1=float(A1), B=B, beta=beta, s=s, Q=Q, rho=rho, N=N, N1=N1)
