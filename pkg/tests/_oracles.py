"""Reference computations that share no code with the package."""

import itertools
import math

import numpy as np


def brute_force_cycles(k):
    """Primitive binary necklaces of length k by scanning all 2**k words."""
    seen = set()
    for word in itertools.product((1, -1), repeat=k):
        rots = [word[i:] + word[:i] for i in range(k)]
        if len(set(rots)) != k:
            continue
        seen.add(min(rots))
    return seen


def brute_force_counts(k):
    """(points, orbits, even_orbits) for the two-shift by direct enumeration."""
    cycles = brute_force_cycles(k)
    even = sum(1 for c in cycles if math.prod(c) == 1)
    return k * len(cycles), len(cycles), even


def henon_fixed_points(A, B):
    disc = (1 - B) ** 2 + 4 * A
    if disc < 0:
        return []
    r = math.sqrt(disc)
    return [(-(1 - B) + r) / 2, (-(1 - B) - r) / 2]


def henon_period_two(A, B):
    """The period-2 orbit {x1, x2}: x1 + x2 = 1 - B and x1 x2 = (1 - B)**2 - A."""
    s = 1 - B
    roots = np.roots([1.0, -s, s * s - A])
    if np.any(np.abs(roots.imag) > 1e-12):
        return None
    return sorted(roots.real)


def finite_difference_jacobian(f, p, h=1e-6):
    p = np.asarray(p, dtype=float)
    J = np.zeros((2, 2))
    for j in range(2):
        e = np.zeros(2)
        e[j] = h
        J[:, j] = (np.asarray(f(p + e)) - np.asarray(f(p - e))) / (2 * h)
    return J


def cascade_fixed_point_loci(B):
    """Saddle-node and period-doubling parameters of the fixed point."""
    return -((1 - B) ** 2) / 4, 3 * (1 - B) ** 2 / 4
