"""Independent oracles used by the tests.

These deliberately avoid the library's counting/measure code paths: cells
are enumerated analytically, interval hits by brute force over explicit
terms, and sphere-cap areas by direct quadrature.
"""

import math

import numpy as np
from scipy import integrate


def circle_cells_exact(r, side):
    """Exact set of grid cells (side ``side``, origin-anchored, half-open)
    crossed by the origin circle of radius r."""
    cells = set()
    ix_lo = math.floor(-r / side)
    ix_hi = math.floor(r / side)
    for ix in range(ix_lo, ix_hi + 1):
        x0, x1 = ix * side, (ix + 1) * side
        # closest and farthest |x| over the column strip
        if x0 <= 0.0 <= x1:
            ax_min = 0.0
        else:
            ax_min = min(abs(x0), abs(x1))
        ax_max = max(abs(x0), abs(x1))
        if ax_min > r:
            continue
        y_hi = math.sqrt(max(r * r - ax_min * ax_min, 0.0))
        y_lo = math.sqrt(max(r * r - min(ax_max, r) ** 2, 0.0))
        for iy in range(math.floor(y_lo / side), math.floor(y_hi / side) + 1):
            cells.add((ix, iy))
        for iy in range(math.floor(-y_hi / side), math.floor(-y_lo / side) + 1):
            cells.add((ix, iy))
    return cells


def union_circle_cells_exact(radii, side):
    """Union of exactly enumerated cells over several origin circles."""
    out = set()
    for r in radii:
        out |= circle_cells_exact(r, side)
    return out


def interval_cells_exact(a, b, side):
    """Cells of the 1-d grid crossed by the closed interval [a, b]."""
    return set(range(math.floor(a / side), math.floor(b / side) + 1))


def brute_gap_count(terms, p, n):
    """Brute-force count of intervals (1/(k+1)^p, 1/k^p] hit by the terms."""
    hits = 0
    for k in range(1, n + 1):
        hi, lo = float(k) ** (-p), float(k + 1) ** (-p)
        if any(lo < t <= hi for t in terms):
            hits += 1
    return hits


def sphere_area_by_recursion(d):
    """Surface measure of the unit (d-1)-sphere via the slice recursion
    A_d = A_{d-1} * integral of sin^{d-2}."""
    if d == 2:
        return 2.0 * math.pi
    prev = sphere_area_by_recursion(d - 1)
    integral, _ = integrate.quad(lambda t: math.sin(t) ** (d - 2), 0.0, math.pi)
    return prev * integral


def cap_fraction_by_quadrature(d, phi):
    """Fraction of the (d-1)-sphere within colatitude phi, by quadrature."""
    num, _ = integrate.quad(lambda t: math.sin(t) ** (d - 2), 0.0, phi)
    den, _ = integrate.quad(lambda t: math.sin(t) ** (d - 2), 0.0, math.pi)
    return num / den


def circle_ball_fraction_sampled(r, center, R, n=200_001):
    """Fraction of the origin circle of radius r inside B(center, R), by a
    dense deterministic angular grid."""
    ang = 2.0 * math.pi * np.arange(n) / n
    x = r * np.cos(ang) - center[0]
    y = r * np.sin(ang) - center[1]
    return float(np.count_nonzero(x * x + y * y <= R * R)) / n


def hausdorff_distance(a, b):
    """max over a of min distance to b (one-sided), brute force."""
    out = 0.0
    for pt in a:
        d = np.min(np.linalg.norm(b - pt, axis=1))
        out = max(out, float(d))
    return out
