"""Hot numeric kernels with a numba fast path and a pure-numpy fallback.

Every kernel exists in two functionally equivalent versions: ``_nb_*``
(compiled with ``numba.njit``) and ``_np_*`` (vectorized numpy).  The public
names are bound to one of the two at import time.  Set the environment
variable ``INTDIMS_NO_NUMBA=1`` to force the numpy path (also used
automatically when numba is not importable).  ``benchmarks/bench_kernels.py``
times both paths side by side.

Cell convention: axis-aligned half-open cubes anchored at the origin with
side ``scale / sqrt(d)``, so the cell diameter equals the nominal ``scale``.
Cells are addressed by packed int64 keys; packing needs a per-run ``base``
(half index range) that callers derive from the set's bounding box so that
keys from different chunks of one stream agree.
"""

import math
import os

import numpy as np

NUMBA_ENABLED = os.environ.get("INTDIMS_NO_NUMBA", "") not in ("1", "true", "yes")
if NUMBA_ENABLED:
    try:
        from numba import njit
    except ImportError:  # pragma: no cover - numba is a declared dependency
        NUMBA_ENABLED = False

__all__ = [
    "NUMBA_ENABLED",
    "cell_keys",
    "circle_cell_keys",
    "mu_concentric_balls",
    "key_base_for",
    "pack_capacity_ok",
]


def key_base_for(half_range, side):
    """Half index range needed to pack points with |coord| <= half_range."""
    return int(math.floor(half_range / side)) + 2


def pack_capacity_ok(base, dim):
    """True when (2*base+1)^dim fits into int64 packed keys."""
    span = 2 * base + 1
    return span**dim < 2**62


# ---------------------------------------------------------------------------
# cell_keys: map points to packed occupied-cell keys
# ---------------------------------------------------------------------------

def _np_cell_keys(points, side, base):
    pts = np.atleast_2d(points)
    idx = np.floor(pts / side).astype(np.int64) + base
    span = np.int64(2 * base + 1)
    keys = idx[:, 0].copy()
    for k in range(1, pts.shape[1]):
        keys *= span
        keys += idx[:, k]
    return keys


if NUMBA_ENABLED:

    @njit(cache=True)
    def _nb_cell_keys(points, side, base):
        n, d = points.shape
        span = np.int64(2 * base + 1)
        out = np.empty(n, dtype=np.int64)
        inv = 1.0 / side
        for i in range(n):
            key = np.int64(math.floor(points[i, 0] * inv)) + base
            for k in range(1, d):
                key = key * span + (np.int64(math.floor(points[i, k] * inv)) + base)
            out[i] = key
        return out

    def cell_keys(points, side, base):
        pts = np.ascontiguousarray(np.atleast_2d(points), dtype=np.float64)
        return _nb_cell_keys(pts, float(side), np.int64(base))

else:

    def cell_keys(points, side, base):
        return _np_cell_keys(np.asarray(points, dtype=np.float64), float(side), int(base))


# ---------------------------------------------------------------------------
# circle_cell_keys: run-length deduplicated cell keys along an origin circle
# ---------------------------------------------------------------------------
#
# Points are taken at uniform angular step (arc step <= max_step).  The angle
# grid is re-seeded from sin/cos every _BLOCK steps; inside a block the numba
# path advances by complex rotation (2 mul + 2 add per point), which keeps
# the drift far below any cell side in use.  Consecutive duplicates are
# removed on the fly, so the output length is ~ the number of cell crossings.

_BLOCK = 4096


def _np_circle_cell_keys(radius, side, max_step, base):
    n = max(8, int(math.ceil(2.0 * math.pi * radius / max_step)))
    span = np.int64(2 * base + 1)
    pieces = []
    prev_key = np.int64(-(2**62))
    for start in range(0, n, _BLOCK * 64):
        stop = min(start + _BLOCK * 64, n)
        ang = (2.0 * math.pi / n) * np.arange(start, stop)
        x = radius * np.cos(ang)
        y = radius * np.sin(ang)
        ix = np.floor(x / side).astype(np.int64) + base
        iy = np.floor(y / side).astype(np.int64) + base
        keys = ix * span + iy
        keep = np.empty(keys.size, dtype=bool)
        keep[0] = keys[0] != prev_key
        np.not_equal(keys[1:], keys[:-1], out=keep[1:])
        keys = keys[keep]
        if keys.size:
            prev_key = keys[-1]
            pieces.append(keys)
    if not pieces:
        return np.empty(0, dtype=np.int64)
    return np.concatenate(pieces)


if NUMBA_ENABLED:

    @njit(cache=True)
    def _nb_circle_cell_keys(radius, side, max_step, base):
        n = max(8, int(math.ceil(2.0 * math.pi * radius / max_step)))
        dang = 2.0 * math.pi / n
        span = np.int64(2 * base + 1)
        out = np.empty(n + 1, dtype=np.int64)
        m = 0
        prev_key = np.int64(-(2**62))
        cr = math.cos(dang)
        sr = math.sin(dang)
        inv = 1.0 / side
        i = 0
        while i < n:
            blk = min(_BLOCK, n - i)
            ang0 = dang * i
            cx = radius * math.cos(ang0)
            cy = radius * math.sin(ang0)
            for _ in range(blk):
                key = (np.int64(math.floor(cx * inv)) + base) * span + (
                    np.int64(math.floor(cy * inv)) + base
                )
                if key != prev_key:
                    out[m] = key
                    m += 1
                    prev_key = key
                tx = cx * cr - cy * sr
                cy = cx * sr + cy * cr
                cx = tx
            i += blk
        return out[:m]

    def circle_cell_keys(radius, side, max_step, base):
        return _nb_circle_cell_keys(
            float(radius), float(side), float(max_step), np.int64(base)
        )

else:

    def circle_cell_keys(radius, side, max_step, base):
        return _np_circle_cell_keys(float(radius), float(side), float(max_step), int(base))


# ---------------------------------------------------------------------------
# mu_concentric_balls: exact measure of closed balls against sphere atoms (d=2)
# ---------------------------------------------------------------------------
#
# Atom i is the circle of radius radii[i] about the origin carrying total
# mass masses[i] spread uniformly.  The measure of the closed ball B(c, R)
# is  mass * (arc angle inside) / (2 pi),  computed from the closed-form
# circle/ball intersection.

def _np_mu_concentric_balls(radii, masses, cx, cy, rr):
    rho = np.hypot(cx, cy)
    out = np.zeros(rho.shape, dtype=np.float64)
    for j in range(rho.size):
        d0 = rho[j]
        R = rr[j]
        lo = d0 - R
        hi = d0 + R
        full = radii <= (R - d0)
        partial = (~full) & (radii >= lo) & (radii <= hi)
        acc = masses[full].sum()
        if np.any(partial):
            r = radii[partial]
            c = (d0 * d0 + r * r - R * R) / (2.0 * d0 * r)
            c = np.clip(c, -1.0, 1.0)
            acc += (masses[partial] * (np.arccos(c) / math.pi)).sum()
        out[j] = acc
    return out


if NUMBA_ENABLED:

    @njit(cache=True)
    def _nb_mu_concentric_balls(radii, masses, cx, cy, rr):
        m = cx.size
        n = radii.size
        out = np.zeros(m, dtype=np.float64)
        for j in range(m):
            d0 = math.hypot(cx[j], cy[j])
            R = rr[j]
            acc = 0.0
            for i in range(n):
                r = radii[i]
                if r <= R - d0:
                    acc += masses[i]
                elif r >= d0 - R and r <= d0 + R:
                    c = (d0 * d0 + r * r - R * R) / (2.0 * d0 * r)
                    if c > 1.0:
                        c = 1.0
                    elif c < -1.0:
                        c = -1.0
                    acc += masses[i] * (math.acos(c) / math.pi)
            out[j] = acc
        return out

    def mu_concentric_balls(radii, masses, cx, cy, rr):
        return _nb_mu_concentric_balls(
            np.ascontiguousarray(radii, dtype=np.float64),
            np.ascontiguousarray(masses, dtype=np.float64),
            np.ascontiguousarray(cx, dtype=np.float64),
            np.ascontiguousarray(cy, dtype=np.float64),
            np.ascontiguousarray(rr, dtype=np.float64),
        )

else:

    def mu_concentric_balls(radii, masses, cx, cy, rr):
        return _np_mu_concentric_balls(
            np.asarray(radii, dtype=np.float64),
            np.asarray(masses, dtype=np.float64),
            np.asarray(cx, dtype=np.float64),
            np.asarray(cy, dtype=np.float64),
            np.asarray(rr, dtype=np.float64),
        )
