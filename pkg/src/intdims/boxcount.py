"""Empirical dimension estimation: occupied-cell counting over point clouds,
two-scale cover optimization, and log-corrected extrapolation.

Grid convention: cells are half-open axis-aligned cubes anchored at the
origin with side scale/sqrt(d), so the cell diameter equals ``scale``.
Occupied-cell counts stand in for the true minimal covering number; the
constant-factor gap (at most 3^d) shifts log-counts by O(1) and is absorbed
by the extrapolation fit.

Large radial runs (concentric circles at fine scales) never materialize the
cloud.  Points are streamed circle by circle in decreasing radius order and
deduplicated band-wise: a cell of diameter delta can only be revisited by
circles whose radii differ by at most delta, so keeping one band of width
2*delta plus its predecessor suffices for exact global deduplication.
"""

import math
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .fitting import EstimateResult, PerDelta, fit_log_correction
from .setlib import BudgetError, PointCloud, radius_term, sample, sample_points_exact
from .formula import formula_value

__all__ = [
    "GridIndex",
    "count_boxes",
    "occupied_cells",
    "two_scale_estimate",
    "estimate_dimension",
    "MATERIALIZE_CAP",
    "STREAM_WORK_CAP",
]

MATERIALIZE_CAP = 30_000_000  # points; beyond this the cloud is streamed
STREAM_WORK_CAP = 6_000_000_000  # total streamed points the estimator accepts


@dataclass(frozen=True)
class GridIndex:
    """Occupied cells of one cloud at one scale (side = scale/sqrt(d))."""

    scale: float
    dimension: int
    occupied: frozenset  # of integer d-tuples

    def __len__(self):
        return len(self.occupied)

    def __contains__(self, tup):
        return tuple(tup) in self.occupied


def _side(scale, d):
    return scale / math.sqrt(d)


def _keys_for(points, scale, half_range=None):
    d = points.shape[1]
    side = _side(scale, d)
    if half_range is None:
        half_range = float(np.max(np.abs(points))) if points.size else 1.0
    base = _kernels.key_base_for(half_range, side)
    if not _kernels.pack_capacity_ok(base, d):
        raise ValueError("grid too fine for packed int64 cell keys at this dimension")
    return _kernels.cell_keys(points, side, base)


def occupied_cells(cloud, scale):
    """GridIndex of the cloud at the given scale (for inspection/tests)."""
    pts = cloud.points if isinstance(cloud, PointCloud) else np.atleast_2d(cloud)
    d = pts.shape[1]
    idx = np.floor(pts / _side(scale, d)).astype(np.int64)
    uniq = np.unique(idx, axis=0)
    return GridIndex(scale, d, frozenset(map(tuple, uniq)))


def count_boxes(cloud, scale):
    """Number of occupied grid cells of diameter ``scale``."""
    pts = cloud.points if isinstance(cloud, PointCloud) else np.atleast_2d(cloud)
    if pts.size == 0:
        raise ValueError("empty cloud")
    if scale <= 0:
        raise ValueError("scale must be positive")
    keys = _keys_for(pts, scale)
    if keys.size > 1:
        # clouds are sampled along paths; collapsing runs first keeps the
        # sort proportional to the cell count
        keep = np.empty(keys.size, dtype=bool)
        keep[0] = True
        np.not_equal(keys[1:], keys[:-1], out=keep[1:])
        keys = keys[keep]
    return int(np.unique(keys).size)


# ---------------------------------------------------------------------------
# Two-scale split costs over a materialized cloud
# ---------------------------------------------------------------------------

class _SplitCounts:
    """Occupied-cell counts for every radius split of one cloud.

    Points are sorted by Euclidean norm once; first/last-occurrence prefix
    sums then give, in O(1) per query, the number of distinct coarse cells
    among points with norm <= r and distinct fine cells among the rest.
    """

    def __init__(self, cloud, delta, theta):
        pts = cloud.points
        norms = np.linalg.norm(pts, axis=1)
        order = np.argsort(norms, kind="stable")
        self.norms = norms[order]
        pts = pts[order]
        self.delta = delta
        self.theta = theta
        half = float(np.max(np.abs(pts)))
        fine_keys = _keys_for(pts, delta, half)
        self._outer_suffix = self._suffix_distinct(fine_keys)
        if theta == 1.0:
            self._inner_prefix = self._prefix_distinct(fine_keys)
        else:
            self._inner_prefix = self._prefix_distinct(_keys_for(pts, delta**theta, half))

    @staticmethod
    def _first_occurrence(keys):
        """Boolean mask of first occurrences, via run compression.

        Consecutive equal keys collapse to runs before the sort, which keeps
        the n-log-n part proportional to the cell count, not the point count.
        """
        n = keys.size
        starts = np.empty(n, dtype=bool)
        starts[0] = True
        np.not_equal(keys[1:], keys[:-1], out=starts[1:])
        run_pos = np.flatnonzero(starts)
        _, first_run = np.unique(keys[run_pos], return_index=True)
        mask = np.zeros(n, dtype=bool)
        mask[run_pos[first_run]] = True
        return mask

    @classmethod
    def _prefix_distinct(cls, keys):
        first = cls._first_occurrence(keys).astype(np.int64)
        return np.concatenate([[0], np.cumsum(first)])

    @classmethod
    def _suffix_distinct(cls, keys):
        last = cls._first_occurrence(keys[::-1])[::-1].astype(np.int64)
        return np.concatenate([np.cumsum(last[::-1])[::-1], [0]])

    def counts(self, r):
        """(inner cells at delta^theta for norm <= r, outer cells at delta)."""
        k = int(np.searchsorted(self.norms, r, side="right"))
        return int(self._inner_prefix[k]), int(self._outer_suffix[k])

    def total_fine(self):
        return int(self._outer_suffix[0])

    def cost(self, r, s):
        if self.theta == 1.0:
            # both scales coincide: the plain count, independent of the split
            return self.total_fine() * self.delta**s
        n_in, n_out = self.counts(r)
        return n_in * self.delta ** (self.theta * s) + n_out * self.delta**s


def _candidate_radii(spec, delta, diam, n=64):
    """Log-spaced inner-split candidates, 0 and the diameter included."""
    lo = max(delta, 1e-12)
    ladder = np.geomspace(lo, diam, n)
    cands = [0.0] + list(ladder) + [diam]
    return sorted(set(cands))


def two_scale_estimate(cloud, theta, delta, s, inner_radii):
    """Best two-scale cover cost over the candidate inner radii.

    Points with norm <= r are covered at scale delta^theta, the rest at
    scale delta; the cost is  N_inner * delta^(theta*s) + N_outer * delta^s.
    Returns (best_cost, best_inner_radius).
    """
    if not 0.0 < theta <= 1.0:
        raise ValueError("theta must lie in (0, 1]")
    sc = _SplitCounts(cloud, delta, theta)
    best_cost, best_r = math.inf, 0.0
    for r in inner_radii:
        c = sc.cost(r, s)
        if c < best_cost:
            best_cost, best_r = c, r
    return best_cost, best_r


def _bisect_s(cost_fn, d, tol=1e-4):
    """Exponent where the monotone-decreasing cost crosses 1."""
    lo, hi = 0.0, float(d)
    c_lo = cost_fn(lo)
    if c_lo <= 1.0:
        return 0.0, c_lo
    c_hi = cost_fn(hi)
    if c_hi > 1.0:
        return float(d), c_hi
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if cost_fn(mid) > 1.0:
            lo = mid
        else:
            hi = mid
    s = 0.5 * (lo + hi)
    return s, cost_fn(s)


# ---------------------------------------------------------------------------
# Banded streaming counter (radial sweeps)
# ---------------------------------------------------------------------------

class BandedUniqueCounter:
    """Exact distinct-cell count for a stream ordered by decreasing radius.

    Feeds must arrive with non-increasing band index.  Cells revisited by the
    stream always lie within one cell diameter in radius, hence in the same
    or the adjacent band (band width = 2 * cell diameter), so a current and a
    previous unique array give exact global deduplication in bounded memory.
    """

    def __init__(self):
        self.total = 0
        self._band = None
        self._chunks = []
        self._prev = np.empty(0, dtype=np.int64)

    def feed(self, band, keys):
        if self._band is not None and band > self._band:
            raise ValueError("bands must arrive in non-increasing order")
        if self._band is not None and band < self._band:
            self._flush(band)
        self._band = band
        if keys.size:
            self._chunks.append(keys)

    def _flush(self, next_band):
        uniq = (
            np.unique(np.concatenate(self._chunks))
            if self._chunks
            else np.empty(0, dtype=np.int64)
        )
        self._chunks = []
        dup = 0
        if uniq.size and self._prev.size:
            pos = np.searchsorted(self._prev, uniq)
            pos[pos >= self._prev.size] = self._prev.size - 1
            dup = int(np.count_nonzero(self._prev[pos] == uniq))
        self.total += int(uniq.size) - dup
        # only the immediately adjacent band can still share cells
        self._prev = uniq if (self._band - next_band) == 1 else np.empty(0, dtype=np.int64)

    def finalize(self):
        if self._chunks or self._band is not None:
            self._flush(-(2**60))
            self._band = None
        return self.total


def _stream_concentric_count(spec, delta, step, r_min):
    """Distinct delta-cells of the union of circles with radii >= r_min."""
    p = spec.radii.p
    side = _side(delta, 2)
    a1 = radius_term(spec.radii, 1)
    base = _kernels.key_base_for(a1 + delta, side)
    band_width = 2.0 * delta
    counter = BandedUniqueCounter()
    n_max = int(math.ceil(r_min ** (-1.0 / p)))
    for i in range(1, n_max + 1):
        r = float(i) ** (-p)
        if r < r_min:
            break
        keys = _kernels.circle_cell_keys(r, side, step, base)
        counter.feed(int(r / band_width), keys)
    return counter.finalize()


def _fill_radius(p, delta):
    """Radius below which consecutive circle gaps drop under delta."""
    return (delta / p) ** (p / (1.0 + p))


def _projected_stream_points(spec, delta):
    p = spec.radii.p
    r_min = 0.5 * min(_fill_radius(p, delta), radius_term(spec.radii, 1))
    n = r_min ** (-1.0 / p)
    if p < 1.0:
        arc = 2.0 * math.pi * (n ** (1.0 - p)) / (1.0 - p)
    elif p == 1.0:
        arc = 2.0 * math.pi * math.log(n + 1.0)
    else:
        arc = 2.0 * math.pi * p / (p - 1.0)
    return arc / (delta / 4.0)


# ---------------------------------------------------------------------------
# Automatic truncation for the materialized sampler
# ---------------------------------------------------------------------------

def _auto_truncation(spec, delta_min, theta):
    """Smallest radius/abscissa the cloud must resolve for this ladder.

    The tail closer to the origin is the proofs' single inner ball; at the
    coarse window scale it contributes a negligible number of cells once the
    truncation sits safely below the fill radius.
    """
    scale_in = delta_min**theta
    f = spec.family
    if f == "fp":
        return min(1.0, scale_in / 4.0)
    if f == "isolated_points":
        return min(1.0, scale_in / 2.0)
    if f == "concentric":
        if spec.radii.kind == "power":
            return min(radius_term(spec.radii, 1), 0.5 * _fill_radius(spec.radii.p, scale_in))
        return min(radius_term(spec.radii, 1), scale_in / 4.0)
    if f in ("product_sine", "attenuated_sine", "spiral", "elliptical"):
        # truncate at half the covering argument's inner-ball radius; the
        # tail below it contributes a bounded fraction of the cell count,
        # which the 1/log extrapolation absorbs
        s_ref = formula_value(spec, theta) or 1.5
        expo = (s_ref - theta * s_ref + 2.0 * theta - 1.0) / (1.0 + spec.p)
        x_t = delta_min ** (max(expo, 0.0) * spec.p)
        return min(1.0, max(0.5 * x_t, scale_in / 64.0))
    raise ValueError(f)


def _projected_points(spec, budget, truncation):
    f = spec.family
    if f == "fp":
        return min(budget, truncation ** (-1.0 / spec.p))
    if f == "isolated_points":
        n = int(truncation ** (-1.0 / spec.p))
        return sum(spec.count_rule.count(i) for i in range(1, min(n, 64) + 1)) * (
            1 if n <= 64 else n / 64.0
        )
    step = spec.diameter_lower() / budget
    if f == "concentric":
        p = spec.radii.p if spec.radii.kind == "power" else None
        if p is None:
            total = 0.0
            i = 1
            while True:
                try:
                    r = radius_term(spec.radii, i)
                except IndexError:
                    break
                if r < truncation or i > 10**6:
                    break
                total += 2.0 * math.pi * r
                i += 1
            return total / step
        n = truncation ** (-1.0 / p)
        if p < 1.0:
            arc = 2.0 * math.pi * n ** (1.0 - p) / (1.0 - p)
        else:
            arc = 2.0 * math.pi * (math.log(n + 1.0) if p == 1.0 else p / (p - 1.0))
        return arc / step
    if f in ("spiral", "elliptical"):
        # winding i has length ~ 2*pi*i^-p; windings up to truncation^(-1/p)
        n = truncation ** (-1.0 / spec.p)
        if spec.p < 1.0:
            arc = 2.0 * math.pi * n ** (1.0 - spec.p) / (1.0 - spec.p)
        else:
            arc = 2.0 * math.pi * (math.log(n + 1.0) if spec.p == 1.0 else spec.p / (spec.p - 1.0))
        return arc / step
    # sine graphs: arc i has length <= 2/i^(pq) + gap widths summing to 1;
    # the factor 1.6 covers per-chunk speed-bound oversampling
    pq = 0.0 if f == "product_sine" else spec.p * spec.q
    n = truncation ** (-1.0 / spec.p)
    if pq < 1.0:
        arc = 1.0 + 2.0 * n ** (1.0 - pq) / (1.0 - pq)
    else:
        arc = 1.0 + 2.0 * (math.log(n + 1.0) if pq == 1.0 else pq / (pq - 1.0))
    return 1.6 * arc / step


def estimate_dimension(spec, theta, deltas, budget):
    """Extrapolated dimension estimate from the two-scale cover costs.

    Per scale delta, the optimal exponent s*(delta) solves
    best-cover-cost(s) = 1 by bisection (1e-4 tolerance on s); the s* ladder
    is then fitted against a + b/log(1/delta) and ``a`` reported.  Refuses
    (BudgetError) rather than silently under-resolving when the budget cannot
    honor a sampling step below min(delta)/4.
    """
    if not 0.0 < theta <= 1.0:
        raise ValueError("theta must lie in (0, 1]")
    deltas = sorted(set(float(d) for d in deltas), reverse=True)
    if len(deltas) < 4:
        raise ValueError("need at least 4 delta values")
    d_min = deltas[-1]
    step_budget = spec.diameter_lower() / budget
    if spec.family not in ("fp", "isolated_points") and step_budget >= d_min / 4.0:
        raise BudgetError(
            f"budget {budget} gives sampling step {step_budget:.3g} >= "
            f"min(delta)/4 = {d_min / 4.0:.3g}"
        )

    truncation = _auto_truncation(spec, d_min, theta)
    projected = _projected_points(spec, budget, truncation)

    if projected > MATERIALIZE_CAP:
        if spec.family == "concentric" and spec.d == 2 and spec.radii.kind == "power" and theta == 1.0:
            return _estimate_streaming_concentric(spec, deltas, budget)
        raise BudgetError(
            f"ladder needs ~{projected:.2g} sample points; materialization is "
            f"capped at {MATERIALIZE_CAP:.2g} and streaming covers concentric "
            f"d=2 power sets at theta=1 only"
        )

    if spec.family in ("fp", "isolated_points"):
        needed = truncation ** (-1.0 / spec.p)
        if spec.family == "fp" and needed > budget:
            raise BudgetError(
                f"budget {budget} < {needed:.3g} points needed to resolve the "
                f"ladder (truncation {truncation:.3g})"
            )
        cloud = PointCloud(spec.d, sample_points_exact(spec, truncation, None), truncation, spec)
    else:
        cloud = sample(spec, budget, truncation)

    diam = spec.diameter()
    per = []
    for dlt in deltas:
        if theta == 1.0:
            # single-scale: the split is irrelevant, only the count matters
            n = count_boxes(cloud, dlt)
            s_star, c_at = _bisect_s(lambda s: n * dlt**s, spec.d)
            per.append(PerDelta(dlt, s_star, 0.0, abs(c_at - 1.0)))
            continue
        sc = _SplitCounts(cloud, dlt, theta)
        cands = _candidate_radii(spec, dlt, diam)

        def cost(s, _sc=sc, _cands=cands):
            return min(_sc.cost(r, s) for r in _cands)

        s_star, c_at = _bisect_s(cost, spec.d)
        best, best_r = math.inf, 0.0
        for r in cands:
            c = sc.cost(r, s_star)
            if c < best:
                best, best_r = c, r
        per.append(PerDelta(dlt, s_star, best_r, abs(c_at - 1.0)))

    return _finish(spec, theta, per)


def _estimate_streaming_concentric(spec, deltas, budget):
    p = spec.radii.p
    a1 = radius_term(spec.radii, 1)
    total_work = sum(_projected_stream_points(spec, dlt) for dlt in deltas)
    if total_work > STREAM_WORK_CAP:
        raise BudgetError(
            f"streamed ladder needs ~{total_work:.2g} points "
            f"(cap {STREAM_WORK_CAP:.2g}); coarsen the ladder"
        )
    per = []
    for dlt in deltas:
        r_min = 0.5 * min(_fill_radius(p, dlt), a1)
        n = _stream_concentric_count(spec, dlt, dlt / 4.0, r_min)
        s_star, c_at = _bisect_s(lambda s: n * dlt**s, spec.d)
        per.append(PerDelta(dlt, s_star, r_min, abs(c_at - 1.0)))
    return _finish(spec, 1.0, per)


def _finish(spec, theta, per):
    fit = fit_log_correction([q.delta for q in per], [q.s_star for q in per])
    target = formula_value(spec, theta)
    return EstimateResult(theta, tuple(per), fit["a"], fit, target)
