"""Constructive two-scale covers and their cost sums.

The cover of a radial/graph set splits at a cutoff index M: everything
beyond the M-th shell lies in a small ball (or envelope strip) around the
origin and is covered by a grid of cubes of diameter delta^theta, while each
of the M-1 outer shells is covered individually by sets of diameter delta.
The cost  sum |U|^s = inner * delta^(theta*s) + sum_i outer_i * delta^s
then certifies upper bounds for the interpolated dimension.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from .fitting import EstimateResult, PerDelta, fit_log_correction
from .formula import formula_value
from .setlib import PointCloud, SetSpec

__all__ = [
    "CoverElement",
    "Cover",
    "CoverCounts",
    "XI_2",
    "xi_constant",
    "sphere_cover_count",
    "proof_cutoff",
    "build_theorem_cover",
    "cover_cost",
    "enumerate_grid_cover",
    "upper_dim_estimate",
]

XI_2 = 8.0  # arc partition: ceil(2 pi R / r) <= 8 R/r whenever R >= r
_MAX_CUTOFF = 50_000_000


def xi_constant(d):
    """Constructive constant xi_d with N(sphere R, r) <= xi_d (R/r)^(d-1)."""
    if d < 2:
        raise ValueError("d must be >= 2")
    if d == 2:
        return XI_2
    return (4.0 * math.sqrt(d)) ** (d - 1)


# ---------------------------------------------------------------------------
# Explicit sphere covers
# ---------------------------------------------------------------------------

def _unit_patch_count(k, beta):
    """Cells of an angular grid with per-angle arc width <= beta covering the
    unit k-sphere.  Each cell is a box in spherical coordinates whose k arc
    extents are all <= beta, hence has Euclidean diameter <= beta * sqrt(k)."""
    if k == 1:
        return int(math.ceil(2.0 * math.pi / beta))
    nb = int(math.ceil(math.pi / beta))
    width = math.pi / nb
    total = 0
    for j in range(nb):
        a, b = j * width, (j + 1) * width
        smax = 1.0 if (a <= math.pi / 2.0 <= b) else max(math.sin(a), math.sin(b))
        if smax * math.pi <= beta:
            total += 1  # polar cap fits in one cell
        else:
            total += _unit_patch_count(k - 1, beta / smax)
    return total


def sphere_cover_count(d, R, r):
    """Explicit count of diameter-r sets covering the (d-1)-sphere of radius R.

    The construction keeps the count below xi_d * (R/r)^(d-1): arcs of arc
    length r for d = 2, a recursive latitude-band grid for d >= 3.  R <= r is
    clamped to a single set.
    """
    if d < 2:
        raise ValueError("d must be >= 2")
    if R <= 0 or r <= 0:
        raise ValueError("R and r must be positive")
    if R <= r:
        return 1
    if d == 2:
        return int(math.ceil(2.0 * math.pi * R / r))
    beta = r / (R * math.sqrt(d - 1))
    if (math.pi / beta) ** (d - 1) > 5e7:
        raise ValueError("R/r too large for explicit enumeration; use xi_constant")
    return _unit_patch_count(d - 1, beta)


# ---------------------------------------------------------------------------
# Theorem covers (closed-form counts)
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CoverElement:
    center: tuple
    diameter: float

    def __post_init__(self):
        if self.diameter <= 0:
            raise ValueError("diameter must be positive")
        object.__setattr__(self, "center", tuple(float(c) for c in self.center))


@dataclass(frozen=True)
class Cover:
    """Finite cover with a diameter-window certificate [delta, delta^theta]."""

    elements: tuple
    delta: float
    theta: float

    def __post_init__(self):
        lo, hi = self.delta, self.delta**self.theta
        for el in self.elements:
            if not (lo - 1e-15 <= el.diameter <= hi + 1e-15):
                raise ValueError(
                    f"element diameter {el.diameter} outside window [{lo}, {hi}]"
                )

    def cost(self, s):
        return float(sum(el.diameter**s for el in self.elements))

    def covers(self, witness, slack=1e-9):
        """Every witness point lies inside some element (taken as closed balls)."""
        pts = witness.points if isinstance(witness, PointCloud) else np.atleast_2d(witness)
        centers = np.array([el.center for el in self.elements])
        radii = np.array([el.diameter for el in self.elements]) / 2.0
        for x in pts:
            if not np.any(np.linalg.norm(centers - x, axis=1) <= radii + slack):
                return False
        return True

    def to_csv(self):
        d = len(self.elements[0].center) if self.elements else 0
        lines = [",".join(f"c{i + 1}" for i in range(d)) + ",diameter"]
        for el in self.elements:
            lines.append(
                ",".join(f"{c:.12g}" for c in el.center) + f",{el.diameter:.12g}"
            )
        return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class CoverCounts:
    """Closed-form element counts of a theorem cover at one (delta, theta)."""

    family: str
    d: int
    delta: float
    theta: float
    cutoff_M: int
    xi_d: float
    inner_boxes: int
    outer_per_sphere: np.ndarray = field(compare=False)
    constants: dict = field(default_factory=dict, compare=False)

    @property
    def outer_total(self):
        return int(self.outer_per_sphere.sum()) if self.outer_per_sphere.size else 0

    def to_flat_text(self):
        outer = ";".join(str(int(v)) for v in self.outer_per_sphere)
        lines = [
            f"family={self.family}",
            f"d={self.d}",
            f"delta={self.delta:.12g}",
            f"theta={self.theta:.12g}",
            f"cutoff_M={self.cutoff_M}",
            f"xi_d={self.xi_d:.12g}",
            f"inner_boxes={self.inner_boxes}",
            f"outer_total={self.outer_total}",
            f"outer_per_sphere={outer}",
        ]
        return "\n".join(lines) + "\n"


def _growth_exponent_or_raise(spec):
    l = spec.count_rule.growth_exponent()
    if l is None:
        raise ValueError(
            "isolated-point cover needs polynomial cumulative growth; "
            "exponential count rules have no finite growth exponent"
        )
    return l


def proof_cutoff(spec, delta, theta, s):
    """Cutoff index M prescribed by the covering argument for this family."""
    f = spec.family
    if f in ("fp", "concentric"):
        d = spec.d
        p = spec.p if f == "fp" else spec.radii.p
        expo = (1.0 - (1.0 - theta) * (d - s)) / (1.0 + p)
    elif f == "isolated_points":
        d, p = 2, spec.p
        l = _growth_exponent_or_raise(spec)
        expo = (s - theta * s + theta * d) / (l + p * d)
    elif f in ("attenuated_sine", "product_sine"):
        p = spec.p
        expo = (s - theta * s + 2.0 * theta - 1.0) / (1.0 + p)
    else:
        raise ValueError(f"no theorem cover for family {f!r}")
    if expo <= 0.0:
        return 1
    m = math.ceil(delta ** (-expo) - 1e-12)
    if m > _MAX_CUTOFF:
        raise ValueError(f"cutoff M = {m} too large to enumerate")
    return max(1, m)


def _sine_q(spec):
    return 0.0 if spec.family == "product_sine" else spec.q


def _counts_concentric_like(spec, delta, theta, M):
    d = spec.d
    p = spec.p if spec.family == "fp" else spec.radii.p
    scale_in = delta**theta
    if d == 1:
        inner = int(math.ceil(float(M) ** (-p) / scale_in)) + 1
        outer = np.ones(M - 1, dtype=np.int64)
        xi = 1.0
        base = float(M) ** (-p) / scale_in
    else:
        xi = xi_constant(d)
        base = 2.0 * math.sqrt(d) / (float(M) ** p * scale_in)
        inner = int(math.ceil((base + 1.0) ** d))
        i = np.arange(1, M, dtype=np.float64)
        outer = np.ceil(xi * (1.0 / (i**p * delta)) ** (d - 1)).astype(np.int64)
    return inner, outer, xi, base


def _counts_isolated(spec, delta, theta, M):
    scale_in = delta**theta
    xi = xi_constant(2)
    base = 2.0 * math.sqrt(2.0) / (float(M) ** spec.p * scale_in)
    inner = int(math.ceil((base + 1.0) ** 2))
    outer = np.array(
        [spec.count_rule.count(i) for i in range(1, M)], dtype=np.int64
    )
    return inner, outer, xi, base


def _counts_sine(spec, delta, theta, M):
    p, q = spec.p, _sine_q(spec)
    scale_in = delta**theta
    h = scale_in / math.sqrt(2.0)
    n_cols = int(math.ceil(math.sqrt(2.0) / (scale_in * float(M) ** p)))
    cols = np.arange(1, n_cols + 1, dtype=np.float64)
    inner = int(np.ceil(2.0 * (cols * h) ** q / h + 1.0).sum())
    i = np.arange(1, M, dtype=np.float64)
    arc_len = 2.0 / i ** (p * q) + 1.0 / i**p - 1.0 / (i + 1.0) ** p
    outer = (np.ceil(arc_len / delta) + 1.0).astype(np.int64)
    return inner, outer, 0.0, float(n_cols)


def build_theorem_cover(spec, delta, theta, s):
    """Closed-form CoverCounts of the proof cover for the given family.

    Supported families: concentric spheres with power radii, the sequence
    set itself (as the 1-d radial case), isolated points with polynomially
    growing counts, and the (attenuated) sine curves.
    """
    if not 0.0 < delta < 1.0:
        raise ValueError("delta must lie in (0, 1)")
    if not 0.0 < theta <= 1.0:
        raise ValueError("theta must lie in (0, 1]")
    if not 0.0 < s <= max(spec.d, 2):
        raise ValueError(f"s must lie in (0, {max(spec.d, 2)}]")
    f = spec.family
    if f == "concentric" and spec.radii.kind != "power":
        raise ValueError("theorem covers need power-law radii")
    M = proof_cutoff(spec, delta, theta, s)
    if f in ("fp", "concentric"):
        inner, outer, xi, base = _counts_concentric_like(spec, delta, theta, M)
    elif f == "isolated_points":
        inner, outer, xi, base = _counts_isolated(spec, delta, theta, M)
    elif f in ("attenuated_sine", "product_sine"):
        inner, outer, xi, base = _counts_sine(spec, delta, theta, M)
    else:
        raise ValueError(f"no theorem cover for family {f!r}")
    return CoverCounts(
        family=f,
        d=spec.d,
        delta=delta,
        theta=theta,
        cutoff_M=M,
        xi_d=xi,
        inner_boxes=inner,
        outer_per_sphere=outer,
        constants={"grid_base": base, "s_used": s},
    )


def cover_cost(counts, delta, theta, s):
    """sum |U|^s = inner * delta^(theta s) + outer_total * delta^s.

    Accumulates in the log domain once counts pass 1e12 so that extreme
    ladders neither overflow nor lose the tiny costs to underflow.
    """
    if not (
        math.isclose(counts.delta, delta, rel_tol=1e-12)
        and math.isclose(counts.theta, theta, rel_tol=1e-12)
    ):
        raise ValueError("counts were produced at a different (delta, theta)")
    inner, outer = counts.inner_boxes, counts.outer_total
    if inner == 0 and outer == 0:
        return 0.0
    if max(inner, outer) <= 1e12:
        return inner * delta ** (theta * s) + outer * delta**s
    ln_d = math.log(delta)
    terms = []
    if inner:
        terms.append(math.log(inner) + theta * s * ln_d)
    if outer:
        terms.append(math.log(outer) + s * ln_d)
    m = max(terms)
    return math.exp(m) * sum(math.exp(t - m) for t in terms)


# ---------------------------------------------------------------------------
# Enumerated grid covers over point clouds
# ---------------------------------------------------------------------------

def enumerate_grid_cover(cloud, delta, theta, inner_radius):
    """Two-scale grid cover of a point cloud.

    Points with |x| <= inner_radius get the occupied delta^theta-cells, the
    rest the occupied delta-cells; cells are half-open axis-aligned cubes
    anchored at the origin with side diameter/sqrt(d).
    """
    if not 0.0 < delta < 1.0:
        raise ValueError("delta must lie in (0, 1)")
    if not 0.0 < theta <= 1.0:
        raise ValueError("theta must lie in (0, 1]")
    pts = cloud.points
    d = pts.shape[1]
    scale_in = delta**theta
    diam = float(np.linalg.norm(pts.max(axis=0) - pts.min(axis=0)))
    if diam <= scale_in:
        # degenerate: one window-sized element already covers everything
        center = tuple((pts.max(axis=0) + pts.min(axis=0)) / 2.0)
        return Cover((CoverElement(center, scale_in),), delta, theta)
    norms = np.linalg.norm(pts, axis=1)
    elements = []
    for scale, mask in ((scale_in, norms <= inner_radius), (delta, norms > inner_radius)):
        if not np.any(mask):
            continue
        side = scale / math.sqrt(d)
        idx = np.unique(np.floor(pts[mask] / side).astype(np.int64), axis=0)
        centers = (idx + 0.5) * side
        elements.extend(CoverElement(tuple(c), scale) for c in centers)
    return Cover(tuple(elements), delta, theta)


# ---------------------------------------------------------------------------
# Upper-bound estimation from theorem covers
# ---------------------------------------------------------------------------

def _cover_surrogate(spec):
    """Spec whose theorem cover computes this family's upper bound."""
    if spec.family == "spiral":
        # the spiral interleaves the concentric picture: winding widths match
        # the attenuated curve with unit envelope exponent
        return SetSpec.attenuated_sine(spec.p, 1.0)
    if spec.family == "elliptical":
        return SetSpec.attenuated_sine(spec.q, spec.p / spec.q)
    return spec


def _cutoff_ladder(spec, delta, theta, d_eff):
    """Candidate cutoffs: proof M over an s-grid plus bracketing powers of 2."""
    cands = set()
    for s in np.linspace(d_eff / 64.0, d_eff, 64):
        try:
            m = proof_cutoff(spec, delta, theta, float(s))
        except ValueError:
            continue
        cands.add(m)
        if m > 1:
            cands.add(1 << max(0, (m - 1).bit_length() - 1))
            cands.add(1 << (m - 1).bit_length())
    cands.add(1)
    return sorted(c for c in cands if c <= _MAX_CUTOFF)


def upper_dim_estimate(spec, theta, deltas):
    """Certified-cover upper estimate of the interpolated dimension.

    For each delta the best theorem cover over the cutoff ladder is used to
    find s*(delta) with cost 1; the ladder of s* values is extrapolated with
    the 1/log(1/delta) fit.
    """
    deltas = sorted(set(float(x) for x in deltas), reverse=True)
    if len(deltas) < 4:
        raise ValueError("need at least 4 delta values")
    if math.log10(deltas[0] / deltas[-1]) < 3.0 - 1e-9:
        raise ValueError("delta ladder must span at least 3 decades")
    work = _cover_surrogate(spec)
    d_eff = float(max(work.d, 2 if work.family != "fp" else 1))
    per = []
    for dlt in deltas:
        tables = []
        for m in _cutoff_ladder(work, dlt, theta, d_eff):
            if work.family in ("fp", "concentric"):
                inner, outer, _, _ = _counts_concentric_like(work, dlt, theta, m)
            elif work.family == "isolated_points":
                inner, outer, _, _ = _counts_isolated(work, dlt, theta, m)
            else:
                inner, outer, _, _ = _counts_sine(work, dlt, theta, m)
            tables.append((m, inner, int(outer.sum())))

        ln_d = math.log(dlt)

        def cost(s, _tables=tables, _ln=ln_d):
            best = math.inf
            for _, inner, outer in _tables:
                c = inner * math.exp(theta * s * _ln) + outer * math.exp(s * _ln)
                if c < best:
                    best = c
            return best

        lo, hi = 0.0, d_eff
        if cost(hi) > 1.0:
            s_star, resid, m_used = hi, cost(hi) - 1.0, tables[-1][0]
        else:
            while hi - lo > 1e-4:
                mid = 0.5 * (lo + hi)
                if cost(mid) > 1.0:
                    lo = mid
                else:
                    hi = mid
            s_star = 0.5 * (lo + hi)
            resid = abs(cost(s_star) - 1.0)
            m_used = min(
                tables,
                key=lambda t: t[1] * dlt ** (theta * s_star) + t[2] * dlt**s_star,
            )[0]
        per.append(PerDelta(dlt, s_star, float(m_used), resid))

    fit = fit_log_correction([q.delta for q in per], [q.s_star for q in per])
    return EstimateResult(theta, tuple(per), fit["a"], fit, formula_value(spec, theta))
