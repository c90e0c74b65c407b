"""Set families: radius sequences, set specifications, deterministic sampling.

Families covered: the decreasing-sequence set {n^-p}, concentric spheres with
radii from a decreasing sequence, polynomial and elliptical spirals, the
(attenuated) topologist's sine curve, and finite point sets on concentric
circles.  Sampling is fully deterministic: same spec, budget, and truncation
always produce the identical point cloud.
"""

import math
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "RadiusSequence",
    "CountRule",
    "SetSpec",
    "PointCloud",
    "radius_term",
    "nearest_term",
    "has_term_in",
    "sample",
    "sample_points_exact",
    "membership_residual",
    "gap_count_A",
    "BudgetError",
]

MAX_EMPIRICAL_DIM = 4  # grid memory blows up beyond this; formulas are uncapped


class BudgetError(ValueError):
    """Raised when a sampling/estimation budget cannot resolve the request."""


# ---------------------------------------------------------------------------
# Radius sequences
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class RadiusSequence:
    """Strictly decreasing positive sequence of radii converging to zero.

    Kinds:
      power        a_n = n^-p            (p > 0)
      geometric    a_n = q^-n            (q > 1; q = 1 would not decrease)
      logarithmic  a_n = 1 / log(n + 1)  (so the sequence starts at n = 1)
      table        explicit finite list; the last term acts as a truncation
    """

    kind: str
    p: float = 0.0
    q: float = 0.0
    table: tuple = ()

    def __post_init__(self):
        if self.kind == "power":
            if self.p <= 0:
                raise ValueError("power sequence needs p > 0")
        elif self.kind == "geometric":
            if self.q <= 1:
                raise ValueError("geometric sequence needs ratio q > 1")
        elif self.kind == "logarithmic":
            pass
        elif self.kind == "table":
            t = np.asarray(self.table, dtype=float)
            if t.size == 0 or np.any(t <= 0) or np.any(np.diff(t) >= 0):
                raise ValueError("table must be strictly decreasing and positive")
        else:
            raise ValueError(f"unknown sequence kind {self.kind!r}")

    @staticmethod
    def power(p):
        return RadiusSequence("power", p=float(p))

    @staticmethod
    def geometric(q):
        return RadiusSequence("geometric", q=float(q))

    @staticmethod
    def logarithmic():
        return RadiusSequence("logarithmic")

    @staticmethod
    def from_table(values):
        return RadiusSequence("table", table=tuple(float(v) for v in values))


def radius_term(seq, n):
    """n-th term a_n of the sequence (n >= 1)."""
    if n < 1:
        raise ValueError("index n must be >= 1")
    if seq.kind == "power":
        return float(n) ** (-seq.p)
    if seq.kind == "geometric":
        return seq.q ** (-float(n))
    if seq.kind == "logarithmic":
        return 1.0 / math.log(n + 1.0)
    if seq.kind == "table":
        if n > len(seq.table):
            raise IndexError(f"table sequence has {len(seq.table)} terms, asked for {n}")
        return seq.table[n - 1]
    raise ValueError(seq.kind)


def _first_index_at_most(seq, x):
    """Smallest n with a_n <= x (None if no term is that small)."""
    if x <= 0:
        return None
    if seq.kind == "power":
        return max(1, math.ceil(x ** (-1.0 / seq.p) - 1e-12))
    if seq.kind == "geometric":
        return max(1, math.ceil(math.log(1.0 / x) / math.log(seq.q) - 1e-12))
    if seq.kind == "logarithmic":
        if x >= 1.0 / math.log(2.0):
            return 1
        return max(1, math.ceil(math.exp(1.0 / x) - 1.0 - 1e-9))
    if seq.kind == "table":
        t = np.asarray(seq.table)
        idx = np.searchsorted(-t, -x, side="left")
        return int(idx) + 1 if idx < t.size else None
    raise ValueError(seq.kind)


def nearest_term(seq, x):
    """Value of the sequence term closest to x > 0 (0 counts as the limit)."""
    if x <= 0:
        return 0.0
    try:
        n = _first_index_at_most(seq, x)
    except OverflowError:
        # index beyond machine range: the terms are denser than float
        # resolution there, so the nearest term is x itself
        return x
    cands = [0.0]  # the accumulation point at the origin
    if n is None:
        if seq.kind == "table":
            cands.append(seq.table[-1])
    else:
        for m in (n - 1, n, n + 1):
            if m >= 1:
                try:
                    cands.append(radius_term(seq, m))
                except IndexError:
                    pass
    return min(cands, key=lambda a: abs(a - x))


def _integer_in(a, b, min_allowed=1):
    """Is there an integer n >= min_allowed with a <= n < b (small fp slack)?"""
    n = max(min_allowed, math.ceil(a - 1e-9 - 1e-12 * abs(a)))
    return n < b - 1e-9


def has_term_in(seq, lo, hi):
    """True iff some sequence term lies in the interval (lo, hi], 0 < lo < hi."""
    if not 0.0 < lo < hi:
        raise ValueError("needs 0 < lo < hi")
    if seq.kind == "power":
        # n^-p in (lo, hi]  <=>  n in [hi^(-1/p), lo^(-1/p))
        la = -math.log(hi) / seq.p
        lb = -math.log(lo) / seq.p
        if la > 43.0 * math.log(2.0):
            return True  # indices beyond 2^43: spacing below fp resolution
        return _integer_in(math.exp(la), math.exp(min(lb, 44.0 * math.log(2.0))))
    if seq.kind == "geometric":
        lq = math.log(seq.q)
        return _integer_in(math.log(1.0 / hi) / lq, math.log(1.0 / lo) / lq)
    if seq.kind == "logarithmic":
        # 1/log(n+1) in (lo, hi]  <=>  n in [e^(1/hi) - 1, e^(1/lo) - 1)
        a, b = 1.0 / hi, 1.0 / lo
        if a > 690.0:
            # e^a overflows; the window contains an integer whenever its
            # width e^a (e^(b-a) - 1) >= e^a (b-a) clearly exceeds 1
            return a + math.log(max(b - a, 1e-300)) > 5.0
        return _integer_in(math.exp(a) - 1.0, math.exp(min(b, 700.0)) - 1.0)
    if seq.kind == "table":
        t = np.asarray(seq.table)
        i = np.searchsorted(-t, -hi, side="left")  # first term <= hi
        return bool(i < t.size and t[i] > lo)
    raise ValueError(seq.kind)


def gap_count_A(seq, p, n):
    """Number of intervals (1/(k+1)^p, 1/k^p], k <= n, hit by the sequence."""
    if n < 1:
        raise ValueError("n must be >= 1")
    count = 0
    for k in range(1, n + 1):
        if has_term_in(seq, float(k + 1) ** (-p), float(k) ** (-p)):
            count += 1
    return count


# ---------------------------------------------------------------------------
# Set specifications
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CountRule:
    """Points-per-circle rule b_i for isolated-point sets."""

    kind: str  # constant | power_sum | exponential
    value: float

    def count(self, i):
        if self.kind == "constant":
            return int(self.value)
        if self.kind == "power_sum":
            return max(1, int(round(float(i) ** self.value)))
        if self.kind == "exponential":
            return int(round(self.value**i))
        raise ValueError(self.kind)

    def growth_exponent(self):
        """l with sum_{i<=n} b_i ~ n^l, or None for super-polynomial growth."""
        if self.kind == "constant":
            return 1.0
        if self.kind == "power_sum":
            return self.value + 1.0
        return None

    def __post_init__(self):
        if self.kind not in ("constant", "power_sum", "exponential"):
            raise ValueError(f"unknown count rule {self.kind!r}")
        if self.kind == "constant" and (self.value < 1 or self.value != int(self.value)):
            raise ValueError("constant count rule needs a positive integer")
        if self.kind == "power_sum" and self.value <= 0:
            raise ValueError("power_sum exponent must be positive")
        if self.kind == "exponential" and self.value <= 1:
            raise ValueError("exponential base must exceed 1")


@dataclass(frozen=True)
class SetSpec:
    """Tagged description of one set family.

    family: fp | concentric | spiral | elliptical | product_sine |
            attenuated_sine | isolated_points
    """

    family: str
    d: int = 2
    p: float = 0.0
    q: float = 0.0
    radii: RadiusSequence = None
    count_rule: CountRule = None

    def __post_init__(self):
        f = self.family
        if f == "fp":
            if self.p <= 0:
                raise ValueError("fp needs p > 0")
            object.__setattr__(self, "d", 1)
        elif f == "concentric":
            if self.d < 2:
                raise ValueError("concentric spheres need ambient dimension d >= 2")
            if self.radii is None:
                raise ValueError("concentric spheres need a radius sequence")
        elif f == "spiral":
            if self.p <= 0:
                raise ValueError("spiral needs p > 0")
            object.__setattr__(self, "d", 2)
        elif f == "elliptical":
            if not (self.q >= self.p > 0):
                raise ValueError("elliptical spiral needs q >= p > 0")
            object.__setattr__(self, "d", 2)
        elif f == "product_sine":
            if self.p <= 0:
                raise ValueError("product sine curve needs p > 0")
            object.__setattr__(self, "d", 2)
        elif f == "attenuated_sine":
            if self.p <= 0 or self.q <= 0:
                raise ValueError("attenuated sine curve needs p, q > 0")
            object.__setattr__(self, "d", 2)
        elif f == "isolated_points":
            if self.p <= 0:
                raise ValueError("isolated points need p > 0")
            if self.count_rule is None:
                raise ValueError("isolated points need a count rule")
            object.__setattr__(self, "d", 2)
        else:
            raise ValueError(f"unknown family {f!r}")

    # -- convenience constructors ------------------------------------------
    @staticmethod
    def fp(p):
        return SetSpec("fp", p=float(p))

    @staticmethod
    def concentric(d, radii):
        if isinstance(radii, (int, float)):
            radii = RadiusSequence.power(radii)
        return SetSpec("concentric", d=int(d), radii=radii,
                       p=radii.p if radii.kind == "power" else 0.0)

    @staticmethod
    def spiral(p):
        return SetSpec("spiral", p=float(p))

    @staticmethod
    def elliptical(p, q):
        return SetSpec("elliptical", p=float(p), q=float(q))

    @staticmethod
    def product_sine(p):
        return SetSpec("product_sine", p=float(p))

    @staticmethod
    def attenuated_sine(p, q):
        return SetSpec("attenuated_sine", p=float(p), q=float(q))

    @staticmethod
    def isolated_points(p, rule):
        return SetSpec("isolated_points", p=float(p), count_rule=rule)

    # -- shared geometry ----------------------------------------------------
    def outer_radius(self):
        """Radius of the smallest origin ball containing the set."""
        if self.family == "concentric":
            return radius_term(self.radii, 1)
        if self.family in ("product_sine", "attenuated_sine"):
            return math.sqrt(2.0)  # x <= 1, |y| <= 1
        return 1.0

    def diameter(self):
        """Upper bound on the set diameter (exact for the radial families)."""
        if self.family == "fp":
            return 1.0
        if self.family in ("product_sine", "attenuated_sine"):
            return math.sqrt(5.0)
        return 2.0 * self.outer_radius()

    def diameter_lower(self):
        """Lower bound on the set diameter, used to honor step contracts."""
        if self.family in ("concentric", "isolated_points"):
            return 2.0 * self.outer_radius()
        return 1.0

    def envelope(self, x):
        """Amplitude bound at abscissa x for the sine-curve families."""
        if self.family == "product_sine":
            return 1.0
        return x**self.q

    def graph_value(self, x):
        """y = f(x) for the sine-curve graphs, x in (0, 1]."""
        amp = self.envelope(x)
        return amp * math.sin(math.pi * x ** (-1.0 / self.p))


@dataclass(frozen=True)
class PointCloud:
    """Finite deterministic sample of a set."""

    dimension: int
    points: np.ndarray  # (n, d), float64
    resolution: float  # arc step for parametric families, truncation otherwise
    spec: SetSpec = field(default=None, compare=False)

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=np.float64)
        if pts.ndim == 1:
            pts = pts[:, None]
        if pts.size == 0:
            raise ValueError("point cloud is empty")
        object.__setattr__(self, "points", pts)

    @property
    def size(self):
        return self.points.shape[0]

    def norms(self):
        return np.linalg.norm(self.points, axis=1)


# ---------------------------------------------------------------------------
# Sampling
# ---------------------------------------------------------------------------

def _circle_points(r, step, phase=0.0):
    n = max(8, int(math.ceil(2.0 * math.pi * r / step)))
    ang = phase + 2.0 * math.pi * np.arange(n) / n
    return np.column_stack([r * np.cos(ang), r * np.sin(ang)])


def _sphere_points(r, step, d):
    """Angular grid on the (d-1)-sphere of radius r with arc step <= step."""
    if d == 2:
        return _circle_points(r, step)
    n_ang = max(4, int(math.ceil(math.pi * r / step)))
    polar = math.pi * (np.arange(n_ang + 1)) / n_ang
    if d == 3:
        rows = []
        for ph in polar:
            rr = r * math.sin(ph)
            z = r * math.cos(ph)
            if rr < step / 4:
                rows.append(np.array([[0.0, 0.0, z]]))
            else:
                ring = _circle_points(rr, step)
                rows.append(np.column_stack([ring, np.full(ring.shape[0], z)]))
        return np.vstack(rows)
    if d == 4:
        rows = []
        for ph in polar:
            rr = r * math.sin(ph)
            w = r * math.cos(ph)
            if rr < step / 4:
                rows.append(np.array([[0.0, 0.0, 0.0, w]]))
            else:
                sub = _sphere_points(rr, step, 3)
                rows.append(np.column_stack([sub, np.full(sub.shape[0], w)]))
        return np.vstack(rows)
    raise ValueError(f"empirical sampling capped at d <= {MAX_EMPIRICAL_DIM}")


def _curve_points(spec, t0, t1, step):
    """Chunked uniform-parameter sampling of the sine/spiral curves.

    Within each chunk the parameter step is set from the local speed bound so
    that consecutive points are at most ``step`` apart in arc length.
    """
    chunks = []
    t = t0
    while t < t1:
        t_next = min(t1, t * 1.25 + 0.25)
        v = _speed_bound(spec, t, t_next)
        dt = step / v
        n = max(2, int(math.ceil((t_next - t) / dt)) + 1)
        ts = np.linspace(t, t_next, n)
        chunks.append(_eval_curve(spec, ts[:-1] if t_next < t1 else ts))
        t = t_next
    return np.vstack(chunks)


def _speed_bound(spec, t0, t1):
    p = spec.p
    if spec.family in ("product_sine", "attenuated_sine"):
        pq = p * spec.q if spec.family == "attenuated_sine" else 0.0
        amp = t0 ** (-pq)
        return math.hypot(p * t0 ** (-p - 1.0), math.pi * amp + pq * t0 ** (-pq - 1.0))
    if spec.family == "spiral":
        return math.hypot(p * t0 ** (-p - 1.0), math.pi * t0 ** (-p)) * 1.001
    if spec.family == "elliptical":
        vx = p * t0 ** (-p - 1.0) + math.pi * t0 ** (-p)
        vy = spec.q * t0 ** (-spec.q - 1.0) + math.pi * t0 ** (-spec.q)
        return math.hypot(vx, vy)
    raise ValueError(spec.family)


def _eval_curve(spec, ts):
    p = spec.p
    if spec.family == "product_sine":
        return np.column_stack([ts ** (-p), np.sin(math.pi * ts)])
    if spec.family == "attenuated_sine":
        return np.column_stack([ts ** (-p), ts ** (-p * spec.q) * np.sin(math.pi * ts)])
    if spec.family == "spiral":
        r = ts ** (-p)
        return np.column_stack([r * np.sin(math.pi * ts), r * np.cos(math.pi * ts)])
    if spec.family == "elliptical":
        return np.column_stack(
            [ts ** (-p) * np.sin(math.pi * ts), ts ** (-spec.q) * np.cos(math.pi * ts)]
        )
    raise ValueError(spec.family)


def sample_points_exact(spec, truncation, budget=None):
    """Exact point enumeration for the countable families (fp, isolated)."""
    if spec.family == "fp":
        n_max = int(math.floor(truncation ** (-1.0 / spec.p) + 1e-9))
        if budget is not None:
            n_max = min(n_max, int(budget))
        if n_max < 1:
            raise BudgetError("budget/truncation admit no points of the sequence set")
        pts = (np.arange(1, n_max + 1, dtype=np.float64)) ** (-spec.p)
        return pts[:, None]
    if spec.family == "isolated_points":
        n_circ = int(math.floor(truncation ** (-1.0 / spec.p) + 1e-9))
        if n_circ < 1:
            raise BudgetError("truncation excludes every circle")
        blocks = []
        total = 0
        for i in range(1, n_circ + 1):
            b = spec.count_rule.count(i)
            total += b
            if budget is not None and total > budget:
                raise BudgetError(
                    f"isolated-point enumeration needs {total}+ points, budget {budget}"
                )
            r = float(i) ** (-spec.p)
            # phase convention: point j at angle 2*pi*j/b, j starting at 0
            ang = 2.0 * math.pi * np.arange(b) / b
            blocks.append(np.column_stack([r * np.cos(ang), r * np.sin(ang)]))
        return np.vstack(blocks)
    raise ValueError(f"{spec.family} is not an exact-enumeration family")


def sample(spec, budget, truncation):
    """Deterministic point cloud of the set at the requested resolution.

    ``budget`` fixes the arc-length step ``diameter / budget`` for the
    parametric families and caps the point count for the countable ones.
    ``truncation`` in (0, 1] bounds the smallest radius (or abscissa)
    included; the tail near the origin is meant to be handled analytically
    by the cover machinery, never by sampling.
    """
    if budget < 1:
        raise BudgetError("budget must be >= 1")
    if not (0.0 < truncation <= 1.0):
        raise ValueError("truncation must lie in (0, 1]")

    if spec.family in ("fp", "isolated_points"):
        pts = sample_points_exact(spec, truncation, budget)
        return PointCloud(spec.d, pts, truncation, spec)

    step = spec.diameter_lower() / budget
    if spec.family == "concentric":
        if spec.d > MAX_EMPIRICAL_DIM:
            raise ValueError(f"empirical sampling capped at d <= {MAX_EMPIRICAL_DIM}")
        i, blocks = 1, []
        while True:
            try:
                r = radius_term(spec.radii, i)
            except IndexError:
                break
            if r < truncation:
                break
            blocks.append(_sphere_points(r, step, spec.d))
            i += 1
        if not blocks:
            raise BudgetError("truncation excludes every sphere")
        return PointCloud(spec.d, np.vstack(blocks), step, spec)

    # parametric curves: t >= 1 with radius/abscissa >= truncation
    exponent = spec.p if spec.family != "elliptical" else spec.q
    t_max = truncation ** (-1.0 / exponent)
    if t_max <= 1.0:
        raise BudgetError("truncation excludes the whole parameter range")
    pts = _curve_points(spec, 1.0, t_max, step)
    return PointCloud(2, pts, step, spec)


# ---------------------------------------------------------------------------
# Membership
# ---------------------------------------------------------------------------

def membership_residual(spec, point):
    """0 iff the point lies on the set; otherwise a distance-like residual."""
    pt = np.asarray(point, dtype=float).ravel()
    if pt.size != spec.d:
        raise ValueError(f"point dimension {pt.size} != spec dimension {spec.d}")

    if spec.family == "fp":
        return abs(pt[0] - nearest_term(RadiusSequence.power(spec.p), pt[0]))

    if spec.family == "concentric":
        rho = float(np.linalg.norm(pt))
        return abs(rho - nearest_term(spec.radii, rho))

    if spec.family in ("product_sine", "attenuated_sine"):
        x, y = pt
        if x <= 0.0:
            # distance to the limit set at x = 0 (segment for T_p, origin else)
            if spec.family == "product_sine":
                return math.hypot(x, max(0.0, abs(y) - 1.0))
            return math.hypot(x, y)
        if x > 1.0:
            return math.hypot(x - 1.0, y - spec.graph_value(1.0))
        return abs(y - spec.graph_value(x))

    if spec.family in ("spiral", "elliptical"):
        return _spiral_residual(spec, pt)

    if spec.family == "isolated_points":
        rho = float(np.linalg.norm(pt))
        if rho == 0.0:
            return 0.0  # the origin is the unique limit point
        i0 = max(1, int(round(rho ** (-1.0 / spec.p))))
        best = math.inf
        for i in (i0 - 1, i0, i0 + 1):
            if i < 1:
                continue
            r = float(i) ** (-spec.p)
            b = spec.count_rule.count(i)
            ang = math.atan2(pt[1], pt[0]) % (2.0 * math.pi)
            j = round(ang * b / (2.0 * math.pi))
            aj = 2.0 * math.pi * j / b
            best = min(best, math.hypot(pt[0] - r * math.cos(aj), pt[1] - r * math.sin(aj)))
        return best

    raise ValueError(spec.family)


def _spiral_residual(spec, pt):
    """Distance to the spiral via the unique t with the matching ellipse."""
    x, y = pt
    if x == 0.0 and y == 0.0:
        return 0.0  # the origin is the limit point of the spiral
    p, q = spec.p, (spec.q if spec.family == "elliptical" else spec.p)

    def g(t):
        return (x * t**p) ** 2 + (y * t**q) ** 2 - 1.0

    if g(1.0) > 0.0:
        # outside the first winding: residual against the t=1 endpoint region
        t_star = 1.0
    else:
        lo, hi = 1.0, 2.0
        while g(hi) <= 0.0:
            lo, hi = hi, hi * 2.0
            if hi > 1e18:
                return math.hypot(x, y)
        for _ in range(200):
            mid = 0.5 * (lo + hi)
            if g(mid) <= 0.0:
                lo = mid
            else:
                hi = mid
            if hi - lo <= 1e-14 * lo:
                break
        t_star = 0.5 * (lo + hi)
    sx = t_star ** (-p) * math.sin(math.pi * t_star)
    sy = t_star ** (-q) * math.cos(math.pi * t_star)
    return math.hypot(x - sx, y - sy)
