"""Measures witnessing dimension lower bounds, and their empirical certification.

The constructions mirror the covering arguments: a scaled surface measure
over the first M shells (concentric case), equal point masses on one dense
circle (isolated-point case), scaled arc length over the first M windings
(sine-curve case), and a lift of any measure on the radius set to spheres.

``verify_mass_distribution`` checks the two ingredients of the mass
distribution principle on a ladder of scales: the total mass stays above a
floor independent of delta, and mu(U) <= cap * |U|^s holds over a large
deterministic family of test balls with diameters in [delta, delta^theta].
Certificates are labeled "supported", never proved: finite sampling cannot
establish a universal bound.
"""

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import integrate, special

from . import _kernels

__all__ = [
    "MeasureThresholdError",
    "SphereAtom",
    "PointAtom",
    "CircleLatticeAtom",
    "ArcAtom",
    "DiscreteMeasure",
    "TestSet",
    "LowerBoundCertificate",
    "sphere_area_constant",
    "build_mu_concentric",
    "build_lambda_lift",
    "build_mu_points_example",
    "build_mu_sine",
    "build_frostman_greedy",
    "concentric_mass_floor",
    "concentric_ratio_cap",
    "sine_mass_floor",
    "sine_ratio_cap",
    "points_ratio_cap",
    "concentric_delta_threshold",
    "sine_delta_threshold",
    "verify_mass_distribution",
]


class MeasureThresholdError(ValueError):
    """delta is too large for the construction's validity threshold."""


def sphere_area_constant(d):
    """(d-1)-dimensional measure of the unit (d-1)-sphere in R^d."""
    if d < 2:
        raise ValueError("d must be >= 2")
    return 2.0 * math.pi ** (d / 2.0) / math.gamma(d / 2.0)


def _cap_fraction(d, cos_phi):
    """Fraction of the (d-1)-sphere within colatitude phi = arccos(cos_phi)."""
    cos_phi = min(1.0, max(-1.0, cos_phi))
    if d == 2:
        return math.acos(cos_phi) / math.pi
    m = d - 2  # integrand sin^m
    a, b = (m + 1) / 2.0, 0.5
    s2 = 1.0 - cos_phi * cos_phi
    if cos_phi >= 0.0:
        return 0.5 * special.betainc(a, b, s2)
    return 1.0 - 0.5 * special.betainc(a, b, s2)


# ---------------------------------------------------------------------------
# Atoms
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SphereAtom:
    """Origin-centered (d-1)-sphere carrying ``mass`` spread uniformly."""

    radius: float
    mass: float
    d: int = 2

    def ball_measure(self, center, R):
        rho = float(np.linalg.norm(center))
        r = self.radius
        if rho == 0.0:
            return self.mass if r <= R else 0.0
        if r <= R - rho:
            return self.mass
        if r < rho - R or r > rho + R:
            return 0.0
        cos_phi = (rho * rho + r * r - R * R) / (2.0 * rho * r)
        return self.mass * _cap_fraction(self.d, cos_phi)


@dataclass(frozen=True)
class PointAtom:
    location: tuple
    mass: float

    def ball_measure(self, center, R):
        dist = math.dist(self.location, center)
        return self.mass if dist <= R * (1.0 + 1e-12) else 0.0


@dataclass(frozen=True)
class CircleLatticeAtom:
    """n equally spaced points on an origin circle, phase 0, total mass ``mass``.

    The per-ball measure is exact integer arithmetic on the angular window,
    so the atom never needs materializing (n may be astronomically large).
    """

    radius: float
    n: int
    mass: float

    def ball_measure(self, center, R):
        rho = float(np.hypot(center[0], center[1]))
        r = self.radius
        if rho == 0.0:
            return self.mass if r <= R else 0.0
        if r <= R - rho:
            return self.mass
        if r < rho - R or r > rho + R:
            return 0.0
        cos_phi = (rho * rho + r * r - R * R) / (2.0 * rho * r)
        phi = math.acos(min(1.0, max(-1.0, cos_phi)))
        alpha = math.atan2(center[1], center[0])
        # lattice points with angle in [alpha - phi, alpha + phi] (mod 2 pi)
        step = 2.0 * math.pi / self.n
        slack = 1e-12 * self.n + 1e-9
        j_hi = math.floor((alpha + phi) / step + slack)
        j_lo = math.ceil((alpha - phi) / step - slack)
        count = max(0, j_hi - j_lo + 1)
        count = min(count, self.n)
        return self.mass * (count / self.n)


@dataclass(frozen=True)
class ArcAtom:
    """One winding {(t^-p, t^-pq sin(pi t)) : t0 <= t <= t1} with its length."""

    p: float
    q: float
    t0: float
    t1: float
    mass: float  # = arc length

    def _point(self, t):
        return (t ** (-self.p), t ** (-self.p * self.q) * math.sin(math.pi * t))

    def _speed(self, t):
        p, pq = self.p, self.p * self.q
        dx = -p * t ** (-p - 1.0)
        dy = -pq * t ** (-pq - 1.0) * np.sin(math.pi * t) + math.pi * t ** (
            -pq
        ) * np.cos(math.pi * t)
        return np.hypot(dx, dy)

    def length(self, rel_tol=1e-8):
        val, _ = integrate.quad(
            self._speed, self.t0, self.t1, epsabs=0.0, epsrel=rel_tol, limit=200
        )
        return val

    def ball_measure(self, center, R):
        cx, cy = center[0], center[1]
        # bounding-box pre-check: x in [t1^-p, t0^-p], |y| <= t0^-pq
        x_lo, x_hi = self.t1 ** (-self.p), self.t0 ** (-self.p)
        y_amp = self.t0 ** (-self.p * self.q)
        dx = max(x_lo - cx, cx - x_hi, 0.0)
        dy = max(abs(cy) - y_amp, 0.0)
        if dx * dx + dy * dy > R * R:
            return 0.0

        def g(t):
            x, y = self._point(t)
            return (x - cx) ** 2 + (y - cy) ** 2 - R * R

        ts = np.linspace(self.t0, self.t1, 257)
        xs = ts ** (-self.p)
        ys = ts ** (-self.p * self.q) * np.sin(math.pi * ts)
        vals = (xs - cx) ** 2 + (ys - cy) ** 2 - R * R
        inside = vals <= 0.0
        if not inside.any():
            return 0.0
        # refine the boundary crossings by bisection
        edges = []
        for i in range(len(ts) - 1):
            if inside[i] != inside[i + 1]:
                lo, hi = ts[i], ts[i + 1]
                for _ in range(60):
                    mid = 0.5 * (lo + hi)
                    if (g(mid) <= 0.0) == inside[i]:
                        lo = mid
                    else:
                        hi = mid
                edges.append(0.5 * (lo + hi))
        bounds = [self.t0] + edges + [self.t1]
        total = 0.0
        for a, b in zip(bounds[:-1], bounds[1:]):
            if b - a <= 0:
                continue
            if g(0.5 * (a + b)) <= 0.0:
                seg, _ = integrate.quad(
                    self._speed, a, b, epsabs=0.0, epsrel=1e-8, limit=200
                )
                total += seg
        return total


# ---------------------------------------------------------------------------
# Measures
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class TestSet:
    """A sampled U of the window: a closed ball with diameter in [delta, delta^theta]."""

    center: tuple
    diameter: float


@dataclass(frozen=True)
class DiscreteMeasure:
    """Finite atomic measure with a separately stored scale prefactor."""

    dimension: int
    atoms: tuple
    scale_factor: float = 1.0

    def __post_init__(self):
        if not self.atoms:
            raise ValueError("measure needs at least one atom")
        if any(a.mass < 0 for a in self.atoms):
            raise ValueError("atom masses must be non-negative")
        if self.total_mass() <= 0 or not math.isfinite(self.total_mass()):
            raise ValueError("total mass must be positive and finite")

    def total_mass(self):
        return self.scale_factor * float(sum(a.mass for a in self.atoms))

    def scaled(self, c):
        return DiscreteMeasure(self.dimension, self.atoms, self.scale_factor * c)

    def measure_ball(self, center, diameter):
        R = diameter / 2.0
        return self.scale_factor * float(
            sum(a.ball_measure(center, R) for a in self.atoms)
        )

    def measure_balls(self, centers, diameters):
        """Vectorized exact ball measures (fast path for pure d=2 sphere atoms)."""
        centers = np.atleast_2d(np.asarray(centers, dtype=float))
        rr = np.asarray(diameters, dtype=float) / 2.0
        if self.dimension == 2 and all(isinstance(a, SphereAtom) for a in self.atoms):
            radii = np.array([a.radius for a in self.atoms])
            masses = np.array([a.mass for a in self.atoms])
            out = _kernels.mu_concentric_balls(
                radii, masses, centers[:, 0], centers[:, 1], rr
            )
            return self.scale_factor * out
        return np.array(
            [self.measure_ball(c, 2.0 * R) for c, R in zip(centers, rr)]
        )

    def support_radius(self):
        out = 0.0
        for a in self.atoms:
            if isinstance(a, (SphereAtom, CircleLatticeAtom)):
                out = max(out, a.radius)
            elif isinstance(a, PointAtom):
                out = max(out, float(np.linalg.norm(a.location)))
            elif isinstance(a, ArcAtom):
                out = max(out, a.t0 ** (-a.p) * math.sqrt(2.0))
        return out


# ---------------------------------------------------------------------------
# Constructions
# ---------------------------------------------------------------------------

def concentric_delta_threshold(d, p, theta, s):
    """delta_0 below which the concentric measure's floor argument is valid."""
    expo = (1.0 + p) / ((1.0 - (1.0 - theta) * (d - s)) * (1.0 - p * (d - 1)))
    return 2.0 ** (-expo)


def concentric_mass_floor(d, p):
    return sphere_area_constant(d) / (2.0 * (1.0 - p * (d - 1)))


def concentric_ratio_cap(d, p):
    eta = sphere_area_constant(d)
    return (2.0 ** (1.0 + p) / p + 1.0) * eta


def build_mu_concentric(d, p, theta, s, delta):
    """Scaled surface measure over the first M spheres of radii i^-p.

    Valid for 0 < p < 1/(d-1) and delta below the threshold; the total mass
    is then bounded below by eta_{d-1} / (2 (1 - p(d-1))).
    """
    if not 0.0 < p < 1.0 / (d - 1):
        raise ValueError("needs 0 < p < 1/(d-1)")
    if not 0.0 < theta <= 1.0:
        raise ValueError("theta must lie in (0, 1]")
    delta0 = concentric_delta_threshold(d, p, theta, s)
    if delta >= delta0:
        raise MeasureThresholdError(
            f"delta {delta:.3g} >= threshold {delta0:.3g} for (d={d}, p={p}, "
            f"theta={theta}, s={s:.6g})"
        )
    expo = (1.0 - (1.0 - theta) * (d - s)) / (1.0 + p)
    M = max(1, math.ceil(delta ** (-expo) - 1e-12))
    eta = sphere_area_constant(d)
    atoms = tuple(
        SphereAtom(float(i) ** (-p), eta * float(i) ** (-p * (d - 1)), d)
        for i in range(1, M + 1)
    )
    return DiscreteMeasure(d, atoms, delta ** (s - (d - 1)))


def build_lambda_lift(radii_measure, d):
    """Lift point atoms on positive reals to normalized spheres in R^d.

    Each atom (x_i, m_i) becomes the uniform measure of total mass m_i on
    the origin sphere of radius x_i; the total mass is preserved exactly.
    """
    atoms = []
    for a in radii_measure.atoms:
        if not isinstance(a, PointAtom):
            raise ValueError("lift expects a pure point-atom measure")
        x = a.location[0]
        if x <= 0.0:
            raise ValueError("atom at the origin cannot be lifted")
        atoms.append(SphereAtom(float(x), a.mass, d))
    return DiscreteMeasure(d, tuple(atoms), radii_measure.scale_factor)


def points_gamma(p, theta):
    return theta / (4.0 * p)


def points_ratio_cap(p):
    return 2.0**p + 1.0


def build_mu_points_example(p, theta, delta):
    """Probability measure on the 2^M lattice points of one dense circle.

    gamma = theta/(4p), M = ceil(delta^-gamma); requires
    2^(-delta^-gamma) <= delta^(1/2) (the chain that absorbs the stray point
    mass survives equality, so the check is non-strict).
    """
    if p <= 0:
        raise ValueError("p must be positive")
    if not 0.0 < theta <= 1.0:
        raise ValueError("theta must lie in (0, 1]")
    if not 0.0 < delta < 1.0:
        raise ValueError("delta must lie in (0, 1)")
    gamma = points_gamma(p, theta)
    # compare exponents in log2 to dodge under/overflow
    if -(delta**-gamma) > 0.5 * math.log2(delta) + 1e-9:
        raise MeasureThresholdError(
            f"delta {delta:.3g} too large: 2^(-delta^-gamma) > sqrt(delta) "
            f"(gamma={gamma:.4g})"
        )
    M = max(1, math.ceil(delta**-gamma - 1e-12))
    if M > 62:
        # 2^M points still work via the lattice atom, but keep M sane
        raise ValueError(f"cutoff M = {M} yields 2^{M} points; ladder too deep")
    n = 2**M
    atom = CircleLatticeAtom(float(M) ** (-p), n, 1.0)
    return DiscreteMeasure(2, (atom,), 1.0)


def sine_delta_threshold(p, q, theta, s):
    expo = (1.0 + p) / ((s - theta * s + 2.0 * theta - 1.0) * (1.0 - p * q))
    return 4.0 ** (-expo)


def sine_mass_floor(p, q):
    return 1.0 / (2.0 * (1.0 - p * q))


def sine_ratio_cap(p):
    return 3.0 * (2.0 ** (1.0 + p) / p + 2.0)


def build_mu_sine(p, q, theta, s, delta):
    """Scaled arc-length measure over the first M-1 windings of the curve."""
    if not (p > 0 and q > 0 and p * q < 1.0):
        raise ValueError("needs p, q > 0 with p*q < 1")
    if not 0.0 < theta <= 1.0:
        raise ValueError("theta must lie in (0, 1]")
    d0 = sine_delta_threshold(p, q, theta, s)
    if delta >= d0:
        raise MeasureThresholdError(
            f"delta {delta:.3g} >= threshold {d0:.3g} for (p={p}, q={q}, "
            f"theta={theta}, s={s:.6g})"
        )
    expo = (s - theta * s + 2.0 * theta - 1.0) / (1.0 + p)
    M = max(2, math.ceil(delta ** (-expo) - 1e-12))
    if M > 100_000:
        raise ValueError(f"cutoff M = {M} needs too many quadratures")
    atoms = []
    for i in range(1, M):
        a = ArcAtom(p, q, float(i), float(i + 1), 0.0)
        atoms.append(ArcAtom(p, q, float(i), float(i + 1), a.length()))
    return DiscreteMeasure(2, tuple(atoms), delta ** (s - 1.0))


def build_frostman_greedy(seq_values, s, delta, theta):
    """Greedy stand-in for the Frostman-type measure on a radius set.

    Mass over the points above the cutoff is proportional to
    min(cap, gap^s) with gap the spacing to the next point and cap the
    window-top bound (delta^theta)^s.  The resulting local-boundedness
    constant is empirical: report it, never assume it.
    """
    xs = np.asarray(sorted(set(float(v) for v in seq_values), reverse=True))
    xs = xs[xs > delta]
    if xs.size == 0:
        raise ValueError("no sequence points above the cutoff")
    gaps = np.empty(xs.size)
    gaps[:-1] = xs[:-1] - xs[1:]
    gaps[-1] = xs[-1]  # last gap runs to the truncated tail
    cap = (delta**theta) ** s
    w = np.minimum(cap, np.maximum(gaps, delta) ** s)
    w /= w.sum()
    atoms = tuple(PointAtom((float(x),), float(m)) for x, m in zip(xs, w))
    return DiscreteMeasure(1, atoms, 1.0)


# ---------------------------------------------------------------------------
# Certification
# ---------------------------------------------------------------------------

def _radical_inverse(n, base):
    out, f = 0.0, 1.0 / base
    while n > 0:
        n, r = divmod(n, base)
        out += r * f
        f /= base
    return out


def _halton_block(start, count, bases):
    return np.array(
        [[_radical_inverse(i, b) for b in bases] for i in range(start, start + count)]
    )


def _adversarial_centers(measure, delta, budget):
    """Worst-case ball centers: on atoms, between consecutive shells, origin."""
    cents = [np.zeros(measure.dimension)]
    radial = sorted(
        {
            a.radius
            for a in measure.atoms
            if isinstance(a, (SphereAtom, CircleLatticeAtom))
        },
        reverse=True,
    )
    stride = max(1, len(radial) // max(1, budget // 6))
    picked = radial[::stride]
    for r in picked:
        e = np.zeros(measure.dimension)
        e[0] = r
        cents.append(e.copy())
        e[0] = r - delta / 2.0
        cents.append(e.copy())
    for r1, r2 in zip(picked[:-1], picked[1:]):
        e = np.zeros(measure.dimension)
        e[0] = 0.5 * (r1 + r2)
        cents.append(e)
    for a in measure.atoms:
        if isinstance(a, PointAtom) and len(cents) < budget:
            cents.append(np.asarray(a.location, dtype=float))
        elif isinstance(a, ArcAtom) and len(cents) < budget:
            for t in (a.t0, 0.5 * (a.t0 + a.t1)):
                cents.append(np.asarray(a._point(t), dtype=float))
    return np.array(cents[:budget])


def _sample_test_sets(measure, delta, theta, samples):
    """Deterministic test balls: Halton centers plus adversarial placements,
    diameters log-uniform in [delta, delta^theta]."""
    d = measure.dimension
    bases = [2, 3, 5, 7][:d]
    n_halton = max(1, (2 * samples) // 3)
    box = measure.support_radius() + delta ** min(theta, 1.0)
    u = _halton_block(1, n_halton, bases + [11])
    centers = (2.0 * u[:, :d] - 1.0) * box
    adv = _adversarial_centers(measure, delta, samples - n_halton)
    centers = np.vstack([centers, adv])
    m = centers.shape[0]
    v = np.array([_radical_inverse(i, 13) for i in range(1, m + 1)])
    ln = math.log(delta)
    diams = np.exp(ln + v * (theta - 1.0) * ln)  # delta^(1 + v(theta-1))
    return centers, diams


@dataclass(frozen=True)
class LowerBoundCertificate:
    """Outcome of one mass-distribution certification run."""

    s: float
    theta: float
    deltas: tuple
    floor: float
    cap: float
    samples: int
    total_mass_min: float
    ratio_max: float
    verdict: str  # supported | violated
    per_delta: tuple = field(compare=False)  # (delta, total_mass, ratio_max, status)
    skipped: tuple = ()

    def to_flat_text(self):
        lines = []
        for dlt, mass, ratio, status in self.per_delta:
            lines.append(
                f"s={self.s:.12g} theta={self.theta:.12g} delta={dlt:.12g} "
                f"total_mass={mass:.12g} ratio_max={ratio:.12g} verdict={status}"
            )
        lines.append(
            f"s={self.s:.12g} theta={self.theta:.12g} delta=all "
            f"total_mass={self.total_mass_min:.12g} ratio_max={self.ratio_max:.12g} "
            f"verdict={self.verdict}"
        )
        return "\n".join(lines) + "\n"


def verify_mass_distribution(family, s, theta, deltas, samples, floor, cap):
    """Certify mu(U) <= cap |U|^s and total mass >= floor over the ladder.

    ``family(delta, s)`` builds the measure for one scale; a
    MeasureThresholdError skips that scale (noted in the certificate).
    The verdict is ``supported`` iff every non-skipped scale passes both
    checks and at least one scale was evaluated.
    """
    if samples < 1000:
        raise ValueError("needs at least 1000 samples")
    per, skipped = [], []
    mass_min, ratio_max = math.inf, 0.0
    for dlt in sorted(set(float(x) for x in deltas), reverse=True):
        try:
            mu = family(dlt, s)
        except MeasureThresholdError as exc:
            skipped.append((dlt, str(exc)))
            per.append((dlt, math.nan, math.nan, "skipped"))
            continue
        centers, diams = _sample_test_sets(mu, dlt, theta, samples)
        mus = mu.measure_balls(centers, diams)
        ratios = mus / diams**s
        r_max = float(ratios.max())
        mass = mu.total_mass()
        ok = (mass >= floor) and (r_max <= cap)
        per.append((dlt, mass, r_max, "supported" if ok else "violated"))
        mass_min = min(mass_min, mass)
        ratio_max = max(ratio_max, r_max)
    evaluated = [q for q in per if q[3] != "skipped"]
    if not evaluated:
        raise ValueError("every delta was rejected by the construction threshold")
    verdict = (
        "supported" if all(q[3] == "supported" for q in evaluated) else "violated"
    )
    return LowerBoundCertificate(
        s=s,
        theta=theta,
        deltas=tuple(sorted(set(float(x) for x in deltas), reverse=True)),
        floor=floor,
        cap=cap,
        samples=samples,
        total_mass_min=mass_min,
        ratio_max=ratio_max,
        verdict=verdict,
        per_delta=tuple(per),
        skipped=tuple(skipped),
    )
