"""Shared estimate containers and the log-corrected extrapolation fit.

The per-scale optimal exponents s*(delta) produced by the cover estimators
carry a log correction, so they are fitted against

    s*(delta) = a + b / log(1/delta)

and ``a`` is reported as the extrapolated dimension.  The 1/log correction
form is a modelling choice (flagged in output); a plain log-log slope would
be biased at practically reachable scales.
"""

import math
from dataclasses import dataclass, field

import numpy as np

__all__ = ["PerDelta", "EstimateResult", "fit_log_correction"]

FIT_MODEL = "a + b/log(1/delta)"


@dataclass(frozen=True)
class PerDelta:
    """Diagnostics for one ladder scale."""

    delta: float
    s_star: float
    cutoff_used: float  # inner split radius (clouds) or cutoff index M (covers)
    cost_residual: float


@dataclass(frozen=True)
class EstimateResult:
    """Extrapolated dimension estimate with per-scale diagnostics."""

    theta: float
    per_delta: tuple
    extrapolated: float
    fit: dict = field(compare=False)
    target: float = None

    def s_stars(self):
        return np.array([pd.s_star for pd in self.per_delta])

    def deltas(self):
        return np.array([pd.delta for pd in self.per_delta])

    def monotonicity_violation(self):
        """Largest increase of s* towards finer delta (0 for clean runs)."""
        s = self.s_stars()
        return float(max(0.0, np.max(s[1:] - s[:-1]))) if s.size > 1 else 0.0

    def to_csv(self):
        lines = ["theta,delta,s_star,inner_radius,cost_residual"]
        for pd in self.per_delta:
            lines.append(
                f"{self.theta:.12g},{pd.delta:.12g},{pd.s_star:.12g},"
                f"{pd.cutoff_used:.12g},{pd.cost_residual:.12g}"
            )
        target = "nan" if self.target is None else f"{self.target:.12g}"
        lines.append(
            f"extrapolated={self.extrapolated:.12g} target={target} "
            f"rmse={self.fit['rmse']:.12g} model={self.fit['model']}"
        )
        return "\n".join(lines) + "\n"

    @staticmethod
    def from_csv(text):
        lines = [ln for ln in text.strip().splitlines() if ln]
        if lines[0] != "theta,delta,s_star,inner_radius,cost_residual":
            raise ValueError(f"bad estimate header: {lines[0]!r}")
        per, theta = [], 0.0
        for ln in lines[1:-1]:
            t, dlt, s, r, c = (float(v) for v in ln.split(","))
            theta = t
            per.append(PerDelta(dlt, s, r, c))
        trailer = dict(kv.split("=", 1) for kv in lines[-1].split())
        target = None if trailer["target"] == "nan" else float(trailer["target"])
        a, b = _refit([p.delta for p in per], [p.s_star for p in per])
        fit = {"model": trailer["model"], "a": a, "b": b, "rmse": float(trailer["rmse"])}
        return EstimateResult(theta, tuple(per), float(trailer["extrapolated"]), fit, target)


def _refit(deltas, s_stars):
    x = 1.0 / np.log(1.0 / np.asarray(deltas, dtype=float))
    coef = np.polyfit(x, np.asarray(s_stars, dtype=float), 1)
    return float(coef[1]), float(coef[0])


def fit_log_correction(deltas, s_stars):
    """Least-squares fit of s* = a + b/log(1/delta); returns the fit record."""
    deltas = np.asarray(deltas, dtype=float)
    s = np.asarray(s_stars, dtype=float)
    if deltas.size < 2:
        raise ValueError("need at least two scales to extrapolate")
    x = 1.0 / np.log(1.0 / deltas)
    b, a = np.polyfit(x, s, 1)
    resid = s - (a + b * x)
    rmse = float(math.sqrt(float(np.mean(resid**2))))
    return {"model": FIT_MODEL, "a": float(a), "b": float(b), "rmse": rmse}
