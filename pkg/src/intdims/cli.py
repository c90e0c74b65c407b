"""Command-line front end.

Flat key=value token grammar (no nesting), e.g.::

    intdims formula family=concentric d=2 p=0.5 thetas=0:1:0.1 out=profile.csv
    intdims estimate family=fp p=1 theta=1 deltas=2^-8..2^-20 budget=10^7
    intdims identities p=0.5 q=1 d=2

Exit codes: 0 ok, 2 usage error, 3 resource refusal, 4 internal invariant
violation.  All CSV output uses '.' decimals, LF line endings, UTF-8.
Identical configurations produce byte-identical outputs.
"""

import sys
from dataclasses import dataclass, field

from . import boxcount, covergen, formula, massdist
from .setlib import BudgetError, CountRule, RadiusSequence, SetSpec, sample

__all__ = ["main", "run", "RunConfig", "UsageError", "parse_spec_tokens"]

COMMANDS = ("generate", "formula", "cover", "estimate", "verify-mass", "profile", "identities")


class UsageError(ValueError):
    def __init__(self, message, token=None):
        super().__init__(message if token is None else f"{message} (token: {token!r})")
        self.token = token


@dataclass
class RunConfig:
    """Validated invocation of one CLI command (always seed-free)."""

    command: str
    spec: SetSpec = None
    thetas: tuple = ()
    deltas: tuple = ()
    budget: int = 10**6
    samples: int = 10**4
    s: float = None
    delta: float = None
    theta: float = None
    truncation: float = None
    inner_radius: float = 0.0
    out: str = None
    extras: dict = field(default_factory=dict)


# ---------------------------------------------------------------------------
# Token parsing
# ---------------------------------------------------------------------------

def _tokens_to_dict(tokens):
    kv = {}
    for tok in tokens:
        if "=" not in tok:
            raise UsageError("expected key=value", tok)
        k, v = tok.split("=", 1)
        if not k or not v:
            raise UsageError("expected key=value", tok)
        if k in kv:
            raise UsageError("duplicate key", tok)
        kv[k] = v
    return kv


def _num(text, token):
    """Parse a number in plain, scientific, 10^k, or 2^-k notation."""
    try:
        if "^" in text:
            base, expo = text.split("^", 1)
            return float(base) ** float(expo)
        return float(text)
    except ValueError:
        raise UsageError("cannot parse number", token) from None


def _int(text, token):
    v = _num(text, token)
    if abs(v - round(v)) > 1e-9:
        raise UsageError("expected an integer", token)
    return int(round(v))


def parse_spec_tokens(kv):
    """Build a SetSpec from the flat key=value dictionary (keys are consumed)."""
    family = kv.pop("family", None)
    if family is None:
        raise UsageError("missing family=...", "family")
    try:
        if family == "fp":
            return SetSpec.fp(_num(kv.pop("p"), "p"))
        if family == "concentric":
            d = _int(kv.pop("d", "2"), "d")
            radii_kind = kv.pop("radii", "power")
            if radii_kind == "power":
                seq = RadiusSequence.power(_num(kv.pop("p"), "p"))
            elif radii_kind == "geometric":
                seq = RadiusSequence.geometric(_num(kv.pop("q"), "q"))
            elif radii_kind == "log":
                seq = RadiusSequence.logarithmic()
            elif radii_kind.startswith("table:"):
                vals = [float(v) for v in radii_kind[len("table:"):].split(";")]
                seq = RadiusSequence.from_table(vals)
            else:
                raise UsageError("unknown radii kind", f"radii={radii_kind}")
            return SetSpec.concentric(d, seq)
        if family == "spiral":
            return SetSpec.spiral(_num(kv.pop("p"), "p"))
        if family == "elliptical":
            return SetSpec.elliptical(_num(kv.pop("p"), "p"), _num(kv.pop("q"), "q"))
        if family == "sine":
            return SetSpec.product_sine(_num(kv.pop("p"), "p"))
        if family == "attenuated":
            return SetSpec.attenuated_sine(_num(kv.pop("p"), "p"), _num(kv.pop("q"), "q"))
        if family == "points":
            rule_text = kv.pop("count", "constant:1")
            if ":" not in rule_text:
                raise UsageError("count rule needs kind:value", f"count={rule_text}")
            kind, val = rule_text.split(":", 1)
            kind = {"constant": "constant", "powersum": "power_sum",
                    "exponential": "exponential"}.get(kind)
            if kind is None:
                raise UsageError("unknown count rule", f"count={rule_text}")
            return SetSpec.isolated_points(_num(kv.pop("p"), "p"), CountRule(kind, float(val)))
    except KeyError as exc:
        raise UsageError(f"family {family!r} needs parameter {exc.args[0]}", exc.args[0]) from None
    except ValueError as exc:
        if isinstance(exc, UsageError):
            raise
        raise UsageError(str(exc), f"family={family}") from None
    raise UsageError("unknown family", f"family={family}")


def _parse_thetas(text, token):
    """Grid syntax a:b:step, inclusive of both ends."""
    parts = text.split(":")
    if len(parts) != 3:
        raise UsageError("theta grid must be a:b:step", token)
    a, b, step = (_num(p, token) for p in parts)
    if step <= 0 or b < a:
        raise UsageError("bad theta grid", token)
    vals = []
    k = 0
    while True:
        v = a + k * step
        if v > b + 1e-12:
            break
        vals.append(round(v, 12))
        k += 1
    if vals[-1] != b:
        vals.append(b)
    return tuple(vals)


def _parse_deltas(text, token):
    """Ladder syntax 2^-a..2^-b (optionally :stride on the exponent)."""
    stride = 1
    if ":" in text:
        text, stride_text = text.rsplit(":", 1)
        stride = _int(stride_text, token)
    if ".." not in text:
        return tuple(sorted((_num(t, token) for t in text.split(",")), reverse=True))
    lo_text, hi_text = text.split("..", 1)
    for t in (lo_text, hi_text):
        if not t.startswith("2^"):
            raise UsageError("delta ladder must look like 2^-8..2^-20", token)
    e0 = -_int(lo_text[2:], token)
    e1 = -_int(hi_text[2:], token)
    if e0 > e1:
        e0, e1 = e1, e0
    return tuple(2.0 ** (-e) for e in range(e0, e1 + 1, stride))


def parse_config(argv):
    if not argv:
        raise UsageError(f"usage: intdims <command> key=value...; commands: {', '.join(COMMANDS)}")
    command, *tokens = argv
    if command in ("-h", "--help", "help"):
        raise UsageError(__doc__)
    if command not in COMMANDS:
        raise UsageError("unknown command", command)
    kv = _tokens_to_dict(tokens)
    cfg = RunConfig(command=command)
    if command in ("generate", "formula", "cover", "estimate", "verify-mass", "profile"):
        cfg.spec = parse_spec_tokens(kv)
    for key in list(kv):
        val = kv.pop(key)
        tok = f"{key}={val}"
        if key == "thetas":
            cfg.thetas = _parse_thetas(val, tok)
        elif key == "theta":
            cfg.theta = _num(val, tok)
        elif key == "deltas":
            cfg.deltas = _parse_deltas(val, tok)
        elif key == "delta":
            cfg.delta = _num(val, tok)
        elif key == "budget":
            cfg.budget = _int(val, tok)
        elif key == "samples":
            cfg.samples = _int(val, tok)
        elif key == "s":
            cfg.s = _num(val, tok)
        elif key == "truncation":
            cfg.truncation = _num(val, tok)
        elif key == "inner_radius":
            cfg.inner_radius = _num(val, tok)
        elif key == "out":
            cfg.out = val
        elif key in ("p", "q", "d", "floor", "cap"):
            cfg.extras[key] = _num(val, tok)
        else:
            raise UsageError("unknown key", tok)
    return cfg


# ---------------------------------------------------------------------------
# Command implementations
# ---------------------------------------------------------------------------

def _emit(cfg, text, suffix=None):
    if cfg.out is None:
        sys.stdout.write(text)
        return
    path = cfg.out if suffix is None else cfg.out + suffix
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


def _theta_grid(cfg):
    if cfg.thetas:
        return formula.ThetaGrid(cfg.thetas)
    if cfg.theta is not None:
        return formula.ThetaGrid((cfg.theta,))
    raise UsageError("need thetas=a:b:step or theta=value", "thetas")


def _cmd_generate(cfg):
    trunc = cfg.truncation if cfg.truncation is not None else 0.05
    cloud = sample(cfg.spec, cfg.budget, trunc)
    d = cloud.points.shape[1]
    lines = [",".join(f"x{i + 1}" for i in range(d))]
    for row in cloud.points:
        lines.append(",".join(f"{v:.17g}" for v in row))
    _emit(cfg, "\n".join(lines) + "\n")
    return 0


def _cmd_formula(cfg):
    grid = _theta_grid(cfg)
    prof = formula.profile_for(cfg.spec, grid)
    _emit(cfg, prof.to_csv())
    return 0


def _cmd_cover(cfg):
    if cfg.delta is None or cfg.theta is None:
        raise UsageError("cover needs delta=... and theta=...", "delta")
    s = cfg.s
    if s is None:
        s = formula.formula_value(cfg.spec, cfg.theta)
        if s is None:
            raise UsageError("no formula value for this family: pass s=...", "s")
        s = min(max(s + 0.05, 1e-6), max(cfg.spec.d, 2))
    counts = covergen.build_theorem_cover(cfg.spec, cfg.delta, cfg.theta, s)
    cost = covergen.cover_cost(counts, cfg.delta, cfg.theta, s)
    text = counts.to_flat_text() + f"cost_at_s={cost:.12g}\ns={s:.12g}\n"
    trunc = cfg.truncation if cfg.truncation is not None else 0.05
    cloud = sample(cfg.spec, min(cfg.budget, 10**6), trunc)
    cover = covergen.enumerate_grid_cover(cloud, cfg.delta, cfg.theta, cfg.inner_radius)
    if cfg.out is None:
        _emit(cfg, text + cover.to_csv())
    else:
        _emit(cfg, text, suffix=".counts.txt")
        _emit(cfg, cover.to_csv(), suffix=".cover.csv")
    return 0


def _cmd_estimate(cfg):
    if cfg.theta is None or not cfg.deltas:
        raise UsageError("estimate needs theta=... and deltas=...", "theta")
    res = boxcount.estimate_dimension(cfg.spec, cfg.theta, cfg.deltas, cfg.budget)
    _emit(cfg, res.to_csv())
    return 0


def _measure_family(spec, theta):
    """(builder, proof mass floor, proof ratio cap) for the spec's measure."""
    fam = spec.family
    if fam == "concentric" and spec.radii.kind == "power":
        d, p = spec.d, spec.radii.p
        build = lambda delta, s: massdist.build_mu_concentric(d, p, theta, s, delta)
        return build, massdist.concentric_mass_floor(d, p), massdist.concentric_ratio_cap(d, p)
    if fam == "isolated_points":
        build = lambda delta, s: massdist.build_mu_points_example(spec.p, theta, delta)
        return build, 1.0 - 1e-9, massdist.points_ratio_cap(spec.p)
    if fam == "attenuated_sine":
        build = lambda delta, s: massdist.build_mu_sine(spec.p, spec.q, theta, s, delta)
        return build, massdist.sine_mass_floor(spec.p, spec.q), massdist.sine_ratio_cap(spec.p)
    raise UsageError(f"no measure construction for family {fam!r}", f"family={fam}")


def _cmd_verify_mass(cfg):
    if cfg.theta is None or not cfg.deltas:
        raise UsageError("verify-mass needs theta=... and deltas=...", "theta")
    build, floor, cap = _measure_family(cfg.spec, cfg.theta)
    s = cfg.s
    if s is None:
        s = formula.formula_value(cfg.spec, cfg.theta)
        if s is None:
            s = 0.5  # the isolated-point example certifies 1/2
    floor = cfg.extras.get("floor", floor * 0.99)
    cap = cfg.extras.get("cap", cap * 1.1)
    cert = massdist.verify_mass_distribution(
        build, s, cfg.theta, cfg.deltas, cfg.samples, floor, cap
    )
    _emit(cfg, cert.to_flat_text())
    return 0


def _cmd_profile(cfg):
    grid = _theta_grid(cfg)
    deltas = cfg.deltas or tuple(2.0 ** (-e) for e in range(8, 19, 2))
    lines = ["theta,formula,cover_upper,measure_lower,lower_verdict"]
    for theta in grid:
        f_val = formula.formula_value(cfg.spec, theta)
        f_text = "" if f_val is None else f"{f_val:.12g}"
        if theta == 0.0:
            lines.append(f"{theta:.12g},{f_text},,,")
            continue
        try:
            upper = covergen.upper_dim_estimate(cfg.spec, theta, deltas).extrapolated
            u_text = f"{upper:.12g}"
        except ValueError:
            u_text = ""
        low_text, verdict = "", ""
        if f_val is not None:
            try:
                build, floor, cap = _measure_family(cfg.spec, theta)
                cert = massdist.verify_mass_distribution(
                    build, f_val, theta, deltas, max(1000, cfg.samples // 10),
                    floor * 0.99, cap * 1.1,
                )
                verdict = cert.verdict
                if cert.verdict == "supported":
                    low_text = f"{f_val:.12g}"
            except (UsageError, ValueError):
                pass
        lines.append(f"{theta:.12g},{f_text},{u_text},{low_text},{verdict}")
    _emit(cfg, "\n".join(lines) + "\n")
    return 0


def _cmd_identities(cfg):
    grid = formula.ThetaGrid(cfg.thetas or tuple(i / 10 for i in range(11)))
    if cfg.extras:
        combos = [(
            cfg.extras.get("p", 0.5),
            cfg.extras.get("q", max(1.0, cfg.extras.get("p", 0.5))),
            int(cfg.extras.get("d", 2)),
        )]
    else:
        combos = [(p, q, d) for p in (0.25, 0.5, 0.9, 1.5) for q in (0.5, 1.0, 2.0)
                  for d in (2, 3, 4) if q >= p]
    lines = []
    all_ok = True
    for p, q, d in combos:
        ok_c = all(
            abs((formula.dim_concentric(d, p, t) - (d - 1))
                - (formula.dim_attenuated(p, float(d - 1), t) - 1.0)) <= 1e-12
            for t in grid
        )
        ok_s = all(
            abs(formula.dim_elliptical(p, q, t) - formula.dim_attenuated(q, p / q, t)) <= 1e-12
            for t in grid
        )
        prefix = f"p={p:g} q={q:g} d={d} " if len(combos) > 1 else ""
        lines.append(f"{prefix}C-vs-T: {'pass' if ok_c else 'fail'}")
        lines.append(f"{prefix}S-vs-T: {'pass' if ok_s else 'fail'}")
        all_ok = all_ok and ok_c and ok_s
    _emit(cfg, "\n".join(lines) + "\n")
    return 0 if all_ok else 4


_DISPATCH = {
    "generate": _cmd_generate,
    "formula": _cmd_formula,
    "cover": _cmd_cover,
    "estimate": _cmd_estimate,
    "verify-mass": _cmd_verify_mass,
    "profile": _cmd_profile,
    "identities": _cmd_identities,
}


def run(config):
    """Execute a validated RunConfig; returns the process exit status."""
    return _DISPATCH[config.command](config)


def main(argv=None):
    argv = sys.argv[1:] if argv is None else list(argv)
    try:
        cfg = parse_config(argv)
        return run(cfg)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 2
    except (BudgetError, massdist.MeasureThresholdError) as exc:
        print(f"resource refusal: {exc}", file=sys.stderr)
        return 3
    except Exception as exc:  # invariant violation or bad internal state
        print(f"internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 4


if __name__ == "__main__":
    sys.exit(main())
