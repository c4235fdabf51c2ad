"""
Command-line front end.

    qengine point    --kind coherent --gamma0 0.01 --wh 10 --wc 5 --bh 0.01 --bc 0.8 --alpha 0.8
    qengine sweep    --vary alpha:1e-3:1:100:log [--vary beta_c:...] --out sweep.csv
    qengine figure   Fig4b --out fig4b.csv
    qengine validate --seed 42 --samples 200

Settings resolve as flags > config file (``--config``) > defaults.  The
config file holds one ``key = value`` per line; ``#`` starts a comment.
Keys are the long flag names without dashes (``gamma0``, ``wh``, ``bc``,
``vary``, ...).  Several axes go into one ``vary`` value separated by
commas.

Exit codes: 0 ok, 1 validation failure, 2 usage or parameter error,
3 not an engine.
"""

import argparse
import json
import sys
import time

import numpy as np

from . import bounds, engine, fcs, steady
from .engine import EngineKind, EngineParams, InvalidParameters, NotAnEngine

CSV_COLUMNS = (
    "kind", "gamma0", "omega_h", "omega_c", "beta_h", "beta_c", "alpha", "n_h", "n_c", "valid",
    "coherence", "power", "j_hot", "j_cold", "efficiency", "entropy_rate", "var_power", "nsr",
    "F_p", "fano", "q_ctur", "upsilon", "psi", "f_qtur", "slack",
)
CSV_SCHEMA_VERSION = 1

DEFAULTS = {
    "kind": None,
    "gamma0": 0.01,
    "wh": 10.0,
    "wc": 5.0,
    "bh": 0.01,
    "bc": 0.8,
    "alpha": 0.8,
    "out": None,
    "seed": 0,
    "samples": 200,
    "method": "numeric",
    "vary": None,
}
FLOAT_KEYS = ("gamma0", "wh", "wc", "bh", "bc", "alpha")
AXES = {"alpha": "alpha", "beta_c": "beta_c", "beta_h": "beta_h"}

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_NOT_ENGINE = 0, 1, 2, 3


class UsageError(Exception):
    pass


# -- configuration ---------------------------------------------------------

def read_config(path):
    """Parse a flat ``key = value`` file into a dict of strings."""
    out = {}
    try:
        with open(path, encoding="utf-8") as fh:
            lines = fh.read().splitlines()
    except OSError as e:
        raise UsageError("cannot read config %s: %s" % (path, e)) from None
    for n, line in enumerate(lines, 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError("%s:%d: expected key = value" % (path, n))
        key, value = (s.strip() for s in line.split("=", 1))
        if key not in DEFAULTS:
            raise UsageError("%s:%d: unknown key %r" % (path, n, key))
        out[key] = value
    return out


def resolve(args, defaults=None):
    """Merge flags, config file and defaults into one settings dict."""
    settings = dict(DEFAULTS if defaults is None else defaults)
    if getattr(args, "config", None):
        settings.update(read_config(args.config))
    for key in DEFAULTS:
        v = getattr(args, key, None)
        if v is not None:
            settings[key] = v
    try:
        for key in FLOAT_KEYS:
            settings[key] = float(settings[key])
        settings["seed"] = int(settings["seed"])
        settings["samples"] = int(settings["samples"])
    except ValueError as e:
        raise UsageError(str(e)) from None
    return settings


def kinds_of(value, default):
    value = (value or default).lower()
    if value == "both":
        return [EngineKind.COHERENT, EngineKind.INCOHERENT]
    try:
        return [EngineKind(value)]
    except ValueError:
        raise UsageError("unknown kind %r" % value) from None


def params_of(settings, kind, **override):
    d = dict(gamma0=settings["gamma0"], omega_h=settings["wh"], omega_c=settings["wc"],
             beta_h=settings["bh"], beta_c=settings["bc"], alpha=settings["alpha"], kind=kind)
    d.update(override)
    return EngineParams(**d)


# -- formatting ------------------------------------------------------------

def fmt(x):
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, str):
        return x
    return "%.17e" % x


def write_csv(fh, header, rows, comments=()):
    fh.write(",".join(header) + "\n")
    for row in rows:
        fh.write(",".join(fmt(v) for v in row) + "\n")
    for c in comments:
        fh.write("# " + c + "\n")


def json_value(x):
    if isinstance(x, (bool, np.bool_)):
        return bool(x)
    if isinstance(x, (int, np.integer)):
        return int(x)
    if isinstance(x, str) or x is None:
        return x
    x = float(x) + 0.0  # no negative zero
    if np.isfinite(x):
        return x
    return "nan" if np.isnan(x) else ("inf" if x > 0 else "-inf")


# -- rows ------------------------------------------------------------------

NAN = float("nan")


def row_numeric(p):
    """
    One CSV row (as a list) computed through the numerical routes.

    A point where a numerical route fails keeps ``valid`` true and reports
    NaN in every derived column; ``cmd_sweep`` counts such rows.
    """
    n_h, n_c = engine.occupations(p)
    head = [p.kind.value, p.gamma0, p.omega_h, p.omega_c, p.beta_h, p.beta_c, p.alpha, n_h, n_c]
    if not p.is_engine:
        return head + [False] + [NAN] * (len(CSV_COLUMNS) - 10)
    try:
        return head + [True] + _derived_numeric(p, n_c)
    except (ArithmeticError, np.linalg.LinAlgError):
        return head + [True] + [NAN] * (len(CSV_COLUMNS) - 10)


def _derived_numeric(p, n_c):
    obs = steady.observables(p)
    fr = bounds.fano(p)
    ups, psi, f = bounds.qtur_bound(p)
    try:
        cum = fcs.cumulants(p, fcs.CountedObservable.POWER)
        var, nsr = cum.variance, cum.nsr
    except fcs.ZeroMean:
        var, nsr = 0.0, NAN
    entropy = np.inf if n_c == 0 else obs.entropy_rate
    q = entropy * nsr if nsr == nsr else NAN
    return [obs.coherence, obs.power, obs.j_hot, obs.j_cold, obs.efficiency, entropy,
            var, nsr, fr.f_pop, fr.f_total, q, ups, psi, f, nsr - f]


def rows_closed(kind, g0, w_h, w_c, b_h, b_c, alpha):
    """Closed-form columns on broadcast arrays; returns a dict column -> array."""
    g0, w_h, w_c, b_h, b_c, alpha = np.broadcast_arrays(*(np.asarray(x, dtype=float)
                                                        for x in (g0, w_h, w_c, b_h, b_c, alpha)))
    n_h = engine._bose(b_h * w_h)
    n_c = engine._bose(b_c * w_c)
    valid = b_h * w_h < b_c * w_c
    dw = w_h - w_c
    with np.errstate(divide="ignore", invalid="ignore"):
        coh = steady.coherence_formula(kind, g0, n_h, n_c, alpha)
        power = -alpha * dw * coh
        nsr = fcs.nsr_formula(kind, g0, n_h, n_c, alpha)
        fano = fcs.fano_formula(kind, g0, n_h, n_c, alpha)
        bias = steady.log_bias(n_h, n_c)
        inv_f = bounds.inv_f_formula(kind, g0, n_h, n_c, alpha)
        ups = bounds.upsilon_formula(kind, g0, n_h, n_c, alpha)
        cols = {
            "kind": np.full(g0.shape, EngineKind(kind).value, dtype=object),
            "gamma0": g0, "omega_h": w_h, "omega_c": w_c, "beta_h": b_h, "beta_c": b_c,
            "alpha": alpha, "n_h": n_h, "n_c": n_c, "valid": valid,
            "coherence": coh, "power": power, "j_hot": alpha * w_h * coh, "j_cold": -alpha * w_c * coh,
            "efficiency": 1.0 - w_c / w_h, "entropy_rate": bias * np.abs(power) / dw,
            "var_power": nsr * power ** 2, "nsr": nsr, "F_p": fcs.population_fano(n_h, n_c),
            "fano": fano, "q_ctur": bias * fano, "upsilon": ups, "psi": inv_f - ups,
            "f_qtur": 1.0 / inv_f, "slack": nsr - 1.0 / inv_f,
        }
    for name in CSV_COLUMNS[10:]:
        cols[name] = np.where(valid, cols[name], np.nan)
    zero = alpha == 0
    for name in ("nsr", "q_ctur", "slack"):
        cols[name] = np.where(zero, np.nan, cols[name])
    cols["var_power"] = np.where(zero & valid, 0.0, cols["var_power"])
    return cols


def table_rows(cols, extra=()):
    names = list(CSV_COLUMNS) + list(extra)
    flat = {k: np.ravel(cols[k]) for k in names}
    n = len(flat["kind"])
    for i in range(n):
        yield [flat[k][i] if k in ("kind",) else (bool(flat[k][i]) if k == "valid" else float(flat[k][i]))
               for k in names]


# -- sweeps ----------------------------------------------------------------

def parse_axis(text):
    """``name:start:stop:count[:log|lin]`` -> (name, grid)."""
    parts = text.split(":")
    if len(parts) not in (4, 5):
        raise UsageError("axis %r: expected name:start:stop:count[:log|lin]" % text)
    name = parts[0].strip()
    if name not in AXES:
        raise UsageError("axis %r: can only vary %s" % (name, ", ".join(AXES)))
    try:
        start, stop, count = float(parts[1]), float(parts[2]), int(parts[3])
    except ValueError:
        raise UsageError("axis %r: bad number" % text) from None
    spacing = parts[4].strip() if len(parts) == 5 else "lin"
    if count < 2:
        raise UsageError("axis %r: count must be >= 2" % name)
    if not (start > 0 and stop > 0 and np.isfinite(start) and np.isfinite(stop)):
        raise UsageError("axis %r: range must be positive" % name)
    if spacing == "log":
        grid = np.geomspace(start, stop, count)
    elif spacing == "lin":
        grid = np.linspace(start, stop, count)
    else:
        raise UsageError("axis %r: spacing must be log or lin" % name)
    return name, grid


def sweep_axes(values):
    if isinstance(values, str):
        values = [v for v in values.split(",") if v.strip()]
    axes = [parse_axis(v) for v in values or ()]
    if not 1 <= len(axes) <= 2:
        raise UsageError("a sweep needs one or two --vary axes")
    if len(axes) == 2 and axes[0][0] == axes[1][0]:
        raise UsageError("the two axes must differ")
    return axes


def sweep_points(settings, axes):
    """Grid points in row-major order of the first axis."""
    grids = np.meshgrid(*[g for _, g in axes], indexing="ij")
    names = [n for n, _ in axes]
    pts = []
    for idx in np.ndindex(grids[0].shape):
        pts.append({n: float(g[idx]) for n, g in zip(names, grids)})
    return pts


def cmd_sweep(args):
    settings = resolve(args)
    kinds = kinds_of(settings["kind"], "both")
    axes = sweep_axes(args.vary or settings["vary"])
    points = sweep_points(settings, axes)
    method = settings["method"]
    if method not in ("numeric", "closed"):
        raise UsageError("method must be numeric or closed")
    # every point has to be parameter-valid; engine-invalid points are fine
    params = []
    for kind in kinds:
        for pt in points:
            try:
                params.append(params_of(settings, kind, **pt))
            except InvalidParameters as e:
                raise UsageError("grid point %s: %s" % (pt, e)) from None
    if method == "closed":
        rows = []
        for kind in kinds:
            block = [p for p in params if p.kind is kind]
            cols = rows_closed(kind, *[[getattr(p, a) for p in block] for a in
                                       ("gamma0", "omega_h", "omega_c", "beta_h", "beta_c", "alpha")])
            rows.extend(table_rows(cols))
    else:
        rows = [row_numeric(p) for p in params]
    comments = ["schema v%d" % CSV_SCHEMA_VERSION, "method %s" % method]
    failed = sum(1 for r in rows if r[9] and r[10] != r[10])
    if failed:
        comments.append("degenerate rows (numerical route failed): %d" % failed)
    comments += ["axis %s: %d points %.17e .. %.17e" % (n, len(g), g[0], g[-1]) for n, g in axes]
    _emit(settings["out"], CSV_COLUMNS, rows, comments)
    return EXIT_OK


def _emit(out, header, rows, comments):
    if out:
        with open(out, "w", encoding="utf-8", newline="\n") as fh:
            write_csv(fh, header, rows, comments)
    else:
        write_csv(sys.stdout, header, rows, comments)


# -- point -----------------------------------------------------------------

def point_report(p):
    """JSON-ready dict for one operating point (key order is part of the interface)."""
    p.require_engine()
    r = engine.rates(p)
    rho = steady.steady_numeric(engine.liouvillian(p))
    obs = steady.observables(p, rho)
    zero = p.alpha == 0
    cums = {}
    for o in fcs.CountedObservable:
        if zero:
            cums[o.value] = {"mean": 0.0, "variance": 0.0, "nsr": "ZeroMean"}
        else:
            c = fcs.cumulants(p, o)
            cums[o.value] = {"mean": c.mean, "variance": c.variance, "nsr": c.nsr}
    fr = bounds.fano(p)
    ups, psi, f = bounds.qtur_bound(p)
    if zero:
        tur = {"q_value": "ZeroMean", "nsr": "ZeroMean", "entropy_rate": obs.entropy_rate,
               "upsilon": ups, "psi": psi, "f_bound": f, "slack": "ZeroMean",
               "ctur_violated": None, "qtur_ok": None, "infinite_entropy": r.n_c == 0}
    else:
        t = bounds.tur_report(p)
        tur = {k: getattr(t, k) for k in ("q_value", "nsr", "entropy_rate", "upsilon", "psi", "f_bound",
                                          "slack", "ctur_violated", "qtur_ok", "infinite_entropy")}
    out = {
        "occupations": {"n_h": r.n_h, "n_c": r.n_c},
        "rates": ({"gamma1": r.gamma1, "gamma2": r.gamma2} if p.kind is EngineKind.COHERENT
                  else {"g1": r.g1, "g2": r.g2, "g3": r.g3, "g4": r.g4}),
        "steady_state": {"re": rho.real.tolist(), "im": rho.imag.tolist()},
        "observables": {k: getattr(obs, k) for k in ("power", "j_hot", "j_cold", "efficiency", "photon_flux",
                                                     "entropy_rate", "coherence", "degenerate_bath")},
        "cumulants": cums,
        "fano": {"f_total": fr.f_total, "f_pop": fr.f_pop, "coherent_correction": fr.coherent_correction},
        "tur": tur,
    }
    return _jsonify(out)


def _jsonify(obj):
    if isinstance(obj, dict):
        return {k: _jsonify(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonify(v) for v in obj]
    return json_value(obj)


def cmd_point(args):
    settings = resolve(args)
    kinds = kinds_of(settings["kind"], "coherent")
    try:
        reports = {k.value: point_report(params_of(settings, k)) for k in kinds}
    except InvalidParameters as e:
        raise UsageError(str(e)) from None
    out = reports[kinds[0].value] if len(kinds) == 1 else reports
    text = json.dumps(out, indent=2) + "\n"
    if settings["out"]:
        with open(settings["out"], "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


# -- figures ---------------------------------------------------------------

FIG_BASE = dict(gamma0=0.01, omega_h=10.0, omega_c=5.0)
ALPHA_GRID = dict(start=1e-3, stop=1.0, count=400)
BETA_C_COUNT = 100

PRESETS = {
    "Fig2a": dict(beta_h=0.01, beta_c=0.8),
    "Fig2b": dict(beta_h=0.001, beta_c=None),
    "Fig3a": dict(beta_h=0.001, beta_c=None),
    "Fig3b": dict(beta_h=0.01, beta_c=0.8),
    "Fig3c": dict(beta_h=0.01, beta_c=3.0),
    "Fig4a": dict(beta_h=0.01, beta_c=0.1),
    "Fig4b": dict(beta_h=0.003, beta_c=0.7),
    "AlphaCrit": dict(beta_h=0.001, beta_c=None),
}


def _alpha_grid():
    return np.geomspace(ALPHA_GRID["start"], ALPHA_GRID["stop"], ALPHA_GRID["count"])


def _beta_c_grid(beta_h):
    lo = 1.5 * beta_h * FIG_BASE["omega_h"] / FIG_BASE["omega_c"]
    return np.geomspace(lo, 0.1, BETA_C_COUNT)


def _window(alpha, mask):
    if not mask.any():
        return "none"
    return "[%.6g, %.6g]" % (alpha[mask].min(), alpha[mask].max())


def figure_data(name):
    """
    Build a preset's dataset from the closed forms.

    Returns (extra column names, {kind: columns}, headline lines, metadata lines).
    """
    spec = PRESETS[name]
    b_h = spec["beta_h"]
    g0, w_h, w_c = FIG_BASE["gamma0"], FIG_BASE["omega_h"], FIG_BASE["omega_c"]
    meta = ["preset %s" % name, "gamma0 %g omega_h %g omega_c %g beta_h %g" % (g0, w_h, w_c, b_h)]
    if name == "AlphaCrit":
        b_c = _beta_c_grid(b_h)
        n_h = engine._bose(b_h * w_h)
        n_c = engine._bose(b_c * w_c)
        a_cr = steady.critical_alpha_formula(g0, n_h, n_c)
        cols = {k: rows_closed(k, g0, w_h, w_c, b_h, b_c, a_cr) for k in EngineKind}
        for k in EngineKind:
            cols[k]["alpha_crit"] = a_cr
        meta.append("beta_c log grid %d points %.17e .. %.17e, alpha = alpha_crit(beta_c)"
                    % (len(b_c), b_c[0], b_c[-1]))
        gap = np.abs(cols[EngineKind.COHERENT]["coherence"] / cols[EngineKind.INCOHERENT]["coherence"] - 1)
        head = ["alpha_crit from %.6g to %.6g" % (a_cr.min(), a_cr.max()),
                "max |C_C/C_I - 1| at alpha_crit = %.3g" % gap.max()]
        return ["alpha_crit"], cols, head, meta
    alpha = _alpha_grid()
    meta.append("alpha log grid %d points %.17e .. %.17e" % (len(alpha), alpha[0], alpha[-1]))
    if spec["beta_c"] is None:
        b_c = _beta_c_grid(b_h)
        a_g, b_g = np.meshgrid(alpha, b_c, indexing="ij")
        meta.append("beta_c log grid %d points %.17e .. %.17e (row-major by alpha)"
                    % (len(b_c), b_c[0], b_c[-1]))
    else:
        a_g, b_g = alpha, np.full_like(alpha, spec["beta_c"])
        meta.append("beta_c %g" % spec["beta_c"])
    cols = {k: rows_closed(k, g0, w_h, w_c, b_h, b_g, a_g) for k in EngineKind}
    c, i = cols[EngineKind.COHERENT], cols[EngineKind.INCOHERENT]
    if name in ("Fig2a", "Fig2b"):
        ratio = c["power"] / i["power"]
        for k in cols:
            cols[k]["power_ratio"] = ratio
        j = int(np.nanargmax(ratio))
        head = ["max P_C/P_I = %.6g at alpha = %.6g, beta_c = %.6g" % (ratio.flat[j], a_g.flat[j], b_g.flat[j])]
        return ["power_ratio"], cols, head, meta
    if name == "Fig3a":
        ratio = i["nsr"] / c["nsr"]
        for k in cols:
            cols[k]["nsr_ratio"] = ratio
        j = int(np.nanargmax(ratio))
        head = ["max N_I/N_C = %.6g at alpha = %.6g, beta_c = %.6g" % (ratio.flat[j], a_g.flat[j], b_g.flat[j])]
        return ["nsr_ratio"], cols, head, meta
    if name in ("Fig3b", "Fig3c"):
        head = []
        for k in cols:
            rel = cols[k]["slack"] / cols[k]["f_qtur"]
            cols[k]["rel_slack"] = rel
            j = int(np.nanargmin(rel))
            head.append("min relative slack (%s) = %.6g at alpha = %.6g" % (k.value, rel[j], alpha[j]))
        return ["rel_slack"], cols, head, meta
    head = []
    for k in cols:
        q = cols[k]["q_ctur"]
        j = int(np.nanargmin(q))
        head.append("min q (%s) = %.6g at alpha = %.6g; cTUR violated for alpha in %s"
                    % (k.value, q[j], alpha[j], _window(alpha, q < 2)))
    return [], cols, head, meta


def cmd_figure(args):
    settings = resolve(args)
    name = args.preset
    if name not in PRESETS:
        raise UsageError("unknown preset %r (choose from %s)" % (name, ", ".join(PRESETS)))
    extra, cols, head, meta = figure_data(name)
    rows = []
    for k in EngineKind:
        rows.extend(table_rows(cols[k], extra))
    out = settings["out"] or "%s.csv" % name
    with open(out, "w", encoding="utf-8", newline="\n") as fh:
        write_csv(fh, list(CSV_COLUMNS) + list(extra), rows, ["schema v%d" % CSV_SCHEMA_VERSION] + meta)
    for line in head:
        print(line)
    print("wrote %d rows to %s" % (len(rows), out))
    return EXIT_OK


# -- validation ------------------------------------------------------------

def _rel(a, b):
    a, b = np.asarray(a), np.asarray(b)
    return float(np.max(np.abs(a - b) / np.maximum(np.abs(b), 1e-300)))


def validate_point(p):
    """Run every invariant at one engine point; returns a list of (check, excess) failures."""
    fails = []

    def check(name, value, tol):
        if not value <= tol:
            fails.append((name, value, tol))

    L = engine.liouvillian(p)
    d = engine.dimension(p.kind)
    check("trace preservation vec(I)^T L", float(np.abs(engine.vec(np.eye(d)) @ L).max()), 1e-13)
    rho = steady.steady_numeric(L)
    check("steady state vs closed form", float(np.abs(rho - steady.steady_closed(p)).max()), 1e-10)
    check("density matrix invariants", len(steady.state_violations(rho)), 0)
    obs = steady.observables(p, rho)
    check("energy balance", abs(obs.j_hot + obs.j_cold + obs.power) / abs(obs.power), 1e-10)
    check("entropy production >= 0", -obs.entropy_rate, 0.0)
    for o in fcs.CountedObservable:
        a, b = fcs.cumulants(p, o), fcs.cumulants_closed(p, o)
        check("cumulants %s vs closed form" % o.value,
              max(_rel(a.mean, b.mean), _rel(a.variance, b.variance)), 1e-8)
    flux = fcs.cumulants(p, fcs.CountedObservable.PHOTON_FLUX)
    check("Fano vs counting statistics", _rel(bounds.fano(p).f_total, flux.variance / flux.mean), 1e-8)
    lp = bounds.drazin(L, rho)
    proj = np.outer(engine.vec(rho), engine.vec(np.eye(d)))
    q = np.eye(d * d) - proj
    check("Drazin L L+ = I - P", float(np.abs(L @ lp - q).max()), 1e-10)
    check("Drazin L+ L = I - P", float(np.abs(lp @ L - q).max()), 1e-10)
    check("Drazin L+ P = 0", float(np.abs(lp @ proj).max()), 1e-10)
    check("Drazin vs closed form", float(np.abs(lp - bounds.drazin_closed(p)).max()), 1e-9)
    ups, psi, f = bounds.qtur_bound(p)
    check("1/f vs closed form", _rel(ups + psi, 1.0 / bounds.qtur_bound_closed(p)), 1e-8)
    nsr = fcs.cumulants(p, fcs.CountedObservable.POWER).nsr
    check("qTUR nsr >= f", f - nsr, 1e-9)
    n_h, n_c = engine.occupations(p)
    if n_c > 0:
        check("classical baseline ln(.) F_p >= 2",
              2 - float(steady.log_bias(n_h, n_c) * fcs.population_fano(n_h, n_c)), 0.0)
        qq, dd = bounds.ctur(p)
        check("q = d", _rel(qq, dd), 1e-8)
        a_cr = steady.critical_alpha(p)
        c_c = steady.coherence_formula(EngineKind.COHERENT, p.gamma0, n_h, n_c, a_cr)
        c_i = steady.coherence_formula(EngineKind.INCOHERENT, p.gamma0, n_h, n_c, a_cr)
        check("C_C = C_I at alpha_crit", _rel(c_c, c_i), 1e-10)
        check("alpha_crit vs bisection", _rel(a_cr, steady.critical_alpha_numeric(p)), 1e-10)
    return fails


def cmd_validate(args):
    settings = resolve(args)
    n = settings["samples"]
    if n < 1:
        raise UsageError("--samples must be >= 1")
    kinds = kinds_of(settings["kind"], "both")
    rng = np.random.default_rng(settings["seed"])
    t0 = time.perf_counter()
    failures, skipped, checked = [], 0, 0
    for _ in range(n):
        base = engine.random_params(rng, EngineKind.COHERENT, engine=False)
        for kind in kinds:
            p = base.with_(kind=kind)
            if not p.is_engine:
                skipped += 1
                continue
            checked += 1
            try:
                fails = validate_point(p)
            except Exception as e:  # a crash is a failure of that point
                fails = [("exception %s: %s" % (type(e).__name__, e), float("nan"), float("nan"))]
            failures.extend((p, *f) for f in fails)
    for p, name, value, tol in failures:
        print("FAIL %s: value %.3g tolerance %.3g at %s" % (name, value, tol, p))
    print("validate seed=%d samples=%d points=%d not-an-engine=%d failures=%d time=%.2fs"
          % (settings["seed"], n, checked, skipped, len(failures), time.perf_counter() - t0))
    return EXIT_FAIL if failures else EXIT_OK


# -- entry point -----------------------------------------------------------

def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--kind", choices=["coherent", "incoherent", "both"])
    for key, help_ in (("gamma0", "decay constant"), ("wh", "hot frequency omega_h"),
                       ("wc", "cold frequency omega_c"), ("bh", "hot inverse temperature"),
                       ("bc", "cold inverse temperature"), ("alpha", "drive amplitude")):
        common.add_argument("--" + key, type=float, help=help_)
    common.add_argument("--out", help="output path")
    common.add_argument("--config", help="flat key = value settings file")
    common.add_argument("--seed", type=int)

    parser = argparse.ArgumentParser(prog="qengine", description="Three-level quantum heat engines: "
                                     "steady states, counting statistics and uncertainty bounds.")
    sub = parser.add_subparsers(dest="command", required=True)
    p = sub.add_parser("point", parents=[common], help="JSON report for one operating point")
    p.set_defaults(func=cmd_point)
    p = sub.add_parser("sweep", parents=[common], help="CSV over a 1-D or 2-D grid")
    p.add_argument("--vary", action="append", metavar="NAME:START:STOP:COUNT[:log|lin]",
                   help="axis over alpha, beta_c or beta_h (give once or twice)")
    p.add_argument("--method", choices=["numeric", "closed"])
    p.set_defaults(func=cmd_sweep)
    p = sub.add_parser("figure", parents=[common], help="dataset behind a figure preset")
    p.add_argument("preset", help=", ".join(PRESETS))
    p.set_defaults(func=cmd_figure)
    p = sub.add_parser("validate", parents=[common], help="run the invariant suite on random points")
    p.add_argument("--samples", type=int)
    p.set_defaults(func=cmd_validate)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as e:
        print("qengine: error: %s" % e, file=sys.stderr)
        return EXIT_USAGE
    except InvalidParameters as e:
        print("qengine: invalid parameters: %s" % e, file=sys.stderr)
        return EXIT_USAGE
    except NotAnEngine as e:
        print("qengine: not an engine: %s" % e, file=sys.stderr)
        return EXIT_NOT_ENGINE


if __name__ == "__main__":
    sys.exit(main())
