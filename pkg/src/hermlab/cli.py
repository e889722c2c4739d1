"""Batch experiment driver.

Parses TOML scenario configs, wires the metric / function / q-profile
catalogs together, runs the verification scenarios, and writes growth-curve
CSVs plus a structured pass/fail report.

Exit codes: 0 all checks pass, 1 at least one check failed, 2 configuration
error.  CSV floats are serialized with 17 significant digits so reruns with
the same config and seed are byte-identical.
"""

from __future__ import annotations

import argparse
import dataclasses
import math
import os
import re
import sys
import time
from dataclasses import dataclass, field

import numpy as np
import scipy
import tomli

from . import __version__
from .comparison import (
    PROFILE_BUILDERS,
    compute_Iq,
    default_profiles,
    make_profile,
    solve_profile,
    verify_bounds,
)
from .geodesics import taylor_probe
from .geometry import (
    L_operator_routes,
    holomorphic_sectional_curvature,
    levi_civita_curvature,
    metric_jets,
    real_components,
    unit_vector,
)
from .growth import (
    convexity_check,
    counterexample_scenario,
    dimension_count,
    function_catalog,
    growth_curve,
    log_abs,
    max_principle_check,
    monotonicity_checks,
    ord_and_degree,
    psh_catalog,
    random_polynomial,
)
from .metrics import CHART_BUILDERS, CHART_PARAMS, default_charts, make_chart
from .numerics import DEFAULT_TOL

__all__ = ["main", "ConfigError", "ScenarioConfig", "CheckResult",
           "ReportDocument", "load_config", "run_scenario", "list_catalogs"]

SCENARIO_KINDS = (
    "curvature-equivalence",
    "comparison-ode",
    "geodesic-taylor",
    "three-circle",
    "monotonicity",
    "max-principle",
    "counterexample",
    "dimension-count",
)

OUT_DIR_ENV = "HERMLAB_OUT_DIR"


class ConfigError(ValueError):
    """Invalid or inconsistent scenario configuration."""


# ----------------------------------------------------------------------------
# configuration


@dataclass
class ScenarioConfig:
    """One validated [[scenario]] table."""

    kind: str
    name: str
    metric: dict | None = None          # {"name": ..., "params": {...}}
    functions: list = field(default_factory=list)
    profile: dict | None = None         # {"name": ..., "params": {...}}
    radii: dict | None = None           # {min, max, count, spacing}
    sampler: dict = field(default_factory=dict)
    tolerances: dict = field(default_factory=dict)

    def tolerance_bundle(self, scale=1.0):
        tol = dataclasses.replace(DEFAULT_TOL, **self.tolerances)
        return tol.scaled(scale) if scale != 1.0 else tol

    def radii_array(self, default_min, default_max, default_count):
        spec = self.radii or {}
        lo = float(spec.get("min", default_min))
        hi = float(spec.get("max", default_max))
        count = int(spec.get("count", default_count))
        spacing = spec.get("spacing", "geometric")
        if spacing == "geometric":
            return np.geomspace(lo, hi, count)
        return np.linspace(lo, hi, count)

    def charts(self):
        if self.metric is None:
            return default_charts()
        return [make_chart(self.metric["name"], **self.metric.get("params", {}))]

    def resolve_functions(self, n):
        """Map function specs to catalog entries for dimension n."""
        catalog = {f.name: f for f in function_catalog(n)}
        if not self.functions:
            return list(catalog.values())
        out = []
        for spec in self.functions:
            if "random" in spec:
                out.append(random_polynomial(n, **spec["random"]))
            else:
                name = spec.get("name")
                if name not in catalog:
                    raise ConfigError(
                        f"scenario {self.name!r}: unknown function {name!r} "
                        f"for n={n}; catalog: {sorted(catalog)}"
                    )
                out.append(catalog[name])
        return out


def _validate_scenario(raw, index):
    if not isinstance(raw, dict):
        raise ConfigError(f"scenario #{index} is not a table")
    kind = raw.get("kind")
    if kind not in SCENARIO_KINDS:
        raise ConfigError(
            f"scenario #{index}: unknown kind {kind!r}; "
            f"one of {', '.join(SCENARIO_KINDS)}"
        )
    name = raw.get("name", f"{kind}-{index}")
    metric = raw.get("metric")
    if metric is not None:
        if metric.get("name") not in CHART_BUILDERS:
            raise ConfigError(
                f"scenario {name!r}: unknown metric {metric.get('name')!r}; "
                f"catalog: {sorted(CHART_BUILDERS)}"
            )
        metric.setdefault("params", {})
    profile = raw.get("profile")
    if profile is not None:
        if profile.get("name") not in PROFILE_BUILDERS:
            raise ConfigError(
                f"scenario {name!r}: unknown profile {profile.get('name')!r}; "
                f"catalog: {sorted(PROFILE_BUILDERS)}"
            )
        profile.setdefault("params", {})
    radii = raw.get("radii")
    if radii is not None:
        if float(radii.get("min", 0.0)) <= 0.0:
            raise ConfigError(f"scenario {name!r}: radii.min must be > 0")
        if float(radii.get("max", math.inf)) <= float(radii.get("min")):
            raise ConfigError(f"scenario {name!r}: radii.max must exceed min")
        if int(radii.get("count", 8)) < 3:
            raise ConfigError(f"scenario {name!r}: radii.count must be >= 3")
        if radii.get("spacing", "geometric") not in ("geometric", "linear"):
            raise ConfigError(f"scenario {name!r}: unknown radii.spacing")
    sampler = dict(raw.get("sampler", {}))
    sampler.setdefault("directions", 64)
    sampler.setdefault("seed", 0)
    sampler.setdefault("refine", True)
    if int(sampler["directions"]) < 8:
        raise ConfigError(f"scenario {name!r}: sampler.directions must be >= 8")
    tolerances = dict(raw.get("tolerances", {}))
    allowed = {"ode_rel", "ode_abs", "tensor_rel", "convexity_slack"}
    bad = set(tolerances) - allowed
    if bad:
        raise ConfigError(f"scenario {name!r}: unknown tolerance keys {bad}")
    functions = raw.get("functions", [])
    for spec in functions:
        if "name" not in spec and "random" not in spec:
            raise ConfigError(
                f"scenario {name!r}: function spec needs 'name' or 'random'"
            )
    return ScenarioConfig(kind=kind, name=name, metric=metric,
                          functions=functions, profile=profile, radii=radii,
                          sampler=sampler, tolerances=tolerances)


def load_config(path):
    """Parse and validate a TOML config; returns (scenarios, defaults)."""
    try:
        with open(path, "rb") as fh:
            doc = tomli.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path!r}: {exc}") from exc
    except tomli.TOMLDecodeError as exc:
        raise ConfigError(f"config {path!r} is not valid TOML: {exc}") from exc
    raw_scenarios = doc.get("scenario", [])
    if not raw_scenarios:
        raise ConfigError("config declares no [[scenario]] tables")
    scenarios = [_validate_scenario(raw, i)
                 for i, raw in enumerate(raw_scenarios)]
    defaults = {
        "out_dir": doc.get("out_dir"),
        "tolerances": doc.get("tolerances", {}),
    }
    return scenarios, defaults


# ----------------------------------------------------------------------------
# report plumbing


@dataclass
class CheckResult:
    name: str
    passed: bool
    magnitude: float
    threshold: float
    note: str = ""


@dataclass
class ReportDocument:
    """Verdicts, provenance and timing for one scenario run."""

    name: str
    kind: str
    echo: dict
    checks: list
    provenance: dict
    seconds: float
    error: str = ""

    @property
    def ok(self):
        return not self.error and all(c.passed for c in self.checks)

    def render(self):
        lines = [f"scenario {self.name!r} (kind={self.kind})  "
                 f"[{self.seconds:.2f}s]"]
        echo = ", ".join(f"{k}={v}" for k, v in self.echo.items() if v)
        if echo:
            lines.append(f"  config: {echo}")
        prov = ", ".join(f"{k}={v}" for k, v in self.provenance.items())
        lines.append(f"  provenance: {prov}")
        for c in self.checks:
            tag = "PASS" if c.passed else "FAIL"
            note = f"  ({c.note})" if c.note else ""
            lines.append(
                f"  [{tag}] {c.name}: magnitude={c.magnitude:.6g} "
                f"threshold={c.threshold:.6g}{note}"
            )
        if self.error:
            lines.append(f"  [FAIL] scenario aborted: {self.error}")
        lines.append(f"  status: {'PASS' if self.ok else 'FAIL'}")
        return "\n".join(lines)


def _slug(text):
    return re.sub(r"[^A-Za-z0-9.+-]+", "-", str(text)).strip("-")


def _fmt(x):
    return format(float(x), ".17g")


def write_curve_csv(path, curve, values_are_log=True):
    """Serialize a growth curve; columns fixed, floats at 17 significant
    digits so identical runs produce identical bytes."""
    rows = ["r,abscissa,M,log_M,second_diff,argmax_dir_index"]
    for j in range(len(curve.radii)):
        log_m = curve.values[j] if values_are_log else math.log(curve.values[j])
        m = math.exp(curve.values[j]) if values_are_log else curve.values[j]
        rows.append(",".join([
            _fmt(curve.radii[j]), _fmt(curve.t[j]), _fmt(m), _fmt(log_m),
            _fmt(curve.second_diff[j]), str(int(curve.argmax[j])),
        ]))
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(rows) + "\n")
    return path


def _provenance(seed, tol):
    return {
        "version": __version__,
        "numpy": np.__version__,
        "scipy": scipy.__version__,
        "seed": seed,
        "tol": f"(ode_rel={tol.ode_rel:g},tensor_rel={tol.tensor_rel:g},"
               f"convexity_slack={tol.convexity_slack:g})",
    }


# ----------------------------------------------------------------------------
# scenario runners


def _sample_points(chart, count, rng):
    """Interior sample points away from the domain edge."""
    n = chart.n
    if math.isinf(chart.domain.radius):
        scale = 0.6
    else:
        scale = 0.45 * chart.domain.radius
    center = (np.asarray(chart.domain.center, dtype=complex)
              if chart.domain.center else np.zeros(n, dtype=complex))
    pts = []
    for _ in range(count):
        w = rng.standard_normal(2 * n)
        w /= np.linalg.norm(w)
        s = scale * rng.random() ** (1.0 / (2 * n))
        pts.append(center + s * (w[:n] + 1j * w[n:]))
    return pts


def _run_curvature_equivalence(cfg, out_dir, tol):
    checks = []
    charts = cfg.charts()
    seed = int(cfg.sampler["seed"])
    per_chart = max(13, int(cfg.sampler["directions"]) // 8)
    for ci, chart in enumerate(charts):
        rng = np.random.default_rng(seed + 101 * ci)
        worst_h = 0.0
        for p in _sample_points(chart, per_chart, rng):
            jets = metric_jets(chart, p, order=2)
            comps = rng.standard_normal(chart.n) + 1j * rng.standard_normal(chart.n)
            xi = unit_vector(chart, p, comps, hermitian=True, G=jets.G)
            x_real = unit_vector(chart, p, comps, G=jets.G)
            h_chern = holomorphic_sectional_curvature(chart, p, xi, jets=jets)
            lc = levi_civita_curvature(chart, p, jets=jets)
            x = real_components(x_real)
            h_lc = lc.holomorphic_numerator(x) - lc.nabla_J_norm_sq(x)
            rel = abs(h_chern - h_lc) / max(1.0, abs(h_chern), abs(h_lc))
            worst_h = max(worst_h, rel)
        checks.append(CheckResult(
            name=f"sectional-equivalence:{chart.label}",
            passed=worst_h <= 10.0 * tol.tensor_rel,
            magnitude=worst_h, threshold=10.0 * tol.tensor_rel,
            note=f"{per_chart} point-direction pairs"))

        pool = psh_catalog(chart.n)
        worst_l = 0.0
        for k, p in enumerate(_sample_points(chart, 7, rng)):
            _, u = pool[k % len(pool)]
            r1, r2, r3, scale = L_operator_routes(chart, p, u)
            worst_l = max(worst_l,
                          max(abs(r1 - r2), abs(r1 - r3)) / scale)
        checks.append(CheckResult(
            name=f"L-triple-identity:{chart.label}",
            passed=worst_l <= tol.tensor_rel,
            magnitude=worst_l, threshold=tol.tensor_rel,
            note="real / complexified / chern routes"))
    return checks, []


def _run_comparison_ode(cfg, out_dir, tol):
    checks = []
    if cfg.profile is not None:
        profiles = [make_profile(cfg.profile["name"], **cfg.profile["params"])]
    else:
        profiles = default_profiles()
    for prof in profiles:
        cp = solve_profile(prof, T=50.0, tol=tol)
        report = verify_bounds(cp, tol=tol)
        iq = compute_Iq(prof)
        worst = min(report.up_monotone_worst, report.pinch_upper_worst,
                    report.pinch_lower_worst)
        checks.append(CheckResult(
            name=f"ode-bounds:{prof.name}",
            passed=report.ok(tol),
            magnitude=worst, threshold=-1e-8,
            note=f"I(q)={iq:.6g}, u'(T)={report.up_end:.6g}"))
    return checks, []


def _run_geodesic_taylor(cfg, out_dir, tol):
    checks = []
    count = max(4, int(cfg.sampler["directions"]) // 8)
    for chart in cfg.charts():
        orders, worst = taylor_probe(chart, count=count,
                                     seed=int(cfg.sampler["seed"]), tol=tol)
        finite = orders[np.isfinite(orders)]
        if len(finite) == 0:
            passed, magnitude = True, math.inf
            note = f"expansion exact to noise ({worst.max():.2e})"
        else:
            magnitude = float(finite.min())
            passed = magnitude >= 3.7
            note = f"{count} directions, worst error {worst.max():.2e}"
        checks.append(CheckResult(
            name=f"taylor-order:{chart.label}", passed=passed,
            magnitude=magnitude, threshold=3.7, note=note))
    return checks, []


def _curve_abscissa(cfg, chart, tol):
    """Choose the abscissa a scenario's curves are checked in."""
    if cfg.profile is not None:
        prof = make_profile(cfg.profile["name"], **cfg.profile["params"])
        cp = solve_profile(prof, T=50.0, tol=tol)
        return "v-profile", {"profile": cp}, f"v[{prof.name}]"
    K = chart.curvature_bound
    if K is not None and K != 0.0:
        return "log-tnK", {"K": K}, f"log-tn[{K:g}]"
    return "log", {}, "log-r"


def _run_three_circle(cfg, out_dir, tol):
    checks, artifacts = [], []
    charts = cfg.charts()
    seed = int(cfg.sampler["seed"])
    count = int(cfg.sampler["directions"])
    refine = bool(cfg.sampler["refine"])
    for chart in charts:
        hi_default = min(3.0, 0.9 * chart.injectivity_floor)
        radii = cfg.radii_array(0.1, hi_default, 10)
        abscissa, kw, label = _curve_abscissa(cfg, chart, tol)
        o = np.zeros(chart.n, dtype=complex)
        for f in cfg.resolve_functions(chart.n):
            curve = growth_curve(chart, o, log_abs(f), radii,
                                 abscissa=abscissa, count=count, seed=seed,
                                 refine=refine, tol=tol,
                                 label=f"{cfg.name}:{f.name}", **kw)
            verdict = convexity_check(curve, tol=tol)
            path = os.path.join(
                out_dir, f"{_slug(cfg.name)}_{_slug(chart.label)}_"
                         f"{_slug(f.name)}.csv")
            artifacts.append(write_curve_csv(path, curve))
            checks.append(CheckResult(
                name=f"log-convexity:{chart.label}:{f.name}",
                passed=verdict.kind == "convex",
                magnitude=verdict.magnitude, threshold=-verdict.slack,
                note=f"abscissa {label}, worst node {verdict.worst_index}"))
    return checks, artifacts


def _run_monotonicity(cfg, out_dir, tol):
    checks, artifacts = [], []
    seed = int(cfg.sampler["seed"])
    count = int(cfg.sampler["directions"])
    refine = bool(cfg.sampler["refine"])
    prof = (make_profile(cfg.profile["name"], **cfg.profile["params"])
            if cfg.profile is not None else make_profile("zero"))
    iq = compute_Iq(prof)
    cp = solve_profile(prof, T=50.0, tol=tol)
    for chart in cfg.charts():
        hi_default = min(3.0, 0.9 * chart.injectivity_floor)
        radii = cfg.radii_array(0.2, hi_default, 9)
        o = np.zeros(chart.n, dtype=complex)
        for f in cfg.resolve_functions(chart.n):
            if f.kind != "polynomial":
                continue
            k, deg = ord_and_degree(f, o)
            curve = growth_curve(chart, o, log_abs(f), radii,
                                 abscissa="v-profile", profile=cp,
                                 count=count, seed=seed, refine=refine,
                                 tol=tol, label=f"{cfg.name}:{f.name}")
            inc, dec = monotonicity_checks(curve, k, deg, iq, tol=tol)
            path = os.path.join(
                out_dir, f"{_slug(cfg.name)}_{_slug(chart.label)}_"
                         f"{_slug(f.name)}.csv")
            artifacts.append(write_curve_csv(path, curve))
            checks.append(CheckResult(
                name=f"ord-monotone:{chart.label}:{f.name}",
                passed=inc.ok, magnitude=inc.magnitude, threshold=-inc.slack,
                note=f"log M - {k} v nondecreasing"))
            checks.append(CheckResult(
                name=f"deg-monotone:{chart.label}:{f.name}",
                passed=dec.ok, magnitude=dec.magnitude, threshold=dec.slack,
                note=f"log M - I(q) {deg:g} v nonincreasing"))
            checks.append(CheckResult(
                name=f"ord-le-deg:{chart.label}:{f.name}",
                passed=k <= deg, magnitude=float(k), threshold=float(deg)))
    return checks, artifacts


def _run_max_principle(cfg, out_dir, tol):
    checks = []
    seed = int(cfg.sampler["seed"])
    for chart in cfg.charts():
        if math.isinf(chart.domain.radius):
            radius = 0.8
        else:
            radius = 0.45 * chart.domain.radius
        if cfg.radii is not None:
            radius = float(cfg.radii.get("max", radius))
        center = np.zeros(chart.n, dtype=complex)
        for name, u in psh_catalog(chart.n):
            verdict = max_principle_check(chart, center, radius, u,
                                          count=32, seed=seed, tol=tol)
            checks.append(CheckResult(
                name=f"max-principle:{chart.label}:{name}",
                passed=verdict.ok,
                magnitude=verdict.magnitude, threshold=verdict.slack,
                note=verdict.note or f"sub-ball radius {radius:g}"))
    return checks, []


def _run_counterexample(cfg, out_dir, tol):
    checks, artifacts = [], []
    n = 2
    if cfg.metric is not None:
        n = int(cfg.metric.get("params", {}).get("n", 2))
    seed = int(cfg.sampler["seed"])
    rep = counterexample_scenario(n=n, seed=seed, tol=tol)
    checks.append(CheckResult(
        name="functional-negative", passed=rep.functional_ok,
        magnitude=rep.functional_value, threshold=0.0,
        note="curvature functional along e1 at the origin"))
    checks.append(CheckResult(
        name="growth-deficit", passed=rep.growth_ok,
        magnitude=rep.growth_margin, threshold=1e-4,
        note=f"M/r below 1/sqrt(2) at r={rep.growth_radius:g}, "
             f"radial-oracle gap {rep.oracle_gap:.2e}"))
    checks.append(CheckResult(
        name="convexity-violation-detected", passed=rep.convexity_ok,
        magnitude=rep.convexity.magnitude, threshold=-rep.convexity.slack,
        note="violation detected as expected"))
    checks.append(CheckResult(
        name="quartic-bound", passed=rep.taylor_ok,
        magnitude=rep.taylor_worst_margin, threshold=0.0,
        note="|f|^2 along geodesics vs fourth-order model"))
    checks.append(CheckResult(
        name="controls-clean", passed=rep.controls_ok,
        magnitude=float(len(rep.control_verdicts)), threshold=2.0,
        note=", ".join(f"{k}: {v.kind}"
                       for k, v in rep.control_verdicts.items())))
    path = os.path.join(out_dir, f"{_slug(cfg.name)}_n{n}_z1.csv")
    artifacts.append(write_curve_csv(path, rep.curve))
    return checks, artifacts


def _run_dimension_count(cfg, out_dir, tol):
    checks = []
    for n in (1, 2, 3):
        for d in range(1, 6):
            rank = dimension_count(n, d)
            expected = math.comb(n + d, n)
            checks.append(CheckResult(
                name=f"dimension:n={n},d={d}", passed=rank == expected,
                magnitude=float(rank), threshold=float(expected)))
    return checks, []


_RUNNERS = {
    "curvature-equivalence": _run_curvature_equivalence,
    "comparison-ode": _run_comparison_ode,
    "geodesic-taylor": _run_geodesic_taylor,
    "three-circle": _run_three_circle,
    "monotonicity": _run_monotonicity,
    "max-principle": _run_max_principle,
    "counterexample": _run_counterexample,
    "dimension-count": _run_dimension_count,
}


def run_scenario(cfg, out_dir, tol_scale=1.0):
    """Execute one scenario; never raises on check failure, only on
    configuration problems."""
    tol = cfg.tolerance_bundle(tol_scale)
    start = time.perf_counter()
    error = ""
    checks, artifacts = [], []
    try:
        checks, artifacts = _RUNNERS[cfg.kind](cfg, out_dir, tol)
    except ConfigError:
        raise
    except Exception as exc:  # failed sub-check or numerical abort
        error = str(exc)
    seconds = time.perf_counter() - start
    echo = {
        "metric": cfg.metric["name"] if cfg.metric else "catalog",
        "profile": cfg.profile["name"] if cfg.profile else "",
        "functions": ",".join(s.get("name", "random") for s in cfg.functions),
        "radii": (f"[{cfg.radii['min']:g},{cfg.radii['max']:g}]"
                  if cfg.radii else ""),
        "directions": cfg.sampler["directions"],
        "artifacts": len(artifacts),
    }
    doc = ReportDocument(
        name=cfg.name, kind=cfg.kind, echo=echo, checks=checks,
        provenance=_provenance(cfg.sampler["seed"], tol), seconds=seconds,
        error=error)
    return doc, artifacts


# ----------------------------------------------------------------------------
# entry points


def list_catalogs():
    """Deterministic text listing of every addressable catalog entry."""
    lines = ["metric catalog:"]
    for name in sorted(CHART_BUILDERS):
        params = ", ".join(f"{k}={v!r}" for k, v in CHART_PARAMS[name].items())
        lines.append(f"  {name:18s} params: {params}")
    lines.append("function catalog (per dimension n):")
    for n in (1, 2):
        names = ", ".join(f.name for f in function_catalog(n))
        lines.append(f"  n={n}: {names}")
    lines.append("  random-poly        params: degree=3, seed=0, terms=6 "
                 "(spec: random = { degree = ..., seed = ..., terms = ... })")
    lines.append("q-profile catalog:")
    schemas = {
        "zero": "", "constant": "c=1.0", "bump": "c=1.0, R=1.0",
        "inverse-cube": "C=2.0", "log-weak": "C=1.0, eps=0.5",
    }
    for name in sorted(PROFILE_BUILDERS):
        lines.append(f"  {name:18s} params: {schemas[name]}")
    lines.append("scenario kinds:")
    for kind in SCENARIO_KINDS:
        lines.append(f"  {kind}")
    return "\n".join(lines)


def run_config(config_path, out_dir=None, seed=None, tol_scale=1.0,
               directions=None):
    """Run every scenario in the config; returns (exit_code, report text)."""
    scenarios, defaults = load_config(config_path)
    out_dir = out_dir or defaults.get("out_dir") \
        or os.environ.get(OUT_DIR_ENV) or "hermlab-out"
    os.makedirs(out_dir, exist_ok=True)
    shared_tol = defaults.get("tolerances", {})
    blocks, all_ok = [], True
    for cfg in scenarios:
        merged = dict(shared_tol)
        merged.update(cfg.tolerances)
        cfg.tolerances = merged
        if seed is not None:
            cfg.sampler["seed"] = int(seed)
        if directions is not None:
            if int(directions) < 8:
                raise ConfigError("--directions must be >= 8")
            cfg.sampler["directions"] = int(directions)
        doc, _ = run_scenario(cfg, out_dir, tol_scale=tol_scale)
        blocks.append(doc.render())
        all_ok = all_ok and doc.ok
    total = sum(1 for b in blocks for line in b.splitlines()
                if line.strip().startswith(("[PASS]", "[FAIL]")))
    header = (f"hermlab {__version__} verification report\n"
              f"config: {config_path}\nout_dir: {out_dir}\n")
    footer = f"\noverall: {'PASS' if all_ok else 'FAIL'} ({total} checks)\n"
    text = header + "\n" + "\n\n".join(blocks) + footer
    report_path = os.path.join(out_dir, "report.txt")
    with open(report_path, "w", encoding="utf-8") as fh:
        fh.write(text)
    return (0 if all_ok else 1), text


def main(argv=None):
    parser = argparse.ArgumentParser(
        prog="hermlab",
        description="Numerical verification suites for Hermitian growth "
                    "geometry: curvature identities, comparison ODEs, "
                    "geodesic expansions, and growth-curve convexity.")
    sub = parser.add_subparsers(dest="command", required=True)

    runp = sub.add_parser("run", help="run scenarios from a TOML config")
    runp.add_argument("config", help="path to the scenario config")
    runp.add_argument("--out-dir", default=None,
                      help=f"artifact directory (default ${OUT_DIR_ENV} "
                           "or ./hermlab-out)")
    runp.add_argument("--seed", type=int, default=None,
                      help="override every scenario sampler seed")
    runp.add_argument("--tol-scale", type=float, default=1.0,
                      help="multiply all tolerances by this factor")
    runp.add_argument("--directions", type=int, default=None,
                      help="override every scenario direction count")

    sub.add_parser("list-catalogs",
                   help="list metric, function and q-profile catalogs")

    args = parser.parse_args(argv)
    if args.command == "list-catalogs":
        print(list_catalogs())
        return 0
    try:
        code, text = run_config(args.config, out_dir=args.out_dir,
                                seed=args.seed, tol_scale=args.tol_scale,
                                directions=args.directions)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 2
    print(text, end="")
    return code


if __name__ == "__main__":
    sys.exit(main())
