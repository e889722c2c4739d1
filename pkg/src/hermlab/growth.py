"""Growth of holomorphic functions along exponential spheres.

M_o(u, r) is the maximum of u over the radius-r exponential sphere at o,
realized by direction sampling plus local ascent on the direction sphere.
Growth curves record M against a reparametrized abscissa (log r, the
comparison abscissa v(r), or the constant-curvature model log tn_K(r/2)) and
verdicts are discrete convexity / monotonicity checks with explicit slack.

Slack convention: a second difference at an interior node j is the local
three-point second-derivative estimate times the squared mean spacing (so it
reduces to M_{j+1} - 2 M_j + M_{j-1} on uniform grids and is invariant under
affine reparametrization), and it is accepted when

    second_diff_j >= -convexity_slack * max(1, |M_j|) * (mean spacing)^2.

Monotonicity checks compare successive differences against
convexity_slack * max(1, |M|) without the spacing factor, since sampling
noise on the values does not shrink with the grid.

The counterexample scenario packages the standing example of a metric
(e^{|z|^2} delta) whose holomorphic sectional curvature dips below what any
log-r convexity statement could tolerate: it verifies the negative
curvature functional, the strict M/r deficit against 1/sqrt(2), a genuine
convexity violation, and the quartic-order Taylor bound along sampled
geodesics, then confirms the flat and Poincare controls stay clean in their
model abscissae.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np
from scipy.optimize import brentq, minimize

from .comparison import ComparisonProfile, solve_profile, tn
from .geodesics import (
    direction_sphere_points,
    exp_sphere,
    geodesic_fan,
    integrate_geodesic,
    tangent_directions,
)
from .geometry import (
    L_operator,
    converse_functional,
    metric_jets,
    torsion,
    unit_vector,
    unitary_frame,
)
from .metrics import flat_chart, poincare_chart, radial_conformal_chart
from .numerics import DEFAULT_TOL, quadrature

__all__ = [
    "GrowthError",
    "Polynomial",
    "HolomorphicTestFunction",
    "polynomial_function",
    "transcendental_exp",
    "random_polynomial",
    "function_catalog",
    "psh_catalog",
    "log_abs",
    "Verdict",
    "GrowthCurve",
    "sphere_max",
    "growth_curve",
    "convexity_check",
    "monotonicity_checks",
    "degree_estimate",
    "ord_and_degree",
    "phi_truncation",
    "dimension_count",
    "max_principle_check",
    "liouville_probe",
    "zero_witness_search",
    "CounterexampleReport",
    "counterexample_scenario",
]

VERDICT_KINDS = ("convex", "violation", "monotone-increasing",
                 "monotone-decreasing", "bound-holds")


class GrowthError(RuntimeError):
    """Growth-analysis precondition or scenario failure."""


# ----------------------------------------------------------------------------
# holomorphic test functions


class Polynomial:
    """Multivariate polynomial in z with exact complex coefficients.

    Stored canonically: a map from exponent tuples to nonzero coefficients,
    iterated in sorted exponent order.  Arithmetic stays in plain complex
    floats; recentering expands binomially, so shifted coefficients are
    exact up to float rounding.
    """

    def __init__(self, n, coeffs):
        self.n = int(n)
        clean = {}
        for alpha, c in coeffs.items():
            alpha = tuple(int(a) for a in alpha)
            if len(alpha) != self.n or any(a < 0 for a in alpha):
                raise ValueError(f"bad exponent {alpha} for n={self.n}")
            c = complex(c)
            if c != 0:
                clean[alpha] = clean.get(alpha, 0.0) + c
        self.coeffs = dict(sorted(clean.items()))

    def __call__(self, z):
        z = np.asarray(z, dtype=complex)
        total = 0.0 + 0.0j
        for alpha, c in self.coeffs.items():
            term = c
            for i, a in enumerate(alpha):
                if a:
                    term = term * z[i] ** a
            total += term
        return total

    @property
    def is_zero(self):
        return not self.coeffs

    @property
    def degree(self):
        if self.is_zero:
            return -math.inf
        return max(sum(alpha) for alpha in self.coeffs)

    def derivative(self, i):
        out = {}
        for alpha, c in self.coeffs.items():
            if alpha[i]:
                beta = list(alpha)
                beta[i] -= 1
                out[tuple(beta)] = c * alpha[i]
        return Polynomial(self.n, out)

    def recenter(self, o):
        """Coefficients in w = z - o, exact binomial expansion."""
        o = np.asarray(o, dtype=complex)
        out = {}
        for alpha, c in self.coeffs.items():
            partial = {(): complex(c)}
            for i, a in enumerate(alpha):
                grown = {}
                for beta, cb in partial.items():
                    for k in range(a + 1):
                        coef = cb * math.comb(a, k) * o[i] ** (a - k)
                        key = beta + (k,)
                        grown[key] = grown.get(key, 0.0) + coef
                partial = grown
            for beta, cb in partial.items():
                out[beta] = out.get(beta, 0.0) + cb
        scale = max((abs(c) for c in out.values()), default=0.0)
        out = {b: c for b, c in out.items() if abs(c) > 1e-14 * scale}
        return Polynomial(self.n, out)

    def ord_at(self, o):
        """Vanishing order at o: smallest total degree with a live term."""
        shifted = self.recenter(o)
        if shifted.is_zero:
            raise GrowthError("vanishing order of the zero polynomial")
        return min(sum(alpha) for alpha in shifted.coeffs)

    def truncate(self, max_degree):
        return Polynomial(self.n, {a: c for a, c in self.coeffs.items()
                                   if sum(a) <= max_degree})

    def __sub__(self, other):
        if isinstance(other, Polynomial):
            out = dict(self.coeffs)
            for a, c in other.coeffs.items():
                out[a] = out.get(a, 0.0) - c
            return Polynomial(self.n, out)
        out = dict(self.coeffs)
        zero = (0,) * self.n
        out[zero] = out.get(zero, 0.0) - complex(other)
        return Polynomial(self.n, out)

    def __repr__(self):
        terms = ", ".join(f"{a}: {c:g}" for a, c in self.coeffs.items())
        return f"Polynomial(n={self.n}, {{{terms}}})"


@dataclass(frozen=True, eq=False)
class HolomorphicTestFunction:
    """Catalog entry: exact polynomial, or evaluator with declared growth."""

    name: str
    n: int
    kind: str  # "polynomial" | "transcendental"
    evaluator: Callable
    poly: Optional[Polynomial] = None
    declared_degree: float = math.nan

    def __call__(self, z):
        return self.evaluator(z)

    @property
    def degree(self):
        if self.kind == "polynomial":
            return float(self.poly.degree)
        return self.declared_degree


def polynomial_function(name, poly):
    return HolomorphicTestFunction(name=name, n=poly.n, kind="polynomial",
                                   evaluator=poly, poly=poly,
                                   declared_degree=float(poly.degree))


def transcendental_exp(n):
    """exp(z^1): entire of infinite degree; growth checks treat the degree
    as declared rather than estimated."""
    return HolomorphicTestFunction(
        name="exp-z1", n=n, kind="transcendental",
        evaluator=lambda z: np.exp(complex(np.asarray(z, dtype=complex)[0])),
        declared_degree=math.inf,
    )


def _mono(n, **pos):
    alpha = [0] * n
    for key, a in pos.items():
        alpha[int(key[1:]) - 1] = a
    return tuple(alpha)


def random_polynomial(n, degree=3, seed=0, terms=6):
    """Seeded random polynomial, nonconstant, coefficients ~ N(0,1) damped
    by total degree."""
    rng = np.random.default_rng(seed)
    alphas = [a for a in np.ndindex(*(degree + 1,) * n)
              if 1 <= sum(a) <= degree]
    take = min(terms, len(alphas))
    picks = rng.choice(len(alphas), size=take, replace=False)
    coeffs = {}
    for k in picks:
        alpha = tuple(int(x) for x in alphas[k])
        c = complex(rng.standard_normal(), rng.standard_normal())
        coeffs[alpha] = c / (1.0 + math.factorial(sum(alpha)) / 6.0)
    if rng.random() < 0.5:
        coeffs[(0,) * n] = complex(rng.standard_normal(), rng.standard_normal())
    poly = Polynomial(n, coeffs)
    return polynomial_function(f"random(n={n},deg={degree},seed={seed})", poly)


def function_catalog(n):
    """Fixed test functions used across scenarios, by complex dimension."""
    entries = [
        polynomial_function("z1", Polynomial(n, {_mono(n, z1=1): 1.0})),
        polynomial_function("1+z1", Polynomial(n, {(0,) * n: 1.0,
                                                   _mono(n, z1=1): 1.0})),
        polynomial_function("z1+z1^3", Polynomial(n, {_mono(n, z1=1): 1.0,
                                                      _mono(n, z1=3): 1.0})),
    ]
    if n >= 2:
        entries += [
            polynomial_function("z1*z2", Polynomial(n, {_mono(n, z1=1, z2=1): 1.0})),
            polynomial_function("z1^2*z2", Polynomial(n, {_mono(n, z1=2, z2=1): 1.0})),
            polynomial_function("z1+z2^5", Polynomial(n, {_mono(n, z1=1): 1.0,
                                                          _mono(n, z2=5): 1.0})),
        ]
    else:
        entries.append(
            polynomial_function("z1^5", Polynomial(n, {_mono(n, z1=5): 1.0})))
    entries.append(transcendental_exp(n))
    return entries


def log_abs(f, floor=0.0):
    """u = log |f| as a scalar field; max of log is log of max."""

    def u(z):
        val = abs(f(z))
        if floor:
            val = max(val, floor)
        return -math.inf if val == 0.0 else math.log(val)

    return u


def psh_catalog(n, eps=0.05):
    """Plurisubharmonic scalar fields for maximum-principle sweeps.

    Each entry is (name, u); all are smooth and satisfy L[u] >= 0, the
    logarithmic ones by the standard log(sum |holomorphic|^2) mechanism.
    """
    f1 = Polynomial(n, {_mono(n, z1=1): 1.0, (0,) * n: 0.3})
    if n >= 2:
        f2 = Polynomial(n, {_mono(n, z2=1): 1.0, _mono(n, z1=2): 0.5})
    else:
        f2 = Polynomial(n, {_mono(n, z1=2): 0.5})

    def re_z1(z):
        return float(np.asarray(z, dtype=complex)[0].real)

    def abs_sq(z):
        z = np.asarray(z, dtype=complex)
        return float(np.sum(z * np.conj(z)).real)

    def log_abs_sq_eps(z):
        z = np.asarray(z, dtype=complex)
        return math.log(float(np.sum(z * np.conj(z)).real) + eps)

    def log_pair_eps(z):
        return math.log(abs(f1(z)) ** 2 + abs(f2(z)) ** 2 + eps)

    return [
        ("re-z1", re_z1),
        ("abs-sq", abs_sq),
        ("log-abs-sq", log_abs_sq_eps),
        ("log-poly-pair", log_pair_eps),
    ]


# ----------------------------------------------------------------------------
# sphere maxima and growth curves


@dataclass(frozen=True)
class Verdict:
    """Outcome of a discrete convexity / monotonicity / bound check."""

    kind: str
    worst_index: Optional[int]
    magnitude: float
    slack: float
    note: str = ""
    checked: bool = True

    def __post_init__(self):
        if self.kind not in VERDICT_KINDS:
            raise ValueError(f"unknown verdict kind {self.kind!r}")

    @property
    def ok(self):
        return self.checked and self.kind != "violation"


@dataclass(frozen=True, eq=False)
class GrowthCurve:
    """Sampled growth data M_j = max of u over exponential spheres.

    t is the chosen abscissa; second_diff and spacing_sq follow the slack
    convention in the module docstring; argmax holds the winning direction
    index per radius (lowest index on ties); slopes are the successive
    divided differences of the values.
    """

    base: np.ndarray
    radii: np.ndarray
    abscissa: str
    t: np.ndarray
    values: np.ndarray
    argmax: np.ndarray
    second_diff: np.ndarray
    spacing_sq: np.ndarray
    slopes: np.ndarray
    count: int
    label: str = ""


def _endpoint_map(chart, o, r, frame, tol):
    """Map a raw sphere point w in R^{2n} to the exp-sphere point at r."""
    n = chart.n

    def endpoint(w):
        w = np.asarray(w, dtype=float)
        w = w / np.linalg.norm(w)
        X = (w[:n] + 1j * w[n:]) @ frame.T / math.sqrt(2.0)
        X = unit_vector(chart, o, X)
        if chart.exact_exp is not None:
            z = chart.exact_exp(o, X, r)
            if z is not None:
                return z
        path = integrate_geodesic(chart, o, X, r, tol=tol)
        if path.exited and path.t_end < r:
            return None
        return path.point(r)

    return endpoint


def _polish_direction(u, endpoint, w0, step=0.25, maxfev=120):
    """Nelder-Mead ascent of u(endpoint(w)) around the seed sphere point."""
    dim = len(w0)
    basis = np.linalg.qr(
        np.column_stack([w0] + [np.eye(dim)[:, k] for k in range(dim)])
    )[0][:, 1:dim]

    def neg(s):
        z = endpoint(w0 + basis @ s)
        if z is None:
            return math.inf
        val = u(z)
        return math.inf if math.isnan(val) else -val

    res = minimize(neg, np.zeros(dim - 1), method="Nelder-Mead",
                   options={"xatol": 1e-9, "fatol": 1e-12,
                            "maxfev": maxfev, "initial_simplex": np.vstack(
                                [np.zeros(dim - 1),
                                 step * np.eye(dim - 1)])})
    w = w0 + basis @ res.x
    return -float(res.fun), w / np.linalg.norm(w)


def sphere_max(chart, o, u, r, count=64, seed=0, refine=True,
               tol=DEFAULT_TOL, frame=None, paths=None, raw_points=None):
    """Max of u over the radius-r exponential sphere at o.

    Directions are sampled with a seeded low-discrepancy set; refine runs a
    local ascent from the best seed and never decreases the result.
    Returns (M, argmax (1,0)-components, seed index).
    """
    if not 0.0 < r <= chart.injectivity_floor:
        raise GrowthError(
            f"radius {r:g} outside (0, injectivity_floor="
            f"{chart.injectivity_floor:g}]"
        )
    o = np.asarray(o, dtype=complex)
    n = chart.n
    if frame is None:
        frame = unitary_frame(chart, o)
    if raw_points is None:
        raw_points = direction_sphere_points(2 * n, count, seed=seed)
    vals = np.full(len(raw_points), -math.inf)
    if paths is not None:
        for k, path in enumerate(paths):
            if path.exited and path.t_end < r:
                continue
            vals[k] = u(path.point(r))
    else:
        dirs = np.stack([
            unit_vector(chart, o, (w[:n] + 1j * w[n:]) @ frame.T / math.sqrt(2.0))
            for w in raw_points
        ])
        points, reached = exp_sphere(chart, o, r, dirs, tol=tol)
        for k in range(len(dirs)):
            if reached[k]:
                vals[k] = u(points[k])
    if not np.any(np.isfinite(vals)):
        raise GrowthError(f"no direction reached radius {r:g}")
    k0 = int(np.argmax(vals))
    best = float(vals[k0])
    w_best = raw_points[k0]
    if refine:
        endpoint = _endpoint_map(chart, o, r, frame, tol)
        polished, w_pol = _polish_direction(u, endpoint, w_best)
        if polished > best:
            best = polished
            w_best = w_pol
    X = unit_vector(chart, o, (w_best[:n] + 1j * w_best[n:]) @ frame.T
                    / math.sqrt(2.0))
    return best, X, k0


def _abscissa_values(radii, abscissa, profile=None, K=None):
    if abscissa == "log":
        return np.log(radii)
    if abscissa == "v-profile":
        if not isinstance(profile, ComparisonProfile):
            raise GrowthError("v-profile abscissa needs a solved comparison "
                              "profile")
        return np.array([profile.v_at(r) for r in radii])
    if abscissa == "log-tnK":
        if K is None:
            raise GrowthError("log-tnK abscissa needs the curvature constant K")
        return np.array([math.log(tn(K, r / 2.0)) for r in radii])
    raise GrowthError(f"unknown abscissa {abscissa!r}")


def growth_curve(chart, o, u, radii, abscissa="log", profile=None, K=None,
                 count=64, seed=0, refine=True, tol=DEFAULT_TOL, label=""):
    """Growth curve of u along exponential spheres at o.

    One dense geodesic per direction serves all radii; refinement polishes
    each radius locally.  The curve carries second differences and the
    spacing weights used by convexity_check.
    """
    radii = np.asarray(sorted(float(r) for r in radii))
    if len(radii) < 3:
        raise GrowthError("growth curves need at least 3 radii")
    if radii[0] <= 0.0 or np.any(np.diff(radii) <= 0.0):
        raise GrowthError("radii must be positive and strictly increasing")
    if radii[-1] > chart.injectivity_floor:
        raise GrowthError(
            f"largest radius {radii[-1]:g} exceeds the injectivity floor"
        )
    o = np.asarray(o, dtype=complex)
    n = chart.n
    frame = unitary_frame(chart, o)
    raw_points = direction_sphere_points(2 * n, count, seed=seed)
    dirs = np.stack([
        unit_vector(chart, o, (w[:n] + 1j * w[n:]) @ frame.T / math.sqrt(2.0))
        for w in raw_points
    ])
    exact_probe = (chart.exact_exp is not None
                   and chart.exact_exp(o, dirs[0], float(radii[0])) is not None)
    paths = None
    if not exact_probe:
        paths = geodesic_fan(chart, o, dirs, float(radii[-1]), tol=tol)

    values = np.empty(len(radii))
    argmax = np.empty(len(radii), dtype=int)
    for j, r in enumerate(radii):
        if exact_probe:
            M, _, k0 = sphere_max(chart, o, u, float(r), count=count,
                                  seed=seed, refine=refine, tol=tol,
                                  frame=frame, raw_points=raw_points)
        else:
            M, _, k0 = sphere_max(chart, o, u, float(r), count=count,
                                  seed=seed, refine=refine, tol=tol,
                                  frame=frame, paths=paths,
                                  raw_points=raw_points)
        values[j] = M
        argmax[j] = k0
    if not np.all(np.isfinite(values)):
        raise GrowthError("growth curve produced non-finite values")

    t = _abscissa_values(radii, abscissa, profile=profile, K=K)
    if np.any(np.diff(t) <= 0.0):
        raise GrowthError("abscissa values are not strictly increasing")
    second = np.zeros(len(radii))
    spacing_sq = np.zeros(len(radii))
    for j in range(1, len(radii) - 1):
        dt0 = t[j] - t[j - 1]
        dt1 = t[j + 1] - t[j]
        tbar = 0.5 * (dt0 + dt1)
        deriv2 = 2.0 * ((values[j + 1] - values[j]) / dt1
                        - (values[j] - values[j - 1]) / dt0) / (dt0 + dt1)
        second[j] = deriv2 * tbar * tbar
        spacing_sq[j] = tbar * tbar
    slopes = np.diff(values) / np.diff(t)
    return GrowthCurve(base=o, radii=radii, abscissa=abscissa, t=t,
                       values=values, argmax=argmax, second_diff=second,
                       spacing_sq=spacing_sq, slopes=slopes, count=count,
                       label=label)


def convexity_check(curve, tol=DEFAULT_TOL):
    """Discrete convexity of the curve in its abscissa.

    Accepts second_diff_j >= -convexity_slack * max(1, |M_j|) * spacing_sq_j
    at every interior node; otherwise reports the worst violating node with
    the offending second difference (same units as the values).
    """
    interior = range(1, len(curve.values) - 1)
    worst_idx, worst_margin = None, math.inf
    for j in interior:
        slack = tol.convexity_slack * max(1.0, abs(curve.values[j])) \
            * curve.spacing_sq[j]
        margin = curve.second_diff[j] + slack
        if margin < worst_margin:
            worst_margin = margin
            worst_idx = j
    if worst_idx is None:
        return Verdict(kind="convex", worst_index=None, magnitude=0.0,
                       slack=0.0)
    slack = tol.convexity_slack * max(1.0, abs(curve.values[worst_idx])) \
        * curve.spacing_sq[worst_idx]
    kind = "convex" if worst_margin >= 0.0 else "violation"
    return Verdict(kind=kind, worst_index=worst_idx,
                   magnitude=float(curve.second_diff[worst_idx]), slack=slack)


def _monotone_verdict(y, slacks, increasing, note=""):
    diffs = np.diff(y)
    if increasing:
        margins = diffs + slacks
        kind_ok = "monotone-increasing"
    else:
        margins = slacks - diffs
        kind_ok = "monotone-decreasing"
    j = int(np.argmin(margins))
    if margins[j] < 0.0:
        return Verdict(kind="violation", worst_index=j,
                       magnitude=float(diffs[j]), slack=float(slacks[j]),
                       note=note)
    return Verdict(kind=kind_ok, worst_index=j, magnitude=float(diffs[j]),
                   slack=float(slacks[j]), note=note)


def monotonicity_checks(curve, ord, deg, Iq, tol=DEFAULT_TOL):
    """Monotone growth facts for u = log |f| in the v-profile abscissa.

    Checks that values - ord * t is nondecreasing and values - Iq * deg * t
    is nonincreasing.  With a non-integrable profile (Iq infinite) the
    decreasing check holds vacuously and says so.
    """
    if curve.abscissa not in ("v-profile", "log", "log-tnK"):
        raise GrowthError("monotonicity checks need a reparametrized curve")
    slacks = np.array([
        tol.convexity_slack * max(1.0, abs(curve.values[j]),
                                  abs(curve.values[j + 1]))
        for j in range(len(curve.values) - 1)
    ])
    inc = _monotone_verdict(curve.values - ord * curve.t, slacks,
                            increasing=True)
    if math.isinf(Iq):
        dec = Verdict(kind="monotone-decreasing", worst_index=None,
                      magnitude=0.0, slack=0.0,
                      note="vacuous: I(q) is infinite")
    else:
        dec = _monotone_verdict(curve.values - Iq * deg * curve.t, slacks,
                                increasing=False)
    return inc, dec


def degree_estimate(curve):
    """Tail slope of the curve; matches the degree on flat charts with
    u = log |f| and the log abscissa.  Diagnostic only."""
    return float(curve.slopes[-1])


# ----------------------------------------------------------------------------
# order, degree, truncation, dimension


def ord_and_degree(f, o):
    """(vanishing order at o, total degree) of a catalog function.

    Transcendental entries report their declared degree and the vanishing
    order is computed from the evaluator only when it is trivially zero;
    otherwise the declared data stands in.
    """
    if f.kind != "polynomial":
        val = f(np.asarray(o, dtype=complex))
        return (0 if abs(val) > 1e-12 else 1), f.declared_degree
    if f.poly.is_zero:
        raise GrowthError("order and degree of the zero polynomial")
    return f.poly.ord_at(o), float(f.poly.degree)


def phi_truncation(f, o, d, Iq=1.0):
    """Taylor truncation at total degree floor(Iq * d), centered at o.

    Returns the polynomial in centered coordinates w = z - o.  This is the
    linear map whose injectivity on degree-capped spaces yields the
    dimension bound.
    """
    if f.kind != "polynomial":
        raise GrowthError(
            f"no exact expansion available for {f.name!r}"
        )
    cut = int(math.floor(Iq * d + 1e-12))
    return f.poly.recenter(np.asarray(o, dtype=complex)).truncate(cut)


def dimension_count(n, d, Iq=1.0):
    """Rank of the truncation map on the monomial basis of degree <= floor(d).

    On the flat chart the polynomials of degree at most floor(d) exhaust the
    functions of polynomial growth d, and the truncation at floor(Iq d) acts
    injectively on them, so the rank equals binomial(n + floor(d), n).
    """
    dmax = int(math.floor(d + 1e-12))
    cut = int(math.floor(Iq * d + 1e-12))
    basis = [alpha for alpha in np.ndindex(*(dmax + 1,) * n)
             if sum(alpha) <= dmax]
    image_index = {alpha: k for k, alpha in enumerate(
        a for a in np.ndindex(*(cut + 1,) * n) if sum(a) <= cut)}
    mat = np.zeros((len(basis), len(image_index)), dtype=complex)
    o = np.zeros(n, dtype=complex)
    for row, alpha in enumerate(basis):
        mono = polynomial_function(
            f"m{row}", Polynomial(n, {tuple(int(a) for a in alpha): 1.0}))
        tr = phi_truncation(mono, o, d, Iq=Iq)
        for beta, c in tr.coeffs.items():
            mat[row, image_index[beta]] = c
    return int(np.linalg.matrix_rank(mat, tol=1e-10))


# ----------------------------------------------------------------------------
# maximum principle, Liouville probe, zero witness


def _coordinate_sphere_max(u, center, rho, dim, count, seed, polish=True):
    pts = direction_sphere_points(dim, count, seed=seed)
    n = dim // 2
    vals = [u(center + rho * (w[:n] + 1j * w[n:])) for w in pts]
    k0 = int(np.argmax(vals))
    best = float(vals[k0])
    if polish:
        def endpoint(w):
            w = np.asarray(w, dtype=float)
            w = w / np.linalg.norm(w)
            return center + rho * (w[:n] + 1j * w[n:])

        polished, _ = _polish_direction(u, endpoint, pts[k0])
        best = max(best, polished)
    return best


def max_principle_check(chart, center, radius, u, count=48, seed=0,
                        tol=DEFAULT_TOL, bound_slack=1e-8):
    """Interior maximum of u against the boundary maximum on a sub-ball.

    First verifies the ellipticity hypothesis L[u] >= -tensor_rel on an
    interior sample grid; when that fails the bound is not checked and the
    verdict says so.  The boundary maximum is polished before comparing.
    """
    center = np.asarray(center, dtype=complex)
    n = chart.n
    chart.require_point(center)
    probes = direction_sphere_points(2 * n, count, seed=seed)
    interior = [center]
    for i, w in enumerate(probes):
        s = radius * ((i + 0.5) / count) ** (1.0 / (2 * n))
        interior.append(center + s * (w[:n] + 1j * w[n:]))

    worst_l = math.inf
    for p in interior:
        worst_l = min(worst_l, L_operator(chart, p, u, tol=tol))
    if worst_l < -tol.tensor_rel:
        return Verdict(kind="violation", worst_index=None,
                       magnitude=float(worst_l), slack=tol.tensor_rel,
                       checked=False,
                       note="L[u] hypothesis failed on the interior grid; "
                            "bound not checked")

    interior_max = max(float(u(p)) for p in interior)
    boundary_max = _coordinate_sphere_max(u, center, radius, 2 * n,
                                          2 * count, seed + 1)
    gap = interior_max - boundary_max
    if gap <= bound_slack:
        return Verdict(kind="bound-holds", worst_index=None,
                       magnitude=float(gap), slack=bound_slack)
    return Verdict(kind="violation", worst_index=None, magnitude=float(gap),
                   slack=bound_slack)


def liouville_probe(chart, o, f, profile, radii=None, count=32, seed=0,
                    refine=True, tol=DEFAULT_TOL):
    """Monotone quantity behind the Liouville conclusion.

    With h = f - f(o) and k its vanishing order, M_o(|h|, r) e^{-k v(r)}
    must be nondecreasing when the curvature dominates -q; equivalently
    log M - k v is nondecreasing, which is what gets checked.
    """
    if f.kind != "polynomial":
        raise GrowthError("liouville probe needs a polynomial entry")
    o = np.asarray(o, dtype=complex)
    h = f.poly - f.poly(o)
    if h.is_zero:
        raise GrowthError("liouville probe needs a nonconstant function")
    k = h.ord_at(o)
    if radii is None:
        hi = min(2.0, 0.8 * chart.injectivity_floor)
        radii = np.geomspace(0.2, hi, 8)
    cp = solve_profile(profile, T=max(10.0, 2.0 * float(np.max(radii))),
                       tol=tol)
    curve = growth_curve(chart, o, log_abs(h), radii, abscissa="v-profile",
                         profile=cp, count=count, seed=seed, refine=refine,
                         tol=tol, label=f"liouville:{f.name}")
    slacks = np.array([
        tol.convexity_slack * max(1.0, abs(curve.values[j]),
                                  abs(curve.values[j + 1]))
        for j in range(len(curve.values) - 1)
    ])
    return _monotone_verdict(curve.values - k * curve.t, slacks,
                             increasing=True,
                             note=f"ord={k}, profile={profile.name}")


def zero_witness_search(f, search_radius=10.0, grid_density=6, seed=0,
                        tol=1e-8, max_seeds=10):
    """Hunt a zero of a nonconstant polynomial, seeding from a coordinate ball.

    Grid seeds ranked by |f| feed a damped Newton flow on |f|^2 (step
    -f conj(grad f)/|grad f|^2 with halving); the flow itself is
    unconstrained, so the witness may land outside the seeding ball.
    Success is |f| < tol.  Returns the witness point or None.
    """
    if f.kind != "polynomial" or f.poly.degree < 1:
        raise GrowthError("zero search needs a nonconstant polynomial")
    poly = f.poly
    n = poly.n
    grads = [poly.derivative(i) for i in range(n)]

    seeds = [np.zeros(n, dtype=complex)]
    dirs = direction_sphere_points(2 * n, 8 * n * grid_density, seed=seed)
    for i, w in enumerate(dirs):
        s = search_radius * ((i % grid_density) + 1.0) / grid_density
        seeds.append(s * (w[:n] + 1j * w[n:]))
    seeds.sort(key=lambda z: abs(poly(z)))

    for z0 in seeds[:max_seeds]:
        z = np.array(z0, dtype=complex)
        for _ in range(50):
            fv = poly(z)
            if abs(fv) < tol:
                return z
            g = np.array([gd(z) for gd in grads])
            gn = float(np.sum(np.abs(g) ** 2))
            if gn < 1e-30:
                break
            step = -fv * np.conj(g) / gn
            lam = 1.0
            while lam > 1e-6 and abs(poly(z + lam * step)) >= abs(fv):
                lam *= 0.5
            if lam <= 1e-6:
                break
            z = z + lam * step
    return None


# ----------------------------------------------------------------------------
# counterexample scenario


def _radial_sphere_radius(r):
    """Euclidean radius rho of the arclength-r sphere of e^{|z|^2} delta.

    Along any complex line through the origin the metric is the same radial
    profile, so r(rho) = sqrt(2) int_0^rho e^{s^2/2} ds; invert by bisection.
    """

    def arclength(rho):
        val, _ = quadrature(lambda s: math.exp(0.5 * s * s), 0.0, rho)
        return math.sqrt(2.0) * val

    if r <= 0.0:
        return 0.0
    return float(brentq(lambda rho: arclength(rho) - r, 0.0, r, xtol=1e-14))


@dataclass(frozen=True, eq=False)
class CounterexampleReport:
    """Structured outcome of the negative-curvature counterexample run."""

    n: int
    functional_value: float
    functional_ok: bool
    growth_radius: float
    growth_margin: float
    growth_ok: bool
    oracle_gap: float
    curve: GrowthCurve
    convexity: Verdict
    convexity_ok: bool
    taylor_worst_margin: float
    taylor_ok: bool
    control_verdicts: dict
    controls_ok: bool

    @property
    def ok(self):
        return (self.functional_ok and self.growth_ok and self.convexity_ok
                and self.taylor_ok and self.controls_ok)


def counterexample_scenario(n=2, count=None, seed=0, tol=DEFAULT_TOL,
                            min_margin=1e-4, run_controls=True):
    """End-to-end verification that convexity genuinely fails on e^{|z|^2}.

    Four sub-checks on the conformal chart at the origin with f = z^1:
    (a) the direction functional R-term plus torsion square is negative;
    (b) some radius in (0, 1/2] has M/r below 1/sqrt(2) by a measured
        margin, cross-checked against the exact radial arclength oracle;
    (c) the log-r growth curve has a true convexity violation;
    (d) |f|^2 along sampled unit geodesics obeys the quartic bound
        t^2/2 + (functional/3)(t^4/4) up to explicit higher-order slack.
    Controls rerun the convexity check for f = z^1 on the flat and Poincare
    charts in their model abscissae and must stay clean.  Any failing
    sub-check aborts with diagnostics.
    """
    if count is None:
        count = 64 if n == 1 else 160
    chart = radial_conformal_chart(n, a=1.0, b=0.0)
    o = np.zeros(n, dtype=complex)
    f = function_catalog(n)[0]  # z^1
    failures = []

    jets = metric_jets(chart, o, order=2)
    tau0 = float(np.max(np.abs(torsion(chart, o, jets=jets))))
    if tau0 > 1e-10:
        failures.append(f"torsion at the origin should vanish, got {tau0:.3e}")
    e1 = np.zeros(n, dtype=complex)
    e1[0] = 1.0
    functional = converse_functional(chart, o, e1, jets=jets)
    functional_ok = functional < 0.0
    if not functional_ok:
        failures.append(f"direction functional {functional:.6g} is not negative")

    radii_b = np.geomspace(0.08, 0.5, 8)
    best_margin, best_r, worst_gap = -math.inf, math.nan, 0.0
    for r in radii_b:
        M, _, _ = sphere_max(chart, o, lambda z: abs(f(z)), float(r),
                             count=count, seed=seed, refine=True, tol=tol)
        oracle = _radial_sphere_radius(float(r))
        worst_gap = max(worst_gap, abs(M - oracle))
        margin = 1.0 / math.sqrt(2.0) - max(M, oracle) / float(r)
        if margin > best_margin:
            best_margin, best_r = margin, float(r)
    if worst_gap > 1e-5:
        failures.append(
            f"sampled sphere max strays {worst_gap:.3e} from the radial oracle"
        )
    growth_ok = best_margin >= min_margin
    if not growth_ok:
        failures.append(
            f"M/r never dropped {min_margin:g} below 1/sqrt(2) "
            f"(best margin {best_margin:.3e})"
        )

    curve = growth_curve(chart, o, log_abs(f), np.geomspace(0.1, 0.5, 9),
                         abscissa="log", count=count, seed=seed, refine=True,
                         tol=tol, label=f"counterexample:{f.name}")
    convexity = convexity_check(curve, tol=tol)
    convexity_ok = convexity.kind == "violation"
    if not convexity_ok:
        failures.append("expected a convexity violation on the conformal "
                        "chart, none found")

    dirs = tangent_directions(chart, o, 16, seed=seed + 1, jets=jets)
    dirs = np.vstack([dirs, e1 / math.sqrt(2.0)])
    taylor_worst = math.inf
    for X in dirs:
        path = integrate_geodesic(chart, o, X, 0.3, tol=tol)
        x = abs(X[0]) ** 2
        for t in (0.05, 0.1, 0.2, 0.3):
            lhs = abs(f(path.point(t))) ** 2
            slack = 4.0 * ((0.5 - x) * t ** 3
                           + math.sqrt(max(0.5 - x, 0.0)) * t ** 4 + t ** 5)
            rhs = 0.5 * t * t + (functional / 3.0) * (t ** 4 / 4.0) + slack
            taylor_worst = min(taylor_worst, rhs - lhs)
    taylor_ok = taylor_worst >= 0.0
    if not taylor_ok:
        failures.append(
            f"quartic growth bound failed by {-taylor_worst:.3e}"
        )

    control_verdicts = {}
    controls_ok = True
    if run_controls:
        controls = [
            (flat_chart(n), np.geomspace(0.1, 3.0, 9)),
            (poincare_chart(n), np.geomspace(0.1, 2.5, 9)),
        ]
        for ctrl, radii_c in controls:
            ctrl_curve = growth_curve(
                ctrl, np.zeros(n, dtype=complex), log_abs(f), radii_c,
                abscissa="log-tnK", K=ctrl.curvature_bound, count=count,
                seed=seed, refine=True, tol=tol,
                label=f"control:{ctrl.label}")
            verdict = convexity_check(ctrl_curve, tol=tol)
            control_verdicts[ctrl.label] = verdict
            if verdict.kind != "convex":
                controls_ok = False
                failures.append(
                    f"control chart {ctrl.label!r} reported {verdict.kind}"
                )

    if failures:
        raise GrowthError("counterexample scenario failed:\n  "
                          + "\n  ".join(failures))
    return CounterexampleReport(
        n=n, functional_value=float(functional), functional_ok=functional_ok,
        growth_radius=best_r, growth_margin=float(best_margin),
        growth_ok=growth_ok, oracle_gap=float(worst_gap), curve=curve,
        convexity=convexity, convexity_ok=convexity_ok,
        taylor_worst_margin=float(taylor_worst), taylor_ok=taylor_ok,
        control_verdicts=control_verdicts, controls_ok=controls_ok,
    )
