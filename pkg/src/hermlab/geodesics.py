"""Geodesic integration, exponential spheres, and normal coordinates.

Geodesics are curves of the Riemannian metric 2 Re g.  In complex
coordinates the second-order system reads

    d2z^i/dt2 + Gamma^i_{jk} zdot^j zdot^k
              + g^{lambdabar i} conj(tau^k_{j lambda}) g_{l kbar}
                conj(zdot^j) zdot^l = 0,

with Gamma and tau the Chern connection and torsion of the chart; the
conjugate-linear correction vanishes exactly on Kahler charts.  The state is
packed as (Re z, Im z, Re zdot, Im zdot) and integrated with dense output, so
one integration per direction serves every radius.  A direct Levi-Civita
integration in real coordinates is kept as an independent cross-check.

Unit directions carry (1,0)-components with sum_i |X^i|^2 = 1/2 wherever the
metric is the identity (see geometry.py for the norm convention), so on the
flat chart the time-t point of a unit geodesic sits at Euclidean radius
t/sqrt(2).

The cubic arc expansion of a unit geodesic about a point in normal
coordinates (unitary frame, vanishing symmetrized Christoffels) is

    z^i(t) = X^i t + (1/2) conj(tau^k_{ij}) Xbar^j X^k t^2 + c3^i t^3 + O(t^4),

with the t^3 coefficient built from the curvature-type field
-d_lbar Gamma^i_{jk}, first derivatives of conj(tau) g, and quadratic torsion
terms; see geodesic_taylor.  normal_holomorphic_coordinates produces the
cubic coordinate change that puts an arbitrary chart point into this shape.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np
import sympy as sp
from scipy.special import ndtri
from scipy.stats import qmc

from .geometry import (
    DomainSpec,
    GeometryError,
    HermitianChart,
    chern_christoffels,
    hermitian_norm,
    levi_civita_christoffels,
    metric_jets,
    real_norm,
    unit_vector,
    unitary_frame,
)
from .numerics import (
    DEFAULT_TOL,
    FD_MODE,
    ANALYTIC_MODE,
    IntegrationError,
    SymbolicField,
    differentiate,
    field_symbols,
    integrate_ode,
)

__all__ = [
    "GeodesicPath",
    "direction_sphere_points",
    "tangent_directions",
    "integrate_geodesic",
    "integrate_geodesic_levi_civita",
    "geodesic_fan",
    "exp_sphere",
    "TaylorData",
    "TaylorArc",
    "taylor_data",
    "geodesic_taylor",
    "NormalCoordinateMap",
    "normal_holomorphic_coordinates",
    "taylor_probe",
]


# ----------------------------------------------------------------------------
# direction sampling


def direction_sphere_points(dim, count, seed=0):
    """Low-discrepancy points on the unit sphere of R^dim.

    Scrambled Halton points are pushed through the inverse normal CDF and
    normalized, which preserves the low-discrepancy structure under the
    rotation-invariant map.  Deterministic for a fixed seed.
    """
    if dim < 1 or count < 1:
        raise ValueError("need dim >= 1 and count >= 1")
    sampler = qmc.Halton(d=dim, scramble=True, seed=seed)
    u = np.clip(sampler.random(count), 1e-12, 1.0 - 1e-12)
    x = ndtri(u)
    norms = np.linalg.norm(x, axis=1)
    bad = norms < 1e-9
    if np.any(bad):
        x[bad] = 0.0
        x[bad, 0] = 1.0
        norms[bad] = 1.0
    return x / norms[:, None]


def tangent_directions(chart, o, count, seed=0, frame=None, jets=None):
    """Unit real tangent directions at o, as (count, n) (1,0)-components.

    Directions are spread over the unit sphere of the tangent space through a
    unitary frame, so the sampling is uniform with respect to the metric at o
    rather than the coordinate expression.
    """
    n = chart.n
    if frame is None:
        frame = unitary_frame(chart, o, jets=jets)
    pts = direction_sphere_points(2 * n, count, seed=seed)
    comps = (pts[:, :n] + 1j * pts[:, n:]) / math.sqrt(2.0)
    dirs = comps @ frame.T
    G = metric_jets(chart, o, order=0).G if jets is None else jets.G
    return np.stack([unit_vector(chart, o, d, G=G) for d in dirs])


# ----------------------------------------------------------------------------
# integration


@dataclass(frozen=True, eq=False)
class GeodesicPath:
    """Unit-speed geodesic from a base point, with dense evaluation.

    point(t) and velocity(t) return (1,0)-components; t_end is the largest
    usable parameter (smaller than requested when the curve left the chart
    domain, in which case exited is set).  speed_drift records the largest
    observed deviation of |gamma'| from its initial value and is the primary
    integration diagnostic.
    """

    chart: HermitianChart
    base: np.ndarray
    direction: np.ndarray
    t_end: float
    exited: bool
    initial_speed: float
    speed_drift: float
    sol: Optional[object] = None
    exact: Optional[Callable] = None

    def _require_t(self, t):
        if t < -1e-12 or t > self.t_end * (1.0 + 1e-12) + 1e-15:
            raise ValueError(
                f"t={t:g} outside the integrated range [0, {self.t_end:g}]"
            )
        return min(max(t, 0.0), self.t_end)

    def point(self, t):
        t = self._require_t(t)
        n = len(self.base)
        if self.exact is not None:
            return np.asarray(self.exact(t), dtype=complex)
        y = self.sol(t)
        return y[:n] + 1j * y[n : 2 * n]

    def velocity(self, t):
        n = len(self.base)
        if self.exact is not None:
            # five-point stencil on the closed form; the forms extend
            # smoothly to small negative t
            h = 1e-5 * max(1.0, abs(t))
            zs = [np.asarray(self.exact(t + k * h), dtype=complex)
                  for k in (-2, -1, 1, 2)]
            return (zs[0] - 8.0 * zs[1] + 8.0 * zs[2] - zs[3]) / (12.0 * h)
        t = self._require_t(t)
        y = self.sol(t)
        return y[2 * n : 3 * n] + 1j * y[3 * n :]

    def __call__(self, t):
        return self.point(t)


def _domain_center(domain, n):
    if domain.center:
        return np.asarray(domain.center, dtype=complex)
    return np.zeros(n, dtype=complex)


def _clamp_to_domain(domain, z, margin):
    # keep metric evaluations legal while a trial step overshoots the exit
    # event; accepted steps never live in the clamped shell
    if not np.isfinite(domain.radius):
        return z
    center = _domain_center(domain, len(z))
    r_max = domain.radius - margin
    w = z - center
    if domain.kind == "ball":
        r = float(np.linalg.norm(w))
        if r > r_max:
            w *= r_max / r
    else:
        mods = np.abs(w)
        over = mods > r_max
        if np.any(over):
            w[over] *= r_max / mods[over]
    return center + w


def _exit_margin(chart):
    from .geometry import _field_mode  # local: keeps the helper private

    if not np.isfinite(chart.domain.radius):
        return 0.0
    mode = _field_mode(chart.metric, chart.mode)
    if mode.kind == "analytic-callback":
        return 1e-4 * max(1.0, chart.domain.radius)
    scale = max(1.0, float(np.max(np.abs(chart.domain.center)))
                + chart.domain.radius)
    return max(1e-3, 64.0 * mode.step * scale)


def _exit_event(chart, margin):
    domain = chart.domain
    if not np.isfinite(domain.radius):
        return None
    n = chart.n
    center = _domain_center(domain, n)
    r_stop = domain.radius - margin

    def event(t, y):
        z = y[:n] + 1j * y[n : 2 * n]
        w = z - center
        if domain.kind == "ball":
            return r_stop - float(np.linalg.norm(w))
        return r_stop - float(np.max(np.abs(w)))

    event.terminal = True
    event.direction = -1.0
    return event


def _speed_samples(chart, path_sol, n, t_end, samples=33):
    speeds = []
    for t in np.linspace(0.0, t_end, samples):
        y = path_sol(t)
        z = y[:n] + 1j * y[n : 2 * n]
        v = y[2 * n : 3 * n] + 1j * y[3 * n :]
        G = metric_jets(chart, z, order=0).G
        speeds.append(real_norm(G, v))
    return np.asarray(speeds)


def _finish_path(chart, o, X, t_max, ode, tol):
    n = chart.n
    t_end = ode.t_end
    speeds = _speed_samples(chart, ode.sol, n, t_end)
    drift = float(np.max(np.abs(speeds - speeds[0])))
    scale = max(1.0, speeds[0])
    if drift > max(1e3 * tol.ode_rel * scale, 1e-7 * scale):
        raise IntegrationError(
            f"geodesic speed drifted by {drift:.3e} on chart {chart.label!r}"
        )
    return GeodesicPath(
        chart=chart,
        base=np.asarray(o, dtype=complex),
        direction=np.asarray(X, dtype=complex),
        t_end=t_end,
        exited=ode.exited,
        initial_speed=float(speeds[0]),
        speed_drift=drift,
        sol=ode.sol,
    )


def integrate_geodesic(chart, o, X, t_max, tol=DEFAULT_TOL):
    """Integrate the geodesic with gamma(0) = o, gamma'(0) = X up to t_max.

    Uses the complex-coordinate form of the geodesic equation driven by the
    Chern connection and torsion of the chart.  On finite domains the
    integration stops at a safety shell inside the boundary and flags the
    path as exited.
    """
    n = chart.n
    margin = _exit_margin(chart)
    o = chart.require_point(o, margin=margin)
    X = np.asarray(X, dtype=complex)
    clamp = margin / 2.0

    def rhs(t, y):
        z = _clamp_to_domain(chart.domain, y[:n] + 1j * y[n : 2 * n], clamp)
        v = y[2 * n : 3 * n] + 1j * y[3 * n :]
        jets = metric_jets(chart, z, order=1)
        gamma = chern_christoffels(chart, z, jets=jets)
        tau = gamma - gamma.transpose(1, 0, 2)
        acc = -np.einsum("jki,j,k->i", gamma, v, v)
        acc -= np.einsum("ai,jak,lk,j,l->i", jets.Ginv, np.conj(tau), jets.G,
                         np.conj(v), v)
        return np.concatenate([v.real, v.imag, acc.real, acc.imag])

    y0 = np.concatenate([o.real, o.imag, X.real, X.imag])
    events = _exit_event(chart, margin)
    ode = integrate_ode(rhs, 0.0, float(t_max), y0, tol=tol.scaled(0.1),
                        events=None if events is None else [events])
    return _finish_path(chart, o, X, t_max, ode, tol)


def integrate_geodesic_levi_civita(chart, o, X, t_max, tol=DEFAULT_TOL):
    """Same geodesic, integrated from the real-coordinate Christoffels.

    Independent of the complex-coordinate route (no Chern connection, no
    torsion correction); kept as a consistency check on both formulations.
    """
    n = chart.n
    margin = _exit_margin(chart)
    o = chart.require_point(o, margin=margin)
    X = np.asarray(X, dtype=complex)
    clamp = margin / 2.0

    def rhs(t, y):
        z = _clamp_to_domain(chart.domain, y[:n] + 1j * y[n : 2 * n], clamp)
        xd = y[2 * n :]
        gamma_r = levi_civita_christoffels(chart, z)
        acc = -np.einsum("abc,a,b->c", gamma_r, xd, xd)
        return np.concatenate([xd, acc])

    y0 = np.concatenate([o.real, o.imag, X.real, X.imag])
    events = _exit_event(chart, margin)
    ode = integrate_ode(rhs, 0.0, float(t_max), y0, tol=tol.scaled(0.1),
                        events=None if events is None else [events])
    return _finish_path(chart, o, X, t_max, ode, tol)


def _exact_path(chart, o, X, t_max):
    if chart.exact_exp is None:
        return None
    probe = chart.exact_exp(o, X, 0.5 * t_max)
    if probe is None:
        return None

    def arc(t):
        return chart.exact_exp(o, X, t)

    return GeodesicPath(
        chart=chart,
        base=np.asarray(o, dtype=complex),
        direction=np.asarray(X, dtype=complex),
        t_end=float(t_max),
        exited=False,
        initial_speed=real_norm(metric_jets(chart, o, order=0).G, X),
        speed_drift=0.0,
        exact=arc,
    )


def geodesic_fan(chart, o, directions, t_max, tol=DEFAULT_TOL,
                 prefer_exact=True):
    """One dense geodesic per direction, reused across radii by the caller."""
    paths = []
    for X in np.atleast_2d(np.asarray(directions, dtype=complex)):
        path = _exact_path(chart, o, X, t_max) if prefer_exact else None
        if path is None:
            path = integrate_geodesic(chart, o, X, t_max, tol=tol)
        paths.append(path)
    return paths


def exp_sphere(chart, o, r, directions, tol=DEFAULT_TOL):
    """Exponential-sphere points exp_o(r X) for each unit direction X.

    Returns (points, reached); reached is False where the geodesic left the
    chart domain before arclength r, and such rows hold the last usable
    point instead.
    """
    if r < 0.0:
        raise ValueError("sphere radius must be nonnegative")
    directions = np.atleast_2d(np.asarray(directions, dtype=complex))
    points = np.empty_like(directions)
    reached = np.ones(len(directions), dtype=bool)
    for k, X in enumerate(directions):
        if chart.exact_exp is not None:
            z = chart.exact_exp(o, X, r)
            if z is not None:
                points[k] = z
                continue
        path = integrate_geodesic(chart, o, X, r, tol=tol)
        if path.exited and path.t_end < r:
            reached[k] = False
            points[k] = path.point(path.t_end)
        else:
            points[k] = path.point(r)
    return points, reached


# ----------------------------------------------------------------------------
# cubic arc expansion in normal coordinates


@dataclass(frozen=True, eq=False)
class TaylorData:
    """Direction-independent ingredients of the cubic arc expansion at o."""

    point: np.ndarray
    tau: np.ndarray
    curv: np.ndarray  # curv[l, i, j, k] = d_lbar Gamma^k_{ij}
    dF_holo: np.ndarray  # dF_holo[m, l, j, i] = d_m (conj(tau^k_{ji}) g_{l kbar})
    dF_anti: np.ndarray


def taylor_data(chart, o, tol=DEFAULT_TOL):
    """Precompute the fields entering geodesic_taylor at a normal point.

    Requires normal coordinates at o: the metric must be the identity and
    the symmetrized Christoffels must vanish there, which is what
    normal_holomorphic_coordinates arranges.
    """
    n = chart.n
    jets = metric_jets(chart, o, order=1)
    scale = max(1.0, float(np.max(np.abs(jets.G))))
    if float(np.max(np.abs(jets.G - np.eye(n)))) > 1e-6 * scale:
        raise GeometryError(
            "geodesic expansion needs the metric to be the identity at the "
            "base point; pull the chart back through "
            "normal_holomorphic_coordinates first"
        )
    gamma = chern_christoffels(chart, o, jets=jets)
    sym = 0.5 * (gamma + gamma.transpose(1, 0, 2))
    if float(np.max(np.abs(sym))) > 1e-6:
        raise GeometryError(
            "geodesic expansion needs vanishing symmetrized Christoffels at "
            "the base point (normal coordinates)"
        )
    tau = gamma - gamma.transpose(1, 0, 2)

    def gamma_field(z):
        return chern_christoffels(chart, z)

    def f_field(z):
        jz = metric_jets(chart, z, order=1)
        gam = chern_christoffels(chart, z, jets=jz)
        tz = gam - gam.transpose(1, 0, 2)
        return np.einsum("jik,lk->lji", np.conj(tz), jz.G)

    def unit(i):
        mi = [0] * n
        mi[i] = 1
        return tuple(mi)

    curv = np.stack(
        [differentiate(gamma_field, o, anti=unit(l), mode=FD_MODE)
         for l in range(n)]
    )
    dF_holo = np.stack(
        [differentiate(f_field, o, holo=unit(m), mode=FD_MODE)
         for m in range(n)]
    )
    dF_anti = np.stack(
        [differentiate(f_field, o, anti=unit(m), mode=FD_MODE)
         for m in range(n)]
    )
    return TaylorData(point=np.asarray(o, dtype=complex), tau=tau, curv=curv,
                      dF_holo=dF_holo, dF_anti=dF_anti)


@dataclass(frozen=True, eq=False)
class TaylorArc:
    """Cubic model arc t -> o + c1 t + c2 t^2 + c3 t^3 of a geodesic."""

    base: np.ndarray
    c1: np.ndarray
    c2: np.ndarray
    c3: np.ndarray

    def __call__(self, t):
        t = float(t)
        return self.base + t * (self.c1 + t * (self.c2 + t * self.c3))


def geodesic_taylor(chart, o, X, data=None, tol=DEFAULT_TOL):
    """Third-order expansion of the geodesic with gamma'(0) = X at a normal
    point.

    The t^2 coefficient is (1/2) conj(tau^k_{ij}) Xbar^j X^k.  The t^3
    coefficient collects the antiholomorphic Christoffel derivative (the
    curvature-type contraction), the quadratic torsion terms, and the first
    derivatives of conj(tau) g; each contraction is written out below against
    the stored index layouts tau[i, j, k] = tau^k_{ij} and
    curv[l, i, j, k] = d_lbar Gamma^k_{ij}.
    """
    if data is None:
        data = taylor_data(chart, o, tol=tol)
    X = np.asarray(X, dtype=complex)
    Xc = np.conj(X)
    tau = data.tau
    tau_c = np.conj(tau)

    c2 = 0.5 * np.einsum("ijk,j,k->i", tau_c, Xc, X)

    # R-type term: - d_lbar Gamma^i_{jk} X^j X^k Xbar^l
    a1 = -np.einsum("ljki,j,k,l->i", data.curv, X, X, Xc)
    # (1/2) tau^i_{lam j} conj(tau^k_{lam l}) X^j X^k Xbar^l
    a2 = 0.5 * np.einsum("aji,alk,j,k,l->i", tau, tau_c, X, X, Xc)
    # - conj(tau^k_{lam i}) tau^l_{lam j} X^j X^k Xbar^l
    a3 = -np.einsum("aik,ajl,j,k,l->i", tau_c, tau, X, X, Xc)
    # - d_mu F_{l j i} X^mu X^l Xbar^j and its antiholomorphic partner,
    # F_{l j i} = conj(tau^k_{ji}) g_{l kbar}
    b1 = np.einsum("mlji,m,l,j->i", data.dF_holo, X, X, Xc)
    b2 = np.einsum("mlji,m,l,j->i", data.dF_anti, Xc, X, Xc)
    # - (3/2) conj(tau^k_{ji}) conj(tau^mu_{k lam}) Xbar^lam X^mu Xbar^j
    b3 = 1.5 * np.einsum("jik,kam,a,m,j->i", tau_c, tau_c, Xc, X, Xc)

    c3 = (a1 + a2 + a3 - (b1 + b2 + b3)) / 6.0
    return TaylorArc(base=np.asarray(data.point, dtype=complex),
                     c1=X, c2=c2, c3=c3)


# ----------------------------------------------------------------------------
# normal holomorphic coordinates


@dataclass(frozen=True, eq=False)
class NormalCoordinateMap:
    """Cubic holomorphic coordinate change w -> z centered at a chart point.

    apply(0) = origin and jacobian(0) = frame; quad and cubic are the
    symmetric coefficient arrays of the polynomial part.  In the new
    coordinates the metric is the identity at 0, the symmetrized
    Christoffels vanish at 0, and the symmetrized first derivatives of the
    symmetrized Christoffels vanish at 0.
    """

    chart: HermitianChart
    origin: np.ndarray
    frame: np.ndarray
    quad: np.ndarray
    cubic: np.ndarray

    @property
    def n(self):
        return len(self.origin)

    def apply(self, w):
        w = np.asarray(w, dtype=complex)
        return (self.origin + self.frame @ w
                + np.einsum("kab,a,b->k", self.quad, w, w)
                + np.einsum("kabc,a,b,c->k", self.cubic, w, w, w))

    def __call__(self, w):
        return self.apply(w)

    def jacobian(self, w):
        w = np.asarray(w, dtype=complex)
        return (self.frame + 2.0 * np.einsum("kab,b->ka", self.quad, w)
                + 3.0 * np.einsum("kabc,b,c->ka", self.cubic, w, w))

    def to_normal(self, X):
        """(1,0)-components at the origin -> components in the w chart."""
        return np.linalg.solve(self.frame, np.asarray(X, dtype=complex))

    def _safe_radius(self, radius):
        if radius is not None:
            return float(radius)
        domain = self.chart.domain
        if not np.isfinite(domain.radius):
            return 0.75
        slack = domain.radius - float(
            np.linalg.norm(self.origin - _domain_center(domain, self.n))
        )
        r = 0.4 * slack / max(1.0, float(np.linalg.norm(self.frame, 2)))
        probes = direction_sphere_points(2 * self.n, 16, seed=1)
        probes = (probes[:, : self.n] + 1j * probes[:, self.n :])
        for _ in range(8):
            if all(domain.contains(self.apply(r * w), margin=1e-9)
                   for w in probes):
                return r
            r *= 0.5
        raise GeometryError("could not fit a normal chart inside the domain")

    def pullback_chart(self, radius=None, label=None):
        """Chart whose metric is the original metric seen through the map.

        g_new[a, b](w) = sum J_ia g_{i jbar}(P(w)) conj(J_jb); built
        symbolically when the source metric is symbolic (exact derivatives),
        otherwise as a plain callable differentiated by finite differences.
        """
        n = self.n
        r = self._safe_radius(radius)
        name = label or f"normal@{self.chart.label}"
        domain = DomainSpec(kind="ball", radius=r)
        if isinstance(self.chart.metric, SymbolicField):
            ts = sp.symbols(f"_w0:{n}", complex=True)
            tc = sp.symbols(f"_wc0:{n}", complex=True)
            P = []
            Pc = []
            for k in range(n):
                expr = sp.sympify(complex(self.origin[k]))
                exprc = sp.sympify(complex(np.conj(self.origin[k])))
                for a in range(n):
                    expr += complex(self.frame[k, a]) * ts[a]
                    exprc += complex(np.conj(self.frame[k, a])) * tc[a]
                    for b in range(n):
                        expr += complex(self.quad[k, a, b]) * ts[a] * ts[b]
                        exprc += complex(np.conj(self.quad[k, a, b])) \
                            * tc[a] * tc[b]
                        for c in range(n):
                            expr += complex(self.cubic[k, a, b, c]) \
                                * ts[a] * ts[b] * ts[c]
                            exprc += complex(np.conj(self.cubic[k, a, b, c])) \
                                * tc[a] * tc[b] * tc[c]
                P.append(sp.expand(expr))
                Pc.append(sp.expand(exprc))
            zs, zc = field_symbols(n)
            subs = {}
            for i in range(n):
                subs[zs[i]] = P[i]
                subs[zc[i]] = Pc[i]
            g_sub = self.chart.metric.expr.subs(subs, simultaneous=True)
            jac = sp.Matrix(n, n, lambda i, a: sp.diff(P[i], ts[a]))
            jac_c = sp.Matrix(n, n, lambda j, b: sp.diff(Pc[j], tc[b]))
            g_new = jac.T * sp.Matrix(g_sub) * jac_c
            ws, wc = field_symbols(n)
            rename = dict(zip(ts, ws)) | dict(zip(tc, wc))
            g_new = g_new.subs(rename)
            return HermitianChart(
                n=n,
                metric=SymbolicField(n, g_new),
                domain=domain,
                label=name,
                injectivity_floor=r,
                mode=ANALYTIC_MODE,
            )

        def metric(w):
            z = self.apply(w)
            J = self.jacobian(w)
            G = np.asarray(self.chart.metric(z), dtype=complex)
            return J.T @ G @ np.conj(J)

        return HermitianChart(
            n=n,
            metric=metric,
            domain=domain,
            label=name,
            injectivity_floor=r,
            mode=FD_MODE,
        )


def normal_holomorphic_coordinates(chart, o, frame=None, tol=DEFAULT_TOL):
    """Build the cubic normal-coordinate map at o for a unitary frame.

    Stage one kills the symmetrized Christoffels at the point with a
    quadratic term; stage two kills the symmetrized derivative with a cubic
    term, using that the stage-one connection already vanishes at the
    center.  Both corrections are exact polynomial identities in the jets of
    the metric at o, no optimization involved.
    """
    n = chart.n
    jets = metric_jets(chart, o, order=2)
    if frame is None:
        E = unitary_frame(chart, o, jets=jets)
    else:
        E = np.asarray(frame, dtype=complex)
        defect = float(np.max(np.abs(E.T @ jets.G @ np.conj(E) - np.eye(n))))
        if defect > 1e-8:
            raise GeometryError(
                f"frame is not unitary for the metric at o (defect {defect:.3e})"
            )

    gamma = chern_christoffels(chart, o, jets=jets)
    ghat = 0.5 * (gamma + gamma.transpose(1, 0, 2))

    # coefficient of w^b w^c in z^k; kills Gamma-hat at the center
    quad = -0.5 * np.einsum("ib,jc,ijk->kbc", E, E, ghat)

    # d_m Gamma^k_{ij}, then symmetrized in (i, j)
    dginv = -np.einsum("lp,mpq,qk->mlk", jets.Ginv, jets.d1, jets.Ginv)
    dgamma = (np.einsum("ijl,mlk->mijk", jets.d1, dginv)
              + np.einsum("mijl,lk->mijk", jets.d2, jets.Ginv))
    dghat = 0.5 * (dgamma + dgamma.transpose(0, 2, 1, 3))

    # derivative at 0 of the stage-one connection, using that its value
    # at 0 vanishes so the inverse-jacobian derivative drops out
    term = 2.0 * np.einsum("iab,jc,ijk->kabc", quad, E, ghat)
    term += 2.0 * np.einsum("jac,ib,ijk->kabc", quad, E, ghat)
    term += np.einsum("ib,jc,ma,mijk->kabc", E, E, E, dghat)
    d_stage1 = np.einsum("dk,kabc->dabc", np.linalg.inv(E), term)

    sym = -(d_stage1 + d_stage1.transpose(0, 2, 3, 1)
            + d_stage1.transpose(0, 3, 1, 2)) / 3.0
    cubic = np.einsum("kl,labc->kabc", E, sym) / 6.0
    # symmetrize the cubic coefficient storage; only the symmetric part
    # enters the polynomial
    cubic = (cubic + cubic.transpose(0, 2, 3, 1) + cubic.transpose(0, 3, 1, 2)
             + cubic.transpose(0, 1, 3, 2) + cubic.transpose(0, 3, 2, 1)
             + cubic.transpose(0, 2, 1, 3)) / 6.0

    return NormalCoordinateMap(chart=chart, origin=np.asarray(o, dtype=complex),
                               frame=E, quad=quad, cubic=cubic)


def taylor_probe(chart, origin=None, ts=(0.1, 0.05, 0.025), count=10,
                 seed=0, tol=DEFAULT_TOL, exact_floor=1e-12):
    """Convergence order of the cubic arc against the integrated geodesic.

    The chart is pulled back through normal holomorphic coordinates at the
    origin, the cubic expansion is evaluated there and pushed forward, and
    the discrepancy against direct integration in the original chart is
    fitted as err ~ t^order.  When the worst discrepancy is already below
    exact_floor the expansion is exact to noise and the order reports inf.
    Returns (orders, worst_errors), one entry per direction.
    """
    if origin is None:
        origin = np.zeros(chart.n, dtype=complex)
    origin = np.asarray(origin, dtype=complex)
    ts = np.asarray(sorted(ts, reverse=True), dtype=float)
    if len(ts) < 2:
        raise ValueError("need at least two probe times")

    nmap = normal_holomorphic_coordinates(chart, origin, tol=tol)
    pulled = nmap.pullback_chart()
    data = taylor_data(pulled, np.zeros(chart.n, dtype=complex), tol=tol)
    dirs = tangent_directions(chart, origin, count, seed=seed)

    orders = np.empty(len(dirs))
    worst = np.empty(len(dirs))
    for k, X in enumerate(dirs):
        w = nmap.to_normal(X)
        arc = geodesic_taylor(pulled, np.zeros(chart.n, dtype=complex), w,
                              data=data, tol=tol)
        path = integrate_geodesic(chart, origin, X, float(ts[0]), tol=tol)
        errs = np.array([
            float(np.max(np.abs(nmap.apply(arc(t)) - path.point(t))))
            for t in ts
        ])
        worst[k] = errs.max()
        if worst[k] <= exact_floor:
            orders[k] = math.inf
        else:
            orders[k] = float(np.polyfit(np.log(ts), np.log(errs + 1e-300),
                                         1)[0])
    return orders, worst
