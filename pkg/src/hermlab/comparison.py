"""Comparison ODE u'' = q u and the growth abscissa it generates.

For a nonnegative decay profile q the solution with u(0) = 0, u'(0) = 1
defines h = u'/u and the reparametrization v with v' = 1/u, fixed by
v = log t + o(1) as t -> 0.  Three facts drive everything downstream:

* u' is nondecreasing, and when int_0^inf t q dt converges u' stays below
  I(q) = exp(int_0^inf t q dt);
* for t > 1, the abscissa is pinched between logarithms,
  log t + v(1) >= v(t) >= (1/I(q)) log t + v(1);
* for q = -K constant curvature the abscissa closes to
  v = log tanh(t/2) + const (K = -1 after scaling), which is where the
  tn-family of model radii comes from.

I(q) is always reported as a certified upper bound: adaptive quadrature up
to a cut plus an exact closed-form tail, so "grows at most like the model"
conclusions drawn from 1/I(q) stay valid.

The ODE is never integrated in h or v directly (h blows up like 1/t at the
origin); the augmented state (u, u', w) with w = v - log t starts from the
regular data (t0, 1, 0) at a tiny t0 and stays smooth.
"""

from __future__ import annotations

import bisect
import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .geometry import holomorphic_sectional_curvature, metric_jets, unit_vector
from .geodesics import geodesic_fan, tangent_directions
from .numerics import DEFAULT_TOL, IntegrationError, integrate_ode, quadrature

__all__ = [
    "ProfileError",
    "DecayProfile",
    "zero_profile",
    "constant_profile",
    "bump_profile",
    "inverse_cube_profile",
    "log_weak_profile",
    "PROFILE_BUILDERS",
    "make_profile",
    "default_profiles",
    "compute_Iq",
    "tn",
    "ComparisonProfile",
    "solve_profile",
    "BoundsReport",
    "verify_bounds",
    "HLowerCurve",
    "h_lower_profile",
    "hypothesis_margin",
]


class ProfileError(RuntimeError):
    """Invalid decay profile or comparison request."""


@dataclass(frozen=True, eq=False)
class DecayProfile:
    """Nonnegative profile q(t) on [0, inf) with certified integral data.

    tail_bound(T) must bound int_T^inf t q dt from above (closed forms in
    the catalog are exact); integrable declares whether that integral is
    finite at all.  breakpoints lists discontinuities of q so integrations
    can stop and restart there.
    """

    name: str
    q: Callable
    integrable: bool
    tail_bound: Optional[Callable] = None
    breakpoints: tuple = ()
    params: dict = field(default_factory=dict)


def zero_profile():
    """q = 0; u = t, v = log t, I(q) = 1."""
    return DecayProfile(name="zero", q=lambda t: 0.0, integrable=True,
                        tail_bound=lambda T: 0.0)


def constant_profile(c=1.0):
    """q = c; for c > 0 the integral diverges and u' grows unboundedly."""
    if c < 0.0:
        raise ProfileError("constant profile needs c >= 0")
    return DecayProfile(name="constant", q=lambda t: c, integrable=(c == 0.0),
                        tail_bound=(lambda T: 0.0) if c == 0.0 else None,
                        params={"c": c})


def bump_profile(c=1.0, R=1.0):
    """q = c on [0, R], zero after; int t q = c R^2 / 2 exactly."""
    if c < 0.0 or R <= 0.0:
        raise ProfileError("bump profile needs c >= 0 and R > 0")

    def q(t):
        return c if t <= R else 0.0

    def tail(T):
        return 0.5 * c * (R * R - T * T) if T < R else 0.0

    return DecayProfile(name="bump", q=q, integrable=True, tail_bound=tail,
                        breakpoints=(R,), params={"c": c, "R": R})


def inverse_cube_profile(C=2.0):
    """q = C/(1+t)^3; int t q = C/2, so C = 2 gives I(q) = e."""
    if C < 0.0:
        raise ProfileError("inverse cube profile needs C >= 0")

    def tail(T):
        return C * (1.0 / (1.0 + T) - 0.5 / (1.0 + T) ** 2)

    return DecayProfile(name="inverse-cube", q=lambda t: C / (1.0 + t) ** 3,
                        integrable=True, tail_bound=tail, params={"C": C})


def log_weak_profile(C=1.0, eps=0.5):
    """q = C / ((1+t)^2 log^{1+eps}(2+t)): integrable, but only just.

    The tail uses t q <= C / ((1+t) log^{1+eps}(1+t)), whose integral from T
    is C / (eps log^eps(1+T)) exactly.
    """
    if C < 0.0 or eps <= 0.0:
        raise ProfileError("log-weak profile needs C >= 0 and eps > 0")

    def q(t):
        return C / ((1.0 + t) ** 2 * math.log(2.0 + t) ** (1.0 + eps))

    def tail(T):
        return C / (eps * math.log(1.0 + T) ** eps)

    return DecayProfile(name="log-weak", q=q, integrable=True,
                        tail_bound=tail, params={"C": C, "eps": eps})


PROFILE_BUILDERS = {
    "zero": zero_profile,
    "constant": constant_profile,
    "bump": bump_profile,
    "inverse-cube": inverse_cube_profile,
    "log-weak": log_weak_profile,
}


def make_profile(name, **params):
    try:
        builder = PROFILE_BUILDERS[name]
    except KeyError:
        known = ", ".join(sorted(PROFILE_BUILDERS))
        raise ProfileError(f"unknown profile {name!r}; catalog: {known}") from None
    return builder(**params)


def default_profiles():
    return [
        zero_profile(),
        constant_profile(1.0),
        bump_profile(1.0, 1.0),
        inverse_cube_profile(2.0),
        log_weak_profile(1.0, 0.5),
    ]


def compute_Iq(profile, T_cut=50.0, tol=DEFAULT_TOL):
    """Certified upper bound on I(q) = exp(int_0^inf t q dt).

    Adaptive quadrature on [0, T_cut] split at the profile breakpoints, with
    the quadrature error estimate and the closed-form tail bound added on
    top, so the result can only overestimate.  Infinite for non-integrable
    profiles.
    """
    if not profile.integrable:
        return math.inf
    if profile.tail_bound is None:
        raise ProfileError(
            f"profile {profile.name!r} declares integrability without a "
            "tail bound"
        )
    cuts = [0.0] + [b for b in sorted(profile.breakpoints) if b < T_cut] \
        + [T_cut]
    total = 0.0
    for a, b in zip(cuts[:-1], cuts[1:]):
        val, err = quadrature(lambda t: t * profile.q(t), a, b)
        total += val + abs(err)
    total += float(profile.tail_bound(T_cut))
    if total < 0.0:
        raise ProfileError("profile integrated to a negative mass")
    return math.exp(total)


def tn(K, t):
    """Model radius family: tan / identity / tanh depending on the sign of K.

    tn_K(t) = tan(sqrt(K) t)/sqrt(K) for K > 0 (needs sqrt(K) t < pi/2),
    t for K = 0, and tanh(sqrt(-K) t)/sqrt(-K) for K < 0; continuous in K.
    """
    if t < 0.0:
        raise ValueError("tn expects t >= 0")
    if K > 0.0:
        s = math.sqrt(K)
        if s * t >= math.pi / 2.0:
            raise ValueError("tan branch needs sqrt(K) t < pi/2")
        return math.tan(s * t) / s
    if K < 0.0:
        s = math.sqrt(-K)
        return math.tanh(s * t) / s
    return t


# ----------------------------------------------------------------------------
# solving the comparison ODE


@dataclass(frozen=True, eq=False)
class ComparisonProfile:
    """Dense solution data of u'' = q u with the abscissa attached.

    Arrays are sampled on a geometric grid; *_at methods evaluate the dense
    interpolant anywhere in (0, T].  Iq is the certified upper bound for
    the profile (inf when non-integrable).
    """

    profile: DecayProfile
    T: float
    grid: np.ndarray
    u: np.ndarray
    up: np.ndarray
    h: np.ndarray
    v: np.ndarray
    vp: np.ndarray
    Iq: float
    pieces: list

    def _state(self, t):
        t = float(t)
        if t <= 0.0 or t > self.T * (1.0 + 1e-12):
            raise ValueError(f"t={t:g} outside the solved range (0, {self.T:g}]")
        start = self.pieces[0][0]
        if t <= start:
            return np.array([t, 1.0, 0.0])
        ends = [b for (_, b, _) in self.pieces]
        k = min(bisect.bisect_left(ends, t), len(self.pieces) - 1)
        return self.pieces[k][2](min(t, self.T))

    def u_at(self, t):
        return float(self._state(t)[0])

    def up_at(self, t):
        return float(self._state(t)[1])

    def h_at(self, t):
        s = self._state(t)
        return float(s[1] / s[0])

    def v_at(self, t):
        return float(math.log(t) + self._state(t)[2])

    def vp_at(self, t):
        return float(1.0 / self._state(t)[0])


def solve_profile(profile, T=50.0, tol=DEFAULT_TOL, nodes=400, t_start=1e-8):
    """Integrate u'' = q u from u(0) = 0, u'(0) = 1 up to T.

    The augmented state carries w = v - log t alongside (u, u'), started
    from the regular limit (t0, 1, 0); the returned object exposes u, u',
    h = u'/u, v = log t + w and v' = 1/u on a geometric grid of at least
    ``nodes`` points spanning [1e-4, T].
    """
    if T <= 10.0 * t_start:
        raise ProfileError("horizon T is too small")
    grid = np.geomspace(1e-4, T, max(400, int(nodes)))
    probes = np.concatenate([grid, np.asarray(profile.breakpoints, dtype=float)])
    qvals = np.array([profile.q(float(t)) for t in probes])
    if np.any(qvals < -1e-13):
        raise ProfileError(
            f"profile {profile.name!r} is negative on the solve range"
        )

    def rhs(t, y):
        return np.array([y[1], profile.q(t) * y[0], 1.0 / y[0] - 1.0 / t])

    cuts = [t_start] + [b for b in sorted(profile.breakpoints)
                        if t_start < b < T] + [T]
    y = np.array([t_start, 1.0, 0.0])
    pieces = []
    for a, b in zip(cuts[:-1], cuts[1:]):
        ode = integrate_ode(rhs, a, b, y, tol=tol.scaled(0.1))
        if ode.exited or ode.t_end < b * (1.0 - 1e-12):
            raise IntegrationError(
                f"comparison solve stopped at t={ode.t_end:g} before {b:g}"
            )
        pieces.append((a, b, ode.sol))
        y = ode.sol(b)

    cp = ComparisonProfile(
        profile=profile, T=float(T), grid=grid,
        u=np.empty_like(grid), up=np.empty_like(grid), h=np.empty_like(grid),
        v=np.empty_like(grid), vp=np.empty_like(grid),
        Iq=compute_Iq(profile, tol=tol), pieces=pieces,
    )
    for k, t in enumerate(grid):
        s = cp._state(t)
        if not s[0] > 0.0:
            raise IntegrationError(f"u lost positivity at t={t:g}")
        cp.u[k] = s[0]
        cp.up[k] = s[1]
        cp.h[k] = s[1] / s[0]
        cp.v[k] = math.log(t) + s[2]
        cp.vp[k] = 1.0 / s[0]
    return cp


@dataclass(frozen=True, eq=False)
class BoundsReport:
    """Diagnostics for the comparison facts on a solved profile.

    Worst-case slacks are signed: nonnegative (up to tolerance) means the
    corresponding inequality holds on the grid.
    """

    up_monotone_worst: float
    up_end: float
    iq: float
    up_bound_slack: Optional[float]
    pinch_upper_worst: float
    pinch_lower_worst: float
    ratio_end: float
    ratio_bracket: tuple
    ratio_ok: bool
    vprime_residual: float
    riccati_residual: float

    def ok(self, tol=DEFAULT_TOL, slack=1e-8):
        checks = [
            self.up_monotone_worst >= -10.0 * tol.ode_rel,
            self.pinch_upper_worst >= -slack,
            self.pinch_lower_worst >= -slack,
            self.ratio_ok,
            self.vprime_residual <= 10.0 * tol.tensor_rel,
            self.riccati_residual <= 10.0 * tol.tensor_rel,
        ]
        if self.up_bound_slack is not None:
            checks.append(self.up_bound_slack >= -1e-6)
        return all(checks)


def verify_bounds(cp, tol=DEFAULT_TOL, pad=1e-6):
    """Check the comparison facts on the solved profile.

    Monotonicity of u', the u' <= I(q) cap for integrable profiles, the
    logarithmic pinching of v beyond t = 1, the v / log t bracket at the
    horizon, and finite-difference residuals tying v' to 1/u and v'' to
    -h v' (the dense interpolant is differentiated directly, so these two
    are honest consistency checks rather than restatements of the ODE).
    """
    diffs = np.diff(cp.up)
    up_monotone_worst = float(np.min(diffs)) if len(diffs) else 0.0
    up_end = float(cp.up[-1])
    up_bound_slack = None
    if cp.profile.integrable:
        up_bound_slack = cp.Iq + pad - up_end

    mask = cp.grid > 1.0
    if np.any(mask):
        v1 = cp.v_at(1.0)
        lt = np.log(cp.grid[mask])
        vt = cp.v[mask]
        pinch_upper_worst = float(np.min(lt + v1 - vt))
        inv_iq = 0.0 if math.isinf(cp.Iq) else 1.0 / cp.Iq
        pinch_lower_worst = float(np.min(vt - inv_iq * lt - v1))
        ratio_end = float(cp.v[-1] / math.log(cp.T))
        ratio_slack = abs(v1) / math.log(cp.T) + 1e-8
        ratio_ok = (inv_iq - ratio_slack <= ratio_end <= 1.0 + ratio_slack)
    else:
        v1 = 0.0
        pinch_upper_worst = pinch_lower_worst = 0.0
        ratio_end = 1.0
        inv_iq = 0.0 if math.isinf(cp.Iq) else 1.0 / cp.Iq
        ratio_ok = True

    probes = [t for t in np.geomspace(0.5, 0.5 * cp.T, 24)]
    vres = rres = 0.0
    for t in probes:
        hstep = 1e-5 * t
        vp_fd = (cp.v_at(t + hstep) - cp.v_at(t - hstep)) / (2.0 * hstep)
        vres = max(vres, abs(vp_fd - cp.vp_at(t)))
        vpp_fd = (cp.vp_at(t + hstep) - cp.vp_at(t - hstep)) / (2.0 * hstep)
        rres = max(rres, abs(vpp_fd + cp.h_at(t) * cp.vp_at(t)))

    return BoundsReport(
        up_monotone_worst=up_monotone_worst,
        up_end=up_end,
        iq=cp.Iq,
        up_bound_slack=up_bound_slack,
        pinch_upper_worst=pinch_upper_worst,
        pinch_lower_worst=pinch_lower_worst,
        ratio_end=ratio_end,
        ratio_bracket=(inv_iq, 1.0),
        ratio_ok=ratio_ok,
        vprime_residual=vres,
        riccati_residual=rres,
    )


# ----------------------------------------------------------------------------
# curvature lower envelope along exponential spheres


@dataclass(frozen=True, eq=False)
class HLowerCurve:
    """Sampled lower envelope of H along exponential spheres around a point.

    values[k] = (min over sampled directions of H at radius radii[k]) minus
    a sampling slack proportional to the observed direction spread, so the
    curve is safe to use as a pointwise lower bound up to that slack.  NaN
    marks radii no sampled geodesic reached.
    """

    base: np.ndarray
    radii: np.ndarray
    values: np.ndarray
    raw_min: np.ndarray
    spread: np.ndarray
    count: int

    def q_margin(self, profile):
        """min over radii of H(r) + q(r); nonnegative means q dominates."""
        vals = [self.values[k] + profile.q(float(r))
                for k, r in enumerate(self.radii)
                if not math.isnan(self.values[k])]
        if not vals:
            raise ProfileError("no usable radii in the envelope")
        return float(min(vals))


def h_lower_profile(chart, o, radii, count=32, seed=0, tol=DEFAULT_TOL,
                    spread_factor=0.05, paths=None):
    """Monotone-safe lower envelope of H(gamma'(r)) over geodesic directions.

    Radius 0 entries evaluate H directly at o.  Directions whose geodesics
    leave the chart before radius r drop out of that radius; the envelope
    subtracts spread_factor times the observed spread as sampling slack.
    """
    o = np.asarray(o, dtype=complex)
    radii = np.atleast_1d(np.asarray(radii, dtype=float))
    if np.any(radii < 0.0):
        raise ValueError("radii must be nonnegative")
    dirs = tangent_directions(chart, o, count, seed=seed)
    positive = radii[radii > 0.0]
    if paths is None and positive.size:
        paths = geodesic_fan(chart, o, dirs, float(np.max(positive)), tol=tol)

    jets_o = metric_jets(chart, o, order=2)
    h_origin = [
        holomorphic_sectional_curvature(
            chart, o, unit_vector(chart, o, X, hermitian=True, G=jets_o.G),
            jets=jets_o)
        for X in dirs
    ]

    raw = np.full(len(radii), np.nan)
    spread = np.zeros(len(radii))
    values = np.full(len(radii), np.nan)
    for k, r in enumerate(radii):
        if r == 0.0:
            samples = h_origin
        else:
            samples = []
            for path in paths:
                if path.exited and path.t_end < r:
                    continue
                p = path.point(r)
                xi = unit_vector(chart, p, path.velocity(r), hermitian=True)
                samples.append(holomorphic_sectional_curvature(chart, p, xi))
        if not samples:
            continue
        lo, hi = float(min(samples)), float(max(samples))
        raw[k] = lo
        spread[k] = hi - lo
        values[k] = lo - spread_factor * (hi - lo)
    return HLowerCurve(base=o, radii=radii, values=values, raw_min=raw,
                       spread=spread, count=len(dirs))


def hypothesis_margin(profile, curve):
    """Signed margin of the domination hypothesis H >= -q on the envelope."""
    return curve.q_margin(profile)
