"""Catalog of Hermitian metrics as ready-made charts.

Every entry carries a :class:`~hermlab.numerics.SymbolicField` metric, so all
derivative requests are exact, and a hand-set injectivity_floor (the radius
within which exponential spheres are treated as distance spheres).  Entries:

flat
    g = identity on C^n.  Geodesics are affine lines; curvature_bound 0.
poincare-ball
    g_{i jbar} = delta_ij/(1-|z|^2) + zbar_i z_j/(1-|z|^2)^2 on the unit
    ball.  Kahler, H = -2 everywhere; curvature_bound -2.  Radial geodesics
    from the origin have the closed form |z| = tanh(t/sqrt(2)).
radial-conformal
    g = e^{phi(|z|^2)} delta with phi(s) = a s + b s^2.  Non-Kahler for
    n >= 2 (the torsion exerciser); a = 1, b = 0 is the counterexample
    metric e^{|z|^2} delta with H(0) = -1 in every direction.
poly-perturbed
    g = identity + eps (A(z) + A(z)^H) + eps C(z) C(z)^H with A a random
    polynomial matrix of total degree <= degree and C linear, both without
    constant term, so g(0) = identity exactly.  Positive-definiteness is
    checked on a sample of the domain at build time.

Charts are addressable by catalog name plus parameters through
:func:`make_chart`; :func:`default_charts` returns the fixed sweep used by
the test suites.
"""

from __future__ import annotations

import itertools
import math

import numpy as np
import sympy as sp

from .geometry import DomainSpec, HermitianChart, SingularMetricError
from .numerics import ANALYTIC_MODE, SymbolicField, field_symbols


def _flat_exp(o, X, t):
    return np.asarray(o, dtype=complex) + t * np.asarray(X, dtype=complex)


def flat_chart(n=1):
    """C^n with the identity metric; distances scale as sqrt(2)|z|."""
    return HermitianChart(
        n=n,
        metric=SymbolicField(n, sp.eye(n)),
        domain=DomainSpec(kind="ball", radius=math.inf),
        label=f"flat(n={n})",
        injectivity_floor=math.inf,
        mode=ANALYTIC_MODE,
        curvature_bound=0.0,
        exact_exp=_flat_exp,
    )


def _poincare_exp(o, X, t):
    o = np.asarray(o, dtype=complex)
    if float(np.linalg.norm(o)) > 1e-13:
        return None  # closed form kept for the origin only
    X = np.asarray(X, dtype=complex)
    u = X / np.linalg.norm(X)
    return math.tanh(t / math.sqrt(2.0)) * u


def poincare_chart(n=1):
    """Unit ball with the Bergman-type metric of constant H = -2."""
    zs, zc = field_symbols(n)
    s = sum(zs[i] * zc[i] for i in range(n))
    g = sp.Matrix(n, n, lambda i, j: (
        sp.KroneckerDelta(i, j) / (1 - s) + zc[i] * zs[j] / (1 - s) ** 2))
    return HermitianChart(
        n=n,
        metric=SymbolicField(n, g),
        domain=DomainSpec(kind="ball", radius=1.0),
        label=f"poincare-ball(n={n})",
        injectivity_floor=math.inf,
        mode=ANALYTIC_MODE,
        curvature_bound=-2.0,
        exact_exp=_poincare_exp,
    )


def radial_conformal_chart(n=2, a=1.0, b=0.0):
    """g = e^{a|z|^2 + b|z|^4} delta; torsionful for n >= 2."""
    zs, zc = field_symbols(n)
    s = sum(zs[i] * zc[i] for i in range(n))
    g = sp.exp(sp.Rational(0) + sp.nsimplify(a) * s + sp.nsimplify(b) * s ** 2) \
        * sp.eye(n)
    return HermitianChart(
        n=n,
        metric=SymbolicField(n, g),
        domain=DomainSpec(kind="ball", radius=math.inf),
        label=f"radial-conformal(n={n},a={a:g},b={b:g})",
        injectivity_floor=2.0,
        mode=ANALYTIC_MODE,
    )


def _random_poly_matrix(rng, n, zs, degree, min_degree=1):
    exponents = [alpha for alpha in itertools.product(range(degree + 1), repeat=n)
                 if min_degree <= sum(alpha) <= degree]
    entries = [[0] * n for _ in range(n)]
    conj_entries = [[0] * n for _ in range(n)]
    for i in range(n):
        for j in range(n):
            for alpha in exponents:
                c = complex(rng.normal(), rng.normal()) / (2.0 * math.factorial(sum(alpha)))
                mono = sp.prod([zs[k] ** alpha[k] for k in range(n)])
                entries[i][j] += sp.nsimplify(c.real) * mono \
                    + sp.I * sp.nsimplify(c.imag) * mono
    return sp.Matrix(entries)


def _conjugate_transpose(M, zs, zc):
    # coefficient conjugation plus z -> zbar for a holomorphic matrix
    n = M.shape[0]
    swap = {z: w for z, w in zip(zs, zc)}
    out = sp.zeros(n, n)
    for i in range(n):
        for j in range(n):
            e = sp.expand(M[j, i]).subs(swap, simultaneous=True)
            out[i, j] = e.conjugate().expand().subs(
                {sp.conjugate(w): w for w in zc})
    return out


def poly_perturbed_chart(n=2, eps=0.04, seed=7, degree=2, check_points=64):
    """Random polynomial perturbation of flat, positive-definite by check."""
    if not 0.0 < eps < 0.5:
        raise ValueError("eps must lie in (0, 0.5)")
    rng = np.random.default_rng(seed)
    zs, zc = field_symbols(n)
    A = _random_poly_matrix(rng, n, zs, degree)
    C = _random_poly_matrix(rng, n, zs, 1)
    expr = sp.eye(n) + sp.nsimplify(eps) * (A + _conjugate_transpose(A, zs, zc)) \
        + sp.nsimplify(eps) * (C * _conjugate_transpose(C, zs, zc))
    field = SymbolicField(n, sp.expand(expr))
    domain = DomainSpec(kind="ball", radius=1.2)
    chart = HermitianChart(
        n=n,
        metric=field,
        domain=domain,
        label=f"poly-perturbed(n={n},eps={eps:g},seed={seed})",
        injectivity_floor=0.8,
        mode=ANALYTIC_MODE,
    )
    # positive-definiteness sweep; rejection here beats a singular metric
    # surfacing later inside an ODE right-hand side
    for _ in range(check_points):
        w = rng.normal(size=n) + 1j * rng.normal(size=n)
        w *= rng.uniform() ** (1.0 / (2 * n)) * domain.radius / np.linalg.norm(w)
        G = np.asarray(field(w), dtype=complex)
        if np.linalg.eigvalsh(0.5 * (G + G.conj().T))[0] <= 1e-6:
            raise SingularMetricError(
                f"perturbed metric (eps={eps}, seed={seed}) fails positive-"
                f"definiteness near {w}; lower eps"
            )
    return chart


CHART_BUILDERS = {
    "flat": flat_chart,
    "poincare-ball": poincare_chart,
    "radial-conformal": radial_conformal_chart,
    "poly-perturbed": poly_perturbed_chart,
}

CHART_PARAMS = {
    "flat": {"n": 1},
    "poincare-ball": {"n": 1},
    "radial-conformal": {"n": 2, "a": 1.0, "b": 0.0},
    "poly-perturbed": {"n": 2, "eps": 0.04, "seed": 7, "degree": 2},
}


def make_chart(name, **params):
    """Instantiate a catalog chart by name with keyword parameters."""
    try:
        builder = CHART_BUILDERS[name]
    except KeyError:
        raise KeyError(
            f"unknown metric {name!r}; catalog: {sorted(CHART_BUILDERS)}"
        ) from None
    return builder(**params)


def default_charts():
    """The fixed chart sweep exercised by the property suites."""
    return [
        flat_chart(1),
        flat_chart(2),
        poincare_chart(1),
        poincare_chart(2),
        radial_conformal_chart(1, a=1.0, b=0.0),
        radial_conformal_chart(2, a=1.0, b=0.0),
        radial_conformal_chart(2, a=-0.5, b=0.25),
        poly_perturbed_chart(2, eps=0.04, seed=7),
    ]


__all__ = [
    "flat_chart",
    "poincare_chart",
    "radial_conformal_chart",
    "poly_perturbed_chart",
    "CHART_BUILDERS",
    "CHART_PARAMS",
    "make_chart",
    "default_charts",
]
