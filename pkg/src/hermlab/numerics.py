"""Shared numerical kernels: Wirtinger derivatives, ODE integration, quadrature.

Points of C^n are complex ndarrays of shape (n,).  A *field* is a map from a
point to a complex scalar or ndarray.  Smooth fields that are not holomorphic
are treated as functions of (z, zbar) and differentiated with the Wirtinger
operators

    d/dz_i    = (d/dx_i - i d/dy_i) / 2,
    d/dzbar_i = (d/dx_i + i d/dy_i) / 2,

where z_i = x_i + i y_i.  Mixed derivatives are requested through a pair of
multi-indices (holomorphic orders, antiholomorphic orders).

Two differentiation modes exist.  The finite-difference mode nests central
differences and removes the leading error terms by Richardson extrapolation;
the analytic-callback mode delegates to an exact derivative evaluator carried
by the field itself (see :class:`SymbolicField`).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import sympy as sp
from scipy import integrate as _sci_integrate

EPS = float(np.finfo(np.float64).eps)
SQRT_EPS = EPS ** 0.5
CBRT_EPS = EPS ** (1.0 / 3.0)

MAX_DERIVATIVE_ORDER = 4

_MODES = ("finite-difference", "analytic-callback")


class NumericsError(RuntimeError):
    """Base class for numerical-kernel failures."""


class DerivativeError(NumericsError):
    """Unsupported derivative request or missing analytic callback."""


class IntegrationError(NumericsError):
    """ODE or quadrature routine failed to reach the requested tolerance."""


@dataclass(frozen=True)
class DifferentiationMode:
    """How derivative requests are fulfilled.

    kind
        "finite-difference" or "analytic-callback".
    step
        Base step for first-order central differences, relative to the
        per-coordinate scale max(1, |z_i|).  For a derivative of total order
        k the applied step is step**(3/(k+2)), which reproduces the base step
        at k = 1 and widens it for higher orders where roundoff dominates.
    richardson_levels
        Number of step halvings fed to the Richardson table (1 disables
        extrapolation).
    """

    kind: str = "finite-difference"
    step: float = CBRT_EPS
    richardson_levels: int = 2

    def __post_init__(self):
        if self.kind not in _MODES:
            raise ValueError(f"unknown differentiation mode kind {self.kind!r}")
        if not self.step > 0.0:
            raise ValueError("step must be positive")
        if not 1 <= self.richardson_levels <= 4:
            raise ValueError("richardson_levels must lie in [1, 4]")


FD_MODE = DifferentiationMode()
ANALYTIC_MODE = DifferentiationMode(kind="analytic-callback")


@dataclass(frozen=True)
class ToleranceBundle:
    """Package of tolerances threaded through every pipeline.

    ode_rel / ode_abs feed the ODE integrators, tensor_rel bounds acceptable
    disagreement between independently computed tensors, convexity_slack
    scales the allowance in discrete convexity verdicts.
    """

    ode_rel: float = 1e-10
    ode_abs: float = 1e-12
    tensor_rel: float = 1e-6
    convexity_slack: float = 1e-6

    def __post_init__(self):
        for name in ("ode_rel", "ode_abs", "tensor_rel", "convexity_slack"):
            if not getattr(self, name) > 0.0:
                raise ValueError(f"{name} must be positive")

    def scaled(self, factor):
        """Return a copy with every tolerance multiplied by factor."""
        if not factor > 0.0:
            raise ValueError("scale factor must be positive")
        return ToleranceBundle(
            ode_rel=self.ode_rel * factor,
            ode_abs=self.ode_abs * factor,
            tensor_rel=self.tensor_rel * factor,
            convexity_slack=self.convexity_slack * factor,
        )


DEFAULT_TOL = ToleranceBundle()


def _normalize_multi_index(mi, n):
    if mi is None:
        return (0,) * n
    mi = tuple(int(k) for k in mi)
    if len(mi) != n:
        raise ValueError(f"multi-index length {len(mi)} does not match dimension {n}")
    if any(k < 0 for k in mi):
        raise ValueError("multi-index entries must be nonnegative")
    return mi


def _nested_wirtinger(func, z, ops, h, scales):
    # ops is a tuple of (coordinate, is_antiholomorphic) elementary derivatives;
    # the first entry is the outermost operator.
    if not ops:
        return np.asarray(func(z), dtype=complex)
    (i, anti), rest = ops[0], ops[1:]
    hi = h * scales[i]
    e = np.zeros(len(z), dtype=complex)
    e[i] = 1.0
    fxp = _nested_wirtinger(func, z + hi * e, rest, h, scales)
    fxm = _nested_wirtinger(func, z - hi * e, rest, h, scales)
    fyp = _nested_wirtinger(func, z + 1j * hi * e, rest, h, scales)
    fym = _nested_wirtinger(func, z - 1j * hi * e, rest, h, scales)
    dx = (fxp - fxm) / (2.0 * hi)
    dy = (fyp - fym) / (2.0 * hi)
    if anti:
        return 0.5 * (dx + 1j * dy)
    return 0.5 * (dx - 1j * dy)


def differentiate(field, point, holo=None, anti=None, mode=FD_MODE):
    """Mixed Wirtinger derivative of a field at a point.

    Parameters
    ----------
    field : callable
        Map z -> scalar or ndarray.  In analytic mode it must expose
        ``field.derivative(z, holo, anti)``.
    point : array_like of complex, shape (n,)
    holo, anti : tuple of int or None
        Per-coordinate holomorphic / antiholomorphic derivative orders.
    mode : DifferentiationMode

    Returns
    -------
    complex scalar or ndarray matching the field's output shape.
    """
    z = np.asarray(point, dtype=complex)
    n = z.shape[0]
    holo = _normalize_multi_index(holo, n)
    anti = _normalize_multi_index(anti, n)
    order = sum(holo) + sum(anti)
    if order > MAX_DERIVATIVE_ORDER:
        raise DerivativeError(
            f"total derivative order {order} exceeds supported maximum "
            f"{MAX_DERIVATIVE_ORDER}"
        )
    if mode.kind == "analytic-callback":
        deriv = getattr(field, "derivative", None)
        if deriv is None:
            raise DerivativeError(
                "analytic-callback mode requires the field to provide a "
                ".derivative(z, holo, anti) method"
            )
        return deriv(z, holo, anti)
    if order == 0:
        return np.asarray(field(z), dtype=complex)

    ops = tuple((i, False) for i in range(n) for _ in range(holo[i]))
    ops += tuple((i, True) for i in range(n) for _ in range(anti[i]))
    scales = np.maximum(1.0, np.abs(z))
    h0 = mode.step ** (3.0 / (order + 2))

    levels = mode.richardson_levels
    table = [
        _nested_wirtinger(field, z, ops, h0 / 2.0**lvl, scales)
        for lvl in range(levels)
    ]
    # Richardson table: composite central stencils carry an even error
    # expansion, so each column removes a factor of four.
    for m in range(1, levels):
        w = 4.0**m
        table = [
            (w * table[l] - table[l - 1]) / (w - 1.0) for l in range(1, len(table))
        ]
    out = table[-1]
    if out.ndim == 0:
        return complex(out)
    return out


# ----------------------------------------------------------------------------
# symbolic fields


def field_symbols(n):
    """Sympy symbols (z, zbar) used by catalog fields, as two tuples."""
    zs = sp.symbols(f"z0:{n}", complex=True)
    zc = sp.symbols(f"zc0:{n}", complex=True)
    return zs, zc


class SymbolicField:
    """Field defined by a sympy expression in (z, zbar) symbols.

    Real-analytic fields are formal power series in z and zbar jointly, so
    Wirtinger derivatives coincide with ordinary partials with respect to the
    two symbol families.  Derivative evaluators are compiled lazily and
    cached, one per multi-index pair.
    """

    def __init__(self, n, expr):
        self.n = int(n)
        self.expr = sp.ImmutableMatrix(expr) if hasattr(expr, "shape") else sp.sympify(expr)
        self._symbols = field_symbols(self.n)
        self._cache = {}

    @property
    def shape(self):
        return getattr(self.expr, "shape", ())

    def _compiled(self, holo, anti):
        key = (tuple(holo), tuple(anti))
        fn = self._cache.get(key)
        if fn is None:
            zs, zc = self._symbols
            d = self.expr
            for i, k in enumerate(key[0]):
                if k:
                    d = sp.diff(d, zs[i], k)
            for i, k in enumerate(key[1]):
                if k:
                    d = sp.diff(d, zc[i], k)
            fn = sp.lambdify(list(zs) + list(zc), d, modules="numpy")
            self._cache[key] = fn
        return fn

    def _eval(self, fn, z):
        args = tuple(z) + tuple(np.conj(z))
        out = fn(*args)
        arr = np.asarray(out, dtype=complex)
        if arr.ndim == 0:
            return complex(arr)
        return arr

    def __call__(self, z):
        z = np.asarray(z, dtype=complex)
        return self._eval(self._compiled((0,) * self.n, (0,) * self.n), z)

    def derivative(self, z, holo, anti):
        z = np.asarray(z, dtype=complex)
        holo = _normalize_multi_index(holo, self.n)
        anti = _normalize_multi_index(anti, self.n)
        return self._eval(self._compiled(holo, anti), z)

    def compose_polynomial(self, polys, m):
        """Pull the field back along a holomorphic polynomial map w -> z.

        polys is a length-n list of sympy expressions for z_i in the symbols
        of ``field_symbols(m)[0]``; the conjugate slots are substituted with
        the coefficient-conjugated polynomials in the wbar symbols.  Returns
        a SymbolicField over C^m.
        """
        ws, wc = field_symbols(m)
        zs, zc = self._symbols
        subs = {}
        for i in range(self.n):
            p = sp.expand(polys[i])
            subs[zs[i]] = p
            pbar = p.subs({w: wb for w, wb in zip(ws, wc)})
            subs[zc[i]] = pbar.conjugate().expand().subs(
                {sp.conjugate(wb): wb for wb in wc}
            )
        expr = self.expr.subs(subs, simultaneous=True)
        return SymbolicField(m, sp.expand(expr))


# ----------------------------------------------------------------------------
# ODE integration and quadrature


@dataclass
class ODESolution:
    """Dense solution of an initial value problem on [t0, t_end].

    ``sol(t)`` interpolates the state; ``exited`` flags termination by an
    event before the requested horizon.
    """

    t0: float
    t_end: float
    sol: object
    t_events: list
    exited: bool
    nfev: int

    def __call__(self, t):
        return self.sol(t)


def integrate_ode(rhs, t0, t1, y0, tol=DEFAULT_TOL, events=None, args=None,
                  max_step=np.inf):
    """Adaptive high-order integration of y' = rhs(t, y) with dense output.

    Wraps DOP853 with tolerances from the bundle.  Events follow the scipy
    convention; any terminal event stops integration early and sets
    ``exited`` on the returned solution.
    """
    res = _sci_integrate.solve_ivp(
        rhs,
        (t0, t1),
        np.asarray(y0, dtype=float),
        method="DOP853",
        dense_output=True,
        rtol=tol.ode_rel,
        atol=tol.ode_abs,
        events=events,
        args=args,
        max_step=max_step,
    )
    if res.status == -1:
        raise IntegrationError(f"ODE integration failed: {res.message}")
    return ODESolution(
        t0=t0,
        t_end=float(res.t[-1]),
        sol=res.sol,
        t_events=res.t_events if res.t_events is not None else [],
        exited=(res.status == 1),
        nfev=res.nfev,
    )


def quadrature(func, a, b, rel_tol=1e-11, abs_tol=1e-13):
    """Adaptive quadrature of func on the finite interval [a, b].

    Returns (value, error_estimate).  Improper upper limits are the caller's
    business: integrate up to a finite cut and add a certified tail bound.
    """
    if not (np.isfinite(a) and np.isfinite(b)):
        raise ValueError("quadrature expects finite limits; handle tails explicitly")
    val, err = _sci_integrate.quad(func, a, b, epsabs=abs_tol, epsrel=rel_tol,
                                   limit=400)
    if not np.isfinite(val):
        raise IntegrationError("quadrature returned a non-finite value")
    return float(val), float(err)


__all__ = [
    "EPS",
    "SQRT_EPS",
    "CBRT_EPS",
    "MAX_DERIVATIVE_ORDER",
    "NumericsError",
    "DerivativeError",
    "IntegrationError",
    "DifferentiationMode",
    "FD_MODE",
    "ANALYTIC_MODE",
    "ToleranceBundle",
    "DEFAULT_TOL",
    "differentiate",
    "field_symbols",
    "SymbolicField",
    "ODESolution",
    "integrate_ode",
    "quadrature",
]
