import math

import numpy as np
import pytest
import sympy as sp

from hermlab.numerics import (
    ANALYTIC_MODE,
    DEFAULT_TOL,
    FD_MODE,
    MAX_DERIVATIVE_ORDER,
    DerivativeError,
    DifferentiationMode,
    IntegrationError,
    SymbolicField,
    ToleranceBundle,
    differentiate,
    field_symbols,
    integrate_ode,
    quadrature,
)


# a non-holomorphic scalar field with hand-computed Wirtinger derivatives:
# f(z, zbar) = z^2 zbar + exp(zbar)
def _field(z):
    z = np.asarray(z, dtype=complex)[0]
    return z * z * np.conj(z) + np.exp(np.conj(z))


Z0 = np.array([0.4 + 0.3j])


def test_fd_first_derivatives():
    z = complex(Z0[0])
    df_dz = differentiate(_field, Z0, holo=(1,))
    df_dzbar = differentiate(_field, Z0, anti=(1,))
    assert abs(df_dz - 2 * z * np.conj(z)) < 1e-10
    assert abs(df_dzbar - (z * z + np.exp(np.conj(z)))) < 1e-10


def test_fd_mixed_second_derivative():
    z = complex(Z0[0])
    d2 = differentiate(_field, Z0, holo=(1,), anti=(1,))
    assert abs(d2 - 2 * z) < 1e-8


def test_fd_third_derivative():
    d3 = differentiate(_field, Z0, anti=(3,))
    assert abs(d3 - np.exp(np.conj(complex(Z0[0])))) < 1e-5


def test_order_cap():
    with pytest.raises(DerivativeError):
        differentiate(_field, Z0, holo=(3,), anti=(MAX_DERIVATIVE_ORDER,))


def test_richardson_tightens_the_stencil():
    # one extrapolation level beyond the bare stencil buys an order of
    # magnitude here; deeper tables hit roundoff and are not asserted
    plain = DifferentiationMode(richardson_levels=1)
    deep = DifferentiationMode(richardson_levels=2)
    z = complex(Z0[0])
    exact = 2 * z
    err_plain = abs(differentiate(_field, Z0, holo=(1,), anti=(1,),
                                  mode=plain) - exact)
    err_deep = abs(differentiate(_field, Z0, holo=(1,), anti=(1,),
                                 mode=deep) - exact)
    assert err_deep < err_plain


def test_symbolic_field_matches_fd():
    (z0, z1), (zc0, zc1) = field_symbols(2)
    expr = sp.Matrix([[1 + z0 * zc0, z0 * zc1], [z1 * zc0, 1 + z1 * zc1]])
    field = SymbolicField(2, expr)
    p = np.array([0.2 + 0.1j, -0.3 + 0.05j])
    val = np.asarray(field(p))
    assert val.shape == (2, 2)
    exact = field.derivative(p, (1, 0), (0, 0))
    fd = differentiate(field, p, holo=(1, 0))
    assert np.max(np.abs(exact - fd)) < 1e-9
    # analytic mode dispatches to the same .derivative
    via_mode = differentiate(field, p, holo=(1, 0), mode=ANALYTIC_MODE)
    assert np.max(np.abs(exact - via_mode)) == 0.0


def test_analytic_mode_needs_derivative_method():
    with pytest.raises(DerivativeError):
        differentiate(_field, Z0, holo=(1,), mode=ANALYTIC_MODE)


def test_tolerance_bundle():
    tol = ToleranceBundle()
    half = tol.scaled(0.5)
    assert half.ode_rel == tol.ode_rel * 0.5
    assert half.convexity_slack == tol.convexity_slack * 0.5
    with pytest.raises(ValueError):
        ToleranceBundle(ode_rel=0.0)
    with pytest.raises(ValueError):
        tol.scaled(-1.0)


def test_integrate_ode_exponential():
    sol = integrate_ode(lambda t, y: y, 0.0, 3.0, [1.0])
    ts = np.linspace(0.0, 3.0, 7)
    worst = max(abs(float(sol(t)[0]) - math.exp(t)) for t in ts)
    assert worst < 1e-8
    assert not sol.exited


def test_integrate_ode_event_stop():
    hit = lambda t, y: y[0] - 2.0
    hit.terminal = True
    hit.direction = 1
    sol = integrate_ode(lambda t, y: y, 0.0, 10.0, [1.0], events=[hit])
    assert sol.exited
    assert abs(sol.t_end - math.log(2.0)) < 1e-9


def test_integrate_ode_blowup_raises():
    with pytest.raises(IntegrationError):
        integrate_ode(lambda t, y: y * y, 0.0, 2.0, [1.0])


def test_quadrature():
    val, err = quadrature(lambda x: x * x, 0.0, 1.0)
    assert abs(val - 1.0 / 3.0) < 1e-12
    assert err < 1e-10
    with pytest.raises(ValueError):
        quadrature(lambda x: x, 0.0, math.inf)


def test_default_tolerances_are_pinned():
    assert DEFAULT_TOL.ode_rel == 1e-10
    assert DEFAULT_TOL.tensor_rel == 1e-6
    assert DEFAULT_TOL.convexity_slack == 1e-6
    assert FD_MODE.kind == "finite-difference"
