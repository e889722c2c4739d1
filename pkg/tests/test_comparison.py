import math

import numpy as np
import pytest

from hermlab.comparison import (
    DecayProfile,
    ProfileError,
    bump_profile,
    compute_Iq,
    constant_profile,
    default_profiles,
    h_lower_profile,
    hypothesis_margin,
    inverse_cube_profile,
    log_weak_profile,
    make_profile,
    solve_profile,
    tn,
    verify_bounds,
    zero_profile,
)
from hermlab.metrics import flat_chart, poincare_chart, radial_conformal_chart


def test_tn_branches():
    assert tn(0.0, 1.7) == 1.7
    assert abs(tn(1.0, 0.3) - math.tan(0.3)) < 1e-15
    s = math.sqrt(2.0)
    assert abs(tn(-2.0, 0.7) - math.tanh(s * 0.7) / s) < 1e-15
    # small-K limits approach the flat line
    assert abs(tn(1e-10, 0.5) - 0.5) < 1e-9
    assert abs(tn(-1e-10, 0.5) - 0.5) < 1e-9
    with pytest.raises(ValueError):
        tn(0.0, -0.1)
    with pytest.raises(ValueError):
        tn(1.0, 2.0)


def test_profile_validation():
    with pytest.raises(ProfileError):
        constant_profile(-1.0)
    with pytest.raises(ProfileError):
        bump_profile(c=1.0, R=0.0)
    with pytest.raises(ProfileError):
        inverse_cube_profile(-2.0)
    with pytest.raises(ProfileError):
        log_weak_profile(eps=0.0)
    with pytest.raises(ProfileError):
        make_profile("gaussian")


def test_certified_integrals():
    # closed forms: int t q dt = 0, 1/2, 1, and the log-weak value is pinned
    # from an independent high-precision evaluation
    cases = [
        (zero_profile(), 1.0),
        (bump_profile(1.0, 1.0), math.exp(0.5)),
        (inverse_cube_profile(2.0), math.e),
        (log_weak_profile(1.0, 0.5), 7.91454445252538),
    ]
    for profile, exact in cases:
        iq = compute_Iq(profile)
        assert exact - 1e-12 <= iq <= exact * (1.0 + 1e-6), profile.name
    assert math.isinf(compute_Iq(constant_profile(1.0)))


def test_integrable_needs_tail_bound():
    broken = DecayProfile(name="broken", q=lambda t: math.exp(-t),
                          integrable=True, tail_bound=None)
    with pytest.raises(ProfileError):
        compute_Iq(broken)


def test_constant_profile_solves_to_sinh():
    cp = solve_profile(constant_profile(1.0), T=12.0)
    for t in (0.1, 1.0, 3.0, 7.0):
        assert abs(cp.u_at(t) - math.sinh(t)) < 1e-7 * math.cosh(t)
        assert abs(cp.up_at(t) - math.cosh(t)) < 1e-7 * math.cosh(t)
    assert cp.up_at(10.0) > 1e3
    # v' = 1/u integrates to log tanh(t/2) plus a constant
    offsets = [cp.v_at(t) - math.log(math.tanh(0.5 * t))
               for t in np.linspace(0.1, 5.0, 25)]
    assert max(offsets) - min(offsets) < 1e-6


def test_zero_profile_is_logarithmic():
    cp = solve_profile(zero_profile(), T=20.0)
    for t in (0.01, 1.0, 10.0):
        assert abs(cp.u_at(t) - t) < 1e-9 * max(1.0, t)
        assert abs(cp.v_at(t) - math.log(t)) < 1e-8


def test_negative_profile_rejected():
    bad = DecayProfile(name="bad", q=lambda t: -1.0, integrable=False)
    with pytest.raises(ProfileError):
        solve_profile(bad, T=5.0)


def test_solution_continuity_at_breakpoint():
    cp = solve_profile(bump_profile(1.0, 1.0), T=10.0)
    eps = 1e-9
    assert abs(cp.u_at(1.0 - eps) - cp.u_at(1.0 + eps)) < 1e-7
    assert abs(cp.up_at(1.0 - eps) - cp.up_at(1.0 + eps)) < 1e-7
    # after the bump u'' = 0, so u' freezes at a constant
    assert abs(cp.up_at(2.0) - cp.up_at(9.0)) < 1e-8


def test_bounds_hold_on_catalog():
    for profile in default_profiles():
        cp = solve_profile(profile, T=50.0)
        report = verify_bounds(cp)
        assert report.ok(), (profile.name, report)
        if profile.integrable:
            assert cp.up_at(50.0) <= cp.Iq + 1e-6


def test_state_range_checks():
    cp = solve_profile(zero_profile(), T=5.0)
    with pytest.raises(ValueError):
        cp.u_at(0.0)
    with pytest.raises(ValueError):
        cp.u_at(6.0)


def test_h_lower_envelope_flat_and_poincare():
    radii = np.array([0.0, 0.3, 0.6])
    flat = h_lower_profile(flat_chart(2), np.zeros(2, dtype=complex), radii,
                           count=8)
    assert np.max(np.abs(flat.values)) < 1e-8
    assert np.max(flat.spread) < 1e-8

    ball = h_lower_profile(poincare_chart(2), np.zeros(2, dtype=complex),
                           radii, count=8)
    assert np.max(np.abs(ball.values + 2.0)) < 1e-6


def test_h_lower_envelope_conformal_origin():
    curve = h_lower_profile(radial_conformal_chart(2, 1.0, 0.0),
                            np.zeros(2, dtype=complex), np.array([0.0]),
                            count=12)
    assert abs(curve.values[0] + 1.0) < 1e-8


def test_hypothesis_margin_signs():
    radii = np.array([0.0, 0.4, 0.8])
    curve = h_lower_profile(poincare_chart(1), np.zeros(1, dtype=complex),
                            radii, count=6)
    assert hypothesis_margin(constant_profile(2.0), curve) > -1e-6
    assert hypothesis_margin(constant_profile(3.0), curve) > 0.9
    assert hypothesis_margin(constant_profile(1.0), curve) < -0.9
