import math

import numpy as np
import pytest

from hermlab.comparison import constant_profile, solve_profile, zero_profile
from hermlab.growth import (
    CounterexampleReport,
    GrowthCurve,
    GrowthError,
    Polynomial,
    Verdict,
    convexity_check,
    counterexample_scenario,
    degree_estimate,
    dimension_count,
    function_catalog,
    growth_curve,
    liouville_probe,
    log_abs,
    max_principle_check,
    monotonicity_checks,
    ord_and_degree,
    phi_truncation,
    polynomial_function,
    psh_catalog,
    random_polynomial,
    sphere_max,
    transcendental_exp,
    zero_witness_search,
)
from hermlab.metrics import flat_chart, poincare_chart, radial_conformal_chart

O1 = np.zeros(1, dtype=complex)
O2 = np.zeros(2, dtype=complex)


# ----------------------------------------------------------------------------
# polynomials and catalogs


def test_polynomial_canonical_form():
    p = Polynomial(2, {(1, 0): 1.0, (0, 1): 0.0, (1, 0): 1.0})
    assert (0, 1) not in p.coeffs
    assert p.degree == 1
    q = Polynomial(1, {(2,): 1.0, (0,): -1.0})
    assert q.degree == 2
    assert Polynomial(1, {}).is_zero
    with pytest.raises(ValueError):
        Polynomial(1, {(1, 0): 1.0})


def test_polynomial_recenter_exact():
    rng = np.random.default_rng(4)
    p = random_polynomial(2, degree=3, seed=11).poly
    o = np.array([0.4 - 0.2j, -0.1 + 0.3j])
    shifted = p.recenter(o)
    for _ in range(6):
        z = rng.standard_normal(2) + 1j * rng.standard_normal(2)
        assert abs(p(z) - shifted(z - o)) < 1e-12 * max(1.0, abs(p(z)))


def test_polynomial_ord_and_derivative():
    p = Polynomial(2, {(2, 1): 1.0})
    assert p.ord_at(O2) == 3
    assert p.ord_at(np.array([0.5, 0.5])) == 0
    d = p.derivative(0)
    assert d.coeffs == {(1, 1): 2.0}
    with pytest.raises(GrowthError):
        Polynomial(1, {}).ord_at(O1)


def test_polynomial_truncate_and_sub():
    p = Polynomial(1, {(1,): 1.0, (3,): 1.0})
    assert p.truncate(2).coeffs == {(1,): 1.0}
    diff = p - Polynomial(1, {(1,): 1.0})
    assert diff.coeffs == {(3,): 1.0}
    assert (p - 0.0).coeffs == p.coeffs


def test_function_catalog_shapes():
    cat1 = function_catalog(1)
    cat2 = function_catalog(2)
    assert [f.name for f in cat1] == ["z1", "1+z1", "z1+z1^3", "z1^5", "exp-z1"]
    assert [f.name for f in cat2] == ["z1", "1+z1", "z1+z1^3", "z1*z2",
                                      "z1^2*z2", "z1+z2^5", "exp-z1"]
    z = np.array([0.3 + 0.1j, -0.2j])
    for f in cat2:
        if f.kind == "polynomial":
            assert abs(f(z) - f.poly(z)) < 1e-14
    assert math.isinf(cat2[-1].degree)
    assert abs(cat2[-1](z) - np.exp(z[0])) < 1e-14


def test_random_polynomial_deterministic():
    a = random_polynomial(2, degree=3, seed=5).poly
    b = random_polynomial(2, degree=3, seed=5).poly
    assert a.coeffs == b.coeffs
    c = random_polynomial(2, degree=3, seed=6).poly
    assert a.coeffs != c.coeffs


def test_log_abs():
    f = function_catalog(1)[0]
    u = log_abs(f)
    assert abs(u(np.array([2.0 + 0.0j])) - math.log(2.0)) < 1e-14
    assert u(O1) == -math.inf
    assert log_abs(f, floor=1e-3)(O1) == math.log(1e-3)


def test_verdict_validation():
    with pytest.raises(ValueError):
        Verdict(kind="unknown", worst_index=None, magnitude=0.0, slack=0.0)
    v = Verdict(kind="violation", worst_index=2, magnitude=-1.0, slack=0.0)
    assert not v.ok
    w = Verdict(kind="convex", worst_index=None, magnitude=0.0, slack=0.0,
                checked=False)
    assert not w.ok


# ----------------------------------------------------------------------------
# sphere maxima and growth curves


def test_sphere_max_flat_oracles():
    # unit real directions have euclidean length 1/sqrt 2, so the radius-r
    # sphere is |z| = r/sqrt 2: max |z1| = r/sqrt 2, max |z1 z2| = r^2/4
    chart1 = flat_chart(1)
    f1 = log_abs(function_catalog(1)[0])
    for r in (0.5, 1.0, 2.0):
        M, X, _ = sphere_max(chart1, O1, lambda z: abs(z[0]), r, count=32)
        assert abs(M - r / math.sqrt(2.0)) < 1e-12

    chart2 = flat_chart(2)
    r = 1.5
    M, X, _ = sphere_max(chart2, O2, lambda z: abs(z[0] * z[1]), r, count=48)
    assert abs(M - r * r / 4.0) < 1e-9
    assert abs(abs(X[0]) - abs(X[1])) < 1e-4


def test_sphere_max_refine_never_hurts():
    chart = flat_chart(2)
    u = lambda z: abs(z[0] * z[1])
    raw, _, _ = sphere_max(chart, O2, u, 1.0, count=16, refine=False)
    ref, _, _ = sphere_max(chart, O2, u, 1.0, count=16, refine=True)
    assert ref >= raw
    assert abs(ref - 0.25) < 1e-9


def test_sphere_max_radius_validation():
    chart = poincare_chart(1)
    with pytest.raises(GrowthError):
        sphere_max(flat_chart(1), O1, lambda z: abs(z[0]), 0.0)
    bounded = radial_conformal_chart(2, 1.0, 0.0)
    with pytest.raises(GrowthError):
        sphere_max(bounded, O2, lambda z: abs(z[0]), 3.0)  # floor is 2


def test_growth_curve_validation():
    chart = flat_chart(1)
    u = log_abs(function_catalog(1)[0])
    with pytest.raises(GrowthError):
        growth_curve(chart, O1, u, [0.5, 1.0])
    with pytest.raises(GrowthError):
        growth_curve(chart, O1, u, [-0.1, 0.5, 1.0])
    with pytest.raises(GrowthError):
        growth_curve(chart, O1, u, [0.5, 0.5, 1.0])
    with pytest.raises(GrowthError):
        growth_curve(radial_conformal_chart(2, 1.0, 0.0), O2, u,
                     [0.5, 1.0, 2.5])
    with pytest.raises(GrowthError):
        growth_curve(chart, O1, u, [0.5, 1.0, 2.0], abscissa="v-profile")
    with pytest.raises(GrowthError):
        growth_curve(chart, O1, u, [0.5, 1.0, 2.0], abscissa="log-tnK")
    with pytest.raises(GrowthError):
        growth_curve(chart, O1, u, [0.5, 1.0, 2.0], abscissa="euclid")


def test_growth_curve_deterministic():
    chart = flat_chart(2)
    u = log_abs(function_catalog(2)[3])  # z1*z2
    radii = np.geomspace(0.3, 2.0, 6)
    a = growth_curve(chart, O2, u, radii, count=24, seed=9)
    b = growth_curve(chart, O2, u, radii, count=24, seed=9)
    assert np.array_equal(a.values, b.values)
    assert np.array_equal(a.argmax, b.argmax)


def test_flat_growth_is_convex_and_linear():
    chart = flat_chart(1)
    radii = np.geomspace(0.2, 3.0, 8)
    # log M for f = z1 is log r - log sqrt 2: exactly linear in log r
    curve = growth_curve(chart, O1, log_abs(function_catalog(1)[0]), radii,
                         count=16)
    assert np.max(np.abs(curve.second_diff)) < 1e-10
    assert convexity_check(curve).kind == "convex"
    assert np.max(np.abs(curve.slopes - 1.0)) < 1e-10

    # f = 1 + z1 bends upward but stays convex
    curve2 = growth_curve(chart, O1, log_abs(function_catalog(1)[1]), radii,
                          count=16)
    assert convexity_check(curve2).kind == "convex"
    assert np.all(curve2.second_diff[1:-1] > 0.0)


def test_degree_estimate_tail_slope():
    chart = flat_chart(1)
    radii = np.geomspace(1.0, 14.0, 9)
    curve = growth_curve(chart, O1, log_abs(function_catalog(1)[2]), radii,
                         count=16)  # z1 + z1^3
    assert 2.9 <= degree_estimate(curve) <= 3.01


def test_monotonicity_checks_flat():
    chart = flat_chart(1)
    f = function_catalog(1)[0]
    cp = solve_profile(zero_profile(), T=10.0)
    radii = np.geomspace(0.3, 3.0, 7)
    curve = growth_curve(chart, O1, log_abs(f), radii, abscissa="v-profile",
                         profile=cp, count=16)
    inc, dec = monotonicity_checks(curve, ord=1, deg=1.0, Iq=1.0)
    assert inc.kind == "monotone-increasing"
    assert dec.kind == "monotone-decreasing"
    # values - ord * v is the constant -log sqrt 2 on the nose
    assert abs(inc.magnitude) < 1e-8

    _, dec_vac = monotonicity_checks(curve, ord=1, deg=1.0, Iq=math.inf)
    assert dec_vac.kind == "monotone-decreasing"
    assert "vacuous" in dec_vac.note


def test_monotonicity_needs_reparametrized_curve():
    curve = GrowthCurve(base=O1, radii=np.array([1.0, 2.0, 3.0]),
                        abscissa="euclid", t=np.array([1.0, 2.0, 3.0]),
                        values=np.zeros(3), argmax=np.zeros(3, dtype=int),
                        second_diff=np.zeros(3), spacing_sq=np.ones(3),
                        slopes=np.zeros(2), count=4)
    with pytest.raises(GrowthError):
        monotonicity_checks(curve, ord=0, deg=1.0, Iq=1.0)


# ----------------------------------------------------------------------------
# order, degree, truncation, dimension


def test_ord_and_degree_catalog():
    cat = function_catalog(2)
    expected = {"z1": (1, 1.0), "1+z1": (0, 1.0), "z1+z1^3": (1, 3.0),
                "z1*z2": (2, 2.0), "z1^2*z2": (3, 3.0), "z1+z2^5": (1, 5.0)}
    for f in cat:
        if f.kind != "polynomial":
            k, d = ord_and_degree(f, O2)
            assert k == 0 and math.isinf(d)
        else:
            assert ord_and_degree(f, O2) == expected[f.name]
    # ord always bounded by degree
    for f in cat:
        k, d = ord_and_degree(f, O2)
        assert k <= d


def test_phi_truncation():
    f = function_catalog(1)[2]  # z1 + z1^3
    t1 = phi_truncation(f, O1, 1.0, Iq=1.0)
    assert t1.coeffs == {(1,): 1.0}
    t2 = phi_truncation(f, O1, 3.0, Iq=1.0)
    assert t2.coeffs == f.poly.coeffs
    t3 = phi_truncation(f, O1, 1.0, Iq=math.e)
    assert t3.coeffs == {(1,): 1.0}
    with pytest.raises(GrowthError):
        phi_truncation(transcendental_exp(1), O1, 1.0)


def test_dimension_count_matches_binomial():
    assert dimension_count(1, 2.0) == 3
    assert dimension_count(2, 2.0) == 6
    assert dimension_count(2, 3.0) == 10
    assert dimension_count(3, 2.0) == 10
    # fractional growth rounds down
    assert dimension_count(2, 2.7) == 6
    # heavy truncation collapses the rank to the surviving monomials
    assert dimension_count(2, 2.0, Iq=0.4) == 1


# ----------------------------------------------------------------------------
# maximum principle, Liouville, zero witness


def test_max_principle_holds_for_psh():
    chart = flat_chart(2)
    for name, u in psh_catalog(2):
        verdict = max_principle_check(chart, O2, 0.6, u, count=24)
        assert verdict.kind == "bound-holds", name
        assert verdict.checked


def test_max_principle_detects_failed_hypothesis():
    chart = flat_chart(1)
    u = lambda z: -float(np.sum(np.asarray(z) * np.conj(np.asarray(z))).real)
    verdict = max_principle_check(chart, O1, 0.5, u, count=16)
    assert verdict.kind == "violation"
    assert not verdict.checked
    assert not verdict.ok
    assert "hypothesis" in verdict.note


def test_liouville_probe_flat_and_poincare():
    f = function_catalog(1)[0]
    v1 = liouville_probe(flat_chart(1), O1, f, zero_profile(), count=16)
    assert v1.kind == "monotone-increasing"
    # H = -2 dominates -q for q = 2, the exactly matched pairing
    v2 = liouville_probe(poincare_chart(1), O1, f, constant_profile(2.0),
                         count=16)
    assert v2.kind == "monotone-increasing"
    assert "ord=1" in v2.note


def test_liouville_probe_validation():
    with pytest.raises(GrowthError):
        liouville_probe(flat_chart(1), O1, transcendental_exp(1),
                        zero_profile())
    const = polynomial_function("c", Polynomial(1, {(0,): 2.0}))
    with pytest.raises(GrowthError):
        liouville_probe(flat_chart(1), O1, const, zero_profile())


def test_zero_witness_search():
    shifted = polynomial_function(
        "z-0.3", Polynomial(1, {(1,): 1.0, (0,): -0.3}))
    w = zero_witness_search(shifted)
    assert w is not None and abs(w[0] - 0.3) < 1e-7

    quad = polynomial_function("z^2+1", Polynomial(1, {(2,): 1.0, (0,): 1.0}))
    w = zero_witness_search(quad)
    assert w is not None and abs(abs(w[0].imag) - 1.0) < 1e-7

    # the Newton flow is unconstrained, so a far root is still found
    far = polynomial_function("z-100", Polynomial(1, {(1,): 1.0, (0,): -100.0}))
    w = zero_witness_search(far, search_radius=1.0, max_seeds=3)
    assert w is not None and abs(w[0] - 100.0) < 1e-7
    assert zero_witness_search(far, max_seeds=0) is None

    for seed in range(8):
        f = random_polynomial(2, degree=3, seed=seed)
        w = zero_witness_search(f, seed=seed)
        assert w is not None
        assert abs(f(w)) < 1e-8

    with pytest.raises(GrowthError):
        zero_witness_search(transcendental_exp(1))


# ----------------------------------------------------------------------------
# the counterexample scenario


@pytest.fixture(scope="module")
def counterexample_n1():
    return counterexample_scenario(n=1, seed=0)


def test_counterexample_report_ok(counterexample_n1):
    report = counterexample_n1
    assert isinstance(report, CounterexampleReport)
    assert report.ok
    assert report.n == 1


def test_counterexample_functional(counterexample_n1):
    assert abs(counterexample_n1.functional_value + 1.0) < 1e-6


def test_counterexample_growth_deficit(counterexample_n1):
    report = counterexample_n1
    assert report.growth_margin >= 1e-4
    assert 0.012 <= report.growth_margin <= 0.016
    assert report.oracle_gap <= 1e-5


def test_counterexample_convexity_violation(counterexample_n1):
    verdict = counterexample_n1.convexity
    assert verdict.kind == "violation"
    assert verdict.magnitude < -1e-4
    assert counterexample_n1.taylor_worst_margin >= 0.0


def test_counterexample_controls_clean(counterexample_n1):
    verdicts = counterexample_n1.control_verdicts
    assert len(verdicts) == 2
    assert all(v.kind == "convex" for v in verdicts.values())
    labels = " ".join(verdicts)
    assert "flat" in labels and "poincare" in labels
