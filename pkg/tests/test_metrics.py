import math

import numpy as np
import pytest

from hermlab.geometry import SingularMetricError, metric_jets
from hermlab.metrics import (
    CHART_BUILDERS,
    CHART_PARAMS,
    default_charts,
    flat_chart,
    make_chart,
    poincare_chart,
    poly_perturbed_chart,
    radial_conformal_chart,
)


def test_catalog_tables_consistent():
    assert set(CHART_PARAMS) == set(CHART_BUILDERS)
    for name, params in CHART_PARAMS.items():
        chart = make_chart(name, **params)
        assert chart.n == params["n"]


def test_make_chart_unknown_name():
    with pytest.raises(KeyError, match="catalog"):
        make_chart("fubini-study")


def test_default_charts_sweep():
    charts = default_charts()
    assert len(charts) == 8
    assert len({c.label for c in charts}) == 8
    for chart in charts:
        assert chart.injectivity_floor > 0.0
        p = 0.1 * np.ones(chart.n, dtype=complex)
        jets = metric_jets(chart, p, order=0)
        assert np.linalg.eigvalsh(jets.G)[0] > 0.0


def test_flat_values():
    chart = flat_chart(2)
    G = chart.metric_at(np.array([0.5 + 0.1j, -0.3j]))
    assert np.max(np.abs(G - np.eye(2))) == 0.0
    assert chart.curvature_bound == 0.0
    assert math.isinf(chart.domain.radius)


def test_poincare_metric_values():
    chart = poincare_chart(1)
    z = np.array([0.5 + 0.0j])
    G = chart.metric_at(z)
    s = 0.25
    expected = 1.0 / (1.0 - s) + s / (1.0 - s) ** 2
    assert abs(G[0, 0] - expected) < 1e-12
    assert chart.curvature_bound == -2.0
    assert chart.domain.radius == 1.0


def test_radial_conformal_values():
    chart = radial_conformal_chart(2, a=1.0, b=0.0)
    z = np.array([0.3 + 0.4j, 0.0j])
    G = chart.metric_at(z)
    assert np.max(np.abs(G - math.exp(0.25) * np.eye(2))) < 1e-12
    chart2 = radial_conformal_chart(1, a=-0.5, b=0.25)
    G2 = chart2.metric_at(np.array([1.0 + 0.0j]))
    assert abs(G2[0, 0] - math.exp(-0.5 + 0.25)) < 1e-12


def test_exact_exp_paths():
    flat = flat_chart(2)
    o = np.array([0.1 + 0.0j, 0.2j])
    X = np.array([1.0 + 1.0j, -0.5j])
    assert np.max(np.abs(flat.exact_exp(o, X, 0.7) - (o + 0.7 * X))) == 0.0

    ball = poincare_chart(1)
    z = ball.exact_exp(np.zeros(1, dtype=complex), np.array([1.0j]), 2.0)
    assert abs(abs(z[0]) - math.tanh(2.0 / math.sqrt(2.0))) < 1e-12
    # closed form declines off-origin starts
    assert ball.exact_exp(np.array([0.3 + 0.0j]), np.array([1.0j]), 1.0) is None


def test_perturbed_chart_positive_definite_sweep():
    chart = poly_perturbed_chart(2, eps=0.04, seed=7)
    rng = np.random.default_rng(99)
    for _ in range(25):
        w = rng.normal(size=2) + 1j * rng.normal(size=2)
        w *= 1.1 * rng.uniform() / np.linalg.norm(w)
        G = metric_jets(chart, w, order=0).G
        assert np.linalg.eigvalsh(G)[0] > 0.0
    G0 = chart.metric_at(np.zeros(2, dtype=complex))
    assert np.max(np.abs(G0 - np.eye(2))) < 1e-12


def test_perturbed_chart_rejects_large_eps():
    with pytest.raises((SingularMetricError, ValueError)):
        poly_perturbed_chart(2, eps=0.49, seed=3)


def test_perturbed_chart_eps_bounds():
    with pytest.raises(ValueError):
        poly_perturbed_chart(2, eps=0.6)
