"""Numerical laboratory for curvature and growth on Hermitian charts.

Layers, bottom up:

- numerics: differentiation modes, tolerance bundles, ODE and quadrature
  wrappers shared by everything above.
- geometry: charts, metric jets, Chern and Levi-Civita data, Hessians and
  the L operator, with every quantity computable by two independent routes.
- metrics: the chart catalog (flat, Poincare ball, radial conformal,
  polynomial perturbations).
- geodesics: complex-form geodesic integration, exponential spheres, cubic
  expansions and normal holomorphic coordinates.
- comparison: the q-profile catalog, the u'' = qu comparison solver and its
  certified bounds, and curvature lower envelopes along geodesic fans.
- growth: holomorphic test functions, sphere maxima, growth curves and
  convexity / monotonicity / maximum-principle / counterexample verdicts.
- cli: the batch driver (`hermlab run`, `hermlab list-catalogs`).
"""

from .numerics import (
    ANALYTIC_MODE,
    DEFAULT_TOL,
    FD_MODE,
    DerivativeError,
    DifferentiationMode,
    IntegrationError,
    NumericsError,
    SymbolicField,
    ToleranceBundle,
    differentiate,
    field_symbols,
    integrate_ode,
    quadrature,
)
from .geometry import (
    DomainError,
    DomainSpec,
    GeometryError,
    HermitianChart,
    L_operator,
    L_operator_routes,
    MetricJets,
    SingularMetricError,
    TangentVec,
    chern_christoffels,
    chern_curvature,
    complex_hessian,
    converse_functional,
    geometry_report,
    hessians,
    holomorphic_sectional_curvature,
    kahler_defect,
    levi_civita_christoffels,
    levi_civita_curvature,
    metric_jets,
    nabla_J_pairing,
    nabla_J_pairing_direct,
    psh_test,
    script_L,
    torsion,
    unit_vector,
    unitary_frame,
)
from .metrics import (
    CHART_BUILDERS,
    CHART_PARAMS,
    default_charts,
    flat_chart,
    make_chart,
    poincare_chart,
    poly_perturbed_chart,
    radial_conformal_chart,
)
from .geodesics import (
    GeodesicPath,
    NormalCoordinateMap,
    TaylorArc,
    TaylorData,
    direction_sphere_points,
    exp_sphere,
    geodesic_fan,
    geodesic_taylor,
    integrate_geodesic,
    integrate_geodesic_levi_civita,
    normal_holomorphic_coordinates,
    tangent_directions,
    taylor_data,
    taylor_probe,
)
from .comparison import (
    PROFILE_BUILDERS,
    BoundsReport,
    ComparisonProfile,
    DecayProfile,
    HLowerCurve,
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
from .growth import (
    CounterexampleReport,
    GrowthCurve,
    GrowthError,
    HolomorphicTestFunction,
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

__version__ = "0.1.0"
