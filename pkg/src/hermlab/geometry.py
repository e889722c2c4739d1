"""Hermitian chart geometry: connection, torsion, curvature, Hessians, L.

A chart is an open ball or polydisc in C^n carrying a Hermitian metric
g_{i jbar}(z) and the standard complex structure of the coordinates.  The
metric is any field z -> (n, n) complex Hermitian positive-definite matrix;
catalog charts use :class:`~hermlab.numerics.SymbolicField` entries so every
derivative is exact, but plain callables work through finite differences.

Conventions, fixed once and used by every operation below:

* ``G[i, j]`` stores g_{i jbar}: first index unbarred, second barred.
* A real tangent vector X is stored by its (1,0)-components X^i, meaning
  X = X^i d_i + conj(X^i) d_ibar, with squared length
  ``|X|^2 = 2 sum g_{i jbar} X^i conj(X^j)``.  A unit real X therefore has
  sum g X Xbar = 1/2, and xi = (X - iJX)/sqrt(2) has (1,0)-components
  sqrt(2) X^i of unit Hermitian norm g(xi, xibar) = 1.
* Chern Christoffels Gamma^k_{ij} = sum_l g^{lbar k} d_i g_{j lbar} are
  stored as ``gamma[i, j, k]`` (two lower indices first, upper index last);
  torsion tau^k_{ij} = Gamma^k_{ij} - Gamma^k_{ji} is stored the same way.
* Chern curvature R_{i jbar k lbar} is stored as ``R[i, j, k, l]``.
* Real coordinates are ordered (x_1..x_n, y_1..y_n) with z = x + iy, and
  real tensors (Levi-Civita metric, Christoffels, Riemann tensor, nabla J)
  use that 2n-index convention throughout.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .numerics import (
    ANALYTIC_MODE,
    DEFAULT_TOL,
    FD_MODE,
    DifferentiationMode,
    ToleranceBundle,
    differentiate,
)


class GeometryError(Exception):
    """Inconsistent geometric data or an invalid geometric request."""


class DomainError(GeometryError):
    """Point outside the chart domain (or too close to its edge)."""


class SingularMetricError(GeometryError):
    """Metric not Hermitian positive-definite where it was evaluated."""


# ----------------------------------------------------------------------------
# charts and domains


@dataclass(frozen=True)
class DomainSpec:
    """Ball or polydisc centered in C^n; radius may be infinite."""

    kind: str = "ball"
    radius: float = math.inf
    center: tuple = ()

    def __post_init__(self):
        if self.kind not in ("ball", "polydisc"):
            raise ValueError(f"unknown domain kind {self.kind!r}")
        if not self.radius > 0.0:
            raise ValueError("domain radius must be positive")

    def _offset(self, z):
        if self.center:
            return z - np.asarray(self.center, dtype=complex)
        return z

    def contains(self, z, margin=0.0):
        if math.isinf(self.radius):
            return True
        w = self._offset(np.asarray(z, dtype=complex))
        if self.kind == "ball":
            return float(np.linalg.norm(w)) <= self.radius - margin
        return float(np.max(np.abs(w))) <= self.radius - margin


@dataclass(frozen=True, eq=False)
class HermitianChart:
    """Immutable coordinate chart with a Hermitian metric field.

    injectivity_floor is a user-certified radius: within it the exponential
    sphere is taken to be the distance sphere.  curvature_bound, when set, is
    an exact constant K with H >= K everywhere on the chart (0 for flat, -2
    for the Poincare ball); growth checks use it to pick the reparametrized
    abscissa.  exact_exp, when set, is a closed-form exponential map
    (point, X, t) -> z used as a fast path and cross-checked against the
    integrator in tests.
    """

    n: int
    metric: Callable
    domain: DomainSpec
    label: str
    injectivity_floor: float
    mode: DifferentiationMode = FD_MODE
    curvature_bound: Optional[float] = None
    exact_exp: Optional[Callable] = None

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("complex dimension must be at least 1")
        if not self.injectivity_floor > 0.0:
            raise ValueError("injectivity_floor must be positive")

    def require_point(self, p, margin=0.0):
        z = np.atleast_1d(np.asarray(p, dtype=complex))
        if z.shape != (self.n,):
            raise DomainError(f"point shape {z.shape} does not match n={self.n}")
        if not np.all(np.isfinite(z)):
            raise DomainError("point has non-finite coordinates")
        if not self.domain.contains(z, margin=margin):
            raise DomainError(
                f"point {z} outside chart {self.label!r} domain "
                f"(margin {margin:g})"
            )
        return z

    def metric_at(self, p):
        return metric_jets(self, p, order=0).G


@dataclass(frozen=True, eq=False)
class TangentVec:
    """Real tangent vector at a chart point, stored by (1,0)-components."""

    base: np.ndarray
    comps: np.ndarray

    def norm(self, chart):
        G = chart.metric_at(self.base)
        return real_norm(G, self.comps)


def _as_components(X):
    if isinstance(X, TangentVec):
        return np.asarray(X.comps, dtype=complex)
    return np.atleast_1d(np.asarray(X, dtype=complex))


# ----------------------------------------------------------------------------
# pairings and component conversions


def hermitian_pairing(G, u, v):
    """g(u, vbar) = sum g_{i jbar} u^i conj(v^j) for (1,0)-components."""
    return complex(np.asarray(u) @ np.asarray(G) @ np.conj(v))


def real_pairing(G, u, v):
    """Riemannian pairing of real vectors given by (1,0)-components."""
    return 2.0 * hermitian_pairing(G, u, v).real


def real_norm(G, u):
    return math.sqrt(max(real_pairing(G, u, u), 0.0))


def hermitian_norm(G, u):
    return math.sqrt(max(hermitian_pairing(G, u, u).real, 0.0))


def holo_components(x):
    """Real (2n,) components in the (x, y) ordering -> (1,0)-components."""
    x = np.asarray(x)
    n = x.shape[0] // 2
    return x[:n] + 1j * x[n:]


def real_components(c):
    """(1,0)-components -> real (2n,) components in the (x, y) ordering."""
    c = np.asarray(c, dtype=complex)
    return np.concatenate([c.real, c.imag])


def complex_structure_matrix(n):
    """J on real components: (a, b) -> (-b, a), i.e. multiplication by i."""
    J = np.zeros((2 * n, 2 * n))
    J[:n, n:] = -np.eye(n)
    J[n:, :n] = np.eye(n)
    return J


def unit_vector(chart, p, comps, hermitian=False, G=None):
    """Rescale (1,0)-components to a unit real vector (or unit Hermitian).

    With hermitian=False the result X satisfies |X| = 1 in the real norm
    (sum g X Xbar = 1/2); with hermitian=True it satisfies g(X, Xbar) = 1.
    """
    if G is None:
        G = chart.metric_at(p)
    c = _as_components(comps)
    nrm = hermitian_norm(G, c) if hermitian else real_norm(G, c)
    if not nrm > 0.0:
        raise GeometryError("cannot normalize a zero tangent vector")
    return c / nrm


# ----------------------------------------------------------------------------
# metric jets


def _unit_index(n, i):
    mi = [0] * n
    mi[i] = 1
    return tuple(mi)


def _pair_index(n, i, j):
    mi = [0] * n
    mi[i] += 1
    mi[j] += 1
    return tuple(mi)


def _field_mode(field, preferred):
    if hasattr(field, "derivative"):
        return ANALYTIC_MODE
    if preferred.kind == "analytic-callback":
        return FD_MODE
    return preferred


@dataclass(frozen=True, eq=False)
class MetricJets:
    """Metric value and derivatives at a point.

    d1[i] = d_i G and db1[i] = d_ibar G = d1[i]^H; with order >= 2,
    d2[i, j] = d_i d_j G and m2[i, j] = d_i d_jbar G.  All entries are (n, n)
    matrices in the g_{i jbar} storage convention.
    """

    point: np.ndarray
    G: np.ndarray
    Ginv: np.ndarray
    order: int
    d1: Optional[np.ndarray] = None
    db1: Optional[np.ndarray] = None
    d2: Optional[np.ndarray] = None
    m2: Optional[np.ndarray] = None

    @property
    def n(self):
        return self.G.shape[0]

    def db2(self, i, j):
        """d_ibar d_jbar G, the conjugate-transpose of d2[i, j]."""
        return self.d2[i, j].conj().T


def metric_jets(chart, p, order=1):
    """Evaluate the metric and its derivatives at p, with validation.

    Raises SingularMetricError if G is not Hermitian positive-definite and
    DomainError if p (padded by the finite-difference stencil width in FD
    mode) leaves the chart domain.
    """
    if order not in (0, 1, 2):
        raise ValueError("metric jets are available for orders 0, 1, 2")
    n = chart.n
    mode = _field_mode(chart.metric, chart.mode)
    margin = 0.0
    if order > 0 and mode.kind == "finite-difference":
        margin = 4.0 * mode.step ** (3.0 / (order + 2))
    z = chart.require_point(p, margin=margin)

    G = np.asarray(chart.metric(z), dtype=complex)
    if G.shape != (n, n):
        raise SingularMetricError(
            f"metric of chart {chart.label!r} returned shape {G.shape}"
        )
    if not np.all(np.isfinite(G)):
        raise SingularMetricError(f"metric not finite at {z}")
    herm_defect = float(np.max(np.abs(G - G.conj().T)))
    if herm_defect > 1e-10 * max(1.0, float(np.max(np.abs(G)))):
        raise SingularMetricError(
            f"metric not Hermitian at {z} (defect {herm_defect:.3e})"
        )
    G = 0.5 * (G + G.conj().T)
    eigs = np.linalg.eigvalsh(G)
    if eigs[0] <= 0.0:
        raise SingularMetricError(
            f"metric not positive definite at {z} (min eigenvalue {eigs[0]:.3e})"
        )
    Ginv = np.linalg.inv(G)

    d1 = db1 = d2 = m2 = None
    if order >= 1:
        d1 = np.stack(
            [differentiate(chart.metric, z, holo=_unit_index(n, i), mode=mode)
             for i in range(n)]
        )
        db1 = np.stack([d1[i].conj().T for i in range(n)])
    if order >= 2:
        d2 = np.empty((n, n, n, n), dtype=complex)
        m2 = np.empty((n, n, n, n), dtype=complex)
        for i in range(n):
            for j in range(i, n):
                val = differentiate(chart.metric, z, holo=_pair_index(n, i, j),
                                    mode=mode)
                d2[i, j] = val
                d2[j, i] = val
            for j in range(n):
                m2[i, j] = differentiate(chart.metric, z,
                                         holo=_unit_index(n, i),
                                         anti=_unit_index(n, j), mode=mode)
    return MetricJets(point=z, G=G, Ginv=Ginv, order=order,
                      d1=d1, db1=db1, d2=d2, m2=m2)


def _need_jets(chart, p, jets, order):
    if jets is None or jets.order < order:
        return metric_jets(chart, p, order=order)
    return jets


# ----------------------------------------------------------------------------
# Chern connection, torsion, curvature


def chern_christoffels(chart, p, jets=None):
    """Gamma^k_{ij} = sum_l g^{lbar k} d_i g_{j lbar}, as gamma[i, j, k]."""
    jets = _need_jets(chart, p, jets, 1)
    return np.einsum("ijl,lk->ijk", jets.d1, jets.Ginv)


def torsion(chart, p, jets=None):
    """tau^k_{ij} = Gamma^k_{ij} - Gamma^k_{ji}, as tau[i, j, k]."""
    gamma = chern_christoffels(chart, p, jets=jets)
    return gamma - gamma.transpose(1, 0, 2)


def chern_curvature(chart, p, jets=None):
    """Curvature R_{i jbar k lbar} of the Chern connection, as R[i, j, k, l].

    Computed from the general-point formula
    R_{i jbar k lbar} = -d_i d_jbar g_{k lbar}
                        + sum g^{qbar p} (d_i g_{k qbar})(d_jbar g_{p lbar}),
    which satisfies the conjugate-pair symmetry R[i,j,k,l] = conj(R[j,i,l,k]).
    """
    jets = _need_jets(chart, p, jets, 2)
    n = jets.n
    R = np.empty((n, n, n, n), dtype=complex)
    for i in range(n):
        for j in range(n):
            R[i, j] = -jets.m2[i, j] + jets.d1[i] @ jets.Ginv @ jets.db1[j]
    return R


def kahler_defect(chart, p, jets=None):
    """Largest component of the (2,1)-part of d omega at p.

    omega = i g_{i jbar} dz^i wedge dzbar^j, so d omega vanishes exactly when
    d_k g_{i jbar} is symmetric in (k, i); the defect reported here is the
    max over components of that antisymmetry, a torsion detector that never
    touches the inverse metric.
    """
    jets = _need_jets(chart, p, jets, 1)
    d1 = jets.d1
    return float(np.max(np.abs(d1 - d1.transpose(1, 0, 2))))


# ----------------------------------------------------------------------------
# unitary frames and the two sectional functionals


def unitary_frame(chart, p, first=None, jets=None, order=None):
    """Columns of the returned matrix form a g-unitary (1,0)-frame at p.

    Modified Gram-Schmidt on the coordinate basis, pivoting each round to the
    candidate with the largest remaining g-norm (ties to the lowest index),
    so the result is deterministic.  When ``first`` is given it is normalized
    and used as e_1.  ``order``, when given, fixes the completion order
    outright (no pivoting, nearly-collapsed candidates skipped); two orders
    give two different completions of the same e_1, which is how frame
    independence is tested.
    """
    jets = _need_jets(chart, p, jets, 0)
    n, G = jets.n, jets.G
    basis = list(range(n)) if order is None else list(order)
    pool = [np.eye(n, dtype=complex)[:, i] for i in basis]
    if first is not None:
        pool.insert(0, _as_components(first).copy())
    pivot = order is None
    frame = []
    for step in range(n):
        while True:
            if not pool:
                raise GeometryError("frame candidates exhausted; vector not "
                                    "normalizable")
            if step == 0 and first is not None:
                pick = 0
            elif pivot:
                pick = int(np.argmax([hermitian_norm(G, v) for v in pool]))
            else:
                pick = 0
            v = pool.pop(pick)
            nrm = hermitian_norm(G, v)
            if nrm >= 1e-9:
                break
            if pivot or (step == 0 and first is not None):
                raise GeometryError("frame candidate collapsed; vector not "
                                    "normalizable")
        e = v / nrm
        pool = [w - hermitian_pairing(G, w, e) * e for w in pool]
        frame.append(e)
    return np.stack(frame, axis=1)


def _frame_torsion_correction(G, tau, xi):
    # sum over any g-unitary completion of |<tau(e_i, xi), xi>|^2; the sum is
    # the squared g-dual norm of Y -> <tau(Y, xi), xi>, hence frame-free.
    # Components of the functional on the coordinate basis:
    phi = np.einsum("ijk,j,kl,l->i", tau, xi, G, np.conj(xi))
    Ginv = np.linalg.inv(G)
    # dual norm^2 = phi_i g^{... } conj(phi_j) with the inverse transpose
    return float(np.real(phi @ Ginv.T @ np.conj(phi)))


def holomorphic_sectional_curvature(chart, p, xi, jets=None):
    """H(xi) = R_{1bar 1 1bar 1} - sum_{i>=2} |tau^1_{i1}|^2 at p.

    xi is normalized to g(xi, xibar) = 1; the curvature term is the full
    contraction of the Chern curvature with xi and the torsion correction is
    evaluated frame-independently (the i = 1 term vanishes by antisymmetry).
    """
    jets = _need_jets(chart, p, jets, 2)
    xi = unit_vector(chart, p, xi, hermitian=True, G=jets.G)
    R = chern_curvature(chart, p, jets=jets)
    tau = torsion(chart, p, jets=jets)
    rterm = np.einsum("ijkl,i,j,k,l->", R, xi, np.conj(xi), xi, np.conj(xi))
    if abs(rterm.imag) > 1e-8 * max(1.0, abs(rterm)):
        raise GeometryError(f"curvature contraction not real: {rterm}")
    return float(rterm.real) - _frame_torsion_correction(jets.G, tau, xi)


def converse_functional(chart, p, xi, jets=None):
    """R_{1bar 1 1bar 1} + sum_{i>=2} |tau^1_{i1}|^2, the plus-sign variant.

    Nonnegativity of this quantity is what the counterexample scenario
    refutes as a necessary condition for the three circle property.
    """
    jets = _need_jets(chart, p, jets, 2)
    xi = unit_vector(chart, p, xi, hermitian=True, G=jets.G)
    R = chern_curvature(chart, p, jets=jets)
    tau = torsion(chart, p, jets=jets)
    rterm = np.einsum("ijkl,i,j,k,l->", R, xi, np.conj(xi), xi, np.conj(xi))
    return float(rterm.real) + _frame_torsion_correction(jets.G, tau, xi)


# ----------------------------------------------------------------------------
# real (Levi-Civita) machinery


def _real_block(M):
    # real Riemannian metric blocks of a Hermitian form, in the 2 Re g
    # convention: basis (x_1..x_n, y_1..y_n)
    A, B = M.real, M.imag
    return 2.0 * np.block([[A, B], [-B, A]])


def _real_metric_derivatives(jets):
    n = jets.n
    d1, db1 = jets.d1, jets.db1
    DR = np.empty((2 * n, 2 * n, 2 * n))
    for m in range(n):
        DR[m] = _real_block(d1[m] + db1[m])
        DR[n + m] = _real_block(1j * (d1[m] - db1[m]))
    return DR


def _real_metric_second_derivatives(jets):
    n = jets.n
    d2, m2 = jets.d2, jets.m2
    D2 = np.empty((2 * n, 2 * n, 2 * n, 2 * n))
    for m in range(n):
        for k in range(n):
            dd = d2[m, k]
            mm = m2[m, k]
            mk = m2[k, m]
            bb = jets.db2(m, k)
            D2[m, k] = _real_block(dd + mm + mk + bb)
            D2[m, n + k] = _real_block(1j * (dd - mm + mk - bb))
            D2[n + m, k] = _real_block(1j * (dd + mm - mk - bb))
            D2[n + m, n + k] = _real_block(-(dd - mm - mk + bb))
    return D2


@dataclass(frozen=True, eq=False)
class LeviCivitaData:
    """Levi-Civita tensors at a point, in real (x, y) coordinates.

    gamma[a, b, c] = Gamma^c_{ab}; riemann[a, b, c, d] = <R(d_a, d_b)d_c, d_d>
    for R(X,Y) = nabla_X nabla_Y - nabla_Y nabla_X - nabla_{[X,Y]};
    nabla_J[a, b, c] = (nabla_a J)^c_b.
    """

    point: np.ndarray
    G_R: np.ndarray
    Ginv_R: np.ndarray
    J: np.ndarray
    gamma: np.ndarray
    riemann: np.ndarray
    nabla_J: np.ndarray

    def holomorphic_numerator(self, x):
        """R^L(X, JX, JX, X) for a real vector given by real components."""
        x = np.asarray(x, dtype=float)
        jx = self.J @ x
        return float(np.einsum("abcd,a,b,c,d->", self.riemann, x, jx, jx, x))

    def nabla_J_vector(self, x):
        """(nabla_X J) X as real components."""
        x = np.asarray(x, dtype=float)
        return np.einsum("abc,a,b->c", self.nabla_J, x, x)

    def nabla_J_norm_sq(self, x):
        v = self.nabla_J_vector(x)
        return float(v @ self.G_R @ v)


def _lc_first_order(jets):
    G_R = _real_block(jets.G)
    Gi = np.linalg.inv(G_R)
    DR = _real_metric_derivatives(jets)
    # Gamma_{ab,d} = (d_a G_{db} + d_b G_{da} - d_d G_{ab}) / 2, then raise
    low = 0.5 * (DR.transpose(0, 2, 1) + DR.transpose(2, 0, 1)
                 - DR.transpose(1, 2, 0))
    gamma = np.einsum("abd,dc->abc", low, Gi)
    return G_R, Gi, DR, low, gamma


def levi_civita_christoffels(chart, p, jets=None):
    """Real-coordinate Christoffel symbols gamma[a, b, c] = Gamma^c_{ab}."""
    jets = _need_jets(chart, p, jets, 1)
    return _lc_first_order(jets)[4]


def levi_civita_curvature(chart, p, jets=None):
    """Full real Riemann tensor and nabla J at p, from metric jets."""
    jets = _need_jets(chart, p, jets, 2)
    n = jets.n
    G_R, Gi, DR, low, gamma = _lc_first_order(jets)
    D2 = _real_metric_second_derivatives(jets)

    dlow = 0.5 * (D2.transpose(0, 1, 3, 2) + D2.transpose(0, 3, 1, 2)
                  - D2.transpose(0, 2, 3, 1))
    dGi = np.einsum("de,aef,fc->adc", -Gi, DR, Gi)
    dgamma = (np.einsum("eabd,dc->eabc", dlow, Gi)
              + np.einsum("abd,edc->eabc", low, dGi))

    up = (dgamma - dgamma.transpose(1, 0, 2, 3)
          + np.einsum("aed,bce->abcd", gamma, gamma)
          - np.einsum("bed,ace->abcd", gamma, gamma))
    riemann = np.einsum("abce,ed->abcd", up, G_R)

    J = complex_structure_matrix(n)
    nabla_J = (np.einsum("aec,eb->abc", gamma, J)
               - np.einsum("abe,ce->abc", gamma, J))
    return LeviCivitaData(point=jets.point, G_R=G_R, Ginv_R=Gi, J=J,
                          gamma=gamma, riemann=riemann, nabla_J=nabla_J)


def nabla_J_pairing(chart, p, X, Y, jets=None):
    """<(nabla_X J) X, Y> from torsion alone.

    Uses the pairing identity
    <(nabla_X J)(X), Y> = <tau(X,Y), JX>/2 + 3 <tau(JX,Y), X>/2,
    with all pairings Riemannian and tau contracted on (1,0)-components.
    """
    jets = _need_jets(chart, p, jets, 1)
    G = jets.G
    u = _as_components(X)
    w = _as_components(Y)
    tau = torsion(chart, p, jets=jets)
    t_xy = np.einsum("ijk,i,j->k", tau, u, w)
    t_jxy = np.einsum("ijk,i,j->k", tau, 1j * u, w)
    term1 = real_pairing(G, t_xy, 1j * u)
    term2 = real_pairing(G, t_jxy, u)
    return 0.5 * term1 + 1.5 * term2


def nabla_J_pairing_direct(chart, p, X, Y, lc=None):
    """<(nabla_X J) X, Y> by differentiating J with Levi-Civita Christoffels.

    Independent of the torsion route above; the two must agree within
    tensor_rel on any chart.
    """
    if lc is None:
        lc = levi_civita_curvature(chart, p)
    x = real_components(_as_components(X))
    y = real_components(_as_components(Y))
    return float(lc.nabla_J_vector(x) @ lc.G_R @ y)


# ----------------------------------------------------------------------------
# Hessians and the L operators


def _scalar_jets(chart, p, u, order=2):
    """Complex partials of a real scalar field at p.

    Returns (value, pu, d2u, m2u) where pu[i] = d_i u, d2u[i, j] = d_i d_j u,
    m2u[i, j] = d_i d_jbar u.  Antiholomorphic partials follow by conjugation
    because u is real-valued (checked).
    """
    n = chart.n
    mode = _field_mode(u, chart.mode)
    margin = 4.0 * mode.step ** (3.0 / (order + 2)) \
        if mode.kind == "finite-difference" else 0.0
    z = chart.require_point(p, margin=margin)
    val = complex(u(z))
    if abs(val.imag) > 1e-9 * max(1.0, abs(val)):
        raise GeometryError("Hessian machinery expects a real-valued field")
    pu = np.array([differentiate(u, z, holo=_unit_index(n, i), mode=mode)
                   for i in range(n)])
    d2u = m2u = None
    if order >= 2:
        d2u = np.empty((n, n), dtype=complex)
        m2u = np.empty((n, n), dtype=complex)
        for i in range(n):
            for j in range(i, n):
                d2u[i, j] = d2u[j, i] = differentiate(
                    u, z, holo=_pair_index(n, i, j), mode=mode)
                m2u[i, j] = differentiate(u, z, holo=_unit_index(n, i),
                                          anti=_unit_index(n, j), mode=mode)
                m2u[j, i] = np.conj(m2u[i, j])
    return val.real, pu, d2u, m2u


def _real_scalar_derivatives(pu, d2u, m2u):
    n = pu.shape[0]
    du = np.concatenate([2.0 * pu.real, -2.0 * pu.imag])
    H = np.empty((2 * n, 2 * n))
    H[:n, :n] = 2.0 * (d2u.real + m2u.real)
    H[:n, n:] = -2.0 * d2u.imag + 2.0 * m2u.imag
    H[n:, :n] = -2.0 * d2u.imag - 2.0 * m2u.imag
    H[n:, n:] = -2.0 * d2u.real + 2.0 * m2u.real
    return du, 0.5 * (H + H.T)


@dataclass(frozen=True, eq=False)
class HessianData:
    """Gradient and both Hessians of a real scalar field at a point.

    hess_real is the Riemannian Hessian as a bilinear form on real
    components; hess_chern_hh and hess_chern_mixed are the Hess_D blocks on
    (d_i, d_j) and (d_i, d_jbar) (the remaining blocks are conjugates);
    diff_residual is the largest deviation, over real basis pairs, of
    Hess_D - Hess from its torsion expression.
    """

    point: np.ndarray
    value: float
    grad_real: np.ndarray
    grad_holo: np.ndarray
    J_grad: np.ndarray
    hess_real: np.ndarray
    hess_chern_hh: np.ndarray
    hess_chern_mixed: np.ndarray
    diff_residual: float

    def hess_d(self, X, Y):
        """Hess_D on real vectors given by (1,0)-components."""
        u, v = _as_components(X), _as_components(Y)
        hh = np.einsum("ij,i,j->", self.hess_chern_hh, u, v)
        hm = np.einsum("ij,i,j->", self.hess_chern_mixed, u, np.conj(v))
        return float((hh + hm + np.conj(hh) + np.conj(hm)).real)

    def hess(self, x, y):
        """Riemannian Hessian on real component vectors."""
        return float(np.asarray(x) @ self.hess_real @ np.asarray(y))


def hessians(chart, p, u, jets=None, check=True, tol=DEFAULT_TOL):
    """Riemannian and Chern Hessians of a real scalar field at p.

    With check=True the difference of the two Hessians is verified against
    its torsion expression
    Hess_D(u)(X,Y) - Hess(u)(X,Y)
        = [<tau(X,Y), grad u> + <tau(Y, grad u), X> - <tau(grad u, X), Y>]/2
    on all real coordinate basis pairs; failure raises GeometryError.
    """
    jets = _need_jets(chart, p, jets, 2)
    n = jets.n
    val, pu, d2u, m2u = _scalar_jets(chart, p, u, order=2)
    du, d2_real = _real_scalar_derivatives(pu, d2u, m2u)

    lc = levi_civita_curvature(chart, p, jets=jets)
    hess_real = d2_real - np.einsum("abc,c->ab", lc.gamma, du)
    grad_real = lc.Ginv_R @ du
    J_grad = lc.J @ grad_real
    grad_holo = jets.Ginv.T @ np.conj(pu)

    # Hess_D differentiates in its second slot (that orientation is what
    # makes Hess_D(X,Y) - Hess_D(Y,X) = +tau(X,Y)f), so the (d_i, d_j)
    # block carries Gamma^k_{ji}, not Gamma^k_{ij}
    gamma = chern_christoffels(chart, p, jets=jets)
    hess_hh = d2u - np.einsum("jik,k->ij", gamma, pu)
    hess_mixed = m2u

    data = HessianData(point=jets.point, value=val, grad_real=grad_real,
                       grad_holo=grad_holo, J_grad=J_grad,
                       hess_real=hess_real, hess_chern_hh=hess_hh,
                       hess_chern_mixed=hess_mixed, diff_residual=0.0)

    residual = 0.0
    if check:
        tau = torsion(chart, p, jets=jets)
        G = jets.G
        gh = grad_holo
        basis = [np.eye(n, dtype=complex)[:, i] for i in range(n)]
        basis += [1j * np.eye(n, dtype=complex)[:, i] for i in range(n)]
        scale = max(1.0, float(np.max(np.abs(hess_real))))
        for a, ea in enumerate(basis):
            xa = real_components(ea)
            for b, eb in enumerate(basis):
                xb = real_components(eb)
                lhs = data.hess_d(ea, eb) - data.hess(xa, xb)
                t1 = real_pairing(G, np.einsum("ijk,i,j->k", tau, ea, eb), gh)
                t2 = real_pairing(G, np.einsum("ijk,i,j->k", tau, eb, gh), ea)
                t3 = real_pairing(G, np.einsum("ijk,i,j->k", tau, gh, ea), eb)
                residual = max(residual, abs(lhs - 0.5 * (t1 + t2 - t3)))
        if residual > 10.0 * tol.tensor_rel * scale:
            raise GeometryError(
                f"Hessian difference disagrees with torsion formula "
                f"(residual {residual:.3e} at {jets.point})"
            )
        data = HessianData(point=data.point, value=val, grad_real=grad_real,
                           grad_holo=grad_holo, J_grad=J_grad,
                           hess_real=hess_real, hess_chern_hh=hess_hh,
                           hess_chern_mixed=hess_mixed,
                           diff_residual=residual)
    return data


def complex_hessian(chart, p, u):
    """The matrix u_{i jbar} = d_i d_jbar u at p, Hermitized."""
    _, _, _, m2u = _scalar_jets(chart, p, u, order=2)
    return 0.5 * (m2u + m2u.conj().T)


def psh_test(chart, p, u, tol=DEFAULT_TOL):
    """(min eigenvalue of u_{i jbar}, whether u is psh at p within slack)."""
    M = complex_hessian(chart, p, u)
    min_eig = float(np.linalg.eigvalsh(M)[0])
    scale = max(1.0, float(np.max(np.abs(M))))
    return min_eig, min_eig >= -tol.tensor_rel * scale


def L_operator_routes(chart, p, u, jets=None):
    """The three evaluations of L[u] and their comparison scale.

    Returns (route_real, route_xi, route_chern, scale): the defining real
    form, the real Hessian on the complexified vector
    xi = grad u - i J grad u, and the Chern form
    4 sum u_{i jbar} w^i conj(w^j) with w the (1,0)-gradient components.
    """
    data = hessians(chart, p, u, jets=jets, check=False)
    g, jg = data.grad_real, data.J_grad
    route_real = data.hess(g, g) + data.hess(jg, jg)

    xi = np.concatenate([data.grad_holo, -1j * data.grad_holo])
    route_xi = float((xi @ data.hess_real @ np.conj(xi)).real)

    w = data.grad_holo
    route_chern = 4.0 * float(
        np.einsum("ij,i,j->", data.hess_chern_mixed, w, np.conj(w)).real)

    scale = max(1.0, abs(route_real), abs(route_chern),
                float(np.max(np.abs(data.hess_real))) * float(g @ g + 1.0))
    return route_real, route_xi, route_chern, scale


def L_operator(chart, p, u, jets=None, tol=DEFAULT_TOL):
    """L[u] = Hess(u)(grad u, grad u) + Hess(u)(J grad u, J grad u).

    All three routes from L_operator_routes must agree within tensor_rel
    (times scale); the defining real form is returned.
    """
    route_real, route_xi, route_chern, scale = L_operator_routes(
        chart, p, u, jets=jets)
    spread = max(abs(route_real - route_xi), abs(route_real - route_chern))
    if spread > tol.tensor_rel * scale:
        raise GeometryError(
            f"L[u] routes disagree: real {route_real:.12g}, "
            f"xi {route_xi:.12g}, chern {route_chern:.12g}"
        )
    return route_real


def script_L(chart, p, u, T, Q=None, jets=None):
    """Generalized operator sum_i Hess(u)(T_i grad u, T_i grad u) + Q(grad^3).

    T is a list of real (1,1)-tensor fields (callables z -> (2n, 2n) or
    constant matrices) and Q an optional real (0,3)-tensor field (callable
    z -> (2n, 2n, 2n) or a constant array).  With T = [identity, J] and
    Q = None this reduces to L_operator.
    """
    data = hessians(chart, p, u, jets=jets, check=False)
    z = data.point
    g = data.grad_real
    total = 0.0
    for Ti in T:
        M = np.asarray(Ti(z) if callable(Ti) else Ti, dtype=float)
        if M.shape != (2 * chart.n, 2 * chart.n):
            raise GeometryError(f"(1,1)-tensor of shape {M.shape} on C^{chart.n}")
        v = M @ g
        total += data.hess(v, v)
    if Q is not None:
        Qv = np.asarray(Q(z) if callable(Q) else Q, dtype=float)
        if Qv.shape != (2 * chart.n,) * 3:
            raise GeometryError(f"(0,3)-tensor of shape {Qv.shape} on C^{chart.n}")
        total += float(np.einsum("abc,a,b,c->", Qv, g, g, g))
    return total


# ----------------------------------------------------------------------------
# assembled report


@dataclass(frozen=True, eq=False)
class GeometryReport:
    """Pointwise geometric data bundle used by scenario drivers."""

    point: np.ndarray
    christoffels: np.ndarray
    torsion: np.ndarray
    chern_curvature: np.ndarray
    lc_curvature: np.ndarray
    unitary_frame: np.ndarray
    lc: LeviCivitaData


def geometry_report(chart, p):
    """Compute connection, torsion, both curvatures and a frame at p."""
    jets = metric_jets(chart, p, order=2)
    lc = levi_civita_curvature(chart, p, jets=jets)
    return GeometryReport(
        point=jets.point,
        christoffels=chern_christoffels(chart, p, jets=jets),
        torsion=torsion(chart, p, jets=jets),
        chern_curvature=chern_curvature(chart, p, jets=jets),
        lc_curvature=lc.riemann,
        unitary_frame=unitary_frame(chart, p, jets=jets),
        lc=lc,
    )


__all__ = [
    "GeometryError",
    "DomainError",
    "SingularMetricError",
    "DomainSpec",
    "HermitianChart",
    "TangentVec",
    "MetricJets",
    "LeviCivitaData",
    "HessianData",
    "GeometryReport",
    "hermitian_pairing",
    "real_pairing",
    "real_norm",
    "hermitian_norm",
    "holo_components",
    "real_components",
    "complex_structure_matrix",
    "unit_vector",
    "metric_jets",
    "chern_christoffels",
    "torsion",
    "chern_curvature",
    "kahler_defect",
    "unitary_frame",
    "holomorphic_sectional_curvature",
    "converse_functional",
    "levi_civita_curvature",
    "nabla_J_pairing",
    "nabla_J_pairing_direct",
    "hessians",
    "complex_hessian",
    "psh_test",
    "L_operator",
    "L_operator_routes",
    "script_L",
    "geometry_report",
]
