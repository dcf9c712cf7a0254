"""Hermitian two-forms on a chart and their Chern connections.

A :class:`MetricChart` stores the blocks of the closed (1,1)-form::

    omega = i * ( sum A_ij dt_i ^ dtbar_j + sum B_ij ds_i ^ dtbar_j
                  + sum conj(B_ij) dt_j ^ dsbar_i + sum G_ij ds_i ^ dsbar_j )

The Chern connection lifts ``d/ds_i`` to ``d/ds_i + C_i d/dt`` with
``C = B A^{-1}``; the overall scale of ``omega`` is fixed by requiring
``A = h`` for the metric induced by a hermitian metric ``h`` on a vector
bundle.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .bundles import ConnectionChart, DBarChart, FiberChart, canonical_dbar, sample_points
from .errors import DimensionError, MetricDegenerateError
from .jets import (
    ChartMatrix,
    CoordinateJets,
    FunctionMatrix,
    Jet,
    PolyMatrix,
    as_chart_matrix,
    block_matrix,
    constant_value,
    right_solve_matrix,
)
from .symcore import ChartPoints, WirtingerPoly, cholesky_checked


@dataclass(frozen=True)
class MetricChart:
    chart: FiberChart
    A: ChartMatrix
    B: ChartMatrix
    G: ChartMatrix | None = None
    h: ChartMatrix | None = None  # source metric when built from a vector-bundle metric

    def __post_init__(self):
        m, r = self.chart.dims
        for name, block, shape in (("A", self.A, (r, r)), ("B", self.B, (m, r)), ("G", self.G, (m, m))):
            if block is None:
                continue
            block = as_chart_matrix(block, m, r, shape)
            if block.shape != shape or block.dims != self.chart.dims:
                raise DimensionError(f"block {name} has shape {block.shape}, expected {shape}")
            object.__setattr__(self, name, block)

    def check_positive(self, points: ChartPoints) -> None:
        """Cholesky of ``A`` at every point; raises with the offending point."""
        A = self.A(points)
        herm = np.max(np.abs(A - np.conj(np.swapaxes(A, -1, -2))), initial=0.0)
        if herm > 1e-9 * max(1.0, np.max(np.abs(A), initial=0.0)):
            raise MetricDegenerateError("fiber block is not hermitian")
        cholesky_checked(A, points)

    def full_matrix(self) -> PolyMatrix:
        """Hermitian matrix ``M`` with ``omega = i sum M_ab dz_a ^ dzbar_b`` over ``z = (s, t)``."""
        if not all(isinstance(b, PolyMatrix) for b in (self.A, self.B, self.G)):
            raise TypeError("full two-form needs polynomial blocks including G")
        Bh = self.B.conjugate().transpose()
        return block_matrix([[self.G, self.B], [Bh, self.A]])

    def pair(self, X: np.ndarray, Y: np.ndarray, points: ChartPoints) -> np.ndarray:
        """``omega(X, Ybar)`` for holomorphic tangent vectors given in ``(s, t)`` components."""
        m, r = self.chart.dims
        A, B = self.A(points), self.B(points)
        G = self.G(points) if self.G is not None else np.zeros((len(points), m, m), complex)
        M = np.concatenate([np.concatenate([G, B], -1),
                            np.concatenate([np.conj(np.swapaxes(B, -1, -2)), A], -1)], -2)
        return np.einsum("pa,pab,pb->p", X, M, np.conj(Y))


def chern_connection(omega: MetricChart, d: DBarChart | None = None) -> ConnectionChart:
    """Chern connection of ``omega`` relative to the dbar-operator ``d``.

    The ``d/dt`` components are ``B A^{-1}`` whatever ``d`` is; a perturbed
    operator only contributes the ``dbar_t`` components ``conj(U)``, which
    vanish modulo the antiholomorphic vertical bundle.
    """
    chart = omega.chart
    d = d if d is not None else canonical_dbar(chart)
    if d.chart.dims != chart.dims:
        raise DimensionError("metric and dbar-operator live on different charts")
    A0 = constant_value(omega.A)
    if A0 is not None and isinstance(omega.B, PolyMatrix):
        cholesky_checked(A0[None])
        C = omega.B @ PolyMatrix.constant(np.linalg.inv(A0), chart.dims)
    else:
        C = right_solve_matrix(omega.B, omega.A)
    Cbar = None
    if not (isinstance(d.U, PolyMatrix) and d.U.is_zero()):
        Cbar = d.U.conjugate()
    return ConnectionChart(chart, C, Cbar)


def orthogonality_residual(conn: ConnectionChart, omega: MetricChart, points: ChartPoints) -> np.ndarray:
    """``C A - B`` at each point, i.e. the pairing of each lift with every ``dbar_t_j``."""
    return conn.C(points) @ omega.A(points) - omega.B(points)


def metric_from_linear_hermitian(h: ChartMatrix, chart: FiberChart | None = None,
                                 domain: ChartPoints | None = None) -> MetricChart:
    """Two-form ``i d dbar sum h_kl t_k tbar_l`` of a hermitian metric ``h(s)`` on a trivial bundle."""
    r = h.shape[0]
    if h.shape != (r, r):
        raise DimensionError("h must be square")
    chart = chart or FiberChart(h.m, r)
    if chart.r != r or h.dims != chart.dims:
        raise DimensionError(f"h of size {r} on dims {h.dims} does not fit chart {chart.dims}")
    m = chart.m
    fiber = [chart.t_slot(k) for k in range(r)] + chart.tbar_slots
    if isinstance(h, PolyMatrix):
        if h.depends_on(fiber):
            raise ValueError("h must not depend on fiber variables")
    elif h.depends_on_numeric(fiber, sample_points(chart, 6, seed=3)):
        raise ValueError("h must not depend on fiber variables")
    t = PolyMatrix([[WirtingerPoly.variable(m, r, chart.t_slot(k)) for k in range(r)]], chart.dims)
    tbar = PolyMatrix([[WirtingerPoly.variable(m, r, chart.tbar_slot(k))] for k in range(r)], chart.dims)
    dh = [h.derive(chart.s_slot(i)) for i in range(m)]
    B = block_matrix([[t @ dh[i]] for i in range(m)])
    if isinstance(h, PolyMatrix):
        G = block_matrix([[t @ dh[i].derive(chart.sbar_slot(j)) @ tbar for j in range(m)] for i in range(m)])
    else:
        G = None
    omega = MetricChart(chart, h, B, G, h)
    omega.check_positive(domain if domain is not None else sample_points(chart, 10, seed=11))
    return omega


def potential_two_form(h: PolyMatrix, chart: FiberChart) -> PolyMatrix:
    """Independent oracle: the Levi matrix of ``sum h_kl t_k tbar_l`` over ``z = (s, t)``."""
    m, r = chart.dims
    phi = WirtingerPoly.zero(m, r)
    for k in range(r):
        for l in range(r):
            phi = phi + h[k, l] * WirtingerPoly.variable(m, r, chart.t_slot(k)) \
                * WirtingerPoly.variable(m, r, chart.tbar_slot(l))
    hol = [chart.s_slot(i) for i in range(m)] + [chart.t_slot(k) for k in range(r)]
    anti = chart.sbar_slots + chart.tbar_slots
    return PolyMatrix([[phi.derive(a).derive(b) for b in anti] for a in hol], chart.dims)


def closedness_residuals(omega: MetricChart) -> list[tuple[str, int, int, int, WirtingerPoly]]:
    """Nonzero components of ``d omega`` (empty list means closed), computed symbolically.

    For ``omega = i sum M_ab dz_a ^ dzbar_b`` closedness is
    ``d_c M_ab = d_a M_cb`` and ``dbar_c M_ab = dbar_b M_ac``.
    """
    chart = omega.chart
    M = omega.full_matrix()
    hol = [chart.s_slot(i) for i in range(chart.m)] + [chart.t_slot(k) for k in range(chart.r)]
    anti = chart.sbar_slots + chart.tbar_slots
    N = len(hol)
    out = []
    for a in range(N):
        for b in range(N):
            for c in range(N):
                r1 = M[a, b].derive(hol[c]) - M[c, b].derive(hol[a])
                if not r1.is_zero():
                    out.append(("d", a, b, c, r1))
                r2 = M[a, b].derive(anti[c]) - M[a, c].derive(anti[b])
                if not r2.is_zero():
                    out.append(("dbar", a, b, c, r2))
    return out


# -- projective bundles ----------------------------------------------------------------

@dataclass(frozen=True)
class FSConnection:
    """Fubini-Study data on the affine chart ``x = t_1 / t_2`` of ``P^1``.

    ``chern`` is ``B A^{-1}`` for ``A = omega(d/dx, d/dxbar)`` and
    ``B = omega(d/ds, d/dxbar)`` of ``omega = (i/2) d dbar log f``;
    ``quadratic`` is the pushed-down linear Chern connection.
    """

    chart: FiberChart
    chern: FunctionMatrix
    omega11: FunctionMatrix
    omega12: FunctionMatrix
    quadratic: FunctionMatrix


def projective_fs_connection(h: ChartMatrix) -> FSConnection:
    """Chern connection of the fiberwise Fubini-Study metric for a rank-two ``h(s)``, ``m = 1``.

    ``h`` lives on dims ``(1, 1)`` (the chart ``(s, x)``) and depends on ``s`` only.
    """
    if h.shape != (2, 2) or h.dims != (1, 1):
        raise DimensionError("projective example needs a 2x2 metric on the (s, x) chart")
    chart = FiberChart(1, 1, "P1")
    S, X, XB = 0, 2, 3

    def log_f(pts):
        V = CoordinateJets(pts, 2)
        H = h.jet(pts, 2)
        x, xb = V.t[0], V.tbar[0]
        f = x * xb * H[..., 0, 0] + x * H[..., 0, 1] + xb * H[..., 1, 0] + H[..., 1, 1]
        if np.any(np.abs(f.val) < 1e-300):
            raise MetricDegenerateError("f vanishes at a requested point")
        return f.log()

    def omega_entry(a, b):
        def fn(pts, order):
            L = log_f(pts)
            return Jet((0.5 * L.d2[a, b])[:, None, None])
        return FunctionMatrix((1, 1), chart.dims, fn, 0)

    omega11 = omega_entry(X, XB)
    omega12 = omega_entry(S, XB)

    def chern_fn(pts, order):
        A = omega11(pts)
        cholesky_checked(A, pts)
        return Jet(omega12(pts) / A)

    def quad_fn(pts, order):
        H = h.jet(pts, 1)
        h11, h12, h21, h22 = (H.val[:, i, j] for i, j in ((0, 0), (0, 1), (1, 0), (1, 1)))
        d11, d12, d21, d22 = (H.d1[S][:, i, j] for i, j in ((0, 0), (0, 1), (1, 0), (1, 1)))
        det = h11 * h22 - h12 * h21
        a12 = (h11 * d12 - h12 * d11) / det
        a11_a22 = (h22 * d11 - h11 * d22 + h12 * d21 - h21 * d12) / det
        a21 = (h22 * d21 - h21 * d22) / det
        x = pts.t[:, 0]
        return Jet((-a12 * x**2 + a11_a22 * x + a21)[:, None, None])

    return FSConnection(chart, FunctionMatrix((1, 1), chart.dims, chern_fn, 0), omega11, omega12,
                        FunctionMatrix((1, 1), chart.dims, quad_fn, 0))


def classical_chern(h: ChartMatrix, points: ChartPoints) -> np.ndarray:
    """Row-form coefficients of the classical Chern foliation ``t . (d_s h) h^{-1}``, shape ``(P, m, r)``."""
    H = h.jet(points, 1)
    m = h.m
    t = points.t
    rows = []
    for i in range(m):
        a = H.d1[i] @ np.linalg.inv(H.val)
        rows.append(np.einsum("pk,pkj->pj", t, a))
    return np.stack(rows, axis=1)
