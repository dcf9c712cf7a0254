"""Complex conjugation of Higgs fields with respect to a hermitian metric.

For a field linear in the fiber, ``theta_kj = sum_i Theta^k[i, j] t_i``, the
conjugate has matrices ``-Ad_H(Theta^k*)`` where ``Ad_H(X) = H^{-1} X H`` and
``*`` is the conjugate transpose.  ``H = I`` gives ``-Theta^k*``.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .bundles import HiggsChart, linear_rows, sample_points
from .errors import ConjugationUnavailableError, DimensionError
from .jets import ChartMatrix, FunctionMatrix, Jet, PolyMatrix, as_chart_matrix, block_matrix, left_solve
from .symcore import ChartPoints, cholesky_checked


@dataclass(frozen=True)
class RealFormSpec:
    """``mode="linear-unitary"`` uses ``H``; ``mode="custom"`` applies ``conjugate`` to the Higgs chart."""

    mode: str = "linear-unitary"
    conjugate: Callable[[HiggsChart], HiggsChart] | None = None

    def __post_init__(self):
        if self.mode not in ("linear-unitary", "custom"):
            raise ValueError(f"unknown real form mode {self.mode!r}")
        if self.mode == "custom" and self.conjugate is None:
            raise ValueError("custom real form needs a conjugation map")


def conjugate_matrix(theta, H=None) -> np.ndarray:
    """``-H^{-1} theta^* H`` for numeric (possibly batched) matrices."""
    theta = np.asarray(theta, dtype=complex)
    star = np.conj(np.swapaxes(theta, -1, -2))
    if H is None:
        return -star
    H = np.asarray(H, dtype=complex)
    return -np.linalg.solve(H, star @ H)


def adjoint_action(M: ChartMatrix, H: ChartMatrix) -> ChartMatrix:
    """Evaluable ``H^{-1} M^* H`` (the ``H``-adjoint of ``M``)."""
    star = M.conjugate().transpose()
    if isinstance(H, PolyMatrix) and all(p.is_constant() for row in H.entries for p in row) \
            and isinstance(star, PolyMatrix):
        H0 = np.array([[p.constant_term() for p in row] for row in H.entries])
        cholesky_checked(H0[None])
        Hinv = PolyMatrix.constant(np.linalg.inv(H0), H.dims)
        return Hinv @ star @ H

    def fn(pts, order):
        Hj = H.jet(pts, order)
        cholesky_checked(Hj.val, pts)
        return left_solve(Hj, star.jet(pts, order) @ Hj)

    return FunctionMatrix(M.shape, M.dims, fn, min(M.max_order, H.max_order))


def linear_parts(theta: HiggsChart, points: ChartPoints | None = None, tol: float = 1e-10) -> tuple:
    """Matrices ``Theta^k`` with ``theta_k = t . Theta^k``; raises if ``theta`` is not fiber-linear."""
    if theta.linear is not None:
        return theta.linear
    chart = theta.chart
    m, r = chart.dims
    T = theta.Theta
    fiber = [chart.t_slot(k) for k in range(r)] + chart.tbar_slots
    unavailable = ConjugationUnavailableError("conjugation undefined: supply custom real form")
    if isinstance(T, PolyMatrix):
        mats = []
        for k in range(m):
            M = PolyMatrix([[T[k, j].derive(chart.t_slot(i)) for j in range(r)] for i in range(r)], chart.dims)
            if M.depends_on(fiber):
                raise unavailable
            mats.append(M)
        if linear_rows(chart, mats) != T:
            raise unavailable
        return tuple(mats)
    mats = [block_matrix([[_fiber_coefficient(T, k, i, j) for j in range(r)] for i in range(r)])
            for k in range(m)]
    pts = points if points is not None else sample_points(chart, 8, seed=5)
    recon = linear_rows(chart, mats)(pts)
    actual = T(pts)
    zero_t = pts.with_t(np.zeros_like(pts.t))
    scale = max(1.0, float(np.max(np.abs(actual), initial=0.0)))
    if np.max(np.abs(recon - actual), initial=0.0) > tol * scale or \
            np.max(np.abs(T(zero_t)), initial=0.0) > tol * scale:
        raise unavailable
    return tuple(mats)


def _fiber_coefficient(T: ChartMatrix, k: int, i: int, j: int) -> ChartMatrix:
    """Entry ``Theta^k[i, j]`` of a fiber-linear block: ``T[k, j]`` at ``t = e_i``.

    Evaluating at a unit fiber vector keeps the full jet order; fiber
    derivatives of the coefficient are zero by linearity.
    """
    chart_r = T.dims[1]
    fiber = np.r_[2 * T.dims[0]:2 * T.dims[0] + 2 * chart_r]

    def fn(pts, order):
        e = np.zeros_like(pts.t)
        e[:, i] = 1
        J = T.jet(pts.with_t(e), order)[..., k:k + 1, j:j + 1]
        d1 = None if J.d1 is None else J.d1.copy()
        d2 = None if J.d2 is None else J.d2.copy()
        if d1 is not None:
            d1[fiber] = 0
        if d2 is not None:
            d2[fiber] = 0
            d2[:, fiber] = 0
        return Jet(J.val, d1, d2)

    return FunctionMatrix((1, 1), T.dims, fn, T.max_order)


def conjugate_higgs(theta: HiggsChart, H=None, spec: RealFormSpec | None = None,
                    points: ChartPoints | None = None) -> HiggsChart:
    """Complex conjugate of ``theta``; the polarity flips.

    ``points`` are where fiber-linearity of function-valued fields is checked.
    """
    spec = spec or RealFormSpec()
    if spec.mode == "custom":
        return spec.conjugate(theta)
    chart = theta.chart
    H = as_chart_matrix(np.eye(chart.r) if H is None else H, chart.m, chart.r, (chart.r, chart.r))
    if H.shape != (chart.r, chart.r):
        raise DimensionError("H must be r x r")
    mats = linear_parts(theta, points)
    conj_mats = tuple(adjoint_action(M, H).scale(-1) for M in mats)
    polarity = "antiholomorphic" if theta.polarity == "holomorphic" else "holomorphic"
    return HiggsChart(chart, linear_rows(chart, conj_mats), False, polarity, conj_mats)


def hermitian_adjoint_field(theta: HiggsChart, H) -> HiggsChart:
    """``H``-adjoint field ``t . Ad_H(Theta^k*)``: minus the complex conjugate.

    This is the antiholomorphic term added to the dbar-operator in the Simpson
    mechanism.
    """
    conj = conjugate_higgs(theta, H)
    mats = tuple(M.scale(-1) for M in conj.linear)
    return HiggsChart(theta.chart, linear_rows(theta.chart, mats), False, conj.polarity, mats)


def check_anti_involution(spec: RealFormSpec, theta: HiggsChart, points: ChartPoints,
                          tol: float = 1e-12, H=None) -> float:
    """Residual of ``conj(conj(theta)) = theta`` and of anti-linearity at ``points``."""
    once = conjugate_higgs(theta, H, spec)
    twice = conjugate_higgs(once, H, spec)
    res = float(np.max(np.abs(twice.Theta(points) - theta.Theta(points)), initial=0.0))
    lam = 0.3 - 1.7j
    scaled = HiggsChart(theta.chart, theta.Theta.scale(lam), theta.holomorphic, theta.polarity,
                        None if theta.linear is None else tuple(M.scale(lam) for M in theta.linear))
    lhs = conjugate_higgs(scaled, H, spec).Theta(points)
    rhs = np.conj(lam) * once.Theta(points)
    return max(res, float(np.max(np.abs(lhs - rhs), initial=0.0)))

