"""Simpson mechanism: Higgs data to flat data and back.

Forward::

    dbar_omega = beta^{-1} (dbar_g + thetabar_omega)
    nabla_omega = chern(dbar_omega, omega) + 2 beta^{-1} theta

Backward::

    theta_omega = 1/2 beta (nabla - chern(dbar_f, omega))
    dbar_omega  = beta dbar_f - thetabar_omega

``thetabar_omega`` is minus the complex conjugate of ``theta``, i.e. the
``H``-adjoint field in the linear case.  A vertical-linear ``beta`` with
matrix ``M`` acts on row vectors of ``d/dt`` coefficients by ``v -> v M``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .bundles import ConnectionChart, DBarChart, HiggsChart, canonical_dbar, sample_points
from .chern import MetricChart, chern_connection
from .conjugation import RealFormSpec, conjugate_higgs
from .errors import BetaPreservationError, ConjugationUnavailableError
from .jets import ChartMatrix, PolyMatrix, constant_value, right_solve_general_matrix
from .symcore import ChartPoints

HIGGS_COUPLING = 2


@dataclass(frozen=True)
class BetaMap:
    mode: str = "identity"
    M: ChartMatrix | None = None

    def __post_init__(self):
        if self.mode not in ("identity", "vertical-linear"):
            raise ValueError(f"unknown beta mode {self.mode!r}")
        if self.mode == "vertical-linear" and self.M is None:
            raise ValueError("vertical-linear beta needs a matrix")

    @property
    def is_identity(self) -> bool:
        return self.mode == "identity"

    def apply(self, block: ChartMatrix) -> ChartMatrix:
        """``beta``: rows ``v -> v M``."""
        return block if self.is_identity else block @ self.M

    def apply_inverse(self, block: ChartMatrix) -> ChartMatrix:
        """``beta^{-1}``: rows ``v -> v M^{-1}``."""
        if self.is_identity:
            return block
        M0 = constant_value(self.M)
        if M0 is not None and isinstance(block, PolyMatrix):
            return block @ PolyMatrix.constant(np.linalg.inv(M0), block.dims)
        return right_solve_general_matrix(block, self.M)

    def check(self, omega: MetricChart, points: ChartPoints | None = None, tol: float = 1e-9) -> None:
        """Invertibility, ``omega``-preservation ``M A M^* = A`` and vertical holomorphy of ``M``."""
        if self.is_identity:
            return
        chart = omega.chart
        pts = points if points is not None else sample_points(chart, 10, seed=13)
        M = self.M(pts)
        if np.any(np.abs(np.linalg.det(M)) < 1e-14):
            raise BetaPreservationError("beta is singular at a sample point")
        A = omega.A(pts)
        res = M @ A @ np.conj(np.swapaxes(M, -1, -2)) - A
        worst = int(np.argmax(np.max(np.abs(res), axis=(-1, -2))))
        if np.max(np.abs(res[worst])) > tol * max(1.0, np.max(np.abs(A[worst]))):
            raise BetaPreservationError(
                f"beta does not preserve omega at s={pts.s[worst].tolist()}, t={pts.t[worst].tolist()}")
        if isinstance(self.M, PolyMatrix):
            bad = self.M.depends_on(chart.tbar_slots)
        else:
            bad = self.M.depends_on_numeric(chart.tbar_slots, pts)
        if bad:
            raise BetaPreservationError("beta does not preserve vertical holomorphy (depends on tbar)")


def _metric_H(omega: MetricChart) -> ChartMatrix:
    if omega.h is not None:
        return omega.h
    chart = omega.chart
    fiber = [chart.t_slot(k) for k in range(chart.r)] + chart.tbar_slots
    A = omega.A
    depends = A.depends_on(fiber) if isinstance(A, PolyMatrix) else \
        A.depends_on_numeric(fiber, sample_points(chart, 6, seed=17))
    if depends:
        raise ConjugationUnavailableError("conjugation undefined: supply custom real form")
    return A


def dbar_correction(theta: HiggsChart, omega: MetricChart, spec: RealFormSpec | None = None,
                    points: ChartPoints | None = None) -> ChartMatrix:
    """``thetabar_omega`` as an ``m x r`` block: minus the complex conjugate of ``theta``.

    ``points`` (inside the domain of the data) are used to certify fiber-linearity
    of function-valued fields.
    """
    spec = spec or RealFormSpec()
    H = None if spec.mode == "custom" else _metric_H(omega)
    return conjugate_higgs(theta, H, spec, points).Theta.scale(-1)


def higgs_to_flat(theta: HiggsChart, omega: MetricChart, beta: BetaMap | None = None,
                  spec: RealFormSpec | None = None, dbar_g: DBarChart | None = None,
                  points: ChartPoints | None = None) -> tuple[DBarChart, ConnectionChart]:
    beta = beta or BetaMap()
    chart = omega.chart
    dbar_g = dbar_g or canonical_dbar(chart)
    beta.check(omega, points)
    U = beta.apply_inverse(dbar_g.U + dbar_correction(theta, omega, spec, points))
    dbar_omega = DBarChart(chart, U)
    chern = chern_connection(omega, dbar_omega)
    C = chern.C + beta.apply_inverse(theta.Theta).scale(HIGGS_COUPLING)
    return dbar_omega, ConnectionChart(chart, C, chern.Cbar)


def flat_to_higgs(nabla: ConnectionChart, dbar_f: DBarChart, omega: MetricChart,
                  beta: BetaMap | None = None, spec: RealFormSpec | None = None,
                  points: ChartPoints | None = None) -> tuple[HiggsChart, DBarChart]:
    beta = beta or BetaMap()
    chart = omega.chart
    beta.check(omega, points)
    chern = chern_connection(omega, dbar_f)
    Theta = beta.apply(nabla.C - chern.C).scale(1.0 / HIGGS_COUPLING)
    theta_omega = HiggsChart(chart, Theta, holomorphic=False)
    U = beta.apply(dbar_f.U) - dbar_correction(theta_omega, omega, spec, points)
    return theta_omega, DBarChart(chart, U)
