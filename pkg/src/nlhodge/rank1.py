"""Rank-two weight-one variations of Hodge structure from a period map ``tau(s)``.

The flat bundle ``V = C^2`` carries the Hodge line ``F^1`` spanned by
``(tau(s), 1)``.  Differentiating this section in the flat frame and
projecting modulo ``F^1`` leaves ``tau'(s)`` times the class of ``e_1``, so
the Kodaira-Spencer field on ``E = E^{1,0} + E^{0,1}`` is the nilpotent
matrix ``[[0, tau'], [0, 0]]`` in the graded frame (``t_1`` along ``E^{1,0}``,
``t_2`` along ``E^{0,1}``).

The metric is ``diag(1 / (2 Im tau), hodge_factor * 2 Im tau)``: the
polarization norms of the graded pieces in the fiber-coordinate (dual)
picture, with ``hodge_factor = 2`` absorbing the Higgs coupling constant 2 of
the Simpson mechanism.  Other factors leave a nonzero (1,1) curvature.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .bundles import FiberChart, HiggsChart
from .chern import MetricChart, metric_from_linear_hermitian
from .curvature import CurvatureReport, Grid, assemble_F
from .errors import PeriodDomainError
from .jets import JetMatrixFunction, PolyMatrix
from .symcore import ChartPoints, WirtingerPoly

HODGE_FACTOR = 2.0
CHART = FiberChart(1, 2, "VHS")


def _embed(tau: WirtingerPoly) -> WirtingerPoly:
    """Re-embed a polynomial in ``s`` alone into the ``(1, 2)`` chart."""
    n = tau.nvars
    terms = {}
    for exp, c in tau.items():
        if any(exp[k] for k in range(1, n)):
            raise ValueError("period map must be a holomorphic polynomial in s")
        terms[(exp[0], 0, 0, 0, 0, 0)] = c
    return WirtingerPoly(1, 2, terms)


@dataclass(frozen=True)
class PeriodScenario:
    tau: WirtingerPoly
    center: complex = 2j
    radius: float = 0.5
    delta: float = 1e-6

    def __post_init__(self):
        object.__setattr__(self, "tau", _embed(self.tau))

    @classmethod
    def from_coefficients(cls, coeffs, **kw) -> "PeriodScenario":
        """``tau(s) = sum_k coeffs[k] s^k``."""
        tau = WirtingerPoly(1, 0, {(k, 0): c for k, c in enumerate(coeffs)})
        return cls(tau, **kw)

    def grid(self, n: int = 5, n_fiber: int = 3, fiber_radius: float = 1.0) -> Grid:
        return Grid.polydisc(1, 2, self.center, self.radius, n, n_fiber, fiber_radius)

    def check_domain(self, points: ChartPoints) -> None:
        im = np.imag(np.asarray(self.tau.eval(points)))
        bad = np.flatnonzero(im <= self.delta)
        if bad.size:
            k = int(bad[0])
            raise PeriodDomainError(f"Im tau <= {self.delta} at s={points.s[k].tolist()}")


def hodge_metric(tau: WirtingerPoly, hodge_factor: float = HODGE_FACTOR) -> JetMatrixFunction:
    tau_bar = tau.conjugate()

    def fn(V):
        x = tau.jet(V.points, V.order)
        xb = tau_bar.jet(V.points, V.order)
        y = (x - xb) * (1 / 2j)
        return [[(y * 2).reciprocal(), 0], [0, y * (2 * hodge_factor)]]

    return JetMatrixFunction((2, 2), CHART.dims, fn, "hodge")


def ks_system(p: PeriodScenario, hodge_factor: float = HODGE_FACTOR, points: ChartPoints | None = None
              ) -> tuple[HiggsChart, JetMatrixFunction]:
    pts = points if points is not None else p.grid().points
    p.check_domain(pts)
    dtau = p.tau.derive("s1")
    zero = WirtingerPoly.zero(*CHART.dims)
    Theta = PolyMatrix([[zero, dtau], [zero, zero]], CHART.dims)
    return HiggsChart.from_linear(CHART, [Theta]), hodge_metric(p.tau, hodge_factor)


def is_isotrivial(p: PeriodScenario) -> bool:
    return p.tau.derive("s1").is_zero()


def ks_metric(p: PeriodScenario, hodge_factor: float = HODGE_FACTOR, H=None,
              grid: Grid | None = None) -> tuple[HiggsChart, MetricChart]:
    grid = grid or p.grid()
    theta, Hh = ks_system(p, hodge_factor, grid.points)
    omega = metric_from_linear_hermitian(Hh if H is None else H, CHART, grid.points)
    return theta, omega


def rank1_harmonicity(p: PeriodScenario, grid: Grid | None = None, tol: float = 1e-8,
                      hodge_factor: float = HODGE_FACTOR, H=None) -> CurvatureReport:
    """Curvature report of the Kodaira-Spencer system; ``H`` overrides the Hodge metric."""
    grid = grid or p.grid()
    theta, omega = ks_metric(p, hodge_factor, H, grid)
    return assemble_F(theta, omega, grid=grid, tol=tol)


def lattice_translation_residual(p: PeriodScenario, points: ChartPoints | None = None) -> float:
    """Max change of the fiber metric block and Higgs coefficients under ``t_2 -> t_2 + lambda``.

    ``lambda`` runs over the period sections ``1`` and ``tau(s)``.
    """
    pts = points if points is not None else p.grid(3, 2).points
    theta, omega = ks_metric(p, grid=Grid.from_points(pts))
    worst = 0.0
    base_A, base_T = omega.A(pts), theta.Theta(pts)
    for lam in (np.ones(len(pts)), np.asarray(p.tau.eval(pts))):
        moved = ChartPoints(pts.s, pts.t + np.stack([np.zeros(len(pts)), lam], axis=1))
        worst = max(worst, float(np.max(np.abs(omega.A(moved) - base_A))),
                    float(np.max(np.abs(theta.Theta(moved) - base_T))))
    return worst
