"""Curvature tensors of types (0,2), (1,1), (2,0) and the harmonic-metric verdict.

With lifts ``X_i = d/ds_i + c_i . d/dt + b_i . dbar_t`` and
``Y_j = dbar_s_j + u_j . d/dt`` the tensors are the ``d/dt`` components of

    F02[i, j] = [Y_i, Y_j]      F11[i, j] = [X_i, Y_j]      F20[i, j] = [X_i, X_j]

evaluated from first-order jets.  The G-side uses ``theta_i . d/dt`` in place
of ``X_i`` and applies ``beta^{-1}`` to the (2,0) part.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from .bundles import (
    ConnectionChart,
    DBarChart,
    FiberChart,
    HiggsChart,
    canonical_dbar,
    is_holomorphic_vertical,
)
from .chern import MetricChart, chern_connection
from .conjugation import RealFormSpec
from .errors import LiftingConditionError, NLHodgeError
from .simpson import BetaMap, dbar_correction, flat_to_higgs, higgs_to_flat
from .symcore import ChartPoints

TENSOR_TYPES = ("0,2", "1,1", "2,0")


@dataclass(frozen=True)
class Grid:
    """Sample points with the index of their base point.

    ``polydisc`` builds an ``n x n`` lattice per complex base coordinate on the
    square inscribed in each disc, times ``n_fiber`` samples per fiber coordinate.
    """

    points: ChartPoints
    base_index: np.ndarray
    base_points: np.ndarray

    @classmethod
    def polydisc(cls, m: int, r: int, center=0.0, radius: float = 1.0, n: int = 5,
                 n_fiber: int = 3, fiber_radius: float = 1.0) -> "Grid":
        center = np.broadcast_to(np.asarray(center, dtype=complex), (m,))
        half = radius / np.sqrt(2)
        axis = np.linspace(-half, half, n) if n > 1 else np.zeros(1)
        disc = (axis[:, None] + 1j * axis[None, :]).ravel()
        base = np.array(list(itertools.product(*[c + disc for c in center])), dtype=complex).reshape(-1, m)
        k = np.arange(n_fiber)
        fib1 = fiber_radius * (k + 1) / n_fiber * np.exp(1j * (2 * np.pi * k / max(n_fiber, 1) + 0.3))
        fib = np.array(list(itertools.product(fib1, repeat=r)), dtype=complex).reshape(-1, r)
        s = np.repeat(base, len(fib), axis=0)
        t = np.tile(fib, (len(base), 1))
        idx = np.repeat(np.arange(len(base)), len(fib))
        return cls(ChartPoints(s, t), idx, base)

    @classmethod
    def from_points(cls, points: ChartPoints) -> "Grid":
        base, idx = np.unique(np.round(points.s, 14), axis=0, return_inverse=True)
        return cls(points, np.asarray(idx).ravel(), base)

    def __len__(self) -> int:
        return len(self.points)


@dataclass
class TensorEntry:
    sup: float
    worst_point: dict
    worst_component: tuple
    components: dict
    per_base: np.ndarray = field(repr=False)

    def to_dict(self) -> dict:
        return {
            "sup_norm": self.sup,
            "worst_point": self.worst_point,
            "worst_component": list(self.worst_component),
            "components": {",".join(map(str, k)): v for k, v in self.components.items()},
            "per_base_point_sup": self.per_base.tolist(),
        }


@dataclass
class CurvatureReport:
    side: str
    entries: dict
    tolerance: float

    @property
    def verdict(self) -> bool:
        return all(e.sup < self.tolerance for e in self.entries.values())

    @property
    def harmonic_at_tolerance(self) -> bool:
        return self.verdict

    def sup_norms(self) -> dict:
        return {k: e.sup for k, e in self.entries.items()}

    def witness(self) -> tuple[str, TensorEntry] | None:
        """The tensor type with the largest sup-norm when the verdict fails."""
        if self.verdict:
            return None
        key = max(self.entries, key=lambda k: self.entries[k].sup)
        return key, self.entries[key]

    def to_dict(self) -> dict:
        return {
            "side": self.side,
            "tolerance": self.tolerance,
            "verdict": self.verdict,
            "tensors": {f"{self.side}{k}": e.to_dict() for k, e in self.entries.items()},
        }


def _summarize(values: np.ndarray, grid: Grid, antisymmetric: bool) -> TensorEntry:
    """``values`` has shape ``(P, m, m, r)``; norms are over the vertical vector ``k``."""
    P, m, _, _ = values.shape
    norms = np.linalg.norm(values, axis=-1)
    pairs = [(i, j) for i in range(m) for j in range(m) if (i < j or not antisymmetric)]
    if not pairs:
        return TensorEntry(0.0, {}, (), {}, np.zeros(len(grid.base_points)))
    sel = np.stack([norms[:, i, j] for i, j in pairs], axis=1)
    per_point = sel.max(axis=1)
    worst = int(np.argmax(per_point))
    pair = pairs[int(np.argmax(sel[worst]))]
    k = int(np.argmax(np.abs(values[worst, pair[0], pair[1]])))
    comps = {}
    for i, j in pairs:
        for kk in range(values.shape[-1]):
            comps[(i, j, kk)] = float(np.max(np.abs(values[:, i, j, kk])))
    per_base = np.zeros(len(grid.base_points))
    np.maximum.at(per_base, grid.base_index, per_point)
    pts = grid.points
    wp = {"s": _c(pts.s[worst]), "t": _c(pts.t[worst]),
          "value": _c(values[worst, pair[0], pair[1]])}
    return TensorEntry(float(per_point[worst]), wp, pair + (k,), comps, per_base)


def _c(arr) -> list:
    return [[float(z.real), float(z.imag)] for z in np.asarray(arr).ravel()]


def _slices(chart: FiberChart):
    m, r = chart.dims
    return slice(0, m), slice(m, 2 * m), slice(2 * m, 2 * m + r), slice(2 * m + r, 2 * m + 2 * r)


def _pijk(D: np.ndarray) -> np.ndarray:
    """Derivative block ``(a, P, j, k)`` to ``(P, a, j, k)``."""
    return np.moveaxis(D, 0, 1)


def _apply(row_field: np.ndarray, D: np.ndarray) -> np.ndarray:
    """``sum_l row[p, i, l] * D[l, p, j, k]`` -> ``(P, i, j, k)``."""
    return np.einsum("pil,lpjk->pijk", row_field, D)


def curvature_F02(d: DBarChart, grid: Grid) -> np.ndarray:
    """``[Y_i, Y_j]`` vertical components, shape ``(P, m, m, r)``."""
    if not is_holomorphic_vertical(d, grid.points[: min(len(grid), 16)]):
        raise LiftingConditionError("lifting condition violated: U depends on tbar")
    S, SB, T, TB = _slices(d.chart)
    J = d.U.jet(grid.points, 1)
    term = _pijk(J.d1[SB]) + _apply(J.val, J.d1[T])
    return term - np.swapaxes(term, 1, 2)


def curvature_F11(c: ConnectionChart, grid: Grid, d: DBarChart | None = None) -> np.ndarray:
    """``[X_i, Y_j]`` vertical components; with the canonical ``d`` this is ``-dc_ik/dsbar_j``."""
    if not is_holomorphic_vertical(c, grid.points[: min(len(grid), 16)]):
        raise LiftingConditionError("vertical-holomorphy violated: C depends on tbar")
    chart = c.chart
    d = d or canonical_dbar(chart)
    S, SB, T, TB = _slices(chart)
    Cj = c.C.jet(grid.points, 1)
    Uj = d.U.jet(grid.points, 1)
    x_u = _pijk(Uj.d1[S]) + _apply(Cj.val, Uj.d1[T])
    if c.Cbar is not None:
        x_u = x_u + _apply(c.Cbar(grid.points), Uj.d1[TB])
    # Y_j(c_ik) indexed [p, j, i, k], transposed to [p, i, j, k]
    y_c = _pijk(Cj.d1[SB]) + _apply(Uj.val, Cj.d1[T])
    return x_u - np.swapaxes(y_c, 1, 2)


def curvature_F20(c: ConnectionChart, grid: Grid) -> np.ndarray:
    """``[X_i, X_j]`` vertical components."""
    S, SB, T, TB = _slices(c.chart)
    Cj = c.C.jet(grid.points, 1)
    term = _pijk(Cj.d1[S]) + _apply(Cj.val, Cj.d1[T])
    if c.Cbar is not None:
        term = term + _apply(c.Cbar(grid.points), Cj.d1[TB])
    return term - np.swapaxes(term, 1, 2)


def curvature_G11(theta: HiggsChart, d: DBarChart, grid: Grid) -> np.ndarray:
    """``[theta_i, Y_j]`` vertical components (holomorphy of ``theta``)."""
    S, SB, T, TB = _slices(theta.chart)
    Th = theta.Theta.jet(grid.points, 1)
    Uj = d.U.jet(grid.points, 1)
    th_u = _apply(Th.val, Uj.d1[T])
    y_th = _pijk(Th.d1[SB]) + _apply(Uj.val, Th.d1[T])
    return th_u - np.swapaxes(y_th, 1, 2)


def curvature_G20(theta: HiggsChart, grid: Grid, beta: BetaMap | None = None) -> np.ndarray:
    """``beta^{-1} [theta_i, theta_j]`` vertical components."""
    S, SB, T, TB = _slices(theta.chart)
    Th = theta.Theta.jet(grid.points, 1)
    term = _apply(Th.val, Th.d1[T])
    br = term - np.swapaxes(term, 1, 2)
    if beta is not None and not beta.is_identity:
        M = beta.M(grid.points)
        # rows v -> v M^{-1}: solve X M = v via M^T X^T = v^T
        P, m, _, r = br.shape
        flat = br.reshape(P, m * m, r)
        sol = np.linalg.solve(np.swapaxes(M, -1, -2), np.swapaxes(flat, -1, -2))
        br = np.swapaxes(sol, -1, -2).reshape(P, m, m, r)
    return br


def report(side: str, tensors: dict, grid: Grid, tol: float) -> CurvatureReport:
    entries = {k: _summarize(v, grid, antisymmetric=(k != "1,1")) for k, v in tensors.items()}
    return CurvatureReport(side, entries, tol)


def assemble_F(theta: HiggsChart, omega: MetricChart, beta: BetaMap | None = None, grid: Grid | None = None,
               tol: float = 1e-9, spec: RealFormSpec | None = None,
               dbar_g: DBarChart | None = None) -> CurvatureReport:
    chart = omega.chart
    grid = grid or Grid.polydisc(chart.m, chart.r)
    d, c = higgs_to_flat(theta, omega, beta, spec, dbar_g, grid.points[: min(len(grid), 16)])
    tensors = {"0,2": curvature_F02(d, grid), "1,1": curvature_F11(c, grid, d), "2,0": curvature_F20(c, grid)}
    return report("F", tensors, grid, tol)


def assemble_G(nabla: ConnectionChart, dbar: DBarChart, omega: MetricChart, beta: BetaMap | None = None,
               grid: Grid | None = None, tol: float = 1e-9, spec: RealFormSpec | None = None) -> CurvatureReport:
    chart = omega.chart
    grid = grid or Grid.polydisc(chart.m, chart.r)
    theta_w, d_w = flat_to_higgs(nabla, dbar, omega, beta, spec, grid.points[: min(len(grid), 16)])
    tensors = {"0,2": curvature_F02(d_w, grid), "1,1": curvature_G11(theta_w, d_w, grid),
               "2,0": curvature_G20(theta_w, grid, beta)}
    return report("G", tensors, grid, tol)


@dataclass
class HarmonicScenario:
    """Higgs-side data (``theta``) or flat-side data (``nabla`` with ``dbar``), plus ``omega`` and ``beta``."""

    omega: MetricChart
    theta: HiggsChart | None = None
    nabla: ConnectionChart | None = None
    dbar: DBarChart | None = None
    beta: BetaMap | None = None
    spec: RealFormSpec | None = None
    grid: Grid | None = None


@dataclass
class HarmonicVerdict:
    harmonic: bool
    report: CurvatureReport | None
    allowability: dict

    def __bool__(self) -> bool:
        return self.harmonic


def is_harmonic(scenario: HarmonicScenario, tol: float = 1e-9) -> HarmonicVerdict:
    omega = scenario.omega
    chart = omega.chart
    grid = scenario.grid or Grid.polydisc(chart.m, chart.r)
    sample = grid.points[: min(len(grid), 16)]
    beta = scenario.beta or BetaMap()
    allow = {}
    try:
        beta.check(omega, sample)
        allow["beta_preserves_omega"] = {"ok": True}
    except NLHodgeError as exc:
        allow["beta_preserves_omega"] = {"ok": False, "reason": str(exc)}
    base_dbar = scenario.dbar or canonical_dbar(chart)
    chern = chern_connection(omega, base_dbar)
    ok = is_holomorphic_vertical(chern, sample)
    allow["chern_vertical_holomorphic"] = {"ok": ok} if ok else \
        {"ok": False, "reason": "Chern connection depends on tbar"}
    if scenario.theta is not None:
        try:
            dbar_correction(scenario.theta, omega, scenario.spec, sample)
            allow["conjugation_available"] = {"ok": True}
        except NLHodgeError as exc:
            allow["conjugation_available"] = {"ok": False, "reason": str(exc)}
    if not all(v["ok"] for v in allow.values()):
        return HarmonicVerdict(False, None, allow)
    if scenario.theta is not None:
        rep = assemble_F(scenario.theta, omega, beta, grid, tol, scenario.spec, scenario.dbar)
    else:
        rep = assemble_G(scenario.nabla, base_dbar, omega, beta, grid, tol, scenario.spec)
    return HarmonicVerdict(rep.verdict, rep, allow)
