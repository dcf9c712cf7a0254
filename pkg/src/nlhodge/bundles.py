"""Chart representations of dbar-operators, almost connections and Higgs fields.

All coefficient blocks are ``m x r`` :class:`~nlhodge.jets.ChartMatrix`
values.  Row ``i`` describes the image of a base direction (``d/ds_i`` or
``d/dsbar_i``) and column ``k`` is the coefficient of ``d/dt_k``.
Predicates are exact when the blocks are :class:`~nlhodge.jets.PolyMatrix`,
and fall back to sampled jets otherwise.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import DimensionError, IntegrabilityUndefinedError, SingularFrameError
from .jets import ChartMatrix, FunctionMatrix, PolyMatrix, as_chart_matrix, block_matrix, left_solve
from .symcore import (
    ChartPoints,
    VectorFieldChart,
    WirtingerPoly,
    lie_bracket,
    nvars,
)


@dataclass(frozen=True)
class FiberChart:
    m: int
    r: int
    label: str = "U"

    def __post_init__(self):
        if self.m < 1 or self.r < 1:
            raise DimensionError(f"chart needs m >= 1 and r >= 1, got ({self.m}, {self.r})")

    @property
    def dims(self) -> tuple[int, int]:
        return (self.m, self.r)

    @property
    def n(self) -> int:
        return nvars(self.m, self.r)

    def s_slot(self, i: int) -> int:
        return i

    def sbar_slot(self, i: int) -> int:
        return self.m + i

    def t_slot(self, k: int) -> int:
        return 2 * self.m + k

    def tbar_slot(self, k: int) -> int:
        return 2 * self.m + self.r + k

    @property
    def tbar_slots(self) -> list[int]:
        return [self.tbar_slot(k) for k in range(self.r)]

    @property
    def sbar_slots(self) -> list[int]:
        return [self.sbar_slot(i) for i in range(self.m)]

    @property
    def barred_slots(self) -> list[int]:
        return self.sbar_slots + self.tbar_slots


def sample_points(chart: FiberChart, count: int = 10, seed: int = 0, radius: float = 1.0,
                  center=None) -> ChartPoints:
    """Deterministic random points in a polydisc, used for witnesses and numeric checks."""
    rng = np.random.default_rng(seed)

    def draw(k):
        z = rng.uniform(-1, 1, size=(count, k)) + 1j * rng.uniform(-1, 1, size=(count, k))
        return radius * z / np.sqrt(2)

    s = draw(chart.m)
    if center is not None:
        s = s + np.asarray(center, dtype=complex)
    return ChartPoints(s, draw(chart.r))


def _block(x, chart: FiberChart, shape) -> ChartMatrix:
    mat = as_chart_matrix(x, chart.m, chart.r, shape)
    if mat.shape != tuple(shape):
        raise DimensionError(f"expected block of shape {tuple(shape)}, got {mat.shape}")
    if mat.dims != chart.dims:
        raise DimensionError(f"block dims {mat.dims} disagree with chart {chart.dims}")
    return mat


@dataclass(frozen=True)
class DBarChart:
    """``dbar_s_i -> dbar_s_i + sum_j U[i, j] d/dt_j`` modulo the antiholomorphic vertical bundle."""

    chart: FiberChart
    U: ChartMatrix

    def __post_init__(self):
        object.__setattr__(self, "U", _block(self.U, self.chart, (self.chart.m, self.chart.r)))

    def lift(self, i: int) -> VectorFieldChart:
        """Zero lift of the image of ``dbar_s_i`` (polynomial data only)."""
        return _lift_field(self.chart, self.chart.sbar_slot(i), self.U, i)


@dataclass(frozen=True)
class ConnectionChart:
    """``d/ds_i -> d/ds_i + sum_j C[i, j] d/dt_j``; ``Cbar`` holds optional ``dbar_t`` components."""

    chart: FiberChart
    C: ChartMatrix
    Cbar: ChartMatrix | None = None

    def __post_init__(self):
        shape = (self.chart.m, self.chart.r)
        object.__setattr__(self, "C", _block(self.C, self.chart, shape))
        if self.Cbar is not None:
            object.__setattr__(self, "Cbar", _block(self.Cbar, self.chart, shape))

    def lift(self, i: int, with_bar: bool = False) -> VectorFieldChart:
        X = _lift_field(self.chart, self.chart.s_slot(i), self.C, i)
        if with_bar and self.Cbar is not None:
            X = X + _vertical_field(self.chart, self.Cbar, i, barred=True)
        return X


@dataclass(frozen=True)
class HiggsChart:
    """``d/ds_i -> sum_k Theta[i, k] d/dt_k``.

    ``holomorphic`` marks a holomorphic Higgs field; almost Higgs fields leave
    it unset.  ``polarity`` is ``"antiholomorphic"`` for conjugates, whose rows
    belong to ``dbar_s_i``.
    """

    chart: FiberChart
    Theta: ChartMatrix
    holomorphic: bool = False
    polarity: str = "holomorphic"
    linear: tuple | None = field(default=None, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "Theta", _block(self.Theta, self.chart, (self.chart.m, self.chart.r)))
        if self.polarity not in ("holomorphic", "antiholomorphic"):
            raise ValueError(f"unknown polarity {self.polarity!r}")
        if self.holomorphic and isinstance(self.Theta, PolyMatrix):
            barred = self.chart.barred_slots
            if self.Theta.depends_on(barred):
                raise ValueError("holomorphic flag set but coefficients contain barred variables")

    @classmethod
    def from_linear(cls, chart: FiberChart, mats: Sequence, holomorphic: bool | None = None,
                    polarity: str = "holomorphic") -> "HiggsChart":
        """Linear field ``theta_kj = sum_i Theta^k[i, j] t_i`` from ``m`` base-only ``r x r`` matrices."""
        if len(mats) != chart.m:
            raise DimensionError(f"need {chart.m} matrices, got {len(mats)}")
        mats = tuple(_block(M, chart, (chart.r, chart.r)) for M in mats)
        Theta = linear_rows(chart, mats)
        if holomorphic is None:
            holomorphic = isinstance(Theta, PolyMatrix) and not Theta.depends_on(chart.barred_slots)
        return cls(chart, Theta, holomorphic, polarity, mats)

    def field(self, i: int) -> VectorFieldChart:
        return _vertical_field(self.chart, self.Theta, i)


def t_row(chart: FiberChart) -> PolyMatrix:
    m, r = chart.dims
    return PolyMatrix([[WirtingerPoly.variable(m, r, chart.t_slot(k)) for k in range(r)]], chart.dims)


def linear_rows(chart: FiberChart, mats: Sequence[ChartMatrix]) -> ChartMatrix:
    """Stack the rows ``t . M_k`` into an ``m x r`` block."""
    t = t_row(chart)
    return block_matrix([[t @ M] for M in mats])


def _require_poly(block: ChartMatrix, what: str) -> PolyMatrix:
    if not isinstance(block, PolyMatrix):
        raise TypeError(f"{what} needs polynomial coefficients")
    return block


def _vertical_field(chart: FiberChart, block: ChartMatrix, i: int, barred: bool = False) -> VectorFieldChart:
    block = _require_poly(block, "symbolic vector field")
    slot = chart.tbar_slot if barred else chart.t_slot
    return VectorFieldChart.from_dict(chart.m, chart.r, {slot(k): block[i, k] for k in range(chart.r)})


def _lift_field(chart: FiberChart, pivot: int, block: ChartMatrix, i: int) -> VectorFieldChart:
    return VectorFieldChart.basis(chart.m, chart.r, pivot) + _vertical_field(chart, block, i)


def canonical_dbar(chart: FiberChart) -> DBarChart:
    return DBarChart(chart, PolyMatrix.zeros((chart.m, chart.r), chart.dims))


def zero_connection(chart: FiberChart) -> ConnectionChart:
    return ConnectionChart(chart, PolyMatrix.zeros((chart.m, chart.r), chart.dims))


# -- almost complex structures -----------------------------------------------------

@dataclass(frozen=True)
class AlmostComplexStructure:
    """``Tbar`` spanned by ``dbar_t_j`` and the lifts ``dbar_s_i + sum_j u_ij d/dt_j``.

    Every generator carries a unit coefficient on its own barred slot (its
    pivot) and otherwise only ``d/dt`` components, so span membership reduces
    to subtracting pivot multiples.
    """

    chart: FiberChart
    generators: tuple[VectorFieldChart, ...]
    pivots: tuple[int, ...]

    def reduce(self, X: VectorFieldChart) -> VectorFieldChart:
        """Remainder of ``X`` after removing its component in the span."""
        R = X
        for gen, p in zip(self.generators, self.pivots):
            coeff = R.coeffs[p]
            if not coeff.is_zero():
                R = R - gen.scale(coeff)
        return R

    def rank(self, points: ChartPoints) -> np.ndarray:
        """Rank of ``Tbar + conj(Tbar)`` at each point."""
        gens = list(self.generators) + [g.conjugate() for g in self.generators]
        mats = np.stack([g.eval(points) for g in gens], axis=-2)
        return np.linalg.matrix_rank(mats)


def dbar_to_acs(d: DBarChart) -> AlmostComplexStructure:
    chart = d.chart
    gens, pivots = [], []
    for k in range(chart.r):
        gens.append(VectorFieldChart.basis(chart.m, chart.r, chart.tbar_slot(k)))
        pivots.append(chart.tbar_slot(k))
    for i in range(chart.m):
        gens.append(d.lift(i))
        pivots.append(chart.sbar_slot(i))
    return AlmostComplexStructure(chart, tuple(gens), tuple(pivots))


@dataclass
class Verdict:
    """Boolean outcome plus an optional witness (generator pair, point, residual)."""

    ok: bool
    witness: dict | None = None

    def __bool__(self) -> bool:
        return self.ok


def _witness_point(chart: FiberChart, field: VectorFieldChart, seed: int = 0) -> dict:
    pts = sample_points(chart, 16, seed)
    vals = field.eval(pts)
    idx = int(np.argmax(np.max(np.abs(vals), axis=-1)))
    return {"s": pts.s[idx].tolist(), "t": pts.t[idx].tolist(), "value": vals[idx].tolist()}


def is_integrable_acs(a: AlmostComplexStructure) -> Verdict:
    gens = a.generators
    for p in range(len(gens)):
        for q in range(p + 1, len(gens)):
            R = a.reduce(lie_bracket(gens[p], gens[q]))
            if not R.is_zero():
                w = {"pair": (p, q), "residual": R}
                w.update(_witness_point(a.chart, R))
                return Verdict(False, w)
    return Verdict(True)


def is_higgs_integrable(theta: HiggsChart) -> Verdict:
    if not theta.holomorphic:
        raise IntegrabilityUndefinedError("integrability undefined for almost Higgs fields")
    chart = theta.chart
    fields = [theta.field(i) for i in range(chart.m)]
    for i in range(chart.m):
        for j in range(i + 1, chart.m):
            br = lie_bracket(fields[i], fields[j])
            if not br.is_zero():
                w = {"pair": (i, j), "residual": br}
                w.update(_witness_point(chart, br))
                return Verdict(False, w)
    return Verdict(True)


def is_holomorphic_vertical(obj: ConnectionChart | DBarChart, points: ChartPoints | None = None,
                            tol: float = 1e-12) -> bool:
    """No coefficient depends on ``tbar`` (exact for polynomial blocks, sampled otherwise)."""
    chart = obj.chart
    block = obj.C if isinstance(obj, ConnectionChart) else obj.U
    if isinstance(block, PolyMatrix):
        return not block.depends_on(chart.tbar_slots)
    pts = points if points is not None else sample_points(chart, 10, seed=7)
    return not block.depends_on_numeric(chart.tbar_slots, pts, tol)


def apply_coordinate_change(c: ConnectionChart, S, T, points: ChartPoints | None = None) -> ConnectionChart:
    """Frame transformation ``C' = S^{-1} C T`` at fixed points.

    ``S`` is ``m x m`` and ``T`` is ``r x r``, both holomorphic.  Constant
    polynomial ``S`` keeps polynomial data exact.
    """
    chart = c.chart
    S = _block(S, chart, (chart.m, chart.m))
    T = _block(T, chart, (chart.r, chart.r))
    for name, M in (("S", S), ("T", T)):
        if isinstance(M, PolyMatrix) and M.depends_on(chart.barred_slots):
            raise ValueError(f"{name} must be holomorphic")
    if points is not None:
        for name, M in (("S", S), ("T", T)):
            _check_invertible(M, points, name)
    if isinstance(S, PolyMatrix) and all(p.is_constant() for row in S.entries for p in row) \
            and isinstance(c.C, PolyMatrix) and isinstance(T, PolyMatrix):
        S0 = np.array([[p.constant_term() for p in row] for row in S.entries])
        if abs(np.linalg.det(S0)) < 1e-14:
            raise SingularFrameError("singular S")
        Sinv = PolyMatrix.constant(np.linalg.inv(S0), chart.dims)
        return ConnectionChart(chart, Sinv @ c.C @ T)
    C = c.C

    def fn(pts, order):
        Sj = S.jet(pts, order)
        dets = np.abs(np.linalg.det(Sj.val))
        if np.any(dets < 1e-14):
            raise SingularFrameError(f"singular S at batch index {int(np.argmin(dets))}")
        return left_solve(Sj, C.jet(pts, order) @ T.jet(pts, order))

    return ConnectionChart(chart, FunctionMatrix((chart.m, chart.r), chart.dims, fn,
                                                 min(S.max_order, T.max_order, C.max_order)))


def _check_invertible(M: ChartMatrix, points: ChartPoints, name: str):
    vals = M(points)
    dets = np.abs(np.linalg.det(vals))
    bad = np.flatnonzero(dets < 1e-14)
    if bad.size:
        k = int(bad[0])
        raise SingularFrameError(f"singular {name} at s={points.s[k].tolist()}, t={points.t[k].tolist()}")


def pullback_higgs(theta: HiggsChart, phi: Sequence[WirtingerPoly]) -> HiggsChart:
    """``Theta'(s, t) = J_phi(s, t) Theta(s, phi(s, t))`` for a holomorphic fiberwise map ``phi``."""
    chart = theta.chart
    m, r = chart.dims
    if len(phi) != r:
        raise DimensionError(f"phi needs {r} components")
    for p in phi:
        if p.dims != chart.dims or not p.is_holomorphic():
            raise ValueError("phi must be holomorphic with the chart's dims")
    Theta = _require_poly(theta.Theta, "pullback")
    images = [WirtingerPoly.variable(m, r, k) for k in range(2 * m)]
    images += list(phi) + [p.conjugate() for p in phi]
    composed = Theta.map(lambda q: q.compose(images))
    # J[k, l] = d phi_k / d t_l ; rows of Theta are row vectors, so right-multiply by J^T
    JT = PolyMatrix([[phi[k].derive(chart.t_slot(l)) for k in range(r)] for l in range(r)], chart.dims)
    return HiggsChart(chart, composed @ JT, theta.holomorphic, theta.polarity)


def is_flat_connection(c: ConnectionChart) -> Verdict:
    """Exact bracket closure of the lifted foliation ``{d/ds_i + C_i d/dt}``."""
    chart = c.chart
    lifts = [c.lift(i, with_bar=True) for i in range(chart.m)]
    for i in range(chart.m):
        for j in range(i + 1, chart.m):
            br = lie_bracket(lifts[i], lifts[j])
            if not br.is_zero():
                w = {"pair": (i, j), "residual": br}
                w.update(_witness_point(chart, br))
                return Verdict(False, w)
    return Verdict(True)
