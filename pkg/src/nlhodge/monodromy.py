"""Rational-ODE foliations, analytic continuation along paths and polynomial automorphisms.

An order-``n`` ODE ``y^(n) = F(s, y, ..., y^(n-1))`` becomes the flat
connection ``d/ds -> d/ds + t_2 d/dt_1 + ... + t_n d/dt_{n-1} + F d/dt_n`` on
the chart with fiber coordinates ``t_1 = y, ..., t_n = y^(n-1)``.
Continuation integrates ``dt/du = C(s(u), t) s'(u)`` segment by segment with
scipy's Dormand-Prince pair.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.integrate import solve_ivp

from .bundles import ConnectionChart, FiberChart
from .errors import ContinuationEscaped, DimensionError, PoleProximityError, WordCountExceeded
from .jets import FunctionMatrix, Jet, PolyMatrix
from .symcore import ChartPoints, WirtingerPoly

ESCAPE_RADIUS = 1e8


# -- ODEs and foliations -------------------------------------------------------------------

@dataclass(frozen=True)
class RationalODE:
    """``F = numerator / denominator`` with both polynomials on the ``(1, n)`` chart."""

    n: int
    numerator: WirtingerPoly
    denominator: WirtingerPoly | None = None
    label: str = ""

    def __post_init__(self):
        if self.n < 1:
            raise DimensionError("ODE order must be >= 1")
        den = WirtingerPoly.constant(1, self.n, 1) if self.denominator is None else self.denominator
        object.__setattr__(self, "denominator", den)
        for p in (self.numerator, den):
            if p.dims != (1, self.n):
                raise DimensionError(f"ODE polynomials must live on dims (1, {self.n})")
            if not p.is_holomorphic():
                raise ValueError("ODE right-hand side must be holomorphic")
        if den.is_zero():
            raise ValueError("zero denominator")

    @property
    def chart(self) -> FiberChart:
        return FiberChart(1, self.n, self.label or "ode")

    def pole_value(self, s: complex, t: np.ndarray) -> complex:
        return self.denominator.eval_values(np.concatenate([[s, np.conj(s)], t, np.conj(t)]))

    def is_linear(self) -> bool:
        """Homogeneous linear in the fiber with a fiber-independent denominator."""
        t_slots = list(range(2, 2 + self.n))
        if self.denominator.depends_on(t_slots):
            return False
        return all(sum(e[k] for k in t_slots) == 1 for e, _ in self.numerator.items())


def ode_to_foliation(ode: RationalODE) -> ConnectionChart:
    n = ode.n
    chart = ode.chart
    shifts = [WirtingerPoly.variable(1, n, 2 + k) for k in range(1, n)]
    den = ode.denominator
    if den.is_constant():
        F = ode.numerator * (1.0 / den.constant_term())
        return ConnectionChart(chart, PolyMatrix([shifts + [F]], chart.dims))
    head = PolyMatrix([shifts], chart.dims) if shifts else None

    def fn(pts, order):
        F = ode.numerator.jet(pts, order) / den.jet(pts, order)
        Fm = F.reshape((len(pts), 1, 1))
        if head is None:
            return Fm
        Hj = head.jet(pts, order)
        val = np.concatenate([Hj.val, Fm.val], axis=-1)
        d1 = np.concatenate([Hj.d1, Fm.d1], axis=-1) if order >= 1 else None
        d2 = np.concatenate([Hj.d2, Fm.d2], axis=-1) if order >= 2 else None
        return Jet(val, d1, d2)

    return ConnectionChart(chart, FunctionMatrix((1, n), chart.dims, fn, 2, "rational ODE"))


# -- paths ---------------------------------------------------------------------------------

@dataclass(frozen=True)
class Line:
    a: complex
    b: complex

    def point(self, u):
        return self.a + (self.b - self.a) * u

    def velocity(self, u):
        return (self.b - self.a) + 0 * u

    @property
    def start(self) -> complex:
        return complex(self.a)

    @property
    def end(self) -> complex:
        return complex(self.b)


@dataclass(frozen=True)
class Arc:
    """``center + radius * exp(i phi)`` for ``phi`` from ``phi0`` to ``phi1`` (winding is explicit)."""

    center: complex
    radius: float
    phi0: float
    phi1: float

    def point(self, u):
        return self.center + self.radius * np.exp(1j * (self.phi0 + (self.phi1 - self.phi0) * u))

    def velocity(self, u):
        dphi = self.phi1 - self.phi0
        return 1j * dphi * self.radius * np.exp(1j * (self.phi0 + dphi * u))

    @property
    def start(self) -> complex:
        return complex(self.point(0.0))

    @property
    def end(self) -> complex:
        return complex(self.point(1.0))


@dataclass(frozen=True)
class BasePath:
    segments: tuple
    punctures: tuple = ()
    margin: float = 1e-3
    max_step: float = np.inf

    def __post_init__(self):
        segs = tuple(self.segments)
        object.__setattr__(self, "segments", segs)
        if not segs:
            raise ValueError("empty path")
        for p, q in zip(segs, segs[1:]):
            if abs(p.end - q.start) > 1e-12:
                raise ValueError("path segments are not contiguous")
        for z in self.punctures:
            d = self.distance_to(z)
            if d <= self.margin:
                raise PoleProximityError(f"path passes within {d:.3g} of puncture {z}")

    @classmethod
    def line(cls, a, b, **kw) -> "BasePath":
        return cls((Line(complex(a), complex(b)),), **kw)

    @classmethod
    def circle(cls, center, radius: float, start_angle: float = 0.0, turns: float = 1.0, **kw) -> "BasePath":
        """Counter-clockwise loop (negative ``turns`` for clockwise), one arc per turn."""
        segs = []
        whole = int(np.floor(abs(turns)))
        sign = 1.0 if turns >= 0 else -1.0
        phi = start_angle
        for _ in range(whole):
            segs.append(Arc(complex(center), radius, phi, phi + sign * 2 * np.pi))
            phi += sign * 2 * np.pi
        rest = abs(turns) - whole
        if rest > 1e-15:
            segs.append(Arc(complex(center), radius, phi, phi + sign * 2 * np.pi * rest))
        return cls(tuple(segs), **kw)

    @property
    def start(self) -> complex:
        return self.segments[0].start

    @property
    def end(self) -> complex:
        return self.segments[-1].end

    @property
    def closed(self) -> bool:
        return abs(self.start - self.end) < 1e-12

    def __add__(self, other: "BasePath") -> "BasePath":
        """Concatenation: ``self`` first, then ``other``."""
        return BasePath(self.segments + other.segments, tuple(set(self.punctures) | set(other.punctures)),
                        min(self.margin, other.margin), min(self.max_step, other.max_step))

    def refined(self, factor: float = 2.0) -> "BasePath":
        step = self.max_step if np.isfinite(self.max_step) else 0.05
        return BasePath(self.segments, self.punctures, self.margin, step / factor)

    def distance_to(self, z: complex, samples: int = 2001) -> float:
        u = np.linspace(0, 1, samples)
        return float(min(np.min(np.abs(seg.point(u) - z)) for seg in self.segments))


# -- continuation --------------------------------------------------------------------------

def _compiled_rhs(fol: ConnectionChart):
    """Fast ``C(s, t)`` for one point."""
    C = fol.C
    r = fol.chart.r
    if isinstance(C, PolyMatrix):
        polys = [C[0, k] for k in range(r)]

        def rhs(s, t):
            x = np.concatenate([[s, np.conj(s)], t, np.conj(t)])
            return np.array([p.eval_values(x) for p in polys], dtype=complex)
        return rhs

    def rhs(s, t):
        pts = ChartPoints(np.array([[s]]), t[None, :])
        return C.jet(pts, 0).val[0, 0]
    return rhs


def continue_along_path(fol: ConnectionChart, path: BasePath, t0, rtol: float = 1e-10, atol: float = 1e-10,
                        escape: float = ESCAPE_RADIUS, ode: RationalODE | None = None,
                        pole_tol: float = 1e-10) -> np.ndarray:
    """Analytic continuation of the integral curve through ``(path.start, t0)``.

    Raises :class:`ContinuationEscaped` (with the global path parameter) on
    blow-up or step collapse, and :class:`PoleProximityError` when the
    denominator of ``ode`` nearly vanishes on the curve.
    """
    if fol.chart.m != 1:
        raise DimensionError("continuation needs a one-dimensional base")
    y = np.atleast_1d(np.asarray(t0, dtype=complex)).copy()
    if y.shape != (fol.chart.r,):
        raise DimensionError(f"initial value must have {fol.chart.r} entries")
    rhs = _compiled_rhs(fol)
    nseg = len(path.segments)
    for idx, seg in enumerate(path.segments):
        def f(u, yy, seg=seg):
            s = seg.point(u)
            if ode is not None and abs(ode.pole_value(s, yy)) < pole_tol:
                raise PoleProximityError(f"pole of the ODE reached at s={complex(s)}")
            return rhs(s, yy) * seg.velocity(u)

        def blowup(u, yy):
            return escape - np.max(np.abs(yy))

        blowup.terminal = True
        sol = solve_ivp(f, (0.0, 1.0), y, method="RK45", rtol=rtol, atol=atol,
                        max_step=path.max_step, events=blowup)
        if sol.status == 1 or sol.status == -1 or not np.all(np.isfinite(sol.y[:, -1])):
            u = float(sol.t[-1])
            raise ContinuationEscaped(
                f"continuation escaped domain at path parameter {(idx + u) / nseg:.6g}",
                (idx + u) / nseg, sol.y[:, -1])
        y = sol.y[:, -1]
    return y


@dataclass
class MonodromyResult:
    records: list
    matrix: np.ndarray | None = None
    residual: float | None = None

    @property
    def outputs(self) -> list:
        return [rec["output"] for rec in self.records]

    @property
    def escapes(self) -> list:
        return [rec for rec in self.records if rec["output"] is None]


def loop_monodromy(fol: ConnectionChart, loop: BasePath, samples: Sequence, linear: bool | None = None,
                   ode: RationalODE | None = None, **kw) -> MonodromyResult:
    """Continue every sample around a closed loop; fits a matrix for linear foliations.

    The matrix acts on column vectors: ``t_out = R t_in``.  For concatenated
    loops ``R(g1 g2) = R(g2) R(g1)`` (``g1`` traversed first).
    """
    if not loop.closed:
        raise ValueError("loop_monodromy needs a closed path")
    records = []
    for smp in samples:
        t_in = np.atleast_1d(np.asarray(smp, dtype=complex))
        try:
            out = continue_along_path(fol, loop, t_in, ode=ode, **kw)
            records.append({"input": t_in, "output": out})
        except (ContinuationEscaped, PoleProximityError) as exc:
            records.append({"input": t_in, "output": None, "escape": str(exc),
                            "parameter": getattr(exc, "parameter", None)})
    if linear is None:
        linear = ode is not None and ode.is_linear()
    result = MonodromyResult(records)
    good = [rec for rec in records if rec["output"] is not None]
    if linear and good:
        X = np.array([rec["input"] for rec in good])
        Y = np.array([rec["output"] for rec in good])
        RT, *_ = np.linalg.lstsq(X, Y, rcond=None)
        result.matrix = RT.T
        result.residual = float(np.max(np.abs(X @ RT - Y), initial=0.0))
    return result


# -- polynomial automorphisms --------------------------------------------------------------

@dataclass(frozen=True)
class PolyAuto:
    """Polynomial self-map ``t -> (f_1(t), ..., f_n(t))`` of ``C^n`` (dims ``(0, n)`` polynomials)."""

    components: tuple
    name: str = field(default="", compare=False)

    def __post_init__(self):
        comps = tuple(self.components)
        object.__setattr__(self, "components", comps)
        n = len(comps)
        for p in comps:
            if p.dims != (0, n) or not p.is_holomorphic():
                raise DimensionError(f"components must be holomorphic polynomials on dims (0, {n})")

    @property
    def n(self) -> int:
        return len(self.components)

    @classmethod
    def identity(cls, n: int) -> "PolyAuto":
        return cls(tuple(WirtingerPoly.variable(0, n, k) for k in range(n)), "id")

    @classmethod
    def from_callable(cls, n: int, fn, name: str = "") -> "PolyAuto":
        t = [WirtingerPoly.variable(0, n, k) for k in range(n)]
        return cls(tuple(fn(*t)), name)

    def __call__(self, t) -> np.ndarray:
        t = np.asarray(t, dtype=complex)
        x = np.concatenate([t, np.conj(t)], axis=-1)
        return np.stack([np.asarray(p.eval_values(x)) for p in self.components], axis=-1)

    def degrees(self) -> list[int]:
        return [p.degree() for p in self.components]

    def jacobian(self) -> list[list[WirtingerPoly]]:
        return [[p.derive(k) for k in range(self.n)] for p in self.components]

    def jacobian_degree(self) -> int:
        return max((q.degree() for row in self.jacobian() for q in row), default=-1)

    def is_identity(self) -> bool:
        return self == PolyAuto.identity(self.n)


def compose_polyauto(f: PolyAuto, g: PolyAuto) -> PolyAuto:
    """Exact composition ``f o g``."""
    if f.n != g.n:
        raise DimensionError("automorphisms act on different dimensions")
    images = list(g.components) + [p.conjugate() for p in g.components]
    name = f"{f.name}.{g.name}" if f.name and g.name else ""
    return PolyAuto(tuple(p.compose(images) for p in f.components), name)


def evaluate_word(word: Sequence[PolyAuto]) -> PolyAuto:
    """``w_1 o w_2 o ... o w_k``."""
    out = word[0]
    for g in word[1:]:
        out = compose_polyauto(out, g)
    return out


def reduced_words(generators: Sequence[PolyAuto], max_len: int, cap: int = 20000):
    """Words with no adjacent pair composing to the identity, by increasing length."""
    gens = list(generators)
    cancels = {(a, b) for a in range(len(gens)) for b in range(len(gens))
               if compose_polyauto(gens[a], gens[b]).is_identity()}
    count = 0
    frontier = [()]
    for _ in range(max_len):
        nxt = []
        for w in frontier:
            for g in range(len(gens)):
                if w and (w[-1], g) in cancels:
                    continue
                count += 1
                if count > cap:
                    raise WordCountExceeded(f"more than {cap} reduced words; lower max_len")
                nxt.append(w + (g,))
        yield from nxt
        frontier = nxt


def jacobian_degree_growth(generators: Sequence[PolyAuto], max_len: int, cap: int = 20000) -> list[dict]:
    """Per reduced word: the maximal degree of Jacobian entries and of components."""
    if max_len < 1:
        raise ValueError("max_len must be >= 1")
    cache: dict[tuple, PolyAuto] = {}
    rows = []
    for w in reduced_words(generators, max_len, cap):
        prefix = w[:-1]
        f = generators[w[-1]] if not prefix else compose_polyauto(cache[prefix], generators[w[-1]])
        cache[w] = f
        rows.append({"word": [generators[i].name or str(i) for i in w], "length": len(w),
                     "jacobian_degree": f.jacobian_degree(), "degree": max(f.degrees())})
    return rows


def max_degree_by_length(table: list[dict], key: str = "jacobian_degree") -> dict[int, int]:
    out: dict[int, int] = {}
    for row in table:
        out[row["length"]] = max(out.get(row["length"], -1), row[key])
    return out


def power_degrees(f: PolyAuto, kmax: int) -> list[int]:
    """Maximal component degree of ``f^k`` for ``k = 1..kmax``."""
    out, g = [], f
    for k in range(1, kmax + 1):
        if k > 1:
            g = compose_polyauto(g, f)
        out.append(max(g.degrees()))
    return out


def rho1_generators() -> list[PolyAuto]:
    """``(t1, t1 + t2)``, ``(t1, t1^2 + t2)`` and their inverses."""
    mk = PolyAuto.from_callable
    return [mk(2, lambda a, b: (a, a + b), "A"), mk(2, lambda a, b: (a, a**2 + b), "B"),
            mk(2, lambda a, b: (a, b - a), "A^-1"), mk(2, lambda a, b: (a, b - a**2), "B^-1")]


def rho2_generators() -> list[PolyAuto]:
    """``sigma = (t2, t1)`` and ``tau = (t1, t1^2 + t2)``."""
    mk = PolyAuto.from_callable
    return [mk(2, lambda a, b: (b, a), "sigma"), mk(2, lambda a, b: (a, a**2 + b), "tau")]


def rho1_normal_form(f: PolyAuto) -> tuple[complex, complex] | None:
    """``(a1, a2)`` when ``f = (t1, a1 t1 + a2 t1^2 + t2)``, else ``None``."""
    if f.n != 2:
        return None
    t1 = WirtingerPoly.variable(0, 2, 0)
    t2 = WirtingerPoly.variable(0, 2, 1)
    if f.components[0] != t1:
        return None
    rest = f.components[1] - t2
    a1 = a2 = 0j
    for exp, c in rest.items():
        if exp[1] or exp[2] or exp[3] or exp[0] not in (1, 2):
            return None
        if exp[0] == 1:
            a1 = c
        else:
            a2 = c
    return a1, a2
