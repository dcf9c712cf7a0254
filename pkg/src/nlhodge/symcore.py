"""Exact Wirtinger polynomials, chart vector fields and point-level hermitian algebra.

Variables of a chart with base dimension ``m`` and fiber dimension ``r`` are
ordered as::

    s_1..s_m, sbar_1..sbar_m, t_1..t_r, tbar_1..tbar_r

and every polynomial treats the ``2(m+r)`` variables as independent (Wirtinger
convention).  A vector field stores one coefficient per variable; the
coefficient at index ``k`` multiplies the derivation along variable ``k``, so
``sbar`` slots hold the ``dbar_s`` components and ``tbar`` slots the
``dbar_t`` components.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import DimensionError, MetricDegenerateError

Exponent = tuple[int, ...]

_VAR_RE = re.compile(r"^(s|sbar|t|tbar)(\d+)$")


def nvars(m: int, r: int) -> int:
    return 2 * (m + r)


def var_index(m: int, r: int, var: int | str) -> int:
    """Resolve ``var`` (0-based int or a name like ``"sbar2"``, 1-based) to a slot."""
    n = nvars(m, r)
    if isinstance(var, (int, np.integer)):
        if not 0 <= var < n:
            raise DimensionError(f"variable index {var} out of range for dims ({m}, {r})")
        return int(var)
    match = _VAR_RE.match(var)
    if match is None:
        raise DimensionError(f"cannot parse variable name {var!r}")
    kind, num = match.group(1), int(match.group(2)) - 1
    size = m if kind in ("s", "sbar") else r
    if not 0 <= num < size:
        raise DimensionError(f"variable {var!r} out of range for dims ({m}, {r})")
    offset = {"s": 0, "sbar": m, "t": 2 * m, "tbar": 2 * m + r}[kind]
    return offset + num


def var_name(m: int, r: int, k: int) -> str:
    if k < m:
        return f"s{k + 1}"
    if k < 2 * m:
        return f"sbar{k - m + 1}"
    if k < 2 * m + r:
        return f"t{k - 2 * m + 1}"
    return f"tbar{k - 2 * m - r + 1}"


def conjugation_permutation(m: int, r: int) -> np.ndarray:
    """Index permutation swapping s <-> sbar and t <-> tbar."""
    perm = np.empty(nvars(m, r), dtype=int)
    for i in range(m):
        perm[i], perm[m + i] = m + i, i
    for j in range(r):
        perm[2 * m + j], perm[2 * m + r + j] = 2 * m + r + j, 2 * m + j
    return perm


def holomorphic_slots(m: int, r: int) -> list[int]:
    return list(range(m)) + list(range(2 * m, 2 * m + r))


def antiholomorphic_slots(m: int, r: int) -> list[int]:
    return list(range(m, 2 * m)) + list(range(2 * m + r, 2 * (m + r)))


def _grlex_key(exp: Exponent):
    # graded lexicographic, highest degree first
    return (-sum(exp), tuple(-e for e in exp))


class WirtingerPoly:
    """Sparse polynomial in ``s, sbar, t, tbar`` with complex coefficients.

    Values are immutable; zero coefficients are never stored, so equality is
    structural.
    """

    __slots__ = ("m", "r", "_terms", "_hash", "_derivs", "_compiled")

    def __init__(self, m: int, r: int, terms: Mapping[Exponent, complex] | None = None):
        if m < 0 or r < 0:
            raise DimensionError("dimensions must be non-negative")
        self.m, self.r = m, r
        n = nvars(m, r)
        clean: dict[Exponent, complex] = {}
        for exp, coeff in (terms or {}).items():
            exp = tuple(int(e) for e in exp)
            if len(exp) != n or any(e < 0 for e in exp):
                raise DimensionError(f"bad exponent vector {exp} for dims ({m}, {r})")
            c = complex(coeff)
            if c != 0:
                clean[exp] = clean.get(exp, 0) + c
                if clean[exp] == 0:
                    del clean[exp]
        self._terms = dict(sorted(clean.items(), key=lambda kv: _grlex_key(kv[0])))
        self._hash = None
        self._derivs: dict[int, WirtingerPoly] = {}
        self._compiled = None

    # -- constructors ---------------------------------------------------
    @classmethod
    def zero(cls, m: int, r: int) -> "WirtingerPoly":
        return cls(m, r)

    @classmethod
    def constant(cls, m: int, r: int, value: complex) -> "WirtingerPoly":
        return cls(m, r, {(0,) * nvars(m, r): value})

    @classmethod
    def variable(cls, m: int, r: int, var: int | str) -> "WirtingerPoly":
        k = var_index(m, r, var)
        exp = [0] * nvars(m, r)
        exp[k] = 1
        return cls(m, r, {tuple(exp): 1})

    @classmethod
    def random(cls, m: int, r: int, degree: int, nterms: int, rng: np.random.Generator,
               slots: Sequence[int] | None = None, integer: bool = True) -> "WirtingerPoly":
        """Random polynomial of total degree <= ``degree`` in the given slots."""
        n = nvars(m, r)
        slots = list(range(n)) if slots is None else list(slots)
        terms: dict[Exponent, complex] = {}
        for _ in range(nterms):
            exp = [0] * n
            for _ in range(int(rng.integers(0, degree + 1))):
                exp[slots[int(rng.integers(len(slots)))]] += 1
            if integer:
                c = complex(int(rng.integers(-3, 4)), int(rng.integers(-3, 4)))
            else:
                c = complex(rng.normal(), rng.normal())
            terms[tuple(exp)] = terms.get(tuple(exp), 0) + c
        return cls(m, r, terms)

    # -- basic protocol -------------------------------------------------
    @property
    def dims(self) -> tuple[int, int]:
        return (self.m, self.r)

    @property
    def nvars(self) -> int:
        return nvars(self.m, self.r)

    @property
    def terms(self) -> dict[Exponent, complex]:
        return dict(self._terms)

    def items(self):
        return self._terms.items()

    def __len__(self) -> int:
        return len(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def degree(self) -> int:
        return max((sum(e) for e in self._terms), default=-1)

    def degree_in(self, slots: Iterable[int]) -> int:
        slots = list(slots)
        return max((sum(e[k] for k in slots) for e in self._terms), default=-1)

    def depends_on(self, slots: Iterable[int]) -> bool:
        slots = list(slots)
        return any(e[k] for e in self._terms for k in slots)

    def is_holomorphic(self) -> bool:
        return not self.depends_on(antiholomorphic_slots(self.m, self.r))

    def is_constant(self) -> bool:
        return self.degree() <= 0

    def constant_term(self) -> complex:
        return self._terms.get((0,) * self.nvars, 0j)

    def _coerce(self, other) -> "WirtingerPoly":
        if isinstance(other, WirtingerPoly):
            if other.dims != self.dims:
                raise DimensionError(f"dims mismatch {self.dims} vs {other.dims}")
            return other
        if isinstance(other, (int, float, complex, np.number)):
            return WirtingerPoly.constant(self.m, self.r, complex(other))
        return NotImplemented

    def __eq__(self, other) -> bool:
        other = self._coerce(other) if not isinstance(other, WirtingerPoly) else other
        if other is NotImplemented:
            return NotImplemented
        return self.dims == other.dims and self._terms == other._terms

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.dims, tuple(self._terms.items())))
        return self._hash

    def __add__(self, other) -> "WirtingerPoly":
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        terms = dict(self._terms)
        for exp, c in other._terms.items():
            terms[exp] = terms.get(exp, 0) + c
        return WirtingerPoly(self.m, self.r, terms)

    __radd__ = __add__

    def __neg__(self) -> "WirtingerPoly":
        return WirtingerPoly(self.m, self.r, {e: -c for e, c in self._terms.items()})

    def __sub__(self, other) -> "WirtingerPoly":
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other) -> "WirtingerPoly":
        return (-self) + other

    def __mul__(self, other) -> "WirtingerPoly":
        if isinstance(other, (int, float, complex, np.number)):
            c = complex(other)
            return WirtingerPoly(self.m, self.r, {e: c * v for e, v in self._terms.items()})
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        terms: dict[Exponent, complex] = {}
        for e1, c1 in self._terms.items():
            for e2, c2 in other._terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                terms[e] = terms.get(e, 0) + c1 * c2
        return WirtingerPoly(self.m, self.r, terms)

    __rmul__ = __mul__

    def __pow__(self, k: int) -> "WirtingerPoly":
        if k < 0:
            raise ValueError("negative powers are not polynomials")
        out = WirtingerPoly.constant(self.m, self.r, 1)
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    # -- calculus -------------------------------------------------------
    def derive(self, var: int | str) -> "WirtingerPoly":
        k = var_index(self.m, self.r, var)
        cached = self._derivs.get(k)
        if cached is not None:
            return cached
        terms: dict[Exponent, complex] = {}
        for exp, c in self._terms.items():
            if exp[k]:
                e = list(exp)
                e[k] -= 1
                terms[tuple(e)] = c * exp[k]
        out = WirtingerPoly(self.m, self.r, terms)
        self._derivs[k] = out
        return out

    def conjugate(self) -> "WirtingerPoly":
        perm = conjugation_permutation(self.m, self.r)
        terms = {tuple(exp[p] for p in perm): c.conjugate() for exp, c in self._terms.items()}
        return WirtingerPoly(self.m, self.r, terms)

    def compose(self, images: Sequence["WirtingerPoly"]) -> "WirtingerPoly":
        """Substitute ``images[k]`` for variable ``k`` (images share a target chart)."""
        if len(images) != self.nvars:
            raise DimensionError("need one image per variable")
        tm, tr = images[0].dims
        out = WirtingerPoly.zero(tm, tr)
        powers: dict[tuple[int, int], WirtingerPoly] = {}
        for exp, c in self._terms.items():
            term = WirtingerPoly.constant(tm, tr, c)
            for k, e in enumerate(exp):
                if e:
                    key = (k, e)
                    if key not in powers:
                        powers[key] = images[k] ** e
                    term = term * powers[key]
            out = out + term
        return out

    # -- evaluation -----------------------------------------------------
    def _arrays(self):
        if self._compiled is None:
            n = self.nvars
            if self._terms:
                exps = np.array(list(self._terms.keys()), dtype=int).reshape(-1, n)
                coeffs = np.array(list(self._terms.values()), dtype=complex)
            else:
                exps = np.zeros((0, n), dtype=int)
                coeffs = np.zeros(0, dtype=complex)
            self._compiled = (exps, coeffs)
        return self._compiled

    def eval_values(self, values) -> np.ndarray | complex:
        """Evaluate at raw variable values, shape ``(..., nvars)``; barred slots are taken as given."""
        x = np.asarray(values, dtype=complex)
        exps, coeffs = self._arrays()
        if x.shape[-1] != self.nvars:
            raise DimensionError("value vector has wrong length")
        if not len(coeffs):
            out = np.zeros(x.shape[:-1], dtype=complex)
        else:
            mono = np.prod(x[..., None, :] ** exps, axis=-1)
            out = mono @ coeffs
        return complex(out) if out.ndim == 0 else out

    def eval(self, point) -> np.ndarray | complex:
        """Evaluate at a :class:`ChartPoint` or :class:`ChartPoints` (barred slots from conjugates)."""
        return self.eval_values(point.values())

    def __call__(self, point):
        return self.eval(point)

    def jet(self, points, order: int = 1):
        """Exact value and Wirtinger derivatives up to ``order`` at a batch of points."""
        from .jets import Jet

        x = points.values() if hasattr(points, "values") and not isinstance(points, np.ndarray) else np.asarray(points)
        x = np.atleast_2d(x)
        n = self.nvars
        val = np.asarray(self.eval_values(x))
        d1 = d2 = None
        if order >= 1:
            d1 = np.stack([np.asarray(self.derive(k).eval_values(x)) for k in range(n)])
        if order >= 2:
            d2 = np.empty((n, n) + val.shape, dtype=complex)
            for k in range(n):
                dk = self.derive(k)
                for l in range(k, n):
                    d2[k, l] = d2[l, k] = dk.derive(l).eval_values(x)
        return Jet(val, d1, d2)

    # -- presentation / serialization -----------------------------------
    def __repr__(self) -> str:
        if not self._terms:
            return "0"
        parts = []
        for exp, c in self._terms.items():
            mono = "*".join(
                var_name(self.m, self.r, k) + (f"^{e}" if e > 1 else "")
                for k, e in enumerate(exp) if e
            )
            cs = _fmt_complex(c)
            if not mono:
                parts.append(cs)
            elif c == 1:
                parts.append(mono)
            elif c == -1:
                parts.append("-" + mono)
            else:
                parts.append(f"{cs}*{mono}")
        return " + ".join(parts)

    def to_json(self) -> list:
        return [[list(e), [c.real, c.imag]] for e, c in self._terms.items()]

    @classmethod
    def from_json(cls, m: int, r: int, data: Sequence) -> "WirtingerPoly":
        terms: dict[Exponent, complex] = {}
        for exp, coeff in data:
            if isinstance(coeff, (list, tuple)):
                c = complex(coeff[0], coeff[1])
            else:
                c = complex(coeff)
            terms[tuple(exp)] = terms.get(tuple(exp), 0) + c
        return cls(m, r, terms)


def _fmt_complex(c: complex) -> str:
    if c.imag == 0:
        return f"{c.real:g}"
    if c.real == 0:
        return f"{c.imag:g}j"
    return f"({c.real:g}{c.imag:+g}j)"


@dataclass(frozen=True)
class ChartVars:
    """Coordinate polynomials of a chart, for building expressions."""

    m: int
    r: int

    def __getattr__(self, name):
        if _VAR_RE.match(name):
            return WirtingerPoly.variable(self.m, self.r, name)
        raise AttributeError(name)

    @property
    def s(self) -> list[WirtingerPoly]:
        return [WirtingerPoly.variable(self.m, self.r, i) for i in range(self.m)]

    @property
    def sbar(self) -> list[WirtingerPoly]:
        return [WirtingerPoly.variable(self.m, self.r, self.m + i) for i in range(self.m)]

    @property
    def t(self) -> list[WirtingerPoly]:
        return [WirtingerPoly.variable(self.m, self.r, 2 * self.m + j) for j in range(self.r)]

    @property
    def tbar(self) -> list[WirtingerPoly]:
        return [WirtingerPoly.variable(self.m, self.r, 2 * self.m + self.r + j) for j in range(self.r)]

    def const(self, value: complex) -> WirtingerPoly:
        return WirtingerPoly.constant(self.m, self.r, value)


def chart_vars(m: int, r: int) -> ChartVars:
    return ChartVars(m, r)


def wirtinger_derive(p: WirtingerPoly, var: int | str) -> WirtingerPoly:
    return p.derive(var)


# -- points --------------------------------------------------------------------

class ChartPoints:
    """A batch of chart points; barred coordinates are always conjugates."""

    def __init__(self, s, t):
        s = np.atleast_2d(np.asarray(s, dtype=complex))
        t = np.atleast_2d(np.asarray(t, dtype=complex))
        if s.shape[0] != t.shape[0]:
            if s.shape[0] == 1:
                s = np.repeat(s, t.shape[0], axis=0)
            elif t.shape[0] == 1:
                t = np.repeat(t, s.shape[0], axis=0)
            else:
                raise DimensionError("s and t batches have different lengths")
        self.s, self.t = s, t

    @property
    def m(self) -> int:
        return self.s.shape[1]

    @property
    def r(self) -> int:
        return self.t.shape[1]

    def __len__(self) -> int:
        return self.s.shape[0]

    def values(self) -> np.ndarray:
        return np.concatenate([self.s, self.s.conj(), self.t, self.t.conj()], axis=1)

    def __getitem__(self, idx) -> "ChartPoints":
        return ChartPoints(self.s[idx], self.t[idx])

    def with_t(self, t) -> "ChartPoints":
        return ChartPoints(self.s, np.broadcast_to(np.asarray(t, dtype=complex), self.t.shape))


def ChartPoint(s, t) -> ChartPoints:
    """Single point; ``s`` has m entries and ``t`` has r entries."""
    return ChartPoints(np.reshape(np.asarray(s, dtype=complex), (1, -1)),
                       np.reshape(np.asarray(t, dtype=complex), (1, -1)))


# -- vector fields ---------------------------------------------------------------

class VectorFieldChart:
    """Vector field on the chart total space with polynomial coefficients."""

    __slots__ = ("m", "r", "coeffs")

    def __init__(self, m: int, r: int, coeffs: Sequence[WirtingerPoly] | None = None):
        n = nvars(m, r)
        if coeffs is None:
            coeffs = [WirtingerPoly.zero(m, r)] * n
        coeffs = tuple(coeffs)
        if len(coeffs) != n:
            raise DimensionError(f"need {n} coefficients, got {len(coeffs)}")
        for c in coeffs:
            if c.dims != (m, r):
                raise DimensionError("coefficient dims disagree with field dims")
        self.m, self.r, self.coeffs = m, r, coeffs

    @classmethod
    def basis(cls, m: int, r: int, var: int | str, coeff: WirtingerPoly | complex = 1) -> "VectorFieldChart":
        k = var_index(m, r, var)
        if not isinstance(coeff, WirtingerPoly):
            coeff = WirtingerPoly.constant(m, r, coeff)
        coeffs = [WirtingerPoly.zero(m, r)] * nvars(m, r)
        coeffs[k] = coeff
        return cls(m, r, coeffs)

    @classmethod
    def from_dict(cls, m: int, r: int, parts: Mapping[int | str, WirtingerPoly | complex]) -> "VectorFieldChart":
        out = cls(m, r)
        for var, c in parts.items():
            out = out + cls.basis(m, r, var, c)
        return out

    @property
    def dims(self) -> tuple[int, int]:
        return (self.m, self.r)

    def __getitem__(self, var: int | str) -> WirtingerPoly:
        return self.coeffs[var_index(self.m, self.r, var)]

    def _check(self, other: "VectorFieldChart"):
        if not isinstance(other, VectorFieldChart) or other.dims != self.dims:
            raise DimensionError("vector field dims mismatch")

    def __add__(self, other: "VectorFieldChart") -> "VectorFieldChart":
        self._check(other)
        return VectorFieldChart(self.m, self.r, [a + b for a, b in zip(self.coeffs, other.coeffs)])

    def __sub__(self, other: "VectorFieldChart") -> "VectorFieldChart":
        self._check(other)
        return VectorFieldChart(self.m, self.r, [a - b for a, b in zip(self.coeffs, other.coeffs)])

    def __neg__(self) -> "VectorFieldChart":
        return VectorFieldChart(self.m, self.r, [-a for a in self.coeffs])

    def scale(self, f: WirtingerPoly | complex) -> "VectorFieldChart":
        return VectorFieldChart(self.m, self.r, [f * a for a in self.coeffs])

    __rmul__ = scale

    def __eq__(self, other) -> bool:
        return isinstance(other, VectorFieldChart) and self.dims == other.dims and self.coeffs == other.coeffs

    def __hash__(self) -> int:
        return hash(self.coeffs)

    def is_zero(self) -> bool:
        return all(c.is_zero() for c in self.coeffs)

    def apply(self, f: WirtingerPoly) -> WirtingerPoly:
        """Directional derivative ``X(f)`` summed over all Wirtinger directions."""
        out = WirtingerPoly.zero(self.m, self.r)
        for k, c in enumerate(self.coeffs):
            if not c.is_zero():
                out = out + c * f.derive(k)
        return out

    def conjugate(self) -> "VectorFieldChart":
        perm = conjugation_permutation(self.m, self.r)
        return VectorFieldChart(self.m, self.r, [self.coeffs[p].conjugate() for p in perm])

    def holomorphic_part(self) -> "VectorFieldChart":
        keep = set(holomorphic_slots(self.m, self.r))
        zero = WirtingerPoly.zero(self.m, self.r)
        return VectorFieldChart(self.m, self.r, [c if k in keep else zero for k, c in enumerate(self.coeffs)])

    def antiholomorphic_part(self) -> "VectorFieldChart":
        return self - self.holomorphic_part()

    def eval(self, point) -> np.ndarray:
        return np.stack([np.atleast_1d(c.eval(point)) for c in self.coeffs], axis=-1)

    def __repr__(self) -> str:
        parts = [f"({c})*d[{var_name(self.m, self.r, k)}]" for k, c in enumerate(self.coeffs) if not c.is_zero()]
        return " + ".join(parts) if parts else "0"


def lie_bracket(X: VectorFieldChart, Y: VectorFieldChart) -> VectorFieldChart:
    """``[X, Y]`` with coefficient ``X(Y_e) - Y(X_e)`` on each basis derivation ``e``."""
    if X.dims != Y.dims:
        raise DimensionError(f"cannot bracket fields of dims {X.dims} and {Y.dims}")
    return VectorFieldChart(X.m, X.r, [X.apply(ye) - Y.apply(xe) for xe, ye in zip(X.coeffs, Y.coeffs)])


# -- hermitian linear algebra ------------------------------------------------------

def cholesky_checked(A: np.ndarray, points=None) -> np.ndarray:
    """Batched Cholesky of hermitian matrices, naming the first degenerate point on failure."""
    A = np.asarray(A, dtype=complex)
    try:
        return np.linalg.cholesky(A)
    except np.linalg.LinAlgError:
        flat = A.reshape((-1,) + A.shape[-2:])
        for idx, mat in enumerate(flat):
            try:
                np.linalg.cholesky(mat)
            except np.linalg.LinAlgError:
                where = _describe_point(points, idx) if points is not None else f"batch index {idx}"
                raise MetricDegenerateError(
                    f"metric degenerate on fiber directions at {where}", index=idx) from None
        raise


def _describe_point(points, idx: int) -> str:
    try:
        return f"s={points.s[idx].tolist()}, t={points.t[idx].tolist()}"
    except (AttributeError, IndexError):
        return f"batch index {idx}"


def right_solve_factored(L: np.ndarray, B: np.ndarray) -> np.ndarray:
    """``X`` with ``X @ A = B`` given ``A = L @ L^H`` (batched over leading axes)."""
    # X A = B  <=>  A X^H = B^H
    Bh = np.conj(np.swapaxes(B, -1, -2))
    y = np.linalg.solve(L, Bh)
    xh = np.linalg.solve(np.conj(np.swapaxes(L, -1, -2)), y)
    return np.conj(np.swapaxes(xh, -1, -2))


def hermitian_solve(A, B, points=None) -> np.ndarray:
    """``B @ inv(A)`` for hermitian positive definite ``A`` via Cholesky."""
    A = np.asarray(A, dtype=complex)
    B = np.asarray(B, dtype=complex)
    if A.shape[-1] != A.shape[-2] or B.shape[-1] != A.shape[-1]:
        raise DimensionError(f"shape mismatch: A {A.shape}, B {B.shape}")
    if not np.allclose(A, np.conj(np.swapaxes(A, -1, -2)), rtol=1e-10, atol=1e-12):
        raise MetricDegenerateError("fiber block is not hermitian")
    L = cholesky_checked(A, points)
    return right_solve_factored(L, B)
