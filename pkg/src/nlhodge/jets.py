"""Second-order forward-mode Wirtinger jets and point-wise evaluable matrices.

A :class:`Jet` carries the value of a function on a batch of chart points
together with its first (and optionally second) Wirtinger derivatives with
respect to all ``2(m+r)`` chart variables.  Derivative axes come first::

    val  : S            (S = (P, ...))
    d1   : (n,) + S
    d2   : (n, n) + S   or None

so numpy broadcasting and ``matmul`` act on the trailing value axes.
"""
from __future__ import annotations

from typing import Callable, Sequence

import numpy as np

from .errors import DimensionError
from .symcore import (
    ChartPoints,
    WirtingerPoly,
    cholesky_checked,
    conjugation_permutation,
    nvars,
    right_solve_factored,
)


class Jet:
    __slots__ = ("val", "d1", "d2")

    def __init__(self, val, d1=None, d2=None):
        self.val = np.asarray(val, dtype=complex)
        self.d1 = None if d1 is None else np.asarray(d1, dtype=complex)
        self.d2 = None if d2 is None or d1 is None else np.asarray(d2, dtype=complex)

    @property
    def order(self) -> int:
        return 0 if self.d1 is None else (1 if self.d2 is None else 2)

    @property
    def shape(self) -> tuple[int, ...]:
        return self.val.shape

    @property
    def n(self) -> int | None:
        return None if self.d1 is None else self.d1.shape[0]

    def truncate(self, order: int) -> "Jet":
        if order >= self.order:
            return self
        return Jet(self.val, self.d1 if order >= 1 else None, None)

    @classmethod
    def constant(cls, value, n: int, order: int) -> "Jet":
        v = np.asarray(value, dtype=complex)
        d1 = np.zeros((n,) + v.shape, dtype=complex) if order >= 1 else None
        d2 = np.zeros((n, n) + v.shape, dtype=complex) if order >= 2 else None
        return cls(v, d1, d2)

    def broadcast_to(self, shape) -> "Jet":
        shape = tuple(shape)
        if shape == self.shape:
            return self
        n = self.n
        # pad value axes on the left so derivative axes stay in front
        pad = (1,) * (len(shape) - self.val.ndim) + self.val.shape
        return Jet(np.broadcast_to(self.val, shape),
                   None if self.d1 is None else np.broadcast_to(self.d1.reshape((n,) + pad), (n,) + shape),
                   None if self.d2 is None else np.broadcast_to(self.d2.reshape((n, n) + pad), (n, n) + shape))

    def reshape(self, shape) -> "Jet":
        shape = tuple(shape)
        n = self.n
        return Jet(self.val.reshape(shape),
                   None if self.d1 is None else self.d1.reshape((n,) + shape),
                   None if self.d2 is None else self.d2.reshape((n, n) + shape))

    def __getitem__(self, idx) -> "Jet":
        # without an Ellipsis the index addresses the leading value axes
        if not isinstance(idx, tuple):
            idx = (idx,)
        v = self.val[idx]
        if Ellipsis in idx:
            d1 = None if self.d1 is None else self.d1[idx]
            d2 = None if self.d2 is None else self.d2[idx]
        else:
            d1 = None if self.d1 is None else self.d1[(slice(None),) + idx]
            d2 = None if self.d2 is None else self.d2[(slice(None), slice(None)) + idx]
        return Jet(v, d1, d2)

    # -- arithmetic -------------------------------------------------------
    def _lift(self, other) -> "Jet":
        if isinstance(other, Jet):
            return other
        return Jet(np.asarray(other, dtype=complex))

    def _pair(self, other):
        a, b = self, self._lift(other)
        if a.d1 is None and b.d1 is not None:
            a = Jet.constant(a.val, b.n, b.order)
        if b.d1 is None and a.d1 is not None:
            b = Jet.constant(b.val, a.n, a.order)
        order = min(a.order, b.order)
        a, b = a.truncate(order), b.truncate(order)
        shape = np.broadcast_shapes(a.shape, b.shape)
        return a.broadcast_to(shape), b.broadcast_to(shape)

    def __add__(self, other) -> "Jet":
        a, b = self._pair(other)
        return Jet(a.val + b.val,
                   None if a.d1 is None else a.d1 + b.d1,
                   None if a.d2 is None else a.d2 + b.d2)

    __radd__ = __add__

    def __neg__(self) -> "Jet":
        return Jet(-self.val, None if self.d1 is None else -self.d1,
                   None if self.d2 is None else -self.d2)

    def __sub__(self, other) -> "Jet":
        return self + (-self._lift(other))

    def __rsub__(self, other) -> "Jet":
        return (-self) + other

    def __mul__(self, other) -> "Jet":
        if not isinstance(other, Jet):
            c = np.asarray(other, dtype=complex)
            return Jet(self.val * c, None if self.d1 is None else self.d1 * c,
                       None if self.d2 is None else self.d2 * c)
        a, b = self._pair(other)
        d1 = d2 = None
        if a.d1 is not None:
            d1 = a.d1 * b.val + a.val * b.d1
        if a.d2 is not None:
            cross = a.d1[:, None] * b.d1[None, :]
            d2 = a.d2 * b.val + cross + np.swapaxes(cross, 0, 1) + a.val * b.d2
        return Jet(a.val * b.val, d1, d2)

    __rmul__ = __mul__

    def __truediv__(self, other) -> "Jet":
        if not isinstance(other, Jet):
            return self * (1.0 / np.asarray(other, dtype=complex))
        return self * other.reciprocal()

    def __rtruediv__(self, other) -> "Jet":
        return self.reciprocal() * other

    def __pow__(self, k: int) -> "Jet":
        if k == 0:
            return Jet.constant(np.ones_like(self.val), self.n or 0, self.order)
        if k < 0:
            return (self ** (-k)).reciprocal()
        out = self
        for _ in range(k - 1):
            out = out * self
        return out

    def apply(self, f0, f1, f2) -> "Jet":
        """Chain rule for an elementwise holomorphic function with derivatives ``f1``, ``f2``."""
        v = self.val
        d1 = d2 = None
        if self.d1 is not None:
            g1 = f1(v)
            d1 = g1 * self.d1
            if self.d2 is not None:
                d2 = f2(v) * (self.d1[:, None] * self.d1[None, :]) + g1 * self.d2
        return Jet(f0(v), d1, d2)

    def reciprocal(self) -> "Jet":
        return self.apply(lambda v: 1 / v, lambda v: -1 / v**2, lambda v: 2 / v**3)

    def exp(self) -> "Jet":
        return self.apply(np.exp, np.exp, np.exp)

    def log(self) -> "Jet":
        return self.apply(np.log, lambda v: 1 / v, lambda v: -1 / v**2)

    def sqrt(self) -> "Jet":
        return self.apply(np.sqrt, lambda v: 0.5 / np.sqrt(v), lambda v: -0.25 / v**1.5)

    def conj(self, perm: np.ndarray) -> "Jet":
        """Complex conjugate; ``perm`` is the variable swap s<->sbar, t<->tbar."""
        d1 = d2 = None
        if self.d1 is not None:
            d1 = np.conj(self.d1[perm])
        if self.d2 is not None:
            d2 = np.conj(self.d2[perm][:, perm])
        return Jet(np.conj(self.val), d1, d2)

    def shift(self, k: int) -> "Jet":
        """Jet of the derivative along variable ``k`` (one order lower)."""
        if self.d1 is None:
            raise ValueError("cannot differentiate an order-0 jet")
        return Jet(self.d1[k], self.d2[k] if self.d2 is not None else None, None)

    def mT(self) -> "Jet":
        return Jet(np.swapaxes(self.val, -1, -2),
                   None if self.d1 is None else np.swapaxes(self.d1, -1, -2),
                   None if self.d2 is None else np.swapaxes(self.d2, -1, -2))

    def __matmul__(self, other) -> "Jet":
        if not isinstance(other, Jet):
            c = np.asarray(other, dtype=complex)
            return Jet(self.val @ c, None if self.d1 is None else self.d1 @ c,
                       None if self.d2 is None else self.d2 @ c)
        a, b = self, other
        if a.d1 is None and b.d1 is not None:
            a = Jet.constant(a.val, b.n, b.order)
        if b.d1 is None and a.d1 is not None:
            b = Jet.constant(b.val, a.n, a.order)
        order = min(a.order, b.order)
        a, b = a.truncate(order), b.truncate(order)
        val = a.val @ b.val
        d1 = d2 = None
        if order >= 1:
            d1 = a.d1 @ b.val + a.val @ b.d1
        if order >= 2:
            cross = a.d1[:, None] @ b.d1[None, :]
            d2 = a.d2 @ b.val + cross + np.swapaxes(cross, 0, 1) + a.val @ b.d2
        return Jet(val, d1, d2)

    def __rmatmul__(self, other) -> "Jet":
        c = np.asarray(other, dtype=complex)
        return Jet(c @ self.val, None if self.d1 is None else c @ self.d1,
                   None if self.d2 is None else c @ self.d2)

    def __repr__(self) -> str:
        return f"Jet(shape={self.shape}, order={self.order})"


def stack(jets: Sequence[Jet], axis: int = -1) -> Jet:
    """Stack jets along a value axis (negative axes address value axes)."""
    if axis >= 0:
        raise ValueError("use a negative axis so derivative axes are untouched")
    order = min(j.order for j in jets)
    jets = [j.truncate(order) for j in jets]
    shape = np.broadcast_shapes(*[j.shape for j in jets])
    jets = [j.broadcast_to(shape) for j in jets]
    val = np.stack([j.val for j in jets], axis=axis)
    d1 = np.stack([j.d1 for j in jets], axis=axis) if order >= 1 else None
    d2 = np.stack([j.d2 for j in jets], axis=axis) if order >= 2 else None
    return Jet(val, d1, d2)


def right_solve(B: Jet, A: Jet, points=None) -> Jet:
    """``X = B A^{-1}`` for hermitian positive definite ``A`` with derivative propagation.

    Uses ``dX = (dB - X dA) A^{-1}`` and the analogous second-order rule; the
    inverse is never formed, every solve goes through the Cholesky factor.
    """
    order = min(A.order, B.order)
    A, B = A.truncate(order), B.truncate(order)
    L = cholesky_checked(A.val, points)
    X = right_solve_factored(L, B.val)
    d1 = d2 = None
    if order >= 1:
        rhs = B.d1 - X @ A.d1
        d1 = right_solve_factored(L, rhs)
    if order >= 2:
        cross = d1[:, None] @ A.d1[None, :]
        rhs2 = B.d2 - cross - np.swapaxes(cross, 0, 1) - X @ A.d2
        d2 = right_solve_factored(L, rhs2)
    return Jet(X, d1, d2)


def left_solve(A: Jet, B: Jet) -> Jet:
    """``X = A^{-1} B`` for a general invertible ``A`` (LU), order <= 2."""
    order = min(A.order, B.order)
    A, B = A.truncate(order), B.truncate(order)
    X = np.linalg.solve(A.val, B.val)
    d1 = d2 = None
    if order >= 1:
        d1 = np.linalg.solve(A.val, B.d1 - A.d1 @ X)
    if order >= 2:
        cross = A.d1[:, None] @ d1[None, :]
        d2 = np.linalg.solve(A.val, B.d2 - cross - np.swapaxes(cross, 0, 1) - A.d2 @ X)
    return Jet(X, d1, d2)


def right_solve_general(B: Jet, A: Jet) -> Jet:
    """``X = B A^{-1}`` for a general invertible ``A``."""
    return left_solve(A.mT(), B.mT()).mT()


class CoordinateJets:
    """Coordinate functions of a chart as jets on a batch of points."""

    def __init__(self, points: ChartPoints, order: int = 2):
        self.points = points
        self.m, self.r = points.m, points.r
        self.order = order
        n = nvars(self.m, self.r)
        self.n = n
        x = points.values()
        P = len(points)
        self._vars = []
        for k in range(n):
            d1 = np.zeros((n, P), dtype=complex)
            d1[k] = 1.0
            d2 = np.zeros((n, n, P), dtype=complex) if order >= 2 else None
            self._vars.append(Jet(x[:, k], d1 if order >= 1 else None, d2))
        m, r = self.m, self.r
        self.s = self._vars[:m]
        self.sbar = self._vars[m:2 * m]
        self.t = self._vars[2 * m:2 * m + r]
        self.tbar = self._vars[2 * m + r:]

    @property
    def npoints(self) -> int:
        return len(self.points)

    def var(self, k: int) -> Jet:
        return self._vars[k]

    def const(self, value) -> Jet:
        v = np.broadcast_to(np.asarray(value, dtype=complex), (self.npoints,) + np.shape(value))
        return Jet.constant(np.array(v), self.n, self.order)

    def zeros(self, shape=()) -> Jet:
        return Jet.constant(np.zeros((self.npoints,) + tuple(shape), dtype=complex), self.n, self.order)

    @property
    def perm(self) -> np.ndarray:
        return conjugation_permutation(self.m, self.r)


# -- evaluable matrices -------------------------------------------------------------

class ChartMatrix:
    """A matrix of functions on the chart total space, evaluable as jets.

    Subclasses implement :meth:`jet`.  ``max_order`` is the highest derivative
    order the representation can supply.
    """

    shape: tuple[int, int]
    m: int
    r: int
    max_order: int = 2

    @property
    def dims(self) -> tuple[int, int]:
        return (self.m, self.r)

    def jet(self, points: ChartPoints, order: int = 1) -> Jet:
        raise NotImplementedError

    def __call__(self, points: ChartPoints) -> np.ndarray:
        return self.jet(points, 0).val

    @property
    def is_poly(self) -> bool:
        return False

    def _check_order(self, order: int):
        if order > self.max_order:
            raise ValueError(f"derivatives of order {order} unavailable (max {self.max_order})")

    def _combine(self, other, op, shape):
        a, b = self, as_chart_matrix(other, self.m, self.r, self.shape)
        return FunctionMatrix(shape, self.dims, lambda pts, k: op(a.jet(pts, k), b.jet(pts, k)),
                              min(a.max_order, b.max_order))

    def __add__(self, other):
        return self._combine(other, lambda x, y: x + y, self.shape)

    def __sub__(self, other):
        return self._combine(other, lambda x, y: x - y, self.shape)

    def __neg__(self):
        return self.scale(-1)

    def scale(self, c: complex):
        a = self
        return FunctionMatrix(self.shape, self.dims, lambda pts, k: a.jet(pts, k) * c, self.max_order)

    def __matmul__(self, other):
        b = as_chart_matrix(other, self.m, self.r)
        a = self
        return FunctionMatrix((self.shape[0], b.shape[1]), self.dims,
                              lambda pts, k: a.jet(pts, k) @ b.jet(pts, k), min(a.max_order, b.max_order))

    def conjugate(self):
        a = self
        perm = conjugation_permutation(self.m, self.r)
        return FunctionMatrix(self.shape, self.dims, lambda pts, k: a.jet(pts, k).conj(perm), self.max_order)

    def transpose(self):
        a = self
        return FunctionMatrix(self.shape[::-1], self.dims, lambda pts, k: a.jet(pts, k).mT(), self.max_order)

    def derive(self, var: int) -> "ChartMatrix":
        """Matrix of Wirtinger derivatives along variable ``var``."""
        a = self

        def fn(pts, k):
            return a.jet(pts, k + 1).shift(var)

        return FunctionMatrix(self.shape, self.dims, fn, self.max_order - 1)

    def depends_on_numeric(self, slots, points: ChartPoints, tol: float = 1e-12) -> bool:
        j = self.jet(points, 1)
        return bool(np.max(np.abs(j.d1[list(slots)]), initial=0.0) > tol)


class PolyMatrix(ChartMatrix):
    """Matrix with exact :class:`WirtingerPoly` entries."""

    def __init__(self, entries: Sequence[Sequence[WirtingerPoly]], dims: tuple[int, int] | None = None):
        rows = [list(row) for row in entries]
        if dims is None:
            if not rows or not rows[0]:
                raise DimensionError("empty matrix needs explicit dims")
            dims = rows[0][0].dims
        self.m, self.r = dims
        ncols = len(rows[0]) if rows else 0
        if any(len(row) != ncols for row in rows):
            raise DimensionError("ragged matrix")
        for row in rows:
            for p in row:
                if p.dims != dims:
                    raise DimensionError(f"entry dims {p.dims} disagree with {dims}")
        self.entries = tuple(tuple(row) for row in rows)
        self.shape = (len(rows), ncols)

    @classmethod
    def zeros(cls, shape, dims) -> "PolyMatrix":
        z = WirtingerPoly.zero(*dims)
        return cls([[z] * shape[1] for _ in range(shape[0])], dims)

    @classmethod
    def identity(cls, size: int, dims) -> "PolyMatrix":
        m, r = dims
        return cls([[WirtingerPoly.constant(m, r, 1.0 if i == j else 0.0) for j in range(size)]
                    for i in range(size)], dims)

    @classmethod
    def constant(cls, mat, dims) -> "PolyMatrix":
        mat = np.atleast_2d(np.asarray(mat, dtype=complex))
        return cls([[WirtingerPoly.constant(*dims, v) for v in row] for row in mat], dims)

    @property
    def is_poly(self) -> bool:
        return True

    def __getitem__(self, ij) -> WirtingerPoly:
        i, j = ij
        return self.entries[i][j]

    def rows(self):
        return self.entries

    def map(self, fn) -> "PolyMatrix":
        return PolyMatrix([[fn(p) for p in row] for row in self.entries], self.dims)

    def jet(self, points: ChartPoints, order: int = 1) -> Jet:
        a, b = self.shape
        n = nvars(self.m, self.r)
        P = len(points)
        val = np.zeros((P, a, b), dtype=complex)
        d1 = np.zeros((n, P, a, b), dtype=complex) if order >= 1 else None
        d2 = np.zeros((n, n, P, a, b), dtype=complex) if order >= 2 else None
        for i, row in enumerate(self.entries):
            for j, p in enumerate(row):
                if p.is_zero():
                    continue
                pj = p.jet(points, order)
                val[:, i, j] = pj.val
                if d1 is not None:
                    d1[:, :, i, j] = pj.d1
                if d2 is not None:
                    d2[:, :, :, i, j] = pj.d2
        return Jet(val, d1, d2)

    def __eq__(self, other) -> bool:
        return isinstance(other, PolyMatrix) and self.dims == other.dims and self.entries == other.entries

    def __hash__(self) -> int:
        return hash(self.entries)

    def is_zero(self) -> bool:
        return all(p.is_zero() for row in self.entries for p in row)

    def __add__(self, other):
        if isinstance(other, PolyMatrix):
            _same_shape(self, other)
            return PolyMatrix([[p + q for p, q in zip(r1, r2)] for r1, r2 in zip(self.entries, other.entries)], self.dims)
        return super().__add__(other)

    def __sub__(self, other):
        if isinstance(other, PolyMatrix):
            _same_shape(self, other)
            return PolyMatrix([[p - q for p, q in zip(r1, r2)] for r1, r2 in zip(self.entries, other.entries)], self.dims)
        return super().__sub__(other)

    def scale(self, c) -> "PolyMatrix":
        return self.map(lambda p: p * c)

    def __neg__(self) -> "PolyMatrix":
        return self.map(lambda p: -p)

    def __matmul__(self, other):
        if isinstance(other, PolyMatrix):
            if self.shape[1] != other.shape[0]:
                raise DimensionError(f"cannot multiply {self.shape} by {other.shape}")
            z = WirtingerPoly.zero(*self.dims)
            out = []
            for i in range(self.shape[0]):
                row = []
                for j in range(other.shape[1]):
                    acc = z
                    for k in range(self.shape[1]):
                        acc = acc + self.entries[i][k] * other.entries[k][j]
                    row.append(acc)
                out.append(row)
            return PolyMatrix(out, self.dims)
        return super().__matmul__(other)

    def conjugate(self) -> "PolyMatrix":
        return self.map(lambda p: p.conjugate())

    def transpose(self) -> "PolyMatrix":
        return PolyMatrix([list(col) for col in zip(*self.entries)], self.dims) if self.shape[0] else self

    def derive(self, var) -> "PolyMatrix":
        return self.map(lambda p: p.derive(var))

    def depends_on(self, slots) -> bool:
        return any(p.depends_on(slots) for row in self.entries for p in row)

    def to_json(self) -> list:
        return [[p.to_json() for p in row] for row in self.entries]

    @classmethod
    def from_json(cls, data, dims) -> "PolyMatrix":
        return cls([[WirtingerPoly.from_json(*dims, p) for p in row] for row in data], dims)

    def __repr__(self) -> str:
        return "PolyMatrix(" + "; ".join(", ".join(repr(p) for p in row) for row in self.entries) + ")"


def _same_shape(a: ChartMatrix, b: ChartMatrix):
    if a.shape != b.shape or a.dims != b.dims:
        raise DimensionError(f"shape/dims mismatch {a.shape}{a.dims} vs {b.shape}{b.dims}")


class FunctionMatrix(ChartMatrix):
    """Matrix given by a jet-producing callable ``fn(points, order) -> Jet``."""

    def __init__(self, shape, dims, fn: Callable[[ChartPoints, int], Jet], max_order: int = 2,
                 label: str = ""):
        self.shape = tuple(shape)
        self.m, self.r = dims
        self._fn = fn
        self.max_order = max_order
        self.label = label

    def jet(self, points: ChartPoints, order: int = 1) -> Jet:
        self._check_order(order)
        j = self._fn(points, order)
        P = len(points)
        if j.shape != (P,) + self.shape:
            j = j.broadcast_to((P,) + self.shape)
        if j.order < order:
            raise ValueError(f"function supplied order {j.order}, requested {order}")
        return j.truncate(order)


class JetMatrixFunction(FunctionMatrix):
    """Matrix of analytic functions written against :class:`CoordinateJets`.

    ``fn(V)`` receives coordinate jets and returns a Jet of value shape
    ``(P,) + shape``, or a nested list of scalar jets.
    """

    def __init__(self, shape, dims, fn: Callable[[CoordinateJets], Jet | list], label: str = ""):
        self.user_fn = fn

        def wrapped(points, order):
            V = CoordinateJets(points, order)
            out = fn(V)
            if isinstance(out, Jet):
                return out
            rows = [stack([_as_jet(e, V) for e in row], axis=-1) for row in out]
            return stack(rows, axis=-2)

        super().__init__(shape, dims, wrapped, 2, label)


def _as_jet(e, V: CoordinateJets) -> Jet:
    if isinstance(e, Jet):
        return e.broadcast_to((V.npoints,)) if e.shape == () else e
    return V.const(e)


def as_chart_matrix(x, m: int, r: int, shape=None) -> ChartMatrix:
    if isinstance(x, ChartMatrix):
        return x
    arr = np.atleast_2d(np.asarray(x, dtype=complex))
    if shape is not None and arr.shape != tuple(shape):
        arr = np.broadcast_to(arr, shape)
    return PolyMatrix.constant(arr, (m, r))


def block_matrix(blocks: Sequence[Sequence[ChartMatrix]]) -> ChartMatrix:
    """Assemble a block matrix; exact when every block is polynomial."""
    rows = [list(row) for row in blocks]
    dims = rows[0][0].dims
    shape = (sum(row[0].shape[0] for row in rows), sum(b.shape[1] for b in rows[0]))
    if all(isinstance(b, PolyMatrix) for row in rows for b in row):
        entries = []
        for row in rows:
            for i in range(row[0].shape[0]):
                entries.append([p for b in row for p in b.entries[i]])
        return PolyMatrix(entries, dims)

    def fn(pts, order):
        js = [[b.jet(pts, order) for b in row] for row in rows]

        def cat(get):
            return np.concatenate([np.concatenate([get(j) for j in row], axis=-1) for row in js], axis=-2)

        return Jet(cat(lambda j: j.val),
                   cat(lambda j: j.d1) if order >= 1 else None,
                   cat(lambda j: j.d2) if order >= 2 else None)

    return FunctionMatrix(shape, dims, fn, min(b.max_order for row in rows for b in row))


def right_solve_matrix(B: ChartMatrix, A: ChartMatrix) -> ChartMatrix:
    """Evaluable ``B A^{-1}`` for hermitian positive definite ``A``."""
    def fn(pts, k):
        return right_solve(B.jet(pts, k), A.jet(pts, k), pts)

    return FunctionMatrix((B.shape[0], A.shape[1]), B.dims, fn, min(A.max_order, B.max_order))


def right_solve_general_matrix(B: ChartMatrix, A: ChartMatrix) -> ChartMatrix:
    """Evaluable ``B A^{-1}`` for a general invertible ``A``."""
    def fn(pts, k):
        return right_solve_general(B.jet(pts, k), A.jet(pts, k))

    return FunctionMatrix((B.shape[0], A.shape[1]), B.dims, fn, min(A.max_order, B.max_order))


def constant_value(M: ChartMatrix) -> np.ndarray | None:
    """Numeric value of a constant polynomial matrix, else ``None``."""
    if isinstance(M, PolyMatrix) and all(p.is_constant() for row in M.entries for p in row):
        return np.array([[p.constant_term() for p in row] for row in M.entries], dtype=complex).reshape(M.shape)
    return None
