"""Random data generators and independent oracles shared by the tests."""
from __future__ import annotations

import numpy as np

from nlhodge.bundles import FiberChart
from nlhodge.jets import PolyMatrix
from nlhodge.symcore import ChartPoints, WirtingerPoly


def base_slots(m: int) -> list[int]:
    return list(range(2 * m))


def random_pd_metric(m: int, r: int, rng: np.random.Generator, degree: int = 2, shift: float = 1.0) -> PolyMatrix:
    """``shift * I + P P^*`` with ``P`` of degree ``<= degree // 2`` in ``s``: positive definite, degree <= 2."""
    half = max(degree // 2, 0)
    P = [[0.4 * WirtingerPoly.random(m, r, half, 3, rng, slots=list(range(m)), integer=False)
          for _ in range(r)] for _ in range(r)]
    entries = []
    for k in range(r):
        row = []
        for l in range(r):
            acc = WirtingerPoly.constant(m, r, shift if k == l else 0.0)
            for j in range(r):
                acc = acc + P[k][j] * P[l][j].conjugate()
            row.append(acc)
        entries.append(row)
    return PolyMatrix(entries, (m, r))


def random_points(m: int, r: int, count: int, rng: np.random.Generator, radius: float = 0.7) -> ChartPoints:
    def draw(k):
        return radius * (rng.uniform(-1, 1, (count, k)) + 1j * rng.uniform(-1, 1, (count, k))) / np.sqrt(2)
    return ChartPoints(draw(m), draw(r))


def random_base_matrix(m: int, r: int, rng: np.random.Generator, degree: int = 1,
                       holomorphic: bool = True) -> PolyMatrix:
    """``r x r`` matrix of polynomials in the base variables only."""
    slots = list(range(m)) if holomorphic else base_slots(m)
    return PolyMatrix([[WirtingerPoly.random(m, r, degree, 2, rng, slots=slots, integer=False)
                        for _ in range(r)] for _ in range(r)], (m, r))


def random_unitary(r: int, rng: np.random.Generator) -> np.ndarray:
    Z = rng.normal(size=(r, r)) + 1j * rng.normal(size=(r, r))
    Q, R = np.linalg.qr(Z)
    return Q * (np.diag(R) / np.abs(np.diag(R)))


def random_hermitian_pd(r: int, rng: np.random.Generator) -> np.ndarray:
    Z = rng.normal(size=(r, r)) + 1j * rng.normal(size=(r, r))
    return Z @ Z.conj().T + r * np.eye(r)


def fd_wirtinger(f, z: complex, h: float = 1e-5) -> tuple[complex, complex]:
    """Central-difference ``(df/dz, df/dzbar)`` of a function of one complex variable."""
    fx = (f(z + h) - f(z - h)) / (2 * h)
    fy = (f(z + 1j * h) - f(z - 1j * h)) / (2 * h)
    return 0.5 * (fx - 1j * fy), 0.5 * (fx + 1j * fy)


def chart(m: int, r: int) -> FiberChart:
    return FiberChart(m, r)
