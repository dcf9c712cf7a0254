import numpy as np
import pytest

from helpers import random_pd_metric, random_points
from nlhodge.bundles import ConnectionChart, FiberChart
from nlhodge.chern import (
    MetricChart,
    chern_connection,
    classical_chern,
    closedness_residuals,
    metric_from_linear_hermitian,
    orthogonality_residual,
    potential_two_form,
    projective_fs_connection,
)
from nlhodge.curvature import Grid
from nlhodge.errors import MetricDegenerateError
from nlhodge.jets import JetMatrixFunction, PolyMatrix
from nlhodge.symcore import ChartPoints, WirtingerPoly, chart_vars


def test_constant_metric_has_zero_connection():
    c = FiberChart(2, 2)
    omega = MetricChart(c, PolyMatrix.constant([[2.0, 0.5j], [-0.5j, 1.0]], c.dims), PolyMatrix.zeros((2, 2), c.dims))
    assert chern_connection(omega).C.is_zero()


def test_identity_metric_blocks():
    c = FiberChart(1, 2)
    omega = metric_from_linear_hermitian(PolyMatrix.identity(2, c.dims), c)
    assert omega.A == PolyMatrix.identity(2, c.dims)
    assert omega.B.is_zero() and omega.G.is_zero()


def test_diagonal_example_matches_closed_form():
    c = FiberChart(1, 2)
    V = chart_vars(1, 2)
    s, sb = V.s[0], V.sbar[0]
    zero, one = WirtingerPoly.zero(1, 2), WirtingerPoly.constant(1, 2, 1)
    h = PolyMatrix([[1 + s * sb, zero], [zero, one]], c.dims)
    conn = chern_connection(metric_from_linear_hermitian(h, c))
    pts = random_points(1, 2, 7, np.random.default_rng(0))
    expected = np.stack([np.conj(pts.s[:, 0]) * pts.t[:, 0] / (1 + np.abs(pts.s[:, 0]) ** 2),
                         np.zeros(len(pts))], axis=-1)[:, None, :]
    np.testing.assert_allclose(conn.C(pts), expected, atol=1e-14)


@pytest.mark.parametrize("seed", range(5))
def test_orthogonality_and_classical_oracle(seed):
    rng = np.random.default_rng(seed)
    m, r = 1 + seed % 2, 1 + seed % 3
    c = FiberChart(m, r)
    h = random_pd_metric(m, r, rng)
    omega = metric_from_linear_hermitian(h, c)
    conn = chern_connection(omega)
    pts = random_points(m, r, 25, rng)
    assert np.max(np.abs(orthogonality_residual(conn, omega, pts))) < 1e-10
    assert np.max(np.abs(conn.C(pts) - classical_chern(h, pts))) < 1e-10


def test_connection_is_unique_orthogonal_choice():
    rng = np.random.default_rng(7)
    c = FiberChart(1, 2)
    omega = metric_from_linear_hermitian(random_pd_metric(1, 2, rng), c)
    conn = chern_connection(omega)
    pts = random_points(1, 2, 10, rng)
    V = chart_vars(1, 2)
    delta = PolyMatrix([[1e-3 * V.t[1], 2e-3 * V.s[0]]], c.dims)
    other = ConnectionChart(c, conn.C + delta)
    res = orthogonality_residual(other, omega, pts)
    np.testing.assert_allclose(res, delta(pts) @ omega.A(pts), atol=1e-12)
    assert np.max(np.abs(res)) > 1e-4


def test_analytic_metric_matches_classical():
    c = FiberChart(1, 2)

    def fn(V):
        s, sb = V.s[0], V.sbar[0]
        return [[(s + sb).exp() + 1.0, s * 0.3], [sb * 0.3, (s * sb + 2.0)]]

    h = JetMatrixFunction((2, 2), c.dims, fn)
    omega = metric_from_linear_hermitian(h, c)
    pts = random_points(1, 2, 25, np.random.default_rng(3), radius=0.5)
    conn = chern_connection(omega)
    assert np.max(np.abs(conn.C(pts) - classical_chern(h, pts))) < 1e-10
    assert np.max(np.abs(orthogonality_residual(conn, omega, pts))) < 1e-10


def test_two_form_is_closed_and_matches_potential():
    rng = np.random.default_rng(11)
    for m, r in ((1, 2), (2, 2), (2, 1)):
        c = FiberChart(m, r)
        h = random_pd_metric(m, r, rng)
        omega = metric_from_linear_hermitian(h, c)
        assert closedness_residuals(omega) == []
        assert omega.full_matrix() == potential_two_form(h, c)


def test_non_closed_form_is_detected():
    c = FiberChart(1, 1)
    V = chart_vars(1, 1)
    omega = MetricChart(c, PolyMatrix([[1 + V.s[0] * V.sbar[0]]], c.dims),
                        PolyMatrix.zeros((1, 1), c.dims), PolyMatrix.zeros((1, 1), c.dims))
    assert closedness_residuals(omega)


def test_pairing_recovers_fiber_block():
    rng = np.random.default_rng(2)
    c = FiberChart(1, 2)
    omega = metric_from_linear_hermitian(random_pd_metric(1, 2, rng), c)
    pts = random_points(1, 2, 3, rng)
    e = np.zeros((3, 3), complex)
    e[:, 1] = 1
    f = np.zeros((3, 3), complex)
    f[:, 2] = 1
    np.testing.assert_allclose(omega.pair(e, f, pts), omega.A(pts)[:, 0, 1], atol=1e-14)


def test_metric_rejects_fiber_dependence_and_degeneracy():
    c = FiberChart(1, 1)
    V = chart_vars(1, 1)
    with pytest.raises(ValueError):
        metric_from_linear_hermitian(PolyMatrix([[1 + V.t[0] * V.tbar[0]]], c.dims), c)
    with pytest.raises(MetricDegenerateError, match="metric degenerate on fiber directions at s="):
        metric_from_linear_hermitian(PolyMatrix([[V.s[0] * V.sbar[0] - 0.1]], c.dims), c)


def _fs_points(n=5):
    return Grid.polydisc(1, 1, 0.0, 1.0, n, n).points


def test_fubini_study_identity_metric_is_flat():
    h = PolyMatrix.identity(2, (1, 1))
    fs = projective_fs_connection(h)
    pts = _fs_points()
    assert np.max(np.abs(fs.chern(pts))) < 1e-14
    assert np.max(np.abs(fs.quadratic(pts))) < 1e-14


def test_fubini_study_exponential_example():
    def fn(V):
        return [[(V.s[0] + V.sbar[0]).exp(), 0.0], [0.0, 1.0]]
    h = JetMatrixFunction((2, 2), (1, 1), fn)
    fs = projective_fs_connection(h)
    pt = ChartPoints([[0.0]], [[1.0]])
    assert abs(fs.chern(pt)[0, 0, 0] - 1.0) < 1e-10
    assert abs(fs.quadratic(pt)[0, 0, 0] - 1.0) < 1e-10


def test_fubini_study_sign_of_displayed_ratio():
    """The Chern coefficient is ``+omega12 / omega11``; the negated ratio is minus the quadratic."""
    rng = np.random.default_rng(5)
    h = random_pd_metric(1, 2, rng)
    h11 = PolyMatrix([[WirtingerPoly(1, 1, {e[:2] + (0, 0): c for e, c in p.items()}) for p in row]
                      for row in h.entries], (1, 1))
    fs = projective_fs_connection(h11)
    pts = _fs_points()
    ratio = fs.omega12(pts) / fs.omega11(pts)
    np.testing.assert_allclose(ratio, fs.quadratic(pts), atol=1e-10)
    assert np.max(np.abs(-ratio - fs.quadratic(pts))) > 1e-3
