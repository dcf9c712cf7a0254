import numpy as np
import pytest

from helpers import random_hermitian_pd, random_points
from nlhodge.bundles import FiberChart, HiggsChart, linear_rows
from nlhodge.conjugation import (
    RealFormSpec,
    adjoint_action,
    check_anti_involution,
    conjugate_higgs,
    conjugate_matrix,
    hermitian_adjoint_field,
    linear_parts,
)
from nlhodge.errors import ConjugationUnavailableError
from nlhodge.jets import JetMatrixFunction, PolyMatrix
from nlhodge.symcore import chart_vars


def test_identity_metric_gives_minus_adjoint():
    out = conjugate_matrix(np.array([[0, 1], [0, 0]]))
    np.testing.assert_array_equal(out, [[0, 0], [-1, 0]])
    c = FiberChart(1, 2)
    theta = HiggsChart.from_linear(c, [PolyMatrix.constant([[0, 1], [0, 0]], c.dims)])
    conj = conjugate_higgs(theta)
    assert conj.linear[0] == PolyMatrix.constant([[0, 0], [-1, 0]], c.dims)
    assert conj.polarity == "antiholomorphic"
    assert conjugate_higgs(conj).polarity == "holomorphic"


def test_rank_one_is_minus_complex_conjugate():
    c = FiberChart(1, 1)
    V = chart_vars(1, 1)
    phi = V.s[0] ** 2 + (1 + 2j) * V.s[0]
    theta = HiggsChart.from_linear(c, [PolyMatrix([[phi]], c.dims)])
    H = PolyMatrix([[1 + V.s[0] * V.sbar[0]]], c.dims)
    conj = conjugate_higgs(theta, H)
    assert conj.linear[0](random_points(1, 1, 1, np.random.default_rng(0))).shape == (1, 1, 1)
    pts = random_points(1, 1, 6, np.random.default_rng(1))
    np.testing.assert_allclose(conj.linear[0](pts)[:, 0, 0], -np.conj(phi.eval(pts)), atol=1e-13)


def test_double_conjugation_with_varying_metric():
    c = FiberChart(1, 2)
    V = chart_vars(1, 2)
    s, sb = V.s[0], V.sbar[0]
    H = PolyMatrix([[2 + s * sb, 0.5 * s], [0.5 * sb, 1 + 0 * s]], c.dims)
    Theta = PolyMatrix([[s, 1 + 0 * s], [s * s, -s]], c.dims)
    theta = HiggsChart.from_linear(c, [Theta])
    pts = random_points(1, 2, 10, np.random.default_rng(2))
    assert check_anti_involution(RealFormSpec(), theta, pts, H=H) < 1e-12


def test_adjoint_action_numeric_agreement():
    rng = np.random.default_rng(3)
    H0 = random_hermitian_pd(3, rng)
    M0 = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
    d = (1, 3)
    out = adjoint_action(PolyMatrix.constant(M0, d), PolyMatrix.constant(H0, d))
    np.testing.assert_allclose(out(random_points(1, 3, 1, rng))[0], np.linalg.solve(H0, M0.conj().T @ H0), atol=1e-12)
    np.testing.assert_allclose(conjugate_matrix(M0, H0), -np.linalg.solve(H0, M0.conj().T @ H0), atol=1e-12)


def test_conjugation_of_nonlinear_field_needs_custom_form():
    c = FiberChart(1, 1)
    V = chart_vars(1, 1)
    theta = HiggsChart(c, PolyMatrix([[V.t[0] ** 2]], c.dims), holomorphic=True)
    with pytest.raises(ConjugationUnavailableError, match="conjugation undefined: supply custom real form"):
        conjugate_higgs(theta)


def test_linear_parts_from_function_data():
    c = FiberChart(1, 2)
    mats = [[0.5, 1j], [2.0, -1.0]]

    def fn(V):
        t1, t2 = V.t
        s = V.s[0]
        return [[t1 * 0.5 * s.exp() + t2 * 2.0, t1 * 1j - t2]]

    theta = HiggsChart(c, JetMatrixFunction((1, 2), c.dims, fn))
    parts = linear_parts(theta)
    pts = random_points(1, 2, 4, np.random.default_rng(4))
    expected = np.array(mats, dtype=complex)[None].repeat(4, 0)
    expected[:, 0, 0] *= np.exp(pts.s[:, 0])
    np.testing.assert_allclose(parts[0](pts), expected, atol=1e-12)

    bad = HiggsChart(c, JetMatrixFunction((1, 2), c.dims, lambda V: [[V.t[0] * V.t[0], V.t[1]]]))
    with pytest.raises(ConjugationUnavailableError):
        linear_parts(bad)


def _custom_spec(g: np.ndarray) -> RealFormSpec:
    """Real form ``theta -> -g^{-1} theta^* g`` for a fixed constant hermitian ``g``."""
    def conj(theta):
        d = theta.chart.dims
        mats = tuple(adjoint_action(M, PolyMatrix.constant(g, d)).scale(-1) for M in theta.linear)
        pol = "antiholomorphic" if theta.polarity == "holomorphic" else "holomorphic"
        return HiggsChart(theta.chart, linear_rows(theta.chart, mats), False, pol, mats)
    return RealFormSpec("custom", conj)


def test_custom_real_forms_and_torsor_relation():
    """Two real forms differ by the linear automorphism ``c2 o c1``, independent of ``theta``."""
    rng = np.random.default_rng(5)
    c = FiberChart(1, 2)
    g1, g2 = random_hermitian_pd(2, rng), random_hermitian_pd(2, rng)
    s1, s2 = _custom_spec(g1), _custom_spec(g2)
    pts = random_points(1, 2, 4, rng)
    K = np.linalg.solve(g2, g1)  # c2(c1(X)) = g2^-1 g1 X g1^-1 g2
    for _ in range(5):
        X = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
        theta = HiggsChart.from_linear(c, [PolyMatrix.constant(X, c.dims)])
        assert check_anti_involution(s1, theta, pts) < 1e-12
        twice = conjugate_higgs(conjugate_higgs(theta, spec=s1), spec=s2)
        np.testing.assert_allclose(twice.linear[0](pts[:1])[0], K @ X @ np.linalg.inv(K), atol=1e-12)


def test_non_involutive_map_is_detected():
    def conj(theta):
        mats = tuple(M.conjugate().transpose().scale(-2) for M in theta.linear)
        return HiggsChart(theta.chart, linear_rows(theta.chart, mats), False, theta.polarity, mats)
    c = FiberChart(1, 1)
    theta = HiggsChart.from_linear(c, [PolyMatrix.constant([[1.0]], c.dims)])
    assert check_anti_involution(RealFormSpec("custom", conj), theta, random_points(1, 1, 2, np.random.default_rng(0))) > 1


def test_hermitian_adjoint_field_is_minus_conjugate():
    c = FiberChart(1, 2)
    X = PolyMatrix.constant([[1, 2j], [0, 3]], c.dims)
    theta = HiggsChart.from_linear(c, [X])
    H = PolyMatrix.constant([[2, 0], [0, 1]], c.dims)
    pts = random_points(1, 2, 3, np.random.default_rng(6))
    np.testing.assert_allclose(hermitian_adjoint_field(theta, H).Theta(pts),
                               -conjugate_higgs(theta, H).Theta(pts), atol=1e-14)


def test_unknown_mode_rejected():
    with pytest.raises(ValueError):
        RealFormSpec("other")
    with pytest.raises(ValueError):
        RealFormSpec("custom")
