import numpy as np
import pytest
import sympy as sp

from helpers import random_pd_metric, random_points
from nlhodge.bundles import ConnectionChart, DBarChart, FiberChart, HiggsChart, canonical_dbar
from nlhodge.chern import MetricChart, chern_connection, metric_from_linear_hermitian
from nlhodge.curvature import (
    Grid,
    HarmonicScenario,
    assemble_F,
    assemble_G,
    curvature_F02,
    curvature_F11,
    curvature_F20,
    is_harmonic,
)
from nlhodge.errors import LiftingConditionError
from nlhodge.jets import JetMatrixFunction, PolyMatrix
from nlhodge.rank1 import PeriodScenario, ks_metric
from nlhodge.simpson import higgs_to_flat
from nlhodge.symcore import WirtingerPoly, chart_vars, lie_bracket


def _grid(m, r, n=3, nf=2, center=0.0, radius=0.8):
    return Grid.polydisc(m, r, center, radius, n, nf)


def test_grid_layout():
    g = Grid.polydisc(1, 2, 2j, 0.5, 5, 3)
    assert len(g) == 25 * 9 and g.base_points.shape == (25, 1)
    assert np.max(np.abs(g.base_points - 2j)) <= 0.5 + 1e-12
    assert np.array_equal(np.bincount(g.base_index), np.full(25, 9))


def test_F02_examples():
    g1 = _grid(1, 2)
    V = chart_vars(1, 2)
    d = DBarChart(FiberChart(1, 2), PolyMatrix([[V.sbar[0] * V.t[0], V.t[1] ** 2]], (1, 2)))
    assert np.all(curvature_F02(d, g1) == 0)
    g2 = _grid(2, 1)
    assert np.all(curvature_F02(canonical_dbar(FiberChart(2, 1)), g2) == 0)
    V2 = chart_vars(2, 1)
    U = PolyMatrix([[WirtingerPoly.zero(2, 1)], [V2.sbar[0] * V2.t[0]]], (2, 1))
    vals = curvature_F02(DBarChart(FiberChart(2, 1), U), g2)
    np.testing.assert_allclose(vals[:, 0, 1, 0], g2.points.t[:, 0], atol=1e-14)
    np.testing.assert_allclose(vals[:, 1, 0, 0], -g2.points.t[:, 0], atol=1e-14)


def test_F02_requires_lifting_condition():
    V = chart_vars(2, 1)
    U = PolyMatrix([[V.tbar[0]], [WirtingerPoly.zero(2, 1)]], (2, 1))
    with pytest.raises(LiftingConditionError):
        curvature_F02(DBarChart(FiberChart(2, 1), U), _grid(2, 1))


def test_F11_examples():
    c = FiberChart(1, 1)
    V = chart_vars(1, 1)
    g = _grid(1, 1)
    hol = ConnectionChart(c, PolyMatrix([[V.s[0] ** 2 * V.t[0] + V.t[0] ** 3]], c.dims))
    assert np.all(curvature_F11(hol, g) == 0)
    vals = curvature_F11(ConnectionChart(c, PolyMatrix([[V.sbar[0] * V.t[0]]], c.dims)), g)
    np.testing.assert_allclose(vals[:, 0, 0, 0], -g.points.t[:, 0], atol=1e-14)
    flat = chern_connection(metric_from_linear_hermitian(PolyMatrix.identity(1, c.dims), c))
    assert np.all(curvature_F11(flat, g) == 0)


def test_F20_examples():
    V = chart_vars(2, 1)
    t = V.t[0]
    g = _grid(2, 1)
    vals = curvature_F20(ConnectionChart(FiberChart(2, 1), PolyMatrix([[t], [t**2]], (2, 1))), g)
    np.testing.assert_allclose(vals[:, 0, 1, 0], g.points.t[:, 0] ** 2, atol=1e-14)
    const = ConnectionChart(FiberChart(2, 1), PolyMatrix.constant([[1.0], [2j]], (2, 1)))
    assert np.all(curvature_F20(const, g) == 0)
    V1 = chart_vars(1, 1)
    one = ConnectionChart(FiberChart(1, 1), PolyMatrix([[V1.t[0] ** 2 * V1.s[0]]], (1, 1)))
    assert np.all(curvature_F20(one, _grid(1, 1)) == 0)


@pytest.mark.parametrize("seed", range(4))
def test_jet_path_matches_symbolic_brackets(seed):
    """Curvature arrays agree with Lie brackets of the symbolic lifts."""
    rng = np.random.default_rng(seed)
    m, r = 2, 1 + seed % 2
    c = FiberChart(m, r)
    no_tbar = list(range(2 * m + r))
    C = PolyMatrix([[WirtingerPoly.random(m, r, 2, 3, rng, slots=no_tbar, integer=False) for _ in range(r)]
                    for _ in range(m)], c.dims)
    U = PolyMatrix([[WirtingerPoly.random(m, r, 2, 3, rng, slots=no_tbar, integer=False) for _ in range(r)]
                    for _ in range(m)], c.dims)
    conn, d = ConnectionChart(c, C), DBarChart(c, U)
    g = _grid(m, r, 2, 2)
    pts = g.points
    X = [conn.lift(i) for i in range(m)]
    Y = [d.lift(i) for i in range(m)]
    tslots = [c.t_slot(k) for k in range(r)]
    for vals, fields_a, fields_b in ((curvature_F02(d, g), Y, Y), (curvature_F11(conn, g, d), X, Y),
                                     (curvature_F20(conn, g), X, X)):
        for i in range(m):
            for j in range(m):
                br = lie_bracket(fields_a[i], fields_b[j]).eval(pts)[:, tslots]
                np.testing.assert_allclose(vals[:, i, j], br, atol=1e-10)


def _rank1_scenario(h_fn):
    c = FiberChart(1, 1)
    h = JetMatrixFunction((1, 1), c.dims, lambda V: [[h_fn(V)]])
    theta = HiggsChart.from_linear(c, [PolyMatrix.constant([[1.0]], c.dims)])
    return c, theta, metric_from_linear_hermitian(h, c)


def test_rank_one_positive_control():
    c, theta, omega = _rank1_scenario(lambda V: (V.s[0] + V.sbar[0]).exp())
    rep = assemble_F(theta, omega, grid=Grid.polydisc(1, 1, 0.0, 0.5, 5, 3))
    assert rep.verdict and max(rep.sup_norms().values()) < 1e-9
    assert rep.witness() is None


def test_rank_one_oracle_curvature():
    """For rank one ``F11 = -t d dbar log h``; with ``h = 1 + |s|^2`` this is ``-t / (1 + |s|^2)^2``."""
    c, theta, omega = _rank1_scenario(lambda V: V.s[0] * V.sbar[0] + 1.0)
    g = Grid.polydisc(1, 1, 0.0, 1.0, 5, 3)
    d, conn = higgs_to_flat(theta, omega)
    vals = curvature_F11(conn, g, d)[:, 0, 0, 0]
    s, t = g.points.s[:, 0], g.points.t[:, 0]
    np.testing.assert_allclose(vals, -t / (1 + np.abs(s) ** 2) ** 2, atol=1e-13)
    rep = assemble_F(theta, omega, grid=g)
    assert not rep.verdict and rep.witness()[0] == "1,1"


def test_perturbed_metric_is_not_harmonic():
    def h(V):
        s, sb = V.s[0], V.sbar[0]
        return (s + sb).exp() * (s * sb * 0.1 + 1.0)
    c, theta, omega = _rank1_scenario(h)
    v = is_harmonic(HarmonicScenario(omega, theta=theta, grid=Grid.polydisc(1, 1, 0.0, 0.5, 5, 3)))
    assert not v.harmonic
    name, entry = v.report.witness()
    assert name == "1,1" and entry.sup > 1e-3
    assert set(entry.worst_point) == {"s", "t", "value"}


def test_trivial_product_is_harmonic():
    c = FiberChart(2, 2)
    omega = metric_from_linear_hermitian(PolyMatrix.identity(2, c.dims), c)
    theta = HiggsChart.from_linear(c, [PolyMatrix.zeros((2, 2), c.dims)] * 2)
    v = is_harmonic(HarmonicScenario(omega, theta=theta, grid=_grid(2, 2, 2, 2)))
    assert v.harmonic and all(a["ok"] for a in v.allowability.values())


def test_flat_side_of_chern_connection():
    rng = np.random.default_rng(3)
    c = FiberChart(2, 1)
    omega = metric_from_linear_hermitian(random_pd_metric(2, 1, rng), c)
    V = chart_vars(2, 1)
    U = PolyMatrix([[WirtingerPoly.zero(2, 1)], [V.sbar[0] * V.t[0]]], c.dims)
    dbar = DBarChart(c, U)
    g = _grid(2, 1, 2, 2)
    rep = assemble_G(chern_connection(omega, dbar), dbar, omega, grid=g)
    assert rep.entries["1,1"].sup < 1e-12 and rep.entries["2,0"].sup < 1e-12
    assert abs(rep.entries["0,2"].sup - np.max(np.linalg.norm(curvature_F02(dbar, g), axis=-1))) < 1e-12


def test_flat_side_of_uniformizing_system():
    p = PeriodScenario.from_coefficients([0, 1])
    g = p.grid(5, 3)
    theta, omega = ks_metric(p, grid=g)
    d, conn = higgs_to_flat(theta, omega, points=g.points[:16])
    rep = assemble_G(conn, d, omega, grid=g, tol=1e-8)
    assert rep.verdict, rep.sup_norms()
    assert rep.entries["0,2"].sup == 0 and rep.entries["2,0"].sup == 0


def test_vertical_holomorphy_failure_is_reported():
    c = FiberChart(1, 1)
    V = chart_vars(1, 1)
    omega = MetricChart(c, PolyMatrix.constant([[1.0]], c.dims), PolyMatrix([[V.tbar[0] * V.tbar[0]]], c.dims))
    v = is_harmonic(HarmonicScenario(omega, theta=HiggsChart.from_linear(c, [PolyMatrix.constant([[1.0]], c.dims)]),
                                     grid=_grid(1, 1)))
    assert not v.harmonic and v.report is None
    assert not v.allowability["chern_vertical_holomorphic"]["ok"]


# -- independent symbolic Hitchin-type oracle ---------------------------------------------

def _hitchin_residual(H, Theta, s, sb, simplify=True):
    """``R = d_s Q - d_sbar P + P Q - Q P`` with ``P = dH H^-1 + 2 Theta`` and ``Q = H^-1 Theta^* H``.

    Rows act on ``t``, so the (1,1) curvature is ``t R``.
    """
    Hinv = H.inv()
    star = Theta.subs({s: sp.Symbol("_w")}).applyfunc(sp.conjugate).T.subs(
        {sp.conjugate(sp.Symbol("_w")): sb})
    P = H.diff(s) * Hinv + 2 * Theta
    Q = Hinv * star * H
    R = Q.diff(s) - P.diff(sb) + P * Q - Q * P
    return R.applyfunc(sp.simplify) if simplify else R


def test_symbolic_oracle_uniformizing_metric():
    s, sb = sp.symbols("s sb")
    y = (s - sb) / (2 * sp.I)
    Theta = sp.Matrix([[0, 1], [0, 0]])
    assert _hitchin_residual(sp.diag(1 / (2 * y), 2 * 2 * y), Theta, s, sb) == sp.zeros(2, 2)
    assert _hitchin_residual(sp.diag(1 / (2 * y), 2 * y), Theta, s, sb) != sp.zeros(2, 2)


@pytest.mark.parametrize("factor", [1.0, 2.0, 3.0])
def test_jet_F11_matches_symbolic_oracle(factor):
    s, sb = sp.symbols("s sb")
    y = (s - sb) / (2 * sp.I)
    R = _hitchin_residual(sp.diag(1 / (2 * y), 2 * sp.nsimplify(factor) * y), sp.Matrix([[0, 1], [0, 0]]), s, sb)
    fn = sp.lambdify((s, sb), R, "numpy")
    p = PeriodScenario.from_coefficients([0, 1])
    g = p.grid(4, 2)
    theta, omega = ks_metric(p, factor, grid=g)
    d, conn = higgs_to_flat(theta, omega, points=g.points[:8])
    ours = curvature_F11(conn, g, d)[:, 0, 0, :]
    pts = g.points
    expected = np.stack([pts.t[k] @ np.array(fn(z, np.conj(z)), dtype=complex)
                         for k, z in enumerate(pts.s[:, 0])])
    np.testing.assert_allclose(ours, expected, atol=1e-12)


def test_jet_F11_matches_symbolic_oracle_for_random_metric():
    rng = np.random.default_rng(9)
    c = FiberChart(1, 2)
    h = random_pd_metric(1, 2, rng)
    Theta0 = np.array([[0.3, 1.0 - 0.5j], [0.2j, -0.3]])
    s, sb = sp.symbols("s sb")

    def to_sym(p):
        return sum(complex(cf) * s ** e[0] * sb ** e[1] for e, cf in p.items())

    Hs = sp.Matrix(2, 2, lambda i, j: to_sym(h[i, j]))
    R = _hitchin_residual(Hs, sp.Matrix(Theta0) * s, s, sb, simplify=False)
    fn = sp.lambdify((s, sb), R, "numpy")
    V = chart_vars(1, 2)
    theta = HiggsChart.from_linear(c, [PolyMatrix([[complex(x) * V.s[0] for x in row] for row in Theta0], c.dims)])
    omega = metric_from_linear_hermitian(h, c)
    d, conn = higgs_to_flat(theta, omega)
    pts = random_points(1, 2, 6, rng)
    g = Grid.from_points(pts)
    ours = curvature_F11(conn, g, d)[:, 0, 0, :]
    expected = np.stack([pts.t[k] @ np.array(fn(z, np.conj(z)), dtype=complex)
                         for k, z in enumerate(pts.s[:, 0])])
    np.testing.assert_allclose(ours, expected, atol=1e-10)
