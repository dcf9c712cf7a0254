import numpy as np
import pytest

from helpers import random_points
from nlhodge.bundles import (
    ConnectionChart,
    DBarChart,
    FiberChart,
    HiggsChart,
    apply_coordinate_change,
    canonical_dbar,
    dbar_to_acs,
    is_flat_connection,
    is_higgs_integrable,
    is_holomorphic_vertical,
    is_integrable_acs,
    pullback_higgs,
    sample_points,
)
from nlhodge.errors import DimensionError, IntegrabilityUndefinedError, SingularFrameError
from nlhodge.jets import JetMatrixFunction, PolyMatrix
from nlhodge.symcore import VectorFieldChart, WirtingerPoly, chart_vars, lie_bracket


def test_chart_requires_positive_dims():
    with pytest.raises(DimensionError):
        FiberChart(0, 1)


@pytest.mark.parametrize("m,r", [(1, 1), (2, 3)])
def test_canonical_dbar_is_zero(m, r):
    d = canonical_dbar(FiberChart(m, r))
    assert d.U.shape == (m, r) and d.U.is_zero()
    assert is_integrable_acs(dbar_to_acs(d))


def test_block_shape_is_checked():
    with pytest.raises(DimensionError):
        DBarChart(FiberChart(1, 2), PolyMatrix.zeros((2, 2), (1, 2)))


def test_acs_generators():
    c = FiberChart(1, 1)
    V = chart_vars(1, 1)
    acs = dbar_to_acs(DBarChart(c, PolyMatrix([[V.s[0]]], c.dims)))
    expected = [VectorFieldChart.basis(1, 1, "tbar1"),
                VectorFieldChart.from_dict(1, 1, {"sbar1": 1, "t1": V.s[0]})]
    assert list(acs.generators) == expected
    pts = sample_points(c, 5)
    assert np.all(acs.rank(pts) == 2 * (c.m + c.r))


def test_one_dimensional_base_is_always_integrable():
    c = FiberChart(1, 2)
    V = chart_vars(1, 2)
    U = PolyMatrix([[V.s[0] * V.sbar[0] * V.t[1], V.t[0] ** 2]], c.dims)
    assert is_integrable_acs(dbar_to_acs(DBarChart(c, U)))


def test_non_integrable_witness():
    c = FiberChart(2, 1)
    V = chart_vars(2, 1)
    U = PolyMatrix([[WirtingerPoly.zero(2, 1)], [V.sbar[0] * V.t[0]]], c.dims)
    v = is_integrable_acs(dbar_to_acs(DBarChart(c, U)))
    assert not v
    assert v.witness["residual"] == VectorFieldChart.from_dict(2, 1, {"t1": V.t[0]})
    assert "s" in v.witness and "t" in v.witness


def test_higgs_integrability():
    V1 = chart_vars(1, 1)
    one = HiggsChart(FiberChart(1, 1), PolyMatrix([[V1.t[0] ** 3]], (1, 1)), holomorphic=True)
    assert is_higgs_integrable(one)
    c = FiberChart(2, 1)
    V = chart_vars(2, 1)
    t = V.t[0]
    ok = HiggsChart(c, PolyMatrix([[t], [3 * t]], c.dims), holomorphic=True)
    assert is_higgs_integrable(ok)
    bad = HiggsChart(c, PolyMatrix([[t], [t**2]], c.dims), holomorphic=True)
    v = is_higgs_integrable(bad)
    assert not v
    assert v.witness["residual"] == VectorFieldChart.from_dict(2, 1, {"t1": t**2})
    with pytest.raises(IntegrabilityUndefinedError, match="integrability undefined for almost Higgs fields"):
        is_higgs_integrable(HiggsChart(c, PolyMatrix([[t], [t**2]], c.dims)))


def test_holomorphic_flag_rejects_barred_coefficients():
    c = FiberChart(1, 1)
    V = chart_vars(1, 1)
    with pytest.raises(ValueError):
        HiggsChart(c, PolyMatrix([[V.sbar[0]]], c.dims), holomorphic=True)


def test_vertical_holomorphy():
    c = FiberChart(1, 1)
    V = chart_vars(1, 1)
    good = ConnectionChart(c, PolyMatrix([[V.sbar[0] * V.t[0]]], c.dims))
    assert is_holomorphic_vertical(good)
    assert not is_holomorphic_vertical(ConnectionChart(c, PolyMatrix([[V.tbar[0]]], c.dims)))
    # [dbar_t, lift] has no dt component, hence lies in Tbar_rel
    br = lie_bracket(VectorFieldChart.basis(1, 1, "tbar1"), good.lift(0))
    vals = br.eval(sample_points(c, 5, seed=2))
    assert np.max(np.abs(vals[:, c.t_slot(0)])) < 1e-10
    numeric = ConnectionChart(c, JetMatrixFunction((1, 1), c.dims, lambda J: [[J.sbar[0] * J.t[0]]]))
    assert is_holomorphic_vertical(numeric)
    numeric_bad = ConnectionChart(c, JetMatrixFunction((1, 1), c.dims, lambda J: [[J.tbar[0].exp()]]))
    assert not is_holomorphic_vertical(numeric_bad)


def test_coordinate_change_examples():
    c = FiberChart(1, 1)
    V = chart_vars(1, 1)
    conn = ConnectionChart(c, PolyMatrix([[V.s[0] * V.t[0] + 1]], c.dims))
    I = PolyMatrix.identity(1, c.dims)
    assert apply_coordinate_change(conn, I, I).C == conn.C
    zero = ConnectionChart(c, PolyMatrix.zeros((1, 1), c.dims))
    S = PolyMatrix.constant([[2.0]], c.dims)
    T = PolyMatrix.constant([[3.0]], c.dims)
    assert apply_coordinate_change(zero, S, T).C.is_zero()
    assert apply_coordinate_change(conn, S, T).C == conn.C.scale(1.5)
    with pytest.raises(SingularFrameError):
        apply_coordinate_change(conn, PolyMatrix.zeros((1, 1), c.dims), T)


def test_coordinate_change_with_varying_frame():
    c = FiberChart(2, 2)
    V = chart_vars(2, 2)
    s1, s2, t1, t2 = V.s[0], V.s[1], V.t[0], V.t[1]
    C = PolyMatrix([[t1 * s2, t2], [t1 + t2, s1 * t1]], c.dims)
    S = PolyMatrix([[1 + s1, s2], [0 * s1, 2 + 0 * s1]], c.dims)
    T = PolyMatrix([[1 + 0 * s1, s1], [s2, 2 + 0 * s1]], c.dims)
    pts = random_points(2, 2, 6, np.random.default_rng(1), radius=0.3)
    out = apply_coordinate_change(ConnectionChart(c, C), S, T, pts).C(pts)
    expected = np.linalg.solve(S(pts), C(pts) @ T(pts))
    np.testing.assert_allclose(out, expected, atol=1e-12)


@pytest.mark.parametrize("n", [1, 2, 3, 5])
def test_tautological_pullback(n):
    c = FiberChart(1, 2)
    V = chart_vars(1, 2)
    u, x = V.t[0], V.t[1]
    zero = WirtingerPoly.zero(1, 2)
    theta = HiggsChart(c, PolyMatrix([[zero, u]], c.dims), holomorphic=True)
    pulled = pullback_higgs(theta, [u, x**n])
    assert pulled.Theta == PolyMatrix([[zero, n * x ** (n - 1) * u]], c.dims)
    assert pullback_higgs(theta, [u, x]).Theta == theta.Theta


def test_flat_connection_check():
    c = FiberChart(2, 1)
    V = chart_vars(2, 1)
    t = V.t[0]
    const = ConnectionChart(c, PolyMatrix.constant([[1.0], [2.0]], c.dims))
    assert is_flat_connection(const)
    v = is_flat_connection(ConnectionChart(c, PolyMatrix([[t], [t**2]], c.dims)))
    assert not v and v.witness["residual"] == VectorFieldChart.from_dict(2, 1, {"t1": t**2})
