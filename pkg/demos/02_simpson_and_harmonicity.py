"""From a Higgs field and a metric to a flat connection, and the curvature test.

The metric is harmonic when the assembled curvature (types (0,2), (1,1) and
(2,0)) vanishes.  A rank-one line bundle with h = exp(s + sbar) and the
uniformizing variation of Hodge structure tau(s) = s are harmonic; small
perturbations of either metric are not, and the report names the tensor.
"""
# %%
import numpy as np

from nlhodge.bundles import FiberChart, HiggsChart
from nlhodge.chern import metric_from_linear_hermitian
from nlhodge.curvature import Grid, HarmonicScenario, assemble_G, is_harmonic
from nlhodge.jets import JetMatrixFunction, PolyMatrix
from nlhodge.rank1 import PeriodScenario, ks_metric, rank1_harmonicity
from nlhodge.simpson import flat_to_higgs, higgs_to_flat


def line_bundle(h_fn):
    c = FiberChart(1, 1)
    h = JetMatrixFunction((1, 1), c.dims, lambda V: [[h_fn(V)]])
    theta = HiggsChart.from_linear(c, [PolyMatrix.constant([[1.0]], c.dims)])
    return theta, metric_from_linear_hermitian(h, c)


grid = Grid.polydisc(1, 1, 0.0, 0.5, 5, 3)

# %% Rank one: theta = ds, h = exp(s + sbar)
theta, omega = line_bundle(lambda V: (V.s[0] + V.sbar[0]).exp())
v = is_harmonic(HarmonicScenario(omega, theta=theta, grid=grid))
print("exp(s + sbar):", v.harmonic, v.report.sup_norms())

dbar, nabla = higgs_to_flat(theta, omega)
print("flat side G:", assemble_G(nabla, dbar, omega, grid=grid).sup_norms())
back, _ = flat_to_higgs(nabla, dbar, omega)
print("round trip |Theta' - Theta|:", np.max(np.abs(back.Theta(grid.points) - theta.Theta(grid.points))))

# %% A perturbed metric fails, with a witness
theta, omega = line_bundle(lambda V: (V.s[0] + V.sbar[0]).exp() * (V.s[0] * V.sbar[0] * 0.1 + 1.0))
v = is_harmonic(HarmonicScenario(omega, theta=theta, grid=grid))
name, entry = v.report.witness()
print("perturbed:", v.harmonic, f"F{name} sup {entry.sup:.3e} at", entry.worst_point["s"])

# %% Rank two: the Kodaira-Spencer system of tau(s) = s near 2i
p = PeriodScenario.from_coefficients([0, 1])
g2 = p.grid(5, 3)
print("VHS, Hodge metric:", rank1_harmonicity(p, g2).sup_norms())
print("VHS, hodge_factor 1:", rank1_harmonicity(p, g2, hodge_factor=1.0).sup_norms())
theta, omega = ks_metric(p, grid=g2)
dbar, nabla = higgs_to_flat(theta, omega, points=g2.points[:16])
print("VHS flat side G:", assemble_G(nabla, dbar, omega, grid=g2).sup_norms())
