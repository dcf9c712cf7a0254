"""Chern connection of a hermitian metric, read as a fiberwise two-form.

A hermitian metric h(s) on a vector bundle gives the fiberwise form
omega = (i/2) d dbar (t h t*).  Its Chern connection (the lift of d/ds that
is orthogonal to the fibers) agrees with the classical t . (d_s h) h^{-1}.
"""
# %%
import numpy as np

from nlhodge.bundles import FiberChart
from nlhodge.chern import (
    chern_connection,
    classical_chern,
    metric_from_linear_hermitian,
    orthogonality_residual,
    projective_fs_connection,
)
from nlhodge.curvature import Grid
from nlhodge.jets import PolyMatrix
from nlhodge.symcore import chart_vars

# %% A rank-two metric on a one-dimensional base
c = FiberChart(1, 2)
V = chart_vars(1, 2)
s, sb = V.s[0], V.sbar[0]
h = PolyMatrix([[s * sb + 2, s], [sb, 1 + 0 * s]], c.dims)
omega = metric_from_linear_hermitian(h, c)
conn = chern_connection(omega)

pts = Grid.polydisc(1, 2, 0.0, 0.6, 3, 2).points
print("orthogonality residual:", np.max(np.abs(orthogonality_residual(conn, omega, pts))))
print("vs classical t.(dh)h^-1:", np.max(np.abs(conn.C(pts) - classical_chern(h, pts))))

# %% Fubini-Study metric on the projectivization, affine coordinate x = t1/t2
# The metric still depends on s only; it is written on the (s, x) chart.
W = chart_vars(1, 1)
one = 1 + 0 * W.s[0]
fs = projective_fs_connection(PolyMatrix([[2 * one, W.s[0]], [W.sbar[0], 2 * one]], (1, 1)))
sx = Grid.polydisc(1, 1, 0.0, 0.8, 3, 3).points
print("FS Chern coefficient vs pushed-down quadratic:", np.max(np.abs(fs.chern(sx) - fs.quadratic(sx))))
print("sample (s, x, coefficient):")
for k in range(0, len(sx), 20):
    print(f"  {sx.s[k, 0]:.3f}  {sx.t[k, 0]:.3f}  {fs.chern(sx[k:k + 1])[0, 0, 0]:.4f}")
