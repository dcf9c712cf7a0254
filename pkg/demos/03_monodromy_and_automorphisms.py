"""Nonlinear monodromy by analytic continuation, and degree growth of polynomial automorphisms.

A rational ODE t^(n) = F(s, t, ..., t^(n-1)) is a flat foliation on the
trivial bundle.  Continuing a solution around a loop gives a partial map of
the fiber.  Compositions of polynomial automorphisms either keep a normal
form (rho1) or have Jacobian degrees that double (rho2).
"""
# %%
from nlhodge.errors import ContinuationEscaped
from nlhodge.monodromy import (
    BasePath,
    RationalODE,
    compose_polyauto,
    continue_along_path,
    jacobian_degree_growth,
    loop_monodromy,
    max_degree_by_length,
    ode_to_foliation,
    power_degrees,
    rho1_generators,
    rho2_generators,
)
from nlhodge.symcore import chart_vars

V = chart_vars(1, 1)

# %% t' = t / (2s): solutions are c sqrt(s), so one loop around 0 flips the sign
ode = RationalODE(1, V.t[0], 2 * V.s[0])
fol = ode_to_foliation(ode)
loop = BasePath.circle(0.0, 1.0, punctures=(0,))
print("once: ", continue_along_path(fol, loop, [1.0], ode=ode))
print("twice:", continue_along_path(fol, loop + loop, [1.0], ode=ode))
print("matrix:", loop_monodromy(fol, loop, [[1.0], [0.5j]], ode=ode).matrix)

# %% t' = t^2 from t(0) = 1/2 blows up at s = 2
ric = RationalODE(1, V.t[0] ** 2)
for end in (1.0, 1.5, 1.9):
    out = continue_along_path(ode_to_foliation(ric), BasePath.line(0, end), [0.5], ode=ric)[0]
    print(f"s={end}: {out:.6f}  closed form {0.5 / (1 - 0.5 * end):.6f}")
try:
    continue_along_path(ode_to_foliation(ric), BasePath.line(0, 3), [0.5], ode=ric)
except ContinuationEscaped as exc:
    print("escaped:", exc)

# %% (tau o sigma)^k has component degree 2^k; rho1 words stay of degree <= 2
sigma, tau = rho2_generators()
print("rho2 power degrees:", power_degrees(compose_polyauto(tau, sigma), 6))
print("rho2 max Jacobian degree by word length:", max_degree_by_length(jacobian_degree_growth([sigma, tau], 8)))
table = jacobian_degree_growth(rho1_generators(), 6)
print("rho1 words:", len(table), "max Jacobian degree:", max(row["jacobian_degree"] for row in table))
print("rho1 degrees by length:", max_degree_by_length(table))
