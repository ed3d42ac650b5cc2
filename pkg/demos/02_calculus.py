"""The calculus: derivative, Skorohod step, products, transform.

Shows the two product notions (Wick versus pointwise), the derivative as a
kernel slicer, the Skorohod integral as a symmetrization one order up, and
the exact discrete identities tying them together.
"""

import numpy as np

from chaoscalc import (
    ChaosProcess,
    ChaosVector,
    TestFunctionXi,
    derivative_at,
    gnorm,
    make_grid,
    pettis_time_integral,
    pointwise,
    s_transform,
    skorohod,
    strongly_independent,
    wick,
)
from chaoscalc.identities import chaos_rel_error
from chaoscalc.testing import random_chaos_process, random_chaos_vector, rng_from

grid = make_grid(1.0, 8)
rng = rng_from(42)

# Derivative: slices one kernel slot per order, deterministic part drops out.
phi = random_chaos_vector(grid, 3, rng)
print("orders of phi:", phi.orders())
d0 = derivative_at(phi, 0)
print("orders of derivative at cell 0:", d0.orders())

# Skorohod integral of the constant process is the plain increment.
ones = ChaosProcess.constant(grid, ChaosVector.deterministic(grid, 1.0))
inc = skorohod(ones, 0.25, 0.75)
print(f"\nintegral of 1 over [0.25,0.75) has L2 norm {gnorm(inc, 0.0):.6f}"
      f" (expect sqrt(0.5) = {np.sqrt(0.5):.6f})")

# Fundamental theorem, exact in the discrete model.
proc = random_chaos_process(grid, 3, rng)
total = skorohod(proc, 0.0, 1.0)
j = 3
lhs = derivative_at(total, j)
dproc = ChaosProcess.from_function(grid, lambda s: derivative_at(proc.at(s), j))
rhs = proc.at(j).add(skorohod(dproc, 0.0, 1.0))
print(f"fundamental-theorem residual: {chaos_rel_error(lhs, rhs):.2e}")

# Integration by parts: moving a fixed factor out of the integral costs the
# time integral of the integrand against the factor's derivative.
fac = random_chaos_vector(grid, 2, rng)
prod_proc = ChaosProcess.from_function(grid, lambda s: pointwise(fac, proc.at(s)))
lhs = skorohod(prod_proc, 0.0, 1.0)
corr = ChaosProcess.from_function(grid, lambda s: pointwise(proc.at(s), derivative_at(fac, s)))
rhs = pointwise(fac, skorohod(proc, 0.0, 1.0)).add(
    pettis_time_integral(corr, 0.0, 1.0).scale(-1.0)
)
print(f"integration-by-parts residual: {chaos_rel_error(lhs, rhs):.2e}")

# Wick versus pointwise: they agree exactly on disjoint supports, and the
# transform turns the Wick product into plain multiplication.
left = random_chaos_vector(grid, 2, rng, cells=[0, 1, 2, 3])
right = random_chaos_vector(grid, 2, rng, cells=[4, 5, 6, 7])
rep = strongly_independent(left, right)
print(f"\ndisjoint supports: {rep.disjoint}")
print(f"wick == pointwise on disjoint supports: "
      f"{chaos_rel_error(wick(left, right), pointwise(left, right)):.2e}")

xi = TestFunctionXi.from_values(grid, 0.5 * rng.standard_normal(grid.cells))
lhs = s_transform(wick(phi, fac), xi)
rhs = s_transform(phi, xi) * s_transform(fac, xi)
print(f"transform multiplicativity residual: {abs(lhs - rhs):.2e}")

# The Hermite square identity: for a unit-norm first-order element, the
# pointwise square decomposes into a second-order part plus the constant 1.
f = ChaosVector.brownian_at(grid, 1.0)
sq = pointwise(f, f)
print(f"\nsquare of the endpoint value: orders {sq.orders()}, "
      f"expectation {sq.expectation():.1f} (the constant from the contraction)")
