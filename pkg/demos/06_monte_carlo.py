"""Monte Carlo cross-checks: the algebra meets sampled paths.

Chaos vectors evaluate pathwise through Hermite polynomials in the cell
coordinates.  The demo verifies the isometry statistically, the pointwise
product pathwise, and the agreement of the anticipative integral with the
classical forward sum for adapted integrands.
"""

import math

import numpy as np

from chaoscalc import (
    ChaosProcess,
    ChaosVector,
    FbmKernel,
    OuKernel,
    evaluate,
    integrate_plain,
    ito_oracle,
    make_grid,
    mc_moments,
    pointwise,
    sample_noise,
)
from chaoscalc.montecarlo import evaluate_block, sample_noise_block
from chaoscalc.testing import random_chaos_process, random_sym_kernel, rng_from

grid = make_grid(1.0, 16)
rng = rng_from(99)

# Isometry: E[I_n(F)^2] = n! |F|^2, checked at three orders.
block = sample_noise_block(grid, 100_000, seed=1234)
print("isometry check on 100000 paths:")
for n in (1, 2, 3):
    k = random_sym_kernel(grid, n, rng, n_entries=5)
    vals = evaluate_block(ChaosVector.from_kernel(k), block) ** 2
    want = math.factorial(n) * k.norm_sq()
    got = float(np.mean(vals))
    se = float(np.std(vals)) / math.sqrt(len(vals))
    print(f"  n={n}: sample {got:.5f}  target {want:.5f}  z={(got - want) / se:+.2f}")

# Pointwise products evaluate pathwise as actual products.
omega = sample_noise(grid, 7)
b = ChaosVector.brownian_at(grid, 1.0)
sq = pointwise(b, b)
print(f"\npathwise product identity: "
      f"{evaluate(sq, omega):.10f} vs {evaluate(b, omega) ** 2:.10f}")

# Adapted integrand + constant kernel: the anticipative pipeline reproduces
# the classical forward sum on every single path.
proc = random_chaos_process(grid, 2, rng, adapted=True)
value = integrate_plain(proc, FbmKernel(H=0.5), 1.0).value
worst = 0.0
for seed in range(50):
    om = sample_noise(grid, 5000 + seed)
    worst = max(worst, abs(evaluate(value, om) - ito_oracle(proc, om)))
print(f"adapted-case pathwise gap over 50 paths: {worst:.2e}")

# Closed-form moments of the exponential-kernel driver.
ones = ChaosProcess.constant(grid, ChaosVector.deterministic(grid, 1.0))
x1 = integrate_plain(ones, OuKernel(alpha=1.0), 1.0).value
m = mc_moments(x1, 100_000, seed=42)
want_var = (1.0 - math.exp(-2.0)) / 2.0
print(f"\ndriver at t=1 for the exponential kernel:")
print(f"  mean {m.mean:+.5f} (se {m.se_mean:.5f}), target 0")
print(f"  var  {m.variance:.5f} (se {m.se_variance:.5f}), target {want_var:.5f}")
