"""Grids, symmetric kernels, chaos vectors, weighted norms.

Walks the basic objects: build a grid, store kernels in canonical sorted
form, assemble chaos vectors, and look at the exponential-weight norm family
and the dual pairing.
"""

import json

from chaoscalc import (
    ChaosVector,
    SymKernel,
    gnorm,
    inner_product,
    linear_combine,
    make_grid,
    pairing,
    sym_store,
    truncate,
)

grid = make_grid(horizon=1.0, cells=8)
print(f"grid: horizon={grid.horizon}, cells={grid.cells}, step={grid.step}")
print(f"time 0.3 falls in cell {grid.cell(0.3)}")

# Kernels are stored on sorted cell tuples; positional input is symmetrized
# at ingestion.  The two entries below describe one multiset {0, 1}.
k = sym_store(2, [((0, 1), 1.0), ((1, 0), 0.0)], grid, mode="positional")
print(f"\nsymmetrized order-2 kernel: {k.entries}")

# The indicator of [0, 1) as a first-order kernel has unit squared norm.
ind = SymKernel.indicator(grid, 0.0, 1.0)
print(f"|1_[0,1)|^2 = {inner_product(ind, ind)}")

# A chaos vector is a finite expansion; the brownian endpoint value is the
# first-order integral of the indicator.
b1 = ChaosVector.brownian_at(grid, 1.0)
c = ChaosVector.deterministic(grid, 2.0)
mix = linear_combine(1.0, c, 3.0, b1)
print(f"\nmix orders: {mix.orders()}, expectation {mix.expectation()}")

# The weighted norm family: lam = 0 is the plain L2 norm; the family is
# monotone in lam, and order-0 components do not feel the weight at all.
for lam in (-1.0, 0.0, 1.0):
    print(f"  |mix|_{lam:+.1f} = {gnorm(mix, lam):.6f}")

# Dual pairing with the two-sided norm bound.
other = linear_combine(1.0, b1, -0.5, c)
p = pairing(mix, other)
print(f"\npairing = {p:.6f}")
for lam in (0.25, 0.5, 1.0):
    bound = gnorm(mix, -lam) * gnorm(other, lam)
    print(f"  |pairing| <= {bound:.6f}  (lam={lam})")

# Truncation keeps the low orders and never increases any norm.
print(f"\ntruncate to order 0: expectation {truncate(mix, 0).expectation()}")

# Serialization round-trips bit-exactly through JSON.
blob = json.dumps(mix.to_json())
back = ChaosVector.from_json(json.loads(blob))
print(f"round trip equal: {back.component(1).entries == mix.component(1).entries}")
