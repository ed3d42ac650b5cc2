"""Seeded random chaos objects for property suites and batch experiments."""

from __future__ import annotations

import numpy as np

from .chaos import ChaosProcess, ChaosVector
from .grid import GridSpec
from .kernels import SymKernel


def rng_from(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(key=seed))


def random_sym_kernel(grid: GridSpec, order: int, rng: np.random.Generator,
                      n_entries: int = 3, cells=None, scale: float = 1.0) -> SymKernel:
    """Sparse kernel with random sorted tuples over the allowed cells."""
    if order == 0:
        return SymKernel.scalar(grid, scale * float(rng.standard_normal()))
    pool = list(range(grid.cells)) if cells is None else sorted(cells)
    ent: dict[tuple[int, ...], float] = {}
    for _ in range(n_entries):
        tup = tuple(sorted(rng.choice(pool, size=order, replace=True).tolist()))
        ent[tup] = ent.get(tup, 0.0) + scale * float(rng.standard_normal())
    return SymKernel(order, grid, ent)


def random_chaos_vector(grid: GridSpec, max_order: int, rng: np.random.Generator,
                        n_entries: int = 3, cells=None, scale: float = 1.0) -> ChaosVector:
    comps = {}
    for n in range(max_order + 1):
        k = random_sym_kernel(grid, n, rng, n_entries=n_entries, cells=cells, scale=scale)
        if not k.is_zero():
            comps[n] = k
    return ChaosVector(grid, comps)


def random_chaos_process(grid: GridSpec, max_order: int, rng: np.random.Generator,
                         n_entries: int = 2, cells=None, adapted: bool = False,
                         scale: float = 1.0) -> ChaosProcess:
    """Random process; with ``adapted=True`` the value at cell ``j`` is
    supported on cells strictly below ``j`` (cell 0 is deterministic)."""
    values = []
    for j in range(grid.cells):
        if adapted:
            allowed = list(range(j))
            if not allowed:
                values.append(ChaosVector.deterministic(grid, float(rng.standard_normal())))
                continue
            vec = random_chaos_vector(grid, max_order, rng, n_entries=n_entries,
                                      cells=allowed, scale=scale)
        else:
            vec = random_chaos_vector(grid, max_order, rng, n_entries=n_entries,
                                      cells=cells, scale=scale)
        values.append(vec)
    return ChaosProcess.from_values(grid, values)
