"""Finite chaos expansions and the weighted norm family.

A ``ChaosVector`` is a finite sum of iterated integrals of symmetric kernels,
one component per chaos order.  All elements here are truncated, so every
exponentially weighted norm is finite and each vector is simultaneously a
test and a generalized random variable; the weight index only changes the
numbers, never well-definedness.
"""

from __future__ import annotations

import math

from scipy.special import gammaln

from .grid import GridSpec, same_grid
from .kernels import SymKernel, kernel_from_json

# Orders above this use log-space weights exp(lgamma(n+1) + 2*lambda*n) to
# dodge overflow of n! * e^{2 lambda n} before the tiny kernel norm cancels it.
_LOG_GUARD_ORDER = 30


def _order_weight_times(n: int, lam: float, value: float) -> float:
    """``n! * exp(2*lam*n) * value`` with a log-space guard for large n."""
    if value == 0.0:
        return 0.0
    if n <= _LOG_GUARD_ORDER:
        return math.factorial(n) * math.exp(2.0 * lam * n) * value
    log_term = gammaln(n + 1) + 2.0 * lam * n + math.log(abs(value))
    return math.copysign(math.exp(log_term), value)


class ChaosVector:
    """Finite chaos expansion: map chaos order -> kernel component."""

    __slots__ = ("grid", "components")

    def __init__(self, grid: GridSpec, components: dict[int, object] | None = None):
        self.grid = grid
        self.components = {}
        if components:
            for n, k in components.items():
                if k.order != n:
                    raise ValueError(f"component at position {n} has order {k.order}")
                same_grid(grid, k.grid)
                if not k.is_zero():
                    self.components[n] = k

    # -- constructors ------------------------------------------------------

    @staticmethod
    def zero(grid: GridSpec) -> "ChaosVector":
        return ChaosVector(grid)

    @staticmethod
    def deterministic(grid: GridSpec, value: float) -> "ChaosVector":
        return ChaosVector(grid, {0: SymKernel.scalar(grid, value)})

    @staticmethod
    def from_kernel(kernel) -> "ChaosVector":
        return ChaosVector(kernel.grid, {kernel.order: kernel})

    @staticmethod
    def wiener_integral(grid: GridSpec, values) -> "ChaosVector":
        """First-order integral of a step function given per cell."""
        return ChaosVector.from_kernel(SymKernel.from_cell_values(grid, values))

    @staticmethod
    def brownian_at(grid: GridSpec, t: float) -> "ChaosVector":
        return ChaosVector.from_kernel(SymKernel.indicator(grid, 0.0, t))

    # -- queries -------------------------------------------------------------

    def component(self, n: int):
        k = self.components.get(n)
        if k is None:
            return SymKernel.zero(n, self.grid)
        return k

    def max_order(self) -> int:
        return max(self.components) if self.components else 0

    def orders(self):
        return sorted(self.components)

    def is_zero(self) -> bool:
        return not self.components

    def expectation(self) -> float:
        c = self.components.get(0)
        return c.entries.get((), 0.0) if c is not None else 0.0

    def support_cells(self) -> set[int]:
        cells: set[int] = set()
        for n, k in self.components.items():
            if n > 0:
                cells.update(k.support_cells())
        return cells

    # -- linear structure -------------------------------------------------------

    def scale(self, a: float) -> "ChaosVector":
        if a == 0.0:
            return ChaosVector(self.grid)
        return ChaosVector(self.grid, {n: k.scale(a) for n, k in self.components.items()})

    def add(self, other: "ChaosVector") -> "ChaosVector":
        same_grid(self.grid, other.grid)
        out = dict(self.components)
        for n, k in other.components.items():
            if n in out:
                out[n] = out[n].add(k)
            else:
                out[n] = k
        return ChaosVector(self.grid, {n: k for n, k in out.items() if not k.is_zero()})

    def sub(self, other: "ChaosVector") -> "ChaosVector":
        return self.add(other.scale(-1.0))

    # -- metric --------------------------------------------------------------

    def gnorm_sq(self, lam: float) -> float:
        total = 0.0
        for n, k in self.components.items():
            total += _order_weight_times(n, lam, k.norm_sq())
        return total

    def gnorm(self, lam: float) -> float:
        return math.sqrt(self.gnorm_sq(lam))

    def pairing(self, other: "ChaosVector") -> float:
        same_grid(self.grid, other.grid)
        total = 0.0
        for n, k in self.components.items():
            ko = other.components.get(n)
            if ko is not None:
                total += _order_weight_times(n, 0.0, k.inner(ko))
        return total

    # -- io ---------------------------------------------------------------------

    def to_json(self) -> dict:
        return {
            "grid": self.grid.to_json(),
            "components": [self.components[n].to_json() for n in sorted(self.components)],
        }

    @staticmethod
    def from_json(obj: dict) -> "ChaosVector":
        grid = GridSpec.from_json(obj["grid"])
        comps = {}
        for kj in obj["components"]:
            k = kernel_from_json(kj)
            comps[k.order] = k
        return ChaosVector(grid, comps)

    def __repr__(self):
        return f"ChaosVector(orders={self.orders()})"


def gnorm(phi: ChaosVector, lam: float) -> float:
    """Exponentially weighted norm sqrt(sum_n n! e^{2 lam n} |phi_n|^2)."""
    return phi.gnorm(lam)


def pairing(phi: ChaosVector, psi: ChaosVector) -> float:
    """Bilinear dual pairing sum_n n! <phi_n, psi_n>."""
    return phi.pairing(psi)


def truncate(phi: ChaosVector, n_max: int) -> ChaosVector:
    """Drop every component of order above ``n_max``."""
    if n_max < 0:
        raise ValueError(f"truncation order must be >= 0, got {n_max}")
    return ChaosVector(phi.grid, {n: k for n, k in phi.components.items() if n <= n_max})


def linear_combine(a: float, phi: ChaosVector, b: float, psi: ChaosVector) -> ChaosVector:
    """Order-wise ``a*phi + b*psi``."""
    same_grid(phi.grid, psi.grid)
    return phi.scale(a).add(psi.scale(b))


class ChaosProcess:
    """Time-cell-indexed family of chaos vectors on one grid.

    Values may be given as a list (one vector per cell) or as a generator
    function ``cell -> ChaosVector``, materialized lazily and cached.
    """

    __slots__ = ("grid", "_values", "_fn")

    def __init__(self, grid: GridSpec, values=None, fn=None):
        self.grid = grid
        if (values is None) == (fn is None):
            raise ValueError("provide exactly one of values or fn")
        if values is not None:
            values = list(values)
            if len(values) != grid.cells:
                raise ValueError(f"need {grid.cells} values, got {len(values)}")
            for v in values:
                same_grid(grid, v.grid)
        self._values = values if values is not None else [None] * grid.cells
        self._fn = fn

    @staticmethod
    def from_values(grid: GridSpec, values) -> "ChaosProcess":
        return ChaosProcess(grid, values=values)

    @staticmethod
    def from_function(grid: GridSpec, fn) -> "ChaosProcess":
        return ChaosProcess(grid, fn=fn)

    @staticmethod
    def constant(grid: GridSpec, vec: ChaosVector) -> "ChaosProcess":
        return ChaosProcess(grid, values=[vec] * grid.cells)

    def at(self, j: int) -> ChaosVector:
        if not (0 <= j < self.grid.cells):
            raise ValueError(f"cell {j} outside grid with {self.grid.cells} cells")
        v = self._values[j]
        if v is None:
            v = self._fn(j)
            same_grid(self.grid, v.grid)
            self._values[j] = v
        return v

    def map(self, op) -> "ChaosProcess":
        return ChaosProcess(self.grid, fn=lambda j: op(self.at(j), j))

    def max_order(self) -> int:
        return max(self.at(j).max_order() for j in range(self.grid.cells))

    def __iter__(self):
        return (self.at(j) for j in range(self.grid.cells))
