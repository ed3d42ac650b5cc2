"""Pathwise evaluation of chaos vectors and Monte Carlo cross-checks.

The finite model makes every chaos vector a polynomial in the standard
normal coordinates ``xi_i = <omega, 1_cell_i / sqrt(step)>``: an elementary
symmetric tensor on cells with repeat counts ``a_1..a_k`` evaluates to the
product of probabilists' Hermite polynomials ``He_{a_i}(xi_i)``.  Cell-basis
coefficients convert to the orthonormal basis with the factor
``step^{n/2} * multiplicity``.

The generator is counter-based (Philox keyed by the seed), so path blocks
are reproducible and safely parallelizable.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .chaos import ChaosProcess, ChaosVector
from .grid import GridSpec, same_grid
from .kernels import LayeredKernel, SymKernel, multiplicity


@dataclass(frozen=True)
class NoiseVector:
    """One standard-normal draw per cell; reproducible from the seed."""

    grid: GridSpec
    xi: np.ndarray
    seed: int

    def increments(self) -> np.ndarray:
        """Brownian increments per cell: sqrt(step) * xi."""
        return math.sqrt(self.grid.step) * self.xi


def _generator(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(key=seed))


def sample_noise(grid: GridSpec, seed: int) -> NoiseVector:
    """Draw the cell coordinates for one path."""
    xi = _generator(seed).standard_normal(grid.cells)
    return NoiseVector(grid=grid, xi=xi, seed=seed)


def sample_noise_block(grid: GridSpec, n_paths: int, seed: int) -> np.ndarray:
    """Matrix of coordinates for ``n_paths`` paths, shape (paths, cells)."""
    return _generator(seed).standard_normal((n_paths, grid.cells))


def _hermite_table(x: np.ndarray, max_degree: int) -> list[np.ndarray]:
    """Probabilists' Hermite values He_0..He_max at every entry of x."""
    table = [np.ones_like(x)]
    if max_degree >= 1:
        table.append(x.copy())
    for d in range(2, max_degree + 1):
        table.append(x * table[d - 1] - (d - 1) * table[d - 2])
    return table


def _counts(tup: tuple[int, ...]) -> list[tuple[int, int]]:
    out = []
    prev = None
    for v in tup:
        if v == prev:
            out[-1] = (v, out[-1][1] + 1)
        else:
            out.append((v, 1))
            prev = v
    return out


def evaluate_block(phi: ChaosVector, xi_block: np.ndarray) -> np.ndarray:
    """Evaluate a chaos vector on a block of paths, shape (paths,)."""
    grid = phi.grid
    if xi_block.ndim != 2 or xi_block.shape[1] != grid.cells:
        raise ValueError(f"xi block must be (paths, {grid.cells})")
    max_deg = 0
    sparse_comps: list[tuple[int, SymKernel]] = []
    for n, k in sorted(phi.components.items()):
        if isinstance(k, LayeredKernel):
            k = k.to_sparse()
        elif not isinstance(k, SymKernel):
            raise TypeError(f"cannot evaluate {type(k).__name__} pathwise")
        sparse_comps.append((n, k))
        for tup in k.entries:
            for _, cnt in _counts(tup):
                max_deg = max(max_deg, cnt)
    he = _hermite_table(xi_block, max_deg)
    out = np.zeros(xi_block.shape[0])
    for n, k in sparse_comps:
        basis_factor = grid.step ** (n / 2.0)
        for tup, c in k.entries.items():
            term = np.full(xi_block.shape[0], c * multiplicity(tup) * basis_factor)
            for cell, cnt in _counts(tup):
                term = term * he[cnt][:, cell]
            out += term
    return out


def evaluate(phi: ChaosVector, omega: NoiseVector) -> float:
    """Evaluate a chaos vector on one path."""
    same_grid(phi.grid, omega.grid)
    return float(evaluate_block(phi, omega.xi[None, :])[0])


def ito_oracle(phi: ChaosProcess, omega: NoiseVector) -> float:
    """Forward stochastic sum ``sum_s phi(s) * dB_s`` for adapted integrands.

    Adaptedness (each value supported strictly on earlier cells) is checked
    and violations rejected; for such integrands this classical sum agrees
    pathwise with the Skorohod construction.
    """
    same_grid(phi.grid, omega.grid)
    db = omega.increments()
    total = 0.0
    for s in range(phi.grid.cells):
        vec = phi.at(s)
        sup = vec.support_cells()
        if any(c >= s for c in sup):
            raise ValueError(f"integrand at cell {s} is not adapted (support {sorted(sup)})")
        if not vec.is_zero():
            total += evaluate(vec, omega) * db[s]
    return total


@dataclass(frozen=True)
class McMoments:
    mean: float
    variance: float
    se_mean: float
    se_variance: float
    n_samples: int


def mc_moments(phi: ChaosVector, n_samples: int, seed: int) -> McMoments:
    """Sample mean and variance with jackknife standard errors.

    The mean estimates the order-0 coefficient; the variance estimates the
    squared plain norm minus the squared mean.
    """
    if n_samples < 2:
        raise ValueError(f"need at least 2 samples, got {n_samples}")
    xi = sample_noise_block(phi.grid, n_samples, seed)
    vals = evaluate_block(phi, xi)
    n = n_samples
    mean = float(np.mean(vals))
    var = float(np.var(vals, ddof=1))
    se_mean = math.sqrt(var / n)

    # leave-one-out variances from the power sums
    s1 = float(np.sum(vals))
    s2 = float(np.sum(vals * vals))
    loo_mean = (s1 - vals) / (n - 1)
    loo_var = (s2 - vals * vals - (n - 1) * loo_mean ** 2) / (n - 2)
    se_var = math.sqrt((n - 1) / n * float(np.sum((loo_var - np.mean(loo_var)) ** 2)))
    return McMoments(mean=mean, variance=var, se_mean=se_mean, se_variance=se_var, n_samples=n)
