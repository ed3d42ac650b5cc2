"""Symmetric kernel tensors on the grid.

An order-``n`` kernel is a symmetric, cell-wise constant function on
``[0,T)^n``.  Three storage forms cover the workloads:

``SymKernel``
    Canonical sparse form: a map from sorted (non-decreasing) cell tuples to
    the coefficient the function takes on every permutation of that tuple.
    Symmetry is structural, fixed at ingestion, never re-checked numerically.

``LayeredKernel``
    Dense structured form for kernels whose value depends only on the largest
    cell index in the argument (constants on ``[0,t)^n`` and their linear
    combinations).  Keeps delta-function experiments at chaos order ~40
    tractable; sparse tuples would be astronomically many.

``TimeSlotSymKernel``
    The symmetrization, over all slots, of a family ``(x, s) -> f_s(max x)``
    of layered kernels indexed by a distinguished time slot.  Produced when
    the Skorohod step runs over layered-valued processes.  Norms and inner
    products are evaluated through the symmetrization projector rather than
    by materializing the tensor.

Squared L2 norms carry the weight ``step**n`` per tuple times the number of
distinct orderings of the tuple, i.e. the Lebesgue volume of the orbit.
"""

from __future__ import annotations

import math
from itertools import combinations
from typing import Iterable

import numpy as np

from .grid import GridSpec, same_grid

# Converting a layered kernel to sparse tuples is only allowed below this
# many multisets; beyond it the caller is mixing representations wrongly.
_DENSIFY_LIMIT = 500_000


def multiplicity(tup: tuple[int, ...]) -> int:
    """Number of distinct orderings of a sorted tuple: n! / prod(counts!)."""
    n = len(tup)
    if n <= 1:
        return 1
    m = math.factorial(n)
    run = 1
    for i in range(1, n):
        if tup[i] == tup[i - 1]:
            run += 1
        else:
            m //= math.factorial(run)
            run = 1
    m //= math.factorial(run)
    return m


def sub_multisets(tup: tuple[int, ...], k: int) -> set[tuple[int, ...]]:
    """Distinct size-``k`` sub-multisets of a sorted tuple."""
    return set(combinations(tup, k))


def remove_once(tup: tuple[int, ...], values: Iterable[int]) -> tuple[int, ...]:
    """Remove one occurrence of each value in ``values`` from ``tup``."""
    out = list(tup)
    for v in values:
        out.remove(v)
    return tuple(out)


def merge_sorted(a: tuple[int, ...], b: tuple[int, ...]) -> tuple[int, ...]:
    return tuple(sorted(a + b))


def _count(tup: tuple[int, ...], v: int) -> int:
    return tup.count(v)


class SymKernel:
    """Canonical sparse symmetric kernel: sorted tuple -> coefficient."""

    __slots__ = ("order", "grid", "entries")

    def __init__(self, order: int, grid: GridSpec, entries: dict[tuple[int, ...], float] | None = None):
        if order < 0:
            raise ValueError(f"order must be >= 0, got {order}")
        self.order = order
        self.grid = grid
        self.entries = {}
        if entries:
            for tup, c in entries.items():
                if c != 0.0:
                    self.entries[tup] = c

    # -- constructors -----------------------------------------------------

    @staticmethod
    def zero(order: int, grid: GridSpec) -> "SymKernel":
        return SymKernel(order, grid)

    @staticmethod
    def scalar(grid: GridSpec, value: float) -> "SymKernel":
        return SymKernel(0, grid, {(): float(value)} if value != 0.0 else {})

    @staticmethod
    def from_cell_values(grid: GridSpec, values) -> "SymKernel":
        """Order-1 kernel from one value per grid cell."""
        ent = {(j,): float(v) for j, v in enumerate(values) if v != 0.0}
        return SymKernel(1, grid, ent)

    @staticmethod
    def indicator(grid: GridSpec, a: float, b: float) -> "SymKernel":
        """Order-1 kernel equal to 1 on cells covering ``[a, b)``."""
        lo, hi = grid.snap_down(a), grid.snap_down(b)
        return SymKernel(1, grid, {(j,): 1.0 for j in range(lo, hi)})

    # -- basic queries -----------------------------------------------------

    def coeff(self, tup: tuple[int, ...]) -> float:
        return self.entries.get(tuple(sorted(tup)), 0.0)

    def is_zero(self) -> bool:
        return not self.entries

    def support_cells(self) -> set[int]:
        cells: set[int] = set()
        for tup in self.entries:
            cells.update(tup)
        return cells

    # -- linear structure ---------------------------------------------------

    def scale(self, a: float) -> "SymKernel":
        if a == 0.0:
            return SymKernel(self.order, self.grid)
        return SymKernel(self.order, self.grid, {t: a * c for t, c in self.entries.items()})

    def add(self, other) -> "SymKernel":
        if isinstance(other, LayeredKernel):
            other = other.to_sparse()
        if self.order != other.order:
            raise ValueError(f"order mismatch: {self.order} vs {other.order}")
        same_grid(self.grid, other.grid)
        out = dict(self.entries)
        for t, c in other.entries.items():
            s = out.get(t, 0.0) + c
            if s == 0.0:
                out.pop(t, None)
            else:
                out[t] = s
        return SymKernel(self.order, self.grid, out)

    # -- metric -------------------------------------------------------------

    def norm_sq(self) -> float:
        w = self.grid.step ** self.order
        return w * sum(multiplicity(t) * c * c for t, c in self.entries.items())

    def inner(self, other) -> float:
        if isinstance(other, LayeredKernel):
            return other.inner(self)
        if isinstance(other, TimeSlotSymKernel):
            return other.inner(self)
        if self.order != other.order:
            raise ValueError(f"order mismatch: {self.order} vs {other.order}")
        same_grid(self.grid, other.grid)
        small, big = self.entries, other.entries
        if len(big) < len(small):
            small, big = big, small
        w = self.grid.step ** self.order
        return w * sum(multiplicity(t) * c * big[t] for t, c in small.items() if t in big)

    # -- calculus primitives -------------------------------------------------

    def slice_at(self, cell: int) -> "SymKernel":
        """Fix one slot at ``cell``.  No derivative factor is applied."""
        if self.order == 0:
            raise ValueError("cannot slice an order-0 kernel")
        out: dict[tuple[int, ...], float] = {}
        for tup, c in self.entries.items():
            if cell in tup:
                out[remove_once(tup, (cell,))] = c
        return SymKernel(self.order - 1, self.grid, out)

    def tensor_sym(self, other) -> "SymKernel":
        """Symmetrized tensor product with another kernel."""
        if isinstance(other, LayeredKernel):
            other = other.to_sparse()
        same_grid(self.grid, other.grid)
        n, m = self.order, other.order
        out: dict[tuple[int, ...], float] = {}
        denom = math.comb(n + m, n)
        for ta, ca in self.entries.items():
            for tb, cb in other.entries.items():
                w = merge_sorted(ta, tb)
                weight = 1
                for v in set(ta):
                    weight *= math.comb(_count(w, v), _count(ta, v))
                out[w] = out.get(w, 0.0) + ca * cb * weight / denom
        return SymKernel(n + m, self.grid, out)

    def contract_sym(self, other, k: int) -> "SymKernel":
        """Contract ``k`` slot pairs (step-weighted sums), then symmetrize."""
        if isinstance(other, LayeredKernel):
            other = other.to_sparse()
        same_grid(self.grid, other.grid)
        n, m = self.order, other.order
        if k < 0 or k > min(n, m):
            raise ValueError(f"cannot contract {k} slots of orders {n}, {m}")
        if k == 0:
            return self.tensor_sym(other)
        out: dict[tuple[int, ...], float] = {}
        step_k = self.grid.step ** k
        denom = math.comb(n + m - 2 * k, n - k)
        for ta, ca in self.entries.items():
            subs_a = sub_multisets(ta, k)
            for tb, cb in other.entries.items():
                for c_ms in subs_a:
                    if any(_count(tb, v) < _count(c_ms, v) for v in set(c_ms)):
                        continue
                    x = remove_once(ta, c_ms)
                    y = remove_once(tb, c_ms)
                    w = merge_sorted(x, y)
                    weight = multiplicity(c_ms) * step_k
                    comb_w = 1
                    for v in set(x):
                        comb_w *= math.comb(_count(w, v), _count(x, v))
                    out[w] = out.get(w, 0.0) + ca * cb * weight * comb_w / denom
        return SymKernel(n + m - 2 * k, self.grid, out)

    # -- transforms -----------------------------------------------------------

    def s_transform(self, xi: np.ndarray) -> float:
        """Pair against ``xi^{(x)n}``; factorizes over slots."""
        w = self.grid.step ** self.order
        total = 0.0
        for tup, c in self.entries.items():
            prod = c
            for v in tup:
                prod *= xi[v]
            total += multiplicity(tup) * prod
        return w * total

    # -- io --------------------------------------------------------------------

    def to_json(self) -> dict:
        ents = sorted(self.entries.items())
        return {
            "order": self.order,
            "grid": self.grid.to_json(),
            "entries": [[list(t), c] for t, c in ents],
        }

    @staticmethod
    def from_json(obj: dict) -> "SymKernel":
        grid = GridSpec.from_json(obj["grid"])
        order = int(obj["order"])
        ent: dict[tuple[int, ...], float] = {}
        for t, c in obj["entries"]:
            tup = tuple(int(i) for i in t)
            if len(tup) != order:
                raise ValueError(f"tuple length {len(tup)} != order {order}")
            if tuple(sorted(tup)) != tup:
                raise ValueError(f"tuple {tup} not in canonical sorted form")
            ent[tup] = ent.get(tup, 0.0) + float(c)
        return SymKernel(order, grid, ent)

    def __repr__(self):
        return f"SymKernel(order={self.order}, entries={len(self.entries)})"


def sym_store(order: int, raw_entries, grid: GridSpec, mode: str = "canonical") -> SymKernel:
    """Ingest raw (tuple, coefficient) pairs into canonical form.

    ``mode="canonical"``: tuples name multisets; duplicates accumulate by sum.
    ``mode="positional"``: tuples name positional tensor entries; the stored
    object is the symmetrization of the raw input, so each entry contributes
    ``c / (number of distinct orderings)`` to its canonical slot and missing
    orderings count as zero.
    """
    if mode not in ("canonical", "positional"):
        raise ValueError(f"unknown mode {mode!r}")
    if order < 0:
        raise ValueError(f"order must be >= 0, got {order}")
    out: dict[tuple[int, ...], float] = {}
    for tup, c in raw_entries:
        tup = tuple(int(i) for i in tup)
        if len(tup) != order:
            raise ValueError(f"tuple {tup} has length {len(tup)}, expected {order}")
        for i in tup:
            if not (0 <= i < grid.cells):
                raise ValueError(f"cell index {i} outside grid with {grid.cells} cells")
        key = tuple(sorted(tup))
        c = float(c)
        if mode == "positional":
            c /= multiplicity(key)
        out[key] = out.get(key, 0.0) + c
    return SymKernel(order, grid, out)


def inner_product(f, g) -> float:
    """Discrete L2 inner product of two same-order kernels."""
    return f.inner(g)


class LayeredKernel:
    """Symmetric kernel whose value depends only on the maximal cell index.

    ``layers[r]`` is the value on every argument tuple with max cell ``r``.
    Closed under linear combination, slot slicing and max-prefix indicator
    constructions; exactly the closure of constants on ``[0,t)^n``.
    """

    __slots__ = ("order", "grid", "layers")

    def __init__(self, order: int, grid: GridSpec, layers: np.ndarray):
        if order < 1:
            raise ValueError("layered kernels need order >= 1; use SymKernel.scalar")
        layers = np.asarray(layers, dtype=float)
        if layers.shape != (grid.cells,):
            raise ValueError(f"layers must have shape ({grid.cells},)")
        self.order = order
        self.grid = grid
        self.layers = layers

    @staticmethod
    def prefix_constant(order: int, grid: GridSpec, value: float, n_cells: int) -> "LayeredKernel":
        """Kernel constant = ``value`` on ``[0, n_cells*step)^order``, else 0."""
        layers = np.zeros(grid.cells)
        layers[:n_cells] = value
        return LayeredKernel(order, grid, layers)

    def max_layer_weights(self, order: int | None = None) -> np.ndarray:
        """Lebesgue volume of the region {max cell index == r} at this order.

        Computed as ``t_{r+1}^q - t_r^q`` with physical times, which avoids
        overflow of ``(r+1)^q`` against ``step^q`` at large order.
        """
        q = self.order if order is None else order
        t = np.arange(self.grid.cells + 1) * self.grid.step
        return t[1:] ** q - t[:-1] ** q

    def is_zero(self) -> bool:
        return not np.any(self.layers)

    def support_cells(self) -> set[int]:
        nz = np.nonzero(self.layers)[0]
        if nz.size == 0:
            return set()
        return set(range(int(nz[-1]) + 1))

    def scale(self, a: float) -> "LayeredKernel":
        return LayeredKernel(self.order, self.grid, a * self.layers)

    def add(self, other) -> "LayeredKernel":
        if isinstance(other, SymKernel):
            return self.to_sparse().add(other)
        if self.order != other.order:
            raise ValueError(f"order mismatch: {self.order} vs {other.order}")
        same_grid(self.grid, other.grid)
        return LayeredKernel(self.order, self.grid, self.layers + other.layers)

    def norm_sq(self) -> float:
        return float(np.dot(self.max_layer_weights(), self.layers ** 2))

    def inner(self, other) -> float:
        if isinstance(other, LayeredKernel):
            if self.order != other.order:
                raise ValueError(f"order mismatch: {self.order} vs {other.order}")
            same_grid(self.grid, other.grid)
            return float(np.dot(self.max_layer_weights(), self.layers * other.layers))
        if isinstance(other, SymKernel):
            if self.order != other.order:
                raise ValueError(f"order mismatch: {self.order} vs {other.order}")
            same_grid(self.grid, other.grid)
            w = self.grid.step ** self.order
            return w * sum(
                multiplicity(t) * c * self.layers[max(t)] for t, c in other.entries.items()
            )
        raise TypeError(f"cannot pair LayeredKernel with {type(other).__name__}")

    def slice_at(self, cell: int) -> "LayeredKernel | SymKernel":
        """Fix one slot at ``cell``: layer function becomes r -> h(max(r, cell))."""
        if self.order == 1:
            return SymKernel.scalar(self.grid, float(self.layers[cell]))
        new = self.layers.copy()
        new[:cell] = self.layers[cell]
        return LayeredKernel(self.order - 1, self.grid, new)

    def s_transform(self, xi: np.ndarray) -> float:
        prefix = np.concatenate(([0.0], np.cumsum(xi) * self.grid.step))
        powers = prefix ** self.order
        return float(np.dot(self.layers, powers[1:] - powers[:-1]))

    def to_sparse(self) -> SymKernel:
        """Materialize as sparse canonical tuples.  Guarded by size."""
        nz = np.nonzero(self.layers)[0]
        if nz.size == 0:
            return SymKernel(self.order, self.grid)
        top = int(nz[-1])
        n_multisets = math.comb(top + self.order + 1, self.order)
        if n_multisets > _DENSIFY_LIMIT:
            raise ValueError(
                f"layered kernel too large to densify ({n_multisets} multisets)"
            )
        ent: dict[tuple[int, ...], float] = {}
        from itertools import combinations_with_replacement

        for tup in combinations_with_replacement(range(top + 1), self.order):
            v = self.layers[max(tup)]
            if v != 0.0:
                ent[tup] = float(v)
        return SymKernel(self.order, self.grid, ent)

    def to_json(self) -> dict:
        return {
            "order": self.order,
            "grid": self.grid.to_json(),
            "layers": [float(v) for v in self.layers],
        }

    @staticmethod
    def from_json(obj: dict) -> "LayeredKernel":
        grid = GridSpec.from_json(obj["grid"])
        return LayeredKernel(int(obj["order"]), grid, np.array(obj["layers"], dtype=float))

    def __repr__(self):
        return f"LayeredKernel(order={self.order}, cells={self.grid.cells})"


class TimeSlotSymKernel:
    """Symmetrization of ``G(x_1..x_q, s) = phi[s, max(x)]`` plus an optional
    already-symmetric layered addend of the same total order ``q+1``.

    Norms and inner products use that the symmetrization projector ``P`` is
    orthogonal: ``<PG, PG> = <G, PG>`` reduces everything to sums over at most
    three cell indices, independent of the chaos order.
    """

    __slots__ = ("order", "grid", "phi", "extra")

    def __init__(self, order: int, grid: GridSpec, phi: np.ndarray, extra: np.ndarray | None = None):
        if order < 2:
            raise ValueError("TimeSlotSymKernel needs total order >= 2")
        phi = np.asarray(phi, dtype=float)
        if phi.shape != (grid.cells, grid.cells):
            raise ValueError("phi must be (cells, cells): [time slot, layer]")
        self.order = order
        self.grid = grid
        self.phi = phi
        self.extra = None if extra is None else np.asarray(extra, dtype=float)

    @property
    def _q(self) -> int:
        return self.order - 1

    def is_zero(self) -> bool:
        z = not np.any(self.phi)
        if self.extra is not None:
            z = z and not np.any(self.extra)
        return z

    def support_cells(self) -> set[int]:
        cells: set[int] = set()
        s_nz, r_nz = np.nonzero(self.phi)
        if s_nz.size:
            cells.update(int(s) for s in s_nz)
            cells.update(range(int(r_nz.max()) + 1))
        if self.extra is not None:
            nz = np.nonzero(self.extra)[0]
            if nz.size:
                cells.update(range(int(nz[-1]) + 1))
        return cells

    def scale(self, a: float) -> "TimeSlotSymKernel":
        extra = None if self.extra is None else a * self.extra
        return TimeSlotSymKernel(self.order, self.grid, a * self.phi, extra)

    def add(self, other) -> "TimeSlotSymKernel":
        if isinstance(other, TimeSlotSymKernel):
            if self.order != other.order:
                raise ValueError(f"order mismatch: {self.order} vs {other.order}")
            same_grid(self.grid, other.grid)
            extra = self.extra
            if other.extra is not None:
                extra = other.extra if extra is None else extra + other.extra
            return TimeSlotSymKernel(self.order, self.grid, self.phi + other.phi, extra)
        if isinstance(other, LayeredKernel):
            if self.order != other.order:
                raise ValueError(f"order mismatch: {self.order} vs {other.order}")
            same_grid(self.grid, other.grid)
            extra = other.layers if self.extra is None else self.extra + other.layers
            return TimeSlotSymKernel(self.order, self.grid, self.phi.copy(), extra)
        raise TypeError(f"cannot add {type(other).__name__} to TimeSlotSymKernel")

    def _layer_weights(self, q: int) -> np.ndarray:
        t = np.arange(self.grid.cells + 1) * self.grid.step
        return t[1:] ** q - t[:-1] ** q

    def _gg_inner(self, other: "TimeSlotSymKernel") -> float:
        """<G1, P G2> for the raw (pre-symmetrization) families."""
        q = self._q
        step = self.grid.step
        M = self.grid.cells
        wq = self._layer_weights(q)
        direct = step * float(np.einsum("sr,sr,r->", self.phi, other.phi, wq))
        if q == 1:
            swapped = step * step * float(np.sum(self.phi * other.phi.T))
        else:
            wq1 = self._layer_weights(q - 1)
            swapped = 0.0
            idx = np.arange(M)
            for r in range(M):
                if wq1[r] == 0.0:
                    continue
                mx = np.maximum(idx, r)
                a_mat = self.phi[:, mx]        # [s, a] = phi1_s(max(r, a))
                b_mat = other.phi[:, mx]       # [a, s] = phi2_a(max(r, s))
                swapped += wq1[r] * float(np.sum(a_mat * b_mat.T))
            swapped *= step * step
        return (direct + q * swapped) / (q + 1)

    def _g_layered_inner(self, layers: np.ndarray) -> float:
        """<G, L> for a symmetric layered kernel L of the same total order."""
        q = self._q
        step = self.grid.step
        M = self.grid.cells
        wq = self._layer_weights(q)
        idx = np.arange(M)
        total = 0.0
        for s in range(M):
            row = self.phi[s]
            if not np.any(row):
                continue
            lmax = layers[np.maximum(idx, s)]
            total += float(np.dot(wq, row * lmax))
        return step * total

    def inner(self, other) -> float:
        if isinstance(other, TimeSlotSymKernel):
            if self.order != other.order:
                raise ValueError(f"order mismatch: {self.order} vs {other.order}")
            same_grid(self.grid, other.grid)
            total = self._gg_inner(other)
            if other.extra is not None:
                total += self._g_layered_inner(other.extra)
            if self.extra is not None:
                total += other._g_layered_inner(self.extra)
            if self.extra is not None and other.extra is not None:
                wq1 = self._layer_weights(self.order)
                total += float(np.dot(wq1, self.extra * other.extra))
            return total
        if isinstance(other, LayeredKernel):
            if self.order != other.order:
                raise ValueError(f"order mismatch: {self.order} vs {other.order}")
            same_grid(self.grid, other.grid)
            total = self._g_layered_inner(other.layers)
            if self.extra is not None:
                total += float(np.dot(self._layer_weights(self.order), self.extra * other.layers))
            return total
        if isinstance(other, SymKernel):
            return self.to_sparse().inner(other)
        raise TypeError(f"cannot pair TimeSlotSymKernel with {type(other).__name__}")

    def norm_sq(self) -> float:
        return self.inner(self)

    def s_transform(self, xi: np.ndarray) -> float:
        q = self._q
        step = self.grid.step
        prefix = np.concatenate(([0.0], np.cumsum(xi) * step))
        powers = prefix ** q
        layer_s = powers[1:] - powers[:-1]
        total = step * float(np.einsum("s,sr,r->", xi, self.phi, layer_s))
        if self.extra is not None:
            powers1 = prefix ** self.order
            total += float(np.dot(self.extra, powers1[1:] - powers1[:-1]))
        return total

    def to_sparse(self) -> SymKernel:
        """Materialize via explicit symmetrization.  Small orders only."""
        from itertools import combinations_with_replacement

        M = self.grid.cells
        n_multisets = math.comb(M + self.order - 1, self.order)
        if n_multisets > _DENSIFY_LIMIT:
            raise ValueError("TimeSlotSymKernel too large to densify")
        ent: dict[tuple[int, ...], float] = {}
        for tup in combinations_with_replacement(range(M), self.order):
            val = 0.0
            for v in set(tup):
                rest = remove_once(tup, (v,))
                r = max(rest)
                val += tup.count(v) * self.phi[v, r]
            val /= self.order
            if self.extra is not None:
                val += self.extra[max(tup)]
            if val != 0.0:
                ent[tup] = val
        return SymKernel(self.order, self.grid, ent)

    def __repr__(self):
        return f"TimeSlotSymKernel(order={self.order}, cells={self.grid.cells})"


def kernel_from_json(obj: dict):
    if "entries" in obj:
        return SymKernel.from_json(obj)
    if "layers" in obj:
        return LayeredKernel.from_json(obj)
    raise ValueError("unrecognized kernel serialization")
