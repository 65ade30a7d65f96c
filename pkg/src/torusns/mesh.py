"""Uniform periodic grids on the unit torus.

Layout conventions (used by every other module):

* Directions are 0-based axes ``0 .. d-1``.
* A cell is a lattice tuple ``k`` with center ``(k + 1/2) h``.  Cell arrays
  have shape ``(N,) * d`` and are flattened row-major (C order).
* A face in direction ``i`` is stored at the index of its *left* cell ``K``;
  it separates ``K`` and ``L = K + e_i`` (mod N), so ``x_L - x_K = +h e_i``.
  Face arrays therefore share the cell shape, one array per direction.
* The bidual cell of the pair ``(i, j)`` stored at index ``p`` belongs to the
  dual face between ``D_sigma`` (``sigma = p - e_j``) and ``D_sigma'``
  (``sigma' = p``), both in direction ``i``.  Its center is
  ``x_p + h/2 e_i - h/2 e_j``; for ``i == j`` it is exactly cell ``p``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np


class FaceIndex(NamedTuple):
    direction: int
    index: tuple[int, ...]


class BidualIndex(NamedTuple):
    directions: tuple[int, int]
    index: tuple[int, ...]


@dataclass(frozen=True)
class Mesh:
    """Uniform ``N^d`` periodic grid of the unit torus."""

    dim: int
    cells_per_axis: int

    def __post_init__(self):
        if self.dim not in (2, 3):
            raise ValueError(f"dimension must be 2 or 3, got {self.dim}")
        if self.cells_per_axis < 2:
            raise ValueError(f"need at least 2 cells per axis, got {self.cells_per_axis}")

    @property
    def n(self) -> int:
        return self.cells_per_axis

    @property
    def h(self) -> float:
        return 1.0 / self.cells_per_axis

    @property
    def shape(self) -> tuple[int, ...]:
        return (self.cells_per_axis,) * self.dim

    @property
    def num_cells(self) -> int:
        return self.cells_per_axis**self.dim

    @property
    def num_faces(self) -> int:
        return self.dim * self.num_cells

    @property
    def cell_volume(self) -> float:
        return self.h**self.dim

    @property
    def face_area(self) -> float:
        return self.h ** (self.dim - 1)

    def wrap(self, index) -> tuple[int, ...]:
        return tuple(int(k) % self.n for k in index)

    def shift(self, index, axis: int, step: int = 1) -> tuple[int, ...]:
        idx = list(index)
        idx[axis] += step
        return self.wrap(idx)

    def flat(self, index) -> int:
        return int(np.ravel_multi_index(self.wrap(index), self.shape))

    def unflat(self, k: int) -> tuple[int, ...]:
        return tuple(int(v) for v in np.unravel_index(k, self.shape))

    def centers(self, offset=None) -> tuple[np.ndarray, ...]:
        """Coordinate arrays of cell centers shifted by ``offset`` (in units of h)."""
        off = np.zeros(self.dim) if offset is None else np.asarray(offset, dtype=float)
        axes = [(np.arange(self.n) + 0.5 + off[a]) * self.h for a in range(self.dim)]
        return tuple(np.meshgrid(*axes, indexing="ij"))

    def cell_faces(self, cell) -> list[tuple[FaceIndex, int]]:
        """The ``2d`` faces of a cell with the sign of the outward normal along ``e_i``."""
        cell = self.wrap(cell)
        out = []
        for i in range(self.dim):
            out.append((FaceIndex(i, self.shift(cell, i, -1)), -1))
            out.append((FaceIndex(i, cell), +1))
        return out

    def neighbor(self, cell, face: FaceIndex) -> tuple[int, ...]:
        K, L, _ = face_neighbors(self, face)
        cell = self.wrap(cell)
        if cell == K:
            return L
        if cell == L:
            return K
        raise ValueError(f"face {face} is not a face of cell {cell}")


def build_mesh(d: int, N: int) -> Mesh:
    return Mesh(d, N)


def face_neighbors(m: Mesh, face: FaceIndex) -> tuple[tuple[int, ...], tuple[int, ...], int]:
    """Ordered pair ``(K, L)`` with ``x_L - x_K = +h e_i`` and the normal sign ``+1``."""
    K = m.wrap(face.index)
    return K, m.shift(K, face.direction, +1), +1


def face_between(m: Mesh, a, b) -> FaceIndex:
    """The face shared by two adjacent cells, independent of argument order."""
    a, b = m.wrap(a), m.wrap(b)
    for i in range(m.dim):
        if m.shift(a, i, +1) == b:
            return FaceIndex(i, a)
        if m.shift(b, i, +1) == a:
            return FaceIndex(i, b)
    raise ValueError(f"cells {a} and {b} are not neighbours")


def dual_neighbors(m: Mesh, face: FaceIndex, j: int) -> tuple[FaceIndex, FaceIndex, BidualIndex]:
    """Dual cells ``D_sigma, D_sigma'`` with ``x_sigma' - x_sigma = h e_j`` and their bidual cell."""
    if not 0 <= j < m.dim:
        raise ValueError(f"direction {j} out of range")
    i = face.direction
    sigma = FaceIndex(i, m.wrap(face.index))
    sigma_p = FaceIndex(i, m.shift(sigma.index, j, +1))
    return sigma, sigma_p, BidualIndex((i, j), sigma_p.index)


def bidual_center(m: Mesh, eps: BidualIndex) -> np.ndarray:
    i, j = eps.directions
    x = (np.asarray(eps.index, dtype=float) + 0.5) * m.h
    x[i] += 0.5 * m.h
    x[j] -= 0.5 * m.h
    return np.mod(x, 1.0)


def face_center(m: Mesh, face: FaceIndex) -> np.ndarray:
    x = (np.asarray(face.index, dtype=float) + 0.5) * m.h
    x[face.direction] += 0.5 * m.h
    return np.mod(x, 1.0)
