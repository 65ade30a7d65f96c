"""Discrete fluid state at one time level."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import fields as F
from .mesh import Mesh


@dataclass
class FluidState:
    """Density on cells and velocity either on cells (FV) or on faces (MAC, ``staggered=True``)."""

    mesh: Mesh
    rho: np.ndarray
    vel: np.ndarray
    t: float = 0.0
    staggered: bool = False

    def __post_init__(self):
        self.rho = np.asarray(self.rho, dtype=float)
        self.vel = np.asarray(self.vel, dtype=float)
        m = self.mesh
        if self.rho.shape != m.shape:
            raise ValueError(f"density shape {self.rho.shape} does not match mesh {m.shape}")
        if self.vel.shape != (m.dim,) + m.shape:
            raise ValueError(f"velocity shape {self.vel.shape} does not match mesh {m.shape}")

    @property
    def mass(self) -> float:
        return float(np.sum(self.rho) * self.mesh.cell_volume)

    @property
    def min_density(self) -> float:
        return float(self.rho.min())

    @property
    def max_density(self) -> float:
        return float(self.rho.max())

    def cell_velocity(self) -> np.ndarray:
        return F.cell_average(self.vel) if self.staggered else self.vel

    @property
    def max_speed(self) -> float:
        return float(np.sqrt(np.max(np.sum(self.cell_velocity() ** 2, axis=0))))

    def pack(self) -> np.ndarray:
        """Unknown vector ``[rho, u_1, ..., u_d]`` in row-major order."""
        return np.concatenate([self.rho.ravel(), self.vel.ravel()])

    def unpack(self, z: np.ndarray, t: float | None = None) -> "FluidState":
        n = self.mesh.num_cells
        return FluidState(self.mesh, z[:n].reshape(self.mesh.shape),
                          z[n:].reshape((self.mesh.dim,) + self.mesh.shape),
                          self.t if t is None else t, self.staggered)

    def copy(self) -> "FluidState":
        return FluidState(self.mesh, self.rho.copy(), self.vel.copy(), self.t, self.staggered)
