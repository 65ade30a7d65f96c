"""Upwind and diffusive upwind fluxes.

Face fluxes are stored per direction (shape ``(d, N, ..., N)``), entry
``[i]`` on the face between ``K`` and ``K + e_i``; a positive value is a
flow from ``K`` to ``K + e_i``.
"""

from __future__ import annotations

import math

import numpy as np

from . import fields as F
from .mesh import Mesh


def h_power(h: float, eps: float) -> float:
    """``h^eps`` with ``eps = 0`` giving exactly 1."""
    if not eps > -1:
        raise ValueError(f"stabilization exponent must satisfy eps > -1, got {eps}")
    if eps == 0:
        return 1.0
    return math.exp(eps * math.log(h))


def upwind_value(r_in, r_out, u_sigma):
    """Scalar ``Up = r_in u^+ + r_out u^-``."""
    return r_in * np.maximum(u_sigma, 0.0) + r_out * np.minimum(u_sigma, 0.0)


def face_velocity_cell(v: np.ndarray) -> np.ndarray:
    """``u_sigma = <v> . n`` for a cell-centered velocity."""
    return F.average_vector(v)


def face_velocity_staggered(u: np.ndarray) -> np.ndarray:
    """``u_sigma = u . n`` for a staggered velocity."""
    return np.asarray(u)


def upwind(r: np.ndarray, u_sigma: np.ndarray) -> np.ndarray:
    return np.stack([upwind_value(r, F.fwd(r, i), u_sigma[i]) for i in range(r.ndim)])


def diffusive_upwind(r: np.ndarray, u_sigma: np.ndarray, h: float, eps: float) -> np.ndarray:
    """``Fup = Up - h^eps [[r]]``."""
    c = h_power(h, eps)
    return upwind(r, u_sigma) - c * F.jump_faces(r)


def vector_upwind(phi: np.ndarray, u_sigma: np.ndarray) -> np.ndarray:
    """Componentwise `upwind`; result ``[a, i]`` is component ``a`` on faces of direction ``i``."""
    return np.stack([upwind(pa, u_sigma) for pa in phi])


def vector_diffusive_upwind(phi: np.ndarray, u_sigma: np.ndarray, h: float, eps: float) -> np.ndarray:
    return np.stack([diffusive_upwind(pa, u_sigma, h, eps) for pa in phi])


def convective_cell_update(m: Mesh, flux: np.ndarray) -> np.ndarray:
    """Net outflow per unit volume ``(1/|K|) sum_{sigma in E(K)} |sigma| F_{sigma,K}``.

    ``flux`` may carry leading component axes: ``(..., d, N, ..., N)``.
    """
    flux = np.asarray(flux)
    d = m.dim
    lead = flux.ndim - d - 1
    out = 0.0
    for i in range(d):
        fi = flux[(slice(None),) * lead + (i,)]
        out = out + (fi - np.roll(fi, 1, axis=lead + i)) / m.h
    return out
