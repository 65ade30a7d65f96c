"""Piecewise-constant fields, projections and discrete differential operators.

Array layouts (see `torusns.mesh` for the indexing of faces and bidual cells):

* cell field ``r``: shape ``(N,) * d``
* cell vector field ``v``: shape ``(d, N, ..., N)``, ``v[a]`` is component ``a``
* staggered field ``u``: shape ``(d, N, ..., N)``, ``u[i]`` lives on the faces
  of direction ``i`` (the ``i``-th dual grid)
* face-valued quantities per direction (averages, jumps, ``grad_D``): shape
  ``(d, N, ..., N)``, entry ``[i]`` lives on the faces of direction ``i``
* tensors: shape ``(d, d, N, ..., N)``.  ``grad_B(u)[i, j]`` lives on the
  bidual grid ``(i, j)``; ``grad_D_vector(v)[a, i]`` on the faces of
  direction ``i``; ``grad_Q(v)[a, j]`` on cells.

All cells, dual cells and bidual cells have measure ``h^d`` so every integral
of a piecewise-constant quantity is ``h^d`` times a plain sum.
"""

from __future__ import annotations

import numpy as np

from .mesh import Mesh
from .smooth import box_average


def fwd(a: np.ndarray, axis: int) -> np.ndarray:
    """Value at ``index + e_axis``."""
    return np.roll(a, -1, axis=axis)


def bwd(a: np.ndarray, axis: int) -> np.ndarray:
    """Value at ``index - e_axis``."""
    return np.roll(a, 1, axis=axis)


def integrate(m: Mesh, a) -> float:
    """Integral of a piecewise-constant field over the torus (any grid, any rank)."""
    return float(np.sum(a) * m.cell_volume)


def inner(m: Mesh, a, b) -> float:
    return float(np.sum(np.asarray(a) * np.asarray(b)) * m.cell_volume)


# ---- averages and jumps ---------------------------------------------------

def average_face(r: np.ndarray, axis: int) -> np.ndarray:
    return 0.5 * (r + fwd(r, axis))


def jump_face(r: np.ndarray, axis: int) -> np.ndarray:
    """``r_L - r_K`` on faces of direction ``axis``."""
    return fwd(r, axis) - r


def average_faces(r: np.ndarray) -> np.ndarray:
    return np.stack([average_face(r, i) for i in range(r.ndim)])


def jump_faces(r: np.ndarray) -> np.ndarray:
    return np.stack([jump_face(r, i) for i in range(r.ndim)])


def average_vector(v: np.ndarray) -> np.ndarray:
    """``<v> = (<v_1>^(1), ..., <v_d>^(d))``: a cell vector field sent to the staggered grid."""
    return np.stack([average_face(v[i], i) for i in range(v.shape[0])])


def cell_average(u: np.ndarray) -> np.ndarray:
    """``overline{u}``: mean of the two faces of each cell in the component's direction."""
    return np.stack([0.5 * (u[i] + bwd(u[i], i)) for i in range(u.shape[0])])


# ---- gradients --------------------------------------------------------------

def d_M(m: Mesh, ui: np.ndarray, i: int) -> np.ndarray:
    """Face-to-cell difference ``(u_{sigma_{K,i+}} - u_{sigma_{K,i-}}) / h``."""
    return (ui - bwd(ui, i)) / m.h


def d_D(m: Mesh, r: np.ndarray, i: int) -> np.ndarray:
    """Cell-to-face difference ``(r_L - r_K) / h``."""
    return (fwd(r, i) - r) / m.h


def grad_D(m: Mesh, r: np.ndarray) -> np.ndarray:
    return np.stack([d_D(m, r, i) for i in range(m.dim)])


def grad_D_vector(m: Mesh, v: np.ndarray) -> np.ndarray:
    return np.stack([grad_D(m, v[a]) for a in range(v.shape[0])])


def grad_B(m: Mesh, u: np.ndarray) -> np.ndarray:
    """``[i, j]``: ``(u_{sigma'} - u_sigma) / h`` on the bidual grid ``(i, j)``."""
    d = m.dim
    out = np.empty((d, d) + m.shape)
    for i in range(d):
        for j in range(d):
            out[i, j] = (u[i] - bwd(u[i], j)) / m.h
    return out


def grad_Q(m: Mesh, v: np.ndarray) -> np.ndarray:
    """``sum_sigma |sigma|/|K| <v> (x) n``: centered differences of every component."""
    d = m.dim
    out = np.empty((v.shape[0], d) + m.shape)
    for a in range(v.shape[0]):
        for j in range(d):
            out[a, j] = (fwd(v[a], j) - bwd(v[a], j)) / (2.0 * m.h)
    return out


def grad_Q_scalar(m: Mesh, s: np.ndarray) -> np.ndarray:
    return grad_Q(m, s[None])[0]


def grad_PiE(m: Mesh, f, t: float = 0.0) -> np.ndarray:
    """``(d_M1 Pi_E^(1) f, ..., d_Md Pi_E^(d) f)`` for a smooth scalar ``f``."""
    return np.stack([d_M(m, project_E_component(m, f, i, t), i) for i in range(m.dim)])


# ---- divergences --------------------------------------------------------------

def div_W(m: Mesh, u: np.ndarray) -> np.ndarray:
    return sum(d_M(m, u[i], i) for i in range(m.dim))


def div_Q(m: Mesh, v: np.ndarray) -> np.ndarray:
    return sum(d_M(m, average_face(v[i], i), i) for i in range(m.dim))


def laplacian_h(m: Mesh, r: np.ndarray) -> np.ndarray:
    """Standard ``2d + 1`` point Laplacian (``div_W grad_D``); also valid on any dual grid."""
    out = -2.0 * m.dim * r
    for i in range(m.dim):
        out = out + fwd(r, i) + bwd(r, i)
    return out / m.h**2


# ---- projections ------------------------------------------------------------

def _full(m: Mesh):
    return [m.h] * m.dim


def project_Q(m: Mesh, f, t: float = 0.0, order: int = 5) -> np.ndarray:
    """Cell averages."""
    return box_average(f, m.centers(), _full(m), t, order=order)


def project_E_component(m: Mesh, f, i: int, t: float = 0.0, order: int = 5) -> np.ndarray:
    """Averages of ``f`` over the faces of direction ``i``."""
    off = np.zeros(m.dim)
    off[i] = 0.5
    widths = _full(m)
    widths[i] = 0.0
    return box_average(f, m.centers(off), widths, t, order=order)


def project_E(m: Mesh, F, t: float = 0.0, order: int = 5) -> np.ndarray:
    """``Pi_E F = (Pi_E^(1) F_1, ..., Pi_E^(d) F_d)``."""
    return np.stack([project_E_component(m, F[i], i, t, order) for i in range(m.dim)])


def bidual_offset(m: Mesh, i: int, j: int) -> np.ndarray:
    off = np.zeros(m.dim)
    off[i] += 0.5
    off[j] -= 0.5
    return off


def project_eps(m: Mesh, f, i: int, j: int, t: float = 0.0, order: int = 5) -> np.ndarray:
    """Averages of ``f`` over the dual faces ``epsilon in E_ij`` (values on bidual cells)."""
    widths = _full(m)
    widths[j] = 0.0
    return box_average(f, m.centers(bidual_offset(m, i, j)), widths, t, order=order)


def dual_average(m: Mesh, f, i: int, t: float = 0.0, dt: float = 0.0, order: int = 5) -> np.ndarray:
    """Averages over the dual cells ``D_sigma``, ``sigma`` in direction ``i``."""
    off = np.zeros(m.dim)
    off[i] = 0.5
    return box_average(f, m.centers(off), _full(m), t, dt, order=order)


def bidual_average(m: Mesh, f, i: int, j: int, t: float = 0.0, dt: float = 0.0,
                   order: int = 5) -> np.ndarray:
    return box_average(f, m.centers(bidual_offset(m, i, j)), _full(m), t, dt, order=order)


def cell_mean(m: Mesh, f, t: float = 0.0, dt: float = 0.0, order: int = 5) -> np.ndarray:
    """Space (and optionally time-slab) cell averages."""
    return box_average(f, m.centers(), _full(m), t, dt, order=order)
