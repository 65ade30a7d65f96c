"""Sparse Jacobians of the FV and MAC residuals.

Unknowns are ordered ``[rho, u_1, ..., u_d]`` with every block flattened
row-major, matching `FluidState.pack`.  The upwind switch ``a^+`` is
differentiated as the Heaviside function (value 1/2 at 0); with
``picard=True`` the flux derivatives with respect to the face velocity are
dropped, which freezes the transporting velocity.
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np
import scipy.sparse as sp

from . import fields as F
from . import physics
from .fluxes import h_power
from .mesh import Mesh


@lru_cache(maxsize=32)
def _shifts(dim: int, n: int):
    """Forward and backward periodic shift matrices per axis."""
    shape = (n,) * dim
    size = n**dim
    idx = np.arange(size).reshape(shape)
    rows = np.arange(size)
    ones = np.ones(size)
    fwd, bwd = [], []
    for i in range(dim):
        cols = np.roll(idx, -1, axis=i).ravel()
        P = sp.csr_matrix((ones, (rows, cols)), shape=(size, size))
        fwd.append(P)
        bwd.append(P.T.tocsr())
    return fwd, bwd


def _D(v):
    return sp.diags(np.asarray(v).ravel())


def _heaviside(a):
    return np.where(a > 0, 1.0, np.where(a < 0, 0.0, 0.5))


class _Ops:
    def __init__(self, m: Mesh):
        self.m = m
        self.P, self.B = _shifts(m.dim, m.n)
        self.I = sp.identity(m.num_cells, format="csr")
        h = m.h
        # d_M: (x - B x)/h,  d_D: (P x - x)/h
        self.dM = [(self.I - B) / h for B in self.B]
        self.dD = [(P - self.I) / h for P in self.P]
        self.avgP = [(self.I + P) * 0.5 for P in self.P]
        self.avgB = [(self.I + B) * 0.5 for B in self.B]
        self.lap = sum(P + B for P, B in zip(self.P, self.B)) / h**2 - (2.0 * m.dim / h**2) * self.I
        self.central = [(P - B) / (2.0 * h) for P, B in zip(self.P, self.B)]

    def flux_dr(self, a, i, c=0.0):
        """d/dr of ``r a^+ + (P r) a^- - c (P r - r)`` on faces of direction ``i``."""
        return _D(np.maximum(a, 0.0)) + _D(np.minimum(a, 0.0)) @ self.P[i] - c * (self.P[i] - self.I)

    def flux_da(self, r, a, i):
        """d/da of ``r a^+ + (P r) a^-``."""
        H = _heaviside(a)
        return _D(r * H + F.fwd(r, i) * (1.0 - H))


def jacobian(prev, cand, cfg, picard: bool = False) -> sp.csr_matrix:
    if cfg.staggered:
        return mac_jacobian(prev, cand, cfg, picard)
    return fv_jacobian(prev, cand, cfg, picard)


def fv_jacobian(prev, cand, cfg, picard: bool = False) -> sp.csr_matrix:
    m = cand.mesh
    o = _Ops(m)
    d, dt = m.dim, cfg.dt
    c = h_power(m.h, cfg.eps)
    rho, u = cand.rho, cand.vel
    a = F.average_vector(u)
    mu, nu = cfg.visc.mu, cfg.visc.nu
    dp = physics.pressure_derivative(cfg.law, rho)
    # div_Q v = sum_b dM_b avgP_b v_b
    divq = [o.dM[b] @ o.avgP[b] for b in range(d)]

    blocks = [[None] * (d + 1) for _ in range(d + 1)]
    conv_r = sum(o.dM[i] @ o.flux_dr(a[i], i, c) for i in range(d))
    blocks[0][0] = o.I / dt + conv_r
    for b in range(d):
        blocks[0][b + 1] = (None if picard else o.dM[b] @ o.flux_da(rho, a[b], b) @ o.avgP[b])
    for al in range(d):
        q = rho * u[al]
        conv_q = sum(o.dM[i] @ o.flux_dr(a[i], i, c) for i in range(d))
        base = o.I / dt + conv_q
        blocks[al + 1][0] = base @ _D(u[al]) + o.central[al] @ _D(dp)
        for b in range(d):
            blk = -nu * o.central[al] @ divq[b]
            if b == al:
                blk = blk + base @ _D(rho) - mu * o.lap
            if not picard:
                blk = blk + o.dM[b] @ o.flux_da(q, a[b], b) @ o.avgP[b]
            blocks[al + 1][b + 1] = blk
    return sp.bmat(blocks, format="csr")


def mac_jacobian(prev, cand, cfg, picard: bool = False) -> sp.csr_matrix:
    m = cand.mesh
    o = _Ops(m)
    d, dt = m.dim, cfg.dt
    c = h_power(m.h, cfg.eps)
    cs = c * m.h
    rho, u = cand.rho, cand.vel
    ub = F.cell_average(u)
    mu, nu = cfg.visc.mu, cfg.visc.nu
    dp = physics.pressure_derivative(cfg.law, rho)

    blocks = [[None] * (d + 1) for _ in range(d + 1)]
    blocks[0][0] = o.I / dt + sum(o.dM[i] @ o.flux_dr(u[i], i, c) for i in range(d))
    for b in range(d):
        blocks[0][b + 1] = None if picard else o.dM[b] @ o.flux_da(rho, u[b], b)

    conv_q = sum(o.dM[j] @ o.flux_dr(u[j], j) for j in range(d))
    base = o.I / dt + conv_q
    for i in range(d):
        q = rho * ub[i]
        # T_i - Stab_i, differentiated in rho and u_k, then averaged onto the faces
        dT_rho = base @ _D(ub[i])
        dS_rho = sum(o.dM[j] @ _D(F.average_face(ub[i], j)) @ o.dD[j] for j in range(d))
        dS_ui = sum(o.dM[j] @ _D(F.d_D(m, rho, j)) @ o.avgP[j] for j in range(d)) @ o.avgB[i]
        blocks[i + 1][0] = o.avgP[i] @ (dT_rho - cs * dS_rho) + o.dD[i] @ _D(dp)
        for k in range(d):
            blk = -nu * o.dD[i] @ o.dM[k]
            inner = None
            if k == i:
                inner = base @ _D(rho) @ o.avgB[i] - cs * dS_ui
            if not picard:
                extra = o.dM[k] @ o.flux_da(q, u[k], k)
                inner = extra if inner is None else inner + extra
            if inner is not None:
                blk = blk + o.avgP[i] @ inner
            if k == i:
                blk = blk - mu * o.lap
            blocks[i + 1][k + 1] = blk
    return sp.bmat(blocks, format="csr")
