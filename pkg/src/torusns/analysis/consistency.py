"""Consistency residuals of a computed trajectory against smooth test functions.

A trajectory is a list of states on a uniform time grid ``t_k = t_0 + k dt``;
it is read as piecewise constant in time, state ``k`` on ``[t_k, t_{k+1})``.
Space-time integrals of the test functions over each slab are exact for
`Trig` inputs and Gauss-Legendre otherwise, so each residual is the
difference of two exactly assembled quantities.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .. import fields as F
from .. import physics
from ..physics import GasLaw, ViscosityLaw


@dataclass
class ConsistencyReport:
    test_id: str
    tau: float
    e_rho: float
    e_m: float
    h: float
    dt: float


def _grid(traj, tau):
    t0 = traj[0].t
    if len(traj) == 1:
        if abs(tau - t0) > 1e-12:
            raise ValueError("tau outside the trajectory horizon")
        return 0, 0.0
    dt = traj[1].t - traj[0].t
    k = int(round((tau - t0) / dt))
    if k < 0 or k >= len(traj) or abs(t0 + k * dt - tau) > 1e-9 * max(1.0, abs(tau)):
        raise ValueError(f"tau={tau} is not a time level of the trajectory")
    return k, dt


def _check_uniform(traj):
    if len(traj) > 2:
        steps = np.diff([s.t for s in traj])
        if np.max(np.abs(steps - steps[0])) > 1e-9 * steps[0]:
            raise ValueError("trajectory must be stored at every time level")


def density_residual(traj, phi, tau: float | None = None, order: int = 5) -> float:
    """``e_rho = [int rho phi]_0^tau - int_0^tau int (rho d_t phi + rho Pi_Q u . grad phi)``."""
    _check_uniform(traj)
    tau = traj[-1].t if tau is None else tau
    K, dt = _grid(traj, tau)
    m = traj[0].mesh
    lhs = (F.inner(m, traj[K].rho, F.cell_mean(m, phi, traj[K].t, order=order))
           - F.inner(m, traj[0].rho, F.cell_mean(m, phi, traj[0].t, order=order)))
    dphi_t = phi.dt() if hasattr(phi, "dt") else None
    grad = phi.grad() if hasattr(phi, "grad") else None
    if dphi_t is None or grad is None:
        raise TypeError("test function must provide dt() and grad()")
    acc = 0.0
    for k in range(K):
        s = traj[k]
        ub = s.cell_velocity()
        t = s.t
        term = F.inner(m, s.rho, F.cell_mean(m, dphi_t, t, dt, order))
        for a in range(m.dim):
            term += F.inner(m, s.rho * ub[a], F.cell_mean(m, grad[a], t, dt, order))
        acc += dt * term
    return float(lhs - acc)


def _viscous_pairing(m, s, Phi, t, dt, order):
    """``int grad_h u : grad Phi`` and ``int div_h u div Phi`` averaged over ``[t, t + dt]``."""
    d = m.dim
    gu = 0.0
    if s.staggered:
        G = F.grad_B(m, s.vel)
        for i in range(d):
            for j in range(d):
                gu += F.inner(m, G[i, j], F.bidual_average(m, Phi[i].diff(j), i, j, t, dt, order))
        dv = F.div_W(m, s.vel)
    else:
        G = F.grad_D_vector(m, s.vel)
        for a in range(d):
            for i in range(d):
                gu += F.inner(m, G[a, i], F.dual_average(m, Phi[a].diff(i), i, t, dt, order))
        dv = F.div_Q(m, s.vel)
    divPhi = Phi[0].diff(0)
    for a in range(1, d):
        divPhi = divPhi + Phi[a].diff(a)
    dd = F.inner(m, dv, F.cell_mean(m, divPhi, t, dt, order))
    return gu, dd


def momentum_residual(traj, Phi, law: GasLaw, visc: ViscosityLaw, tau: float | None = None,
                      order: int = 5) -> float:
    """``e_m`` of the momentum consistency formulation for a vector test function ``Phi``."""
    _check_uniform(traj)
    tau = traj[-1].t if tau is None else tau
    K, dt = _grid(traj, tau)
    m = traj[0].mesh
    d = m.dim

    def mom_pair(s, t):
        ub = s.cell_velocity()
        return sum(F.inner(m, s.rho * ub[a], F.cell_mean(m, Phi[a], t, order=order))
                   for a in range(d))

    lhs = mom_pair(traj[K], traj[K].t) - mom_pair(traj[0], traj[0].t)
    acc = 0.0
    for k in range(K):
        s = traj[k]
        t = s.t
        ub = s.cell_velocity()
        p = physics.pressure(law, s.rho)
        term = 0.0
        for a in range(d):
            q = s.rho * ub[a]
            term += F.inner(m, q, F.cell_mean(m, Phi[a].dt(), t, dt, order))
            for b in range(d):
                term += F.inner(m, q * ub[b], F.cell_mean(m, Phi[a].diff(b), t, dt, order))
            term += F.inner(m, p, F.cell_mean(m, Phi[a].diff(a), t, dt, order))
        gu, dd = _viscous_pairing(m, s, Phi, t, dt, order)
        term -= visc.mu * gu + visc.nu * dd
        acc += dt * term
    return float(lhs - acc)


def consistency_report(traj, phi, Phi, law, visc, tau=None, test_id="", order=5):
    tau = traj[-1].t if tau is None else tau
    dt = traj[1].t - traj[0].t if len(traj) > 1 else 0.0
    return ConsistencyReport(test_id, tau, density_residual(traj, phi, tau, order),
                             momentum_residual(traj, Phi, law, visc, tau, order),
                             traj[0].mesh.h, dt)
