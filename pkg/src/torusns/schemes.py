"""Implicit FV and MAC schemes: residuals, Newton steps and time loops.

Residuals are the strong (per unit volume) form of the weak schemes tested
against indicator functions of cells (FV, and the MAC mass equation) or dual
cells (MAC momentum), so that ``h^d * residual`` equals the Galerkin system in
the piecewise-constant basis.
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy.sparse.linalg import splu

from . import fields as F
from . import physics
from .fluxes import convective_cell_update, diffusive_upwind, face_velocity_cell, h_power, upwind
from .mesh import Mesh
from .physics import GasLaw, ViscosityLaw
from .smooth import Trig
from .state import FluidState

FV = "fv"
MAC = "mac"
SCHEMES = (FV, MAC)


class SchemeError(RuntimeError):
    """A step could not be completed; the caller may retry with a smaller time step."""

    def __init__(self, msg: str, step: int | None = None):
        super().__init__(msg if step is None else f"step {step}: {msg}")
        self.step = step


class NonlinearDivergence(SchemeError):
    pass


class PositivityLoss(SchemeError):
    pass


@dataclass(frozen=True)
class SchemeConfig:
    law: GasLaw
    visc: ViscosityLaw
    eps: float = 0.0
    dt: float = 0.01
    scheme: str = FV
    tol: float = 1e-10
    max_iter: int = 50
    source_rho: Callable | None = None
    source_m: Sequence[Callable] | None = None
    quad_order: int = 5
    max_retries: int = 0

    def __post_init__(self):
        if self.scheme not in SCHEMES:
            raise ValueError(f"unknown scheme {self.scheme!r}")
        if not self.dt > 0:
            raise ValueError(f"time step must be positive, got {self.dt}")
        if not self.eps > -1:
            raise ValueError(f"stabilization exponent must satisfy eps > -1, got {self.eps}")
        if not self.tol > 0:
            raise ValueError(f"nonlinear tolerance must be positive, got {self.tol}")

    @property
    def staggered(self) -> bool:
        return self.scheme == MAC


@dataclass
class StepReport:
    n: int
    t: float
    iterations: int
    residual: float
    mass: float
    mass_drift: float
    min_rho: float
    max_rho: float
    max_speed: float
    energy_before: float
    energy: float
    dissipation: float
    slack: float

    CSV_COLUMNS = ("n", "t", "iterations", "residual", "mass", "min_rho", "E", "D", "slack",
                   "mass_drift", "max_rho", "max_speed")

    def row(self) -> list:
        return [self.n, self.t, self.iterations, self.residual, self.mass, self.min_rho,
                self.energy, self.dissipation, self.slack, self.mass_drift, self.max_rho,
                self.max_speed]


@dataclass
class RunReport:
    dt: float
    mass0: float
    energy0: float
    max_rho0: float
    max_speed0: float
    steps: list[StepReport] = field(default_factory=list)
    min_rho0: float = float("nan")

    @property
    def max_rho(self) -> float:
        return max([self.max_rho0] + [s.max_rho for s in self.steps])

    @property
    def max_speed(self) -> float:
        return max([self.max_speed0] + [s.max_speed for s in self.steps])

    @property
    def min_rho(self) -> float:
        return min([self.min_rho0] + [s.min_rho for s in self.steps])

    def max_mass_drift(self) -> float:
        return max((abs(s.mass - self.mass0) for s in self.steps), default=0.0)

    def energy_excess(self, per_step_allowance: float) -> float:
        """``max_n (E^n + sum_k dt D^k - E^0 - n * allowance)``; nonpositive when the estimate holds."""
        acc, worst = 0.0, -math.inf
        for k, s in enumerate(self.steps, start=1):
            acc += self.dt * s.dissipation
            worst = max(worst, s.energy + acc - self.energy0 - k * per_step_allowance)
        return worst


# ---- sources ----------------------------------------------------------------

def source_arrays(m: Mesh, cfg: SchemeConfig, t: float):
    """Cell averages of the mass source and cell or dual-cell averages of the momentum source at ``t``."""
    srho = np.zeros(m.shape)
    sm = np.zeros((m.dim,) + m.shape)
    if cfg.source_rho is not None:
        srho = F.cell_mean(m, cfg.source_rho, t, order=cfg.quad_order)
    if cfg.source_m is not None:
        for a in range(m.dim):
            if cfg.staggered:
                sm[a] = F.dual_average(m, cfg.source_m[a], a, t, order=cfg.quad_order)
            else:
                sm[a] = F.cell_mean(m, cfg.source_m[a], t, order=cfg.quad_order)
    return srho, sm


# ---- residuals ----------------------------------------------------------------

def _check(prev: FluidState, cand: FluidState, cfg: SchemeConfig):
    if prev.staggered != cfg.staggered or cand.staggered != cfg.staggered:
        raise ValueError("state layout does not match the scheme")
    if np.any(cand.rho <= 0):
        raise ValueError("candidate density must be positive")


def _mass_residual(m, prev, cand, cfg, a_sigma, srho):
    c = diffusive_upwind(cand.rho, a_sigma, m.h, cfg.eps)
    return (cand.rho - prev.rho) / cfg.dt + convective_cell_update(m, c) - srho


def fv_residual(prev: FluidState, cand: FluidState, cfg: SchemeConfig, sources=None):
    """Mass (cell field) and momentum (cell vector field) residuals of the FV scheme."""
    _check(prev, cand, cfg)
    m = cand.mesh
    srho, sm = source_arrays(m, cfg, cand.t) if sources is None else sources
    a_sigma = face_velocity_cell(cand.vel)
    r_rho = _mass_residual(m, prev, cand, cfg, a_sigma, srho)
    p = physics.pressure(cfg.law, cand.rho)
    dq = F.div_Q(m, cand.vel)
    r_u = np.empty_like(cand.vel)
    for a in range(m.dim):
        q = cand.rho * cand.vel[a]
        conv = convective_cell_update(m, diffusive_upwind(q, a_sigma, m.h, cfg.eps))
        r_u[a] = ((q - prev.rho * prev.vel[a]) / cfg.dt + conv
                  + (F.fwd(p, a) - F.bwd(p, a)) / (2 * m.h)
                  - cfg.visc.mu * F.laplacian_h(m, cand.vel[a])
                  - cfg.visc.nu * (F.fwd(dq, a) - F.bwd(dq, a)) / (2 * m.h)
                  - sm[a])
    return r_rho, r_u


def mac_stabilization(m: Mesh, rho: np.ndarray, u: np.ndarray, eps: float) -> np.ndarray:
    """Cell values ``h^(eps+1) sum_j d_Mj(<ubar_i>^(j) d_Dj rho)`` for every component ``i``.

    Testing with ``overline{phi_i}`` reproduces the right-hand side
    ``-h^(eps+1) sum_ij int <ubar_i>^(j) (d_Dj rho) d_Dj overline{phi_i}``.
    """
    ub = F.cell_average(u)
    c = h_power(m.h, eps) * m.h
    out = np.zeros_like(ub)
    for i in range(m.dim):
        for j in range(m.dim):
            s = F.average_face(ub[i], j) * F.d_D(m, rho, j)
            out[i] += F.d_M(m, s, j)
    return c * out


def mac_stabilization_form(m: Mesh, rho, u, phi, eps: float) -> float:
    """The stabilization right-hand side evaluated for a test field ``phi`` in W_h."""
    ub, pb = F.cell_average(u), F.cell_average(phi)
    total = 0.0
    for i in range(m.dim):
        for j in range(m.dim):
            total += F.inner(m, F.average_face(ub[i], j) * F.d_D(m, rho, j), F.d_D(m, pb[i], j))
    return -h_power(m.h, eps) * m.h * total


def mac_residual(prev: FluidState, cand: FluidState, cfg: SchemeConfig, sources=None):
    """Mass (cell field) and momentum (staggered field) residuals of the MAC scheme."""
    _check(prev, cand, cfg)
    m = cand.mesh
    srho, sm = source_arrays(m, cfg, cand.t) if sources is None else sources
    u = cand.vel
    r_rho = _mass_residual(m, prev, cand, cfg, u, srho)
    p = physics.pressure(cfg.law, cand.rho)
    dw = F.div_W(m, u)
    ub, ub_old = F.cell_average(u), F.cell_average(prev.vel)
    stab = mac_stabilization(m, cand.rho, u, cfg.eps)
    r_u = np.empty_like(u)
    for i in range(m.dim):
        q = cand.rho * ub[i]
        T = (q - prev.rho * ub_old[i]) / cfg.dt + convective_cell_update(m, upwind(q, u)) - stab[i]
        r_u[i] = (0.5 * (T + F.fwd(T, i))
                  + (F.fwd(p, i) - p) / m.h
                  - cfg.visc.mu * F.laplacian_h(m, u[i])
                  - cfg.visc.nu * (F.fwd(dw, i) - dw) / m.h
                  - sm[i])
    return r_rho, r_u


def residual(prev: FluidState, cand: FluidState, cfg: SchemeConfig, sources=None):
    fn = mac_residual if cfg.staggered else fv_residual
    return fn(prev, cand, cfg, sources)


def _pack_residual(r_rho, r_u):
    return np.concatenate([r_rho.ravel(), r_u.ravel()])


# ---- nonlinear solve ---------------------------------------------------------

MAX_HALVINGS = 30


class LinearSolver:
    """Sparse LU of the step Jacobian, kept across iterations and steps while Newton contracts well.

    A factorization is reused until an iteration reduces the residual by less
    than `REFRESH_RATIO`, its step fails the line search, or the time step,
    scheme or linearization changes.
    """

    REFRESH_RATIO = 0.25

    def __init__(self, reuse: bool = True):
        self.reuse = reuse
        self.lu = None
        self.key = None
        self.factorizations = 0

    def invalidate(self):
        self.lu = None

    def factor(self, prev, cand, cfg, picard):
        from .jacobian import jacobian

        J = jacobian(prev, cand, cfg, picard=picard).tocsc()
        self.lu = splu(J, permc_spec="MMD_AT_PLUS_A")
        self.key = (cfg.dt, cfg.scheme, picard, cand.mesh)
        self.factorizations += 1

    def valid_for(self, cfg, picard, mesh) -> bool:
        return self.lu is not None and self.key == (cfg.dt, cfg.scheme, picard, mesh)


def solve_step(prev: FluidState, cfg: SchemeConfig, t_new: float | None = None,
               solver: LinearSolver | None = None):
    """Newton iteration for one backward Euler step; returns ``(state, iterations, residual)``.

    The Newton update is damped by halving until the density stays positive
    and the residual decreases.  When a freshly factored Newton step cannot
    decrease the residual the linearization switches to the Picard form
    (upwind flux velocities frozen).
    """
    m = prev.mesh
    solver = LinearSolver(reuse=False) if solver is None else solver
    t_new = prev.t + cfg.dt if t_new is None else t_new
    sources = source_arrays(m, cfg, t_new)
    n = m.num_cells

    def res(z):
        cand = prev.unpack(z, t_new)
        return _pack_residual(*residual(prev, cand, cfg, sources))

    z = prev.pack()
    r = res(z)
    rn = float(np.max(np.abs(r)))
    picard = False
    fresh = False
    it = 0
    while rn > cfg.tol:
        if it >= cfg.max_iter:
            raise NonlinearDivergence(f"no convergence after {it} iterations (residual {rn:.3e})")
        if not solver.reuse or not solver.valid_for(cfg, picard, m):
            solver.factor(prev, prev.unpack(z, t_new), cfg, picard)
            fresh = True
        it += 1
        dz = solver.lu.solve(-r)
        r2 = float(np.dot(r, r))
        alpha = 1.0
        accepted = False
        positive = False
        for _ in range(MAX_HALVINGS + 1):
            zt = z + alpha * dz
            if np.min(zt[:n]) > 0:
                positive = True
                rt = res(zt)
                if float(np.dot(rt, rt)) < r2:
                    accepted = True
                    break
            alpha *= 0.5
        if not accepted:
            if not fresh:
                solver.invalidate()
                continue
            if not positive:
                raise PositivityLoss("no damped iterate keeps the density positive")
            if picard:
                raise NonlinearDivergence(f"line search failed (residual {rn:.3e})")
            picard = True
            solver.invalidate()
            continue
        rn_new = float(np.max(np.abs(rt)))
        if rn_new > LinearSolver.REFRESH_RATIO * rn:
            solver.invalidate()
        z, r, rn = zt, rt, rn_new
        fresh = False
    return prev.unpack(z, t_new), it, rn


def step(prev: FluidState, cfg: SchemeConfig, n: int = 1, mass0: float | None = None,
         solver: LinearSolver | None = None):
    """Advance one step; returns ``(next_state, StepReport)``."""
    e0 = physics.total_energy(prev, cfg.law)
    mass0 = prev.mass if mass0 is None else mass0
    nxt, its, rn = _advance(prev, cfg, cfg.max_retries, solver)
    e1 = physics.total_energy(nxt, cfg.law)
    dis = physics.dissipation(nxt, cfg.visc)
    rep = StepReport(n=n, t=nxt.t, iterations=its, residual=rn, mass=nxt.mass,
                     mass_drift=abs(nxt.mass - mass0), min_rho=nxt.min_density,
                     max_rho=nxt.max_density, max_speed=nxt.max_speed, energy_before=e0,
                     energy=e1, dissipation=dis, slack=e1 - e0 + cfg.dt * dis)
    return nxt, rep


def _advance(prev, cfg, retries, solver):
    try:
        return solve_step(prev, cfg, solver=solver)
    except SchemeError:
        if retries <= 0:
            raise
    half = dataclasses.replace(cfg, dt=0.5 * cfg.dt)
    mid, i1, _ = _advance(prev, half, retries - 1, solver)
    out, i2, rn = _advance(mid, half, retries - 1, solver)
    return out, i1 + i2, rn


# ---- initialization and time loop ----------------------------------------------

def _product(f, g):
    if isinstance(f, Trig) and isinstance(g, Trig):
        return f * g
    return lambda x, t: f(x, t) * g(x, t)


def initial_state(m: Mesh, rho0, u0, cfg_or_scheme, order: int = 5, t: float = 0.0) -> FluidState:
    """Projected initial data.

    FV: ``(rho, rho u) = (Pi_Q rho0, Pi_Q[rho0 u0])``.  MAC: ``rho = Pi_Q rho0``
    and the face velocities are ``Pi_E^(i)`` of the velocity components.
    """
    scheme = cfg_or_scheme.scheme if isinstance(cfg_or_scheme, SchemeConfig) else cfg_or_scheme
    rho = F.project_Q(m, rho0, t, order)
    if np.any(rho <= 0):
        raise ValueError("initial density must be positive")
    if scheme == MAC:
        vel = np.stack([F.project_E_component(m, u0[i], i, t, order) for i in range(m.dim)])
        return FluidState(m, rho, vel, t, staggered=True)
    mom = np.stack([F.project_Q(m, _product(rho0, u0[a]), t, order) for a in range(m.dim)])
    return FluidState(m, rho, mom / rho, t, staggered=False)


def time_grid(T: float, dt: float) -> tuple[int, float]:
    """Number of steps and the uniform step ``T / N_t`` not exceeding ``dt``."""
    if T < 0:
        raise ValueError("final time must be nonnegative")
    if T == 0:
        return 0, dt
    nt = max(1, math.ceil(T / dt - 1e-9))
    return nt, T / nt


def run(rho0, u0, T: float, cfg: SchemeConfig, mesh: Mesh, keep_every: int = 1,
        initial: FluidState | None = None, on_step: Callable | None = None,
        reuse_factorization: bool = True):
    """March from the projected initial data to ``T``.

    The step is adjusted to ``T / N_t`` with ``N_t = ceil(T / cfg.dt)``.
    Returns ``(trajectory, RunReport)``; the trajectory holds the initial state
    and every ``keep_every``-th state (the final state is always kept).
    """
    state = initial_state(mesh, rho0, u0, cfg, cfg.quad_order) if initial is None else initial
    nt, dt = time_grid(T, cfg.dt)
    cfg = dataclasses.replace(cfg, dt=dt)
    report = RunReport(dt=dt, mass0=state.mass, energy0=physics.total_energy(state, cfg.law),
                       max_rho0=state.max_density, max_speed0=state.max_speed,
                       min_rho0=state.min_density)
    traj = [state]
    t0 = state.t
    solver = LinearSolver(reuse=reuse_factorization)
    for n in range(1, nt + 1):
        try:
            nxt, rep = step(state, cfg, n, report.mass0, solver)
        except SchemeError as exc:
            raise type(exc)(str(exc), step=n) from exc
        # keep the time grid exact instead of accumulating dt
        nxt.t = t0 + n * dt
        rep.t = nxt.t
        report.steps.append(rep)
        if on_step is not None:
            on_step(nxt, rep)
        state = nxt
        if n % keep_every == 0 or n == nt:
            traj.append(state)
    return traj, report
