"""Error histories and empirical orders of convergence."""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .. import fields as F
from .. import physics
from ..mesh import Mesh
from ..physics import GasLaw
from ..schemes import SchemeConfig, run
from ..smooth import box_average
from .manufactured import ManufacturedSolution

ZERO_ERROR = 1e-12


def least_squares_order(hs, errors) -> float:
    """Slope of ``log(error)`` against ``log(h)`` over all levels; NaN if any error is at round-off."""
    hs = np.asarray(hs, dtype=float)
    errors = np.asarray(errors, dtype=float)
    if len(hs) < 2 or np.any(errors <= ZERO_ERROR):
        return float("nan")
    return float(np.polyfit(np.log(hs), np.log(errors), 1)[0])


@dataclass
class EocTable:
    levels: list[int] = field(default_factory=list)
    hs: list[float] = field(default_factory=list)
    dts: list[float] = field(default_factory=list)
    errors: dict[str, list[float]] = field(default_factory=dict)
    diagnostics: dict[str, list[float]] = field(default_factory=dict)

    def add(self, n: int, h: float, dt: float, metrics: dict[str, float], diag=None):
        if self.hs and not h < self.hs[-1]:
            raise ValueError("ladder must be strictly decreasing in h")
        self.levels.append(n)
        self.hs.append(h)
        self.dts.append(dt)
        for k, v in metrics.items():
            self.errors.setdefault(k, []).append(float(v))
        for k, v in (diag or {}).items():
            self.diagnostics.setdefault(k, []).append(float(v))

    @property
    def orders(self) -> dict[str, float]:
        return {k: least_squares_order(self.hs, v) for k, v in self.errors.items()}

    def rows(self):
        """CSV rows: one per level, then one ``order`` row."""
        names = list(self.errors)
        head = ["N", "h", "dt"] + names
        body = [[n, h, dt] + [self.errors[k][i] for k in names]
                for i, (n, h, dt) in enumerate(zip(self.levels, self.hs, self.dts))]
        orders = self.orders
        body.append(["order", "", ""] + [orders[k] for k in names])
        return head, body


def _slab_l2sq(m: Mesh, values, f, offset, t, dt, order=3):
    """``int_t^{t+dt} int (values - f)^2`` for piecewise-constant ``values`` on boxes at ``offset``."""
    def sq(x, s):
        return (f(x, s) - values) ** 2

    avg = box_average(sq, m.centers(offset), [m.h] * m.dim, t, dt, order=order)
    return float(dt * m.cell_volume * np.sum(avg))


def dissipation_errors(m: Mesh, state, u_ex, t: float, dt: float, order: int = 3):
    """Slab integrals of ``|grad_h u_h - grad u|^2`` and ``|div_h u_h - div u|^2``."""
    d = m.dim
    g = 0.0
    if state.staggered:
        G = F.grad_B(m, state.vel)
        for i in range(d):
            for j in range(d):
                g += _slab_l2sq(m, G[i, j], u_ex[i].diff(j), F.bidual_offset(m, i, j), t, dt, order)
        dv = F.div_W(m, state.vel)
    else:
        G = F.grad_D_vector(m, state.vel)
        for a in range(d):
            for i in range(d):
                off = np.zeros(d)
                off[i] = 0.5
                g += _slab_l2sq(m, G[a, i], u_ex[a].diff(i), off, t, dt, order)
        dv = F.div_Q(m, state.vel)
    div_ex = u_ex[0].diff(0)
    for a in range(1, d):
        div_ex = div_ex + u_ex[a].diff(a)
    return g, _slab_l2sq(m, dv, div_ex, None, t, dt, order)


def velocity_slab_error(m: Mesh, state, u_ex, t: float, dt: float, order: int = 3) -> float:
    tot = 0.0
    for a in range(m.dim):
        off = None
        if state.staggered:
            off = np.zeros(m.dim)
            off[a] = 0.5
        tot += _slab_l2sq(m, state.vel[a], u_ex[a], off, t, dt, order)
    return tot


@dataclass
class ErrorHistory:
    times: list[float] = field(default_factory=list)
    relative_energy: list[float] = field(default_factory=list)
    grad_error: list[float] = field(default_factory=list)
    div_error: list[float] = field(default_factory=list)
    velocity_sq: list[float] = field(default_factory=list)
    density_error: list[float] = field(default_factory=list)
    momentum_error: list[float] = field(default_factory=list)


def relative_energy_history(traj, reference, law: GasLaw, order: int = 5,
                            slab_order: int = 3) -> ErrorHistory:
    """Per-level relative energy and accumulated error integrals.

    ``reference`` is either a trajectory with the same time levels (compared
    with the discrete relative energy) or a `ManufacturedSolution` (compared
    cell by cell by quadrature, with the gradient, divergence and velocity
    errors integrated over each time slab of the piecewise-constant
    trajectory).
    """
    hist = ErrorHistory()
    if not isinstance(reference, ManufacturedSolution):
        if len(reference) != len(traj):
            raise ValueError("reference trajectory has a different number of levels")
        for s, r in zip(traj, reference):
            hist.times.append(s.t)
            hist.relative_energy.append(physics.relative_energy(s, r.rho, r.vel, law))
        return hist
    m = traj[0].mesh
    sol = reference
    mom = sol.momentum()
    g_acc = d_acc = v_acc = 0.0
    for k, s in enumerate(traj):
        hist.times.append(s.t)
        hist.relative_energy.append(physics.relative_energy_exact(
            m, s.rho, s.vel, s.staggered, sol.rho, sol.u, law, s.t, order))
        en = physics.error_norms(s, sol.rho, mom, sol.u, law, s.t, order)
        hist.density_error.append(en.density)
        hist.momentum_error.append(en.momentum)
        if k + 1 < len(traj):
            dt = traj[k + 1].t - s.t
            g, dv = dissipation_errors(m, s, sol.u, s.t, dt, slab_order)
            g_acc += g
            d_acc += dv
            v_acc += velocity_slab_error(m, s, sol.u, s.t, dt, slab_order)
        hist.grad_error.append(g_acc)
        hist.div_error.append(d_acc)
        hist.velocity_sq.append(v_acc)
    return hist


def boundedness(report, bounds: dict[str, float], factor: float = 2.0) -> dict[str, float | bool]:
    """Compare a run's density and speed extremes with ``factor`` times the exact bounds."""
    min_rho = report.min_rho
    ok = (report.max_rho <= factor * bounds["max_rho"]
          and min_rho >= bounds["min_rho"] / factor
          and report.max_speed <= factor * bounds["max_speed"])
    return {"max_rho": report.max_rho, "min_rho": min_rho, "max_speed": report.max_speed,
            "ok": bool(ok)}


def eoc_study(sol: ManufacturedSolution, scheme: str, levels, dt_rule: Callable[[float], float],
              T: float, eps: float = 0.0, tol: float = 1e-10, order: int = 5,
              on_level: Callable | None = None):
    """Run the manufactured problem on every level; returns ``(EocTable, run reports)``."""
    levels = list(levels)
    if len(levels) < 3:
        raise ValueError("an EOC ladder needs at least three levels")
    if sorted(levels) != levels or len(set(levels)) != len(levels):
        raise ValueError("ladder must be strictly increasing in N")
    table = EocTable()
    reports = []
    bounds = sol.bounds(T)
    for n in levels:
        m = Mesh(sol.dim, n)
        cfg = SchemeConfig(sol.law, sol.visc, eps=eps, dt=dt_rule(m.h), scheme=scheme, tol=tol,
                           source_rho=sol.source_rho, source_m=sol.source_m, quad_order=order)
        traj, rep = run(sol.rho, sol.u, T, cfg, m)
        hist = relative_energy_history(traj, sol, sol.law, order)
        metrics = {
            "sup_relative_energy": max(hist.relative_energy),
            "grad_error_L2L2": float(np.sqrt(hist.grad_error[-1])),
            "div_error_L2L2": float(np.sqrt(hist.div_error[-1])),
            "velocity_L2L2": float(np.sqrt(hist.velocity_sq[-1])),
            "density_sup": max(hist.density_error),
            "momentum_sup": max(hist.momentum_error),
        }
        b = boundedness(rep, bounds)
        diag = {"max_rho": b["max_rho"], "min_rho": b["min_rho"], "max_speed": b["max_speed"],
                "bounded": float(b["ok"]), "steps": len(rep.steps),
                "max_mass_drift": rep.max_mass_drift()}
        table.add(n, m.h, rep.dt, metrics, diag)
        reports.append(rep)
        if on_level is not None:
            on_level(n, traj, rep)
    return table, reports
