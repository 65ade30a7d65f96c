"""Barotropic gas law, viscosities, relative energy and error norms."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import fields as F
from .mesh import Mesh
from .smooth import box_average


@dataclass(frozen=True)
class GasLaw:
    """Isentropic pressure ``p = a rho^gamma``."""

    a: float = 1.0
    gamma: float = 1.4

    def __post_init__(self):
        if not self.a > 0:
            raise ValueError(f"pressure scale a must be positive, got {self.a}")
        if not self.gamma > 1:
            raise ValueError(f"adiabatic coefficient gamma must exceed 1, got {self.gamma}")


@dataclass(frozen=True)
class ViscosityLaw:
    mu: float = 0.1
    lam: float = 0.0
    dim: int = 2

    def __post_init__(self):
        if not self.mu > 0:
            raise ValueError(f"shear viscosity mu must be positive, got {self.mu}")
        if not self.lam >= 0:
            raise ValueError(f"bulk viscosity lambda must be nonnegative, got {self.lam}")
        if self.dim not in (2, 3):
            raise ValueError(f"dimension must be 2 or 3, got {self.dim}")

    @property
    def nu(self) -> float:
        return (self.dim - 2) / self.dim * self.mu + self.lam


def _nonneg(rho):
    rho = np.asarray(rho, dtype=float)
    if np.any(rho < 0):
        raise ValueError("density must be nonnegative")
    return rho


def pressure(law: GasLaw, rho):
    return law.a * _nonneg(rho) ** law.gamma


def pressure_derivative(law: GasLaw, rho):
    return law.a * law.gamma * _nonneg(rho) ** (law.gamma - 1.0)


def pressure_potential(law: GasLaw, rho):
    """``H(rho) = a rho^gamma / (gamma - 1)``."""
    return law.a * _nonneg(rho) ** law.gamma / (law.gamma - 1.0)


def pressure_potential_derivative(law: GasLaw, rho):
    return law.a * law.gamma / (law.gamma - 1.0) * _nonneg(rho) ** (law.gamma - 1.0)


def relative_pressure(law: GasLaw, rho, r):
    """``E(rho | r) = H(rho) - H'(r)(rho - r) - H(r)``; requires ``r > 0``."""
    r = np.asarray(r, dtype=float)
    if np.any(r <= 0):
        raise ValueError("reference density must be positive")
    rho = _nonneg(rho)
    return (pressure_potential(law, rho) - pressure_potential_derivative(law, r) * (rho - r)
            - pressure_potential(law, r))


def cell_velocity(vel: np.ndarray, staggered: bool) -> np.ndarray:
    """``Pi_Q u``: the identity for cell vectors, the two-face mean for staggered fields."""
    return F.cell_average(vel) if staggered else vel


def relative_energy(state, r: np.ndarray, U: np.ndarray, law: GasLaw) -> float:
    """Discrete relative energy of ``state`` with respect to a reference ``(r, U)``.

    ``r`` is a cell field and ``U`` a velocity in the same layout as the state's
    velocity; the kinetic part uses cell-averaged velocities for staggered states.
    """
    m = state.mesh
    r = np.asarray(r, dtype=float)
    U = np.asarray(U, dtype=float)
    if r.shape != state.rho.shape or U.shape != state.vel.shape:
        raise ValueError("reference fields do not match the state's mesh")
    st = state.staggered
    du = cell_velocity(state.vel, st) - cell_velocity(U, st)
    dens = 0.5 * state.rho * np.sum(du**2, axis=0) + relative_pressure(law, state.rho, r)
    return F.integrate(m, dens)


def relative_energy_exact(m: Mesh, rho: np.ndarray, vel: np.ndarray, staggered: bool,
                          rho_ex, u_ex, law: GasLaw, t: float = 0.0, order: int = 5) -> float:
    """Relative energy against smooth ``(rho_ex, u_ex)``, integrated cell by cell by quadrature."""
    ub = cell_velocity(vel, staggered)
    rpot = law.a * law.gamma / (law.gamma - 1.0)

    def integrand(x, tt):
        r = rho_ex(x, tt)
        kin = sum((ub[a] - u_ex[a](x, tt)) ** 2 for a in range(m.dim))
        hrho = law.a * rho**law.gamma / (law.gamma - 1.0)
        hr = law.a * r**law.gamma / (law.gamma - 1.0)
        return 0.5 * rho * kin + hrho - rpot * r ** (law.gamma - 1.0) * (rho - r) - hr

    return float(m.cell_volume * np.sum(box_average(integrand, m.centers(), [m.h] * m.dim, t,
                                                    order=order)))


def total_energy(state, law: GasLaw) -> float:
    """``int 1/2 rho |Pi_Q u|^2 + H(rho)``."""
    ub = cell_velocity(state.vel, state.staggered)
    dens = 0.5 * state.rho * np.sum(ub**2, axis=0) + pressure_potential(law, state.rho)
    return F.integrate(state.mesh, dens)


def dissipation(state, visc: ViscosityLaw) -> float:
    """``mu |grad_h u|^2 + nu |div_h u|^2`` integrated; ``(grad_B, div_W)`` for MAC, ``(grad_D, div_Q)`` for FV."""
    m = state.mesh
    if state.staggered:
        g = F.grad_B(m, state.vel)
        dv = F.div_W(m, state.vel)
    else:
        g = F.grad_D_vector(m, state.vel)
        dv = F.div_Q(m, state.vel)
    return visc.mu * F.integrate(m, g**2) + visc.nu * F.integrate(m, dv**2)


# ---- error norms --------------------------------------------------------------

def density_exponent(law: GasLaw) -> float:
    """``L^gamma`` for ``gamma <= 2``, ``L^2`` otherwise."""
    return law.gamma if law.gamma <= 2 else 2.0


def momentum_exponent(law: GasLaw) -> float:
    return 2.0 * law.gamma / (law.gamma + 1.0)


def _lp_error(m: Mesh, values: np.ndarray, exact, p: float, offset=None, t: float = 0.0,
              order: int = 5) -> float:
    """``|| values - exact ||_{L^p}`` for piecewise-constant ``values`` on the boxes at ``offset``.

    ``exact`` is either an array of the same layout (compared box by box) or a
    smooth function integrated by quadrature.
    """
    if callable(exact) or hasattr(exact, "box_mean"):
        def integrand(x, tt):
            return np.abs(values - exact(x, tt)) ** p

        acc = box_average(integrand, m.centers(offset), [m.h] * m.dim, t, order=order)
    else:
        acc = np.abs(values - np.asarray(exact, dtype=float)) ** p
    return float((m.cell_volume * np.sum(acc)) ** (1.0 / p))


@dataclass
class ErrorNorms:
    density: float
    momentum: float
    velocity: float
    density_exponent: float
    momentum_exponent: float


def error_norms(state, rho_ex, m_ex, u_ex, law: GasLaw, t: float | None = None,
                order: int = 5) -> ErrorNorms:
    """Density, momentum and velocity errors at one time level.

    Exact data are either discrete arrays in the state's layout (cell fields for
    density and momentum, the state's velocity layout for ``u_ex``) or smooth
    functions ``f(x, t)`` given per component.  Momentum is compared through the
    cell velocity ``rho Pi_Q u``; staggered velocities are compared on their
    own dual cells.
    """
    m = state.mesh
    t = state.t if t is None else t
    pd, pm = density_exponent(law), momentum_exponent(law)
    ub = cell_velocity(state.vel, state.staggered)
    e_rho = _lp_error(m, state.rho, rho_ex, pd, None, t, order)
    e_m = 0.0
    e_u = 0.0
    for a in range(m.dim):
        e_m += _lp_error(m, state.rho * ub[a], m_ex[a], pm, None, t, order) ** pm
        off = None
        if state.staggered:
            off = np.zeros(m.dim)
            off[a] = 0.5
        e_u += _lp_error(m, state.vel[a], u_ex[a], 2.0, off, t, order) ** 2
    return ErrorNorms(e_rho, e_m ** (1.0 / pm), float(np.sqrt(e_u)), pd, pm)
