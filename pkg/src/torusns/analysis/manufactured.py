"""Manufactured smooth solutions with matching source terms."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..physics import GasLaw, ViscosityLaw
from ..smooth import Trig

HALF_PI = 0.5 * np.pi


def _power(f: Trig, n: int) -> Trig:
    out = f
    for _ in range(n - 1):
        out = out * f
    return out


class _PressureGradient:
    """``a gamma rho^(gamma-1) d_axis rho`` for non-integer ``gamma``."""

    def __init__(self, law: GasLaw, rho: Trig, axis: int):
        self.law, self.rho, self.drho = law, rho, rho.diff(axis)

    def __call__(self, x, t=0.0):
        r = self.rho(x, t)
        return self.law.a * self.law.gamma * r ** (self.law.gamma - 1.0) * self.drho(x, t)


class _Sum:
    def __init__(self, *parts):
        self.parts = parts

    def __call__(self, x, t=0.0):
        return sum(p(x, t) for p in self.parts)


@dataclass
class ManufacturedSolution:
    """Exact density and velocity with the sources that make them solve the system."""

    rho: Trig
    u: list[Trig]
    law: GasLaw
    visc: ViscosityLaw
    source_rho: Trig = field(init=False)
    source_m: list = field(init=False)

    def __post_init__(self):
        d = self.rho.dim
        if len(self.u) != d or self.visc.dim != d:
            raise ValueError("velocity components and viscosity dimension must match rho")
        rho, u = self.rho, self.u
        mom = [rho * ua for ua in u]
        s_rho = rho.dt()
        for b in range(d):
            s_rho = s_rho + mom[b].diff(b)
        self.source_rho = s_rho
        div_u = u[0].diff(0)
        for b in range(1, d):
            div_u = div_u + u[b].diff(b)
        g = self.law.gamma
        integer_gamma = float(g).is_integer()
        self.source_m = []
        for a in range(d):
            s = mom[a].dt()
            for b in range(d):
                s = s + (mom[a] * u[b]).diff(b)
            s = s - self.visc.mu * u[a].laplacian() - self.visc.nu * div_u.diff(a)
            if integer_gamma:
                p = _power(rho, int(g)) * self.law.a
                self.source_m.append((s + p.diff(a)).simplify())
            else:
                self.source_m.append(_Sum(s.simplify(), _PressureGradient(self.law, rho, a)))

    @property
    def dim(self) -> int:
        return self.rho.dim

    def momentum(self) -> list[Trig]:
        return [self.rho * ua for ua in self.u]

    def bounds(self, T: float, samples: int = 64, times: int = 33) -> dict[str, float]:
        """Sampled ``min rho``, ``max rho`` and ``max |u|`` over ``[0, T] x T^d``."""
        axes = [np.linspace(0, 1, samples, endpoint=False)] * self.dim
        x = tuple(np.meshgrid(*axes, indexing="ij"))
        lo, hi, sp = np.inf, -np.inf, 0.0
        for t in np.linspace(0, T, times):
            r = self.rho(x, t)
            lo, hi = min(lo, float(r.min())), max(hi, float(r.max()))
            sp = max(sp, float(np.sqrt(np.max(sum(ua(x, t) ** 2 for ua in self.u)))))
        return {"min_rho": lo, "max_rho": hi, "max_speed": sp}


def _sin(dim, c, k, axis_sin, kt=1.0, phase_t=0.0):
    phase = [0.0] * dim
    phase[axis_sin] = -HALF_PI
    return Trig.term(dim, c, k, phase, kt, phase_t)


def default_solution(dim: int = 2, law: GasLaw | None = None, visc: ViscosityLaw | None = None,
                     amplitude: float = 0.5) -> ManufacturedSolution:
    """``rho = 2 + 1/2 prod cos(2 pi x_a) cos(2 pi t)`` with a rotating trigonometric velocity."""
    law = GasLaw(1.0, 2.0) if law is None else law
    visc = ViscosityLaw(0.1, 0.05, dim) if visc is None else visc
    ones = [1.0] * dim
    rho = Trig.constant(dim, 2.0) + Trig.term(dim, 0.5, ones, [0.0] * dim, 1.0, 0.0)
    u = []
    for a in range(dim):
        # u_a = A sin(2 pi x_a) cos(2 pi x_{a+1}) cos(2 pi t + phi), signs alternate
        k = [0.0] * dim
        k[a] = 1.0
        k[(a + 1) % dim] = 1.0
        sign = 1.0 if a % 2 == 0 else -1.0
        u.append(_sin(dim, sign * amplitude, k, a, 1.0, 0.3))
    return ManufacturedSolution(rho, u, law, visc)


def fd_source_check(sol: ManufacturedSolution, points: np.ndarray, times: np.ndarray,
                    step: float = 2e-5) -> float:
    """Largest difference between the analytic sources and central differences of the system.

    Every derivative of the conservative form is replaced by a second-order
    central difference of pointwise values of ``rho`` and ``u``.
    """
    d = sol.dim
    law, visc = sol.law, sol.visc

    def rho(x, t):
        return sol.rho(x, t)

    def u(a, x, t):
        return sol.u[a](x, t)

    def shift(x, axis, s):
        y = [np.array(c, dtype=float) for c in x]
        y[axis] = y[axis] + s
        return tuple(y)

    def dx(f, x, t, axis):
        return (f(shift(x, axis, step), t) - f(shift(x, axis, -step), t)) / (2 * step)

    def dt(f, x, t):
        return (f(x, t + step) - f(x, t - step)) / (2 * step)

    def d2(f, x, t, axis):
        return (f(shift(x, axis, step), t) - 2 * f(x, t) + f(shift(x, axis, -step), t)) / step**2

    x = tuple(points[:, a] for a in range(d))
    t = times
    worst = 0.0
    s_rho = dt(rho, x, t) + sum(dx(lambda y, s, b=b: rho(y, s) * u(b, y, s), x, t, b) for b in range(d))
    worst = max(worst, float(np.max(np.abs(s_rho - sol.source_rho(x, t)))))

    def div_u(y, s):
        return sum(dx(lambda z, r, b=b: u(b, z, r), y, s, b) for b in range(d))

    for a in range(d):
        val = dt(lambda y, s: rho(y, s) * u(a, y, s), x, t)
        for b in range(d):
            val += dx(lambda y, s, b=b: rho(y, s) * u(a, y, s) * u(b, y, s), x, t, b)
        val += dx(lambda y, s: law.a * rho(y, s) ** law.gamma, x, t, a)
        val -= visc.mu * sum(d2(lambda y, s: u(a, y, s), x, t, b) for b in range(d))
        val -= visc.nu * dx(div_u, x, t, a)
        worst = max(worst, float(np.max(np.abs(val - sol.source_m[a](x, t)))))
    return worst
