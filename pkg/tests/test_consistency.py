import numpy as np
import pytest

from torusns import fields as F
from torusns.analysis.consistency import consistency_report, density_residual, momentum_residual
from torusns.fluxes import diffusive_upwind, face_velocity_cell
from torusns.mesh import Mesh
from torusns.physics import GasLaw, ViscosityLaw
from torusns.schemes import FV, MAC, SchemeConfig, run
from torusns.smooth import Trig

LAW = GasLaw(1.0, 2.0)
VISC = ViscosityLaw(0.1, 0.05, 2)
RHO0 = Trig.constant(2, 1.0) + Trig.term(2, 0.3, [1.0, 1.0], [0.4, 0.0])
U0 = [Trig.term(2, 0.5, [0.0, 1.0], [0.3, 0.3]), Trig.term(2, -0.5, [1.0, 0.0], [0.3, 0.3])]


def trajectory(scheme, n=8, T=0.1, dt=0.05, eps=0.0):
    m = Mesh(2, n)
    cfg = SchemeConfig(LAW, VISC, eps=eps, dt=dt, scheme=scheme)
    return run(RHO0, U0, T, cfg, m)


@pytest.mark.parametrize("scheme", [FV, MAC])
def test_unit_test_function_gives_mass_drift(scheme):
    traj, rep = trajectory(scheme)
    e = density_residual(traj, Trig.constant(2, 1.0))
    assert e == pytest.approx(traj[-1].mass - traj[0].mass, abs=1e-15)
    assert abs(e) <= 10 * 1e-10


@pytest.mark.parametrize("scheme", [FV, MAC])
def test_zero_and_constant_momentum_test_functions(scheme):
    traj, _ = trajectory(scheme)
    zero = [Trig.constant(2, 0.0)] * 2
    assert momentum_residual(traj, zero, LAW, VISC) == 0.0
    c = [Trig.constant(2, 1.0), Trig.constant(2, -2.0)]
    m = traj[0].mesh

    def momentum(s):
        ub = s.cell_velocity()
        return F.integrate(m, s.rho * ub[0]) - 2.0 * F.integrate(m, s.rho * ub[1])

    assert momentum_residual(traj, c, LAW, VISC) == pytest.approx(
        momentum(traj[-1]) - momentum(traj[0]), abs=1e-14)


def test_single_step_density_defect_face_sum():
    eps = 0.5
    traj, rep = trajectory(FV, n=6, T=0.05, dt=0.05, eps=eps)
    m = traj[0].mesh
    s0, s1 = traj
    phi = Trig.term(2, 1.0, [1.0, 0.0], [0.2, 0.0]) + Trig.term(2, 0.5, [1.0, 2.0], [0.0, 1.0])
    dt = rep.dt
    # brute force: -dt * [ sum_K sum_sigma |sigma| Fup phibar_K + sum_K rho0 u0 . sum_sigma int_sigma phi n ]
    fup = diffusive_upwind(s1.rho, face_velocity_cell(s1.vel), m.h, eps)
    phibar = F.cell_mean(m, phi)
    n = m.n
    total = 0.0
    for K in np.ndindex(*m.shape):
        for i in range(2):
            left = list(K)
            left[i] = (left[i] - 1) % n
            left = tuple(left)
            total += m.face_area * (fup[i][K] - fup[i][left]) * phibar[K]
            off = np.zeros(2)
            off[i] = 0.5
            widths = [m.h, m.h]
            widths[i] = 0.0
            cx = [(np.array(K[a]) + 0.5 + off[a]) * m.h for a in range(2)]
            face_plus = phi.box_mean(cx, widths) * m.face_area
            cx[i] -= m.h
            face_minus = phi.box_mean(cx, widths) * m.face_area
            total += s0.rho[K] * s0.vel[i][K] * (face_plus - face_minus)
    assert density_residual(traj, phi) == pytest.approx(-dt * total, abs=1e-12)


@pytest.mark.parametrize("scheme", [FV, MAC])
def test_residual_decreases_with_h(scheme):
    phi = Trig.term(2, 1.0, [1.0, 0.0], [0.0, 0.0], 1.0, 0.2)
    Phi = [Trig.term(2, 1.0, [1.0, 1.0], [0.1, 0.1], 1.0, 0.5),
           Trig.term(2, 1.0, [1.0, 1.0], [0.2, 0.2], 1.0, 0.5)]
    errs = []
    for n in (8, 16, 32):
        h = 1.0 / n
        traj, _ = trajectory(scheme, n=n, T=h, dt=h)
        errs.append(consistency_report(traj, phi, Phi, LAW, VISC))
    assert abs(errs[2].e_rho) < abs(errs[0].e_rho)
    assert abs(errs[2].e_m) < abs(errs[0].e_m)


def test_tau_must_be_time_level():
    traj, _ = trajectory(FV)
    with pytest.raises(ValueError):
        density_residual(traj, Trig.constant(2, 1.0), tau=0.07)
    assert density_residual(traj, Trig.constant(2, 1.0), tau=0.0) == 0.0


def test_test_function_needs_derivatives():
    traj, _ = trajectory(FV)
    with pytest.raises(TypeError):
        density_residual(traj, lambda x, t: 1.0)
