import numpy as np
import pytest

from torusns import physics as P
from torusns.mesh import Mesh
from torusns.physics import GasLaw, ViscosityLaw
from torusns.smooth import Trig
from torusns.state import FluidState


def test_pressure_examples():
    assert P.pressure(GasLaw(1, 1.4), 1.0) == 1.0
    assert P.pressure(GasLaw(1, 2), 2.0) == 4.0
    assert P.pressure(GasLaw(1, 2), 0.0) == 0.0
    with pytest.raises(ValueError):
        P.pressure(GasLaw(1, 2), -0.1)


def test_pressure_potential_examples():
    assert P.pressure_potential(GasLaw(1, 2), 2.0) == 4.0
    assert P.pressure_potential(GasLaw(1, 2), 0.0) == 0.0


def test_pressure_potential_convex(rng):
    law = GasLaw(1.3, 1.4)
    x, y = rng.uniform(0, 5, 200), rng.uniform(0, 5, 200)
    H = lambda s: P.pressure_potential(law, s)
    assert np.all(H(0.5 * (x + y)) <= 0.5 * (H(x) + H(y)) + 1e-14)


def test_relative_pressure():
    law = GasLaw(1, 2)
    assert P.relative_pressure(law, 3.0, 1.0) == 4.0
    assert P.relative_pressure(law, 1.7, 1.7) == 0.0
    with pytest.raises(ValueError):
        P.relative_pressure(law, 1.0, 0.0)


def test_relative_pressure_nonnegative(rng):
    law = GasLaw(2.0, 1.6)
    assert np.all(P.relative_pressure(law, rng.uniform(0, 4, 500), rng.uniform(0.1, 4, 500)) >= -1e-14)


@pytest.mark.parametrize("bad", [dict(a=0), dict(gamma=1.0), dict(gamma=0.5)])
def test_gas_law_validation(bad):
    with pytest.raises(ValueError):
        GasLaw(**{"a": 1.0, "gamma": 1.4, **bad})


def test_viscosity_validation_and_nu():
    with pytest.raises(ValueError):
        ViscosityLaw(0.0, 0.0, 2)
    with pytest.raises(ValueError):
        ViscosityLaw(1.0, -0.1, 2)
    assert ViscosityLaw(0.3, 0.1, 2).nu == pytest.approx(0.1)
    assert ViscosityLaw(0.3, 0.1, 3).nu == pytest.approx(0.2)


def state(m, rho, vel, staggered=False):
    return FluidState(m, np.broadcast_to(rho, m.shape).copy(),
                      np.broadcast_to(vel, (m.dim,) + m.shape).copy(), 0.0, staggered)


def test_relative_energy_examples(rng):
    m = Mesh(2, 4)
    law = GasLaw(1, 2)
    s = state(m, 1.0, 0.0)
    U = np.zeros((2, 4, 4))
    U[0] = 1.0
    assert P.relative_energy(s, np.ones((4, 4)), U, law) == pytest.approx(0.5, abs=1e-15)
    r = rng.uniform(0.5, 2, (4, 4))
    v = rng.normal(size=(2, 4, 4))
    s2 = FluidState(m, r, v)
    assert P.relative_energy(s2, r, v, law) == 0.0
    assert P.relative_energy(s2, rng.uniform(0.5, 2, (4, 4)), rng.normal(size=(2, 4, 4)), law) >= 0


def test_relative_energy_staggered_uses_cell_average():
    m = Mesh(2, 4)
    s = state(m, 1.0, 0.0, staggered=True)
    U = np.zeros((2, 4, 4))
    U[0, ::2] = 1.0
    U[0, 1::2] = -1.0
    # alternating face values average to zero on every cell
    assert P.relative_energy(s, np.ones((4, 4)), U, GasLaw(1, 2)) == 0.0


def test_relative_energy_exact_matches_discrete_for_constants():
    m = Mesh(2, 4)
    law = GasLaw(1, 1.5)
    s = state(m, 1.2, 0.3)
    ex = P.relative_energy_exact(m, s.rho, s.vel, False, Trig.constant(2, 0.8),
                                 [Trig.constant(2, -0.1)] * 2, law)
    disc = P.relative_energy(s, np.full((4, 4), 0.8), np.full((2, 4, 4), -0.1), law)
    assert ex == pytest.approx(disc, rel=1e-13)


def test_total_energy_and_dissipation(rng):
    m = Mesh(2, 4)
    s = state(m, 1.0, 0.0)
    assert P.total_energy(s, GasLaw(1, 2)) == pytest.approx(1.0)
    visc = ViscosityLaw(0.1, 0.05, 2)
    assert P.dissipation(state(m, 1.0, 0.7), visc) == 0.0
    assert P.dissipation(state(m, 1.0, 0.7, True), visc) == 0.0
    s2 = FluidState(m, np.ones((4, 4)), rng.normal(size=(2, 4, 4)))
    assert P.dissipation(s2, visc) > 0
    s2.staggered = True
    assert P.dissipation(s2, visc) > 0


def test_error_norms_zero_and_shift(rng):
    m = Mesh(2, 4)
    law = GasLaw(1, 1.5)
    r = rng.uniform(0.5, 2, (4, 4))
    v = rng.normal(size=(2, 4, 4))
    s = FluidState(m, r, v)
    en = P.error_norms(s, r, r * v, v, law)
    assert en.density == 0 and en.momentum == 0 and en.velocity == 0
    c = 0.25
    en = P.error_norms(FluidState(m, r + c, v), r, (r + c) * v, v, law)
    assert en.density == pytest.approx(c, rel=1e-13)  # unit measure


def test_error_norms_brute_force(rng):
    m = Mesh(2, 4)
    law = GasLaw(1, 3.0)
    r = rng.uniform(0.5, 2, (4, 4))
    v = rng.normal(size=(2, 4, 4))
    dr = rng.normal(size=(4, 4)) * 0.1
    s = FluidState(m, r + dr, v)
    en = P.error_norms(s, r, r * v, v, law)
    acc = 0.0
    for idx in np.ndindex(4, 4):
        acc += abs(dr[idx]) ** 2 * m.cell_volume
    assert en.density_exponent == 2.0
    assert en.density == pytest.approx(acc ** 0.5, rel=1e-13)
    pm = 2 * 3.0 / 4.0
    acc = sum(abs(dr[idx] * v[a][idx]) ** pm * m.cell_volume for a in range(2) for idx in np.ndindex(4, 4))
    assert en.momentum == pytest.approx(acc ** (1 / pm), rel=1e-13)


def test_exponents():
    assert P.density_exponent(GasLaw(1, 1.4)) == 1.4
    assert P.density_exponent(GasLaw(1, 3)) == 2.0
    assert P.momentum_exponent(GasLaw(1, 2)) == pytest.approx(4 / 3)
