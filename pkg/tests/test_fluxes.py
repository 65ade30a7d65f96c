import numpy as np
import pytest

from torusns import fields as F
from torusns.fluxes import (convective_cell_update, diffusive_upwind, h_power, upwind, upwind_value,
                            vector_diffusive_upwind, vector_upwind)
from torusns.mesh import Mesh


def test_upwind_positive_velocity():
    assert upwind_value(2.0, 1.0, 1.0) == 2.0


def test_upwind_negative_velocity():
    assert upwind_value(2.0, 1.0, -1.0) == -1.0


def test_upwind_zero_velocity(rng):
    r = rng.uniform(0.5, 1.5, (4, 4))
    assert np.all(upwind(r, np.zeros((2, 4, 4))) == 0.0)


def test_diffusive_upwind_eps0():
    r = np.array([[2.0], [1.0]]).repeat(2, axis=1)
    fl = diffusive_upwind(r, np.ones((2, 2, 2)), 0.1, 0.0)
    assert fl[0, 0, 0] == pytest.approx(3.0, abs=1e-15)


def test_diffusive_upwind_eps1():
    r = np.array([[2.0], [1.0]]).repeat(2, axis=1)
    fl = diffusive_upwind(r, np.ones((2, 2, 2)), 0.25, 1.0)
    assert fl[0, 0, 0] == pytest.approx(2.25, abs=1e-15)


def test_diffusive_upwind_constant_equals_upwind(rng):
    r = np.full((6, 6), 1.7)
    us = rng.normal(size=(2, 6, 6))
    assert np.array_equal(diffusive_upwind(r, us, 1 / 6, 0.5), upwind(r, us))


def test_h_power():
    assert h_power(0.1, 0.0) == 1.0
    assert h_power(0.25, 0.5) == pytest.approx(0.5)
    with pytest.raises(ValueError):
        h_power(0.1, -1.0)


def test_constant_density_flux_is_transport(rng):
    us = rng.normal(size=(2, 5, 5))
    assert np.allclose(upwind(np.full((5, 5), 3.0), us), 3.0 * us)


def test_vector_matches_scalar(rng):
    phi = rng.normal(size=(2, 4, 4))
    us = rng.normal(size=(2, 4, 4))
    vu = vector_upwind(phi, us)
    vd = vector_diffusive_upwind(phi, us, 0.25, 0.3)
    for a in range(2):
        assert np.array_equal(vu[a], upwind(phi[a], us))
        assert np.array_equal(vd[a], diffusive_upwind(phi[a], us, 0.25, 0.3))


def test_divergence_free_constant_vector_telescopes(rng):
    m = Mesh(2, 6)
    # discrete divergence-free face velocity: u = curl of a node potential
    psi = rng.normal(size=m.shape)
    us = np.stack([(psi - F.bwd(psi, 1)) / m.h, -(psi - F.bwd(psi, 0)) / m.h])
    assert np.max(np.abs(F.div_W(m, us))) < 1e-10
    upd = convective_cell_update(m, vector_upwind(np.full((2,) + m.shape, 2.0), us))
    assert np.max(np.abs(upd)) < 1e-9


def test_cell_update_sums_to_zero(rng):
    m = Mesh(3, 4)
    flux = rng.normal(size=(3,) + m.shape)
    assert abs(np.sum(convective_cell_update(m, flux)) * m.cell_volume) < 1e-13


def test_cell_update_zero_flux():
    m = Mesh(2, 4)
    assert np.all(convective_cell_update(m, np.zeros((2, 4, 4))) == 0.0)


def test_cell_update_hand_row():
    # 4-cell row, fluxes only in direction 0: F = [1, 2, 4, 8] on the right faces
    m = Mesh(2, 4)
    flux = np.zeros((2, 4, 4))
    flux[0] = np.array([1.0, 2.0, 4.0, 8.0])[:, None]
    upd = convective_cell_update(m, flux)
    assert np.allclose(upd[:, 0], np.array([1 - 8, 2 - 1, 4 - 2, 8 - 4]) / m.h)
