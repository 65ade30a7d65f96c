import numpy as np
import pytest

from torusns import fields as F
from torusns.identities import (ibp_identity_suite, projection_bounds_hold, projection_bound_values, projection_error_suite,
                                random_fields)
from torusns.mesh import Mesh
from torusns.smooth import Trig, box_average, random_trig

HALF_PI = 0.5 * np.pi


def sin_x0(dim):
    return Trig.term(dim, 1.0, [1.0] + [0.0] * (dim - 1), [-HALF_PI] + [0.0] * (dim - 1))


def linear_x0(x, t=0.0):
    return x[0]


def test_project_constant():
    m = Mesh(2, 4)
    assert np.allclose(F.project_Q(m, Trig.constant(2, 3.5)), 3.5)
    assert np.allclose(F.project_E(m, [Trig.constant(2, -1.0)] * 2), -1.0)
    assert np.allclose(F.project_eps(m, Trig.constant(2, 2.0), 0, 1), 2.0)


def test_project_zero_mean_sinusoid():
    m = Mesh(2, 8)
    assert abs(F.integrate(m, F.project_Q(m, sin_x0(2)))) < 1e-15
    assert abs(F.integrate(m, F.project_E_component(m, sin_x0(2), 0))) < 1e-15


def test_project_linear_cell_mean():
    m = Mesh(2, 4)
    p = F.project_Q(m, linear_x0)
    assert p[0, 0] == pytest.approx(m.h / 2, abs=1e-15)


def test_project_linear_face_and_dual_face():
    m = Mesh(2, 4)
    # face of direction 0 stored at cell 0 sits at x0 = h
    assert F.project_E_component(m, linear_x0, 0)[0, 0] == pytest.approx(m.h, abs=1e-15)
    # dual face of the (1, 0) bidual grid: x0 ranges over one cell, mean at the face center
    assert F.project_eps(m, linear_x0, 1, 0)[1, 0] == pytest.approx(m.h, abs=1e-15)


def test_trig_box_mean_matches_quadrature(rng):
    m = Mesh(3, 4)
    f = random_trig(3, rng, time=True)
    exact = F.cell_mean(m, f, 0.1, 0.05)
    quad = box_average(lambda x, t: f(x, t), m.centers(), [m.h] * 3, 0.1, 0.05, order=8)
    assert np.max(np.abs(exact - quad)) < 1e-12


def test_average_and_jump():
    r = np.ones((4, 4))
    r[1:] = 1.0
    r[0] = 2.0
    assert F.average_face(r, 0)[0, 0] == 1.5
    assert F.jump_face(r, 0)[0, 0] == -1.0
    assert np.all(F.jump_faces(np.full((3, 3), 2.0)) == 0)


def test_checkerboard_average_and_jump():
    i, j = np.indices((4, 4))
    r = np.where((i + j) % 2 == 0, 1.0, -1.0)
    assert np.all(np.abs(F.jump_faces(r)) == 2.0)
    assert np.all(F.average_faces(r) == 0.0)


def test_cell_average_staggered(rng):
    m = Mesh(2, 4)
    assert np.allclose(F.cell_average(np.full((2, 4, 4), 1.3)), 1.3)
    alt = np.empty((2, 4, 4))
    i, j = np.indices((4, 4))
    alt[0] = np.where(i % 2 == 0, 1.0, -1.0)
    alt[1] = np.where(j % 2 == 0, 1.0, -1.0)
    assert np.all(F.cell_average(alt) == 0.0)
    u = rng.normal(size=(2, 4, 4))
    ub = F.cell_average(u)
    for a in range(4):
        for b in range(4):
            assert ub[0, a, b] == pytest.approx(0.5 * (u[0, a, b] + u[0, (a - 1) % 4, b]))
            assert ub[1, a, b] == pytest.approx(0.5 * (u[1, a, b] + u[1, a, (b - 1) % 4]))


def test_grad_D_linear_row():
    m = Mesh(2, 4)
    x = (np.arange(4) + 0.5) * m.h
    r = np.repeat(x[:, None], 4, axis=1)
    g = F.grad_D(m, r)
    assert np.allclose(g[0, :3], 1.0)
    assert np.allclose(g[0, 3], (x[0] - x[3]) / m.h)  # wrap face
    assert np.all(g[1] == 0.0)


def test_grad_D_checkerboard():
    m = Mesh(2, 4)
    i, j = np.indices((4, 4))
    r = np.where((i + j) % 2 == 0, 1.0, -1.0)
    assert np.allclose(np.abs(F.grad_D(m, r)), 2.0 / m.h)


def test_grad_D_constant():
    m = Mesh(3, 4)
    assert np.all(F.grad_D(m, np.full(m.shape, 5.0)) == 0.0)


def test_grad_B_single_bump():
    m = Mesh(2, 4)
    u = np.zeros((2, 4, 4))
    u[0, 1, 1] = 1.0
    g = F.grad_B(m, u)
    assert np.count_nonzero(g[0, 0]) == 2 and np.count_nonzero(g[0, 1]) == 2
    assert sorted(g[0, 1][g[0, 1] != 0]) == [-1 / m.h, 1 / m.h]
    assert np.all(g[1] == 0.0)


def test_grad_B_diagonal_matches_div(rng):
    m = Mesh(3, 4)
    u = rng.normal(size=(3,) + m.shape)
    g = F.grad_B(m, u)
    assert np.allclose(sum(g[i, i] for i in range(3)), F.div_W(m, u), atol=1e-12)


def test_grad_Q_linear():
    m = Mesh(2, 8)
    c = m.centers()
    v = np.stack([2.0 * c[0], -c[1]])
    g = F.grad_Q(m, v)
    inner = (slice(1, -1), slice(1, -1))
    assert np.allclose(g[0, 0][inner], 2.0)
    assert np.allclose(g[1, 1][inner], -1.0)
    assert np.allclose(g[0, 1], 0.0)
    assert np.allclose(F.grad_PiE(m, Trig.constant(2, 4.0)), 0.0)


def test_divergences(rng):
    m = Mesh(2, 6)
    assert np.all(F.div_W(m, np.ones((2, 6, 6))) == 0)
    v = rng.normal(size=(2, 6, 6))
    assert np.array_equal(F.div_W(m, F.average_vector(v)), F.div_Q(m, v))
    r = rng.normal(size=(6, 6))
    assert abs(F.integrate(m, F.div_W(m, F.grad_D(m, r)))) < 1e-12


@pytest.mark.parametrize("d,n", [(2, 8), (3, 4)])
def test_identity_suite(d, n):
    rep = ibp_identity_suite(Mesh(d, n), seed=7)
    assert rep.results
    bad = [(r.name, r.rel_residual) for r in rep.results if not r.ok]
    assert not bad


def test_projection_bound_random(rng):
    for d, n in [(2, 8), (3, 4)]:
        m = Mesh(d, n)
        _, _, u, v = random_fields(m, rng)
        assert projection_bounds_hold(projection_bound_values(m, u, v))


def test_projection_bound_constants_are_zero():
    m = Mesh(2, 4)
    vals = projection_bound_values(m, np.ones((2, 4, 4)), np.ones((2, 4, 4)))
    assert vals["PiQ_u_minus_u"] == 0 and vals["avg_v_minus_v"] == 0


def test_projection_suite_constant_zero():
    hs, table, _ = projection_error_suite(2, [Trig.constant(2, 1.0)] * 2, levels=(4, 8))
    for errs in table.values():
        assert max(errs) < 1e-13


def test_projection_suite_sinusoid_orders():
    U = [sin_x0(2), sin_x0(2)]
    _, _, orders = projection_error_suite(2, U)
    assert orders["face_grad"] >= 0.9
