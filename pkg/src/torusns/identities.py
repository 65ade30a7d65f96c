"""Randomized checks of the discrete integration-by-parts identities and projection bounds.

Every identity is evaluated as two independently assembled scalars; the
smooth-function integrals on the left-hand sides use cell / dual-cell
averages of the analytic derivatives, the right-hand sides use face and
dual-face averages of the function itself.  For `Trig` inputs all averages
are exact, so the residuals measure only floating point summation error.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import fields as F
from .mesh import Mesh
from .smooth import Trig, box_average, random_trig

IDENTITY_RTOL = 1e-12
IDENTITY_ATOL = 1e-14

IDENTITY_NAMES = (
    "sbp_grad_div", "sbp_grad_div_componentwise", "div_projection_commutes", "grad_projection_commutes", "sbp_staggered_smooth_grad", "sbp_cell_smooth_grad",
    "sbp_staggered_laplace", "sbp_staggered_grad_div", "sbp_cell_laplace", "sbp_averaged_grad_div", "div_of_average", "avg_dD", "dBii",
)


@dataclass
class IdentityResult:
    name: str
    lhs: float
    rhs: float
    scale: float

    @property
    def abs_residual(self) -> float:
        return abs(self.lhs - self.rhs)

    @property
    def rel_residual(self) -> float:
        return self.abs_residual / self.scale if self.scale > 0 else self.abs_residual

    @property
    def ok(self) -> bool:
        return self.abs_residual <= max(IDENTITY_RTOL * self.scale, IDENTITY_ATOL)


@dataclass
class IdentityReport:
    dim: int
    n: int
    seed: int
    results: list[IdentityResult] = field(default_factory=list)

    @property
    def max_rel_residual(self) -> float:
        return max(r.rel_residual for r in self.results)

    @property
    def ok(self) -> bool:
        return all(r.ok for r in self.results)


def _result(name, lhs, rhs, *magnitudes):
    scale = max([abs(lhs), abs(rhs)] + [float(mg) for mg in magnitudes])
    return IdentityResult(name, float(lhs), float(rhs), scale)


def _div(U: list[Trig]) -> Trig:
    out = U[0].diff(0)
    for a in range(1, len(U)):
        out = out + U[a].diff(a)
    return out


def identity_checks(m: Mesh, r, phi, u, v, psi: Trig, U: list[Trig]) -> list[IdentityResult]:
    """Both sides of every identity for the given discrete and smooth inputs."""
    d, hd = m.dim, m.cell_volume
    res = []

    # summation by parts: int r div_W u = - int u . grad_D r, and per direction
    lhs = F.inner(m, r, F.div_W(m, u))
    rhs = -F.inner(m, u, F.grad_D(m, r))
    res.append(_result("sbp_grad_div", lhs, rhs, hd * np.abs(u * F.grad_D(m, r)).sum()))
    worst = None
    for i in range(d):
        a = F.inner(m, r, F.d_M(m, u[i], i))
        b = -F.inner(m, u[i], F.d_D(m, r, i))
        cand = _result("sbp_grad_div_componentwise", a, b, hd * np.abs(u[i] * F.d_D(m, r, i)).sum())
        if worst is None or cand.rel_residual > worst.rel_residual:
            worst = cand
    res.append(worst)

    divU = _div(U)

    # divergence commutes with face projection: int r div U = int r div_W Pi_E U
    lhs = F.inner(m, r, F.cell_mean(m, divU))
    rhs = F.inner(m, r, F.div_W(m, F.project_E(m, U)))
    res.append(_result("div_projection_commutes", lhs, rhs, hd * np.abs(r * F.cell_mean(m, divU)).sum()))

    # gradient commutes with face projection: int v . grad psi = int v . grad^{Pi_E} psi
    gpsi = psi.grad()
    gmean = np.stack([F.cell_mean(m, g) for g in gpsi])
    lhs = F.inner(m, v, gmean)
    rhs = F.inner(m, v, F.grad_PiE(m, psi))
    res.append(_result("grad_projection_commutes", lhs, rhs, hd * np.abs(v * gmean).sum()))

    # int u . grad psi = - sum_i int Pi_eps^(ii) psi d_Mi u_i
    dmean = np.stack([F.dual_average(m, gpsi[i], i) for i in range(d)])
    lhs = F.inner(m, u, dmean)
    rhs = -sum(F.inner(m, F.project_eps(m, psi, i, i), F.d_M(m, u[i], i)) for i in range(d))
    res.append(_result("sbp_staggered_smooth_grad", lhs, rhs, hd * np.abs(u * dmean).sum()))

    # int v . grad psi = - sum_i int Pi_E^(i) psi d_Di v_i
    lhs = F.inner(m, v, gmean)
    rhs = -sum(F.inner(m, F.project_E_component(m, psi, i), F.d_D(m, v[i], i)) for i in range(d))
    res.append(_result("sbp_cell_smooth_grad", lhs, rhs, hd * np.abs(v * gmean).sum()))

    # int overline{u} . Lap U = - sum_ij sum_eps in E_ji dB_ji u_j * mean of Pi_E^(i) d_i U_j
    ubar = F.cell_average(u)
    lapU = np.stack([F.cell_mean(m, Ua.laplacian()) for Ua in U])
    lhs = F.inner(m, ubar, lapU)
    G = F.grad_B(m, u)
    rhs = 0.0
    for i in range(d):
        for j in range(d):
            P = F.project_E_component(m, U[j].diff(i), i)
            Pm = F.bwd(P, i)  # sigma = p - e_i
            avg = 0.5 * (Pm + F.fwd(Pm, j))
            rhs -= F.inner(m, G[j, i], avg)
    res.append(_result("sbp_staggered_laplace", lhs, rhs, hd * np.abs(ubar * lapU).sum()))

    # int u . grad div U = - sum_i int d_Mi u_i Pi_eps^(ii) div U
    gdiv = divU.grad()
    dmean = np.stack([F.dual_average(m, gdiv[i], i) for i in range(d)])
    lhs = F.inner(m, u, dmean)
    rhs = -sum(F.inner(m, F.d_M(m, u[i], i), F.project_eps(m, divU, i, i)) for i in range(d))
    res.append(_result("sbp_staggered_grad_div", lhs, rhs, hd * np.abs(u * dmean).sum()))

    # int v . Lap U = - int grad_D v : Pi_E grad U
    lapU = np.stack([F.cell_mean(m, Ua.laplacian()) for Ua in U])
    lhs = F.inner(m, v, lapU)
    GD = F.grad_D_vector(m, v)
    rhs = 0.0
    for a in range(d):
        for i in range(d):
            rhs -= F.inner(m, GD[a, i], F.project_E_component(m, U[a].diff(i), i))
    res.append(_result("sbp_cell_laplace", lhs, rhs, hd * np.abs(v * lapU).sum()))

    # int <v> . grad div U = - sum_i int Pi_eps^(ii) div U d_Mi <v_i>
    vav = F.average_vector(v)
    lhs = F.inner(m, vav, dmean)
    rhs = -sum(F.inner(m, F.project_eps(m, divU, i, i), F.d_M(m, vav[i], i)) for i in range(d))
    res.append(_result("sbp_averaged_grad_div", lhs, rhs, hd * np.abs(vav * dmean).sum()))

    # divergence of the face average and two pointwise identities: compare max-norms of the difference
    a, b = F.div_W(m, F.average_vector(v)), F.div_Q(m, v)
    res.append(_result("div_of_average", 0.0, float(np.max(np.abs(a - b))), np.max(np.abs(b))))
    worst = 0.0
    for i in range(d):
        lhs_i = 0.5 * (F.d_D(m, r, i) + F.bwd(F.d_D(m, r, i), i))
        worst = max(worst, float(np.max(np.abs(lhs_i - F.d_M(m, F.average_face(r, i), i)))))
    res.append(_result("avg_dD", 0.0, worst, np.max(np.abs(F.grad_D(m, r)))))
    worst = max(float(np.max(np.abs(G[i, i] - F.d_M(m, u[i], i)))) for i in range(d))
    res.append(_result("dBii", 0.0, worst, np.max(np.abs(G))))
    return res


def random_fields(m: Mesh, rng: np.random.Generator):
    """``r, phi`` in Q_h, ``u`` in W_h, ``v`` in Q_h^d, uniform in [-1, 1]."""
    shape = m.shape
    r = rng.uniform(-1, 1, shape)
    phi = rng.uniform(-1, 1, shape)
    u = rng.uniform(-1, 1, (m.dim,) + shape)
    v = rng.uniform(-1, 1, (m.dim,) + shape)
    return r, phi, u, v


def ibp_identity_suite(m: Mesh, seed: int = 0) -> IdentityReport:
    rng = np.random.default_rng(seed)
    r, phi, u, v = random_fields(m, rng)
    psi = random_trig(m.dim, rng)
    U = [random_trig(m.dim, rng) for _ in range(m.dim)]
    report = IdentityReport(m.dim, m.n, seed)
    report.results = identity_checks(m, r, phi, u, v, psi, U)
    return report


# ---- projection bounds for random fields (hard inequalities) ------------------

def projection_bound_values(m: Mesh, u: np.ndarray, v: np.ndarray) -> dict[str, float]:
    """Left and right sides of both projection inequalities, assembled on half cells."""
    hd2 = 0.5 * m.cell_volume
    ubar = F.cell_average(u)
    lhs_u = 0.0
    lhs_v = 0.0
    vav = F.average_vector(v)
    for i in range(m.dim):
        lhs_u += hd2 * np.sum((ubar[i] - u[i]) ** 2 + (ubar[i] - F.bwd(u[i], i)) ** 2)
        lhs_v += hd2 * np.sum((vav[i] - v[i]) ** 2 + (F.bwd(vav[i], i) - v[i]) ** 2)
    gB = np.sqrt(m.cell_volume * np.sum(F.grad_B(m, u) ** 2))
    gD = np.sqrt(m.cell_volume * np.sum(F.grad_D_vector(m, v) ** 2))
    return {
        "PiQ_u_minus_u": float(np.sqrt(lhs_u)),
        "half_h_gradB_u": 0.5 * m.h * float(gB),
        "avg_v_minus_v": float(np.sqrt(lhs_v)),
        "half_h_gradD_v": 0.5 * m.h * float(gD),
    }


def projection_bounds_hold(values: dict[str, float], rtol: float = 1e-12) -> bool:
    return (values["PiQ_u_minus_u"] <= values["half_h_gradB_u"] * (1 + rtol)
            and values["avg_v_minus_v"] <= values["half_h_gradD_v"] * (1 + rtol))


# ---- projection errors for smooth data --------------------------------------------

def _l2_box_error(m: Mesh, const: np.ndarray, f, offset, order: int = 5) -> float:
    """L2 norm of (piecewise constant on the boxes at ``offset``) minus smooth ``f``."""
    centers = m.centers(offset)

    def sq(x, t):
        return (f(x, t) - const) ** 2

    return float(np.sqrt(m.cell_volume * np.sum(box_average(sq, centers, [m.h] * m.dim, order=order))))


def _half_cell_diff(m: Mesh, cellv: np.ndarray, facev: np.ndarray, i: int) -> float:
    hd2 = 0.5 * m.cell_volume
    return float(np.sqrt(hd2 * np.sum((cellv - facev) ** 2 + (cellv - F.bwd(facev, i)) ** 2)))


def projection_errors(m: Mesh, U: list[Trig], Phi: list[Trig] | None = None) -> dict[str, float]:
    """Worst-case (over components / directions) norms of the projection differences."""
    d = m.dim
    Phi = U if Phi is None else Phi
    divU = _div(U)
    out = {}
    face_err = 0.0
    for i in range(d):
        off = np.zeros(d)
        off[i] = 0.5
        for j in range(d):
            g = U[j].diff(i)
            face_err = max(face_err, _l2_box_error(m, F.project_E_component(m, g, i), g, off))
    out["face_grad"] = face_err

    div_err = dual_err = 0.0
    for i in range(d):
        pe = F.project_eps(m, divU, i, i)
        div_err = max(div_err, _l2_box_error(m, pe, divU, np.zeros(d)))
        dual_err = max(dual_err, _half_cell_diff(m, pe, F.project_E_component(m, divU, i), i))
    out["div_minus_dual_face"] = div_err
    out["dual_face_minus_face"] = dual_err

    PQ = np.stack([F.project_Q(m, p) for p in Phi])
    gdd = F.grad_Q_scalar(m, F.div_Q(m, PQ))
    divPhi = _div(Phi)
    graddiv_err = 0.0
    for a in range(d):
        graddiv_err = max(graddiv_err, _l2_box_error(m, gdd[a], divPhi.diff(a), np.zeros(d)))
    lap_err = 0.0
    for a in range(d):
        lap_err = max(lap_err, _l2_box_error(m, F.laplacian_h(m, PQ[a]), Phi[a].laplacian(), np.zeros(d)))
    out["grad_div"] = graddiv_err
    out["laplace"] = lap_err
    out["PiQ_cell"] = max(_l2_box_error(m, F.project_Q(m, Ua), Ua, np.zeros(d)) for Ua in U)
    return out


def observed_order(hs, errors) -> float:
    """Least-squares slope of ``log(error)`` against ``log(h)``."""
    hs = np.asarray(hs, dtype=float)
    errors = np.asarray(errors, dtype=float)
    if len(hs) < 2 or np.any(errors <= 0):
        return float("nan")
    return float(np.polyfit(np.log(hs), np.log(errors), 1)[0])


def projection_error_suite(dim: int, U: list[Trig], levels=(4, 8, 16, 32)):
    """Errors per level and least-squares orders for every projection metric."""
    table = {}
    hs = []
    for n in levels:
        m = Mesh(dim, n)
        hs.append(m.h)
        for k, e in projection_errors(m, U).items():
            table.setdefault(k, []).append(e)
    orders = {k: observed_order(hs, errs) for k, errs in table.items()}
    return hs, table, orders
