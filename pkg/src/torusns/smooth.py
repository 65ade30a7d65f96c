"""Periodic smooth functions and box averaging.

`Trig` is a finite sum of separable cosine products

    f(t, x) = sum_m c_m cos(2 pi k_{m,t} t + phi_{m,t}) prod_a cos(2 pi k_{m,a} x_a + phi_{m,a})

which is closed under differentiation and multiplication and whose averages
over axis-aligned boxes (of any dimension, including faces) are available in
closed form.  Generic callables ``f(x, t)`` are averaged with tensor
Gauss-Legendre quadrature instead.
"""

from __future__ import annotations

import itertools
from typing import Callable, Sequence

import numpy as np

TWO_PI = 2.0 * np.pi


class Trig:
    """Sum of separable cosine products on ``T^d x R`` (last column of ``k`` is time)."""

    def __init__(self, dim: int, coef=(), k=(), phase=()):
        self.dim = dim
        self.coef = np.asarray(coef, dtype=float).reshape(-1)
        self.k = np.asarray(k, dtype=float).reshape(-1, dim + 1)
        self.phase = np.asarray(phase, dtype=float).reshape(-1, dim + 1)
        if not (len(self.coef) == len(self.k) == len(self.phase)):
            raise ValueError("coef, k and phase must have the same number of terms")

    @classmethod
    def constant(cls, dim: int, value: float) -> "Trig":
        return cls(dim, [value], np.zeros((1, dim + 1)), np.zeros((1, dim + 1)))

    @classmethod
    def term(cls, dim: int, c: float, k: Sequence[float], phase: Sequence[float], kt: float = 0.0,
             phase_t: float = 0.0) -> "Trig":
        """Single product ``c cos(2 pi kt t + phase_t) prod cos(2 pi k_a x_a + phase_a)``."""
        return cls(dim, [c], [list(k) + [kt]], [list(phase) + [phase_t]])

    @property
    def nterms(self) -> int:
        return len(self.coef)

    def __repr__(self):
        return f"Trig(dim={self.dim}, nterms={self.nterms})"

    # ---- arithmetic -------------------------------------------------------
    def _concat(self, other: "Trig", sign: float = 1.0) -> "Trig":
        return Trig(self.dim, np.concatenate([self.coef, sign * other.coef]),
                    np.concatenate([self.k, other.k]), np.concatenate([self.phase, other.phase]))

    def __add__(self, other):
        if isinstance(other, Trig):
            return self._concat(other)
        return self._concat(Trig.constant(self.dim, float(other)))

    __radd__ = __add__

    def __neg__(self):
        return Trig(self.dim, -self.coef, self.k, self.phase)

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, Trig):
            return Trig(self.dim, float(other) * self.coef, self.k, self.phase)
        # cos A cos B = (cos(A + B) + cos(A - B)) / 2 on every axis
        coef, ks, ph = [], [], []
        signs = list(itertools.product((1.0, -1.0), repeat=self.dim + 1))
        for c1, k1, p1 in zip(self.coef, self.k, self.phase):
            for c2, k2, p2 in zip(other.coef, other.k, other.phase):
                for s in signs:
                    s = np.asarray(s)
                    coef.append(c1 * c2 * 0.5 ** (self.dim + 1))
                    ks.append(k1 + s * k2)
                    ph.append(p1 + s * p2)
        return Trig(self.dim, coef, ks, ph).simplify()

    __rmul__ = __mul__

    def simplify(self, tol: float = 1e-15) -> "Trig":
        """Merge equal terms after normalizing ``k >= 0`` and phases to ``[0, pi)``."""
        if self.nterms == 0:
            return self
        k = self.k.copy()
        ph = self.phase.copy()
        coef = self.coef.copy()
        neg = k < 0
        k[neg] = -k[neg]
        ph[neg] = -ph[neg]
        zero = k == 0
        coef = coef * np.prod(np.where(zero, np.cos(ph), 1.0), axis=1)
        ph[zero] = 0.0
        ph = np.mod(ph, 2 * np.pi)
        flip = ph >= np.pi
        ph[flip] -= np.pi
        coef = coef * np.prod(np.where(flip, -1.0, 1.0), axis=1)
        ph[np.isclose(ph, np.pi, rtol=0, atol=1e-13)] = 0.0
        keys = np.round(np.concatenate([k, ph], axis=1), 12)
        uniq, inv = np.unique(keys, axis=0, return_inverse=True)
        merged = np.zeros(len(uniq))
        np.add.at(merged, inv.ravel(), coef)
        first = np.zeros(len(uniq), dtype=int)
        first[inv.ravel()[::-1]] = np.arange(len(inv.ravel()))[::-1]
        keep = np.abs(merged) > tol
        return Trig(self.dim, merged[keep], k[first][keep], ph[first][keep])

    # ---- calculus ---------------------------------------------------------
    def diff(self, axis: int) -> "Trig":
        """Partial derivative; ``axis == dim`` is the time derivative."""
        w = TWO_PI * self.k[:, axis]
        keep = w != 0.0
        ph = self.phase[keep].copy()
        ph[:, axis] += 0.5 * np.pi
        return Trig(self.dim, self.coef[keep] * w[keep], self.k[keep], ph)

    def dt(self) -> "Trig":
        return self.diff(self.dim)

    def grad(self) -> list["Trig"]:
        return [self.diff(a) for a in range(self.dim)]

    def laplacian(self) -> "Trig":
        out = Trig(self.dim)
        for a in range(self.dim):
            out = out + self.diff(a).diff(a)
        return out

    # ---- evaluation -------------------------------------------------------
    def __call__(self, x, t: float = 0.0):
        x = [np.asarray(xa, dtype=float) for xa in x]
        out = np.zeros(np.broadcast(*x).shape)
        for c, k, p in zip(self.coef, self.k, self.phase):
            val = c * np.cos(TWO_PI * k[-1] * t + p[-1])
            for a in range(self.dim):
                val = val * np.cos(TWO_PI * k[a] * x[a] + p[a])
            out = out + val
        return out

    def box_mean(self, centers, widths, t: float = 0.0, dt: float = 0.0):
        """Exact mean over boxes ``centers +- widths/2`` (zero width = evaluate) and ``[t, t + dt]``."""
        centers = [np.asarray(c, dtype=float) for c in centers]
        out = np.zeros(np.broadcast(*centers).shape)
        tm = t + 0.5 * dt
        for c, k, p in zip(self.coef, self.k, self.phase):
            w = TWO_PI * k
            val = c * np.cos(w[-1] * tm + p[-1]) * _sinc(w[-1] * dt * 0.5)
            for a in range(self.dim):
                val = val * np.cos(w[a] * centers[a] + p[a]) * _sinc(w[a] * widths[a] * 0.5)
            out = out + val
        return out

    def sup_norm_bound(self) -> float:
        return float(np.abs(self.coef).sum())


def _sinc(z):
    return np.sinc(np.asarray(z) / np.pi)


def gauss_legendre_unit(order: int) -> tuple[np.ndarray, np.ndarray]:
    """Nodes on ``[-1/2, 1/2]`` and weights summing to one."""
    x, w = np.polynomial.legendre.leggauss(order)
    return 0.5 * x, 0.5 * w


def box_average(f, centers, widths, t: float = 0.0, dt: float = 0.0, order: int = 5):
    """Average of ``f`` over boxes; exact for `Trig`, tensor Gauss-Legendre otherwise.

    ``f`` is either a `Trig` or a callable ``f(x, t)`` with ``x`` a tuple of
    coordinate arrays.  Axes with zero width are sampled at the center.
    """
    if hasattr(f, "box_mean"):
        return f.box_mean(centers, widths, t, dt)
    nodes, weights = gauss_legendre_unit(order)
    centers = [np.asarray(c, dtype=float) for c in centers]
    per_axis = [
        list(zip(nodes * wa, weights)) if wa > 0 else [(0.0, 1.0)] for wa in widths
    ]
    per_time = list(zip(nodes * dt, weights)) if dt > 0 else [(0.0, 1.0)]
    out = np.zeros(np.broadcast(*centers).shape)
    tm = t + 0.5 * dt
    for tq, tw in per_time:
        for combo in itertools.product(*per_axis):
            wgt = tw
            pts = []
            for c, (dx, wx) in zip(centers, combo):
                pts.append(c + dx)
                wgt *= wx
            out = out + wgt * np.asarray(f(tuple(pts), tm + tq))
    return out


def random_trig(dim: int, rng: np.random.Generator, nterms: int = 3, kmax: int = 3,
                time: bool = False) -> Trig:
    """Random zero-or-not-mean trigonometric polynomial used by the identity suites."""
    k = rng.integers(0, kmax + 1, size=(nterms, dim + 1)).astype(float)
    if not time:
        k[:, -1] = 0.0
    phase = rng.uniform(0.0, TWO_PI, size=(nterms, dim + 1))
    coef = rng.uniform(-1.0, 1.0, size=nterms)
    return Trig(dim, coef, k, phase)


SmoothFunction = Callable  # Trig or f(x, t)
