"""Predicted convergence exponents.

``beta_D`` and ``beta_M`` quantify the loss of the density and momentum
consistency errors for soft pressure laws; the rate ``A`` of the relative
energy error is the minimum over each scheme's list of exponents.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

FV = "fv"
MAC = "mac"


@dataclass(frozen=True)
class RatePrediction:
    scheme: str
    dim: int
    gamma: float
    eps: float
    beta_d: float
    beta_m: float
    A: float


def _check(scheme, dim, gamma, eps):
    if scheme not in (FV, MAC):
        raise ValueError(f"unknown scheme {scheme!r}")
    if dim not in (2, 3):
        raise ValueError(f"dimension must be 2 or 3, got {dim}")
    if not gamma > 1:
        raise ValueError(f"gamma must exceed 1, got {gamma}")
    if not eps > -1:
        raise ValueError(f"eps must exceed -1, got {eps}")


def beta_d(dim, gamma, eps):
    if gamma >= 2:
        return 0 * gamma
    return max(-(3 * eps + 3 + dim) / (6 * gamma), (gamma - 2) * dim / (2 * gamma))


def beta_m(dim, gamma, eps):
    """Momentum exponent.

    The branch ``(gamma - 3) d / (3 gamma)`` applies to ``gamma in [2, 3)`` in
    three dimensions only; in two dimensions every ``gamma >= 2`` gives 0, so
    that ``A = 1`` whenever ``gamma >= 2`` and ``eps >= 0``.
    """
    if gamma < 2:
        return -(3 * eps + 3 + dim) / (6 * gamma)
    if dim == 3 and gamma < 3:
        return (gamma - 3) * dim / (3 * gamma)
    return 0 * gamma


def rate_terms(scheme, dim, gamma, eps):
    bd, bm = beta_d(dim, gamma, eps), beta_m(dim, gamma, eps)
    terms = [1 + 0 * eps, 1 + eps, 1 + bd, 1 + bm]
    if scheme == MAC:
        terms.append(1 + eps + bd)
    return bd, bm, terms


def predict_rate(scheme: str, dim: int, gamma, eps) -> RatePrediction:
    """Exponents and the rate ``A``; exact when ``gamma`` and ``eps`` are `Fraction` values."""
    _check(scheme, dim, gamma, eps)
    bd, bm, terms = rate_terms(scheme, dim, gamma, eps)
    return RatePrediction(scheme, dim, gamma, eps, bd, bm, min(terms))


def rate(scheme, dim, gamma, eps):
    return predict_rate(scheme, dim, gamma, eps).A


def closed_form_epsilon(scheme: str, dim: int, gamma):
    """Closed-form optimal ``eps`` for the soft-law range ``gamma < 2``, else ``None``."""
    if not gamma < 2:
        return None
    if scheme == FV:
        return -Fraction(5) / (3 + 6 * gamma) if dim == 2 else -Fraction(2) / (1 + 2 * gamma)
    return 0 * gamma


def optimal_epsilon(scheme: str, dim: int, gamma, resolution: float = 1e-4,
                    eps_max: float = 2.0):
    """Maximize ``A`` over ``eps in (-1, eps_max]``.

    Evaluates a uniform grid of the given resolution together with the
    closed-form candidate and ``eps = 0``, and returns the smallest
    maximizer ``(eps*, A*)``.
    """
    _check(scheme, dim, gamma, 0.0)
    steps = int(round((eps_max + 1) / resolution))
    cands = list(np.round(np.arange(1, steps + 1) * resolution - 1.0, 12))
    cf = closed_form_epsilon(scheme, dim, gamma)
    if cf is not None:
        cands.append(float(cf))
    cands.append(0.0)
    best_e, best_a = None, -np.inf
    for e in sorted(set(cands)):
        if not -1 < e <= eps_max:
            continue
        a = rate(scheme, dim, float(gamma), e)
        if a > best_a + 1e-13:
            best_e, best_a = float(e), float(a)
    return best_e, best_a


def rate_table(scheme: str, dim: int, gammas, epsilons):
    """Rows ``(gamma, eps, beta_D, beta_M, A)``."""
    rows = []
    for g in gammas:
        for e in epsilons:
            p = predict_rate(scheme, dim, g, e)
            rows.append((g, e, p.beta_d, p.beta_m, p.A))
    return rows
