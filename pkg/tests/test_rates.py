from fractions import Fraction as Fr

import pytest

from torusns.analysis.rates import (FV, MAC, beta_d, beta_m, closed_form_epsilon, optimal_epsilon,
                                    predict_rate, rate, rate_table)


def test_fv_d2_gamma2_first_order():
    assert predict_rate(FV, 2, Fr(2), Fr(0)).A == 1


def test_mac_d3_gamma_three_halves():
    p = predict_rate(MAC, 3, Fr(3, 2), Fr(0))
    assert p.beta_m == Fr(-2, 3)
    assert p.A == Fr(1, 3)


def test_fv_d3_gamma2():
    assert predict_rate(FV, 3, Fr(2), Fr(1, 2)).A == Fr(1, 2)


def test_fv_d3_gamma_three_halves_eps_minus_half():
    # direct evaluation; differs from the 3/4 quoted for the FV scheme at this point
    assert predict_rate(FV, 3, Fr(3, 2), Fr(-1, 2)).A == Fr(1, 2)


@pytest.mark.parametrize("g", [Fr(2), Fr(5, 2), Fr(3), Fr(7)])
@pytest.mark.parametrize("e", [Fr(0), Fr(1, 4), Fr(2)])
def test_d2_hard_gas_first_order(g, e):
    assert rate(FV, 2, g, e) == 1 and rate(MAC, 2, g, e) == 1


@pytest.mark.parametrize("g", [Fr(2), Fr(9, 4), Fr(5, 2), Fr(29, 10)])
def test_d3_intermediate(g):
    for e in (Fr(0), Fr(1, 2), Fr(1)):
        assert rate(FV, 3, g, e) == (2 * g - 3) / g
        assert rate(MAC, 3, g, e) == (2 * g - 3) / g


def test_d3_stiff_first_order():
    assert rate(FV, 3, Fr(3), Fr(0)) == 1 and rate(MAC, 3, Fr(4), Fr(1, 2)) == 1


@pytest.mark.parametrize("g", [Fr(11, 10), Fr(5, 4), Fr(3, 2), Fr(19, 10)])
def test_mac_value_at_zero(g):
    assert rate(MAC, 3, g, Fr(0)) == (g - 1) / g
    assert rate(MAC, 2, g, Fr(0)) == (6 * g - 5) / (6 * g)


@pytest.mark.parametrize("g", [Fr(11, 10), Fr(5, 4), Fr(3, 2), Fr(19, 10)])
def test_fv_closed_form_optimum(g):
    e2 = closed_form_epsilon(FV, 2, g)
    e3 = closed_form_epsilon(FV, 3, g)
    assert e2 == Fr(-5) / (3 + 6 * g) and rate(FV, 2, g, e2) == 1 + e2
    assert e3 == Fr(-2) / (1 + 2 * g) and rate(FV, 3, g, e3) == 1 + e3
    # no grid point beats the closed form
    for k in range(-99, 200):
        e = Fr(k, 100)
        assert rate(FV, 2, g, e) <= 1 + e2
        assert rate(FV, 3, g, e) <= 1 + e3


def test_fv_endpoint_limits():
    lo, hi = Fr(1), Fr(2)
    assert 1 + Fr(-5) / (3 + 6 * lo) == Fr(4, 9)
    assert 1 + Fr(-5) / (3 + 6 * hi) == Fr(2, 3)
    assert 1 + Fr(-2) / (1 + 2 * lo) == Fr(1, 3)
    assert 1 + Fr(-2) / (1 + 2 * hi) == Fr(3, 5)
    g = Fr(1) + Fr(1, 10**9)
    assert abs(rate(FV, 2, g, closed_form_epsilon(FV, 2, g)) - Fr(4, 9)) < Fr(1, 10**8)


def test_optimal_epsilon_examples():
    e, a = optimal_epsilon(FV, 3, 1.5)
    assert e == pytest.approx(-0.5, abs=1e-12) and a == pytest.approx(0.5, abs=1e-12)
    e, a = optimal_epsilon(FV, 2, 2 - 1e-9)
    assert a == pytest.approx(2 / 3, abs=1e-6)
    e, a = optimal_epsilon(MAC, 3, 1.2)
    assert e == 0.0 and a == pytest.approx(0.2 / 1.2, abs=1e-12)


def test_betas_branches():
    assert beta_d(2, Fr(3), Fr(0)) == 0
    assert beta_d(3, Fr(3, 2), Fr(0)) == max(Fr(-6, 9), Fr(-1, 2))
    assert beta_m(3, Fr(5, 2), Fr(0)) == Fr(-1, 5)
    assert beta_m(2, Fr(5, 2), Fr(0)) == 0


@pytest.mark.parametrize("args", [("x", 2, 1.5, 0), (FV, 4, 1.5, 0), (FV, 2, 1.0, 0), (FV, 2, 1.5, -1)])
def test_invalid_arguments(args):
    with pytest.raises(ValueError):
        predict_rate(*args)


def test_rate_table_matches_predict_rate():
    rows = rate_table(MAC, 3, [1.2, 2.5], [-0.5, 0.0, 1.0])
    assert len(rows) == 6
    for g, e, bd, bm, a in rows:
        assert a == predict_rate(MAC, 3, g, e).A
