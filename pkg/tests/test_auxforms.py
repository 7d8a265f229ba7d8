"""
Tests for weight-1 multipliers: Eisenstein series, eta products and theta series
"""

import pytest

from src.auxforms import (eisenstein1, eta_character, eta_product, l_value_at_zero, multiplier_pool, theta_combination,
                          theta_series, weight_one_eta_pairs)
from src.dirichlet import DirichletChar, quadratic_character


@pytest.fixture
def chi23():
    return quadratic_character(-23, 23)


def test_delta_as_an_eta_product():
    delta = eta_product([(1, 24)], 4)
    assert delta.coefficients(0, 4) == [0, 1, -24, 252]


def test_level_23_eta_product():
    f = eta_product([(1, 1), (23, 1)], 10)
    assert f.coefficients(1, 10) == [1, -1, -1, 0, 0, 1, 0, 1, 0]
    assert weight_one_eta_pairs(23) == [(1, 23)]


def test_eta_product_is_a_theta_difference():
    difference = theta_combination([(1, (1, 1, 6)), (-1, (2, 1, 3))], 30) / 2
    assert difference == eta_product([(1, 1), (23, 1)], 30)


def test_theta_series_counts_representations():
    theta = theta_series((1, 0, 1), 6)
    assert theta.coefficients(0, 6) == [1, 4, 4, 0, 4, 8]
    with pytest.raises(ValueError):
        theta_series((1, 3, 1), 6)


def test_eta_character(chi23):
    assert eta_character(1, 23, 23) == chi23
    with pytest.raises(ValueError):
        eta_product([(1, 1)], 5)


def test_l_value_and_eisenstein_series(chi23):
    assert l_value_at_zero(chi23) == 3
    e = eisenstein1(DirichletChar.trivial(1), chi23, 5)
    assert e.level == 23
    assert e.character == chi23
    assert e.scale == 2
    assert e.series.coefficients(0, 5) == [3, 2, 4, 4, 6]
    with pytest.raises(ValueError):
        eisenstein1(DirichletChar.trivial(1), DirichletChar.trivial(1), 5)


def test_multiplier_pool_at_level_23(chi23):
    pool = multiplier_pool(23, 2, 12)
    assert [m.kind for m in pool] == ["eisenstein", "eta", "theta", "theta"]
    assert all(m.character == chi23 for m in pool)
    eisenstein = pool[0]
    assert not eisenstein.usable_at(3)
    assert all(m.usable_at(3) for m in pool[1:])
    assert pool[1].valuation == 1
