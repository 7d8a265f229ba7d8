"""
Tests for characteristic polynomials, relative extensions and eigenform decomposition
"""

from src.auxforms import eta_product
from src.cyclotomic import CycNumber
from src.dirichlet import quadratic_character
from src.heckefield import (ExtensionField, charpoly, decompose, factor_over_cyclotomic, good_primes, hecke_on_series,
                            poly_to_string)


def cyc(order, *values):
    return [CycNumber.from_rational(order, v) for v in values]


def test_charpoly_of_a_rational_matrix():
    matrix = [cyc(1, 2, 1), cyc(1, 1, 1)]
    assert charpoly(matrix, 1) == [1, -3, 1]
    assert poly_to_string(charpoly(matrix, 1)) == "x^2 - 3*x + 1"


def test_factoring_over_q_and_over_q_i():
    factors = factor_over_cyclotomic(cyc(1, -1, 0, 1), 1)
    assert sorted(poly_to_string(f) for f, _ in factors) == ["x + 1", "x - 1"]
    factors = factor_over_cyclotomic(cyc(4, 1, 0, 1), 4)
    assert len(factors) == 2
    assert all(len(f) == 2 and m == 1 for f, m in factors)


def test_factors_over_cyclotomic_fields_have_cyclotomic_coefficients():
    factors = factor_over_cyclotomic(cyc(4, 1, 0, 1), 4)
    roots = [-f[0] for f, _ in factors]
    assert all(r * r == -1 for r in roots)
    factors = factor_over_cyclotomic(cyc(3, 1, 1, 1), 3)
    assert len(factors) == 2
    roots = [-f[0] for f, _ in factors]
    assert all(r ** 3 == 1 and r != 1 for r in roots)
    assert roots[0] != roots[1]
    factors = factor_over_cyclotomic(cyc(6, -1, 0, 1), 6)
    assert sorted(poly_to_string(f) for f, _ in factors) == ["x + 1", "x - 1"]
    factors = factor_over_cyclotomic(cyc(5, 1, 0, 1), 5)
    assert len(factors) == 1 and len(factors[0][0]) == 3


def test_relative_extension_arithmetic():
    L = ExtensionField(1, cyc(1, -1, -1, 1))       # a^2 = a + 1
    a = L.generator()
    assert a * a == a + 1
    assert a * a.inverse() == 1
    assert (a ** 2).trace() == 3


def test_good_primes_skip_the_level():
    assert good_primes(6, 3) == [5, 7, 11]


def test_weight_one_hecke_operator_on_an_eigenform():
    chi = quadratic_character(-23, 23)
    h = eta_product([(1, 1), (23, 1)], 30)
    image = hecke_on_series(h, 2, chi, 23)
    assert image.prec == 15
    assert image == h.truncate(15).scale(-1)


def test_decompose_a_one_dimensional_space():
    chi = quadratic_character(-23, 23)
    h = eta_product([(1, 1), (23, 1)], 30, order=2)
    forms = decompose([h], [1], chi, 23, 2)
    assert len(forms) == 1
    form = forms[0]
    assert form.degree == 1 and form.is_new
    assert form.series() == h
    assert poly_to_string(form.hecke_polynomials[2]) == "x + 1"
    assert form.expansion().startswith("q - q^2 - q^3")
