"""
Tests for weight-2 modular symbols, Hecke operators and q-expansion bases
"""

import pytest

from src.dirichlet import DirichletChar, all_characters, conjugacy_classes, quadratic_character
from src.modsym import (_matmul, build_space, cusp_count, cusp_form_dimension, cusp_key, degree_omega, genus_x1, hecke,
                        index_gamma0, index_gamma1, lift_to_sl2, merel_matrices, prime_to_p_subgroup, qexp_basis,
                        sturm_bound)
from src.qseries import PrecisionError


def test_geometry_of_x1_23():
    assert index_gamma0(23) == 24
    assert index_gamma1(23) == 528
    assert degree_omega(23) == 22
    assert cusp_count(23) == 22
    assert sturm_bound(23) == 4


def test_merel_matrices_and_lifts():
    assert len(merel_matrices(2)) == 4
    assert all(a * d - b * c == 2 for a, b, c, d in merel_matrices(2))
    a, b, c, d = lift_to_sl2(3, 4, 5)
    assert a * d - b * c == 1
    assert (c % 5, d % 5) == (3, 4)
    assert cusp_key(2, 7, 23) == cusp_key(-2, -7, 23)


def test_prime_to_p_subgroup():
    assert prime_to_p_subgroup(7, 3) == (1, 6)
    assert len(prime_to_p_subgroup(23, 11)) == 2


def test_level_11_elliptic_curve():
    space = build_space(11, DirichletChar.trivial(11))
    assert space.dimension == 2
    assert hecke(space, 2) == [[-2, 0], [0, -2]]
    lattice = qexp_basis(space, 10)
    assert lattice.rank == 1
    form = lattice.echelon_basis()[0]
    assert form.coefficients(1, 10) == [1, -2, -1, 2, 1, 2, -2, 0, -2]


def test_hecke_operators_commute_at_level_23():
    space = build_space(23, DirichletChar.trivial(23))
    assert space.dimension == 4
    t2, t3 = hecke(space, 2), hecke(space, 3)
    assert _matmul(t2, t3) == _matmul(t3, t2)
    assert qexp_basis(space, 8).rank == 2


def test_nontrivial_character_at_level_13():
    chi = DirichletChar(13, [2])
    assert chi.order == 6 and chi.is_even()
    space = build_space(13, chi)
    assert space.dimension == 2
    assert qexp_basis(space, 6).rank == 1


def test_odd_characters_have_no_weight_two_forms():
    space = build_space(23, quadratic_character(-23, 23))
    assert space.dimension == 0
    assert qexp_basis(space, 10).rank == 0


def test_precision_must_exceed_the_sturm_bound():
    space = build_space(11, DirichletChar.trivial(11))
    with pytest.raises(PrecisionError):
        qexp_basis(space, 2)
    with pytest.raises(ValueError):
        build_space(10, DirichletChar.trivial(4))


@pytest.mark.parametrize("N, genus", [(5, 0), (10, 0), (11, 1), (12, 0), (13, 2), (23, 12)])
def test_genus_of_x1(N, genus):
    assert genus_x1(N) == genus


def test_dimension_formula_agrees_with_modular_symbols():
    chi13 = DirichletChar(13, [2])
    assert cusp_form_dimension(11, DirichletChar.trivial(11)) == 1
    assert cusp_form_dimension(23, DirichletChar.trivial(23)) == 2
    assert cusp_form_dimension(13, chi13) == 1
    assert cusp_form_dimension(23, quadratic_character(-23, 23)) == 0
    for N, chi in [(11, DirichletChar.trivial(11)), (23, DirichletChar.trivial(23)), (13, chi13)]:
        assert build_space(N, chi).dimension == 2 * cusp_form_dimension(N, chi)


@pytest.mark.slow
@pytest.mark.parametrize("N", range(5, 61))
def test_dimension_formula_for_every_even_character(N):
    for cls in conjugacy_classes([c for c in all_characters(N) if c.is_even()]):
        chi = cls.representative
        assert build_space(N, chi).dimension == 2 * cusp_form_dimension(N, chi)


@pytest.mark.parametrize("N", range(1, 5))
def test_no_weight_two_forms_below_level_five(N):
    assert all(cusp_form_dimension(N, chi) == 0 for chi in all_characters(N))
