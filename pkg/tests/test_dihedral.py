"""
Tests for dihedral forms induced from ray class characters of quadratic fields
"""

import pytest

from src.auxforms import eta_product
from src.dihedral import count_dihedral, dihedral_qexp, enumerate_fields, local_coefficients, ray_class_characters
from src.dirichlet import DirichletChar, quadratic_character
from src.quadfield import QuadField


def test_fields_for_a_prime_level():
    fields = enumerate_fields(23)
    assert [(F.D, norm) for F, norm in fields] == [(-23, 1)]


def test_class_group_characters_of_q_sqrt_minus_23():
    characters = ray_class_characters(QuadField(-23), 1)
    assert len(characters) == 3
    assert sum(1 for psi in characters if not psi.is_conjugate_invariant()) == 2
    assert sorted(psi.order for psi in characters) == [1, 3, 3]


def test_one_dihedral_form_at_level_23():
    chi = quadratic_character(-23, 23)
    count, reps = count_dihedral(23, chi)
    assert count == 1
    rep = reps[0]
    assert rep.det == chi
    assert rep.source.order == 3
    assert rep.trace(2) == -1
    assert local_coefficients(rep, 5, 30) == [1, 0, 1]


def test_dihedral_expansion_matches_the_eta_product():
    _, reps = count_dihedral(23, quadratic_character(-23, 23))
    expansion = dihedral_qexp(reps[0], 20)
    assert expansion.coefficients(0, 10) == [0, 1, -1, -1, 0, 0, 1, 0, 1, 0]
    target = eta_product([(1, 1), (23, 1)], 20, order=expansion.ring.order)
    assert expansion == target


def test_even_characters_have_no_dihedral_forms():
    assert count_dihedral(23, DirichletChar.trivial(23)) == (0, [])


def test_level_31():
    count, _ = count_dihedral(31, quadratic_character(-31, 31))
    assert count == 1


@pytest.mark.slow
def test_two_conjugate_forms_at_level_47():
    count, reps = count_dihedral(47, quadratic_character(-47, 47))
    assert count == 2
    assert all(rep.source.order == 5 for rep in reps)
