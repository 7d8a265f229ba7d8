"""
Tests for cyclotomic field arithmetic and residue fields
"""

from fractions import Fraction

import pytest

from src.cyclotomic import (CycNumber, ResidueElement, cyclotomic_data, factor_prime, prime_to_part, reduce,
                            reduce_any)


def test_cyclotomic_data_of_small_orders():
    assert cyclotomic_data(4).phi == 2
    assert cyclotomic_data(4).modulus == (1, 0, 1)
    assert cyclotomic_data(3).modulus == (1, 1, 1)
    with pytest.raises(ValueError):
        cyclotomic_data(0)


def test_zeta_powers_and_root_of_unity():
    i = CycNumber.zeta(4)
    assert i * i == -1
    assert i ** 4 == 1
    assert CycNumber.root_of_unity(4, Fraction(1, 4)) == i
    assert CycNumber.root_of_unity(4, Fraction(1, 2)) == -1
    with pytest.raises(ValueError):
        CycNumber.root_of_unity(4, Fraction(1, 3))


def test_sum_of_primitive_cube_roots_is_minus_one():
    w = CycNumber.zeta(3)
    assert w + w ** 2 == -1
    assert w.trace() == -1
    assert w.norm() == 1


def test_inverse_and_division():
    x = CycNumber(5, [1, 2, 0, 3])
    assert x * x.inverse() == 1
    assert (x / x) == 1
    with pytest.raises(ZeroDivisionError):
        CycNumber.zero(5).inverse()


def test_norm_of_one_minus_zeta_p():
    assert (1 - CycNumber.zeta(7)).norm() == 7


def test_galois_conjugate_and_lift():
    i = CycNumber.zeta(4)
    assert i.galois_conjugate(3) == -i
    assert i.lift(8) == CycNumber.zeta(8, 2)
    assert CycNumber.zeta(3).lift(6) == CycNumber.zeta(6, 2)
    with pytest.raises(ValueError):
        i.lift(6)


def test_denominator_and_integrality():
    x = CycNumber(4, [Fraction(1, 2), Fraction(1, 3)])
    assert x.denominator() == 6
    assert not x.is_integral()
    assert (x * 6).is_integral()


def test_json_round_trip_of_a_single_element():
    x = CycNumber(12, [1, Fraction(-1, 2), 0, 4])
    assert CycNumber.from_json(x.to_json()) == x


def test_factor_prime_splitting_types():
    # 5 = 1 mod 4 splits in Q(i), 3 stays inert
    assert len(factor_prime(5, 4)) == 2
    assert [ideal.residue_degree for ideal in factor_prime(3, 4)] == [2]
    # 199 = -1 mod 40: residue degree 2 in Q(zeta_40)
    ideals = factor_prime(199, 40)
    assert all(ideal.residue_degree == 2 for ideal in ideals)
    assert len(ideals) * 2 == 16
    with pytest.raises(ValueError):
        factor_prime(5, 10)


def test_reduction_is_a_ring_homomorphism():
    ideal = factor_prime(5, 4)[0]
    x, y = CycNumber(4, [2, 3]), CycNumber(4, [1, -1])
    assert reduce(x * y, ideal) == reduce(x, ideal) * reduce(y, ideal)
    assert reduce(x + y, ideal) == reduce(x, ideal) + reduce(y, ideal)
    t = reduce(CycNumber.zeta(4), ideal)
    assert t * t == -1


def test_residue_field_arithmetic():
    ideal = factor_prime(3, 4)[0]
    t = ResidueElement(ideal, [0, 1])
    assert t ** 2 == -1
    assert t.multiplicative_order() == 4
    assert t * t.inverse() == 1
    assert ideal.field_size == 9


def test_reduce_any_sends_p_power_roots_to_one():
    ideal = factor_prime(7, 2)[0]
    # zeta_14 = -zeta_7 and zeta_7 = 1 mod every prime above 7
    assert reduce_any(CycNumber.zeta(14), ideal) == -1
    assert prime_to_part(56, 2) == 7
