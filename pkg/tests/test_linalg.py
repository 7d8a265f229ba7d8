"""
Tests for exact linear algebra, integer lattices and finite abelian groups
"""

from fractions import Fraction
import random

import pytest

from src.cyclotomic import CycNumber
from src.linalg import (IntegerLattice, character_group, determinant, evaluate_character, group_order, hermite_rows,
                        in_span, invariant_factors, inverse, lattice_index, left_kernel, nullspace, reduce_vector,
                        rref, saturate_rows, sparse_echelon, span_intersection, triangular_presentation)


def test_rref_reduces_and_reports_pivots():
    rows = [[2, 4, 6], [1, 2, 4]]
    echelon, pivots = rref(rows)
    assert pivots == [0, 2]
    assert echelon == [[1, 2, 0], [0, 0, 1]]


def test_reduce_vector_gives_coordinates_and_remainder():
    echelon, pivots = rref([[1, 0, 1], [0, 1, 1]])
    coefficients, remainder = reduce_vector(echelon, pivots, [2, 3, 5])
    assert coefficients == [2, 3]
    assert not any(remainder)
    assert not in_span(echelon, pivots, [1, 1, 0])


def test_nullspace_and_left_kernel():
    rows = [[Fraction(1), Fraction(2), Fraction(3)]]
    kernel = nullspace(rows, 3)
    assert len(kernel) == 2
    for v in kernel:
        assert sum(a * b for a, b in zip(rows[0], v)) == 0
    left = left_kernel([[Fraction(1), Fraction(2)], [Fraction(2), Fraction(4)]], 2)
    assert len(left) == 1
    x = left[0]
    assert x[0] * 1 + x[1] * 2 == 0


def test_span_intersection_of_planes():
    rows1 = [[Fraction(1), Fraction(0), Fraction(0)], [Fraction(0), Fraction(1), Fraction(0)]]
    rows2 = [[Fraction(0), Fraction(1), Fraction(0)], [Fraction(0), Fraction(0), Fraction(1)]]
    echelon, pivots = span_intersection(rows1, rows2, 3)
    assert echelon == [[0, 1, 0]]
    assert pivots == [1]


def test_determinant_and_inverse():
    m = [[2, 1], [7, 4]]
    assert determinant(m) == 1
    assert inverse(m) == [[4, -1], [-7, 2]]
    with pytest.raises(ZeroDivisionError):
        inverse([[1, 2], [2, 4]])


def test_integer_lattice_membership_and_hermite_form():
    lattice = IntegerLattice(2, [[2, 0], [1, 3]])
    assert lattice.rank == 2
    assert [1, 3] in lattice
    assert [3, 3] in lattice
    assert [1, 0] not in lattice
    hermite = lattice.hermite_basis()
    assert hermite[0][0] > 0 and hermite[1][0] == 0
    assert abs(determinant(hermite)) == 6


def test_saturation_and_index():
    assert saturate_rows([[2, 4]], 2) == [[1, 2]]
    assert lattice_index([[2, 0], [0, 3]], [[1, 0], [0, 1]]) == 6
    assert IntegerLattice(2, [[2, 4]]).index_in_saturation() == 2


def test_saturation_is_idempotent_on_random_lattices():
    rng = random.Random(2024)
    for _ in range(20):
        rank = rng.randint(1, 3)
        rows = [[rng.randint(-6, 6) for _ in range(4)] for _ in range(rank)]
        if not any(any(r) for r in rows):
            continue
        saturated = saturate_rows(rows, 4)
        assert saturate_rows(saturated, 4) == saturated
        lattice = IntegerLattice(4, saturated)
        for row in rows:
            assert row in lattice


def test_character_group_kills_relations():
    relations = [[2, 0], [0, 3]]
    characters = character_group(relations, 2)
    assert len(characters) == 6
    assert len(set(characters)) == 6
    for w in characters:
        for r in relations:
            assert evaluate_character(w, r) == 0


def test_triangular_presentation_of_cyclic_group():
    generators, relations, dlog = triangular_presentation(range(1, 6), lambda a, b: (a + b) % 6, 0)
    assert group_order(relations, len(generators)) == 6
    assert len(dlog) == 6
    assert len(character_group(relations, len(generators))) == 6


def test_sparse_echelon_is_fully_reduced():
    pivots = sparse_echelon([{0: 1, 1: 1}, {1: 2, 2: 2}])
    assert sorted(pivots) == [0, 1]
    assert pivots[1][1] == 1
    assert 1 not in pivots[0]


def test_rref_over_a_cyclotomic_field():
    i = CycNumber.zeta(4)
    one = CycNumber.one(4)
    echelon, pivots = rref([[i, one], [one, -i]])
    assert pivots == [0]
    assert echelon[0][0] == 1
    assert echelon[0][1] == -i


def test_hermite_rows_shape():
    hermite = hermite_rows([[2, 0], [1, 3]], 2)
    assert hermite == [[1, 3], [0, 6]]
    assert hermite_rows([[0, 4, 6], [0, 2, 3]], 3) == [[0, 2, 3]]
    assert hermite_rows([[0, 0, 0]], 3) == []
    hermite = hermite_rows([[3, 5, 7], [0, 4, 2], [6, 1, 0]], 3)
    for i, row in enumerate(hermite):
        j = next(k for k, x in enumerate(row) if x)
        assert row[j] > 0
        assert all(0 <= hermite[k][j] < row[j] for k in range(i))


def test_membership_survives_incremental_insertion():
    lattice = IntegerLattice(3)
    lattice.add_vector([2, 0, 0])
    assert [1, 0, 0] not in lattice
    lattice.add_vector([3, 0, 0])
    assert [1, 0, 0] in lattice
    assert lattice.rank == 1
    with pytest.raises(ValueError):
        lattice.add_vector([1, 2])


def test_invariant_factors():
    assert invariant_factors([[2, 0], [0, 3]], 2) == [1, 6]
    assert invariant_factors([[4, 6], [6, 4]], 2) == [2, 10]
    with pytest.raises(ValueError):
        invariant_factors([[1, 2], [2, 4]], 2)


def test_lattice_torsion_matches_the_gcd_of_maximal_minors(torsion_oracle):
    rng = random.Random(17)
    for _ in range(40):
        rank = rng.randint(1, 3)
        rows = [[rng.randint(-9, 9) for _ in range(5)] for _ in range(rank)]
        lattice = IntegerLattice(5, rows)
        assert lattice.index_in_saturation() == torsion_oracle(rows, 5)
        saturated = saturate_rows(rows, 5)
        assert torsion_oracle(saturated, 5) == 1
        if saturated:
            assert lattice_index(lattice.hermite_basis(), saturated) == torsion_oracle(rows, 5)
