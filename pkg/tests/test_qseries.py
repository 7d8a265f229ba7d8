"""
Tests for truncated q-series, lattices of q-expansions and their reductions
"""

import random

import pytest

from src.cyclotomic import CycNumber, factor_prime
from src.linalg import saturate_rows
from src.qseries import (CoefficientRing, PrecisionError, QLattice, QSeries, ResidueSpace, TorsionReport, div, intersect,
                         mul, saturate, sum_torsion, support_primes)


@pytest.fixture
def ring():
    return CoefficientRing.cyclotomic(1)


def series(ring, coeffs, prec=None):
    return QSeries(ring, coeffs, 0, prec)


class TestQSeries:
    def test_geometric_series_by_division(self, ring):
        h = div(QSeries.one(ring, 10), series(ring, [1, -1]))
        assert h.prec == 10
        assert all(h[e] == 1 for e in range(10))
        assert h * series(ring, [1, -1]) == QSeries.one(ring, 10)

    def test_division_by_q_gives_negative_valuation(self, ring):
        h = div(QSeries.one(ring, 5), QSeries(ring, [1], 1))
        assert h.valuation == -1
        assert h.prec == 4

    def test_exact_division_must_be_exact(self, ring):
        with pytest.raises(ValueError):
            div(series(ring, [1]), series(ring, [1, 1]))
        with pytest.raises(ZeroDivisionError):
            div(series(ring, [1]), QSeries.zero(ring))

    def test_product_precision(self, ring):
        a = QSeries(ring, [1], 1, 5)
        b = series(ring, [1, 2], 7)
        assert mul(a, b).prec == 5
        assert mul(a, b)[2] == 2

    def test_coefficients_beyond_precision_are_refused(self, ring):
        s = series(ring, [1, 1], 3)
        with pytest.raises(PrecisionError):
            s[3]

    def test_substitution_and_shift(self, ring):
        s = series(ring, [1, 1], 3).substitute(2)
        assert s.prec == 5
        assert s.coefficients(0, 5) == [1, 0, 1, 0, 0]
        assert s.shift(1).valuation == 1

    def test_printing(self, ring):
        s = series(ring, [0, 1, -1, -1, 0, 0, 1], 10)
        assert str(s) == "q - q^2 - q^3 + q^6 + O(q^10)"

    def test_cyclotomic_coefficients_and_conjugation(self):
        ring = CoefficientRing.cyclotomic(4)
        i = CycNumber.zeta(4)
        s = QSeries(ring, [0, 1, i], 0, 3)
        assert s.galois_conjugate(3)[2] == -i
        assert (s * s)[2] == 1

    def test_reduction_to_a_residue_field(self):
        ring = CoefficientRing.cyclotomic(4)
        ideal = factor_prime(5, 4)[0]
        s = QSeries(ring, [0, 1, CycNumber.zeta(4)], 0, 3)
        reduced = s.reduce(ideal)
        assert reduced.ring.is_residue
        assert reduced[2] * reduced[2] == -1


class TestLattices:
    def test_coordinates_on_the_echelon_basis(self, ring):
        lattice = QLattice.from_series([series(ring, [1, 0, 1], 3), series(ring, [0, 1, 1], 3)], 1)
        assert lattice.rank == 2
        assert lattice.pivots() == [0, 1]
        assert lattice.coordinates(series(ring, [2, 3, 5], 3)) == [2, 3]
        assert lattice.coordinates(series(ring, [1, 1, 0], 3)) is None

    def test_saturation_adds_divided_vectors(self, ring):
        lattice = QLattice.from_series([series(ring, [1, 0], 2), series(ring, [1, 2], 2)], 1, saturate=False)
        half = series(ring, [0, 1], 2)
        assert half not in lattice
        assert half in saturate(lattice)
        assert saturate(saturate(lattice)) == saturate(lattice)

    def test_intersection_of_planes(self, ring):
        first = QLattice.from_series([series(ring, [1, 0, 0], 3), series(ring, [0, 1, 0], 3)], 1)
        second = QLattice.from_series([series(ring, [0, 1, 0], 3), series(ring, [0, 0, 1], 3)], 1)
        meet, report = intersect(first, second)
        assert meet.rank == 1
        assert series(ring, [0, 1, 0], 3) in meet
        assert report.cokernel_torsion == 1
        assert report.is_torsion_free()

    def test_torsion_of_the_sum_detects_congruences(self, ring):
        first = QLattice.from_series([series(ring, [1, 0], 2)], 1)
        second = QLattice.from_series([series(ring, [1, 2], 2)], 1)
        meet, report = intersect(first, second)
        assert meet.rank == 0
        assert sum_torsion(first, second) == 2
        assert report.cokernel_torsion == 2
        # the two lines coincide modulo 2 but not modulo 3
        assert len(support_primes(first, second, 2)) == 1
        assert support_primes(first, second, 3) == []

    def test_intersection_is_symmetric(self, ring):
        first = QLattice.from_series([series(ring, [1, 1, 0], 3), series(ring, [0, 1, 3], 3)], 1)
        second = QLattice.from_series([series(ring, [1, 2, 3], 3), series(ring, [0, 0, 1], 3)], 1)
        assert intersect(first, second)[0] == intersect(second, first)[0]

    def test_sum_torsion_on_random_lattices(self, ring, torsion_oracle):
        rng = random.Random(5)
        for _ in range(30):
            lattices = []
            for _ in range(2):
                generators = [series(ring, [rng.randint(-6, 6) for _ in range(5)], 5)
                              for _ in range(rng.randint(1, 3))]
                lattices.append(QLattice.from_series(generators, 1))
            first, second = lattices
            rows = first.rows + second.rows
            assert sum_torsion(first, second) == torsion_oracle(rows, 5)
            meet, report = intersect(first, second)
            assert report.cokernel_torsion == torsion_oracle(rows, 5)
            assert report.order_norm == 1
            total_rank = len(saturate_rows(rows, 5)) if rows else 0
            assert meet.rank == first.rank + second.rank - total_rank

    def test_mismatched_windows_and_low_precision(self, ring):
        first = QLattice.from_series([series(ring, [1, 0], 2)], 1)
        second = QLattice.from_series([series(ring, [1, 0, 0], 3)], 1)
        with pytest.raises(ValueError):
            sum_torsion(first, second)
        with pytest.raises(PrecisionError):
            intersect(first, first, min_precision=10)

    def test_small_prime_support(self):
        assert TorsionReport(1, 15, 0).small_prime_support() == [3, 5]


class TestResidueSpaces:
    def test_sum_and_intersection(self):
        ideal = factor_prime(3, 1)[0]
        ring = CoefficientRing.residue(ideal)
        a = ResidueSpace(ring, 0, 3, [QSeries(ring, [1, 0, 0], 0, 3)])
        b = ResidueSpace(ring, 0, 3, [QSeries(ring, [1, 1, 0], 0, 3), QSeries(ring, [0, 0, 1], 0, 3)])
        assert (a + b).dimension == 3
        assert a.intersect(b).dimension == 0
        assert QSeries(ring, [2, 2, 0], 0, 3) in b
