"""
Exact Linear Algebra Module
Echelon forms over exact fields, integer lattices in Hermite form, saturation and finite abelian groups
"""

from fractions import Fraction
from itertools import product
from math import gcd, prod
import logging
import sys
import os

from sympy import QQ, ZZ
from sympy.polys.matrices import DomainMatrix
from sympy.polys.matrices.exceptions import DMNonInvertibleMatrixError
from sympy.polys.matrices.normalforms import hermite_normal_form, smith_normal_form

# Add config to path
sys.path.append(os.path.join(os.path.dirname(__file__), '..'))
from config.settings import *

# Setup logging
logging.basicConfig(level=getattr(logging, LOG_LEVEL), format=LOG_FORMAT)
logger = logging.getLogger(__name__)


# ---------------------------------------------------------------------------
# Conversions to sympy domain matrices
# ---------------------------------------------------------------------------

def _is_rational(x) -> bool:
    return isinstance(x, (int, Fraction))


def _qq_matrix(rows, ncols: int) -> DomainMatrix:
    entries = [[QQ(Fraction(x).numerator, Fraction(x).denominator) for x in row] for row in rows]
    return DomainMatrix(entries, (len(entries), ncols), QQ)


def _zz_matrix(rows, ncols: int) -> DomainMatrix:
    return DomainMatrix([[ZZ(int(x)) for x in row] for row in rows], (len(rows), ncols), ZZ)


def _from_qq(x) -> Fraction:
    return Fraction(int(QQ.numer(x)), int(QQ.denom(x)))


# ---------------------------------------------------------------------------
# Exact fields (Fraction, CycNumber, ResidueElement)
# ---------------------------------------------------------------------------

def _rref_over_field(rows, ncols: int):
    pivots = []
    r = 0
    for c in range(ncols):
        if r == len(rows):
            break
        pivot_row = next((i for i in range(r, len(rows)) if rows[i][c]), None)
        if pivot_row is None:
            continue
        rows[r], rows[pivot_row] = rows[pivot_row], rows[r]
        lead_entry = rows[r][c]
        inv = Fraction(1) / lead_entry if _is_rational(lead_entry) else lead_entry.inverse()
        rows[r] = [x * inv for x in rows[r]]
        lead = rows[r]
        for i in range(len(rows)):
            if i != r:
                factor = rows[i][c]
                if factor:
                    rows[i] = [a - factor * b if b else a for a, b in zip(rows[i], lead)]
        pivots.append(c)
        r += 1
    return rows[:r], pivots


def rref(rows, ncols: int = None):
    """Reduced row echelon form; returns (nonzero rows, pivot columns)

    Rational rows go through sympy's DomainMatrix over QQ; cyclotomic and
    residue-field entries are eliminated in place.
    """
    rows = [list(r) for r in rows]
    if not rows:
        return [], []
    ncols = len(rows[0]) if ncols is None else ncols
    if ncols == 0:
        return [], []
    if all(len(row) == ncols and all(_is_rational(x) for x in row) for row in rows):
        echelon, pivots = _qq_matrix(rows, ncols).rref()
        kept = echelon.to_list()[:len(pivots)]
        return [[_from_qq(x) for x in row] for row in kept], list(pivots)
    return _rref_over_field(rows, ncols)


def reduce_vector(echelon, pivots, vector):
    """Reduce vector against an rref basis; returns (coefficients, remainder)"""
    remainder = list(vector)
    coefficients = []
    for row, c in zip(echelon, pivots):
        factor = remainder[c]
        coefficients.append(factor)
        if factor:
            remainder = [a - factor * b if b else a for a, b in zip(remainder, row)]
    return coefficients, remainder


def in_span(echelon, pivots, vector) -> bool:
    _, remainder = reduce_vector(echelon, pivots, vector)
    return not any(remainder)


def nullspace(rows, ncols: int):
    """Basis of the right kernel {v : rows * v = 0}"""
    echelon, pivots = rref(rows, ncols)
    sample = next((x for row in rows for x in row), Fraction(0))
    zero = sample * 0
    one = zero + 1
    pivot_set = set(pivots)
    free = [c for c in range(ncols) if c not in pivot_set]
    basis = []
    for f in free:
        v = [zero] * ncols
        v[f] = one
        for row, c in zip(echelon, pivots):
            v[c] = -row[f]
        basis.append(v)
    return basis


def left_kernel(rows, ncols: int):
    """Basis of {x : x * rows = 0}"""
    if not rows:
        return []
    transpose = [[rows[i][j] for i in range(len(rows))] for j in range(ncols)]
    return nullspace(transpose, len(rows))


def span_intersection(rows1, rows2, ncols: int):
    """Basis (rref) of the intersection of two row spans"""
    if not rows1 or not rows2:
        return [], []
    stacked = [list(r) for r in rows1] + [[-x for x in r] for r in rows2]
    kernel = left_kernel(stacked, ncols)
    vectors = []
    for x in kernel:
        coeffs = x[:len(rows1)]
        vectors.append([sum((c * row[j] for c, row in zip(coeffs, rows1) if c), rows1[0][j] * 0)
                        for j in range(ncols)])
    return rref(vectors, ncols) if vectors else ([], [])


def determinant(rows) -> Fraction:
    """Determinant of a square rational matrix"""
    return _from_qq(_qq_matrix(rows, len(rows)).det())


def inverse(rows):
    """Inverse of a square rational matrix"""
    try:
        inv = _qq_matrix(rows, len(rows)).inv()
    except DMNonInvertibleMatrixError:
        raise ZeroDivisionError("Singular matrix")
    return [[_from_qq(x) for x in row] for row in inv.to_list()]


# ---------------------------------------------------------------------------
# Integer lattices
# ---------------------------------------------------------------------------

def hermite_rows(rows, ncols: int) -> list:
    """Row Hermite basis of the Z-span: echelon rows, positive pivots, entries above a pivot in [0, pivot)"""
    rows = [[int(x) for x in row] for row in rows if any(row)]
    if not rows:
        return []
    # sympy puts column pivots at the bottom right, so hand it the transpose with the coordinates reversed
    flipped = [[row[ncols - 1 - j] for row in rows] for j in range(ncols)]
    hermite = hermite_normal_form(_zz_matrix(flipped, len(rows))).to_list()
    width = len(hermite[0]) if hermite else 0
    return [[int(hermite[ncols - 1 - j][c]) for j in range(ncols)] for c in reversed(range(width))]


class IntegerLattice:
    """A sublattice of Z^N; generators are collected and put in Hermite form on demand"""

    __slots__ = ["N", "_generators", "_hermite"]

    def __init__(self, ambient_dimension: int, vectors=()):
        self.N = ambient_dimension
        self._generators = []
        self._hermite = []
        for v in vectors:
            self.add_vector(v)

    def add_vector(self, vector):
        if len(vector) != self.N:
            raise ValueError(f"Vector of length {len(vector)} added to a lattice in Z^{self.N}")
        vector = [int(x) for x in vector]
        if any(vector):
            self._generators.append(vector)
            self._hermite = None

    def _basis(self) -> list:
        if self._hermite is None:
            self._hermite = hermite_rows(self._generators, self.N)
            self._generators = [row.copy() for row in self._hermite]
        return self._hermite

    @property
    def rank(self) -> int:
        return len(self._basis())

    def __contains__(self, vector) -> bool:
        vector = [int(x) for x in vector]
        if len(vector) != self.N:
            return False
        for row in self._basis():
            j = next(k for k, x in enumerate(row) if x)
            if any(vector[:j]):
                return False
            q, r = divmod(vector[j], row[j])
            if r:
                return False
            if q:
                vector = [a - q * b for a, b in zip(vector, row)]
        return not any(vector)

    def hermite_basis(self) -> list:
        """Rows in Hermite normal form: positive pivots, entries above pivots reduced"""
        return [row.copy() for row in self._basis()]

    def index_in_saturation(self) -> int:
        """[saturation : lattice], the torsion order of Z^N / lattice"""
        basis = self._basis()
        if not basis:
            return 1
        return lattice_index(basis, saturate_rows(basis, self.N))


def _clear_denominators(rows):
    d = 1
    for row in rows:
        for x in row:
            d = d * x.denominator // gcd(d, x.denominator)
    return d


def saturate_rows(rows, ncols: int) -> list:
    """Hermite basis of the integer points in the rational span of the rows"""
    echelon, pivots = rref([[Fraction(x) for x in row] for row in rows], ncols)
    r = len(pivots)
    if r == 0:
        return []
    d = _clear_denominators(echelon)
    integral = [[int(x * d) for x in row] for row in echelon]

    # Columns of d*R span a full-rank lattice C in Z^r; the saturation is d*C^dual*R
    columns = hermite_rows([[integral[i][j] for i in range(r)] for j in range(ncols)], r)
    dual = [list(col) for col in zip(*inverse(columns))]
    coordinates = [[int(x * d) for x in row] for row in dual]
    vectors = [[sum(y[i] * integral[i][j] for i in range(r)) // d for j in range(ncols)] for y in coordinates]
    return hermite_rows(vectors, ncols)


def lattice_index(sub_rows, sup_rows) -> int:
    """[sup : sub] for lattices of equal rank with sub contained in sup"""
    if not sub_rows:
        return 1
    ncols = len(sup_rows[0])
    _, pivots = rref(sup_rows, ncols)
    if len(sub_rows) != len(sup_rows) or len(pivots) != len(sup_rows):
        raise ValueError("Lattices of different rank have no finite index")
    sub_det = determinant([[row[j] for j in pivots] for row in sub_rows])
    sup_det = determinant([[row[j] for j in pivots] for row in sup_rows])
    index = abs(sub_det / sup_det)
    if index.denominator != 1:
        raise ArithmeticError("Sublattice is not contained in the superlattice")
    return int(index)


# ---------------------------------------------------------------------------
# Sparse rows (relation matrices with two or three nonzero entries per row)
# ---------------------------------------------------------------------------

class SparseRow(dict):
    """column -> nonzero entry"""

    def __init__(self, data=()):
        if isinstance(data, dict):
            data = data.items()
        super().__init__((k, x) for k, x in data if x)

    def __getitem__(self, key):
        return self.get(key, 0)

    def scaled(self, factor) -> "SparseRow":
        return SparseRow((k, x * factor) for k, x in self.items())

    def add_multiple(self, other: "SparseRow", factor):
        """self += factor * other, dropping cancelled entries"""
        for k, x in other.items():
            value = self.get(k)
            value = x * factor if value is None else value + x * factor
            if value:
                self[k] = value
            else:
                self.pop(k, None)
        return self


def sparse_echelon(rows) -> dict:
    """Fully reduced echelon form of sparse rows: pivot column -> row with entry 1 there"""
    pivots = {}
    for data in rows:
        row = SparseRow(data)
        while row:
            c = min(row)
            if c in pivots:
                row.add_multiple(pivots[c], -row[c])
                continue
            lead = row[c]
            inv = Fraction(1) / lead if isinstance(lead, (int, Fraction)) else lead.inverse()
            pivots[c] = row.scaled(inv)
            break
    # Back substitution, largest pivot first so reduced rows never reintroduce pivots
    for c in sorted(pivots, reverse=True):
        row = pivots[c]
        for k in [k for k in row if k != c and k in pivots]:
            if k in row:
                row.add_multiple(pivots[k], -row[k])
    logger.debug(f"Sparse elimination kept {len(pivots)} pivots")
    return pivots


# ---------------------------------------------------------------------------
# Finite abelian groups
# ---------------------------------------------------------------------------

def triangular_presentation(candidates, multiply, identity):
    """Presentation of the group generated by hashable candidates

    Returns (generators, relations, dlog) where relations are exponent vectors
    over the kept generators and dlog maps every element to its exponents.
    """
    dlog = {identity: ()}
    generators = []
    relations = []
    for g in candidates:
        if g in dlog:
            continue
        power = g
        k = 1
        while power not in dlog:
            power = multiply(power, g)
            k += 1
        previous = dlog[power]
        relations = [rel + [0] for rel in relations]
        relations.append([-e for e in previous] + [k])
        new_dlog = {}
        for element, exps in dlog.items():
            current = element
            for j in range(k):
                new_dlog[current] = exps + (j,)
                current = multiply(current, g)
        dlog = new_dlog
        generators.append(g)
    return generators, relations, dlog

def invariant_factors(relations, n: int) -> list:
    """Smith invariants of Z^n / <relations>; raises ValueError when the quotient is infinite"""
    rows = [list(r) for r in relations if any(r)]
    if len(rows) < n:
        raise ValueError("Relation lattice does not have full rank; the group is infinite")
    smith = smith_normal_form(_zz_matrix(rows, n)).to_list()
    diagonal = [abs(int(smith[i][i])) for i in range(n)]
    if not all(diagonal):
        raise ValueError("Relation lattice does not have full rank; the group is infinite")
    return diagonal


def character_group(relations, n: int) -> list:
    """All characters of Z^n / <relations>, as vectors w in (Q/Z)^n with value exp(2 pi i w.v)"""
    if n == 0:
        return [()]
    hermite = hermite_rows(relations, n)
    if len(hermite) != n:
        raise ValueError("Relation lattice does not have full rank; the group is infinite")
    inv = inverse(hermite)
    diagonal = [hermite[i][i] for i in range(n)]
    characters = []
    for k in product(*(range(d) for d in diagonal)):
        w = [sum((inv[i][j] * k[j] for j in range(n)), Fraction(0)) for i in range(n)]
        characters.append(tuple(x - (x.numerator // x.denominator) for x in w))
    return characters


def evaluate_character(w, exponents) -> Fraction:
    """w.v in Q/Z"""
    total = sum((Fraction(a) * b for a, b in zip(w, exponents)), Fraction(0))
    return total - (total.numerator // total.denominator)


def group_order(relations, n: int) -> int:
    if n == 0:
        return 1
    return prod(invariant_factors(relations, n))
