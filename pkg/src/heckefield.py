"""
Hecke Field Module
Hecke operators on weight-1 q-expansions, characteristic polynomials and eigenvalue fields over Q(zeta_n)
"""

from dataclasses import dataclass, field
from fractions import Fraction
import logging
import sys
import os

import sympy
from sympy import QQ, Poly, Symbol, primerange

# Add config to path
sys.path.append(os.path.join(os.path.dirname(__file__), '..'))
from config.settings import *
from src.cyclotomic import CycNumber, cyclotomic_data
from src.dirichlet import DirichletChar
from src.linalg import left_kernel
from src.qseries import CoefficientRing, PrecisionError, QSeries

# Setup logging
logging.basicConfig(level=getattr(logging, LOG_LEVEL), format=LOG_FORMAT)
logger = logging.getLogger(__name__)

_X = Symbol("x")


# ---------------------------------------------------------------------------
# Polynomials over K = Q(zeta_n), coefficient lists from the constant term up
# ---------------------------------------------------------------------------

def _trim(poly: list) -> list:
    poly = list(poly)
    while poly and not poly[-1]:
        poly.pop()
    return poly


def _poly_mul(a: list, b: list, zero) -> list:
    if not a or not b:
        return []
    result = [zero] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                if y:
                    result[i + j] = result[i + j] + x * y
    return _trim(result)


def _poly_sub(a: list, b: list, zero) -> list:
    size = max(len(a), len(b))
    a = list(a) + [zero] * (size - len(a))
    b = list(b) + [zero] * (size - len(b))
    return _trim([x - y for x, y in zip(a, b)])


def _poly_divmod(a: list, b: list, zero) -> tuple:
    a, b = _trim(a), _trim(b)
    if not b:
        raise ZeroDivisionError("Polynomial division by zero")
    quotient = [zero] * max(len(a) - len(b) + 1, 0)
    remainder = list(a)
    inv = b[-1].inverse()
    while len(remainder) >= len(b) and remainder:
        shift = len(remainder) - len(b)
        factor = remainder[-1] * inv
        quotient[shift] = factor
        for i, y in enumerate(b):
            remainder[shift + i] = remainder[shift + i] - factor * y
        remainder = _trim(remainder[:-1])
    return _trim(quotient), remainder


def _poly_xgcd(a: list, b: list, zero, one) -> tuple:
    """(s, g) with s a = g mod b, g a gcd"""
    r0, r1 = _trim(a), _trim(b)
    s0, s1 = [one], []
    while r1:
        q, r = _poly_divmod(r0, r1, zero)
        r0, r1 = r1, r
        s0, s1 = s1, _poly_sub(s0, _poly_mul(q, s1, zero), zero)
    return s0, r0


def poly_to_string(poly: list, variable: str = "x") -> str:
    terms = []
    for k in range(len(poly) - 1, -1, -1):
        c = poly[k]
        if not c:
            continue
        text = str(c)
        if " " in text:
            text = f"({text})"
        power = "" if k == 0 else (variable if k == 1 else f"{variable}^{k}")
        if not power:
            terms.append(text)
        elif text == "1":
            terms.append(power)
        elif text == "-1":
            terms.append(f"-{power}")
        else:
            terms.append(f"{text}*{power}")
    return " + ".join(terms).replace("+ -", "- ") if terms else "0"


# ---------------------------------------------------------------------------
# Relative extensions L = K[x]/(g)
# ---------------------------------------------------------------------------

class ExtensionField:
    """K[x]/(g) for a monic irreducible g over K = Q(zeta_n)"""

    def __init__(self, order: int, modulus: list):
        modulus = _trim(modulus)
        if not modulus or modulus[-1] != CycNumber.one(order):
            raise ValueError("Extension modulus must be monic")
        self.order = order
        self.modulus = modulus

    @property
    def degree(self) -> int:
        return len(self.modulus) - 1

    @property
    def base_zero(self) -> CycNumber:
        return CycNumber.zero(self.order)

    def element(self, coeffs) -> "RelativeElement":
        return RelativeElement(self, coeffs)

    def zero(self) -> "RelativeElement":
        return RelativeElement(self, [])

    def one(self) -> "RelativeElement":
        return RelativeElement(self, [CycNumber.one(self.order)])

    def generator(self) -> "RelativeElement":
        if self.degree == 1:
            return RelativeElement(self, [-self.modulus[0]])
        return RelativeElement(self, [self.base_zero, CycNumber.one(self.order)])

    def describe(self) -> str:
        if self.degree == 1:
            return f"Q(zeta_{self.order})"
        return f"Q(zeta_{self.order})[a]/({poly_to_string(self.modulus, 'a')})"

    def __eq__(self, other):
        return isinstance(other, ExtensionField) and (self.order, self.modulus) == (other.order, other.modulus)

    def __hash__(self):
        return hash((self.order, tuple(self.modulus)))


class RelativeElement:
    __slots__ = ("parent", "coeffs")

    def __init__(self, parent: ExtensionField, coeffs):
        zero = parent.base_zero
        coeffs = [c if isinstance(c, CycNumber) else CycNumber.from_rational(parent.order, c) for c in coeffs]
        if len(coeffs) > parent.degree:
            _, coeffs = _poly_divmod(coeffs, parent.modulus, zero)
        self.parent = parent
        self.coeffs = _trim(coeffs)

    def _coerce(self, other) -> "RelativeElement":
        if isinstance(other, RelativeElement):
            return other
        return RelativeElement(self.parent, [other])

    def __add__(self, other):
        other = self._coerce(other)
        size = max(len(self.coeffs), len(other.coeffs))
        zero = self.parent.base_zero
        a = self.coeffs + [zero] * (size - len(self.coeffs))
        b = other.coeffs + [zero] * (size - len(other.coeffs))
        return RelativeElement(self.parent, [x + y for x, y in zip(a, b)])

    __radd__ = __add__

    def __neg__(self):
        return RelativeElement(self.parent, [-c for c in self.coeffs])

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._coerce(other)
        return RelativeElement(self.parent, _poly_mul(self.coeffs, other.coeffs, self.parent.base_zero))

    __rmul__ = __mul__

    def inverse(self) -> "RelativeElement":
        if not self.coeffs:
            raise ZeroDivisionError("Inverse of zero in a relative extension")
        zero, one = self.parent.base_zero, CycNumber.one(self.parent.order)
        s, g = _poly_xgcd(self.coeffs, self.parent.modulus, zero, one)
        if len(g) != 1:
            raise ArithmeticError(f"Modulus {poly_to_string(self.parent.modulus)} is reducible")
        return RelativeElement(self.parent, [c / g[0] for c in s])

    def __truediv__(self, other):
        return self * self._coerce(other).inverse()

    def __pow__(self, k: int):
        if k < 0:
            return self.inverse() ** (-k)
        result = self.parent.one()
        for _ in range(k):
            result = result * self
        return result

    def __eq__(self, other):
        if isinstance(other, (int, Fraction, CycNumber)):
            other = self._coerce(other)
        if not isinstance(other, RelativeElement):
            return NotImplemented
        return self.parent == other.parent and self.coeffs == other.coeffs

    def __hash__(self):
        return hash((self.parent, tuple(self.coeffs)))

    def __bool__(self):
        return bool(self.coeffs)

    def in_base(self) -> bool:
        return len(self.coeffs) <= 1

    def base_value(self) -> CycNumber:
        if not self.in_base():
            raise ValueError(f"{self} is not in the base field")
        return self.coeffs[0] if self.coeffs else self.parent.base_zero

    def trace(self) -> CycNumber:
        return sum((row[i] for i, row in enumerate(multiplication_matrix(self))), self.parent.base_zero)

    def __repr__(self):
        return f"RelativeElement({self})"

    def __str__(self):
        return poly_to_string(self.coeffs, "a")


def multiplication_matrix(x: RelativeElement) -> list:
    """Rows: x * a^i in the power basis of the extension"""
    parent = x.parent
    rows = []
    power = parent.one()
    generator = parent.generator() if parent.degree > 1 else None
    for _ in range(parent.degree):
        image = x * power
        rows.append(image.coeffs + [parent.base_zero] * (parent.degree - len(image.coeffs)))
        if generator is not None:
            power = power * generator
    return rows


# ---------------------------------------------------------------------------
# Characteristic polynomials and factorization over K
# ---------------------------------------------------------------------------

def charpoly(matrix: list, order: int) -> list:
    """Characteristic polynomial det(x - A) by Faddeev-LeVerrier, constant term first"""
    d = len(matrix)
    zero, one = CycNumber.zero(order), CycNumber.one(order)
    coeffs = [zero] * d + [one]
    identity = [[one if i == j else zero for j in range(d)] for i in range(d)]
    current = [[zero] * d for _ in range(d)]
    for k in range(1, d + 1):
        current = _mat_add(_mat_mul(matrix, current, zero), identity, coeffs[d - k + 1])
        product_matrix = _mat_mul(matrix, current, zero)
        trace = sum((product_matrix[i][i] for i in range(d)), zero)
        coeffs[d - k] = -trace / k
    return coeffs


def _mat_mul(a, b, zero):
    size = len(b[0]) if b else 0
    return [[sum((row[k] * b[k][j] for k in range(len(b)) if row[k] and b[k][j]), zero)
             for j in range(size)] for row in a]


def _mat_add(a, identity, scalar):
    return [[x + e * scalar for x, e in zip(row, erow)] for row, erow in zip(a, identity)]


def _sympy_domain(order: int):
    if cyclotomic_data(order).phi == 1:
        return QQ
    return QQ.algebraic_field(sympy.exp(2 * sympy.pi * sympy.I / order))


def factor_over_cyclotomic(poly: list, order: int) -> list:
    """Monic irreducible factors over Q(zeta_n) with multiplicities"""
    domain = _sympy_domain(order)
    phi = cyclotomic_data(order).phi

    def to_domain(c: CycNumber):
        if domain == QQ:
            return QQ(c.coeffs[0].numerator, c.coeffs[0].denominator)
        return domain([QQ(x.numerator, x.denominator) for x in reversed(c.coeffs)])

    # factor.rep holds domain elements; all_coeffs() would give sympy expressions
    def from_domain(c) -> CycNumber:
        if domain == QQ:
            return CycNumber.from_rational(order, Fraction(int(c.numerator), int(c.denominator)))
        values = [Fraction(int(x.numerator), int(x.denominator)) for x in reversed(c.to_list())]
        return CycNumber(order, values + [Fraction(0)] * (phi - len(values)))

    sympy_poly = Poly([to_domain(c) for c in reversed(poly)], _X, domain=domain)
    _, factors = sympy_poly.factor_list()
    result = []
    for factor, multiplicity in factors:
        coeffs = [from_domain(c) for c in reversed(factor.rep.to_list())]
        lead = coeffs[-1]
        result.append(([c / lead for c in coeffs], multiplicity))
    result.sort(key=lambda item: (len(item[0]), poly_to_string(item[0])))
    return result


# ---------------------------------------------------------------------------
# Hecke action on weight-1 expansions
# ---------------------------------------------------------------------------

def hecke_on_series(h: QSeries, ell: int, chi: DirichletChar, level: int) -> QSeries:
    """T_ell h in weight 1: coefficient of q^m is a_{ell m} + chi(ell) a_{m / ell}"""
    if h.prec is None:
        raise PrecisionError("Hecke images need a truncated series")
    prec = (h.prec - 1) // ell + 1
    order = h.ring.order
    chi_ell = h.ring.coerce(chi.value(ell, order)) if level % ell else None
    coeffs = []
    for m in range(prec):
        value = h[ell * m]
        if chi_ell is not None and m % ell == 0:
            value = value + chi_ell * h[m // ell]
        coeffs.append(value)
    return QSeries(h.ring, coeffs, 0, prec)


def hecke_matrix_on_basis(basis: list, pivots: list, ell: int, chi: DirichletChar, level: int) -> list:
    """Matrix of T_ell on a Hecke-stable space given by a reduced echelon basis (row convention)"""
    matrix = []
    for h in basis:
        image = hecke_on_series(h, ell, chi, level)
        if pivots and max(pivots) >= image.prec:
            raise PrecisionError(f"T_{ell} images known to O(q^{image.prec}) cannot see pivot q^{max(pivots)}")
        matrix.append([image[e] for e in pivots])
        # The echelon coordinates are the pivot coefficients; check the rest
        rebuilt = QSeries.zero(h.ring, image.prec)
        for c, g in zip(matrix[-1], basis):
            rebuilt = rebuilt + g.truncate(image.prec).scale(c)
        if not rebuilt.agrees_with(image, image.prec):
            raise ArithmeticError(f"Space is not stable under T_{ell}")
    return matrix


@dataclass
class Eigenform:
    """A Hecke eigen-system: its field, q-expansion and multiplicity in the space"""
    base_order: int
    eigenvalue_field: ExtensionField
    coefficients: list                     # RelativeElement a_0 .. a_{prec-1}
    multiplicity: int
    hecke_polynomials: dict = field(default_factory=dict)

    @property
    def degree(self) -> int:
        return self.eigenvalue_field.degree

    @property
    def is_new(self) -> bool:
        return self.multiplicity == 1

    @property
    def dimension(self) -> int:
        return self.degree * self.multiplicity

    @property
    def precision(self) -> int:
        return len(self.coefficients)

    def series(self) -> QSeries:
        """The expansion itself over K when the field is K, otherwise its trace to K"""
        ring = CoefficientRing.cyclotomic(self.base_order)
        if self.degree == 1:
            return QSeries(ring, [c.base_value() for c in self.coefficients], 0, self.precision)
        return QSeries(ring, [c.trace() for c in self.coefficients], 0, self.precision)

    def expansion(self) -> str:
        terms = []
        for e, c in enumerate(self.coefficients):
            if not c:
                continue
            text = str(c)
            power = "1" if e == 0 else ("q" if e == 1 else f"q^{e}")
            if text == "1":
                terms.append(power)
            elif text == "-1":
                terms.append(f"-{power}")
            else:
                terms.append(f"({text})*{power}" if " " in text else f"{text}*{power}")
        terms.append(f"O(q^{self.precision})")
        return " + ".join(terms).replace("+ -", "- ")

    def to_json(self) -> dict:
        return {"field": self.eigenvalue_field.describe(), "degree": self.degree, "multiplicity": self.multiplicity,
                "new": self.is_new, "expansion": self.expansion(),
                "hecke_polynomials": {str(ell): poly_to_string(p) for ell, p in self.hecke_polynomials.items()}}


def good_primes(level: int, count: int) -> list:
    primes = []
    for ell in primerange(2, 10 ** 6):
        if level % ell:
            primes.append(ell)
        if len(primes) == count:
            return primes
    return primes


def decompose(basis: list, pivots: list, chi: DirichletChar, level: int, order: int) -> list:
    """Split a Hecke-stable weight-1 space into eigen-systems

    basis is a reduced echelon basis over Q(zeta_order). A generic combination of
    T_ell for good ell is factored over Q(zeta_order); each factor g gives an
    eigen-system over K[x]/(g) whose multiplicity is its kernel dimension.
    """
    d = len(basis)
    if d == 0:
        return []
    zero = CycNumber.zero(order)
    primes = good_primes(level, EIGENVALUE_FIELD_PRIMES)
    matrices = {}
    for ell in primes:
        try:
            matrices[ell] = hecke_matrix_on_basis(basis, pivots, ell, chi, level)
        except PrecisionError:
            logger.warning(f"Level {level}: T_{ell} not determined at precision {basis[0].prec}")
    if not matrices:
        raise PrecisionError(f"No Hecke operator is determined on the level {level} space")

    generic = [[zero] * d for _ in range(d)]
    for weight, matrix in enumerate(matrices.values(), start=1):
        generic = [[x + y * weight for x, y in zip(r1, r2)] for r1, r2 in zip(generic, matrix)]

    eigenforms = []
    for factor, _ in factor_over_cyclotomic(charpoly(generic, order), order):
        L = ExtensionField(order, factor)
        theta = L.generator()
        shifted = [[L.element([x]) - (theta if i == j else L.zero()) for j, x in enumerate(row)]
                   for i, row in enumerate(generic)]
        # Left eigenvectors: c * M = theta * c
        kernel = left_kernel(shifted, d)
        if not kernel:
            raise ArithmeticError(f"Factor {poly_to_string(factor)} has no eigenvector")
        multiplicity = len(kernel)
        c = kernel[0]
        coefficients = [L.zero() for _ in range(basis[0].prec)]
        for ci, h in zip(c, basis):
            if ci:
                for e in range(h.start, h.prec):
                    if h[e]:
                        coefficients[e] = coefficients[e] + ci * h[e]
        if multiplicity == 1:
            lead = coefficients[1] if coefficients[1] else next((x for x in coefficients if x), None)
            if lead is not None:
                coefficients = [x / lead for x in coefficients]
        polynomials = {}
        for ell in matrices:
            if multiplicity == 1 and ell < len(coefficients):
                polynomials[ell] = charpoly(multiplication_matrix(coefficients[ell]), order)
        eigenforms.append(Eigenform(order, L, coefficients, multiplicity, polynomials))
    logger.info(f"Level {level}: {len(eigenforms)} eigen-system(s), dimensions "
                f"{[form.dimension for form in eigenforms]}")
    return eigenforms
