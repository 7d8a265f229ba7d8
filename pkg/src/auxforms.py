"""
Auxiliary Forms Module
Weight-1 multipliers and q-expansion oracles: Eisenstein series with character, eta products and theta series
"""

from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd, isqrt
import logging
import sys
import os

from sympy import divisors, factorint

# Add config to path
sys.path.append(os.path.join(os.path.dirname(__file__), '..'))
from config.settings import *
from src.cyclotomic import CycNumber
from src.dirichlet import DirichletChar, all_characters, kronecker, lcm
from src.qseries import CoefficientRing, QSeries
from src.quadfield import reduced_forms

# Setup logging
logging.basicConfig(level=getattr(logging, LOG_LEVEL), format=LOG_FORMAT)
logger = logging.getLogger(__name__)


@dataclass
class EisensteinSeries1:
    """Weight-1 Eisenstein series E(chi1, chi2), scaled to integral coefficients"""
    chi1: DirichletChar
    chi2: DirichletChar
    scale: int
    series: QSeries

    @property
    def level(self) -> int:
        return self.chi1.modulus * self.chi2.modulus

    @property
    def character(self) -> DirichletChar:
        return self.chi1.extend(self.level) * self.chi2.extend(self.level)

    def label(self) -> str:
        return f"E1({self.chi1.label()}@{self.chi1.modulus}, {self.chi2.label()}@{self.chi2.modulus})"


@dataclass
class Multiplier:
    """A weight-1 form f in M_1(N, psi) used to divide weight-2 lattices"""
    kind: str                       # eisenstein, eta or theta
    label: str
    character: DirichletChar        # psi mod N
    series: QSeries
    conductor: int                  # level the form is new at, before degeneracy shifts
    flagged_primes: frozenset = field(default_factory=frozenset)

    @property
    def valuation(self) -> int:
        return self.series.valuation

    def usable_at(self, p: int) -> bool:
        """Division by this form preserves p-integrality"""
        return p not in self.flagged_primes

    def to_json(self) -> dict:
        return {"kind": self.kind, "label": self.label, "character": self.character.to_json(),
                "flagged_primes": sorted(self.flagged_primes)}


def l_value_at_zero(chi: DirichletChar) -> Fraction:
    """L(0, chi) = -(1/f) sum_{a=1}^{f} chi(a) a for odd primitive chi of conductor f

    Returned as an element of Q(zeta_ord(chi)).
    """
    if not chi.is_primitive():
        raise ValueError(f"L(0, chi) needs a primitive character, {chi.label()} has conductor {chi.conductor}")
    f = chi.modulus
    n = chi.order
    total = CycNumber.zero(n)
    for a in range(1, f + 1):
        if gcd(a, f) == 1:
            total = total + chi.value(a, n) * a
    return total / (-f)


def _value_table(chi: DirichletChar, n: int) -> list:
    return [chi.value(a, n) for a in range(chi.modulus)]


def eisenstein1(chi1: DirichletChar, chi2: DirichletChar, precision: int, order: int = None) -> EisensteinSeries1:
    """E(chi1, chi2) = c0 + sum_m (sum_{d|m} chi1(m/d) chi2(d)) q^m for primitive chi1, chi2"""
    product = chi1.extend(chi1.modulus * chi2.modulus) * chi2.extend(chi1.modulus * chi2.modulus)
    if not product.is_odd():
        raise ValueError("chi1 chi2 must be odd for a weight-1 Eisenstein series")
    if not (chi1.is_primitive() and chi2.is_primitive()):
        raise ValueError("Weight-1 Eisenstein series need primitive characters")
    n = order or lcm(lcm(chi1.order, chi2.order), 2)
    ring = CoefficientRing.cyclotomic(n)
    values1, values2 = _value_table(chi1, n), _value_table(chi2, n)
    f1, f2 = chi1.modulus, chi2.modulus

    if chi1.is_trivial():
        constant = l_value_at_zero(chi2).lift(n) / 2
    elif chi2.is_trivial():
        constant = l_value_at_zero(chi1).lift(n) / 2
    else:
        constant = CycNumber.zero(n)
    coeffs = [constant]
    for m in range(1, precision):
        total = CycNumber.zero(n)
        for d in divisors(m):
            x, y = values1[(m // d) % f1], values2[d % f2]
            if x and y:
                total = total + x * y
        coeffs.append(total)
    scale = constant.denominator()
    series = QSeries(ring, coeffs, 0, precision).scale(scale)
    return EisensteinSeries1(chi1, chi2, scale, series)


def _euler_product(precision: int) -> list:
    """prod_{m>=1} (1 - q^m) to O(q^precision), by the pentagonal number theorem"""
    coeffs = [0] * precision
    k = 0
    while True:
        done = True
        for j in ((k, -k) if k else (0,)):
            e = j * (3 * j - 1) // 2
            if e < precision:
                coeffs[e] += -1 if j % 2 else 1
                done = False
        if done and k:
            break
        k += 1
    return coeffs


def _multiply(a: list, b: list, precision: int) -> list:
    result = [0] * precision
    for i, x in enumerate(a):
        if x:
            for j in range(min(len(b), precision - i)):
                if b[j]:
                    result[i + j] += x * b[j]
    return result


def _inverse(a: list, precision: int) -> list:
    """1/a for a series with constant term 1"""
    inverse = [0] * precision
    inverse[0] = 1
    for m in range(1, precision):
        inverse[m] = -sum(a[j] * inverse[m - j] for j in range(1, min(m, len(a) - 1) + 1) if a[j])
    return inverse


def eta_product(factors, precision: int, order: int = 1) -> QSeries:
    """q^(sum d e / 24) prod_d prod_m (1 - q^(d m))^e to O(q^precision)"""
    factors = list(factors)
    weighted = sum(d * e for d, e in factors)
    if weighted % 24:
        raise ValueError(f"Eta product {factors} has fractional leading exponent {weighted}/24")
    lead = weighted // 24
    length = max(precision - lead, 0)
    result = [1] + [0] * (length - 1) if length else []
    euler = _euler_product(length) if length else []
    for d, e in factors:
        if not length:
            break
        stretched = [0] * length
        for i, c in enumerate(euler[:(length - 1) // d + 1]):
            stretched[i * d] = c
        factor = stretched if e > 0 else _inverse(stretched, length)
        for _ in range(abs(e)):
            result = _multiply(result, factor, length)
    return QSeries(CoefficientRing.cyclotomic(order), result, lead, precision)


def eta_character(a: int, b: int, N: int) -> DirichletChar:
    """Character of eta(a tau) eta(b tau) on Gamma0(N): d -> (-ab/d)"""
    return DirichletChar.from_function(N, lambda d: Fraction(0) if kronecker(-a * b, d) == 1 else Fraction(1, 2))


def weight_one_eta_pairs(N: int) -> list:
    """(a, b) with a + b = 24, a <= b, both dividing N and N (1/a + 1/b) = 0 mod 24"""
    pairs = []
    for a in range(1, 13):
        b = 24 - a
        if N % a == 0 and N % b == 0 and (N // a + N // b) % 24 == 0:
            pairs.append((a, b))
    return pairs


def theta_series(form, precision: int, order: int = 1) -> QSeries:
    """sum_{x, y} q^(a x^2 + b x y + c y^2) for a positive definite form (a, b, c)"""
    a, b, c = form
    D = b * b - 4 * a * c
    if D >= 0 or a <= 0:
        raise ValueError(f"Form {form} is not positive definite")
    counts = [0] * precision
    # a x^2 + b x y + c y^2 >= |D| y^2 / (4a)
    y_bound = isqrt(4 * a * precision // -D) + 1
    for y in range(-y_bound, y_bound + 1):
        # Solve a x^2 + b y x + (c y^2 - precision) < 0 for x
        disc = b * b * y * y - 4 * a * (c * y * y - precision)
        if disc < 0:
            continue
        root = isqrt(disc) + 1
        lo = (-b * y - root) // (2 * a) - 1
        hi = (-b * y + root) // (2 * a) + 1
        for x in range(lo, hi + 1):
            value = a * x * x + b * x * y + c * y * y
            if value < precision:
                counts[value] += 1
    return QSeries(CoefficientRing.cyclotomic(order), counts, 0, precision)


def theta_combination(forms, precision: int, order: int = 1) -> QSeries:
    """Signed sum of theta series; the caller handles any halving"""
    total = QSeries.zero(CoefficientRing.cyclotomic(order), precision)
    for sign, form in forms:
        total = total + theta_series(form, precision, order).scale(sign)
    return total


def _flags(series: QSeries) -> frozenset:
    lead = series.leading_coefficient()
    norm = abs(lead.norm())
    return frozenset(p for p in factorint(int(norm.numerator)) if p > 2)


def _primitive_characters(f: int, order: int) -> list:
    return [chi for chi in all_characters(f) if chi.is_primitive() and order % chi.order == 0]


def multiplier_pool(N: int, order: int, precision: int) -> list:
    """All weight-1 multipliers at level N with values in Q(zeta_order), in increasing conductor order"""
    pool = []
    seen = set()

    def add(multiplier: Multiplier):
        key = (multiplier.character, tuple(multiplier.series.coeffs), multiplier.series.start)
        if multiplier.series.is_zero() or key in seen:
            return
        seen.add(key)
        pool.append(multiplier)

    # Eisenstein series, unordered pairs of primitive characters
    pairs = []
    for f1 in divisors(N):
        for f2 in divisors(N // f1):
            if (f1, f2) > (f2, f1):
                continue
            for chi1 in _primitive_characters(f1, order):
                for chi2 in _primitive_characters(f2, order):
                    if f1 == f2 and chi1.key > chi2.key:
                        continue
                    if (chi1.parity() * chi2.parity()) == -1:
                        pairs.append((f1 * f2, chi1, chi2))
    pairs.sort(key=lambda item: (item[0], item[1].modulus, item[1].key, item[2].key))
    for conductor, chi1, chi2 in pairs:
        base = eisenstein1(chi1, chi2, precision, order)
        for t in divisors(N // conductor):
            series = base.series.substitute(t).truncate(precision)
            psi = base.character.extend(N)
            add(Multiplier("eisenstein", f"{base.label()}(q^{t})" if t > 1 else base.label(),
                           psi, series, conductor, _flags(series)))

    # Eta products of weight one
    for a, b in weight_one_eta_pairs(N):
        series = eta_product([(a, 1), (b, 1)], precision, order)
        add(Multiplier("eta", f"eta({a}t)eta({b}t)", eta_character(a, b, N), series, lcm(a, b), frozenset()))

    # Theta series of forms whose discriminant divides the level
    for D in sorted({-d for d in divisors(N) if (-d) % 4 in (0, 1) and d > 2}, reverse=True):
        psi = DirichletChar.from_function(N, lambda x, D=D: Fraction(0) if kronecker(D, x) == 1 else Fraction(1, 2))
        for form in reduced_forms(D):
            base = theta_series(form, precision, order)
            for t in divisors(N // -D):
                series = base.substitute(t).truncate(precision)
                add(Multiplier("theta", f"theta{form}(q^{t})" if t > 1 else f"theta{form}",
                               psi, series, -D, frozenset()))

    pool.sort(key=lambda m: (m.conductor, ["eisenstein", "eta", "theta"].index(m.kind)))
    logger.info(f"Level {N}: {len(pool)} weight-1 multipliers over Q(zeta_{order})")
    return pool
