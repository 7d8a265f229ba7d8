"""
Cyclotomic Arithmetic Module
Exact arithmetic in Q(zeta_n), Z[zeta_n] and the residue fields Z[zeta_n]/lambda
"""

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import gcd
import logging
import sys
import os

from sympy import Poly, Rational, cyclotomic_poly, divisors, mobius, n_order, symbols, totient

# Add config to path
sys.path.append(os.path.join(os.path.dirname(__file__), '..'))
from config.settings import *

# Setup logging
logging.basicConfig(level=getattr(logging, LOG_LEVEL), format=LOG_FORMAT)
logger = logging.getLogger(__name__)

_X = symbols('x')


@dataclass(frozen=True)
class CyclotomicData:
    """Precomputed tables for the n-th cyclotomic field"""
    n: int
    phi: int
    modulus: tuple      # coefficients of Phi_n, ascending, monic
    powers: tuple       # powers[k] = zeta^k on the power basis


@lru_cache(maxsize=None)
def cyclotomic_data(n: int) -> CyclotomicData:
    """Return the cached tables for Q(zeta_n)"""
    if n < 1:
        raise ValueError(f"Cyclotomic order must be positive, got {n}")
    phi = int(totient(n))
    modulus = tuple(int(c) for c in reversed(Poly(cyclotomic_poly(n, _X), _X).all_coeffs()))

    # zeta^k for 0 <= k < max(n, 2*phi - 1) reduced modulo Phi_n
    length = max(n, 2 * phi - 1)
    powers = []
    current = [0] * phi
    current[0] = 1
    for _ in range(length):
        powers.append(tuple(current))
        shifted = [0] + current[:-1]
        top = current[-1]
        if top:
            for i in range(phi):
                shifted[i] -= top * modulus[i]
        current = shifted
    return CyclotomicData(n, phi, modulus, tuple(powers))


def ramanujan_sum(n: int, k: int) -> int:
    """Trace of zeta_n^k down to Q"""
    g = gcd(k, n)
    m = n // g
    return int(mobius(m)) * int(totient(n)) // int(totient(m))


class CycNumber:
    """An element of Q(zeta_n) on the power basis modulo Phi_n"""

    __slots__ = ("order", "coeffs")

    def __init__(self, order: int, coeffs):
        data = cyclotomic_data(order)
        coeffs = tuple(Fraction(c) for c in coeffs)
        if len(coeffs) != data.phi:
            raise ValueError(f"Q(zeta_{order}) needs {data.phi} coordinates, got {len(coeffs)}")
        object.__setattr__(self, "order", order)
        object.__setattr__(self, "coeffs", coeffs)

    def __setattr__(self, name, value):
        raise AttributeError("CycNumber is immutable")

    # Constructors
    @classmethod
    def zero(cls, order: int) -> "CycNumber":
        return cls(order, [0] * cyclotomic_data(order).phi)

    @classmethod
    def from_rational(cls, order: int, value) -> "CycNumber":
        coeffs = [0] * cyclotomic_data(order).phi
        coeffs[0] = Fraction(value)
        return cls(order, coeffs)

    @classmethod
    def one(cls, order: int) -> "CycNumber":
        return cls.from_rational(order, 1)

    @classmethod
    def zeta(cls, order: int, power: int = 1) -> "CycNumber":
        """Return zeta_n^power"""
        data = cyclotomic_data(order)
        return cls(order, data.powers[power % order])

    @classmethod
    def root_of_unity(cls, order: int, exponent: Fraction) -> "CycNumber":
        """Return exp(2 pi i * exponent) for an exponent in (1/order)Z"""
        exponent = Fraction(exponent)
        if (exponent * order).denominator != 1:
            raise ValueError(f"exp(2 pi i {exponent}) does not lie in Q(zeta_{order})")
        return cls.zeta(order, int(exponent * order))

    # Coercion
    def _coerce(self, other) -> "CycNumber":
        if isinstance(other, CycNumber):
            if other.order != self.order:
                raise ValueError(f"Field mismatch: Q(zeta_{self.order}) vs Q(zeta_{other.order})")
            return other
        if isinstance(other, (int, Fraction)):
            return CycNumber.from_rational(self.order, other)
        return NotImplemented

    # Arithmetic
    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return CycNumber(self.order, [a + b for a, b in zip(self.coeffs, other.coeffs)])

    __radd__ = __add__

    def __neg__(self):
        return CycNumber(self.order, [-a for a in self.coeffs])

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return CycNumber(self.order, [a - b for a, b in zip(self.coeffs, other.coeffs)])

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            if other == 0:
                return CycNumber.zero(self.order)
            return CycNumber(self.order, [a * other for a in self.coeffs])
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        data = cyclotomic_data(self.order)
        phi = data.phi
        product = [Fraction(0)] * (2 * phi - 1)
        for i, a in enumerate(self.coeffs):
            if a:
                for j, b in enumerate(other.coeffs):
                    if b:
                        product[i + j] += a * b
        result = product[:phi]
        for k in range(phi, 2 * phi - 1):
            c = product[k]
            if c:
                for i, v in enumerate(data.powers[k]):
                    if v:
                        result[i] += c * v
        return CycNumber(self.order, result)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            if other == 0:
                raise ZeroDivisionError("Division of a cyclotomic number by zero")
            return CycNumber(self.order, [a / other for a in self.coeffs])
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self * other.inverse()

    def __rtruediv__(self, other):
        return self._coerce(other) * self.inverse()

    def __pow__(self, exponent: int):
        if exponent < 0:
            return self.inverse() ** (-exponent)
        result = CycNumber.one(self.order)
        base = self
        while exponent:
            if exponent & 1:
                result = result * base
            base = base * base
            exponent >>= 1
        return result

    # Comparison
    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.coeffs[0] == other and not any(self.coeffs[1:])
        if isinstance(other, CycNumber):
            return self.order == other.order and self.coeffs == other.coeffs
        return NotImplemented

    def __hash__(self):
        if not any(self.coeffs[1:]):
            return hash(self.coeffs[0])
        return hash((self.order, self.coeffs))

    def __bool__(self):
        return any(self.coeffs)

    def __repr__(self):
        return f"CycNumber({self.order}, {str(self)})"

    def __str__(self):
        terms = []
        for i, c in enumerate(self.coeffs):
            if not c:
                continue
            if i == 0:
                terms.append(str(c))
            elif c == 1:
                terms.append("z" if i == 1 else f"z^{i}")
            else:
                terms.append(f"{c}*z" if i == 1 else f"{c}*z^{i}")
        return " + ".join(terms) if terms else "0"

    # Field operations
    def galois_conjugate(self, a: int) -> "CycNumber":
        """Apply the automorphism zeta -> zeta^a"""
        if gcd(a, self.order) != 1:
            raise ValueError(f"{a} is not a unit modulo {self.order}")
        data = cyclotomic_data(self.order)
        result = [Fraction(0)] * data.phi
        for i, c in enumerate(self.coeffs):
            if c:
                for j, v in enumerate(data.powers[(a * i) % self.order]):
                    if v:
                        result[j] += c * v
        return CycNumber(self.order, result)

    def conjugates(self):
        """All Galois conjugates, sigma_1 first"""
        return [self.galois_conjugate(a) for a in range(1, self.order + 1)
                if gcd(a, self.order) == 1]

    def inverse(self) -> "CycNumber":
        if not self:
            raise ZeroDivisionError("Inverse of zero in a cyclotomic field")
        others = CycNumber.one(self.order)
        for a in range(2, self.order):
            if gcd(a, self.order) == 1:
                others = others * self.galois_conjugate(a)
        norm = (self * others).coeffs[0]
        return others / norm

    def norm(self) -> Fraction:
        """Field norm down to Q, as the resultant with Phi_n"""
        data = cyclotomic_data(self.order)
        f = Poly([Rational(c) for c in reversed(data.modulus)], _X, domain="QQ")
        g = Poly([Rational(c.numerator, c.denominator) for c in reversed(self.coeffs)], _X, domain="QQ")
        if g.is_zero:
            return Fraction(0)
        value = Rational(f.resultant(g))
        return Fraction(int(value.p), int(value.q))

    def trace(self) -> Fraction:
        return sum((c * ramanujan_sum(self.order, i) for i, c in enumerate(self.coeffs)), Fraction(0))

    def is_integral(self) -> bool:
        return all(c.denominator == 1 for c in self.coeffs)

    def is_rational(self) -> bool:
        return not any(self.coeffs[1:])

    def denominator(self) -> int:
        d = 1
        for c in self.coeffs:
            d = d * c.denominator // gcd(d, c.denominator)
        return d

    def lift(self, order: int) -> "CycNumber":
        """Embed into Q(zeta_m) for a multiple m of n via zeta_n = zeta_m^(m/n)"""
        if order % self.order:
            raise ValueError(f"Cannot embed Q(zeta_{self.order}) into Q(zeta_{order})")
        if order == self.order:
            return self
        step = order // self.order
        result = CycNumber.zero(order)
        for i, c in enumerate(self.coeffs):
            if c:
                result = result + CycNumber.zeta(order, step * i) * c
        return result

    def integer_coordinates(self) -> list:
        if not self.is_integral():
            raise ValueError(f"{self} is not integral")
        return [int(c) for c in self.coeffs]

    # Serialization
    def to_json(self) -> dict:
        return {"n": self.order, "coeffs": [[c.numerator, c.denominator] for c in self.coeffs]}

    @classmethod
    def from_json(cls, payload: dict) -> "CycNumber":
        return cls(payload["n"], [Fraction(a, b) for a, b in payload["coeffs"]])


def norm_and_trace(x: CycNumber) -> tuple:
    """Field norm and trace of x down to Q"""
    return x.norm(), x.trace()


@dataclass(frozen=True, order=True)
class PrimeIdeal:
    """A prime of Z[zeta_n] above p, given by an irreducible factor of Phi_n mod p"""
    p: int
    n: int
    factor: tuple       # ascending coefficients mod p, monic

    @property
    def residue_degree(self) -> int:
        return len(self.factor) - 1

    @property
    def field_size(self) -> int:
        return self.p ** self.residue_degree

    def describe(self) -> str:
        terms = []
        for i in range(len(self.factor) - 1, -1, -1):
            c = self.factor[i]
            if not c:
                continue
            coefficient = "" if (c == 1 and i > 0) else str(c)
            power = "" if i == 0 else ("X" if i == 1 else f"X^{i}")
            terms.append(f"{coefficient}{power}")
        return f"({self.p}, {' + '.join(terms)})"

    def to_json(self) -> dict:
        return {"p": self.p, "n": self.n, "factor": list(self.factor)}

    @classmethod
    def from_json(cls, payload: dict) -> "PrimeIdeal":
        return cls(payload["p"], payload["n"], tuple(payload["factor"]))


@lru_cache(maxsize=None)
def factor_prime(p: int, n: int) -> tuple:
    """All prime ideals of Z[zeta_n] above the unramified prime p, canonically sorted"""
    if n % p == 0:
        raise ValueError(f"Prime {p} divides {n}; only unramified primes are supported")
    poly = Poly(cyclotomic_poly(n, _X), _X, modulus=p)
    _, factors = poly.factor_list()
    ideals = []
    for factor, multiplicity in factors:
        coeffs = [int(c) % p for c in reversed(factor.all_coeffs())]
        lead = coeffs[-1]
        if lead != 1:
            inv = pow(lead, -1, p)
            coeffs = [(c * inv) % p for c in coeffs]
        ideals.append(PrimeIdeal(p, n, tuple(coeffs)))

    expected = int(n_order(p, n)) if n > 1 else 1
    if any(ideal.residue_degree != expected for ideal in ideals):
        raise ArithmeticError(f"Unexpected residue degrees for {p} in Q(zeta_{n})")
    # Canonical order: compare factors from the leading coefficient down
    ideals.sort(key=lambda ideal: tuple(reversed(ideal.factor)))
    logger.debug(f"Factored {p} in Q(zeta_{n}): {len(ideals)} primes of degree {expected}")
    return tuple(ideals)


class ResidueElement:
    """An element of the residue field Z[zeta_n]/lambda = F_p[x]/(factor)"""

    __slots__ = ("ideal", "coeffs")

    def __init__(self, ideal: PrimeIdeal, coeffs):
        p = ideal.p
        f = ideal.residue_degree
        coeffs = [int(c) % p for c in coeffs]
        # Reduce modulo the (monic) factor
        modulus = ideal.factor
        for k in range(len(coeffs) - 1, f - 1, -1):
            c = coeffs[k]
            if c:
                for i in range(f + 1):
                    coeffs[k - f + i] = (coeffs[k - f + i] - c * modulus[i]) % p
        coeffs = (coeffs + [0] * f)[:f]
        object.__setattr__(self, "ideal", ideal)
        object.__setattr__(self, "coeffs", tuple(coeffs))

    def __setattr__(self, name, value):
        raise AttributeError("ResidueElement is immutable")

    @classmethod
    def from_int(cls, ideal: PrimeIdeal, value: int) -> "ResidueElement":
        return cls(ideal, [value])

    @classmethod
    def zero(cls, ideal: PrimeIdeal) -> "ResidueElement":
        return cls(ideal, [0])

    @classmethod
    def one(cls, ideal: PrimeIdeal) -> "ResidueElement":
        return cls(ideal, [1])

    def _coerce(self, other):
        if isinstance(other, ResidueElement):
            if other.ideal != self.ideal:
                raise ValueError("Residue field mismatch")
            return other
        if isinstance(other, int):
            return ResidueElement.from_int(self.ideal, other)
        if isinstance(other, Fraction):
            return ResidueElement.from_int(self.ideal, other.numerator) / other.denominator
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return ResidueElement(self.ideal, [a + b for a, b in zip(self.coeffs, other.coeffs)])

    __radd__ = __add__

    def __neg__(self):
        return ResidueElement(self.ideal, [-a for a in self.coeffs])

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return ResidueElement(self.ideal, [a - b for a, b in zip(self.coeffs, other.coeffs)])

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        f = self.ideal.residue_degree
        product = [0] * (2 * f - 1)
        for i, a in enumerate(self.coeffs):
            if a:
                for j, b in enumerate(other.coeffs):
                    product[i + j] += a * b
        return ResidueElement(self.ideal, product)

    __rmul__ = __mul__

    def __pow__(self, exponent: int):
        if exponent < 0:
            return self.inverse() ** (-exponent)
        result = ResidueElement.one(self.ideal)
        base = self
        while exponent:
            if exponent & 1:
                result = result * base
            base = base * base
            exponent >>= 1
        return result

    def inverse(self) -> "ResidueElement":
        if not self:
            raise ZeroDivisionError("Inverse of zero in a residue field")
        return self ** (self.ideal.field_size - 2)

    def __truediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self * other.inverse()

    def __rtruediv__(self, other):
        return self._coerce(other) * self.inverse()

    def __eq__(self, other):
        if isinstance(other, int):
            return self == ResidueElement.from_int(self.ideal, other)
        if isinstance(other, ResidueElement):
            return self.ideal == other.ideal and self.coeffs == other.coeffs
        return NotImplemented

    def __hash__(self):
        return hash((self.ideal, self.coeffs))

    def __bool__(self):
        return any(self.coeffs)

    def multiplicative_order(self) -> int:
        if not self:
            raise ValueError("Zero has no multiplicative order")
        q1 = self.ideal.field_size - 1
        order = q1
        for d in divisors(q1):
            if self ** d == 1:
                order = d
                break
        return order

    def __repr__(self):
        return f"ResidueElement({self.ideal.describe()}, {str(self)})"

    def __str__(self):
        """Display as b*t + a, t the image of zeta_n"""
        terms = []
        for i in range(len(self.coeffs) - 1, -1, -1):
            c = self.coeffs[i]
            if not c:
                continue
            if i == 0:
                terms.append(str(c))
            else:
                power = "t" if i == 1 else f"t^{i}"
                terms.append(power if c == 1 else f"{c}{power}")
        return " + ".join(terms) if terms else "0"

    def to_json(self) -> list:
        return list(self.coeffs)



def reduce(x: CycNumber, ideal: PrimeIdeal) -> ResidueElement:
    """Reduce an integral element of Z[zeta_n] modulo the prime ideal"""
    if x.order != ideal.n:
        raise ValueError(f"Element of Q(zeta_{x.order}) reduced at a prime of Q(zeta_{ideal.n})")
    if not x.is_integral():
        raise ValueError(f"Cannot reduce non-integral element {x}")
    return ResidueElement(ideal, [int(c) for c in x.coeffs])


def reduce_p_integral(x: CycNumber, ideal: PrimeIdeal) -> ResidueElement:
    """Reduce an element whose denominator is prime to p"""
    d = x.denominator()
    if d % ideal.p == 0:
        raise ValueError(f"{x} is not {ideal.p}-integral")
    return reduce(x * d, ideal) / d


def prime_to_part(n: int, p: int) -> int:
    """Largest divisor of n prime to p"""
    while n % p == 0:
        n //= p
    return n


def reduce_any(x: CycNumber, ideal: PrimeIdeal) -> ResidueElement:
    """Reduce x in Z[zeta_m] at a prime above p of the prime-to-p subfield

    Handles m = p^a * m' with m' dividing ideal.n: zeta_m maps to the image of
    zeta_{m'}, since p-power roots of unity are 1 modulo every prime above p.
    """
    m = x.order
    p = ideal.p
    m_prime = prime_to_part(m, p)
    if ideal.n % m_prime:
        raise ValueError(f"Q(zeta_{m}) does not reduce into the residue field of Q(zeta_{ideal.n})")
    if m == ideal.n:
        return reduce(x, ideal)
    if not x.is_integral():
        raise ValueError(f"Cannot reduce non-integral element {x}")
    p_power = m // m_prime
    # zeta_m^i = zeta_{p^a}^u * zeta_{m'}^y with y = i / p^a mod m'
    shift = pow(p_power, -1, m_prime) if m_prime > 1 else 0
    step = ideal.n // m_prime
    zeta = reduce(CycNumber.zeta(ideal.n), ideal)
    result = ResidueElement.zero(ideal)
    for i, c in enumerate(x.coeffs):
        if c:
            exponent = ((i * shift) % m_prime) * step if m_prime > 1 else 0
            result = result + zeta ** exponent * int(c)
    return result
