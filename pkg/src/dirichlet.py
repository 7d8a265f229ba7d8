"""
Dirichlet Character Module
Characters of (Z/NZ)^x valued in Z[zeta_n]: enumeration, labels, conjugacy classes and reduction
"""

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from itertools import product
from math import gcd
import logging
import re
import sys
import os

from sympy import divisors, factorint, is_primitive_root, jacobi_symbol, totient

# Add config to path
sys.path.append(os.path.join(os.path.dirname(__file__), '..'))
from config.settings import *
from src.cyclotomic import CycNumber, PrimeIdeal, ResidueElement, reduce

# Setup logging
logging.basicConfig(level=getattr(logging, LOG_LEVEL), format=LOG_FORMAT)
logger = logging.getLogger(__name__)


def lcm(a: int, b: int) -> int:
    return a * b // gcd(a, b)


def gcdex(a, b):
    """Return a tuple (x, y, g) where g = gcd(a, b) and a*x + b*y == g."""
    if b == 0:
        if a < 0:
            return -1, 0, -a
        return 1, 0, a
    q, r = divmod(a, b)
    x, y, g = gcdex(b, r)
    return y, x - y * q, g


def lift_unit(n: int, d: int, a: int) -> int:
    """Given a divisor d of n and a unit a modulo d, lift a to a unit modulo n."""
    u, v = 1, n
    g = gcd(v, d)
    while g > 1:
        u *= g
        v //= g
        g = gcd(v, g)
    x, y, _ = gcdex(u, v)
    return (u * x + a * y * v) % n


@dataclass(frozen=True)
class UnitGroup:
    """Generators of (Z/NZ)^x, one cyclic factor at a time"""
    modulus: int
    generators: tuple       # CRT-lifted generators
    orders: tuple           # order of each generator
    primes: tuple           # prime owning each generator
    dlog: dict = field(compare=False, repr=False)

    def discrete_log(self, a: int):
        """Exponent vector of a on the generators, None when gcd(a, N) > 1"""
        return self.dlog.get(a % self.modulus)


def _smallest_primitive_root(q: int) -> int:
    g = 2
    while not is_primitive_root(g, q):
        g += 1
    return g


def _crt_lift(N: int, q: int, g: int) -> int:
    """The element congruent to g mod q and to 1 mod N/q"""
    rest = N // q
    if rest == 1:
        return g % N
    x, y, _ = gcdex(q, rest)
    return (g * rest * y + q * x) % N


@lru_cache(maxsize=None)
def unit_group(N: int) -> UnitGroup:
    """Canonical generators of (Z/NZ)^x with a discrete logarithm table"""
    if N < 1:
        raise ValueError(f"Modulus must be positive, got {N}")
    generators, orders, primes = [], [], []
    for p, e in sorted(factorint(N).items()):
        q = p ** e
        if p == 2:
            if e >= 2:
                generators.append(_crt_lift(N, q, -1))
                orders.append(2)
                primes.append(2)
            if e >= 3:
                generators.append(_crt_lift(N, q, 5))
                orders.append(2 ** (e - 2))
                primes.append(2)
        else:
            generators.append(_crt_lift(N, q, _smallest_primitive_root(q)))
            orders.append(int(totient(q)))
            primes.append(p)

    dlog = {}
    for exponents in product(*(range(o) for o in orders)):
        a = 1
        for g, k in zip(generators, exponents):
            a = (a * pow(g, k, N)) % N
        dlog[a % N] = exponents
    if N == 1:
        dlog = {0: ()}
    return UnitGroup(N, tuple(generators), tuple(orders), tuple(primes), dlog)


class DirichletChar:
    """A Dirichlet character mod N, stored by its exponents on the canonical generators"""

    __slots__ = ("modulus", "exponents", "_group")

    def __init__(self, modulus: int, exponents):
        group = unit_group(modulus)
        exponents = tuple(exponents)
        if len(exponents) != len(group.orders):
            raise ValueError(f"Characters mod {modulus} need {len(group.orders)} exponents")
        exponents = tuple(int(e) % o for e, o in zip(exponents, group.orders))
        object.__setattr__(self, "modulus", modulus)
        object.__setattr__(self, "exponents", exponents)
        object.__setattr__(self, "_group", group)

    def __setattr__(self, name, value):
        raise AttributeError("DirichletChar is immutable")

    @classmethod
    def trivial(cls, modulus: int) -> "DirichletChar":
        return cls(modulus, [0] * len(unit_group(modulus).orders))

    @classmethod
    def from_function(cls, modulus: int, func) -> "DirichletChar":
        """Build from a map a -> exponent in Q/Z, evaluated on the generators"""
        group = unit_group(modulus)
        exponents = []
        for g, o in zip(group.generators, group.orders):
            value = Fraction(func(g)) * o
            if value.denominator != 1:
                raise ValueError(f"Value at {g} is not of order dividing {o}")
            exponents.append(int(value))
        return cls(modulus, exponents)

    # Values
    @property
    def key(self) -> tuple:
        return self.exponents

    @property
    def values_on_generators(self) -> tuple:
        return tuple(Fraction(e, o) for e, o in zip(self.exponents, self._group.orders))

    def exponent(self, a: int):
        """chi(a) = exp(2 pi i * exponent), or None when gcd(a, N) > 1"""
        logs = self._group.discrete_log(a)
        if logs is None:
            return None
        total = sum((Fraction(k * e, o) for k, e, o in zip(logs, self.exponents, self._group.orders)),
                    Fraction(0))
        return total - (total.numerator // total.denominator)

    def value(self, a: int, n: int = None) -> CycNumber:
        """chi(a) as an element of Q(zeta_n)"""
        n = n or self.order
        t = self.exponent(a)
        if t is None:
            return CycNumber.zero(n)
        return CycNumber.root_of_unity(n, t)

    def __call__(self, a: int, n: int = None) -> CycNumber:
        return self.value(a, n)

    # Invariants
    @property
    def order(self) -> int:
        result = 1
        for t in self.values_on_generators:
            result = lcm(result, t.denominator)
        return result

    def is_trivial(self) -> bool:
        return not any(self.exponents)

    def parity(self) -> int:
        """chi(-1) as +1 or -1"""
        if self.modulus <= 2:
            return 1
        return 1 if self.exponent(-1) == 0 else -1

    def is_odd(self) -> bool:
        return self.parity() == -1

    def is_even(self) -> bool:
        return self.parity() == 1

    @property
    def conductor(self) -> int:
        N = self.modulus
        for d in divisors(N):
            if all(self.exponent(a) == 0 for a in range(1, N, d) if gcd(a, N) == 1 and a % d == 1 % d):
                return d
        return N

    def is_primitive(self) -> bool:
        return self.conductor == self.modulus

    # Group operations
    def __mul__(self, other: "DirichletChar") -> "DirichletChar":
        if other.modulus != self.modulus:
            M = lcm(self.modulus, other.modulus)
            return self.extend(M) * other.extend(M)
        return DirichletChar(self.modulus, [a + b for a, b in zip(self.exponents, other.exponents)])

    def __pow__(self, k: int) -> "DirichletChar":
        return DirichletChar(self.modulus, [k * a for a in self.exponents])

    def inverse(self) -> "DirichletChar":
        return self ** -1

    def __eq__(self, other):
        if not isinstance(other, DirichletChar):
            return NotImplemented
        return self.modulus == other.modulus and self.exponents == other.exponents

    def __hash__(self):
        return hash((self.modulus, self.exponents))

    def __lt__(self, other):
        return (self.modulus, self.exponents) < (other.modulus, other.exponents)

    # Changing the modulus
    def extend(self, M: int) -> "DirichletChar":
        """The character mod M (a multiple of N) induced from this one"""
        if M % self.modulus:
            raise ValueError(f"Cannot extend a character mod {self.modulus} to modulus {M}")
        return DirichletChar.from_function(M, lambda a: self.exponent(a % self.modulus))

    def restrict(self, d: int) -> "DirichletChar":
        """The character mod d (conductor | d | N) inducing this one"""
        if self.modulus % d or d % self.conductor:
            raise ValueError(f"Modulus {d} is not between the conductor {self.conductor} and {self.modulus}")
        return DirichletChar.from_function(d, lambda a: self.exponent(lift_unit(self.modulus, d, a)))

    def primitive(self) -> "DirichletChar":
        return self.restrict(self.conductor)

    def local_components(self) -> dict:
        """Map p -> the component of chi at the prime power p^e || N (as a character mod p^e)"""
        components = {}
        for p, e in sorted(factorint(self.modulus).items()):
            q = p ** e
            components[p] = DirichletChar.from_function(
                q, lambda a, q=q: self.exponent(_crt_lift(self.modulus, q, a)))
        return components

    def local_orders(self) -> dict:
        return {p: chi.order for p, chi in self.local_components().items()}

    def label(self) -> str:
        """The p_a label: local order a at each prime p dividing N"""
        if self.modulus == 1:
            return "1_1"
        return " ".join(f"{p}_{a}" for p, a in self.local_orders().items())

    def prime_to_part(self, p: int) -> "DirichletChar":
        """The factor of chi whose order is prime to p (chi = chi_p * chi_p')"""
        m = self.order
        m_prime = m
        while m_prime % p == 0:
            m_prime //= p
        p_power = m // m_prime
        # u = 1 mod m' and u = 0 mod p^a
        u = (p_power * pow(p_power, -1, m_prime)) % m if m_prime > 1 else 0
        return self ** u

    def galois_orbit(self) -> list:
        m = self.order
        return sorted({self ** a for a in range(1, m + 1) if gcd(a, m) == 1}, key=lambda c: c.key)

    def to_json(self) -> dict:
        return {"modulus": self.modulus, "key": list(self.exponents), "label": self.label(),
                "order": self.order, "conductor": self.conductor, "parity": self.parity()}

    @classmethod
    def from_json(cls, payload: dict) -> "DirichletChar":
        return cls(payload["modulus"], payload["key"])

    def __repr__(self):
        return f"DirichletChar({self.modulus}, {list(self.exponents)}, '{self.label()}')"


def kronecker(D: int, m: int) -> int:
    """Kronecker symbol (D/m) for m >= 1"""
    if m < 1:
        raise ValueError(f"Kronecker symbol needs a positive lower argument, got {m}")
    result = 1
    while m % 2 == 0:
        if D % 2 == 0:
            return 0
        result *= 1 if D % 8 in (1, 7) else -1
        m //= 2
    if m == 1:
        return result
    if gcd(D, m) != 1:
        return 0
    return result * int(jacobi_symbol(D % m, m))


def quadratic_character(D: int, N: int) -> DirichletChar:
    """a -> (D/a) as a character mod N (N must be a multiple of |D|)"""
    if N % abs(D):
        raise ValueError(f"(D/.) with D = {D} is not defined modulo {N}")
    return DirichletChar.from_function(N, lambda a: Fraction(0) if kronecker(D, a) == 1 else Fraction(1, 2))


@dataclass
class ConjugacyClass:
    """A Galois orbit of characters under chi -> chi^a"""
    representative: DirichletChar
    members: list

    @property
    def size(self) -> int:
        return len(self.members)

    def label(self) -> str:
        return self.representative.label()


def all_characters(N: int) -> list:
    """Every Dirichlet character mod N, ordered by canonical key"""
    group = unit_group(N)
    return [DirichletChar(N, exps) for exps in product(*(range(o) for o in group.orders))]


def odd_characters(N: int) -> list:
    return [chi for chi in all_characters(N) if chi.is_odd()]


def conjugacy_classes(chars) -> list:
    """Partition characters into Galois orbits; representatives have the smallest key"""
    remaining = set(chars)
    seen = set()
    classes = []
    for chi in sorted(remaining, key=lambda c: (c.modulus, c.key)):
        if chi in seen:
            continue
        orbit = [c for c in chi.galois_orbit() if c in remaining]
        seen.update(orbit)
        classes.append(ConjugacyClass(orbit[0], orbit))
    return classes


_LABEL_TOKEN = re.compile(r"^(\d+)_(\d+)$")


def parse_label(label: str) -> dict:
    """Parse '3_2 13_2' into {3: 2, 13: 2}"""
    orders = {}
    for token in label.split():
        match = _LABEL_TOKEN.match(token)
        if not match:
            raise ValueError(f"Malformed character label token '{token}' in '{label}'")
        orders[int(match.group(1))] = int(match.group(2))
    return orders


def from_local_label(label: str, N: int) -> list:
    """All characters mod N whose local orders match the p_a label"""
    orders = parse_label(label)
    factorization = factorint(N)
    for p, a in orders.items():
        if p not in factorization:
            raise ValueError(f"Label '{label}' names {p}, which does not divide {N}")
        q = p ** factorization[p]
        if int(totient(q)) % a:
            raise ValueError(f"No character of order {a} at level {q}")
    wanted = {p: orders.get(p, 1) for p in factorization}
    matches = [chi for chi in all_characters(N) if chi.local_orders() == wanted]
    logger.debug(f"Label '{label}' at modulus {N}: {len(matches)} characters")
    return matches


class ReducedChar:
    """chi composed with reduction modulo a prime ideal lambda"""

    def __init__(self, chi: DirichletChar, ideal: PrimeIdeal):
        self.chi = chi
        self.ideal = ideal
        self._values = tuple(reduce(CycNumber.root_of_unity(ideal.n, t), ideal)
                             for t in chi.values_on_generators)

    @property
    def key(self) -> tuple:
        return tuple(v.coeffs for v in self._values)

    def __call__(self, a: int) -> ResidueElement:
        return reduce(self.chi.value(a, self.ideal.n), self.ideal)

    def __eq__(self, other):
        return isinstance(other, ReducedChar) and self.ideal == other.ideal and self.key == other.key

    def __hash__(self):
        return hash((self.ideal, self.key))


def reduce_char(chi: DirichletChar, ideal: PrimeIdeal) -> ReducedChar:
    """The mod-lambda character obtained by reducing the values of chi"""
    if chi.modulus % ideal.p == 0:
        raise ValueError(f"Prime {ideal.p} divides the modulus {chi.modulus}")
    if chi.order % ideal.p == 0:
        raise ValueError(f"Prime {ideal.p} divides the order {chi.order}")
    if ideal.n % chi.order:
        raise ValueError(f"Q(zeta_{ideal.n}) does not contain the values of a character of order {chi.order}")
    return ReducedChar(chi, ideal)
