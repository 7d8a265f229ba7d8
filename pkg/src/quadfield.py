"""
Quadratic Field Module
Rings of integers of quadratic fields: ideals, units, class groups and ray class groups with signs
"""

from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property, lru_cache
from itertools import product
from math import isqrt, pi, sqrt
import logging
import sys
import os

from sympy import factorint, primerange

# Add config to path
sys.path.append(os.path.join(os.path.dirname(__file__), '..'))
from config.settings import *
from src.dirichlet import kronecker
from src.linalg import IntegerLattice, character_group, evaluate_character, group_order, triangular_presentation

# Setup logging
logging.basicConfig(level=getattr(logging, LOG_LEVEL), format=LOG_FORMAT)
logger = logging.getLogger(__name__)


def is_fundamental_discriminant(D: int) -> bool:
    if D in (0, 1):
        return False
    if D % 4 == 1:
        return all(e == 1 for e in factorint(abs(D)).values())
    if D % 4 == 0:
        m = D // 4
        return m % 4 in (2, 3) and all(e == 1 for e in factorint(abs(m)).values())
    return False


def fundamental_discriminants(N: int) -> list:
    """Fundamental discriminants D (either sign) with |D| dividing N, by decreasing |D|"""
    found = []
    for d in range(N, 2, -1):
        if N % d == 0:
            found.extend(D for D in (-d, d) if is_fundamental_discriminant(D))
    return found


@lru_cache(maxsize=None)
def reduced_forms(D: int) -> tuple:
    """Reduced positive definite forms (a, b, c) of discriminant D < 0"""
    if D >= 0 or D % 4 not in (0, 1):
        raise ValueError(f"{D} is not a negative discriminant")
    forms = []
    a = 1
    while 3 * a * a <= -D:
        for b in range(-a + 1, a + 1):
            if (b * b - D) % (4 * a):
                continue
            c = (b * b - D) // (4 * a)
            if c < a or (b < 0 and a == c):
                continue
            forms.append((a, b, c))
        a += 1
    return tuple(forms)


@dataclass(frozen=True, order=True)
class Ideal:
    """The Z-module A Z + (B + C omega) Z in Hermite form (0 <= B < A, C | A, C | B)"""
    A: int
    B: int
    C: int

    @property
    def norm(self) -> int:
        return self.A * self.C

    def describe(self) -> str:
        return f"[{self.A}, {self.B} + {self.C}w]"

    def to_json(self) -> list:
        return [self.A, self.B, self.C]


class QuadField:
    """Q(sqrt D) for a fundamental discriminant D; elements of O are pairs (a, b) = a + b omega"""

    def __init__(self, D: int):
        if not is_fundamental_discriminant(D):
            raise ValueError(f"{D} is not a fundamental discriminant")
        self.D = D
        self.delta = D % 2
        self.n0 = (D - self.delta) // 4      # omega^2 = delta omega + n0

    def __repr__(self):
        return f"QuadField({self.D})"

    def __eq__(self, other):
        return isinstance(other, QuadField) and self.D == other.D

    def __hash__(self):
        return hash(self.D)

    @property
    def is_real(self) -> bool:
        return self.D > 0

    @property
    def places(self) -> tuple:
        """Real places (embedding sqrt D -> +sqrt D, -sqrt D)"""
        return (0, 1) if self.is_real else ()

    # Element arithmetic
    def mul(self, x, y) -> tuple:
        a, b = x
        c, d = y
        return a * c + b * d * self.n0, a * d + b * c + b * d * self.delta

    def conj(self, x) -> tuple:
        a, b = x
        return a + b * self.delta, -b

    def norm(self, x) -> int:
        a, b = x
        return a * a + a * b * self.delta - b * b * self.n0

    def power(self, x, k: int) -> tuple:
        result = (1, 0)
        for _ in range(k):
            result = self.mul(result, x)
        return result

    def sign(self, x, place: int) -> int:
        """Sign of x under the real embedding at the given place"""
        a, b = x
        u = 2 * a + b * self.delta
        v = b if place == 0 else -b
        if u >= 0 and v >= 0:
            return 1 if (u or v) else 0
        if u <= 0 and v <= 0:
            return -1
        # u + v sqrt D with opposite signs
        if u > 0:
            return 1 if u * u > v * v * self.D else -1
        return 1 if v * v * self.D > u * u else -1

    def embed(self, x, place: int = 0) -> float:
        a, b = x
        root = sqrt(abs(self.D))
        return a + b * (self.delta + (root if place == 0 else -root)) / 2

    # Units
    @cached_property
    def fundamental_unit(self) -> tuple:
        """Smallest unit > 1, the product of the complete quotients over one period of omega's expansion"""
        if not self.is_real:
            raise ValueError("Imaginary quadratic fields have no fundamental unit of infinite order")
        D = self.D
        d = isqrt(D)
        b = d if (d - D) % 2 == 0 else d - 1
        start = (b, 2)
        P, Q = start
        x, y = Fraction(1), Fraction(0)          # x + y sqrt D
        while True:
            x, y = (x * P + y * D) / Q, (x + y * P) / Q
            a = (P + d) // Q
            P = a * Q - P
            Q = (D - P * P) // Q
            if (P, Q) == start:
                break
        # sqrt D = 2 omega - delta
        unit = (x - y * self.delta, 2 * y)
        if any(c.denominator != 1 for c in unit):
            raise ArithmeticError(f"Continued fraction unit for D = {D} is not integral")
        unit = (int(unit[0]), int(unit[1]))
        if abs(self.norm(unit)) != 1:
            raise ArithmeticError(f"Continued fraction unit for D = {D} has norm {self.norm(unit)}")
        return unit

    @property
    def torsion_unit(self) -> tuple:
        """Generator of the roots of unity in O"""
        if self.D in (-3, -4):
            return (0, 1)
        return (-1, 0)

    def unit_generators(self) -> list:
        if self.is_real:
            return [(-1, 0), self.fundamental_unit]
        return [self.torsion_unit]

    # Ideals
    def ideal(self, generators) -> Ideal:
        """O-ideal generated by the given elements"""
        lattice = IntegerLattice(2)
        for g in generators:
            for h in (g, self.mul(g, (0, 1))):
                if any(h):
                    lattice.add_vector([h[1], h[0]])
        if lattice.rank != 2:
            raise ValueError("The zero ideal has no Hermite form")
        (C, B), (_, A) = lattice.hermite_basis()
        return Ideal(A, B, C)

    def unit_ideal(self) -> Ideal:
        return Ideal(1, 0, 1)

    def basis(self, I: Ideal) -> list:
        return [(I.A, 0), (I.B, I.C)]

    def ideal_mul(self, I: Ideal, J: Ideal) -> Ideal:
        return self.ideal([self.mul(x, y) for x in self.basis(I) for y in self.basis(J)])

    def ideal_pow(self, I: Ideal, k: int) -> Ideal:
        result = self.unit_ideal()
        for _ in range(k):
            result = self.ideal_mul(result, I)
        return result

    def ideal_conj(self, I: Ideal) -> Ideal:
        return self.ideal([self.conj(x) for x in self.basis(I)])

    def ideal_add(self, I: Ideal, elements) -> Ideal:
        return self.ideal(self.basis(I) + list(elements))

    def divide(self, I: Ideal, P: Ideal) -> Ideal:
        """I / P for a prime P dividing I"""
        product_ideal = self.ideal_mul(I, self.ideal_conj(P))
        n = P.norm
        if product_ideal.A % n or product_ideal.B % n or product_ideal.C % n:
            raise ValueError(f"{P.describe()} does not divide {I.describe()}")
        return Ideal(product_ideal.A // n, product_ideal.B // n, product_ideal.C // n)

    def contains(self, I: Ideal, x) -> bool:
        a, b = x
        if b % I.C:
            return False
        return (a - (b // I.C) * I.B) % I.A == 0

    def divides(self, P: Ideal, I: Ideal) -> bool:
        return all(self.contains(P, x) for x in self.basis(I))

    def residue(self, x, I: Ideal) -> tuple:
        """Canonical representative of x modulo I"""
        a, b = x
        k = b // I.C
        return (a - k * I.B) % I.A, b - k * I.C

    def is_unit_mod(self, x, I: Ideal) -> bool:
        return self.ideal_add(I, [x]).norm == 1

    def _roots_mod(self, ell: int) -> list:
        return [r for r in range(ell) if (r * r - self.delta * r - self.n0) % ell == 0]

    @lru_cache(maxsize=None)
    def primes_above(self, ell: int) -> tuple:
        """Prime ideals above the rational prime ell (one, or two conjugates when ell splits)"""
        if self.D % ell == 0:
            r = self._roots_mod(ell)[0]
            return (self.ideal([(ell, 0), (-r, 1)]),)
        if kronecker(self.D, ell) == 1:
            return tuple(sorted(self.ideal([(ell, 0), (-r, 1)]) for r in self._roots_mod(ell)))
        return (self.ideal([(ell, 0)]),)

    def splitting(self, ell: int) -> str:
        if self.D % ell == 0:
            return "ramified"
        return "split" if kronecker(self.D, ell) == 1 else "inert"

    def ideals_of_norm(self, m: int) -> list:
        """Every ideal of norm m"""
        local_lists = []
        for ell, k in sorted(factorint(m).items()):
            kind = self.splitting(ell)
            primes = self.primes_above(ell)
            if kind == "split":
                P1, P2 = primes
                local = [self.ideal_mul(self.ideal_pow(P1, i), self.ideal_pow(P2, k - i)) for i in range(k + 1)]
            elif kind == "ramified":
                local = [self.ideal_pow(primes[0], k)]
            else:
                local = [self.ideal_pow(primes[0], k // 2)] if k % 2 == 0 else []
            local_lists.append(local)
        ideals = []
        for combination in product(*local_lists):
            current = self.unit_ideal()
            for I in combination:
                current = self.ideal_mul(current, I)
            ideals.append(current)
        return sorted(ideals)

    def principal_generator(self, I: Ideal):
        """A generator of I when it is principal, otherwise None"""
        n = I.norm
        D = self.D
        targets = (n, -n) if self.is_real else (n,)
        if self.is_real:
            eps = abs(self.embed(self.fundamental_unit))
            bound = int(2 * sqrt(n * eps) / (I.C * sqrt(D))) + 2
        else:
            bound = isqrt(4 * n // (I.C * I.C * -D)) + 1
        for y in range(-bound, bound + 1):
            b0 = y * I.C
            for t in targets:
                disc = b0 * b0 * D + 4 * t
                if disc < 0:
                    continue
                s = isqrt(disc)
                if s * s != disc:
                    continue
                for numerator in (-b0 * self.delta + s, -b0 * self.delta - s):
                    if numerator % 2:
                        continue
                    a0 = numerator // 2
                    if (a0 - y * I.B) % I.A == 0:
                        return a0, b0
        return None

    def equivalent(self, I: Ideal, J: Ideal) -> bool:
        return self.principal_generator(self.ideal_mul(I, self.ideal_conj(J))) is not None

    @property
    def minkowski_bound(self) -> float:
        if self.is_real:
            return sqrt(self.D) / 2
        return 2 * sqrt(-self.D) / pi

    def class_number(self) -> int:
        return class_group(self).order


@dataclass
class ClassGroup:
    """Class group with generators prime to a given integer, found by equivalence scans"""
    quadratic_field: QuadField
    generators: list = field(default_factory=list)
    orders: list = field(default_factory=list)
    relations: list = field(default_factory=list)
    relation_generators: list = field(default_factory=list)   # (beta, M): prod p^r = (beta / M)
    elements: list = field(default_factory=list)              # (ideal, exponents)

    @property
    def order(self) -> int:
        return len(self.elements)

    def dlog(self, I: Ideal) -> tuple:
        exponents = self._lookup(I)
        if exponents is not None:
            return exponents
        raise ArithmeticError(f"Ideal {I.describe()} is in no known class of Q(sqrt {self.quadratic_field.D})")

    def _lookup(self, I: Ideal):
        for representative, exponents in self.elements:
            if self.quadratic_field.equivalent(I, representative):
                return exponents
        return None

    def add_generator(self, g: Ideal) -> bool:
        """Extend the presentation by g; False when g is already in the subgroup"""
        F = self.quadratic_field
        if self._lookup(g) is not None:
            return False
        power, k = g, 1
        while True:
            power = F.ideal_mul(power, g)
            k += 1
            previous = self._lookup(power)
            if previous is not None:
                break
        # g^k prod p_j^(-e_j) = (beta / M)
        J = F.ideal_pow(g, k)
        M = 1
        for p_j, e_j in zip(self.generators, previous):
            J = F.ideal_mul(J, F.ideal_pow(F.ideal_conj(p_j), e_j))
            M *= p_j.norm ** e_j
        beta = F.principal_generator(J)
        if beta is None:
            raise ArithmeticError(f"Relation ideal {J.describe()} should be principal")
        self.relations = [r + [0] for r in self.relations]
        self.relations.append([-e for e in previous] + [k])
        self.relation_generators.append((beta, M))
        powers = [F.unit_ideal()]
        for _ in range(k - 1):
            powers.append(F.ideal_mul(powers[-1], g))
        self.elements = [(F.ideal_mul(x, powers[j]), e + (j,)) for x, e in self.elements for j in range(k)]
        self.generators.append(g)
        self.orders.append(k)
        return True


def _generator_candidates(F: QuadField, avoid: int):
    for ell in primerange(2, 10 ** 6):
        if avoid % ell == 0 or F.splitting(ell) == "inert":
            continue
        for P in F.primes_above(ell):
            yield P


@lru_cache(maxsize=None)
def _full_class_number(D: int) -> int:
    F = QuadField(D)
    if D < 0:
        return len(reduced_forms(D))
    group = ClassGroup(F, elements=[(F.unit_ideal(), ())])
    for ell in primerange(2, int(F.minkowski_bound) + 1):
        for P in F.primes_above(ell):
            group.add_generator(P)
    return group.order


@lru_cache(maxsize=None)
def _class_group(D: int, avoid: int) -> ClassGroup:
    F = QuadField(D)
    target = _full_class_number(D)
    group = ClassGroup(F, elements=[(F.unit_ideal(), ())])
    candidates = _generator_candidates(F, avoid)
    while group.order < target:
        group.add_generator(next(candidates))
    logger.debug(f"Class group of Q(sqrt {D}) (avoiding {avoid}): orders {group.orders}")
    return group


def class_group(F: QuadField, avoid: int = 1) -> ClassGroup:
    """Class group of F with generators coprime to avoid"""
    return _class_group(F.D, avoid)


class RayClassGroup:
    """Ray class group modulo c times a set of real places, as Z^(s+t) modulo relations

    The first s coordinates are exponents of class group generators, the last t
    are discrete logarithms in U = (O/c)^x x {+-1}^places.
    """

    def __init__(self, F: QuadField, modulus: Ideal, places: tuple = ()):
        self.field = F
        self.modulus = modulus
        self.places = tuple(places)
        self.class_group = class_group(F, modulus.norm)
        c = modulus
        identity = (F.residue((1, 0), c), (1,) * len(self.places))

        def multiply(x, y):
            return (F.residue(F.mul(x[0], y[0]), c), tuple(a * b for a, b in zip(x[1], y[1])))

        candidates = []
        for a in range(c.A):
            for b in range(c.C):
                if F.is_unit_mod((a, b), c):
                    candidates.append(((a, b), identity[1]))
        for j in range(len(self.places)):
            flip = tuple(-1 if i == j else 1 for i in range(len(self.places)))
            candidates.append((identity[0], flip))
        self._multiply = multiply
        self.unit_generators, unit_relations, self._unit_dlog = triangular_presentation(candidates, multiply, identity)
        s = len(self.class_group.generators)
        t = len(self.unit_generators)
        self.rank = s + t

        relations = [[0] * s + list(r) for r in unit_relations]
        for u in F.unit_generators():
            relations.append([0] * s + list(self.unit_dlog(self.image(u))))
        for r, (beta, M) in zip(self.class_group.relations, self.class_group.relation_generators):
            image = self.unit_dlog(self.image(beta, M))
            relations.append(list(r) + [-x for x in image])
        self.relations = relations

    def image(self, x, M: int = 1) -> tuple:
        """Image of x / M in U, for M a positive integer prime to the modulus"""
        F, c = self.field, self.modulus
        residue = F.residue(x, c)
        if M != 1 and c.A > 1:
            residue = F.residue(F.mul(residue, (pow(M, -1, c.A), 0)), c)
        signs = tuple(F.sign(x, place) for place in self.places)
        return residue, signs

    def unit_dlog(self, u) -> tuple:
        logs = self._unit_dlog.get(u)
        if logs is None:
            raise ArithmeticError(f"{u} is not a unit modulo {self.modulus.describe()}")
        return logs

    def dlog(self, I: Ideal) -> tuple:
        """Coordinates of the ray class of an ideal prime to the modulus"""
        F = self.field
        exponents = self.class_group.dlog(I)
        J, M = I, 1
        for p, e in zip(self.class_group.generators, exponents):
            J = F.ideal_mul(J, F.ideal_pow(F.ideal_conj(p), e))
            M *= p.norm ** e
        beta = F.principal_generator(J)
        if beta is None:
            raise ArithmeticError(f"{J.describe()} should be principal")
        return tuple(exponents) + tuple(self.unit_dlog(self.image(beta, M)))

    def dlog_integer(self, a: int) -> tuple:
        """Coordinates of the principal ideal (a) for a positive integer a prime to the modulus"""
        return (0,) * len(self.class_group.generators) + tuple(self.unit_dlog(self.image((a, 0))))

    def characters(self) -> list:
        """All characters, as vectors w with psi(v) = exp(2 pi i w.v)"""
        return character_group(self.relations, self.rank)

    def order(self) -> int:
        return group_order(self.relations, self.rank)

    def local_kernel(self, P: Ideal) -> list:
        """U-coordinates generating the kernel of reduction from the modulus to modulus / P"""
        F, c = self.field, self.modulus
        smaller = F.divide(c, P)
        kernel = []
        for a in range(c.A):
            for b in range(c.C):
                x = (a, b)
                if F.contains(smaller, (a - 1, b)) and F.is_unit_mod(x, c):
                    kernel.append(self.unit_dlog((F.residue(x, c), (1,) * len(self.places))))
        return kernel

    def has_exact_conductor(self, w) -> bool:
        """psi does not factor through a smaller modulus (finite or infinite part)"""
        F, c = self.field, self.modulus
        s = len(self.class_group.generators)
        for ell in factorint(c.norm):
            for P in F.primes_above(ell):
                if not F.divides(P, c):
                    continue
                if all(evaluate_character(w, (0,) * s + tuple(u)) == 0 for u in self.local_kernel(P)):
                    return False
        for j in range(len(self.places)):
            flip = tuple(-1 if i == j else 1 for i in range(len(self.places)))
            identity = F.residue((1, 0), c)
            if evaluate_character(w, (0,) * s + tuple(self.unit_dlog((identity, flip)))) == 0:
                return False
        return True
