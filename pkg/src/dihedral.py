"""
Dihedral Forms Module
Counts odd irreducible representations induced from ray class characters of quadratic fields, with q-expansions
"""

from dataclasses import dataclass, field
from fractions import Fraction
from math import floor
import logging
import sys
import os

from sympy import factorint, primerange

# Add config to path
sys.path.append(os.path.join(os.path.dirname(__file__), '..'))
from config.settings import *
from src.cyclotomic import CycNumber
from src.dirichlet import DirichletChar, kronecker, lcm, unit_group
from src.linalg import evaluate_character
from src.modsym import degree_omega
from src.qseries import CoefficientRing, QSeries
from src.quadfield import Ideal, QuadField, RayClassGroup, fundamental_discriminants

# Setup logging
logging.basicConfig(level=getattr(logging, LOG_LEVEL), format=LOG_FORMAT)
logger = logging.getLogger(__name__)


@dataclass
class RayClassCharacter:
    """psi on the ray class group modulo conductor * places, as a vector w with psi(v) = exp(2 pi i w.v)"""
    group: RayClassGroup
    w: tuple

    @property
    def quadratic_field(self) -> QuadField:
        return self.group.field

    @property
    def conductor(self) -> Ideal:
        return self.group.modulus

    @property
    def places(self) -> tuple:
        return self.group.places

    @property
    def order(self) -> int:
        result = 1
        for x in self.w:
            result = lcm(result, Fraction(x).denominator)
        return result

    def is_trivial(self) -> bool:
        return not any(self.w)

    def exponent(self, P: Ideal):
        """psi(P) as an exponent in Q/Z, or None when P divides the conductor"""
        F = self.quadratic_field
        if self.conductor.norm > 1 and F.divides(P, self.conductor):
            return None
        return evaluate_character(self.w, self.group.dlog(P))

    def exponent_of_integer(self, a: int) -> Fraction:
        return evaluate_character(self.w, self.group.dlog_integer(a))

    def is_conjugate_invariant(self) -> bool:
        """psi = psi o sigma, i.e. the induced representation is reducible"""
        F, c, group = self.quadratic_field, self.conductor, self.group
        if F.ideal_conj(c) != c:
            return False
        swapped = tuple(1 - place for place in self.places)
        if set(swapped) != set(self.places):
            return False
        s = len(group.class_group.generators)
        for i, p in enumerate(group.class_group.generators):
            if evaluate_character(self.w, group.dlog(F.ideal_conj(p))) != Fraction(self.w[i]) % 1:
                return False
        for j, (residue, signs) in enumerate(group.unit_generators):
            by_place = dict(zip(self.places, signs))
            image = (F.residue(F.conj(residue), c), tuple(by_place[1 - place] for place in self.places))
            if evaluate_character(self.w, (0,) * s + tuple(group.unit_dlog(image))) != Fraction(self.w[s + j]) % 1:
                return False
        return True

    def determinant(self, N: int) -> DirichletChar:
        """det Ind(psi) as a character mod N: a -> chi_D(a) psi((a))"""
        D = self.quadratic_field.D
        return DirichletChar.from_function(
            N, lambda a: (Fraction(0) if kronecker(D, a) == 1 else Fraction(1, 2)) + self.exponent_of_integer(a))

    def label(self) -> str:
        places = "".join("+-"[p] for p in self.places)
        suffix = f" inf{places}" if places else ""
        return f"Q(sqrt {self.quadratic_field.D}) c={self.conductor.describe()}{suffix} w={[str(x) for x in self.w]}"

    def to_json(self) -> dict:
        return {"discriminant": self.quadratic_field.D, "conductor": self.conductor.to_json(),
                "places": list(self.places), "w": [str(x) for x in self.w], "order": self.order}


@dataclass
class DihedralRep:
    """Ind(psi) from a quadratic field, with its Frobenius trace fingerprint"""
    source: RayClassCharacter
    level: int
    det: DirichletChar
    fingerprint: tuple = field(default_factory=tuple)

    @property
    def order(self) -> int:
        """Coefficients lie in Q(zeta_order)"""
        return lcm(lcm(self.source.order, self.det.order), 2)

    def trace(self, ell: int) -> CycNumber:
        return local_coefficients(self, ell, ell + 1)[1]

    def traces(self) -> list:
        """(ell, a_ell) over the fingerprint primes"""
        return [(ell, self.trace(ell)) for ell, _ in self.fingerprint]

    def to_json(self) -> dict:
        return {"level": self.level, "character": self.det.to_json(), "source": self.source.to_json(),
                "traces": [[ell, str(a)] for ell, a in self.traces()]}


def enumerate_fields(N: int) -> list:
    """(QuadField, norm budget N/|D|) for every fundamental discriminant D with |D| | N"""
    return [(QuadField(D), N // abs(D)) for D in fundamental_discriminants(N)]


def _place_sets(F: QuadField, signs: str) -> list:
    if not F.is_real:
        return [()]
    if signs == "odd":
        return [(0,), (1,)]
    return [(), (0,), (1,), (0, 1)]


def ray_class_characters(F: QuadField, norm: int, signs: str = "odd") -> list:
    """Characters of exact conductor c * places with N(c) = norm

    signs is "odd" (exactly one real place ramified, as odd induced representations need)
    or "all"; imaginary fields have no real places.
    """
    characters = []
    for c in F.ideals_of_norm(norm):
        for places in _place_sets(F, signs):
            group = RayClassGroup(F, c, places)
            for w in group.characters():
                if group.has_exact_conductor(w):
                    characters.append(RayClassCharacter(group, w))
    return characters


def _fingerprint(psi: RayClassCharacter, N: int, bound: int) -> tuple:
    """Frobenius eigenvalue exponents at good primes; equal fingerprints mean equal traces"""
    F = psi.quadratic_field
    entries = []
    for ell in primerange(2, bound + 1):
        if N % ell == 0:
            continue
        if F.splitting(ell) == "split":
            entries.append((ell, tuple(sorted(psi.exponent(P) for P in F.primes_above(ell)))))
        else:
            entries.append((ell, ()))
    return tuple(entries)


def count_dihedral(N: int, chi: DirichletChar) -> tuple:
    """Number of odd irreducible induced representations of conductor N and determinant chi, with the reps"""
    chi = chi.extend(N) if chi.modulus != N else chi
    if not chi.is_odd():
        return 0, []
    bound = floor(FINGERPRINT_FACTOR * degree_omega(N)) if N >= 5 else 0
    reps, seen = [], set()
    for F, norm in enumerate_fields(N):
        for c in F.ideals_of_norm(norm):
            for places in _place_sets(F, "odd"):
                group = RayClassGroup(F, c, places)
                generator_logs = [group.dlog_integer(g) for g in unit_group(N).generators]
                for w in group.characters():
                    # Cheap determinant test on the generators of (Z/N)^x first
                    exponents = [(Fraction(0) if kronecker(F.D, g) == 1 else Fraction(1, 2))
                                 + evaluate_character(w, logs)
                                 for g, logs in zip(unit_group(N).generators, generator_logs)]
                    if tuple(x % 1 for x in exponents) != chi.values_on_generators:
                        continue
                    psi = RayClassCharacter(group, w)
                    if not group.has_exact_conductor(w) or psi.is_conjugate_invariant():
                        continue
                    fingerprint = _fingerprint(psi, N, bound)
                    if fingerprint in seen:
                        continue
                    seen.add(fingerprint)
                    reps.append(DihedralRep(psi, N, chi, fingerprint))
    logger.info(f"Level {N}, character {chi.label()}: {len(reps)} dihedral representation(s)")
    return len(reps), reps


def local_coefficients(rep: DihedralRep, ell: int, precision: int) -> list:
    """[a_1, a_ell, a_ell^2, ...] for powers of ell below precision, from the ideals above ell"""
    psi = rep.source
    F = psi.quadratic_field
    n = rep.order
    values = []
    for P in F.primes_above(ell):
        t = psi.exponent(P)
        values.append(CycNumber.zero(n) if t is None else CycNumber.root_of_unity(n, t))
    coeffs = [CycNumber.one(n)]
    kind = F.splitting(ell)
    k = 1
    while ell ** k < precision:
        if kind == "split":
            x1, x2 = values
            total = CycNumber.zero(n)
            for i in range(k + 1):
                total = total + x1 ** i * x2 ** (k - i)
            coeffs.append(total)
        elif kind == "inert":
            # N((ell)) = ell^2
            coeffs.append(values[0] ** (k // 2) if k % 2 == 0 else CycNumber.zero(n))
        else:
            coeffs.append(values[0] ** k)
        k += 1
    return coeffs


def dihedral_qexp(rep: DihedralRep, precision: int) -> QSeries:
    """sum over ideals a prime to the conductor of psi(a) q^N(a), to O(q^precision)"""
    n = rep.order
    coeffs = [CycNumber.zero(n) for _ in range(max(precision, 1))]
    if precision > 1:
        coeffs[1] = CycNumber.one(n)
    local = {ell: local_coefficients(rep, ell, precision) for ell in primerange(2, precision)}
    for m in range(2, precision):
        factors = factorint(m)
        ell = min(factors)
        k = factors[ell]
        coeffs[m] = coeffs[m // ell ** k] * local[ell][k]
    return QSeries(CoefficientRing.cyclotomic(n), coeffs, 0, precision)
