"""
Modular Symbols Module
Weight-2 Manin symbols for Gamma1(N) with character: cuspidal subspace, Hecke action and q-expansion lattices
"""

from collections import defaultdict
from fractions import Fraction
from functools import lru_cache
from math import gcd
import logging
import sys
import os

from sympy import divisors, factorint, primerange, totient

# Add config to path
sys.path.append(os.path.join(os.path.dirname(__file__), '..'))
from config.settings import *
from src.cyclotomic import CycNumber, PrimeIdeal
from src.dirichlet import DirichletChar, gcdex
from src.linalg import left_kernel, reduce_vector, rref, sparse_echelon
from src.qseries import CoefficientRing, PrecisionError, QLattice, QSeries, reduce_lattice

# Setup logging
logging.basicConfig(level=getattr(logging, LOG_LEVEL), format=LOG_FORMAT)
logger = logging.getLogger(__name__)


# ---------------------------------------------------------------------------
# Geometry of Gamma1(N)
# ---------------------------------------------------------------------------

def index_gamma0(N: int) -> int:
    """[SL2(Z) : Gamma0(N)]"""
    index = N
    for p in factorint(N):
        index = index * (p + 1) // p
    return index


def index_gamma1(N: int) -> int:
    """[SL2(Z) : Gamma1(N)] = N^2 prod (1 - 1/p^2)"""
    index = N * N
    for p in factorint(N):
        index = index * (p * p - 1) // (p * p)
    return index


def degree_omega(N: int) -> Fraction:
    """Degree of the Hodge bundle on X1(N)"""
    return Fraction(index_gamma1(N), 24)


def cusp_count(N: int) -> int:
    """Number of cusps of X1(N) for N >= 5"""
    return sum(int(totient(d)) * int(totient(N // d)) for d in divisors(N)) // 2


def sturm_bound(N: int, weight: int = 2) -> int:
    """Forms of this weight on Gamma0(N) with character vanishing to order beyond this are zero"""
    return weight * index_gamma0(N) // 12


def genus_x1(N: int) -> int:
    """Genus of X1(N); X1(N) has no elliptic points once N >= 5"""
    if N < 5:
        return 0
    return 1 + index_gamma1(N) // 24 - cusp_count(N) // 2


# chi(x) is a root of unity of order 1, 2, 3 or 6 on the solutions summed below
_REAL_PARTS = {Fraction(0): Fraction(1), Fraction(1, 2): Fraction(-1), Fraction(1, 3): Fraction(-1, 2),
               Fraction(2, 3): Fraction(-1, 2), Fraction(1, 6): Fraction(1, 2), Fraction(5, 6): Fraction(1, 2)}


def _root_sum(chi: DirichletChar, polynomial) -> Fraction:
    N = chi.modulus
    return sum((_REAL_PARTS[chi.exponent(x)] for x in range(N) if polynomial(x) % N == 0), Fraction(0))


def cusp_form_dimension(N: int, chi: DirichletChar) -> int:
    """dim S_2(N, chi) by the Cohen-Oesterle formula"""
    if chi.modulus != N:
        raise ValueError(f"Character modulus {chi.modulus} differs from level {N}")
    if chi.is_odd() or genus_x1(N) == 0:
        return 0
    conductor = chi.conductor
    local = 1
    for p, r in factorint(N).items():
        s = factorint(conductor).get(p, 0)
        if 2 * s <= r:
            local *= p ** (r // 2) + p ** (r // 2 - 1) if r % 2 == 0 else 2 * p ** (r // 2)
        else:
            local *= 2 * p ** (r - s)
    dimension = (Fraction(index_gamma0(N), 12) - Fraction(local, 2)
                 - _root_sum(chi, lambda x: x * x + 1) / 4 - _root_sum(chi, lambda x: x * x + x + 1) / 3)
    if chi.is_trivial():
        dimension += 1
    if dimension.denominator != 1:
        raise ArithmeticError(f"Dimension formula gave {dimension} at level {N}")
    return int(dimension)


# ---------------------------------------------------------------------------
# Manin symbol combinatorics
# ---------------------------------------------------------------------------

@lru_cache(maxsize=None)
def merel_matrices(n: int) -> tuple:
    """Matrices (a, b, c, d) with a > b >= 0, d > c >= 0 and ad - bc = n"""
    matrices = []
    for a in range(1, n + 1):
        for d in range(1, n + 2 - a):
            m = a * d - n
            if m < 0:
                continue
            if m == 0:
                matrices.extend((a, 0, c, d) for c in range(d))
                matrices.extend((a, b, 0, d) for b in range(1, a))
                continue
            for b in divisors(m):
                if b >= a:
                    break
                c = m // b
                if c < d:
                    matrices.append((a, b, c, d))
    return tuple(matrices)


def lift_to_sl2(c: int, d: int, N: int) -> tuple:
    """A matrix (a, b, c', d') in SL2(Z) whose bottom row is (c, d) mod N"""
    c %= N
    d %= N
    if c == 0:
        c = N
    while gcd(c, d) != 1:
        d += N
    x, y, _ = gcdex(d, -c)
    # x*d - y*c = 1, so the matrix [[x, y], [c, d]] has determinant 1
    return x, y, c, d


def cusp_key(u: int, v: int, N: int) -> tuple:
    """Canonical label of the Gamma1(N)-class of the cusp u/v"""
    keys = []
    for s in (1, -1):
        g = gcd(s * v, N)
        keys.append(((s * v) % N, (s * u) % g))
    return min(keys)


def prime_to_p_subgroup(N: int, p: int) -> tuple:
    """Units mod N of order prime to p"""
    phi = int(totient(N))
    power = 1
    while phi % p == 0:
        phi //= p
        power *= p
    return tuple(sorted({pow(a, power, N) for a in range(N) if gcd(a, N) == 1}))


class ModSymSpace:
    """Cuspidal weight-2 modular symbols for Gamma1(N) on which <h> acts as chi(h) for h in H

    H defaults to all of (Z/NZ)^x; for the mod-p grouping it is the prime-to-p part,
    which makes the space the sum over all characters agreeing with chi on H.
    """

    def __init__(self, level: int, character: DirichletChar, order: int = None, subgroup=None):
        self.level = level
        self.character = character
        N = level
        self.order = order or character.order
        self.subgroup = tuple(subgroup) if subgroup is not None else tuple(
            a for a in range(N) if gcd(a, N) == 1)
        self.ring = CoefficientRing.cyclotomic(self.order)
        self._zeta = [CycNumber.zeta(self.order, k) for k in range(self.order)]
        self._scalar = {h: self._exponent(h) for h in self.subgroup}
        self._hecke = {}
        self._diamond = {}

        self._build_symbols()
        self._solve_relations()
        self._build_boundary()
        logger.info(f"Modular symbols N={N} chi={character.label()}: {len(self.reps)} orbits, "
                    f"{len(self.free)} free, cuspidal dimension {self.dimension}")

    # Scalars are stored as exponents k meaning zeta_n^k
    def _exponent(self, h: int) -> int:
        t = self.character.exponent(h)
        value = t * self.order
        if value.denominator != 1:
            raise ValueError(f"Values of {self.character.label()} on H do not lie in Q(zeta_{self.order})")
        return int(value) % self.order

    def _orbits(self, points, act):
        """Assign each point (rep index, exponent) or None when the orbit is killed"""
        assignment = {}
        reps = []
        for point in points:
            if point in assignment:
                continue
            members = {}
            killed = False
            for h in self.subgroup:
                k = self._scalar[h]
                # -I fixes every modular symbol
                for image in (act(point, h), act(point, -h)):
                    if image in members:
                        killed = killed or members[image] != k
                    else:
                        members[image] = k
            if killed:
                for image in members:
                    assignment[image] = None
                continue
            rep = min(members)
            # point = h0^-1 rep, so x(image) = chi(h) chi(h0)^-1 x(rep)
            shift = members[rep]
            index = len(reps)
            reps.append(rep)
            for image, k in members.items():
                assignment[image] = (index, (k - shift) % self.order)
        return assignment, reps

    def _build_symbols(self):
        N = self.level
        points = [(c, d) for c in range(N) for d in range(N) if gcd(gcd(c, d), N) == 1]
        assignment, self.reps = self._orbits(
            points, lambda s, h: ((h * s[0]) % N, (h * s[1]) % N))
        self._symbol = assignment

    def symbol(self, c: int, d: int):
        """(rep index, exponent) of the Manin symbol (c, d), None when it vanishes"""
        N = self.level
        return self._symbol.get((c % N, d % N))

    def _relation_row(self, symbols) -> dict:
        row = {}
        for c, d in symbols:
            entry = self.symbol(c, d)
            if entry is None:
                continue
            index, k = entry
            row[index] = row.get(index, self.ring.zero()) + self._zeta[k]
        return row

    def _solve_relations(self):
        relations = []
        for c, d in self.reps:
            relations.append(self._relation_row([(c, d), (d, -c)]))
            relations.append(self._relation_row([(c, d), (d, -c - d), (-c - d, c)]))
        pivots = sparse_echelon(relations)
        self.free = [i for i in range(len(self.reps)) if i not in pivots]
        position = {i: j for j, i in enumerate(self.free)}
        # Each rep as a combination of free reps
        self._express = []
        for i in range(len(self.reps)):
            if i in position:
                self._express.append({position[i]: self.ring.one()})
            else:
                self._express.append({position[k]: -x for k, x in pivots[i].items() if k != i})

    def _vector(self, counts) -> list:
        """Dense free-coordinate vector of sum count * zeta^k * x(rep)"""
        vector = [self.ring.zero() for _ in self.free]
        for (index, k), count in counts.items():
            if not count:
                continue
            scalar = self._zeta[k] * count
            for j, x in self._express[index].items():
                vector[j] = vector[j] + scalar * x
        return vector

    # Boundary
    def _cusp_class(self, u: int, v: int):
        N = self.level
        key = cusp_key(u, v, N)
        if key not in self._cusps:
            members = {}
            killed = False
            for h in self.subgroup:
                image = cusp_key(u * pow(h, -1, N) if N > 1 else 0, v * h, N)
                k = self._scalar[h]
                if image in members:
                    killed = killed or members[image] != k
                else:
                    members[image] = k
            if killed:
                for image in members:
                    self._cusps[image] = None
            else:
                rep = min(members)
                index = len(self.cusp_reps)
                self.cusp_reps.append(rep)
                shift = members[rep]
                for image, k in members.items():
                    self._cusps[image] = (index, (k - shift) % self.order)
        return self._cusps[key]

    def _build_boundary(self):
        self._cusps = {}
        self.cusp_reps = []
        images = []
        for i in self.free:
            c, d = self.reps[i]
            a, b, c1, d1 = lift_to_sl2(c, d, self.level)
            # delta(g{0, oo}) = [g oo] - [g 0] = [a/c] - [b/d]
            image = defaultdict(lambda: self.ring.zero())
            for (u, v), sign in (((a, c1), 1), ((b, d1), -1)):
                entry = self._cusp_class(u, v)
                if entry is not None:
                    index, k = entry
                    image[index] = image[index] + self._zeta[k] * sign
            images.append(image)
        width = len(self.cusp_reps)
        matrix = [[image.get(j, self.ring.zero()) for j in range(width)] for image in images]
        if not self.free:
            kernel = []
        elif width == 0:
            kernel = [[self.ring.one() if i == j else self.ring.zero() for j in range(len(self.free))]
                      for i in range(len(self.free))]
        else:
            kernel = left_kernel(matrix, width)
        self.cuspidal, self._cuspidal_pivots = rref(kernel, len(self.free)) if kernel else ([], [])

    @property
    def dimension(self) -> int:
        return len(self.cuspidal)

    # Hecke and diamond operators
    def _on_cuspidal(self, free_images: dict) -> list:
        """Matrix (rows = images of cuspidal basis vectors) in cuspidal coordinates"""
        matrix = []
        width = len(self.free)
        for row in self.cuspidal:
            image = [self.ring.zero() for _ in range(width)]
            for j, x in enumerate(row):
                if x:
                    for col, y in enumerate(free_images[j]):
                        if y:
                            image[col] = image[col] + x * y
            coordinates, remainder = reduce_vector(self.cuspidal, self._cuspidal_pivots, image)
            if any(remainder):
                raise ArithmeticError(f"Operator does not preserve the cuspidal subspace at level {self.level}")
            matrix.append(coordinates)
        return matrix

    def hecke_matrix(self, p: int) -> list:
        """T_p (U_p when p | N) on the cuspidal subspace, via Merel's matrices"""
        if p not in self._hecke:
            N = self.level
            merel = merel_matrices(p)
            images = {}
            for j, i in enumerate(self.free):
                c, d = self.reps[i]
                counts = defaultdict(int)
                for a, b, cc, dd in merel:
                    entry = self._symbol.get(((c * a + d * cc) % N, (c * b + d * dd) % N))
                    if entry is not None:
                        counts[entry] += 1
                images[j] = self._vector(counts)
            self._hecke[p] = self._on_cuspidal(images)
            logger.debug(f"Computed T_{p} at level {N} ({len(merel)} Merel matrices)")
        return self._hecke[p]

    def diamond_matrix(self, d: int) -> list:
        """<d> on the cuspidal subspace; a scalar matrix when d lies in H"""
        N = self.level
        d %= N
        if gcd(d, N) != 1:
            raise ValueError(f"<{d}> needs gcd({d}, {N}) = 1")
        if d not in self._diamond:
            size = self.dimension
            if d in self._scalar:
                scalar = self._zeta[self._scalar[d]]
                self._diamond[d] = [[scalar if i == j else self.ring.zero() for j in range(size)]
                                    for i in range(size)]
            else:
                images = {}
                for j, i in enumerate(self.free):
                    c, e = self.reps[i]
                    counts = defaultdict(int)
                    entry = self._symbol.get(((d * c) % N, (d * e) % N))
                    if entry is not None:
                        counts[entry] += 1
                    images[j] = self._vector(counts)
                self._diamond[d] = self._on_cuspidal(images)
        return self._diamond[d]

    def hecke_prime_power(self, p: int, k: int) -> list:
        """T_{p^k} from T_{p^(j+1)} = T_p T_{p^j} - p <p> T_{p^(j-1)}"""
        size = self.dimension
        identity = [[self.ring.one() if i == j else self.ring.zero() for j in range(size)] for i in range(size)]
        if k == 0:
            return identity
        previous, current = identity, self.hecke_matrix(p)
        diamond = self.diamond_matrix(p) if k > 1 and self.level % p else None
        for _ in range(k - 1):
            following = _matmul(current, self.hecke_matrix(p))
            if diamond is not None:
                correction = _matmul(previous, diamond)
                following = [[x - y * p for x, y in zip(r1, r2)] for r1, r2 in zip(following, correction)]
            previous, current = current, following
        return current

    def hecke_images(self, vector, precision: int) -> list:
        """[T_n v for 1 <= n < precision], v in cuspidal coordinates"""
        powers = {}
        images = [None, list(vector)]
        for n in range(2, precision):
            w = list(vector)
            for p, k in sorted(factorint(n).items()):
                if (p, k) not in powers:
                    powers[(p, k)] = self.hecke_prime_power(p, k)
                w = _vecmul(w, powers[(p, k)], self.ring)
            images.append(w)
        return images[1:]

    def __repr__(self):
        return f"ModSymSpace(N={self.level}, chi={self.character.label()}, dim={self.dimension})"


def _matmul(a, b):
    size = len(b[0]) if b else 0
    result = []
    for row in a:
        out = [None] * size
        for j in range(size):
            total = None
            for x, brow in zip(row, b):
                if x and brow[j]:
                    total = x * brow[j] if total is None else total + x * brow[j]
            out[j] = total if total is not None else row[0] * 0
        result.append(out)
    return result


def _vecmul(vector, matrix, ring: CoefficientRing):
    size = len(matrix[0]) if matrix else 0
    result = [ring.zero() for _ in range(size)]
    for x, row in zip(vector, matrix):
        if x:
            for j, y in enumerate(row):
                if y:
                    result[j] = result[j] + x * y
    return result


# ---------------------------------------------------------------------------
# Public operations
# ---------------------------------------------------------------------------

def build_space(N: int, chi: DirichletChar, order: int = None, subgroup=None) -> ModSymSpace:
    """Cuspidal modular symbols of weight 2 for Gamma1(N) with character chi"""
    if N < 1:
        raise ValueError(f"Level must be positive, got {N}")
    if chi.modulus != N:
        if N % chi.modulus:
            raise ValueError(f"Character modulus {chi.modulus} does not divide the level {N}")
        chi = chi.extend(N)
    if chi.is_odd():
        logger.info(f"Odd character {chi.label()} at level {N}: weight-2 space is zero")
    return ModSymSpace(N, chi, order, subgroup)


def hecke(space: ModSymSpace, ell: int) -> list:
    """Matrix of T_ell (U_ell when ell | N) on the cuspidal subspace"""
    return space.hecke_matrix(ell)


def qexp_basis(space: ModSymSpace, precision: int) -> QLattice:
    """Saturated echelon lattice of q-expansions of S_2 on [1, precision)"""
    if space.dimension == 0:
        return QLattice.zero(space.order, 1, max(precision, 1))
    bound = sturm_bound(space.level)
    if precision <= bound:
        raise PrecisionError(f"Precision {precision} does not exceed the Sturm bound {bound} at level {space.level}")
    if space.dimension % 2:
        raise ArithmeticError(f"Odd cuspidal symbol dimension {space.dimension} at level {space.level}")
    target = space.dimension // 2
    window = precision - 1
    echelon, pivots = [], []
    for i in range(space.dimension):
        v = [space.ring.one() if j == i else space.ring.zero() for j in range(space.dimension)]
        images = space.hecke_images(v, precision)
        candidates = [[w[j] for w in images] for j in range(space.dimension)]
        echelon, pivots = rref(echelon + candidates, window)
        if len(pivots) >= target:
            break
    if len(pivots) != target:
        raise PrecisionError(f"Recovered rank {len(pivots)} of {target} at precision {precision}")
    series = [QSeries(space.ring, row, 1, precision) for row in echelon]
    lattice = QLattice.from_series(series, space.order, 1, precision)
    logger.info(f"q-expansion basis at level {space.level}: rank {lattice.rank} to O(q^{precision})")
    return lattice


def qexp_basis_modp(N: int, chi: DirichletChar, ideal: PrimeIdeal, precision: int) -> list:
    """Reduction mod lambda of the weight-2 lattice for the characters agreeing with chi off the p-part"""
    p = ideal.p
    if p == 2 or N % p == 0 or ideal.n % p == 0:
        raise ValueError(f"Prime {p} must be odd and prime to the level {N} and to {ideal.n}")
    chi_rep = chi.prime_to_part(p)
    if ideal.n % chi_rep.order:
        raise ValueError(f"Q(zeta_{ideal.n}) does not contain the values of {chi_rep.label()}")
    space = build_space(N, chi_rep, ideal.n, prime_to_p_subgroup(N, p))
    return reduce_lattice(qexp_basis(space, precision), ideal)
