"""
Weight One Engine Module
Certified spaces of weight-1 cusp forms: bounds from dihedral forms and multiplier quotients, holomorphy certificates, eigenforms and mod-p exceptions
"""

from dataclasses import dataclass, field, replace
from fractions import Fraction
from math import floor, gcd
import logging
import sys
import os
import threading

from sympy import divisor_count, divisors, factorint, isprime

# Add config to path
sys.path.append(os.path.join(os.path.dirname(__file__), '..'))
from config.settings import *
from src.auxforms import Multiplier, multiplier_pool
from src.cyclotomic import PrimeIdeal, factor_prime, prime_to_part
from src.dihedral import count_dihedral
from src.dirichlet import DirichletChar, conjugacy_classes, from_local_label, lcm, odd_characters
from src.heckefield import decompose
from src.linalg import left_kernel
from src.modsym import (build_space, cusp_count, cusp_form_dimension, degree_omega, genus_x1, index_gamma1,
                        qexp_basis, qexp_basis_modp)
from src.qseries import CoefficientRing, PrecisionError, QLattice, QSeries, ResidueSpace, div, intersect

# Setup logging
logging.basicConfig(level=getattr(logging, LOG_LEVEL), format=LOG_FORMAT)
logger = logging.getLogger(__name__)


class InsufficientMultipliersError(ValueError):
    """Fewer than two usable weight-1 multipliers at this level"""


class WeightTwoDimensionError(ArithmeticError):
    """Modular-symbol rank disagrees with the weight-2 dimension formula"""


# ---------------------------------------------------------------------------
# Geometry and vanishing
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class GeometryFacts:
    level: int
    index: int
    deg_omega: Fraction
    cusp_count: int

    @property
    def deg_cusp_twist(self) -> Fraction:
        """Degree of omega(-cusps); negative forces S_1 = 0"""
        return self.deg_omega - self.cusp_count

    @property
    def genus(self) -> int:
        return genus_x1(self.level)

    @classmethod
    def from_level(cls, N: int) -> "GeometryFacts":
        return cls(N, index_gamma1(N), degree_omega(N), cusp_count(N))

    def to_json(self) -> dict:
        return {"level": self.level, "index": self.index, "deg_omega": str(self.deg_omega),
                "cusp_count": self.cusp_count, "genus": self.genus, "deg_cusp_twist": str(self.deg_cusp_twist)}


def geometry(N: int) -> GeometryFacts:
    return GeometryFacts.from_level(N)


@dataclass(frozen=True)
class ZeroCertificate:
    level: int
    via_level: int
    deg_cusp_twist: Fraction
    reason: str

    def to_json(self) -> dict:
        return {"level": self.level, "via_level": self.via_level,
                "deg_cusp_twist": str(self.deg_cusp_twist), "reason": self.reason}


def trivial_vanishing(N: int):
    """A certificate that S_1(N) = 0 from degrees alone, or None"""
    if N <= 4:
        facts = geometry(12)
        return ZeroCertificate(N, 12, facts.deg_cusp_twist,
                               f"level {N} divides 12 and omega(-cusps) has degree {facts.deg_cusp_twist} on X1(12)")
    facts = geometry(N)
    if facts.deg_cusp_twist < 0:
        return ZeroCertificate(N, N, facts.deg_cusp_twist,
                               f"omega(-cusps) has degree {facts.deg_cusp_twist} on X1({N})")
    return None


def certification_precision(N: int) -> int:
    """Coefficients needed to certify h^2 against weight 2: 4 deg(omega) + 1"""
    return floor((2 + 2 * AUXILIARY_WEIGHT) * degree_omega(max(N, 1))) + 1


def working_order(chi: DirichletChar) -> int:
    return lcm(chi.order, 2)


# ---------------------------------------------------------------------------
# Weight-2 lattices and multiplier quotients
# ---------------------------------------------------------------------------

_WEIGHT_TWO_CACHE = {}
_WEIGHT_TWO_LOCK = threading.Lock()


def weight_two_lattice(N: int, chi: DirichletChar, order: int, precision: int, cache=None) -> QLattice:
    """Saturated lattice of S_2(N, chi) over Z[zeta_order] on [1, precision)"""
    key = (N, chi, order, precision)
    with _WEIGHT_TWO_LOCK:
        if key in _WEIGHT_TWO_CACHE:
            return _WEIGHT_TWO_CACHE[key]
    lattice = None
    if cache is not None:
        payload = cache.get("weight2", N, chi.key, order, precision)
        if payload is not None:
            lattice = QLattice.from_json(payload)
    if lattice is None:
        lattice = qexp_basis(build_space(N, chi, order), precision)
        expected = cusp_form_dimension(N, chi)
        if lattice.rank != expected:
            raise WeightTwoDimensionError(f"Level {N}, character {chi.label()}: weight-2 rank {lattice.rank} "
                                          f"differs from the dimension formula value {expected}")
        if cache is not None:
            cache.put("weight2", N, chi.key, order, precision, payload=lattice.to_json())
    with _WEIGHT_TWO_LOCK:
        _WEIGHT_TWO_CACHE[key] = lattice
    return lattice


def _vanishing_combinations(rows: list, width: int) -> list:
    """Combinations of the rows whose first width entries vanish"""
    if not rows:
        return []
    if width <= 0:
        return rows
    kernel = left_kernel([row[:width] for row in rows], width)
    combinations = []
    for x in kernel:
        vector = None
        for c, row in zip(x, rows):
            if c:
                scaled = [c * y for y in row]
                vector = scaled if vector is None else [a + b for a, b in zip(vector, scaled)]
        if vector is not None:
            combinations.append(vector)
    return combinations


def cusp_part(lattice: QLattice) -> QLattice:
    """Members of the lattice without terms below q^1, on the window [1, prec)"""
    if lattice.start >= 1:
        return lattice
    width = 1 - lattice.start
    rows = [[s[e] for e in range(lattice.start, lattice.prec)] for s in lattice.echelon_basis()]
    series = [QSeries(lattice.ring, vector[width:], 1, lattice.prec)
              for vector in _vanishing_combinations(rows, width)]
    return QLattice.from_series(series, lattice.order, 1, lattice.prec)


def quotient_lattice(weight_two: QLattice, multiplier: Multiplier, prec: int) -> QLattice:
    """saturate(S_2 / f) cut down to cusp forms on [1, prec)"""
    f = multiplier.series
    if f.ring.order != weight_two.order:
        f = f.lift(weight_two.order)
    vf = f.valuation
    quotients = [div(g, f).truncate(prec) for g in weight_two.echelon_basis()]
    start = min(1, 1 - vf)
    if not quotients:
        return QLattice.zero(weight_two.order, 1, prec)
    return cusp_part(QLattice.from_series(quotients, weight_two.order, start, prec))


@dataclass
class CandidateSpace:
    """V = intersection of the multiplier quotients, with torsion bookkeeping"""
    lattice: QLattice
    torsion_gcd: int
    torsion_orders: list = field(default_factory=list)      # (multiplier label, torsion order)
    multipliers_used: list = field(default_factory=list)
    flagged_primes: frozenset = field(default_factory=frozenset)

    @property
    def rank(self) -> int:
        return self.lattice.rank

    def __iter__(self):
        yield self.lattice
        yield self.torsion_gcd


def _multiplier_precision(precision: int, multipliers: list) -> int:
    vmax = max((m.valuation or 0) for m in multipliers) if multipliers else 0
    return precision + vmax


def candidate_space(N: int, chi: DirichletChar, multipliers: list, precision: int,
                    lower_bound: int = None, cache=None) -> CandidateSpace:
    """Intersect saturate(S_2(N, chi psi) / f) over multipliers f in the given order"""
    if not chi.is_odd():
        raise ValueError(f"Weight-1 forms need an odd character, {chi.label()} is even")
    minimum = certification_precision(N)
    if precision < minimum:
        raise PrecisionError(f"Candidate precision {precision} is below {minimum} at level {N}")
    order = working_order(chi)
    usable = [m for m in multipliers if not m.series.is_zero() and (chi * m.character).is_even()]
    if len(usable) < 2:
        raise InsufficientMultipliersError(f"Only {len(usable)} usable multiplier(s) at level {N}")
    weight_two_precision = _multiplier_precision(precision, usable)

    lattice = None
    torsion_gcd = 0
    orders, used = [], []
    flagged = set()
    stable = 0
    for m in usable:
        if m.series.prec is not None and m.series.prec < weight_two_precision + (m.valuation or 0):
            raise PrecisionError(f"Multiplier {m.label} known to O(q^{m.series.prec}) is too short")
        weight_two = weight_two_lattice(N, chi * m.character, order, weight_two_precision, cache)
        quotient = quotient_lattice(weight_two, m, precision)
        used.append(m.label)
        flagged |= m.flagged_primes
        if lattice is None:
            lattice = quotient
            logger.debug(f"Level {N}: first multiplier {m.label} gives rank {quotient.rank}")
            continue
        previous = lattice.rank
        lattice, report = intersect(lattice, quotient)
        torsion = report.order_norm * report.cokernel_torsion
        orders.append((m.label, torsion))
        torsion_gcd = gcd(torsion_gcd, torsion)
        stable = stable + 1 if lattice.rank == previous else 0
        logger.debug(f"Level {N}: after {m.label} rank {lattice.rank} (torsion {torsion})")
        if lattice.rank == 0:
            break
        if lower_bound is not None and stable >= STABLE_RANK_ROUNDS and lattice.rank == lower_bound:
            break
    logger.info(f"Level {N}, character {chi.label()}: candidate rank {lattice.rank} "
                f"from {len(used)} multipliers, torsion gcd {torsion_gcd}")
    return CandidateSpace(lattice, torsion_gcd or 1, orders, used, frozenset(flagged))


# ---------------------------------------------------------------------------
# Certification and precision extension
# ---------------------------------------------------------------------------

def certify_holomorphic(h: QSeries, N: int, chi: DirichletChar, k: int = AUXILIARY_WEIGHT,
                        precision: int = None, cache=None) -> bool:
    """True iff h^2 matches a weight-2 cusp form with character chi^2 to O(q^precision)

    With precision > (2 + 2k) deg(omega) a match forces h^2 to be that form,
    so h is holomorphic; a mismatch shows h has a pole.
    """
    bound = (2 + 2 * k) * degree_omega(N)
    precision = precision or certification_precision(N)
    if precision <= bound:
        raise PrecisionError(f"Certification precision {precision} must exceed {bound}")
    if h.prec is None or h.prec < precision:
        raise PrecisionError(f"Series known to O(q^{h.prec}) cannot be certified at O(q^{precision})")
    order = h.ring.order
    target = weight_two_lattice(N, chi ** 2, order, precision, cache)
    square = (h * h).truncate(precision)
    return target.in_span(square)


def _pick_extension_multiplier(pool: list, chi: DirichletChar, p: int = None) -> Multiplier:
    usable = [m for m in pool if (chi * m.character).is_even() and (p is None or m.usable_at(p))]
    if not usable:
        raise InsufficientMultipliersError("No multiplier is usable for precision extension")
    # chi psi trivial keeps the weight-2 space smallest
    usable.sort(key=lambda m: (not (chi * m.character).is_trivial(), m.kind != "eisenstein", m.valuation))
    return usable[0]


def extend_precision(h: QSeries, N: int, chi: DirichletChar, target: int, cache=None) -> QSeries:
    """Recover h to O(q^target) from h f in weight 2, dividing the weight-2 match by f again

    h may have characteristic-zero or residue-field coefficients. The match must be
    unique: every echelon pivot of the weight-2 space has to lie below the known precision.
    """
    if h.prec is None:
        return h.truncate(target)
    ideal = h.ring.ideal
    order = ideal.n if ideal is not None else h.ring.order
    pool = multiplier_pool(N, order, 2 * target + N)
    f = _pick_extension_multiplier(pool, chi, ideal.p if ideal is not None else None)
    psi = chi * f.character
    vf = f.valuation
    f_series = f.series.reduce(ideal) if ideal is not None else f.series.lift(order)
    known = h.prec + vf
    g = (h * f_series).truncate(known)
    extended_precision = target + vf

    if ideal is not None:
        space = ResidueSpace(h.ring, 1, extended_precision, qexp_basis_modp(N, psi, ideal, extended_precision))
        basis, pivots = space.basis(), space.pivots()
    else:
        lattice = weight_two_lattice(N, psi, order, extended_precision, cache)
        basis, pivots = lattice.echelon_basis(), lattice.pivots()
    if pivots and max(pivots) >= known:
        raise PrecisionError(f"Weight-2 pivot q^{max(pivots)} lies beyond the {known} known coefficients; "
                             f"supply more coefficients of h")
    extended = QSeries.zero(h.ring, extended_precision)
    for b, e in zip(basis, pivots):
        c = g[e]
        if c:
            extended = extended + b.scale(c)
    if not extended.agrees_with(g, known):
        raise ValueError(f"h times {f.label} is not in the weight-2 space at level {N}")
    result = div(extended, f_series).truncate(target)
    logger.info(f"Extended a level {N} expansion from O(q^{h.prec}) to O(q^{result.prec})")
    return result


# ---------------------------------------------------------------------------
# Eigenforms and old/new bookkeeping
# ---------------------------------------------------------------------------

def eigen_decompose(lattice: QLattice, N: int, chi: DirichletChar) -> list:
    """Eigen-systems of a certified weight-1 space; multiplicity one means new"""
    if lattice.rank == 0:
        return []
    basis = lattice.echelon_basis()
    return decompose(basis, lattice.pivots(), chi, N, lattice.order)


def newform_dimension(N: int, chi: DirichletChar, dimension_of) -> int:
    """dim S_1^new from dim S_1(M, chi_M) = sum_{M' | M} sigma0(M / M') dim S_1^new(M', chi_M')"""
    conductor = chi.conductor
    levels = [M for M in divisors(N) if M % conductor == 0]
    new = {}
    for M in levels:
        old = sum(int(divisor_count(M // Mp)) * new[Mp] for Mp in levels if Mp < M and M % Mp == 0)
        new[M] = dimension_of(M, chi.restrict(M)) - old
    return new[N]


def dihedral_lower_bound(N: int, chi: DirichletChar) -> tuple:
    """Dihedral forms at every level between the conductor and N, counted with oldform multiplicity"""
    total = 0
    reps = []
    for M in divisors(N):
        if M % chi.conductor or M < 3:
            continue
        count, found = count_dihedral(M, chi.restrict(M))
        total += int(divisor_count(N // M)) * count
        reps.extend(found)
    return total, reps


# ---------------------------------------------------------------------------
# Mod-p exceptions
# ---------------------------------------------------------------------------

@dataclass
class ModpException:
    p: int
    ideal: PrimeIdeal
    character: DirichletChar
    extra_dimension: int
    classification: str
    certified: bool
    advisory: str = None
    forms: list = field(default_factory=list)

    def normalized_forms(self) -> list:
        """Extra forms scaled to leading coefficient 1; representatives modulo the reduced space"""
        return [w.scale(w.ring.one() / w.leading_coefficient()) for w in self.forms if not w.is_zero()]

    def to_json(self) -> dict:
        return {"p": self.p, "ideal": self.ideal.describe(), "character": self.character.label(),
                "prime_to_p_character": self.character.prime_to_part(self.p).label(),
                "extra_dimension": self.extra_dimension, "classification": self.classification,
                "certified": self.certified, "advisory": self.advisory,
                "forms": [str(s) for s in self.normalized_forms()]}


def _odd_primes_dividing(n: int) -> set:
    if n <= 1:
        return set()
    return {p for p in factorint(n, limit=SMALL_PRIME_BOUND) if p != 2 and isprime(p)}


def suspect_primes(candidate: CandidateSpace, N: int, override=()) -> list:
    """Odd primes prime to N in the torsion gcd, recurring in the torsion orders or skipped by a multiplier"""
    counts = {}
    for _, order in candidate.torsion_orders:
        for p in _odd_primes_dividing(order):
            counts[p] = counts.get(p, 0) + 1
    suspects = {p for p, c in counts.items() if c >= MIN_MULTIPLIERS_PER_PRIME}
    suspects |= _odd_primes_dividing(candidate.torsion_gcd)
    suspects |= set(candidate.flagged_primes)
    suspects |= set(override)
    return sorted(p for p in suspects if p != 2 and N % p)


def _residue_cusp_part(space: ResidueSpace) -> ResidueSpace:
    if space.start >= 1:
        return space
    width = 1 - space.start
    series = [QSeries(space.ring, vector[width:], 1, space.prec)
              for vector in _vanishing_combinations(space.echelon, width)]
    return ResidueSpace(space.ring, 1, space.prec, series)


def _reduce_space(lattice: QLattice, ideal: PrimeIdeal, prec: int) -> ResidueSpace:
    ring = CoefficientRing.residue(ideal)
    series = [s.truncate(prec).reduce(ideal) for s in lattice.series()]
    return ResidueSpace(ring, 1, prec, series)


def _depleted(series: QSeries, ell: int) -> QSeries:
    """Drop the terms q^m with ell | m"""
    return QSeries(series.ring, [c if (series.start + i) % ell else series.ring.zero()
                                 for i, c in enumerate(series.coeffs)], series.start, series.prec)


def modp_scan(N: int, chi: DirichletChar, suspects, certified_space, precision: int = None,
              check_double_level: bool = True) -> list:
    """Compare mod-lambda candidate spaces with reductions of certified characteristic-zero spaces

    certified_space(level, character) returns the certified S_1 lattice (or None when
    it is unresolved). Extra mod-lambda forms are certified by squaring and classified
    as CHARACTER_LIFT when reductions at other characters account for them.
    """
    exceptions = []
    P0 = precision or certification_precision(N) + WORKING_PRECISION_MARGIN
    C = certification_precision(N)
    for p in sorted(set(suspects)):
        if p == 2 or N % p == 0:
            logger.info(f"Level {N}: skipping p = {p} (characteristic 2 and p | N are out of scope)")
            continue
        chi_rep = chi.prime_to_part(p)
        n_p = prime_to_part(working_order(chi), p)
        pool = [m for m in multiplier_pool(N, n_p, 2 * P0 + N) if m.usable_at(p)]
        usable = [m for m in pool if (chi_rep * m.character).is_even()]
        if len(usable) < MIN_MULTIPLIERS_PER_PRIME:
            logger.warning(f"Level {N}: only {len(usable)} multipliers usable at p = {p}")
            continue
        vmax = max(m.valuation for m in usable)
        congruent = [c for c in odd_characters(N) if c.prime_to_part(p) == chi_rep]

        for ideal in factor_prime(p, n_p):
            ring = CoefficientRing.residue(ideal)
            candidates = None
            for m in usable:
                weight_two = qexp_basis_modp(N, chi_rep * m.character, ideal, P0 + vmax)
                f_bar = m.series.reduce(ideal)
                quotients = [div(g, f_bar).truncate(P0) for g in weight_two]
                space = _residue_cusp_part(ResidueSpace(ring, min(1, 1 - m.valuation), P0, quotients))
                candidates = space if candidates is None else candidates.intersect(space)

            own = certified_space(N, chi)
            if own is None:
                logger.warning(f"Level {N}: characteristic-zero space unresolved, skipping p = {p}")
                continue
            reduced_own = _reduce_space(own, ideal, P0)
            extra = candidates.dimension - reduced_own.dimension
            if extra <= 0:
                logger.info(f"Level {N}, {ideal.describe()}: no extra mod-p forms")
                continue

            reduced_all = ResidueSpace(ring, 1, P0)
            for other in congruent:
                lattice = certified_space(N, other)
                if lattice is not None:
                    reduced_all = reduced_all + _reduce_space(lattice, ideal, P0)
            classification = NON_LIFTABLE if candidates.dimension > reduced_all.dimension else CHARACTER_LIFT

            complement = reduced_own
            forms = []
            for b in candidates.basis():
                if b not in complement:
                    forms.append(b)
                    complement = complement + ResidueSpace(ring, 1, P0, [b])
            square_space = ResidueSpace(ring, 1, C, qexp_basis_modp(N, chi_rep ** 2, ideal, C))
            certified = all((w * w).truncate(C) in square_space for w in forms)

            advisory = None
            if classification == NON_LIFTABLE and check_double_level:
                advisory = _double_level_advisory(N, chi_rep, ideal, forms, certified_space, P0)
            exceptions.append(ModpException(p, ideal, chi, extra, classification, certified, advisory, forms))
            logger.info(f"Level {N}, {ideal.describe()}: {extra} extra form(s), {classification}, "
                        f"certified {certified}")
    return exceptions


def _double_level_advisory(N: int, chi_rep: DirichletChar, ideal: PrimeIdeal, forms: list,
                           certified_space, prec: int):
    """Look for characteristic-zero forms at level 2N whose reductions agree away from 2"""
    M = 2 * N
    p = ideal.p
    ring = CoefficientRing.residue(ideal)
    target = chi_rep.extend(M)
    depleted = []
    for other in odd_characters(M):
        if other.prime_to_part(p) != target.prime_to_part(p):
            continue
        lattice = certified_space(M, other)
        if lattice is None or lattice.rank == 0:
            continue
        for s in lattice.series():
            depleted.append(_depleted(s.truncate(prec).reduce(ideal), 2))
    space = ResidueSpace(ring, 1, prec, depleted)
    if forms and all(_depleted(w, 2) in space for w in forms):
        return f"reductions of level {M} forms match away from 2; a conductor-raising lift exists at level {M}"
    return None


# ---------------------------------------------------------------------------
# Reports and the engine
# ---------------------------------------------------------------------------

@dataclass
class WeightOneReport:
    level: int
    character: DirichletChar
    status: str
    lower_bound: int = 0
    upper_bound: int = 0
    certified_dim: int = None
    new_dim: int = None
    precision: int = None
    torsion_gcd: int = 1
    class_size: int = 1
    multipliers_used: list = field(default_factory=list)
    eigenforms: list = field(default_factory=list)
    modp_exceptions: list = field(default_factory=list)
    dihedral: list = field(default_factory=list)
    zero_certificate: ZeroCertificate = None
    notes: list = field(default_factory=list)
    modp_scanned: bool = False

    @property
    def label(self) -> str:
        return self.character.label()

    @property
    def dimension(self) -> int:
        return self.certified_dim if self.certified_dim is not None else -1

    @property
    def is_resolved(self) -> bool:
        return self.certified_dim is not None

    @property
    def full_level_dimension(self) -> int:
        """Contribution of the whole Galois class to dim S_1(N)"""
        return self.class_size * self.dimension if self.is_resolved else -1

    def to_row(self) -> dict:
        """Dimension-table row; newform dimension, -1 when unresolved"""
        dimension = self.new_dim if self.new_dim is not None else -1
        return {"N": self.level, "character": self.label, "dimension": dimension}

    def to_json(self) -> dict:
        return {
            "level": self.level,
            "character": self.character.to_json(),
            "class_size": self.class_size,
            "status": self.status,
            "lower_bound": self.lower_bound,
            "upper_bound": self.upper_bound,
            "certified_dim": self.certified_dim,
            "new_dim": self.new_dim,
            "full_level_dim": self.full_level_dimension,
            "precision": self.precision,
            "torsion_gcd": str(self.torsion_gcd),
            "multipliers": self.multipliers_used,
            "dihedral": [rep.to_json() for rep in self.dihedral],
            "eigenforms": [form.to_json() for form in self.eigenforms],
            "modp_exceptions": [e.to_json() for e in self.modp_exceptions],
            "modp_scanned": self.modp_scanned,
            "zero_certificate": self.zero_certificate.to_json() if self.zero_certificate else None,
            "notes": self.notes,
        }


class WeightOneEngine:
    """Runs the sandwich per (N, chi) and keeps certified spaces for mod-p comparisons"""

    def __init__(self, precision="auto", certify: bool = True, modp: bool = False,
                 suspect_primes=(), cache=None, eigenforms: bool = True):
        self.precision = precision
        self.certify = certify
        self.modp = modp
        self.suspects = tuple(suspect_primes)
        self.cache = cache
        self._want_eigenforms = eigenforms
        self._spaces = {}
        self._reports = {}
        self._candidates = {}
        self._lock = threading.RLock()

    def _precision_for(self, N: int) -> int:
        minimum = certification_precision(N)
        if self.precision == "auto":
            return minimum + WORKING_PRECISION_MARGIN
        if self.precision < minimum and self.certify:
            raise PrecisionError(f"Explicit precision {self.precision} is below {minimum} needed at level {N}")
        return max(self.precision, minimum)

    def certified_space(self, N: int, chi: DirichletChar):
        """Certified S_1(N, chi) lattice, or None when unresolved"""
        key = (N, chi)
        with self._lock:
            if key in self._spaces:
                return self._spaces[key]
        report = self.compute(N, chi, scan=False)
        with self._lock:
            if report.certified_dim is None:
                self._spaces[key] = None
            return self._spaces.get(key)

    def _new_dimension(self, N: int, chi: DirichletChar, dimension: int):
        """Newform dimension, or None if some lower level is unresolved"""
        if dimension == 0:
            return 0

        def dimension_of(M: int, character: DirichletChar) -> int:
            if M == N:
                return dimension
            lower = self.compute(M, character, scan=False)
            if lower.certified_dim is None:
                raise ArithmeticError(f"Level {M} is unresolved")
            return lower.certified_dim

        try:
            return newform_dimension(N, chi, dimension_of)
        except ArithmeticError as e:
            logger.warning(f"Level {N}, character {chi.label()}: newform dimension unknown ({e})")
            return None

    def _multipliers(self, N: int, order: int, precision: int) -> list:
        pool = multiplier_pool(N, order, precision)
        vmax = max((m.valuation for m in pool), default=0)
        if vmax:
            pool = multiplier_pool(N, order, precision + 2 * vmax + 1)
        return pool

    def compute(self, N: int, chi: DirichletChar, scan: bool = None) -> WeightOneReport:
        """Certified dimension, eigenforms and mod-p exceptions for S_1(N, chi)"""
        chi = chi.extend(N) if chi.modulus != N else chi
        with self._lock:
            report = self._reports.get((N, chi))
        if report is None:
            report = self._certify(N, chi)
        if (self.modp if scan is None else scan) and not report.modp_scanned:
            self._scan(N, chi, report)
        return report

    def _scan(self, N: int, chi: DirichletChar, report: WeightOneReport):
        if report.certified_dim is None:
            return
        with self._lock:
            candidate = self._candidates.get((N, chi))
        if candidate is not None:
            suspects = suspect_primes(candidate, N, self.suspects)
        else:
            suspects = sorted(p for p in set(self.suspects) if p != 2 and N % p)
        report.modp_exceptions = modp_scan(N, chi, suspects, self.certified_space, report.precision)
        report.modp_scanned = True

    def _certify(self, N: int, chi: DirichletChar) -> WeightOneReport:
        if not chi.is_odd():
            raise ValueError(f"S_1(N, chi) vanishes for even chi; {chi.label()} is even")
        order = working_order(chi)

        certificate = trivial_vanishing(N)
        if certificate is not None:
            # the degree bound holds in every characteristic, so there is nothing to scan
            report = WeightOneReport(N, chi, STATUS_ZERO_BY_DEGREE, certified_dim=0, new_dim=0,
                                     zero_certificate=certificate, modp_scanned=True)
            with self._lock:
                self._spaces[(N, chi)] = QLattice.zero(order, 1, certification_precision(N) + 1)
                self._reports[(N, chi)] = report
            return report

        precision = self._precision_for(N)
        lower, reps = dihedral_lower_bound(N, chi)
        report = WeightOneReport(N, chi, STATUS_UNRESOLVED, lower_bound=lower, precision=precision, dihedral=reps)

        for round_number in range(MAX_CERTIFICATION_ROUNDS):
            pool = self._multipliers(N, order, precision)
            try:
                candidate = candidate_space(N, chi, pool, precision, lower, self.cache)
            except (InsufficientMultipliersError, WeightTwoDimensionError) as e:
                logger.error(f"Level {N}, character {chi.label()}: {e}")
                report.notes.append(str(e))
                break
            V = candidate.lattice
            report.upper_bound = V.rank
            report.torsion_gcd = candidate.torsion_gcd
            report.multipliers_used = candidate.multipliers_used
            report.precision = precision
            if V.rank < lower:
                raise ArithmeticError(f"Level {N}: candidate rank {V.rank} is below the dihedral count {lower}")
            if V.rank == lower:
                report.certified_dim = V.rank
                report.status = STATUS_MATCHED_DIHEDRAL
                break
            if not self.certify:
                report.notes.append("certification skipped")
                break
            if all(certify_holomorphic(h, N, chi, precision=certification_precision(N), cache=self.cache)
                   for h in V.echelon_basis()):
                report.certified_dim = V.rank
                report.status = STATUS_CERTIFIED_EXOTIC
                break
            logger.warning(f"Level {N}, character {chi.label()}: certification failed at precision "
                           f"{precision} (round {round_number + 1})")
            precision *= 2

        if report.certified_dim is not None:
            with self._lock:
                self._spaces[(N, chi)] = V
                self._candidates[(N, chi)] = candidate
            if self._want_eigenforms and V.rank:
                try:
                    report.eigenforms = eigen_decompose(V, N, chi)
                except PrecisionError as e:
                    report.notes.append(f"eigenforms not determined: {e}")
                    logger.warning(f"Level {N}, character {chi.label()}: {e}")
            report.new_dim = self._new_dimension(N, chi, V.rank)
        else:
            report.status = STATUS_UNRESOLVED

        with self._lock:
            return self._reports.setdefault((N, chi), report)

    def eigenforms(self, N: int, chi: DirichletChar, precision: int = None) -> list:
        """Eigenforms of the certified space to O(q^precision), extending through weight 2 if needed"""
        chi = chi.extend(N) if chi.modulus != N else chi
        report = self.compute(N, chi, scan=False)
        if not report.is_resolved:
            raise ArithmeticError(f"S_1({N}, {chi.label()}) is unresolved")
        V = self._spaces[(N, chi)]
        if V.rank == 0:
            return []
        if precision is not None and precision > V.prec:
            extended = [extend_precision(h, N, chi, precision, self.cache) for h in V.echelon_basis()]
            V = QLattice.from_series(extended, V.order, 1, precision)
            forms = eigen_decompose(V, N, chi)
        else:
            forms = report.eigenforms or eigen_decompose(V, N, chi)
        if precision is not None:
            forms = [replace(form, coefficients=form.coefficients[:precision]) for form in forms]
        return forms

    def run_weight_one_pipeline(self, levels, labels=None) -> list:
        """Reports for every odd character class (or the labelled ones) at each level"""
        reports = []
        for N in levels:
            if labels:
                characters = sorted({chi for label in labels for chi in from_local_label(label, N)
                                     if chi.is_odd()}, key=lambda c: c.key)
            else:
                characters = odd_characters(N)
            for cls in conjugacy_classes(characters):
                report = self.compute(N, cls.representative)
                report.class_size = cls.size
                reports.append(report)
        return reports
