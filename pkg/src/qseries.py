"""
Q-Series Module
Truncated q-expansions over cyclotomic and residue rings, and saturated lattices of q-expansions
"""

from dataclasses import dataclass
from fractions import Fraction
from math import gcd
import logging
import sys
import os

from sympy import primerange

# Add config to path
sys.path.append(os.path.join(os.path.dirname(__file__), '..'))
from config.settings import *
from src.cyclotomic import (CycNumber, PrimeIdeal, ResidueElement, cyclotomic_data, factor_prime,
                            reduce, reduce_any)
from src.linalg import (IntegerLattice, in_span, lattice_index, left_kernel, nullspace, rref,
                        reduce_vector, saturate_rows, span_intersection)

# Setup logging
logging.basicConfig(level=getattr(logging, LOG_LEVEL), format=LOG_FORMAT)
logger = logging.getLogger(__name__)


class PrecisionError(ValueError):
    """Raised when a coefficient beyond the guaranteed precision is requested"""


@dataclass(frozen=True)
class CoefficientRing:
    """Either Q(zeta_n) (integral elements give Z[zeta_n]) or a residue field at a prime ideal"""
    order: int
    ideal: PrimeIdeal = None

    @classmethod
    def cyclotomic(cls, n: int) -> "CoefficientRing":
        return cls(n)

    @classmethod
    def residue(cls, ideal: PrimeIdeal) -> "CoefficientRing":
        return cls(ideal.n, ideal)

    @property
    def is_residue(self) -> bool:
        return self.ideal is not None

    def zero(self):
        return ResidueElement.zero(self.ideal) if self.ideal else CycNumber.zero(self.order)

    def one(self):
        return ResidueElement.one(self.ideal) if self.ideal else CycNumber.one(self.order)

    def coerce(self, x):
        if self.ideal is not None:
            if isinstance(x, ResidueElement):
                if x.ideal != self.ideal:
                    raise ValueError("Residue field mismatch")
                return x
            if isinstance(x, CycNumber):
                return reduce_any(x, self.ideal)
            if isinstance(x, Fraction):
                return ResidueElement.from_int(self.ideal, x.numerator) / x.denominator
            return ResidueElement.from_int(self.ideal, int(x))
        if isinstance(x, CycNumber):
            if x.order == self.order:
                return x
            return x.lift(self.order)
        if isinstance(x, ResidueElement):
            raise ValueError("Cannot coerce a residue into a characteristic-zero ring")
        return CycNumber.from_rational(self.order, x)

    def describe(self) -> str:
        if self.ideal is not None:
            return f"F_{self.ideal.field_size} at {self.ideal.describe()} in Z[zeta_{self.order}]"
        return f"Q(zeta_{self.order})"

    def to_json(self) -> dict:
        payload = {"n": self.order}
        if self.ideal is not None:
            payload["ideal"] = self.ideal.to_json()
        return payload

    @classmethod
    def from_json(cls, payload: dict) -> "CoefficientRing":
        ideal = payload.get("ideal")
        return cls(payload["n"], PrimeIdeal.from_json(ideal) if ideal else None)


_INFINITY = float("inf")


def _finite(value):
    return None if value == _INFINITY else int(value)


class QSeries:
    """sum a_e q^e for start <= e < prec; prec None means the expansion is exact"""

    __slots__ = ("ring", "start", "coeffs", "prec")

    def __init__(self, ring: CoefficientRing, coeffs, start: int = 0, prec: int = None):
        coeffs = [ring.coerce(c) for c in coeffs]
        if prec is not None:
            coeffs = coeffs[:max(0, prec - start)]
        lead = 0
        while lead < len(coeffs) and not coeffs[lead]:
            lead += 1
        coeffs = coeffs[lead:]
        start += lead
        while coeffs and not coeffs[-1]:
            coeffs.pop()
        if not coeffs:
            start = prec if prec is not None else 0
        self.ring = ring
        self.start = start
        self.coeffs = coeffs
        self.prec = prec

    # Constructors
    @classmethod
    def from_dict(cls, ring: CoefficientRing, terms: dict, prec: int = None) -> "QSeries":
        if not terms:
            return cls(ring, [], 0, prec)
        lo, hi = min(terms), max(terms)
        return cls(ring, [terms.get(e, 0) for e in range(lo, hi + 1)], lo, prec)

    @classmethod
    def zero(cls, ring: CoefficientRing, prec: int = None) -> "QSeries":
        return cls(ring, [], 0, prec)

    @classmethod
    def one(cls, ring: CoefficientRing, prec: int = None) -> "QSeries":
        return cls(ring, [1], 0, prec)

    # Accessors
    @property
    def valuation(self):
        return self.start if self.coeffs else None

    def _effective_valuation(self):
        if self.coeffs:
            return self.start
        return self.prec if self.prec is not None else _INFINITY

    def _bound(self):
        return self.prec if self.prec is not None else _INFINITY

    def is_zero(self) -> bool:
        return not self.coeffs

    def __getitem__(self, e: int):
        if self.prec is not None and e >= self.prec:
            raise PrecisionError(f"Coefficient of q^{e} requested from a series known to O(q^{self.prec})")
        if self.coeffs and self.start <= e < self.start + len(self.coeffs):
            return self.coeffs[e - self.start]
        return self.ring.zero()

    def coefficients(self, lo: int, hi: int) -> list:
        """Coefficients of q^lo .. q^(hi-1)"""
        return [self[e] for e in range(lo, hi)]

    def leading_coefficient(self):
        if not self.coeffs:
            raise ZeroDivisionError("The zero series has no leading coefficient")
        return self.coeffs[0]

    # Arithmetic
    def _check_ring(self, other: "QSeries"):
        if self.ring != other.ring:
            raise ValueError(f"Ring mismatch: {self.ring.describe()} vs {other.ring.describe()}")

    def __add__(self, other):
        if not isinstance(other, QSeries):
            other = QSeries(self.ring, [other])
        self._check_ring(other)
        prec = _finite(min(self._bound(), other._bound()))
        if not self.coeffs:
            return QSeries(self.ring, other.coeffs, other.start, prec)
        if not other.coeffs:
            return QSeries(self.ring, self.coeffs, self.start, prec)
        lo = min(self.start, other.start)
        hi = max(self.start + len(self.coeffs), other.start + len(other.coeffs))
        if prec is not None:
            hi = min(hi, prec)
        coeffs = [self._raw(e) + other._raw(e) for e in range(lo, hi)]
        return QSeries(self.ring, coeffs, lo, prec)

    __radd__ = __add__

    def _raw(self, e: int):
        if self.start <= e < self.start + len(self.coeffs):
            return self.coeffs[e - self.start]
        return self.ring.zero()

    def __neg__(self):
        return QSeries(self.ring, [-c for c in self.coeffs], self.start, self.prec)

    def __sub__(self, other):
        if not isinstance(other, QSeries):
            other = QSeries(self.ring, [other])
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, c) -> "QSeries":
        c = self.ring.coerce(c)
        return QSeries(self.ring, [a * c for a in self.coeffs], self.start, self.prec)

    def __mul__(self, other):
        if not isinstance(other, QSeries):
            return self.scale(other)
        return mul(self, other)

    def __rmul__(self, other):
        return self.scale(other)

    def __truediv__(self, other):
        if not isinstance(other, QSeries):
            return self.scale(self.ring.one() / self.ring.coerce(other))
        return div(self, other)

    def __pow__(self, k: int) -> "QSeries":
        if k < 0:
            raise ValueError("Negative powers of q-series are taken with div")
        result = QSeries.one(self.ring)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    # Transformations
    def truncate(self, prec: int) -> "QSeries":
        return QSeries(self.ring, self.coeffs, self.start, _finite(min(self._bound(), prec)))

    def substitute(self, d: int) -> "QSeries":
        """q -> q^d"""
        if d < 1:
            raise ValueError(f"Substitution q -> q^{d} needs d >= 1")
        coeffs = []
        for i, c in enumerate(self.coeffs):
            coeffs.append(c)
            if i < len(self.coeffs) - 1:
                coeffs.extend([self.ring.zero()] * (d - 1))
        prec = None if self.prec is None else d * self.prec - (d - 1)
        return QSeries(self.ring, coeffs, d * self.start, prec)

    def shift(self, k: int) -> "QSeries":
        """Multiply by q^k"""
        prec = None if self.prec is None else self.prec + k
        return QSeries(self.ring, self.coeffs, self.start + k, prec)

    def map_coefficients(self, func, ring: CoefficientRing) -> "QSeries":
        return QSeries(ring, [func(c) for c in self.coeffs], self.start, self.prec)

    def lift(self, order: int) -> "QSeries":
        ring = CoefficientRing.cyclotomic(order)
        return self.map_coefficients(lambda c: c.lift(order), ring)

    def reduce(self, ideal: PrimeIdeal) -> "QSeries":
        """Coefficientwise reduction of a p-integral series"""
        ring = CoefficientRing.residue(ideal)
        return self.map_coefficients(lambda c: reduce_any(c, ideal), ring)

    def galois_conjugate(self, a: int) -> "QSeries":
        return self.map_coefficients(lambda c: c.galois_conjugate(a), self.ring)

    def is_integral(self) -> bool:
        return self.ring.is_residue or all(c.is_integral() for c in self.coeffs)

    def denominator(self) -> int:
        d = 1
        for c in self.coeffs:
            cd = c.denominator()
            d = d * cd // gcd(d, cd)
        return d

    # Comparison
    def agrees_with(self, other: "QSeries", upto: int) -> bool:
        """Equal coefficients below q^upto"""
        lo = min(self.start, other.start, 0)
        return all(self[e] == other[e] for e in range(lo, upto))

    def __eq__(self, other):
        if not isinstance(other, QSeries):
            return NotImplemented
        return (self.ring == other.ring and self.prec == other.prec
                and self.start == other.start and self.coeffs == other.coeffs)

    def __hash__(self):
        return hash((self.ring, self.start, self.prec, tuple(self.coeffs)))

    def __repr__(self):
        return f"QSeries({self.ring.describe()}, {self})"

    def __str__(self):
        terms = []
        for i, c in enumerate(self.coeffs):
            if not c:
                continue
            e = self.start + i
            power = "1" if e == 0 else ("q" if e == 1 else f"q^{e}")
            text = str(c)
            if e == 0:
                terms.append(text if " " not in text else f"({text})")
            elif text == "1":
                terms.append(power)
            elif text == "-1":
                terms.append(f"-{power}")
            else:
                terms.append(f"({text})*{power}" if " " in text else f"{text}*{power}")
        if self.prec is not None:
            terms.append(f"O(q^{self.prec})")
        return " + ".join(terms).replace("+ -", "- ") if terms else "0"

    # Serialization
    def to_json(self) -> dict:
        if self.ring.is_residue:
            coeffs = [c.to_json() for c in self.coeffs]
        else:
            coeffs = [[[f.numerator, f.denominator] for f in c.coeffs] for c in self.coeffs]
        return {"ring": self.ring.to_json(), "start": self.start, "precision": self.prec,
                "coefficients": coeffs}

    @classmethod
    def from_json(cls, payload: dict) -> "QSeries":
        ring = CoefficientRing.from_json(payload["ring"])
        if ring.is_residue:
            coeffs = [ResidueElement(ring.ideal, c) for c in payload["coefficients"]]
        else:
            coeffs = [CycNumber(ring.order, [Fraction(a, b) for a, b in c]) for c in payload["coefficients"]]
        return cls(ring, coeffs, payload["start"], payload["precision"])


def mul(a: QSeries, b: QSeries) -> QSeries:
    """Cauchy product; precision min(P1 + v2, P2 + v1)"""
    a._check_ring(b)
    v1, v2 = a._effective_valuation(), b._effective_valuation()
    prec = _finite(min(a._bound() + v2, b._bound() + v1))
    if not a.coeffs or not b.coeffs:
        return QSeries.zero(a.ring, prec)
    start = a.start + b.start
    length = len(a.coeffs) + len(b.coeffs) - 1
    if prec is not None:
        length = min(length, prec - start)
    zero = a.ring.zero()
    coeffs = [zero] * max(length, 0)
    for i, x in enumerate(a.coeffs):
        if not x or i >= length:
            continue
        for j, y in enumerate(b.coeffs[:length - i]):
            if y:
                coeffs[i + j] = coeffs[i + j] + x * y
    return QSeries(a.ring, coeffs, start, prec)


def div(g: QSeries, f: QSeries) -> QSeries:
    """h with h * f = g; valuation(h) = valuation(g) - valuation(f), possibly negative"""
    g._check_ring(f)
    if f.is_zero():
        raise ZeroDivisionError("Division by the zero series")
    vf = f.start
    if g.is_zero():
        prec = None if g.prec is None else g.prec - vf
        return QSeries.zero(g.ring, prec)
    vg = g.start
    relative = min(g._bound() - vg, f._bound() - vf)
    exact = relative == _INFINITY
    if exact:
        relative = len(g.coeffs)
    relative = int(relative)

    inv0 = g.ring.one() / f.coeffs[0]
    quotient = []
    for k in range(relative):
        acc = g._raw(vg + k)
        for j in range(1, min(k, len(f.coeffs) - 1) + 1):
            if f.coeffs[j] and quotient[k - j]:
                acc = acc - f.coeffs[j] * quotient[k - j]
        quotient.append(acc * inv0)
    start = vg - vf
    if exact:
        h = QSeries(g.ring, quotient, start)
        if mul(h, f) != g:
            raise ValueError("Exact series do not divide; truncate to a precision first")
        return h
    return QSeries(g.ring, quotient, start, start + relative)


@dataclass(frozen=True)
class TorsionReport:
    """Torsion data of one lattice intersection

    order_norm is the order of the torsion of (L1 + L2)/L1; cokernel_torsion is
    [saturation(L1 + L2) : L1 + L2], whose prime divisors are exactly the primes
    at which the reductions of saturated L1 and L2 meet in extra dimensions.
    """
    order_norm: int
    cokernel_torsion: int
    support_hint: int

    def is_torsion_free(self) -> bool:
        return self.order_norm == 1

    def small_prime_support(self, bound: int = SMALL_PRIME_BOUND) -> list:
        return [p for p in primerange(3, bound) if self.cokernel_torsion % p == 0]

    def to_json(self) -> dict:
        return {"order_norm": str(self.order_norm), "cokernel_torsion": str(self.cokernel_torsion),
                "support_hint": str(self.support_hint)}


class QLattice:
    """A Z[zeta_n]-lattice of q-expansions on the exponent window start <= e < prec

    Stored as a Z-lattice in Hermite form on the flattened coordinates
    (exponent, power-basis index); the Q(zeta_n)-echelon basis is derived.
    """

    __slots__ = ("order", "start", "prec", "rows", "saturated", "_echelon")

    def __init__(self, order: int, start: int, prec: int, rows, saturated: bool = True):
        if prec < start:
            raise ValueError(f"Empty exponent window [{start}, {prec})")
        self.order = order
        self.start = start
        self.prec = prec
        self.rows = [list(r) for r in rows]
        self.saturated = saturated
        self._echelon = None

    # Geometry of the ambient space
    @property
    def ring(self) -> CoefficientRing:
        return CoefficientRing.cyclotomic(self.order)

    @property
    def phi(self) -> int:
        return cyclotomic_data(self.order).phi

    @property
    def ambient_dimension(self) -> int:
        return (self.prec - self.start) * self.phi

    @property
    def z_rank(self) -> int:
        return len(self.rows)

    @property
    def rank(self) -> int:
        return len(self.rows) // self.phi

    def flatten(self, series: QSeries) -> list:
        """Rational coordinates of a series on the window"""
        if series.ring.is_residue:
            raise ValueError("Only characteristic-zero series live in a QLattice")
        if series.coeffs and series.start < self.start:
            raise ValueError(f"Series has terms below q^{self.start}")
        if series.prec is not None and series.prec < self.prec:
            raise PrecisionError(f"Series known to O(q^{series.prec}) but the lattice needs O(q^{self.prec})")
        vector = []
        for e in range(self.start, self.prec):
            c = self.ring.coerce(series._raw(e))
            vector.extend(c.coeffs)
        return vector

    def unflatten(self, vector) -> QSeries:
        phi = self.phi
        coeffs = [CycNumber(self.order, vector[k * phi:(k + 1) * phi])
                  for k in range(self.prec - self.start)]
        return QSeries(self.ring, coeffs, self.start, self.prec)

    # Constructors
    @classmethod
    def from_series(cls, series, order: int, start: int = 0, prec: int = None,
                    saturate: bool = True) -> "QLattice":
        """Lattice spanned over Z[zeta_n] by the series (saturated by default)"""
        series = list(series)
        if prec is None:
            precs = [s.prec for s in series if s.prec is not None]
            if not precs:
                raise PrecisionError("Exact series need an explicit lattice precision")
            prec = min(precs)
        lattice = cls(order, start, prec, [], saturate)
        vectors = []
        for s in series:
            base = s if s.ring.order == order else s.lift(order)
            for j in range(lattice.phi):
                vectors.append(lattice.flatten(base.scale(CycNumber.zeta(order, j))))
        if saturate:
            lattice.rows = saturate_rows(vectors, lattice.ambient_dimension) if vectors else []
        else:
            if any(Fraction(x).denominator != 1 for v in vectors for x in v):
                raise ValueError("An unsaturated lattice needs integral generators")
            z = IntegerLattice(lattice.ambient_dimension, vectors)
            lattice.rows = z.hermite_basis()
        logger.debug(f"Built lattice of Z-rank {lattice.z_rank} in dimension {lattice.ambient_dimension}")
        return lattice

    @classmethod
    def zero(cls, order: int, start: int, prec: int) -> "QLattice":
        return cls(order, start, prec, [], True)

    # Views
    def series(self) -> list:
        """The Z-basis as q-series"""
        return [self.unflatten(row) for row in self.rows]

    def echelon_basis(self) -> list:
        """Q(zeta_n)-echelon basis: increasing pivot exponents, pivot coefficients 1"""
        if self._echelon is None:
            window = self.prec - self.start
            vectors = [[s._raw(e) for e in range(self.start, self.prec)] for s in self.series()]
            echelon, pivots = rref(vectors, window) if vectors else ([], [])
            self._echelon = (echelon, pivots)
        echelon, _ = self._echelon
        return [QSeries(self.ring, row, self.start, self.prec) for row in echelon]

    def pivots(self) -> list:
        """Pivot exponents of the echelon basis"""
        self.echelon_basis()
        return [self.start + c for c in self._echelon[1]]

    def coordinates(self, series: QSeries):
        """Coefficients on the echelon basis, or None when the series is outside the span"""
        self.echelon_basis()
        echelon, pivots = self._echelon
        s = series if series.ring.order == self.order else series.lift(self.order)
        vector = [self.ring.coerce(s[e]) for e in range(self.start, self.prec)]
        coefficients, remainder = reduce_vector(echelon, pivots, vector)
        if any(remainder):
            return None
        return coefficients

    def in_span(self, series: QSeries) -> bool:
        return self.coordinates(series) is not None

    def __contains__(self, series: QSeries) -> bool:
        vector = self.flatten(series if series.ring.order == self.order else series.lift(self.order))
        if any(Fraction(x).denominator != 1 for x in vector):
            return False
        return [int(x) for x in vector] in IntegerLattice(self.ambient_dimension, self.rows)

    def same_ambient(self, other: "QLattice") -> bool:
        return (self.order, self.start, self.prec) == (other.order, other.start, other.prec)

    def restrict(self, start: int, prec: int) -> "QLattice":
        """Project onto a sub-window (re-saturating the image)"""
        if start < self.start or prec > self.prec:
            raise PrecisionError(f"Window [{start}, {prec}) is not inside [{self.start}, {self.prec})")
        truncated = [s.truncate(prec) for s in self.series()]
        if any(s.coeffs and s.start < start for s in truncated):
            raise ValueError(f"Lattice has terms below q^{start}")
        return QLattice.from_series(truncated, self.order, start, prec, saturate=self.saturated)

    def lift(self, order: int) -> "QLattice":
        if order == self.order:
            return self
        return QLattice.from_series([s.lift(order) for s in self.series()], order, self.start, self.prec)

    def __eq__(self, other):
        if not isinstance(other, QLattice):
            return NotImplemented
        return self.same_ambient(other) and self.rows == other.rows

    def __repr__(self):
        return f"QLattice(Q(zeta_{self.order}), rank {self.rank}, window [{self.start}, {self.prec}))"

    def to_json(self) -> dict:
        return {"n": self.order, "start": self.start, "precision": self.prec,
                "saturated": self.saturated, "rows": [[str(x) for x in row] for row in self.rows]}

    @classmethod
    def from_json(cls, payload: dict) -> "QLattice":
        return cls(payload["n"], payload["start"], payload["precision"],
                   [[int(x) for x in row] for row in payload["rows"]], payload["saturated"])


def saturate(lattice: QLattice) -> QLattice:
    """Integral-coefficient series in the Q(zeta_n)-span; idempotent"""
    if lattice.saturated:
        return lattice
    rows = saturate_rows(lattice.rows, lattice.ambient_dimension) if lattice.rows else []
    return QLattice(lattice.order, lattice.start, lattice.prec, rows, True)


def _z_intersection(rows1, rows2, ncols: int) -> list:
    """Hermite basis of the intersection of two Z-lattices"""
    if not rows1 or not rows2:
        return []
    stacked = [[Fraction(x) for x in r] for r in rows1] + [[Fraction(-x) for x in r] for r in rows2]
    kernel = left_kernel(stacked, ncols)
    if not kernel:
        return []
    integral_kernel = saturate_rows(kernel, len(stacked))
    result = IntegerLattice(ncols)
    for x in integral_kernel:
        vector = [sum(x[i] * rows1[i][j] for i in range(len(rows1)) if x[i]) for j in range(ncols)]
        result.add_vector(vector)
    return result.hermite_basis()


def _order_norm(rows1, rows2, ncols: int) -> int:
    """[(L1 + L2) meet span(L1) : L1]"""
    total = IntegerLattice(ncols, rows1 + rows2).hermite_basis()
    annihilator = nullspace([[Fraction(x) for x in r] for r in rows1], ncols)
    if not annihilator:
        inside = total
    else:
        images = [[sum((Fraction(row[j]) * a[j] for j in range(ncols) if row[j]), Fraction(0))
                   for a in annihilator] for row in total]
        kernel = left_kernel(images, len(annihilator))
        if not kernel:
            return 1
        coordinates = saturate_rows(kernel, len(total))
        inside = [[sum(y[i] * total[i][j] for i in range(len(total)) if y[i]) for j in range(ncols)]
                  for y in coordinates]
    return lattice_index(rows1, inside)


def sum_torsion(lattice1: QLattice, lattice2: QLattice) -> int:
    """[saturation(L1 + L2) : L1 + L2]"""
    if not lattice1.same_ambient(lattice2):
        raise ValueError(f"Lattices live in different ambient spaces: {lattice1!r} vs {lattice2!r}")
    if not lattice1.rows and not lattice2.rows:
        return 1
    ncols = lattice1.ambient_dimension
    total = IntegerLattice(ncols, lattice1.rows + lattice2.rows).hermite_basis()
    return lattice_index(total, saturate_rows(total, ncols))


def intersect(lattice1: QLattice, lattice2: QLattice, support_hint: int = 0,
              min_precision: int = None):
    """L1 meet L2 together with the torsion data of (L1 + L2)/L1"""
    if not lattice1.same_ambient(lattice2):
        raise ValueError(f"Lattices live in different ambient spaces: {lattice1!r} vs {lattice2!r}")
    if min_precision is not None and lattice1.prec < min_precision:
        raise PrecisionError(f"Precision {lattice1.prec} is below the rank-detection threshold {min_precision}")
    ncols = lattice1.ambient_dimension
    rows = _z_intersection(lattice1.rows, lattice2.rows, ncols)
    both_saturated = lattice1.saturated and lattice2.saturated
    result = QLattice(lattice1.order, lattice1.start, lattice1.prec, rows, both_saturated)

    cokernel = sum_torsion(lattice1, lattice2)
    if lattice1.saturated or not lattice1.rows:
        order_norm = 1
    else:
        order_norm = _order_norm(lattice1.rows, lattice2.rows, ncols)
    report = TorsionReport(order_norm, cokernel, gcd(support_hint, cokernel))
    logger.debug(f"Intersected Z-ranks {lattice1.z_rank} and {lattice2.z_rank} -> {result.z_rank}; "
                 f"cokernel torsion {cokernel}")
    return result, report


def reduce_lattice(lattice: QLattice, ideal: PrimeIdeal) -> list:
    """Echelon basis of the image of the lattice in residue-field coefficients"""
    if lattice.order % ideal.p == 0:
        raise ValueError(f"Prime {ideal.p} divides {lattice.order}; only unramified reduction is supported")
    if ideal.n != lattice.order:
        raise ValueError(f"Prime ideal of Z[zeta_{ideal.n}] used on a lattice over Z[zeta_{lattice.order}]")
    ring = CoefficientRing.residue(ideal)
    vectors = []
    for s in lattice.series():
        vectors.append([reduce(s._raw(e), ideal) for e in range(lattice.start, lattice.prec)])
    if not vectors:
        return []
    echelon, _ = rref(vectors, lattice.prec - lattice.start)
    return [QSeries(ring, row, lattice.start, lattice.prec) for row in echelon]


class ResidueSpace:
    """A vector space of q-expansions over a residue field, kept in echelon form"""

    def __init__(self, ring: CoefficientRing, start: int, prec: int, series=()):
        self.ring = ring
        self.start = start
        self.prec = prec
        vectors = [self._vector(s) for s in series]
        self.echelon, self.pivot_columns = rref(vectors, prec - start) if vectors else ([], [])

    def _vector(self, s: QSeries) -> list:
        if s.coeffs and s.start < self.start:
            raise ValueError(f"Series has terms below q^{self.start}")
        return [self.ring.coerce(s[e]) for e in range(self.start, self.prec)]

    @classmethod
    def from_lattice(cls, lattice: QLattice, ideal: PrimeIdeal) -> "ResidueSpace":
        return cls(CoefficientRing.residue(ideal), lattice.start, lattice.prec, reduce_lattice(lattice, ideal))

    @property
    def dimension(self) -> int:
        return len(self.echelon)

    def basis(self) -> list:
        return [QSeries(self.ring, row, self.start, self.prec) for row in self.echelon]

    def pivots(self) -> list:
        return [self.start + c for c in self.pivot_columns]

    def __contains__(self, s: QSeries) -> bool:
        return in_span(self.echelon, self.pivot_columns, self._vector(s))

    def coordinates(self, s: QSeries):
        coefficients, remainder = reduce_vector(self.echelon, self.pivot_columns, self._vector(s))
        return None if any(remainder) else coefficients

    def intersect(self, other: "ResidueSpace") -> "ResidueSpace":
        if (self.ring, self.start, self.prec) != (other.ring, other.start, other.prec):
            raise ValueError("Residue spaces live in different ambient spaces")
        echelon, _ = span_intersection(self.echelon, other.echelon, self.prec - self.start)
        return ResidueSpace(self.ring, self.start, self.prec,
                            [QSeries(self.ring, row, self.start, self.prec) for row in echelon])

    def __add__(self, other: "ResidueSpace") -> "ResidueSpace":
        return ResidueSpace(self.ring, self.start, self.prec, self.basis() + other.basis())


def support_primes(lattice1: QLattice, lattice2: QLattice, p: int) -> list:
    """Primes above p where the reductions meet in more than the rank of the intersection"""
    if lattice1.order % p == 0:
        raise ValueError(f"Prime {p} divides {lattice1.order}")
    meet, _ = intersect(lattice1, lattice2)
    support = []
    for ideal in factor_prime(p, lattice1.order):
        reduced = ResidueSpace.from_lattice(lattice1, ideal).intersect(
            ResidueSpace.from_lattice(lattice2, ideal))
        if reduced.dimension > meet.rank:
            support.append(ideal)
    return support
