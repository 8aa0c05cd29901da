"""
Newton Polygon Module
Admissible sub-unit orders and types read off the coefficient degrees
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import TYPE_CHECKING, Dict, Iterator, List, Optional, Sequence, Tuple, Union

import mpmath
import sympy
from loguru import logger

from src.errors import AllCoefficientsZero
from src.exact_algebra import ComplexRational, Poly, ScalarLike

if TYPE_CHECKING:
    from src.recurrence import RecurrenceSystem


@dataclass(frozen=True)
class DifferenceEquation:
    """P_m Δ^m f + ... + P_1 Δf + P_0 f = 0, polys[j] = P_j in the monomial basis"""
    polys: Tuple[Poly, ...]

    def __post_init__(self):
        polys = tuple(p if isinstance(p, Poly) else Poly(tuple(p)) for p in self.polys)
        object.__setattr__(self, "polys", polys)
        if all(p.is_zero() for p in polys):
            raise AllCoefficientsZero("every coefficient polynomial is identically zero")
        if len(polys) < 2:
            raise ValueError("order m must be at least 1")
        if polys[-1].is_zero():
            raise ValueError(f"P_{len(polys) - 1} is identically zero; drop it and lower m")

    @classmethod
    def from_coefficients(cls, lists: Sequence[Sequence[ScalarLike]]) -> "DifferenceEquation":
        """lists[j] holds P_j's coefficients in ascending powers"""
        return cls(tuple(Poly(tuple(row)) for row in lists))

    @property
    def m(self) -> int:
        return len(self.polys) - 1

    @property
    def d(self) -> int:
        """max_j deg P_j"""
        return max(p.degree() for p in self.polys if not p.is_zero())

    def scaled(self, c: ScalarLike) -> "DifferenceEquation":
        return DifferenceEquation(tuple(p.scale(c) for p in self.polys))

    def leading(self, j: int) -> ComplexRational:
        """A_{j,d_j}"""
        return self.polys[j].leading()

    def to_json(self) -> dict:
        return {"m": self.m, "P": [p.to_json() for p in self.polys]}

    def __str__(self) -> str:
        terms = []
        for j in range(self.m, -1, -1):
            p = self.polys[j]
            if p.is_zero():
                continue
            op = "f" if j == 0 else ("Δf" if j == 1 else f"Δ^{j}f")
            terms.append(f"({p})·{op}")
        return " + ".join(terms) + " = 0"


@dataclass(frozen=True)
class SSequence:
    indices: Tuple[int, ...]
    degrees: Tuple[int, ...]

    @property
    def p(self) -> int:
        return len(self.indices)

    def excess(self, j: int) -> int:
        """d_{s_j} - s_j, zero-based j"""
        return self.degrees[j] - self.indices[j]


@dataclass(frozen=True)
class ExactType:
    """
    L = prefactor · base_modulus_squared ^ exponent

    The base is kept as a modulus squared so complex leading coefficients
    never need a square root. The exponent already carries the halving.
    """
    prefactor: Fraction
    base_modulus_squared: Fraction
    exponent: Fraction

    def as_expr(self) -> sympy.Expr:
        """Radical normal form; perfect powers collapse automatically"""
        return sympy.Rational(self.prefactor) * sympy.Pow(
            sympy.Rational(self.base_modulus_squared), sympy.Rational(self.exponent))

    def as_rational(self) -> Optional[Fraction]:
        """Exact value when the radical collapses, else None"""
        exp = self.exponent
        powered = self.base_modulus_squared ** exp.numerator
        num, num_exact = sympy.integer_nthroot(powered.numerator, exp.denominator)
        den, den_exact = sympy.integer_nthroot(powered.denominator, exp.denominator)
        if not (num_exact and den_exact):
            return None
        return self.prefactor * Fraction(int(num), int(den))

    def evaluate(self, digits: int = 30) -> mpmath.mpf:
        with mpmath.workdps(digits + 10):
            base = mpmath.mpf(self.base_modulus_squared.numerator) / self.base_modulus_squared.denominator
            exponent = mpmath.mpf(self.exponent.numerator) / self.exponent.denominator
            pre = mpmath.mpf(self.prefactor.numerator) / self.prefactor.denominator
            value = pre * mpmath.power(base, exponent)
        return value

    def decimal(self, places: int = 12) -> str:
        return mpmath.nstr(self.evaluate(places + 5), places, strip_zeros=False)

    def __float__(self) -> float:
        return float(self.evaluate(20))

    def equals(self, other: Union["ExactType", Fraction, int]) -> bool:
        """Exact comparison of values, not of representations"""
        mine = self.as_rational()
        if isinstance(other, ExactType):
            theirs = other.as_rational()
            if mine is not None or theirs is not None:
                return mine == theirs
            return sympy.simplify(self.as_expr() - other.as_expr()) == 0
        return mine is not None and mine == Fraction(other)

    def __str__(self) -> str:
        value = self.as_rational()
        return str(value) if value is not None else str(self.as_expr())


@dataclass(frozen=True)
class ProfileEntry:
    j: int
    rho: Fraction
    type: ExactType
    segment: Tuple[int, int]


@dataclass(frozen=True)
class GrowthProfile:
    sseq: SSequence
    entries: Tuple[ProfileEntry, ...] = ()

    def __len__(self) -> int:
        return len(self.entries)

    def __iter__(self) -> Iterator[ProfileEntry]:
        return iter(self.entries)

    @property
    def is_empty(self) -> bool:
        return not self.entries

    def contains(self, rho: Fraction, tau: Union[ExactType, Fraction, int]) -> bool:
        return any(e.rho == Fraction(rho) and e.type.equals(tau) for e in self.entries)


@dataclass
class HullReport:
    ok: bool
    points: List[Tuple[int, int]]
    vertices: List[Tuple[int, int]]
    expected_vertices: List[Tuple[int, int]]
    descent_slopes: List[Fraction]
    expected_slopes: List[Fraction]
    mismatches: List[str] = field(default_factory=list)


# =============================================================================
# OPERATIONS
# =============================================================================

def degrees(eq: DifferenceEquation) -> List[Tuple[int, Optional[int]]]:
    return [(j, p.degree()) for j, p in enumerate(eq.polys)]


def _bends_down(a: Tuple[int, int], b: Tuple[int, int], c: Tuple[int, int]) -> bool:
    """True when (index, degree) point b lies strictly above the chord a-c in the (excess, index) plane"""
    (ja, da), (jb, db), (jc, dc) = a, b, c
    xa, xb, xc = da - ja, db - jb, dc - jc
    return (xb - xa) * (jc - ja) - (jb - ja) * (xc - xa) < 0


def s_sequence(eq: DifferenceEquation) -> SSequence:
    degs = [p.degree() for p in eq.polys]
    live = [j for j, dj in enumerate(degs) if dj is not None]
    if not live:
        raise AllCoefficientsZero("every coefficient polynomial is identically zero")

    top = max(degs[j] for j in live)
    current = min(j for j in live if degs[j] == top)
    indices, chosen = [current], [top]

    while True:
        excess = degs[current] - current
        candidates = [k for k in live if k < current and degs[k] - k > excess]
        if not candidates:
            break
        best = max(degs[k] for k in candidates)
        current = min(k for k in candidates if degs[k] == best)
        # points on or under the chord to the new one are not polygon vertices
        while len(indices) >= 2 and not _bends_down(
                (indices[-2], chosen[-2]), (indices[-1], chosen[-1]), (current, best)):
            indices.pop()
            chosen.pop()
        indices.append(current)
        chosen.append(best)

    logger.debug(f"s-sequence {indices} with degrees {chosen}")
    return SSequence(tuple(indices), tuple(chosen))


def growth_profile(eq: DifferenceEquation) -> GrowthProfile:
    sseq = s_sequence(eq)
    entries = []
    for j in range(sseq.p - 1):
        s_a, s_b = sseq.indices[j], sseq.indices[j + 1]
        d_a, d_b = sseq.degrees[j], sseq.degrees[j + 1]
        rho = 1 + Fraction(d_b - d_a, s_a - s_b)
        gap = sseq.excess(j + 1) - sseq.excess(j)
        ratio = eq.leading(s_b) / eq.leading(s_a)
        exact_type = ExactType(
            prefactor=1 / rho,
            base_modulus_squared=ratio.abs2(),
            exponent=rho / (2 * gap),
        )
        entries.append(ProfileEntry(j + 1, rho, exact_type, (s_a, s_b)))
        logger.debug(f"segment {j + 1}: rho={rho}, L={exact_type}")
    return GrowthProfile(sseq, tuple(entries))


def _upper_hull(points: List[Tuple[int, int]]) -> List[Tuple[int, int]]:
    """Monotone chain, collinear points dropped"""
    hull: List[Tuple[int, int]] = []
    for pt in sorted(points):
        while len(hull) >= 2:
            (x1, y1), (x2, y2) = hull[-2], hull[-1]
            cross = (x2 - x1) * (pt[1] - y1) - (y2 - y1) * (pt[0] - x1)
            if cross >= 0:
                hull.pop()
            else:
                break
        hull.append(pt)
    return hull


def hull_crosscheck(eq: DifferenceEquation, rs: "RecurrenceSystem") -> Tuple[bool, HullReport]:
    """
    Rebuild the polygon from the recurrence degrees and compare with the s-sequence

    Points are (m + i, deg Q(n, i)) for i between the first and last excess
    d_{s_j} - s_j; the upper hull must have exactly the vertices
    (m + d_{s_j} - s_j, s_j), and each edge must descend with slope 1/rho_j.
    """
    profile = growth_profile(eq)
    sseq = profile.sseq
    m = rs.m
    lo, hi = sseq.excess(0), sseq.excess(sseq.p - 1)

    owners: Dict[Tuple[int, int], int] = {}
    for i in range(lo, hi + 1):
        q = rs.qpolys.get(i)
        if q is None or q.is_zero():
            continue
        owners[(m + i, q.degree())] = i
    points = sorted(owners)

    vertices = _upper_hull(points)
    expected = [(m + sseq.excess(j), sseq.indices[j]) for j in range(sseq.p)]
    slopes = [Fraction(y1 - y2, x2 - x1) for (x1, y1), (x2, y2) in zip(vertices, vertices[1:])]
    expected_slopes = [1 / e.rho for e in profile]

    mismatches = []
    for v in vertices:
        if v not in expected:
            mismatches.append(f"unexpected hull vertex {v} from Q(n,{owners[v]})")
    for v in expected:
        if v not in vertices:
            mismatches.append(f"expected vertex {v} missing from the hull")
    if not mismatches and slopes != expected_slopes:
        mismatches.append(f"edge slopes {[str(s) for s in slopes]} differ from 1/rho "
                          f"{[str(s) for s in expected_slopes]}")

    ok = not mismatches
    if not ok:
        logger.warning(f"hull cross-check failed: {'; '.join(mismatches)}")
    return ok, HullReport(ok, points, vertices, expected, slopes, expected_slopes, mismatches)

