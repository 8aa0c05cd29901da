"""
Recurrence Module
Exact coefficient recurrence for binomial-series solutions and arbitrary-precision coefficient generation

A solution f(z) = sum a_n z^(n) of the difference equation has coefficients satisfying,
for every n >= 0 (with a_k = 0 for k < 0),

    sum_{i=-m}^{d} Q(n, i) a_{n-i} = 0,
    Q(n, i) = sum_j (n-i)^(j) / (i+j)! * Δ^{i+j} P_j(n-j-i).

For n < d the factor (n-i)^(j) kills exactly the terms that the short relations drop,
so one uniform relation covers both ranges.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from functools import lru_cache
from math import factorial
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

import mpmath
import sympy
from sympy.polys.domains import QQ
from loguru import logger

from config import RecurrenceConfig, EstimateConfig
from src.errors import InconsistentConstraints, PrecisionTooLow, SegmentOutOfRange
from src.exact_algebra import (
    ComplexRational,
    Poly,
    ZERO,
    ONE,
    delta,
    falling_factorial_poly,
    nullspace,
    rref,
    shift,
)
from src.newton_polygon import DifferenceEquation, GrowthProfile, SSequence, growth_profile, s_sequence


@lru_cache(maxsize=None)
def big_context(bits: int) -> mpmath.MPContext:
    """One mpmath context per precision; mpf exponents are unbounded"""
    ctx = mpmath.MPContext()
    ctx.prec = bits
    return ctx


def to_big(ctx: mpmath.MPContext, x: ComplexRational):
    re = ctx.mpf(x.re.numerator) / x.re.denominator
    if x.im == 0:
        return ctx.mpc(re)
    return ctx.mpc(re, ctx.mpf(x.im.numerator) / x.im.denominator)


class Provenance(Enum):
    RECURRENCE = "recurrence"
    CLOSED_FORM = "closed_form"
    USER = "user"


@dataclass(frozen=True)
class CoefficientSequence:
    """a_0..a_N as mpc values of one precision; exact rationals kept when known"""
    values: Tuple[Any, ...]
    precision_bits: int
    provenance: Provenance = Provenance.RECURRENCE
    exact: Optional[Tuple[ComplexRational, ...]] = None

    def __post_init__(self):
        if not self.values:
            raise ValueError("a coefficient sequence needs at least a_0")

    @classmethod
    def from_exact(cls, values: Sequence[ComplexRational], precision_bits: int,
                   provenance: Provenance = Provenance.RECURRENCE) -> "CoefficientSequence":
        ctx = big_context(precision_bits)
        exact = tuple(ComplexRational.coerce(v) for v in values)
        return cls(tuple(to_big(ctx, v) for v in exact), precision_bits, provenance, exact)

    @property
    def N(self) -> int:
        return len(self.values) - 1

    @property
    def ctx(self) -> mpmath.MPContext:
        return big_context(self.precision_bits)

    def scaled(self, c) -> "CoefficientSequence":
        if _is_exact(c):
            c = ComplexRational.coerce(c)
            if self.exact is not None:
                return CoefficientSequence.from_exact([c * v for v in self.exact],
                                                      self.precision_bits, self.provenance)
            factor = to_big(self.ctx, c)
        else:
            factor = self.ctx.mpc(c)
        return CoefficientSequence(tuple(factor * v for v in self.values),
                                   self.precision_bits, self.provenance)

    def truncated(self, n: int) -> "CoefficientSequence":
        exact = self.exact[: n + 1] if self.exact is not None else None
        return CoefficientSequence(self.values[: n + 1], self.precision_bits, self.provenance, exact)


@dataclass(frozen=True)
class Relation:
    """sum_k coeffs[k] a_k = 0, coming from the coefficient of z^(n)"""
    n: int
    coeffs: Tuple[Tuple[int, ComplexRational], ...]

    def row(self, ncols: int) -> List[ComplexRational]:
        out = [ZERO] * ncols
        for k, c in self.coeffs:
            out[k] = c
        return out


@dataclass(frozen=True)
class RecurrenceSystem:
    m: int
    d: int
    sseq: SSequence
    qpolys: Dict[int, Poly]
    low_constraints: Tuple[Relation, ...]
    resonances: Tuple[int, ...] = ()
    prefix_size: int = 0
    prefix_basis: Tuple[Tuple[ComplexRational, ...], ...] = ()
    free_indices: Tuple[int, ...] = ()
    equation: Optional[DifferenceEquation] = None

    @property
    def dimension(self) -> int:
        """Number of free parameters of the coefficient solution space"""
        return len(self.free_indices)

    def q_values(self, n: int) -> Dict[int, ComplexRational]:
        return {i: q(n) for i, q in self.qpolys.items()}

    def relation(self, n: int) -> Relation:
        q = self.q_values(n)
        coeffs = tuple((n - i, q[i]) for i in range(self.d, -self.m - 1, -1)
                       if n - i >= 0 and not q[i].is_zero())
        return Relation(n, coeffs)


@dataclass(frozen=True)
class SegmentRoots:
    """
    The roots of γ^Δ = target, Δ = (d_{s_{j+1}} - s_{j+1}) - (d_{s_j} - s_j)

    |γ|² = modulus_squared ** (1/Δ) exactly; the arguments are equally spaced.
    """
    j: int
    degree: int
    target: ComplexRational
    modulus_squared: Fraction
    multiplicities: Tuple[int, ...] = ()

    def arguments(self, bits: int = 64) -> List[Any]:
        ctx = big_context(bits)
        base = ctx.arg(to_big(ctx, self.target))
        return [(base + 2 * ctx.pi * t) / self.degree for t in range(self.degree)]

    def roots(self, bits: int = 64) -> List[Any]:
        ctx = big_context(bits)
        modulus = ctx.power(ctx.mpf(self.modulus_squared.numerator) / self.modulus_squared.denominator,
                            ctx.mpf(1) / (2 * self.degree))
        return [modulus * ctx.expj(theta) for theta in self.arguments(bits)]


class BasisClass(Enum):
    POLYNOMIAL = "polynomial"
    ORDER = "order"
    OTHER = "other"


@dataclass
class BasisMember:
    sequence: CoefficientSequence
    kind: BasisClass
    chi_hat: Optional[float] = None
    rho: Optional[Fraction] = None
    segment: Optional[int] = None
    note: str = ""


@dataclass
class SolutionBasis:
    members: List[BasisMember]
    N: int
    extension: int
    warnings: List[str] = field(default_factory=list)

    @property
    def dimension(self) -> int:
        return len(self.members)

    def of_order_below_one(self) -> List[BasisMember]:
        return [b for b in self.members if b.kind is BasisClass.ORDER]


# =============================================================================
# SYSTEM CONSTRUCTION
# =============================================================================

def _q_poly(eq: DifferenceEquation, i: int) -> Poly:
    total = Poly()
    for j, p in enumerate(eq.polys):
        order = i + j
        if order < 0 or p.is_zero():
            continue
        diff = delta(p, order)
        if diff.is_zero():
            continue
        term = shift(falling_factorial_poly(j), -i) * shift(diff, -(j + i))
        total = total + term.scale(Fraction(1, factorial(order)))
    return total


def nonnegative_integer_roots(p: Poly) -> List[int]:
    """Nonnegative integer zeros, read off the linear factors over QQ"""
    if p.is_zero():
        raise ValueError("zero polynomial has every integer as a root")
    n = sympy.Symbol("n")
    real = sympy.Poly.from_list([sympy.Rational(c.re.numerator, c.re.denominator) for c in reversed(p.coeffs)], n, domain=QQ)
    imag = sympy.Poly.from_list([sympy.Rational(c.im.numerator, c.im.denominator) for c in reversed(p.coeffs)], n, domain=QQ)
    # an integer zero of a complex polynomial is a common zero of its real and imaginary parts
    common = real.gcd(imag) if not imag.is_zero else real
    found = set()
    for factor, _ in common.factor_list()[1]:
        if factor.degree() != 1:
            continue
        a, b = factor.all_coeffs()
        root = -b / a
        if root.is_integer and root >= 0:
            found.add(int(root))
    return sorted(found)


def build_system(eq: DifferenceEquation) -> RecurrenceSystem:
    m, d = eq.m, eq.d
    sseq = s_sequence(eq)
    qpolys = {i: _q_poly(eq, i) for i in range(-m, d + 1)}

    resonances = tuple(nonnegative_integer_roots(qpolys[-m]))
    if resonances:
        logger.info(f"resonances at n = {list(resonances)}; prefix solved as a linear system")

    n0 = max(resonances, default=-1)
    prefix_size = n0 + m + 1

    partial = RecurrenceSystem(m, d, sseq, qpolys, ())
    low = tuple(partial.relation(n) for n in range(d))
    rows = [partial.relation(n).row(prefix_size) for n in range(n0 + 1)]
    basis, _, free = nullspace(rows, prefix_size)

    rs = RecurrenceSystem(
        m=m,
        d=d,
        sseq=sseq,
        qpolys=qpolys,
        low_constraints=low,
        resonances=resonances,
        prefix_size=prefix_size,
        prefix_basis=tuple(tuple(v) for v in basis),
        free_indices=tuple(free),
        equation=eq,
    )
    logger.debug(f"recurrence of order {m + d} built, {rs.dimension} free parameters")
    return rs


def degree_table_violations(eq: DifferenceEquation, rs: RecurrenceSystem) -> List[str]:
    """
    Checks every row of the Q(n, k) degree table; empty list when all hold

    deg Q(n, k) <= max{d_j : d_j - j >= k} - k, Q(n, k) vanishes when no j
    qualifies, and at each vertex k = d_{s_j} - s_j the degree is exactly s_j
    with the leading coefficient of P_{s_j}.
    """
    sseq = rs.sseq
    excess = {sseq.excess(j): j for j in range(sseq.p)}
    live = [(j, p.degree()) for j, p in enumerate(eq.polys) if not p.is_zero()]
    problems = []

    for k in range(-rs.m, rs.d + 1):
        q = rs.qpolys[k]
        reach = [dj for j, dj in live if dj - j >= k]
        if not reach:
            if not q.is_zero():
                problems.append(f"Q(n,{k}) should vanish identically")
            continue
        if k in excess:
            j = excess[k]
            if q.is_zero() or q.degree() != sseq.indices[j]:
                problems.append(f"deg Q(n,{k}) = {q.degree()}, expected s_{j + 1} = {sseq.indices[j]}")
            elif q.leading() != eq.leading(sseq.indices[j]):
                problems.append(f"leading coefficient of Q(n,{k}) is {q.leading()}, "
                                f"expected {eq.leading(sseq.indices[j])}")
        elif not q.is_zero() and q.degree() > max(reach) - k:
            problems.append(f"deg Q(n,{k}) = {q.degree()} exceeds {max(reach) - k}")
    return problems


def characteristic_roots(rs: RecurrenceSystem, profile: GrowthProfile, j: int) -> SegmentRoots:
    """Roots of B_{j+1} γ^{m+e_j} + B_j γ^{m+e_{j+1}} = 0 other than zero, j one-based"""
    if not 1 <= j <= len(profile):
        raise SegmentOutOfRange(f"segment {j} outside 1..{len(profile)}")
    e_lo, e_hi = rs.sseq.excess(j - 1), rs.sseq.excess(j)
    b_lo, b_hi = rs.qpolys[e_lo].leading(), rs.qpolys[e_hi].leading()
    target = -b_hi / b_lo
    gap = e_hi - e_lo
    return SegmentRoots(j, gap, target, target.abs2(), (1,) * gap)


# =============================================================================
# COEFFICIENT GENERATION
# =============================================================================

def _extend(rs: RecurrenceSystem, values: List[Any], upto: int, lift: Callable[[ComplexRational], Any]):
    """Forward solve in place until values holds a_0..a_upto"""
    m = rs.m
    n = len(values) - m
    while len(values) <= upto:
        q = rs.q_values(n)
        acc = None
        for i in range(-m + 1, rs.d + 1):
            k = n - i
            if k < 0 or q[i].is_zero():
                continue
            term = lift(q[i]) * values[k]
            acc = term if acc is None else acc + term
        values.append(lift(ZERO) if acc is None else -acc / lift(q[-m]))
        n += 1
    return values


def _is_exact(x) -> bool:
    return isinstance(x, (int, Fraction, ComplexRational)) and not isinstance(x, bool)


def generate_coefficients(rs: RecurrenceSystem, seeds: Sequence[Any], N: int,
                          precision_bits: int = RecurrenceConfig.PRECISION_BITS) -> CoefficientSequence:
    """
    a_0..a_N for the solution with the given free parameters

    Exact seeds keep the whole solve exact and convert at the end; other seeds are
    lifted to mpc after the exact prefix.
    """
    if len(seeds) != rs.dimension:
        raise InconsistentConstraints(
            f"expected {rs.dimension} seeds (free indices {list(rs.free_indices)}), got {len(seeds)}")

    if all(_is_exact(s) for s in seeds):
        coeffs = [ComplexRational.coerce(s) for s in seeds]
        prefix = [sum((c * v[k] for c, v in zip(coeffs, rs.prefix_basis)), ZERO)
                  for k in range(rs.prefix_size)]
        values = _extend(rs, prefix, N, lambda x: x)
        seq = CoefficientSequence.from_exact(values[: N + 1], precision_bits)
    else:
        ctx = big_context(precision_bits)
        coeffs = [ctx.mpc(s) for s in seeds]
        prefix = []
        for k in range(rs.prefix_size):
            acc = ctx.mpc(0)
            for c, v in zip(coeffs, rs.prefix_basis):
                if not v[k].is_zero():
                    acc += c * to_big(ctx, v[k])
            prefix.append(acc)
        values = _extend(rs, prefix, N, lambda x: to_big(ctx, x))
        seq = CoefficientSequence(tuple(values[: N + 1]), precision_bits)

    check_residuals(rs, seq)
    return seq


def recurrence_residuals(rs: RecurrenceSystem, seq: CoefficientSequence) -> List[Tuple[int, Any]]:
    """Relative residual |sum| / max|term| of every relation fully inside a_0..a_N"""
    ctx = seq.ctx
    out = []
    for n in range(0, seq.N - rs.m + 1):
        terms = [to_big(ctx, c) * seq.values[k] for k, c in rs.relation(n).coeffs]
        scale = max((abs(t) for t in terms), default=ctx.mpf(0))
        total = abs(ctx.fsum(terms)) if terms else ctx.mpf(0)
        out.append((n, total / scale if scale else ctx.mpf(0)))
    return out


def check_residuals(rs: RecurrenceSystem, seq: CoefficientSequence):
    ctx = seq.ctx
    limit = ctx.ldexp(ctx.mpf(1), -(seq.precision_bits // 2))
    for n, rel in recurrence_residuals(rs, seq):
        if rel > limit:
            raise PrecisionTooLow(
                f"relative residual {ctx.nstr(rel, 5)} at n={n} exceeds 2^-{seq.precision_bits // 2}",
                suggested_bits=2 * seq.precision_bits,
            )


def seeds_from_prefix(rs: RecurrenceSystem, values: Sequence[Any]) -> List[ComplexRational]:
    """
    Free parameters of the solution whose first coefficients are the given values

    Raises InconsistentConstraints when the values break a relation or leave a
    free parameter undetermined.
    """
    given = [ComplexRational.coerce(v) for v in values]
    last = max(rs.prefix_size, len(given)) - 1
    ncols = last + 2  # a_0..a_last plus the right-hand side
    rows = [rs.relation(n).row(last + 1) + [ZERO] for n in range(0, last - rs.m + 1)]
    for k, v in enumerate(given):
        row = [ZERO] * ncols
        row[k], row[-1] = ONE, v
        rows.append(row)

    reduced, pivots = rref(rows, ncols)
    if ncols - 1 in pivots:
        raise InconsistentConstraints("initial values violate the recurrence")

    pivot_rows = dict(zip(pivots, reduced))
    seeds = []
    for f in rs.free_indices:
        row = pivot_rows.get(f)
        if row is None or any(not row[c].is_zero() for c in range(last + 1) if c != f and c not in pivot_rows):
            raise InconsistentConstraints(f"initial values do not determine a_{f}")
        seeds.append(row[-1])
    return seeds


def leading_ratio(seq: CoefficientSequence, mu: Fraction, start: int = 1) -> List[Tuple[int, Any]]:
    """a_{n+1}/a_n · (n+1)^mu, which tends to a characteristic root"""
    ctx = seq.ctx
    power = ctx.mpf(mu.numerator) / mu.denominator
    out = []
    for n in range(start, seq.N):
        a, b = seq.values[n], seq.values[n + 1]
        if a == 0:
            continue
        out.append((n, b / a * ctx.power(n + 1, power)))
    return out


# =============================================================================
# SOLUTION BASIS
# =============================================================================

def _tail_reduce(columns: List[List[ComplexRational]]) -> List[List[ComplexRational]]:
    """
    Column echelon form from the last row upwards

    Each column picked later vanishes at the pivot rows of the earlier ones, which
    isolates the faster-decaying solutions exactly.
    """
    if not columns:
        return []
    remaining = list(range(len(columns)))
    ordered = []
    for row in range(len(columns[0]) - 1, -1, -1):
        if not remaining:
            break
        pivot = next((t for t in remaining if not columns[t][row].is_zero()), None)
        if pivot is None:
            continue
        remaining.remove(pivot)
        pv = columns[pivot]
        for t in remaining:
            factor = columns[t][row]
            if not factor.is_zero():
                scale = factor / pv[row]
                columns[t] = [a - scale * b for a, b in zip(columns[t], pv)]
        ordered.append(pivot)
    ordered.extend(remaining)
    return [columns[t] for t in ordered]


def _normalized(values: List[ComplexRational]) -> List[ComplexRational]:
    lead = next((v for v in values if not v.is_zero()), None)
    if lead is None:
        return values
    return [v / lead for v in values]


def classify(seq: CoefficientSequence, profile: GrowthProfile,
             tolerance: float = EstimateConfig.CHI_TOLERANCE) -> BasisMember:
    from src.growth_estimate import chi_estimate
    from src.errors import NotDecaying

    try:
        chi = chi_estimate(seq)
    except NotDecaying:
        return BasisMember(seq, BasisClass.OTHER, note="not order<1 (coefficients not decaying)")

    if chi == 0.0:
        return BasisMember(seq, BasisClass.POLYNOMIAL, chi_hat=0.0, note="terminating")
    if chi >= 1 - tolerance:
        return BasisMember(seq, BasisClass.OTHER, chi_hat=chi, note="not order<1")

    nearest = min(profile, key=lambda e: abs(chi - float(e.rho)), default=None)
    if nearest is not None and abs(chi - float(nearest.rho)) <= tolerance:
        return BasisMember(seq, BasisClass.ORDER, chi_hat=chi, rho=nearest.rho, segment=nearest.j)
    return BasisMember(seq, BasisClass.OTHER, chi_hat=chi, note="no admissible order within tolerance")


def solution_basis(rs: RecurrenceSystem, N: int = RecurrenceConfig.TERMS,
                   precision_bits: int = RecurrenceConfig.PRECISION_BITS,
                   profile: Optional[GrowthProfile] = None) -> SolutionBasis:
    if profile is None:
        profile = growth_profile(rs.equation)
    minimum = RecurrenceConfig.MIN_TERMS_FACTOR * (rs.m + rs.d)
    if N < minimum:
        raise ValueError(f"N={N} too small, need at least {minimum}")

    extension = max(RecurrenceConfig.TAIL_EXTENSION_MIN, N // RecurrenceConfig.TAIL_EXTENSION_DIVISOR)
    columns = [_extend(rs, list(v), N + extension, lambda x: x) for v in rs.prefix_basis]
    reduced = _tail_reduce(columns)

    members = []
    for values in reduced:
        seq = CoefficientSequence.from_exact(_normalized(values)[: N + 1], precision_bits)
        check_residuals(rs, seq)
        members.append(classify(seq, profile))

    below_one = [b for b in members if b.kind is BasisClass.ORDER]
    logger.info(f"solution basis: {len(members)} members, {len(below_one)} of order below one")
    warnings = ["the n < d relations are imposed; every basis member is a genuine solution"]
    return SolutionBasis(members, N, extension, warnings)
