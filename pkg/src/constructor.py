"""
Constructor Module
Difference equations with an entire solution of prescribed rational order λ = q/p and type σ

The shifted form is

    A_p z^(p) Δ^p f(z-p) + ... + A_1 z Δf(z-1) - A_0 z^(q) f(z-q) = 0,

whose binomial-series solution is a_{qt} = σ^{pt}/(pt)!, all other a_n = 0.
"""
from dataclasses import dataclass
from fractions import Fraction
from math import comb, factorial, gcd, lcm
from typing import List, Tuple, Union

from loguru import logger

from config import ConstructorConfig, RecurrenceConfig
from src.errors import InvalidLambda, InvalidSigma, InvariantViolation
from src.exact_algebra import (
    Poly,
    falling_factorial_poly,
    monomial_to_falling,
    shift,
)
from src.newton_polygon import DifferenceEquation
from src.recurrence import CoefficientSequence, Provenance, big_context

RationalLike = Union[int, str, Fraction]


@dataclass(frozen=True)
class ShiftedEquation:
    """
    coefficients[j] = A_j; the term for j >= 1 is A_j z^(j) Δ^j f(z - j),
    the q-term is -A_0 z^(q) f(z - q)
    """
    lam: Fraction
    sigma: Fraction
    p: int
    q: int
    coefficients: Tuple[Fraction, ...]

    def __post_init__(self):
        if self.p < 2 or not 1 <= self.q < self.p or gcd(self.p, self.q) != 1:
            raise InvalidLambda(f"need p >= 2, 1 <= q < p, gcd(p, q) = 1; got q={self.q}, p={self.p}")

    @property
    def terms(self) -> List[Tuple[Fraction, int, int]]:
        """(coefficient, Δ power, argument shift), q-term last with Δ power 0"""
        out = [(self.coefficients[j], j, j) for j in range(self.p, 0, -1)]
        out.append((-self.coefficients[0], 0, self.q))
        return out

    def ratios(self) -> Tuple[Fraction, Fraction]:
        """(A_0/A_p, A_0/A_1)"""
        a = self.coefficients
        return a[0] / a[self.p], a[0] / a[1]

    def __str__(self) -> str:
        parts = []
        for c, j, k in self.terms:
            factor = f"z^({j})" if j else f"z^({self.q})"
            op = f"Δ^{j}f(z-{k})" if j else f"f(z-{k})"
            parts.append(f"{c}·{factor}·{op}")
        return " + ".join(parts) + " = 0"


def parse_lambda(value: RationalLike) -> Fraction:
    if isinstance(value, float):
        raise InvalidLambda("order must be given exactly as q/p, not as a float")
    try:
        lam = Fraction(value)
    except (TypeError, ValueError, ZeroDivisionError) as exc:
        raise InvalidLambda(f"cannot read order {value!r}: {exc}") from exc
    if not 0 < lam < 1:
        raise InvalidLambda(f"order {lam} outside (0, 1)")
    return lam


def parse_sigma(value: RationalLike) -> Fraction:
    if isinstance(value, float):
        raise InvalidSigma("type must be exact; use sigma_from_float to rationalize a float")
    try:
        sigma = Fraction(value)
    except (TypeError, ValueError, ZeroDivisionError) as exc:
        raise InvalidSigma(f"cannot read type {value!r}: {exc}") from exc
    if sigma <= 0:
        raise InvalidSigma(f"type {sigma} must be positive")
    return sigma


def sigma_from_float(x: Union[float, str], bits: int = ConstructorConfig.SIGMA_FLOAT_BITS) -> Fraction:
    """x rounded to `bits` significant bits, as an exact binary rational"""
    ctx = big_context(bits)
    value = ctx.mpf(x)
    if not value > 0:
        raise InvalidSigma(f"type {x} must be positive")
    man, exp = value.man_exp
    return Fraction(int(man)) * Fraction(2) ** int(exp)


def target_polynomial(lam: Fraction, sigma: Fraction) -> Poly:
    """(n/λ)^(p) / σ^p as a polynomial in n"""
    p = lam.denominator
    out = Poly.of(1)
    for k in range(p):
        out = out * Poly.of(-k, 1 / lam)
    return out.scale(1 / sigma ** p)


def build_shifted(lam: RationalLike, sigma: RationalLike) -> ShiftedEquation:
    """
    A_j / A_0 are the falling-factorial coefficients of (n/λ)^(p)/σ^p

    A_0 is the least positive integer that makes every A_j an integer.
    """
    lam, sigma = parse_lambda(lam), parse_sigma(sigma)
    p, q = lam.denominator, lam.numerator
    falling = monomial_to_falling(target_polynomial(lam, sigma))
    c = [falling[j].re for j in range(p + 1)]
    if c[0] != 0:
        raise InvariantViolation("target polynomial must vanish at zero")

    a0 = lcm(*(cj.denominator for cj in c[1:]))
    coefficients = (Fraction(a0),) + tuple(a0 * cj for cj in c[1:])
    shifted = ShiftedEquation(lam, sigma, p, q, coefficients)
    logger.debug(f"shifted equation for λ={lam}, σ={sigma}: A = {[str(a) for a in coefficients]}")
    return shifted


def reference_solution(lam: RationalLike, sigma: RationalLike,
                       N: int = RecurrenceConfig.TERMS,
                       precision_bits: int = RecurrenceConfig.PRECISION_BITS) -> CoefficientSequence:
    """a_{qt} = σ^{pt}/(pt)!, zero elsewhere, a_0 = 1"""
    lam, sigma = parse_lambda(lam), parse_sigma(sigma)
    p, q = lam.denominator, lam.numerator
    values = [Fraction(0)] * (N + 1)
    for t in range(N // q + 1):
        values[q * t] = sigma ** (p * t) / factorial(p * t)
    return CoefficientSequence.from_exact(values, precision_bits, Provenance.CLOSED_FORM)


def shift_expansion(m: int, k: int) -> List[int]:
    """Integer e_i with Δ^m f(z+k) = sum_i e_i Δ^i f(z), i = 0..m+k"""
    out = [0] * (m + k + 1)
    for j in range(m + 1):
        sign = -1 if j % 2 else 1
        top = k + m - j
        for i in range(top + 1):
            out[i] += sign * comb(m, j) * comb(top, i)
    return out


def normalize_shifts(se: ShiftedEquation) -> DifferenceEquation:
    """Substitute z -> z + p and expand every shifted Δ^j f into Δ^i f(z)"""
    p = se.p
    polys = [Poly() for _ in range(p + 1)]
    for coefficient, power, offset in se.terms:
        k = p - offset
        weight = shift(falling_factorial_poly(power if power else se.q), p).scale(coefficient)
        for i, e in enumerate(shift_expansion(power, k)):
            if e:
                polys[i] = polys[i] + weight.scale(e)
    return DifferenceEquation(tuple(polys))


def construct(lam: RationalLike, sigma: RationalLike,
              N: int = RecurrenceConfig.TERMS,
              precision_bits: int = RecurrenceConfig.PRECISION_BITS) -> Tuple[DifferenceEquation, CoefficientSequence]:
    se = build_shifted(lam, sigma)
    eq = normalize_shifts(se)
    seq = reference_solution(se.lam, se.sigma, N, precision_bits)
    logger.info(f"constructed order {se.lam}, type {se.sigma}: m = {eq.m}, d = {eq.d}")
    return eq, seq
