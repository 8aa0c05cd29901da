"""
Growth Estimate Module
Order and type of a binomial series read from its coefficients

chi({a_n})  = limsup n log n / (-log|a_n|)
tau         = (1 / e rho) limsup n |a_n|^(rho/n)
"""
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from math import e, exp, log
from typing import List, Optional, Tuple, Union

import numpy as np
from loguru import logger

from config import EstimateConfig, RecurrenceConfig
from src.errors import NotDecaying
from src.newton_polygon import GrowthProfile, ProfileEntry
from src.recurrence import CoefficientSequence, Provenance, big_context


class TypeTrend(Enum):
    FINITE = "finite"
    INFINITY = "infinity-trend"
    ZERO = "zero-trend"


TypeValue = Union[float, TypeTrend]


@dataclass
class GrowthEstimate:
    chi_hat: float
    chi_raw: float
    tau_hat: Optional[TypeValue]
    rho_used: Optional[Fraction]
    window: Tuple[int, int]
    trace: List[Tuple[int, float]] = field(default_factory=list)


@dataclass
class MatchReport:
    verdict: str  # "match", "no-match" or "polynomial"
    chi_hat: Optional[float] = None
    tau_hat: Optional[TypeValue] = None
    entry: Optional[ProfileEntry] = None
    chi_deviation: Optional[float] = None
    type_deviation: Optional[float] = None
    note: str = ""

    @property
    def matched(self) -> bool:
        return self.verdict == "match"


# =============================================================================
# HELPERS
# =============================================================================

def default_window(seq: CoefficientSequence) -> Tuple[int, int]:
    return max(2, seq.N // 2), seq.N


def log_moduli(seq: CoefficientSequence, lo: int, hi: int) -> List[Tuple[int, float]]:
    """(n, log|a_n|) over lo..hi with zero terms skipped; logs come from the mpf, never a float a_n"""
    ctx = seq.ctx
    out = []
    for n in range(lo, hi + 1):
        a = seq.values[n]
        if a == 0:
            continue
        out.append((n, float(ctx.log(abs(a)))))
    return out


def upper_envelope(points: List[Tuple[int, float]]) -> List[Tuple[int, float]]:
    """
    Least concave majorant of (n, log|a_n|), the finite-window picture of the limsup

    End vertices whose edge slope jumps away from the neighbouring edge by more
    than ENVELOPE_SLOPE_JUMP are trimmed: the window edges always sit on the
    majorant, even when the coefficient there is an isolated tiny value.
    """
    hull: List[Tuple[int, float]] = []
    for pt in sorted(points):
        while len(hull) >= 2:
            (x1, y1), (x2, y2) = hull[-2], hull[-1]
            if (x2 - x1) * (pt[1] - y1) - (y2 - y1) * (pt[0] - x1) >= 0:
                hull.pop()
            else:
                break
        hull.append(pt)

    def slope(a, b):
        return (b[1] - a[1]) / (b[0] - a[0])

    jump = EstimateConfig.ENVELOPE_SLOPE_JUMP
    while len(hull) > EstimateConfig.MIN_FIT_POINTS and abs(slope(*hull[-2:]) - slope(*hull[-3:-1])) > jump:
        hull.pop()
    while len(hull) > EstimateConfig.MIN_FIT_POINTS and abs(slope(*hull[:2]) - slope(*hull[1:3])) > jump:
        hull.pop(0)
    return hull


# =============================================================================
# ESTIMATORS
# =============================================================================

def chi_estimate(seq: CoefficientSequence, window: Optional[Tuple[int, int]] = None) -> float:
    """
    Order of the binomial series from its coefficients

    Fits -log|a_n| on the upper envelope of the window with the basis
    {x log x, x, log x, 1}, x = n/N; the x log x coefficient is N/chi. A window
    with only zero terms gives 0.0 (terminating series).
    """
    return _chi(seq, window)[0]


def _chi(seq: CoefficientSequence, window: Optional[Tuple[int, int]] = None) -> Tuple[float, float]:
    lo, hi = window or default_window(seq)
    points = log_moduli(seq, lo, hi)
    if not points:
        logger.debug(f"every coefficient in [{lo}, {hi}] is zero")
        return 0.0, 0.0

    top = max(value for _, value in points)
    if top >= 0:
        raise NotDecaying(f"max log|a_n| over [{lo}, {hi}] is {top:.3f} >= 0")

    raw = max(n * log(n) / -value for n, value in points)
    envelope = upper_envelope(points)
    if len(envelope) < EstimateConfig.MIN_FIT_POINTS:
        return raw, raw

    x = np.array([n for n, _ in envelope], dtype=float) / hi
    y = -np.array([value for _, value in envelope])
    design = np.column_stack([x * np.log(x), x, np.log(x), np.ones_like(x)])
    coef, *_ = np.linalg.lstsq(design, y, rcond=None)
    alpha = coef[0] / hi
    chi = float(1.0 / alpha) if alpha > 0 else float("inf")
    return chi, raw


def type_trace(seq: CoefficientSequence, rho: Fraction, lo: int, hi: int) -> List[Tuple[int, float]]:
    """(n, n|a_n|^(rho/n)) with zero terms skipped"""
    r = float(rho)
    return [(n, exp(log(n) + r * value / n)) for n, value in log_moduli(seq, max(lo, 1), hi)]


def _trend(seq: CoefficientSequence, rho: Fraction) -> TypeTrend:
    N = seq.N
    edges = [N >> (EstimateConfig.TREND_WINDOWS - k) for k in range(EstimateConfig.TREND_WINDOWS + 1)]
    maxima = []
    for a, b in zip(edges, edges[1:]):
        trace = type_trace(seq, rho, max(a, 2), b)
        if not trace:
            return TypeTrend.FINITE
        maxima.append(max(v for _, v in trace))

    ratio = maxima[-1] / maxima[0]
    rising = all(x < y for x, y in zip(maxima, maxima[1:]))
    falling = all(x > y for x, y in zip(maxima, maxima[1:]))
    if rising and ratio > EstimateConfig.TREND_RATIO:
        return TypeTrend.INFINITY
    if falling and ratio < 1 / EstimateConfig.TREND_RATIO:
        return TypeTrend.ZERO
    return TypeTrend.FINITE


def type_estimate(seq: CoefficientSequence, rho: Fraction,
                  window: Optional[Tuple[int, int]] = None) -> TypeValue:
    """
    Type of the binomial series for a known order rho in (0, 1)

    Returns TypeTrend.INFINITY / TypeTrend.ZERO when the trace keeps rising
    (falling) across the dyadic windows below N.
    """
    rho = Fraction(rho)
    if not 0 < rho < 1:
        raise ValueError(f"rho must lie in (0, 1), got {rho}")

    lo, hi = window or default_window(seq)
    points = log_moduli(seq, lo, hi)
    if not points:
        return 0.0
    if max(v for _, v in points) >= 0:
        raise NotDecaying(f"coefficients are not below 1 over [{lo}, {hi}]")

    trend = _trend(seq, rho)
    if trend is not TypeTrend.FINITE:
        logger.debug(f"type trace shows {trend.value} at rho={rho}")
        return trend

    peak = max(v for _, v in type_trace(seq, rho, lo, hi))
    return peak / (e * float(rho))


def estimate_growth(seq: CoefficientSequence, rho: Optional[Fraction] = None,
                    with_trace: bool = False) -> GrowthEstimate:
    """
    chi and tau together; without rho the type is taken at chi_hat rounded
    to a small-denominator rational
    """
    window = default_window(seq)
    chi, raw = _chi(seq, window)
    if rho is None and 0 < chi < 1:
        rho = Fraction(chi).limit_denominator(12)
    tau = type_estimate(seq, rho, window) if rho is not None and 0 < rho < 1 else None
    trace = type_trace(seq, rho, *window) if with_trace and rho is not None else []
    return GrowthEstimate(chi, raw, tau, rho, window, trace)


def profile_match(seq: CoefficientSequence, profile: GrowthProfile,
                  chi_tolerance: float = EstimateConfig.CHI_TOLERANCE,
                  type_tolerance: float = EstimateConfig.TYPE_TOLERANCE) -> MatchReport:
    try:
        chi = chi_estimate(seq)
    except NotDecaying as exc:
        return MatchReport("no-match", note=str(exc))

    if chi == 0.0:
        return MatchReport("polynomial", chi_hat=0.0, note="terminating series")
    if profile.is_empty:
        return MatchReport("no-match", chi_hat=chi, note="profile is empty")

    entry = min(profile, key=lambda en: abs(chi - float(en.rho)))
    chi_dev = abs(chi - float(entry.rho))
    tau = type_estimate(seq, entry.rho)
    if isinstance(tau, TypeTrend):
        return MatchReport("no-match", chi, tau, entry, chi_dev, None, note=tau.value)

    type_dev = abs(tau / float(entry.type) - 1)
    verdict = "match" if chi_dev <= chi_tolerance and type_dev <= type_tolerance else "no-match"
    return MatchReport(verdict, chi, tau, entry, chi_dev, type_dev)


# =============================================================================
# REFERENCE FAMILIES
# =============================================================================

def mean_type_family(rho: Fraction, tau: Fraction, N: int,
                     precision_bits: int = RecurrenceConfig.PRECISION_BITS) -> CoefficientSequence:
    """a_n = (e rho tau / n)^(n/rho): order rho, type tau"""
    ctx = big_context(precision_bits)
    r = ctx.mpf(Fraction(rho).numerator) / Fraction(rho).denominator
    t = ctx.mpf(Fraction(tau).numerator) / Fraction(tau).denominator
    values = [ctx.mpc(1)] + [ctx.mpc(ctx.power(ctx.e * r * t / n, n / r)) for n in range(1, N + 1)]
    return CoefficientSequence(tuple(values), precision_bits, Provenance.CLOSED_FORM)


def maximum_type_family(rho: Fraction, N: int,
                        precision_bits: int = RecurrenceConfig.PRECISION_BITS) -> CoefficientSequence:
    """a_n = (log^rho n / n)^(n/rho): order rho, infinite type"""
    ctx = big_context(precision_bits)
    r = ctx.mpf(Fraction(rho).numerator) / Fraction(rho).denominator
    values = [ctx.mpc(1), ctx.mpc(0)]
    values += [ctx.mpc(ctx.power(ctx.power(ctx.log(n), r) / n, n / r)) for n in range(2, N + 1)]
    return CoefficientSequence(tuple(values[: N + 1]), precision_bits, Provenance.CLOSED_FORM)


def minimum_type_family(rho: Fraction, N: int,
                        precision_bits: int = RecurrenceConfig.PRECISION_BITS) -> CoefficientSequence:
    """a_n = 1 / (n^(1/rho) log n)^n: order rho, type zero"""
    ctx = big_context(precision_bits)
    r = ctx.mpf(Fraction(rho).numerator) / Fraction(rho).denominator
    values = [ctx.mpc(1), ctx.mpc(0)]
    values += [ctx.mpc(1 / ctx.power(ctx.power(n, 1 / r) * ctx.log(n), n)) for n in range(2, N + 1)]
    return CoefficientSequence(tuple(values[: N + 1]), precision_bits, Provenance.CLOSED_FORM)
