"""
Series Evaluation Module
Binomial series on circles: truncated evaluation, maximum modulus and empirical growth
"""
from dataclasses import dataclass, field
from fractions import Fraction
from math import ceil
from typing import Any, List, Optional, Sequence, Tuple, Union

import numpy as np
from loguru import logger

from config import CircleConfig
from src.errors import NotDecaying, TruncationNotReached
from src.recurrence import CoefficientSequence

RhoSpec = Union[Fraction, str]


@dataclass
class EvalResult:
    value: Any
    terms_used: int
    tail_bound: Any


@dataclass
class EmpiricalGrowth:
    radii: List[float]
    logM: List[float]
    rho_fit: Union[Fraction, float, str]
    L_fit: Optional[float]
    L_endpoint: Optional[float] = None
    refused: List[Tuple[float, int]] = field(default_factory=list)
    trending: bool = False

    @property
    def degenerate(self) -> bool:
        return self.rho_fit == "degenerate"

    def verdict(self, L_exact: float) -> Tuple[str, float]:
        """("pass" | "fail" | "degenerate", bracket); the bracket widens while log M / r^rho still trends"""
        if self.degenerate or self.L_fit is None:
            return "degenerate", 0.0
        bracket = CircleConfig.WIDE_BRACKET if self.trending else CircleConfig.NARROW_BRACKET
        ok = abs(self.L_fit / L_exact - 1) <= bracket
        return ("pass" if ok else "fail"), bracket


def required_terms(r: float, rho: Union[Fraction, float]) -> int:
    return ceil(CircleConfig.BUDGET_FACTOR * float(r) ** float(rho))


def _terminates(seq: CoefficientSequence) -> bool:
    """A single term, or an upper half of zeros: summed exactly, no budget or tail bound"""
    return seq.N == 0 or all(a == 0 for a in seq.values[seq.N // 2 + 1:])


def eval_series(seq: CoefficientSequence, z, rho: Optional[Fraction] = None) -> EvalResult:
    """
    Partial sum of sum a_n z^(n) with a geometric tail bound

    T is the first nonzero term from which every later nonzero term shrinks by
    TAIL_RATIO per index step and |term_T|/(1 - TAIL_RATIO) < 2^(-prec/4)|sum|;
    that quotient bounds the tail.
    """
    ctx = seq.ctx
    z = ctx.mpc(z)
    if rho is not None and not _terminates(seq) and seq.N < required_terms(abs(z), rho):
        need = required_terms(abs(z), rho)
        raise TruncationNotReached(f"|z|={ctx.nstr(abs(z), 6)} needs N >= {need}, have {seq.N}",
                                   required_terms=need)

    falling = ctx.mpc(1)
    total = ctx.mpc(0)
    indices, moduli, sums = [], [], []
    for n, a in enumerate(seq.values):
        if falling == 0:
            return EvalResult(total, n, ctx.mpf(0))
        if a != 0:
            term = a * falling
            total += term
            indices.append(n)
            moduli.append(abs(term))
            sums.append(total)
        falling *= z - n

    if falling == 0 or _terminates(seq):
        return EvalResult(total, seq.N + 1, ctx.mpf(0))

    # earliest start of a run of shrinking terms that reaches the last computed term
    ratio = ctx.mpf(CircleConfig.TAIL_RATIO.numerator) / CircleConfig.TAIL_RATIO.denominator
    start = len(indices) - 1
    while start > 0 and moduli[start] <= moduli[start - 1] * ratio ** (indices[start] - indices[start - 1]):
        start -= 1

    threshold = ctx.ldexp(ctx.mpf(1), -(seq.precision_bits // 4))
    for t in range(start, len(indices) - 1):
        bound = moduli[t] / (1 - ratio)
        if bound < threshold * abs(sums[t]):
            return EvalResult(sums[t], indices[t] + 1, bound)

    need = 2 * (seq.N + 1) if rho is None else max(2 * (seq.N + 1), required_terms(abs(z), rho))
    raise TruncationNotReached(f"tail bound not reached within N={seq.N} at |z|={ctx.nstr(abs(z), 6)}",
                               required_terms=need)


def max_modulus(seq: CoefficientSequence, r: float, samples: int = CircleConfig.SAMPLES,
                rho: Optional[Fraction] = None):
    """max |f| over `samples` equally spaced points of |z| = r, combined in index order"""
    if samples < CircleConfig.MIN_SAMPLES:
        raise ValueError(f"samples must be at least {CircleConfig.MIN_SAMPLES}")
    ctx = seq.ctx
    radius = ctx.mpf(r)
    best = ctx.mpf(0)
    for k in range(samples):
        z = radius * ctx.expjpi(ctx.mpf(2 * k) / samples)
        modulus = abs(eval_series(seq, z, rho).value)
        if modulus > best:
            best = modulus
    return best


def empirical_growth(seq: CoefficientSequence, radii: Sequence[float], rho_exact: RhoSpec = "fit",
                     samples: int = CircleConfig.SAMPLES) -> EmpiricalGrowth:
    """
    log M(r) on the given radii and the fitted type

    L_fit is the r^rho coefficient of log M ~ L r^rho + c log r + b; L_endpoint is
    log M(r_max) / r_max^rho. Radii beyond the term budget are refused, not truncated.
    """
    radii = sorted(float(r) for r in radii)
    if len(radii) < CircleConfig.MIN_RADII or len(set(radii)) != len(radii):
        raise ValueError(f"need at least {CircleConfig.MIN_RADII} distinct radii")

    fit_rho = rho_exact == "fit"
    budget_rho = None if fit_rho else Fraction(rho_exact)
    if fit_rho:
        from src.growth_estimate import chi_estimate
        try:
            chi = chi_estimate(seq)
            budget_rho = Fraction(chi).limit_denominator(64) if 0 < chi < 1 else None
        except NotDecaying:
            budget_rho = None

    kept, logs, refused = [], [], []
    for r in radii:
        if budget_rho is not None and seq.N < required_terms(r, budget_rho):
            refused.append((r, required_terms(r, budget_rho)))
            logger.warning(f"radius {r:g} refused: needs N >= {required_terms(r, budget_rho)}, have {seq.N}")
            continue
        try:
            M = max_modulus(seq, r, samples, budget_rho)
        except TruncationNotReached as exc:
            refused.append((r, exc.required_terms or 0))
            logger.warning(f"radius {r:g} refused: {exc}")
            continue
        kept.append(r)
        logs.append(float(seq.ctx.log(M)) if M > 0 else float("-inf"))

    if not kept:
        return EmpiricalGrowth([], [], "degenerate", None, None, refused)

    flat = max(logs) - min(logs) < 1e-9
    if flat or min(logs) <= 0:
        return EmpiricalGrowth(kept, logs, "degenerate", None, None, refused)

    if fit_rho:
        if len(kept) < 2:
            return EmpiricalGrowth(kept, logs, "degenerate", None, None, refused)
        slope, _ = np.polyfit(np.log(kept), np.log(logs), 1)
        rho: Union[Fraction, float] = float(slope)
    else:
        rho = Fraction(rho_exact)

    x = np.array(kept)
    y = np.array(logs)
    scaled = y / x ** float(rho)
    L_endpoint = float(scaled[-1])
    L_fit = L_endpoint
    if len(kept) >= CircleConfig.MIN_RADII:
        design = np.column_stack([x ** float(rho), np.log(x), np.ones_like(x)])
        coef, *_ = np.linalg.lstsq(design, y, rcond=None)
        L_fit = float(coef[0])

    diffs = np.diff(scaled)
    trending = len(diffs) > 0 and (bool(np.all(diffs > 0)) or bool(np.all(diffs < 0)))
    if trending:
        logger.info("log M / r^rho still monotone across radii; verdict bracket widened")
    return EmpiricalGrowth(kept, logs, rho, L_fit, L_endpoint, refused, trending)
