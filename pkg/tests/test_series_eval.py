import random
from fractions import Fraction

import pytest

from src.errors import TruncationNotReached
from src.recurrence import CoefficientSequence, generate_coefficients
from src.series_eval import (
    EmpiricalGrowth,
    empirical_growth,
    eval_series,
    max_modulus,
    required_terms,
)


@pytest.fixture
def cosine(half_order_system, cosine_seeds):
    return generate_coefficients(half_order_system, cosine_seeds, 128, 128)


def test_polynomial_series():
    # 1 + 2z + 3z(z-1)
    seq = CoefficientSequence.from_exact([1, 2, 3] + [0] * 61, 64)
    result = eval_series(seq, 5)
    assert complex(result.value) == 71
    assert result.tail_bound == 0


def test_nonnegative_integer_argument_is_exact(cosine):
    result = eval_series(cosine, 3)
    assert result.terms_used == 4
    assert result.tail_bound == 0
    assert abs(result.value - cosine.ctx.mpf(-31) / 120) < 2 ** -100


def test_tail_bound_covers_remaining_terms(cosine):
    ctx = cosine.ctx
    z = ctx.mpc(-3.5, 0.25)
    result = eval_series(cosine, z)
    falling, full = ctx.mpc(1), ctx.mpc(0)
    for n, a in enumerate(cosine.values):
        full += a * falling
        falling *= z - n
    assert result.terms_used < cosine.N
    assert abs(result.value - full) <= result.tail_bound
    assert result.tail_bound < ctx.ldexp(ctx.mpf(1), -31) * abs(full)


def test_budget_refusal(cosine):
    with pytest.raises(TruncationNotReached) as info:
        eval_series(cosine, 400, rho=Fraction(1, 2))
    assert info.value.required_terms == 160


def test_required_terms():
    assert required_terms(400, Fraction(1, 2)) == 160
    assert required_terms(100, Fraction(1, 2)) == 80


def test_max_modulus_needs_enough_samples(cosine):
    with pytest.raises(ValueError):
        max_modulus(cosine, 10, samples=16)


def test_max_modulus_of_constant():
    seq = CoefficientSequence.from_exact([1] + [0] * 63, 64)
    assert max_modulus(seq, 10, samples=64) == 1


def test_empirical_growth_needs_four_radii(cosine):
    with pytest.raises(ValueError):
        empirical_growth(cosine, [10, 20, 40], Fraction(1, 2))
    with pytest.raises(ValueError):
        empirical_growth(cosine, [10, 20, 20, 40], Fraction(1, 2))


def test_constant_is_degenerate():
    seq = CoefficientSequence.from_exact([1] + [0] * 63, 64)
    growth = empirical_growth(seq, [10, 20, 40, 80], "fit", samples=64)
    assert growth.degenerate
    assert growth.verdict(1.0) == ("degenerate", 0.0)


def test_large_radius_refused(cosine):
    growth = empirical_growth(cosine, [50, 100, 200, 400], Fraction(1, 2), samples=64)
    assert growth.refused == [(400.0, 160)]
    assert growth.radii == [50.0, 100.0, 200.0]
    assert all(a < b for a, b in zip(growth.logM, growth.logM[1:]))
    assert growth.L_fit == growth.L_endpoint


def test_verdict_brackets():
    growth = EmpiricalGrowth([1, 2, 3, 4], [1, 2, 3, 4], Fraction(1, 2), L_fit=1.05)
    assert growth.verdict(1.0) == ("pass", 0.10)
    growth.L_fit = 1.12
    assert growth.verdict(1.0) == ("fail", 0.10)
    growth.trending = True
    assert growth.verdict(1.0) == ("pass", 0.15)


def test_single_term_series_is_constant():
    seq = CoefficientSequence.from_exact([Fraction(3, 2)], 64)
    result = eval_series(seq, 1000, rho=Fraction(1, 2))
    assert result.value == seq.ctx.mpf(1.5)
    assert result.terms_used == 1
    assert result.tail_bound == 0
    assert max_modulus(seq, 1000, samples=64, rho=Fraction(1, 2)) == 1.5


@pytest.fixture(scope="module")
def long_cosine():
    from src.newton_polygon import DifferenceEquation
    from src.recurrence import build_system

    rs = build_system(DifferenceEquation.from_coefficients([[1], [3], [6, 4]]))
    return generate_coefficients(rs, [1, Fraction(-1, 2)], 400, 256)


def test_tail_bound_is_sound_on_random_points(long_cosine):
    ctx = long_cosine.ctx
    rng = random.Random(17)
    for _ in range(20):
        z = ctx.mpf(rng.uniform(0, 100)) * ctx.expjpi(ctx.mpf(rng.uniform(-1, 1)))
        result = eval_series(long_cosine, z)
        falling, full = ctx.mpc(1), ctx.mpc(0)
        for n, a in enumerate(long_cosine.values):
            full += a * falling
            falling *= z - n
        assert abs(result.value - full) <= result.tail_bound + ctx.ldexp(abs(full), -200), z


@pytest.mark.parametrize("r", [10, 50, 100])
def test_max_modulus_stable_under_finer_sampling(long_cosine, r):
    coarse = max_modulus(long_cosine, r, samples=64)
    fine = max_modulus(long_cosine, r, samples=128)
    assert float(fine) == pytest.approx(float(coarse), rel=1e-9)
