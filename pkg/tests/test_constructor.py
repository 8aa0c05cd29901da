import random
from fractions import Fraction
from math import gcd

import pytest

from src.constructor import (
    build_shifted,
    construct,
    normalize_shifts,
    parse_lambda,
    parse_sigma,
    reference_solution,
    shift_expansion,
    sigma_from_float,
    target_polynomial,
)
from src.errors import InvalidLambda, InvalidSigma
from src.exact_algebra import Poly, delta, shift
from src.newton_polygon import growth_profile
from src.recurrence import build_system, check_residuals


def test_target_polynomial():
    assert target_polynomial(Fraction(1, 2), Fraction(1)) == Poly.of(0, -2, 4)


def test_half_order_coefficients():
    se = build_shifted("1/2", 1)
    assert (se.p, se.q) == (2, 1)
    assert se.coefficients == (1, 2, 4)
    assert se.ratios() == (Fraction(1, 4), Fraction(1, 2))


def test_third_order_ratios():
    se = build_shifted("1/3", 1)
    a0_over_ap, a0_over_a1 = se.ratios()
    # A_0/A_p = (λσ)^p, A_0/A_1 = 1/F(1)
    assert a0_over_ap == Fraction(1, 27)
    assert a0_over_a1 == Fraction(1, 6)


def test_leading_coefficient_is_smallest_integer():
    se = build_shifted("2/3", "3/2")
    assert all(a.denominator == 1 for a in se.coefficients)
    assert se.coefficients[0] > 0
    assert se.ratios()[0] == (Fraction(2, 3) * Fraction(3, 2)) ** 3


def test_normalized_half_order_equation():
    eq = normalize_shifts(build_shifted("1/2", 1))
    assert eq.polys[2] == Poly.of(12, 14, 4)
    assert eq.polys[1] == Poly.of(2, 1)
    assert eq.polys[0] == Poly.of(-2, -1)


def test_shift_expansion():
    # Δf(z+1) = Δf(z) + Δ²f(z)
    assert shift_expansion(1, 1) == [0, 1, 1]
    # f(z+2) = f + 2Δf + Δ²f
    assert shift_expansion(0, 2) == [1, 2, 1]
    assert shift_expansion(2, 0) == [0, 0, 1]


@pytest.mark.parametrize("lam, sigma", [
    ("1/2", "1"),
    ("1/3", "2"),
    ("2/3", "3/2"),
    ("3/4", "1/5"),
])
def test_profile_round_trip(lam, sigma):
    eq, _ = construct(lam, sigma, N=16)
    assert growth_profile(eq).contains(Fraction(lam), Fraction(sigma))


@pytest.mark.parametrize("lam, sigma", [("1/2", "1"), ("1/3", "2"), ("2/3", "3/2")])
def test_reference_solution_satisfies_recurrence(lam, sigma):
    eq, seq = construct(lam, sigma, N=60, precision_bits=256)
    check_residuals(build_system(eq), seq)


def test_constructed_equations_have_no_resonance():
    eq, _ = construct("2/5", "7", N=8)
    assert build_system(eq).resonances == ()


def test_reference_solution_values():
    seq = reference_solution("2/3", 1, N=12)
    assert seq.exact[0] == 1
    assert seq.exact[1] == 0
    assert seq.exact[2] == Fraction(1, 6)
    assert seq.exact[4] == Fraction(1, 720)
    assert seq.exact[3] == 0


@pytest.mark.parametrize("bad", ["1", "0", "3/2", "-1/2", 0.5, "x"])
def test_invalid_lambda(bad):
    with pytest.raises(InvalidLambda):
        parse_lambda(bad)


@pytest.mark.parametrize("bad", ["0", "-1", 1.5, "a/b"])
def test_invalid_sigma(bad):
    with pytest.raises(InvalidSigma):
        parse_sigma(bad)


def test_sigma_from_float():
    assert sigma_from_float("0.5") == Fraction(1, 2)
    tenth = sigma_from_float("0.1")
    assert tenth.denominator & (tenth.denominator - 1) == 0
    assert abs(tenth - Fraction(1, 10)) < Fraction(1, 2 ** 66)
    with pytest.raises(InvalidSigma):
        sigma_from_float("-2")


def test_shift_expansion_matches_the_operator():
    rng = random.Random(11)
    for m in range(4):
        for k in range(4):
            weights = shift_expansion(m, k)
            for _ in range(5):
                f = Poly(tuple(Fraction(rng.randint(-9, 9), rng.randint(1, 4))
                               for _ in range(rng.randint(1, 7))))
                expanded = Poly()
                for i, e in enumerate(weights):
                    expanded = expanded + delta(f, i).scale(e)
                assert shift(delta(f, m), k) == expanded, (m, k, f)


def test_random_round_trips():
    rng = random.Random(7)
    for _ in range(20):
        p = rng.randint(2, 6)
        q = rng.choice([q for q in range(1, p) if gcd(p, q) == 1])
        lam = Fraction(q, p)
        sigma = rng.choice([Fraction(1, 2), Fraction(1), Fraction(2), Fraction(3)])
        eq, seq = construct(lam, sigma, N=24, precision_bits=256)
        assert growth_profile(eq).contains(lam, sigma), (lam, sigma)
        check_residuals(build_system(eq), seq)
