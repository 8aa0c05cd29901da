import random
from fractions import Fraction
from math import factorial

import pytest

from src.errors import InconsistentConstraints, PrecisionTooLow, SegmentOutOfRange
from src.exact_algebra import ComplexRational, Poly
from src.newton_polygon import DifferenceEquation, growth_profile
from src.recurrence import (
    BasisClass,
    CoefficientSequence,
    Provenance,
    build_system,
    characteristic_roots,
    check_residuals,
    generate_coefficients,
    leading_ratio,
    nonnegative_integer_roots,
    recurrence_residuals,
    seeds_from_prefix,
    solution_basis,
)


def cosine_coefficient(n: int) -> Fraction:
    return Fraction((-1) ** n, factorial(2 * n))


class TestSystem:
    def test_q_polynomials(self, half_order_system):
        rs = half_order_system
        assert rs.qpolys[0] == Poly.of(1)
        assert rs.qpolys[-1] == Poly.of(3, 7, 4)
        # Q(n, -m) = (n + m)^(m) P_m(n)
        assert rs.qpolys[-2] == Poly.of(2, 3, 1) * Poly.of(6, 4)
        assert rs.qpolys[1].is_zero()

    def test_no_resonance(self, half_order_system):
        rs = half_order_system
        assert rs.resonances == ()
        assert rs.prefix_size == 2
        assert rs.free_indices == (0, 1)
        assert rs.dimension == 2

    def test_resonance_enlarges_prefix(self, resonant_eq):
        rs = build_system(resonant_eq)
        assert rs.resonances == (2,)
        assert rs.prefix_size == 4
        assert rs.free_indices == (1, 3)
        assert rs.dimension == 2

    def test_integer_roots(self):
        assert nonnegative_integer_roots(Poly.of(-6, 1) * Poly.of(1, 1) * Poly.of(0, 1)) == [0, 6]
        assert nonnegative_integer_roots(Poly.of(6, 4)) == []

    def test_integer_roots_far_from_the_origin(self):
        assert nonnegative_integer_roots(Poly.of(-10 ** 9, 1) * Poly.of(7, 1)) == [10 ** 9]
        assert nonnegative_integer_roots(Poly.of(10 ** 7, 1) * Poly.of(1, 1)) == []

    def test_integer_roots_of_complex_polynomial(self):
        i = ComplexRational(0, 1)
        assert nonnegative_integer_roots(Poly.of(-3, 1) * Poly.of(-i, 1)) == [3]
        assert nonnegative_integer_roots(Poly.of(ComplexRational(0, -2), i)) == [2]

    def test_zero_polynomial_has_no_finite_root_list(self):
        with pytest.raises(ValueError):
            nonnegative_integer_roots(Poly())

    def test_large_shift_builds_without_resonances(self):
        eq = DifferenceEquation.from_coefficients([[1], [10 ** 7, 1]])
        rs = build_system(eq)
        assert rs.resonances == ()
        assert rs.prefix_size == 1

    def test_relation_for_small_n(self, half_order_system):
        # 12 a_2 + 3 a_1 + a_0 = 0
        relation = half_order_system.relation(0)
        assert dict(relation.coeffs) == {2: 12, 1: 3, 0: 1}


class TestGeneration:
    def test_exact_cosine_coefficients(self, half_order_system, cosine_seeds):
        seq = generate_coefficients(half_order_system, cosine_seeds, 40)
        assert seq.N == 40
        assert seq.exact is not None
        assert all(seq.exact[n] == cosine_coefficient(n) for n in range(41))

    def test_float_seeds_agree_with_exact(self, half_order_system):
        exact = generate_coefficients(half_order_system, [1, Fraction(-1, 2)], 10, 256)
        approx = generate_coefficients(half_order_system, [1.0, -0.5], 10, 256)
        assert approx.exact is None
        for a, b in zip(exact.values, approx.values):
            assert abs(a - b) <= abs(a) * 2 ** -150

    def test_seed_count_must_match(self, half_order_system):
        with pytest.raises(InconsistentConstraints):
            generate_coefficients(half_order_system, [1], 10)

    def test_residuals_vanish(self, half_order_system, cosine_seeds):
        seq = generate_coefficients(half_order_system, cosine_seeds, 30)
        assert all(rel < 2 ** -200 for _, rel in recurrence_residuals(half_order_system, seq))

    def test_corrupted_sequence_raises_precision_error(self, half_order_system, cosine_seeds):
        seq = generate_coefficients(half_order_system, cosine_seeds, 30, 128)
        values = list(seq.values)
        values[10] = 2 * values[10]
        broken = CoefficientSequence(tuple(values), 128, Provenance.USER)
        with pytest.raises(PrecisionTooLow) as info:
            check_residuals(half_order_system, broken)
        assert info.value.suggested_bits == 256

    def test_resonant_generation(self, resonant_eq):
        rs = build_system(resonant_eq)
        seq = generate_coefficients(rs, [1, 1], 20)
        # a_0 = -2 a_1 and a_2 = 0 are forced
        assert seq.exact[0] == -2
        assert seq.exact[1] == 1
        assert seq.exact[2] == 0
        assert seq.exact[3] == 1

    @pytest.mark.parametrize("fixture", ["half_order_eq", "third_order_eq", "resonant_eq"])
    def test_superposition(self, fixture, request):
        rs = build_system(request.getfixturevalue(fixture))
        rng = random.Random(5)
        for _ in range(5):
            u = [Fraction(rng.randint(-9, 9), rng.randint(1, 6)) for _ in range(rs.dimension)]
            v = [Fraction(rng.randint(-9, 9), rng.randint(1, 6)) for _ in range(rs.dimension)]
            a, b = Fraction(rng.randint(-5, 5), rng.randint(1, 3)), Fraction(rng.randint(-5, 5), rng.randint(1, 3))
            combined = generate_coefficients(rs, [a * x + b * y for x, y in zip(u, v)], 30).exact
            first = generate_coefficients(rs, u, 30).exact
            second = generate_coefficients(rs, v, 30).exact
            assert list(combined) == [a * x + b * y for x, y in zip(first, second)]


class TestSeeds:
    def test_seeds_from_prefix(self, half_order_system):
        assert seeds_from_prefix(half_order_system, [1, Fraction(-1, 2)]) == [1, Fraction(-1, 2)]

    def test_longer_prefix_is_checked(self, half_order_system):
        values = [cosine_coefficient(n) for n in range(6)]
        assert seeds_from_prefix(half_order_system, values) == [1, Fraction(-1, 2)]
        values[4] += 1
        with pytest.raises(InconsistentConstraints):
            seeds_from_prefix(half_order_system, values)

    def test_values_violating_resonant_relation(self, resonant_eq):
        rs = build_system(resonant_eq)
        with pytest.raises(InconsistentConstraints):
            seeds_from_prefix(rs, [1, 0])

    def test_underdetermined_prefix(self, half_order_system):
        with pytest.raises(InconsistentConstraints):
            seeds_from_prefix(half_order_system, [1])


class TestCharacteristicRoots:
    def test_half_order_root(self, half_order_eq, half_order_system):
        profile = growth_profile(half_order_eq)
        roots = characteristic_roots(half_order_system, profile, 1)
        assert roots.degree == 1
        assert roots.target == Fraction(-1, 4)
        assert roots.modulus_squared == Fraction(1, 16)

    def test_segment_out_of_range(self, half_order_eq, half_order_system):
        profile = growth_profile(half_order_eq)
        with pytest.raises(SegmentOutOfRange):
            characteristic_roots(half_order_system, profile, 2)

    def test_ratio_approaches_root(self, half_order_system, cosine_seeds):
        seq = generate_coefficients(half_order_system, cosine_seeds, 200, 128)
        n, ratio = leading_ratio(seq, Fraction(2))[-1]
        assert n == 199
        assert abs(ratio + 0.25) < 1e-2

    def test_three_quarter_roots(self, three_quarter_eq):
        rs = build_system(three_quarter_eq)
        roots = characteristic_roots(rs, growth_profile(three_quarter_eq), 1)
        assert roots.degree == 3
        assert roots.target == Fraction(81, 256)
        moduli = [abs(g) for g in roots.roots(64)]
        assert all(abs(float(r) - 0.75 ** (4 / 3)) < 1e-12 for r in moduli)


class TestSolutionBasis:
    def test_half_order_basis(self, half_order_system):
        basis = solution_basis(half_order_system, 128, 128)
        assert basis.dimension == 2
        below = basis.of_order_below_one()
        assert len(below) == 1
        member = below[0]
        assert member.rho == Fraction(1, 2)
        assert member.segment == 1
        assert abs(member.chi_hat - 0.5) < 0.05
        assert member.sequence.values[0] == 1
        assert abs(member.sequence.values[1] + 0.5) < 1e-12
        others = [b for b in basis.members if b.kind is BasisClass.OTHER]
        assert len(others) == 1

    def test_too_few_terms(self, half_order_system):
        with pytest.raises(ValueError):
            solution_basis(half_order_system, 8)
