import math

import numpy as np
import pytest

from intdims.setlib import (
    BudgetError,
    CountRule,
    RadiusSequence,
    SetSpec,
    gap_count_A,
    has_term_in,
    membership_residual,
    nearest_term,
    radius_term,
    sample,
)

from oracles import brute_gap_count, hausdorff_distance


class TestRadiusSequence:
    def test_power_terms(self):
        assert radius_term(RadiusSequence.power(1.0), 4) == 0.25
        assert radius_term(RadiusSequence.power(2.0), 1) == 1.0

    def test_geometric_terms(self):
        assert radius_term(RadiusSequence.geometric(2.0), 3) == 0.125

    def test_logarithmic_starts_at_log2(self):
        seq = RadiusSequence.logarithmic()
        assert radius_term(seq, 1) == pytest.approx(1.0 / math.log(2.0))
        terms = [radius_term(seq, n) for n in range(1, 50)]
        assert all(a > b for a, b in zip(terms, terms[1:]))

    def test_table_requires_decreasing(self):
        with pytest.raises(ValueError):
            RadiusSequence.from_table([0.5, 0.5, 0.1])
        seq = RadiusSequence.from_table([0.9, 0.5, 0.1])
        assert radius_term(seq, 2) == 0.5
        with pytest.raises(IndexError):
            radius_term(seq, 4)

    def test_geometric_ratio_must_decrease(self):
        with pytest.raises(ValueError):
            RadiusSequence.geometric(1.0)

    def test_terms_strictly_decreasing(self):
        for seq in (RadiusSequence.power(0.3), RadiusSequence.geometric(1.5)):
            terms = [radius_term(seq, n) for n in range(1, 200)]
            assert all(a > b for a, b in zip(terms, terms[1:]))
            assert terms[-1] > 0

    def test_nearest_term(self):
        seq = RadiusSequence.power(1.0)
        assert nearest_term(seq, 0.5) == 0.5
        assert nearest_term(seq, 0.45) == 0.5
        assert nearest_term(seq, 0.28) == pytest.approx(1.0 / 4.0)
        # far below float-resolvable indices: value returned as-is
        assert nearest_term(RadiusSequence.power(0.01), 1e-30) == 1e-30


class TestGapCount:
    def test_power_hits_own_intervals(self):
        for p in (0.5, 1.0, 2.3):
            seq = RadiusSequence.power(p)
            for n in (1, 5, 17):
                assert gap_count_A(seq, p, n) == n

    def test_geometric_matches_brute_force(self):
        seq = RadiusSequence.geometric(2.0)
        terms = [2.0**-i for i in range(1, 64)]
        for n in (1, 2, 4, 9, 30):
            assert gap_count_A(seq, 1.0, n) == brute_gap_count(terms, 1.0, n)
        assert gap_count_A(seq, 1.0, 4) == 2

    def test_logarithmic_first_interval(self):
        # some 1/log m falls in (1/2, 1]: m in [e, e^2), e.g. m = 3
        assert gap_count_A(RadiusSequence.logarithmic(), 1.0, 1) == 1

    def test_logarithmic_matches_brute_force(self):
        seq = RadiusSequence.logarithmic()
        terms = [1.0 / math.log(m) for m in range(2, 10**6)]
        for p in (0.5, 1.0):
            for n in (3, 7, 12):
                assert gap_count_A(seq, p, n) == brute_gap_count(terms, p, n)

    def test_monotone_and_bounded(self):
        seq = RadiusSequence.geometric(3.0)
        prev = 0
        for n in range(1, 40):
            a = gap_count_A(seq, 0.8, n)
            assert prev <= a <= n
            prev = a

    def test_has_term_in_table(self):
        seq = RadiusSequence.from_table([0.9, 0.5, 0.1])
        assert has_term_in(seq, 0.4, 0.6)
        assert not has_term_in(seq, 0.51, 0.89)


class TestSampling:
    def test_fp_exact_enumeration(self):
        cloud = sample(SetSpec.fp(1.0), budget=10, truncation=0.09)
        got = sorted(cloud.points.ravel(), reverse=True)
        assert got == pytest.approx([1.0 / n for n in range(1, 11)])

    def test_isolated_points_example(self):
        rule = CountRule("constant", 4)
        cloud = sample(SetSpec.isolated_points(1.0, rule), budget=100, truncation=0.3)
        assert cloud.size == 12  # 4 points on each of r = 1, 1/2, 1/3
        # phase convention: first point of each circle on the positive x-axis
        xs = cloud.points
        for r in (1.0, 0.5, 1.0 / 3.0):
            assert np.min(np.linalg.norm(xs - np.array([r, 0.0]), axis=1)) < 1e-12

    def test_isolated_budget_refusal(self):
        rule = CountRule("exponential", 2)
        with pytest.raises(BudgetError):
            sample(SetSpec.isolated_points(1.0, rule), budget=50, truncation=0.05)

    def test_membership_of_samples(self):
        specs = [
            SetSpec.fp(0.7),
            SetSpec.concentric(2, 0.5),
            SetSpec.concentric(3, 1.0),
            SetSpec.spiral(0.8),
            SetSpec.elliptical(0.5, 1.5),
            SetSpec.product_sine(1.0),
            SetSpec.attenuated_sine(1.0, 0.5),
            SetSpec.isolated_points(1.0, CountRule("power_sum", 1.0)),
        ]
        for spec in specs:
            cloud = sample(spec, budget=4000, truncation=0.2)
            tol = 1e-9 * spec.diameter()
            worst = max(membership_residual(spec, pt) for pt in cloud.points[::7])
            assert worst <= tol, f"{spec.family}: residual {worst}"

    def test_attenuated_residual_oracle(self):
        spec = SetSpec.attenuated_sine(1.0, 0.5)
        cloud = sample(spec, budget=10_000, truncation=1e-3)
        pts = cloud.points[:: max(1, cloud.size // 500)]
        for x, y in pts:
            assert abs(y - x**0.5 * math.sin(math.pi / x)) <= 1e-9

    def test_determinism(self):
        a = sample(SetSpec.spiral(0.6), budget=3000, truncation=0.15)
        b = sample(SetSpec.spiral(0.6), budget=3000, truncation=0.15)
        assert np.array_equal(a.points, b.points)

    def test_monotone_refinement(self):
        spec = SetSpec.attenuated_sine(1.0, 1.0)
        coarse = sample(spec, budget=500, truncation=0.2)
        fine = sample(spec, budget=1000, truncation=0.2)
        step = spec.diameter_lower() / 500
        assert hausdorff_distance(coarse.points, fine.points) <= step

    def test_concentric_d_cap(self):
        with pytest.raises(ValueError):
            sample(SetSpec.concentric(5, 0.5), budget=100, truncation=0.5)

    def test_bad_truncation(self):
        with pytest.raises(ValueError):
            sample(SetSpec.fp(1.0), budget=10, truncation=1.5)


class TestMembership:
    def test_concentric_examples(self):
        spec = SetSpec.concentric(2, 1.0)
        assert membership_residual(spec, (0.5, 0.0)) == pytest.approx(0.0, abs=1e-15)
        assert membership_residual(spec, (0.4, 0.0)) == pytest.approx(0.1)

    def test_attenuated_endpoint(self):
        spec = SetSpec.attenuated_sine(1.0, 2.0)
        assert membership_residual(spec, (1.0, 0.0)) == pytest.approx(0.0, abs=1e-15)

    def test_spiral_on_and_off(self):
        spec = SetSpec.spiral(0.7)
        t = 2.3
        pt = (t**-0.7 * math.sin(math.pi * t), t**-0.7 * math.cos(math.pi * t))
        assert membership_residual(spec, pt) < 1e-10
        assert membership_residual(spec, (pt[0] + 0.05, pt[1])) > 1e-3

    def test_elliptical_on_and_off(self):
        spec = SetSpec.elliptical(0.5, 1.2)
        t = 3.7
        pt = (t**-0.5 * math.sin(math.pi * t), t**-1.2 * math.cos(math.pi * t))
        assert membership_residual(spec, pt) < 1e-10
        assert membership_residual(spec, (0.9, 0.9)) > 1e-2

    def test_fp_and_isolated(self):
        assert membership_residual(SetSpec.fp(1.0), (0.25,)) == pytest.approx(0.0)
        spec = SetSpec.isolated_points(1.0, CountRule("constant", 4))
        assert membership_residual(spec, (0.0, 0.5)) == pytest.approx(0.0, abs=1e-15)
        assert membership_residual(spec, (0.5, 0.5)) > 0.1

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError):
            membership_residual(SetSpec.fp(1.0), (0.5, 0.5))


class TestSpecValidation:
    def test_positive_parameters(self):
        with pytest.raises(ValueError):
            SetSpec.fp(-1.0)
        with pytest.raises(ValueError):
            SetSpec.attenuated_sine(1.0, 0.0)

    def test_elliptical_needs_q_at_least_p(self):
        with pytest.raises(ValueError):
            SetSpec.elliptical(1.0, 0.5)

    def test_count_rules(self):
        assert CountRule("constant", 4).count(10) == 4
        assert CountRule("power_sum", 2.0).count(3) == 9
        assert CountRule("exponential", 2.0).count(5) == 32
        assert CountRule("constant", 4).growth_exponent() == 1.0
        assert CountRule("power_sum", 2.0).growth_exponent() == 3.0
        assert CountRule("exponential", 2.0).growth_exponent() is None
        with pytest.raises(ValueError):
            CountRule("constant", 2.5)
