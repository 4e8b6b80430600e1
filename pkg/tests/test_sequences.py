from __future__ import annotations

import itertools
import math
from fractions import Fraction

import mpmath
import pytest
from conftest import RAY_K1, SECTOR_I, SECTOR_II, VIIIA, params
from hypothesis import given, settings
from hypothesis import strategies as st

from grws.errors import InvalidArgument
from grws.model import GrwsWeights, MomentSequence, moments_of
from grws.sequences import (
    CertifiedSequence,
    ExactSequence,
    LogSequence,
    battery,
    exact_log_nabla,
    function_alternation_probe,
    is_n_alternating,
    is_n_monotone,
    n_contractive,
    nabla,
    weights_battery,
)
from grws.settings import use_settings_file
from grws.transforms import schur_power
from grws.types import BatteryTarget, Flavor, ProbeFlavor, VerdictStatus
from grws.utils import rational_grid

fractions = st.fractions(min_value=-10, max_value=10, max_denominator=30)


class TestNabla:
    def test_small_orders(self):
        seq = ExactSequence.from_values([1, Fraction(1, 2), Fraction(1, 4), Fraction(1, 8)])
        assert nabla(seq, 0, 2) == Fraction(1, 4)
        assert nabla(seq, 1, 0) == Fraction(1, 2)
        assert nabla(seq, 2, 0) == Fraction(1, 4)
        assert nabla(seq, 3, 0) == Fraction(1, 8)

    @given(values=st.lists(fractions, min_size=12, max_size=12), n=st.integers(0, 6), k=st.integers(0, 5))
    def test_binomial_expansion_matches_iterated_differences(self, values, n, k):
        seq = ExactSequence.from_values(values)
        iterated = seq
        for _ in range(n):
            iterated = iterated.delta()
        assert nabla(seq, n, k) == (-1) ** n * iterated[k]

    @given(values=st.lists(fractions, min_size=10, max_size=10), n=st.integers(1, 5), k=st.integers(0, 3))
    def test_recursion(self, values, n, k):
        seq = ExactSequence.from_values(values)
        assert nabla(seq, n, k) == nabla(seq, n - 1, k) - nabla(seq, n - 1, k + 1)

    def test_finite_sequence_bounds(self):
        with pytest.raises(IndexError):
            ExactSequence.from_values([1, 2])[2]


class TestSingleOrderChecks:
    def test_increasing_weights_are_one_alternating(self):
        assert is_n_alternating(ExactSequence.of_weights(GrwsWeights(SECTOR_I)), 1, 20).holds

    def test_decreasing_moments_are_one_monotone(self):
        assert is_n_monotone(ExactSequence.of_moments(moments_of(SECTOR_I)), 1, 20).holds

    def test_violation_carries_exact_witness(self):
        verdict = is_n_monotone(ExactSequence.from_values([1, 2, 3]), 1, 1)
        assert verdict.violated
        assert (verdict.witness.n, verdict.witness.k, verdict.witness.value) == (1, 0, -1)

    def test_order_must_be_positive(self):
        with pytest.raises(InvalidArgument):
            is_n_alternating(ExactSequence.from_values([1, 2]), 0, 0)

    @pytest.mark.parametrize("point", [SECTOR_I, SECTOR_II, RAY_K1, VIIIA])
    @pytest.mark.parametrize("n", [1, 2, 3, 4])
    def test_contractivity_is_monotonicity_of_moments(self, point, n):
        moments = ExactSequence.of_moments(moments_of(point))
        assert n_contractive(moments, n, 12) == is_n_monotone(moments, n, 12)


class TestExactLogDifferences:
    @pytest.mark.parametrize("n", [1, 2, 3, 4])
    @pytest.mark.parametrize("k", [0, 1, 3])
    def test_weight_and_moment_differences_are_opposite(self, n, k):
        weights = GrwsWeights(SECTOR_I)
        q_weights, l_weights = exact_log_nabla(LogSequence.of_weights(weights), n, k)
        q_moments, l_moments = exact_log_nabla(LogSequence.of_moments(weights), n + 1, k)
        assert l_weights == l_moments
        assert q_weights * q_moments == 1

    def test_half_powers_clear_denominators(self):
        half = schur_power(GrwsWeights(SECTOR_I), Fraction(1, 2))
        q, scale = exact_log_nabla(LogSequence.of_weights(half), 1, 0)
        assert scale == 2
        assert q == Fraction(2, 3) / Fraction(6, 7)

    def test_log_sequence_needs_a_source(self):
        with pytest.raises(InvalidArgument):
            LogSequence()

    def test_approximation_is_centered(self):
        mid, radius = LogSequence.of_weights(GrwsWeights(SECTOR_I)).approximate(0)
        assert abs(float(mid) - math.log(2 / 3)) < 1e-15
        assert radius < 1e-30


class TestBattery:
    def test_sector_i_weights_are_log_alternating(self):
        assert weights_battery(GrwsWeights(SECTOR_I), Flavor.LOG_ALTERNATING).holds

    def test_sector_ii_weights_are_log_alternating(self):
        assert weights_battery(GrwsWeights(SECTOR_II), Flavor.LOG_ALTERNATING).holds

    def test_ray_point_is_not_mid(self):
        verdict = weights_battery(GrwsWeights(RAY_K1), Flavor.LOG_ALTERNATING)
        assert verdict.violated
        assert verdict.witness.n >= 2
        assert verdict.witness.interval

    def test_viiia_moments_are_alternating(self):
        verdict = weights_battery(GrwsWeights(VIIIA), Flavor.ALTERNATING, BatteryTarget.MOMENTS)
        assert verdict.holds

    def test_sector_vi_weights_are_log_monotone(self):
        verdict = weights_battery(GrwsWeights(params("2", "1/2", "-1/4")), "log-monotone", "weights", 6, 12)
        assert verdict.holds

    def test_first_witness_is_lexicographic(self):
        seq = ExactSequence.from_values([0, 1, 0, 5, 0, 0, 0, 0])
        verdict = battery(seq, Flavor.ALTERNATING, n_max=2, k_max=2)
        assert (verdict.witness.n, verdict.witness.k) == (1, 1)

    def test_depth_is_reported(self):
        verdict = weights_battery(GrwsWeights(SECTOR_I), Flavor.LOG_ALTERNATING, n_max=3, k_max=4)
        assert verdict.to_payload()["depth"] == {"n_max": 3, "k_max": 4}

    def test_irrational_terms_fall_back_to_intervals(self):
        half = schur_power(GrwsWeights(SECTOR_I), Fraction(1, 2))
        assert weights_battery(half, Flavor.ALTERNATING, n_max=6, k_max=10).holds

    def test_certified_violation(self):
        half = schur_power(GrwsWeights(SECTOR_I), Fraction(1, 2))
        verdict = battery(CertifiedSequence.of_weights(half), Flavor.MONOTONE, n_max=2, k_max=3)
        assert verdict.violated
        assert verdict.witness.value is None
        assert verdict.witness.interval

    def test_undecided_cell_before_a_violation_is_indeterminate(self):
        terms = [mpmath.iv.mpf([0, 10]), mpmath.iv.mpf(5), mpmath.iv.mpf(1)]
        verdict = battery(CertifiedSequence(terms.__getitem__, name="wide head"), Flavor.ALTERNATING, n_max=1, k_max=1)
        assert verdict.status is VerdictStatus.INDETERMINATE
        assert (verdict.witness.n, verdict.witness.k) == (1, 0)

    def test_violation_before_an_undecided_cell_is_reported(self):
        terms = [mpmath.iv.mpf(5), mpmath.iv.mpf(1), mpmath.iv.mpf([0, 10])]
        verdict = battery(CertifiedSequence(terms.__getitem__, name="wide tail"), Flavor.ALTERNATING, n_max=1, k_max=1)
        assert verdict.violated
        assert (verdict.witness.n, verdict.witness.k) == (1, 0)

    def test_sector_i_weights_alternate_at_full_depth(self):
        assert weights_battery(GrwsWeights(SECTOR_I), Flavor.ALTERNATING, n_max=10, k_max=25).holds

    @pytest.mark.parametrize("p", ["3/2", "2", "3"])
    def test_alternating_weights_are_log_alternating(self, p):
        grid = rational_grid(Fraction(1, 4))
        alternating = 0
        for N, D in itertools.product(grid, grid):
            weights = GrwsWeights(params(p, str(N), str(D)))
            if weights_battery(weights, Flavor.ALTERNATING, n_max=8, k_max=12).holds:
                alternating += 1
                assert weights_battery(weights, Flavor.LOG_ALTERNATING, n_max=5, k_max=10).holds, (N, D)
        assert alternating

    @pytest.mark.parametrize("target", list(BatteryTarget))
    @pytest.mark.parametrize("flavor", list(Flavor))
    @pytest.mark.parametrize("point", [params("2", "0", "0"), params("3/2", "-1/2", "-1/2"), params("3", "3/4", "3/4")])
    def test_diagonal_passes_every_battery(self, point, flavor, target):
        assert weights_battery(GrwsWeights(point), flavor, target, 6, 12).holds

    @pytest.mark.parametrize("flavor", list(ProbeFlavor))
    @pytest.mark.parametrize("p", ["4", "9/4"])
    def test_diagonal_passes_every_probe(self, p, flavor):
        assert function_alternation_probe(params(p, "-1/3", "-1/3"), flavor, [1, "1/2"], 6, 12).holds

    def test_certified_moments(self):
        half = schur_power(GrwsWeights(SECTOR_I), Fraction(1, 2))
        verdict = battery(CertifiedSequence.of_moments(half), Flavor.MONOTONE, n_max=4, k_max=6)
        assert verdict.holds

    def test_flavor_must_match_sequence_kind(self):
        with pytest.raises(InvalidArgument):
            battery(ExactSequence.from_values(range(1, 10)), Flavor.LOG_ALTERNATING, 1, 1)
        with pytest.raises(InvalidArgument):
            battery(LogSequence.of_weights(GrwsWeights(SECTOR_I)), Flavor.ALTERNATING, 1, 1)

    def test_unknown_flavor(self):
        with pytest.raises(ValueError):
            battery(ExactSequence.from_values(range(1, 10)), "sideways", 1, 1)

    def test_settings_set_default_depth(self):
        use_settings_file(None, {"battery": {"n_max": 2, "k_max": 3}})
        verdict = weights_battery(GrwsWeights(SECTOR_I), Flavor.LOG_ALTERNATING)
        assert (verdict.depth.n_max, verdict.depth.k_max) == (2, 3)


class TestFunctionProbe:
    def test_sector_i_plain_probe(self):
        assert function_alternation_probe(SECTOR_I, ProbeFlavor.PLAIN, [1], 8, 16).holds

    def test_sector_i_at_irrational_spacing(self):
        verdict = function_alternation_probe(SECTOR_I, ProbeFlavor.PLAIN, ["1/3"], 5, 8)
        assert verdict.holds

    def test_rational_resampling_stays_exact(self):
        verdict = function_alternation_probe(params("4", "-1/2", "-1/4"), "plain", ["1/2"], 6, 10)
        assert verdict.holds

    def test_sector_ii_log_probe(self):
        assert function_alternation_probe(SECTOR_II, ProbeFlavor.LOG, [1, "1/2"], 6, 10).holds

    def test_ray_point_fails_log_probe(self):
        verdict = function_alternation_probe(RAY_K1, ProbeFlavor.LOG, [1], 10, 25)
        assert verdict.violated
        assert verdict.witness.spacing == 1

    @pytest.mark.parametrize("spacings", [[], [0], ["-1/2"]])
    def test_spacings_must_be_positive(self, spacings):
        with pytest.raises(InvalidArgument):
            function_alternation_probe(SECTOR_I, ProbeFlavor.PLAIN, spacings, 2, 2)

    @settings(max_examples=10, deadline=None)
    @given(numerator=st.integers(1, 4), denominator=st.integers(1, 3))
    def test_sector_i_holds_at_every_spacing(self, numerator, denominator):
        spacing = Fraction(numerator, denominator)
        assert function_alternation_probe(SECTOR_I, ProbeFlavor.PLAIN, [spacing], 4, 6).status in (
            VerdictStatus.HOLDS_TO_DEPTH,
            VerdictStatus.INDETERMINATE,
        )

    def test_moment_sequence_class_is_reused(self):
        assert isinstance(moments_of(SECTOR_I), MomentSequence)
        assert moments_of(SECTOR_I) is moments_of(SECTOR_I)
