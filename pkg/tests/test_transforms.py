from __future__ import annotations

import random
from fractions import Fraction

import pytest
from conftest import RAY_K1, SECTOR_I, SECTOR_II, VIIIA, params
from hypothesis import given
from hypothesis import strategies as st

from grws.errors import InexactValue, InvalidArgument, OutsideSector
from grws.model import GrwsWeights, classify, constant_weights, geometric_weights, make_params, moment, weight_sq
from grws.sequences import ExactSequence, weights_battery
from grws.transforms import (
    AffineMap,
    affine_subshift,
    affine_subshift_params,
    aluthge,
    pg_coefficients,
    pg_identity_check,
    quotient_shift,
    reciprocal,
    run_pipeline,
    schur_power,
    viiia_derived_weights,
)
from grws.types import Flavor, Sector, VerdictStatus
from grws.utils import interval_precision


class TestSchurPower:
    def test_unit_power_is_identity(self):
        weights = GrwsWeights(SECTOR_I)
        assert schur_power(weights, 1) is weights

    def test_square(self):
        assert schur_power(GrwsWeights(SECTOR_I), 2).weight_sq(0) == Fraction(4, 9)

    def test_square_root_is_inexact(self):
        half = schur_power(GrwsWeights(SECTOR_I), "1/2")
        with pytest.raises(InexactValue):
            half.weight_sq(0)
        with interval_precision(128):
            enclosure = half.weight_sq_enclosure(0)
            assert abs(float(enclosure.a) - (2 / 3) ** 0.5) < 1e-15
            assert enclosure.b - enclosure.a < 1e-30

    def test_perfect_powers_stay_exact(self):
        assert schur_power(geometric_weights(4), "1/2").weight_sq(3) == 8

    @pytest.mark.parametrize("s", [0, "-1/2"])
    def test_exponent_must_be_positive(self, s):
        with pytest.raises(InvalidArgument):
            schur_power(GrwsWeights(SECTOR_I), s)

    @pytest.mark.parametrize("s", ["1/2", "1/3", 3])
    def test_mid_is_preserved(self, s):
        powered = schur_power(GrwsWeights(SECTOR_II), s)
        assert weights_battery(powered, Flavor.LOG_ALTERNATING, n_max=6, k_max=12).holds


class TestAluthge:
    def test_constant_weights_are_fixed(self):
        transformed = aluthge(constant_weights(1))
        assert transformed.prefix(4) == [1, 1, 1, 1]

    def test_geometric_weights(self):
        transformed = aluthge(geometric_weights(4))
        assert transformed.prefix(3) == [2, 8, 32]

    def test_grws_weights_are_irrational(self):
        with pytest.raises(InexactValue):
            aluthge(GrwsWeights(SECTOR_I)).weight_sq(0)

    @pytest.mark.parametrize("point", [SECTOR_I, SECTOR_II])
    def test_mid_is_preserved(self, point):
        assert weights_battery(aluthge(GrwsWeights(point)), Flavor.LOG_ALTERNATING, n_max=6, k_max=12).holds


class TestQuotient:
    def test_constant_weights(self):
        assert quotient_shift(constant_weights(3)).prefix(3) == [1, 1, 1]

    def test_geometric_weights(self):
        assert quotient_shift(geometric_weights(3)).prefix(3) == [Fraction(1, 3)] * 3

    def test_grws_weights(self):
        quotient = quotient_shift(GrwsWeights(SECTOR_I))
        assert quotient.weight_sq(0) == Fraction(2, 3) / Fraction(6, 7)

    def test_mid_is_preserved(self):
        quotient = quotient_shift(GrwsWeights(SECTOR_I))
        assert weights_battery(quotient, Flavor.LOG_ALTERNATING, n_max=8, k_max=16).holds


class TestAffineSubshift:
    def test_map(self):
        assert AffineMap(2, 1)(3) == 7
        with pytest.raises(InvalidArgument):
            AffineMap(0, 1)
        with pytest.raises(InvalidArgument):
            AffineMap(1, -1)

    def test_example(self):
        assert affine_subshift_params(SECTOR_I, AffineMap(2, 1)) == params("4", "-1/4", "-1/8")

    def test_identity(self):
        assert affine_subshift_params(SECTOR_II, AffineMap(1, 0)) == SECTOR_II

    def test_ray_point_leaves_the_rays_when_ell_does_not_divide_k(self):
        subshift = affine_subshift_params(RAY_K1, AffineMap(2, 0))
        assert subshift == params("4", "1/4", "1/2")
        assert classify(subshift).special_ray_k is None

    def test_ray_point_stays_on_a_ray_when_ell_divides_k(self):
        subshift = affine_subshift_params(params("2", "1/8", "1/2"), AffineMap(2, 0))
        assert classify(subshift).special_ray_k == 1

    def test_grws_subshift_stays_grws(self):
        subshift = affine_subshift(GrwsWeights(SECTOR_I), AffineMap(3, 2))
        assert subshift.params == affine_subshift_params(SECTOR_I, AffineMap(3, 2))

    def test_subshift_of_general_weights(self):
        subshift = affine_subshift(geometric_weights(2), AffineMap(2, 1))
        assert subshift.params is None
        assert subshift.prefix(3) == [2, 8, 32]

    def test_random_subshifts(self):
        rng = random.Random(11)
        for _ in range(50):
            point = make_params(
                Fraction(rng.randint(11, 30), 10), Fraction(rng.randint(-9, 9), 10), Fraction(rng.randint(-9, 9), 10)
            )
            affine = AffineMap(rng.randint(1, 4), rng.randint(0, 4))
            subshift = affine_subshift_params(point, affine)
            assert all(weight_sq(subshift, n) == weight_sq(point, affine(n)) for n in range(21))
            label = classify(point)
            if Sector.I in label or Sector.II in label:
                verdict = weights_battery(GrwsWeights(subshift), Flavor.LOG_ALTERNATING, n_max=8, k_max=16)
                assert verdict.holds, (point, affine)


class TestReciprocal:
    def test_viiia_reflects_into_ia(self):
        reflected = reciprocal(VIIIA)
        assert reflected == params("3/2", "-2/3", "-1/2")
        assert classify(reflected).ia

    def test_sector_i_reflects_into_sector_viii(self):
        assert Sector.VIII in classify(reciprocal(SECTOR_I))

    def test_involution(self):
        assert reciprocal(reciprocal(SECTOR_II)) == SECTOR_II
        diagonal = params("2", "1/3", "1/3")
        assert reciprocal(diagonal) == diagonal

    def test_weights_multiply_to_one(self):
        assert all(weight_sq(SECTOR_II, n) * weight_sq(reciprocal(SECTOR_II), n) == 1 for n in range(10))


class TestDerivedWeights:
    def test_witness(self):
        derived = viiia_derived_weights(VIIIA)
        assert derived.witness == params("3/2", "-1/2", "-4/9")
        assert Sector.I in classify(derived.witness)

    def test_diagonal_edge(self):
        assert viiia_derived_weights(params("2", "-1/2", "-1/2")).witness == params("2", "-1/2", "-1/4")

    def test_differenced_moments(self):
        derived = viiia_derived_weights(VIIIA)
        differenced = [moment(VIIIA, n) - moment(VIIIA, n + 1) for n in range(17)]
        assert all(differenced[n + 1] / differenced[n] == derived.weights.weight_sq(n) for n in range(16))

    def test_scaled_weights_match_witness(self):
        derived = viiia_derived_weights(VIIIA)
        assert all(VIIIA.p * derived.weights.weight_sq(n) == weight_sq(derived.witness, n) for n in range(10))

    def test_outside_viiia(self):
        with pytest.raises(OutsideSector):
            viiia_derived_weights(SECTOR_I)


class TestSubsampledDifferences:
    def test_coefficients(self):
        assert pg_coefficients(2, 2).c == (1, 2, 1)
        assert pg_coefficients(3, 2).c == (1, 2, 3, 2, 1)

    @given(k=st.integers(2, 5), n=st.integers(1, 6))
    def test_coefficients_sum_and_sign(self, k, n):
        coefficients = pg_coefficients(k, n)
        assert sum(coefficients.c) == k**n
        assert all(c > 0 for c in coefficients.c)

    def test_invalid_coefficients(self):
        with pytest.raises(InvalidArgument):
            pg_coefficients(1, 2)

    @given(
        values=st.lists(st.fractions(min_value=-5, max_value=5, max_denominator=20), min_size=36, max_size=36),
        k=st.integers(2, 4),
        n=st.integers(1, 5),
        m=st.integers(0, 3),
        i0=st.integers(0, 3),
    )
    def test_identity_on_arbitrary_sequences(self, values, k, n, m, i0):
        assert pg_identity_check(ExactSequence.from_values(values), k, n, m, i0)

    def test_identity_on_moments(self):
        seq = ExactSequence(lambda n: moment(SECTOR_I, n))
        assert all(pg_identity_check(seq, 3, n, 2, 1) for n in range(1, 6))


class TestPipeline:
    def test_chain(self):
        result = run_pipeline(GrwsWeights(SECTOR_I), "subshift:2,1 | reciprocal | reciprocal | battery:log-alternating")
        assert result.weights.params == params("4", "-1/4", "-1/8")
        assert result.steps == ["subshift:2,1", "reciprocal", "reciprocal", "battery:log-alternating"]
        assert result.verdicts[0][1].status is VerdictStatus.HOLDS_TO_DEPTH

    def test_battery_on_moments(self):
        result = run_pipeline(GrwsWeights(VIIIA), "battery:alternating@moments", n_max=4, k_max=6)
        assert result.verdicts[0][1].holds

    def test_left_to_right(self):
        result = run_pipeline(GrwsWeights(SECTOR_I), "aluthge|schur:2", n_max=2, k_max=2)
        assert result.weights.weight_sq(0) == Fraction(2, 3) * Fraction(6, 7)

    def test_reciprocal_needs_grws(self):
        with pytest.raises(InvalidArgument):
            run_pipeline(GrwsWeights(SECTOR_I), "aluthge|reciprocal")

    @pytest.mark.parametrize(
        "pipeline", ["", "rotate", "schur", "subshift:2", "subshift:a,b", "battery:sideways", "battery:monotone@x"]
    )
    def test_malformed(self, pipeline):
        with pytest.raises(InvalidArgument):
            run_pipeline(GrwsWeights(SECTOR_I), pipeline)
