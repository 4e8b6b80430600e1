from __future__ import annotations

from fractions import Fraction

import pytest
from conftest import RAY_K1, params
from more_itertools import pairwise

from grws.berger import berger_measure
from grws.completion import (
    SectorRange,
    TwoAtomSpec,
    family_completion,
    family_sector_ranges,
    same_p_completion,
    solve_same_p,
    target_moments,
    three_atom_search,
    zero_atom_completion,
)
from grws.errors import InvalidArgument, TargetOutsideSquare
from grws.model import moment
from grws.types import Sector


class TestTwoAtomSpec:
    def test_atoms(self):
        spec = TwoAtomSpec.of("1/2", 2)
        assert spec.atoms == ((1, Fraction(2, 3)), (Fraction(1, 2), Fraction(1, 3)))
        assert target_moments(spec) == (1, Fraction(5, 6), Fraction(3, 4))

    @pytest.mark.parametrize(("a", "p"), [(0, 2), ("-1/2", 2), ("1/2", 1)])
    def test_invalid(self, a, p):
        with pytest.raises(InvalidArgument):
            TwoAtomSpec.of(a, p)


class TestSameP:
    def test_recovers_the_ray_point(self):
        solution = same_p_completion(TwoAtomSpec.of("1/2", 2))
        assert solution.params == RAY_K1
        assert solution.sector.special_ray_k == 1

    def test_exact_elimination_has_a_single_root(self):
        assert solve_same_p(TwoAtomSpec.of("1/2", 2)) == [(Fraction(1, 4), Fraction(1, 2))]

    def test_heavy_second_atom_leaves_the_square(self):
        with pytest.raises(TargetOutsideSquare, match="target outside square"):
            same_p_completion(TwoAtomSpec.of(1, 2))

    def test_payload(self):
        payload = same_p_completion(TwoAtomSpec.of("1/2", 2)).to_payload()
        assert (payload["q"], payload["N"], payload["D"]) == ("2/1", "1/4", "1/2")
        assert payload["sector"]["sectors"] == ["IV"]


class TestFamily:
    def test_example(self):
        solution = family_completion(TwoAtomSpec.of(1, 2), 0)
        assert (solution.q, solution.N, solution.D) == (Fraction(5, 3), 0, Fraction(1, 3))
        assert Sector.III in solution.sector

    def test_thresholds(self):
        spec = TwoAtomSpec.of(1, 2)
        first, second, third = family_sector_ranges(spec)
        assert (first.sector, second.sector, third.sector) == (Sector.I, Sector.II, Sector.III)
        assert first.upper == second.lower == Fraction(-1, 4)
        assert second.upper == third.lower == Fraction(-1, 7)
        assert family_completion(spec, first.upper).D == 0
        assert family_completion(spec, second.upper).D == Fraction(1, 7)

    @pytest.mark.parametrize("a", [Fraction(1, 3), Fraction(1), Fraction(3)])
    def test_each_member_lands_in_its_predicted_sector(self, a):
        spec = TwoAtomSpec(a, Fraction(2))
        ranges = family_sector_ranges(spec)
        for i in range(10):
            N = Fraction(-i, 10)
            solution = family_completion(spec, N)
            predicted = next(sector_range.sector for sector_range in ranges if N in sector_range)
            assert predicted in solution.sector, (a, N)
            assert [moment(solution.params, n) for n in range(3)] == list(target_moments(spec))

    @pytest.mark.parametrize("a", [Fraction(1, 3), Fraction(1), Fraction(3)])
    def test_q_and_d_increase_with_n(self, a):
        spec = TwoAtomSpec(a, Fraction(2))
        family = [family_completion(spec, Fraction(-i, 10)) for i in reversed(range(10))]
        for lower, upper in pairwise(family):
            assert lower.N < upper.N
            assert lower.q < upper.q
            assert lower.D < upper.D

    @pytest.mark.parametrize("N", [-1, "1/2", "1/100"])
    def test_parameter_range(self, N):
        with pytest.raises(InvalidArgument):
            family_completion(TwoAtomSpec.of(1, 2), N)

    def test_range_membership(self):
        sector_range = SectorRange(Sector.II, Fraction(-1, 2), Fraction(0))
        assert Fraction(0) in sector_range
        assert Fraction(-1, 2) not in sector_range
        assert "0" not in sector_range
        assert sector_range.to_payload() == {"sector": "II", "lower": "-1/2", "upper": "0/1"}


class TestAtomAtZero:
    def test_no_admissible_completion(self):
        assert zero_atom_completion("1/2") == []

    @pytest.mark.parametrize("t", [0, 1, "3/2"])
    def test_mass_range(self, t):
        with pytest.raises(InvalidArgument):
            zero_atom_completion(t)


class TestThreeAtomSearch:
    def test_recovers_a_second_ray_point(self):
        atoms = berger_measure(params("2", "1/8", "1/2")).atoms
        assert len(atoms) == 3
        found = three_atom_search(atoms, [Fraction(3, 2), 2, 3])
        assert [(solution.q, solution.N, solution.D) for solution in found] == [(2, Fraction(1, 8), Fraction(1, 2))]
        assert found[0].sector.special_ray_k == 2

    def test_empty_result_for_unreachable_grid(self):
        atoms = berger_measure(params("2", "1/8", "1/2")).atoms
        assert three_atom_search(atoms, [Fraction(5, 4)]) == []

    def test_needs_a_probability_measure(self):
        with pytest.raises(InvalidArgument):
            three_atom_search([(Fraction(1), Fraction(1, 2))], [2])

    def test_needs_an_atom_at_one(self):
        with pytest.raises(InvalidArgument):
            three_atom_search([(Fraction(1, 2), Fraction(1, 2)), (Fraction(1, 4), Fraction(1, 2))], [2])

    def test_point_mass_is_degenerate(self):
        with pytest.raises(InvalidArgument):
            three_atom_search([(Fraction(1), Fraction(1))], [2])

    def test_q_must_exceed_one(self):
        atoms = berger_measure(params("2", "1/8", "1/2")).atoms
        with pytest.raises(InvalidArgument):
            three_atom_search(atoms, [1])
