from __future__ import annotations

from collections.abc import Iterable, Sequence
from dataclasses import dataclass
from fractions import Fraction
from typing import Any

import sympy

from .berger import measure_moments
from .errors import InvalidArgument, InvariantBreach, TargetOutsideSquare
from .log import log_debug, log_error
from .model import classify, make_params, moment
from .types import Sector, SectorLabel, ShiftParams
from .utils import RationalLike, rational_str, to_fraction

Atom = tuple[Fraction, Fraction]


@dataclass(frozen=True)
class TwoAtomSpec:
    """The probability measure `(delta_1 + a delta_{1/p}) / (1 + a)`."""

    a: Fraction
    p: Fraction

    def __post_init__(self) -> None:
        if self.a <= 0:
            raise InvalidArgument(f"the relative mass a = {rational_str(self.a)} must be positive")
        if self.p <= 1:
            raise InvalidArgument(f"p = {rational_str(self.p)} must exceed 1")

    @classmethod
    def of(cls, a: RationalLike, p: RationalLike) -> TwoAtomSpec:
        return cls(to_fraction(a), to_fraction(p))

    @property
    def atoms(self) -> tuple[Atom, Atom]:
        return (Fraction(1), 1 / (1 + self.a)), (1 / self.p, self.a / (1 + self.a))


@dataclass(frozen=True)
class CompletionSolution:
    q: Fraction
    N: Fraction
    D: Fraction
    sector: SectorLabel

    @property
    def params(self) -> ShiftParams:
        return ShiftParams(self.q, self.N, self.D)

    def to_payload(self) -> dict[str, Any]:
        return {
            "q": rational_str(self.q),
            "N": rational_str(self.N),
            "D": rational_str(self.D),
            "sector": self.sector.to_payload(),
        }


@dataclass(frozen=True)
class SectorRange:
    """The half-open range `lower < N <= upper` of family parameters landing in `sector`."""

    sector: Sector
    lower: Fraction
    upper: Fraction

    def __contains__(self, N: object) -> bool:
        return isinstance(N, (int, Fraction)) and self.lower < N <= self.upper

    def to_payload(self) -> dict[str, str]:
        return {"sector": str(self.sector), "lower": rational_str(self.lower), "upper": rational_str(self.upper)}


def target_moments(spec: TwoAtomSpec) -> tuple[Fraction, Fraction, Fraction]:
    gamma_0, gamma_1, gamma_2 = (measure_moments(spec.atoms, n) for n in range(3))
    return gamma_0, gamma_1, gamma_2


def _verified(targets: Sequence[Fraction], q: Fraction, N: Fraction, D: Fraction) -> CompletionSolution:
    params = make_params(q, N, D)
    reproduced = [moment(params, n) for n in range(len(targets))]
    if reproduced != list(targets):
        log_error(f"completion {params} reproduces {[rational_str(value) for value in reproduced]}")
        raise InvariantBreach(f"completion {params} does not reproduce the target moments")
    return CompletionSolution(q, N, D, classify(params))


def same_p_completion(spec: TwoAtomSpec) -> CompletionSolution:
    """The completion keeping `q = p`, which forces `N = a / p` and `D = a`."""
    if spec.a >= 1:
        raise TargetOutsideSquare(f"D = a = {rational_str(spec.a)} is not below 1")
    return _verified(target_moments(spec), spec.p, spec.a / spec.p, spec.a)


def family_completion(spec: TwoAtomSpec, N: RationalLike) -> CompletionSolution:
    """The one-parameter family of completions, parametrized by `-1 < N <= 0`."""
    N = to_fraction(N)
    if not -1 < N <= 0:
        raise InvalidArgument(f"the completion family is parametrized by -1 < N <= 0, got {rational_str(N)}")
    a, p = spec.a, spec.p
    q = (a + N * p**2 - N * p + p**2) / (a + p)
    D = (a * N * p + a * p - a + N * p) / (a + p)
    if not -1 < D < 1:
        raise TargetOutsideSquare(f"D = {rational_str(D)} for N = {rational_str(N)}")
    return _verified(target_moments(spec), q, N, D)


def family_sector_ranges(spec: TwoAtomSpec) -> tuple[SectorRange, SectorRange, SectorRange]:
    a, p = spec.a, spec.p
    first = (a - a * p) / ((a + 1) * p)
    second = (a - a * p) / (a * p + a + 2 * p)
    return (
        SectorRange(Sector.I, Fraction(-1), first),
        SectorRange(Sector.II, first, second),
        SectorRange(Sector.III, second, Fraction(0)),
    )


# --------------------------------- #
# exact algebra on the moment system #
# --------------------------------- #


def _to_sympy(value: Fraction) -> sympy.Rational:
    return sympy.Rational(value.numerator, value.denominator)


def _to_fraction(value: sympy.Expr) -> Fraction:
    rational = sympy.Rational(value)
    return Fraction(int(rational.p), int(rational.q))


def _inside_square(*values: Fraction) -> bool:
    return all(-1 < value < 1 for value in values)


def solve_same_p(spec: TwoAtomSpec) -> list[tuple[Fraction, Fraction]]:
    """Every `(N, D)` whose GRWS with `q = p` matches `gamma_1` and `gamma_2`, found by exact elimination."""
    _, gamma_1, gamma_2 = map(_to_sympy, target_moments(spec))
    p = _to_sympy(spec.p)
    N, D = sympy.symbols("N D")
    equations = [(1 + N) - gamma_1 * (1 + D), gamma_1 * (p + N) - gamma_2 * (p + D)]
    solutions = sympy.solve(equations, [N, D], dict=True)
    return sorted((_to_fraction(solution[N]), _to_fraction(solution[D])) for solution in solutions)


def zero_atom_completion(mass_at_zero: RationalLike) -> list[CompletionSolution]:
    """
    Completions of the moments `1, 1 - t, 1 - t` of `(1 - t) delta_1 + t delta_0`.

    The exact system only admits `N = D = -1`, so the list of admissible solutions is empty.
    """
    t = to_fraction(mass_at_zero)
    if not 0 < t < 1:
        raise InvalidArgument(f"the mass at 0 must lie in (0, 1), got {rational_str(t)}")
    gamma = 1 - _to_sympy(t)
    q = sympy.Symbol("q", positive=True)
    N, D = sympy.symbols("N D")
    equations = [(1 + N) - gamma * (1 + D), gamma * (q + N) - gamma * (q + D)]
    solutions = sympy.solve(equations, [N, D], dict=True)
    log_debug(f"atom at zero with mass {rational_str(t)}: raw solutions {solutions}")
    admissible = []
    for solution in solutions:
        values = (solution[N], solution[D])
        if any(value.free_symbols for value in values):
            continue
        N_value, D_value = map(_to_fraction, values)
        if _inside_square(N_value, D_value):
            admissible.append(_verified([Fraction(1), 1 - t, 1 - t], Fraction(2), N_value, D_value))
    return admissible


def three_atom_search(atoms: Iterable[Atom], q_grid: Iterable[RationalLike]) -> list[CompletionSolution]:
    """
    Searches `q_grid` for GRWS completions of `gamma_0, ..., gamma_3` of a probability measure with an atom at 1.

    For each `q` the first two moment equations are linear in `(N, D)`; the solution is kept when it lies in
    the square and also reproduces `gamma_3`. Reports matches only; an empty result proves nothing.
    """
    atoms = [(to_fraction(location), to_fraction(density)) for location, density in atoms]
    if measure_moments(atoms, 0) != 1:
        raise InvalidArgument("the measure must be a probability measure")
    if not any(location == 1 for location, _ in atoms):
        raise InvalidArgument("the measure needs an atom at 1")
    targets = [measure_moments(atoms, n) for n in range(4)]
    _, gamma_1, gamma_2, _ = map(_to_sympy, targets)
    # N - g1 D = g1 - 1 and g1 N - g2 D = q (g2 - g1)
    system = sympy.Matrix([[1, -gamma_1], [gamma_1, -gamma_2]])
    if system.det() == 0:
        raise InvalidArgument("the moment system is degenerate (a one-atom measure)")
    found = []
    for q in map(to_fraction, q_grid):
        if q <= 1:
            raise InvalidArgument(f"q = {rational_str(q)} must exceed 1")
        rhs = sympy.Matrix([gamma_1 - 1, _to_sympy(q) * (gamma_2 - gamma_1)])
        N, D = map(_to_fraction, system.LUsolve(rhs))
        if not _inside_square(N, D):
            continue
        params = ShiftParams(q, N, D)
        if all(moment(params, n) == target for n, target in enumerate(targets)):
            found.append(CompletionSolution(q, N, D, classify(params)))
    return found
