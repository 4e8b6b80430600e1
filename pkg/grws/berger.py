from __future__ import annotations

from collections.abc import Iterable
from dataclasses import dataclass, field
from fractions import Fraction

from .constants import DEFAULT_BERGER_DEPTH
from .errors import InvalidArgument, NegativeCoefficient, OutsideSector
from .model import moments_of, special_ray_k
from .settings import get_setting_dotted
from .types import AtomPayload, Depth, MeasurePayload, PropertyVerdict, ShiftParams, VerdictStatus, Witness
from .utils import rational_str


@dataclass(frozen=True)
class BergerCoefficients:
    m: tuple[Fraction, ...]
    """`m_0 = 1` and `m_i = p (D - p^{i-1} N) / (p^i - 1)`, ending at the first zero when support is finite."""
    c: tuple[Fraction, ...]
    """Positive partial products `c_n = m_0 ... m_n`."""
    finite: bool
    """Whether some `m_i` vanished, so that the support is exactly `len(c)` atoms."""
    tail_bound: Fraction | None = Fraction(0)
    """Upper bound on `sum_{n >= len(c)} c_n`; zero when finite, `None` when no bound is certified yet."""

    @property
    def total(self) -> Fraction:
        return sum(self.c, Fraction(0))

    @property
    def normalizer(self) -> tuple[Fraction, Fraction] | None:
        """`a(N, D) = 1 / sum c_n` as a certified interval `[1 / (S + tail), 1 / S]`."""
        if self.tail_bound is None:
            return None
        return 1 / (self.total + self.tail_bound), 1 / self.total


@dataclass(frozen=True)
class AtomicMeasure:
    atoms: tuple[tuple[Fraction, Fraction], ...]
    """`(location, density)` pairs with strictly decreasing locations in `(0, 1]`."""
    truncated: bool = False
    tail_bound: Fraction = Fraction(0)
    """Bound on the mass omitted by truncation, relative to the normalization used for the densities."""
    boundary: bool = field(default=False, compare=False)
    """Whether the point lies on `D = -N`, outside the region where the construction is claimed."""

    @property
    def total_mass(self) -> Fraction:
        return sum((density for _, density in self.atoms), Fraction(0))

    def moment(self, n: int) -> Fraction:
        return measure_moments(self.atoms, n)

    def to_payload(self) -> MeasurePayload:
        atoms: list[AtomPayload] = [
            {"atom": rational_str(location), "density": rational_str(density)} for location, density in self.atoms
        ]
        payload: MeasurePayload = {"atoms": atoms, "truncated": self.truncated, "boundary": self.boundary}
        if self.truncated:
            payload["tail_bound"] = rational_str(self.tail_bound)
        return payload


def measure_moments(atoms: Iterable[tuple[Fraction, Fraction]], n: int) -> Fraction:
    """`sum density * location^n` of a finitely atomic measure."""
    return sum((density * location**n for location, density in atoms), Fraction(0))


def _coefficient(params: ShiftParams, i: int) -> Fraction:
    p = params.p
    return p * (params.D - p ** (i - 1) * params.N) / (p**i - 1)


def _tail_bound(params: ShiftParams, c_last: Fraction, next_index: int) -> Fraction | None:
    """
    Geometric majorant of `sum_{i >= next_index} c_i`.

    `m_i = -N + (pD - N) / (p^i - 1)`, so the ratios `m_i` stay below `r = max(m_{next_index}, -N)`.
    `None` when that ratio is not below 1 yet.
    """
    ratio = max(_coefficient(params, next_index), -params.N)
    if ratio >= 1:
        return None
    return c_last * ratio / (1 - ratio)


def berger_coefficients(params: ShiftParams, depth: int | None = None) -> BergerCoefficients:
    depth = get_setting_dotted("berger.depth", DEFAULT_BERGER_DEPTH) if depth is None else depth
    if depth < 0:
        raise InvalidArgument("depth must be nonnegative")
    m = [Fraction(1)]
    c = [Fraction(1)]
    i = 1
    # m_i tends to -N, so for N > 0 the sequence reaches zero or turns negative past any depth
    while params.N > 0 or i <= depth:
        m_i = _coefficient(params, i)
        if m_i < 0:
            raise NegativeCoefficient(i, rational_str(m_i))
        m.append(m_i)
        if m_i == 0:
            return BergerCoefficients(tuple(m), tuple(c), finite=True)
        c.append(c[-1] * m_i)
        i += 1
    return BergerCoefficients(tuple(m), tuple(c), finite=False, tail_bound=_tail_bound(params, c[-1], depth + 1))


def berger_measure(params: ShiftParams, depth: int | None = None) -> AtomicMeasure:
    """
    The atomic measure with atoms `1 / p^i` and densities proportional to `c_i`.

    Finite supports are exact probability measures. Countable supports are truncated; their densities are
    normalized by the computed partial sum, which keeps every moment within `tail_bound` of the true one.
    """
    coefficients = berger_coefficients(params, depth)
    if coefficients.tail_bound is None:
        depth_reached = len(coefficients.c) - 1
        raise InvalidArgument(f"no certified tail bound for {params} at depth {depth_reached}; increase the depth")
    total = coefficients.total
    atoms = tuple((1 / params.p**i, c_i / total) for i, c_i in enumerate(coefficients.c))
    return AtomicMeasure(
        atoms=atoms,
        truncated=not coefficients.finite,
        tail_bound=coefficients.tail_bound / total,
        boundary=params.N < 0 and params.D == -params.N,
    )


def verify_representation(params: ShiftParams, measure: AtomicMeasure, n_max: int) -> PropertyVerdict:
    """Compares the moments of `measure` with `gamma_n` for `0 <= n <= n_max` (within `tail_bound` if truncated)."""
    moments = moments_of(params)
    depth = Depth(0, n_max)
    for n in range(n_max + 1):
        error = measure.moment(n) - moments[n]
        if (measure.truncated and abs(error) > measure.tail_bound) or (not measure.truncated and error):
            return PropertyVerdict(VerdictStatus.VIOLATED, depth, Witness(0, n, value=error))
    return PropertyVerdict(VerdictStatus.HOLDS_TO_DEPTH, depth)


def atom_count_on_ray(params: ShiftParams, ray_depth: int | None = None) -> int:
    if (k := special_ray_k(params, ray_depth)) is None:
        raise OutsideSector(f"{params} is not on a ray D = p^k N")
    return k + 1
