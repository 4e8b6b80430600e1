from __future__ import annotations

import dataclasses
import math
import threading
from collections import defaultdict
from collections.abc import Callable, Iterable
from fractions import Fraction
from typing import Any, Dict, Protocol

import mpmath
from more_itertools import pairwise

from .constants import DEFAULT_BATTERY_K_MAX, DEFAULT_BATTERY_N_MAX, DEFAULT_MAX_DOUBLINGS, DEFAULT_START_BITS
from .errors import InexactValue, InvalidArgument
from .log import log_debug
from .model import Factor, GrwsWeights, MomentSequence, WeightSequence
from .settings import get_setting_dotted
from .types import BatteryTarget, Depth, Flavor, ProbeFlavor, PropertyVerdict, ShiftParams, VerdictStatus, Witness
from .utils import (
    RationalLike,
    exact_root,
    interval_precision,
    interval_sign,
    interval_str,
    lcm_all,
    sign,
    to_fraction,
    to_interval,
)

Exponents = Dict[Fraction, Fraction]
"""`{base: exponent}`: the logarithm `sum(exponent * ln(base))` in exact multiplicative form."""


class RationalSequence(Protocol):
    def __getitem__(self, n: int) -> Fraction: ...


def battery_depth(n_max: int | None = None, k_max: int | None = None) -> Depth:
    return Depth(
        n_max=get_setting_dotted("battery.n_max", DEFAULT_BATTERY_N_MAX) if n_max is None else n_max,
        k_max=get_setting_dotted("battery.k_max", DEFAULT_BATTERY_K_MAX) if k_max is None else k_max,
    )


def precision_schedule() -> list[int]:
    start = get_setting_dotted("precision.start_bits", DEFAULT_START_BITS)
    doublings = get_setting_dotted("precision.max_doublings", DEFAULT_MAX_DOUBLINGS)
    return [start << i for i in range(doublings + 1)]


# --------- #
# sequences #
# --------- #


class ExactSequence:
    """A deterministic sequence of rationals indexed from 0, memoized on first access."""

    def __init__(self, term: Callable[[int], Fraction], name: str = "sequence", length: int | None = None) -> None:
        self._term = term
        self._cache: dict[int, Fraction] = {}
        self._lock = threading.Lock()
        self.name = name
        self.length = length

    @classmethod
    def from_values(cls, values: Iterable[Fraction | int], name: str = "values") -> ExactSequence:
        items = [Fraction(value) for value in values]
        return cls(items.__getitem__, name=name, length=len(items))

    @classmethod
    def of_weights(cls, weights: WeightSequence) -> ExactSequence:
        """Squared weights; raises `InexactValue` on access when a term is irrational."""
        return cls(weights.weight_sq, name=f"alpha^2 of {weights!r}")

    @classmethod
    def of_moments(cls, moments: MomentSequence) -> ExactSequence:
        return cls(moments.__getitem__, name=f"gamma of {moments.weights!r}")

    def __getitem__(self, n: int) -> Fraction:
        if n < 0 or (self.length is not None and n >= self.length):
            raise IndexError(f"{self.name} has no term {n}")
        if (value := self._cache.get(n)) is None:
            value = Fraction(self._term(n))
            with self._lock:
                self._cache.setdefault(n, value)
        return value

    def delta(self) -> ExactSequence:
        """The forward difference `a_{n+1} - a_n`."""
        length = None if self.length is None else self.length - 1
        return ExactSequence(lambda n: self[n + 1] - self[n], name=f"delta of {self.name}", length=length)

    def __repr__(self) -> str:
        return f"ExactSequence({self.name})"


class CertifiedSequence:
    """A real sequence known through `mpmath.iv` enclosures recomputed at the current precision."""

    def __init__(self, enclosure: Callable[[int], Any], name: str = "certified sequence") -> None:
        self._enclosure = enclosure
        self.name = name

    @classmethod
    def of_weights(cls, weights: WeightSequence) -> CertifiedSequence:
        return cls(weights.weight_sq_enclosure, name=f"alpha^2 of {weights!r}")

    @classmethod
    def of_moments(cls, weights: WeightSequence) -> CertifiedSequence:
        def moment_enclosure(n: int) -> Any:
            enclosure = mpmath.iv.mpf(1)
            for i in range(n):
                enclosure *= weights.weight_sq_enclosure(i)
            return enclosure

        return cls(moment_enclosure, name=f"gamma of {weights!r}")

    def enclosure(self, n: int) -> Any:
        return self._enclosure(n)

    def __repr__(self) -> str:
        return f"CertifiedSequence({self.name})"


class LogSequence:
    """
    The termwise logarithm `ln a_n` of a positive sequence.

    When `a_n` is a product of rational powers of rationals the logarithm is kept in that exact form and
    every sign decision is exact; otherwise only certified enclosures are available.
    """

    def __init__(
        self,
        *,
        factors: Callable[[int], Iterable[Factor]] | None = None,
        enclosure: Callable[[int], Any] | None = None,
        name: str = "log sequence",
    ) -> None:
        if factors is None and enclosure is None:
            raise InvalidArgument("a log sequence needs exact factors or an enclosure")
        self._factors = factors
        self._enclosure = enclosure
        self.name = name

    @classmethod
    def of_weights(cls, weights: WeightSequence) -> LogSequence:
        return cls(factors=weights.factors, name=f"ln alpha^2 of {weights!r}")

    @classmethod
    def of_moments(cls, weights: WeightSequence) -> LogSequence:
        def moment_factors(n: int) -> Iterable[Factor]:
            for i in range(n):
                yield from weights.factors(i)

        return cls(factors=moment_factors, name=f"ln gamma of {weights!r}")

    @property
    def is_exact(self) -> bool:
        return self._factors is not None

    def exponents(self, n: int) -> Exponents:
        if self._factors is None:
            raise InvalidArgument(f"{self.name} has no exact multiplicative form")
        merged: Exponents = defaultdict(Fraction)
        for base, exponent in self._factors(n):
            if base <= 0:
                raise InvalidArgument(f"{self.name}: term {n} is not positive")
            if base != 1:
                merged[base] += exponent
        return {base: exponent for base, exponent in merged.items() if exponent}

    def enclosure(self, n: int) -> Any:
        """Certified enclosure of `ln a_n` at the current interval precision."""
        if self._enclosure is not None:
            return self._enclosure(n)
        total = mpmath.iv.mpf(0)
        for base, exponent in self.exponents(n).items():
            total += to_interval(exponent) * mpmath.iv.log(to_interval(base))
        return total

    def approximate(self, n: int, bits: int | None = None) -> tuple[mpmath.mpf, mpmath.mpf]:
        """Midpoint of the certified enclosure of `ln a_n` and its radius."""
        bits = bits or precision_schedule()[0]
        with interval_precision(bits), mpmath.workprec(bits + 10):
            enclosure = self.enclosure(n)
            lower, upper = mpmath.mpf(enclosure.a), mpmath.mpf(enclosure.b)
            return (lower + upper) / 2, (upper - lower) / 2

    def __repr__(self) -> str:
        return f"LogSequence({self.name})"


# -------------------- #
# difference operators #
# -------------------- #


def nabla(seq: RationalSequence, n: int, k: int) -> Fraction:
    """`(nabla^n a)_k = sum_i (-1)^i C(n, i) a_{k+i}`, exactly."""
    return sum((Fraction((-1) ** i * math.comb(n, i)) * seq[k + i] for i in range(n + 1)), Fraction(0))


def _combine(rows: Iterable[tuple[int, Exponents]]) -> Exponents:
    total: Exponents = defaultdict(Fraction)
    for coefficient, exponents in rows:
        for base, exponent in exponents.items():
            total[base] += coefficient * exponent
    return {base: exponent for base, exponent in total.items() if exponent}


def _log_sides(exponents: Exponents) -> tuple[int, int, int]:
    """
    Integers `(A, B, L)` with `L * sum(e * ln b) = ln(A / B)`.

    `L` clears the exponent denominators, so `A` and `B` are exact integer powers.
    """
    scale = lcm_all(exponent.denominator for exponent in exponents.values())
    upper = lower = 1
    for base, exponent in exponents.items():
        power = int(exponent * scale)
        if power > 0:
            upper *= base.numerator**power
            lower *= base.denominator**power
        else:
            upper *= base.denominator ** (-power)
            lower *= base.numerator ** (-power)
    return upper, lower, scale


def nabla_exponents(seq: LogSequence, n: int, k: int) -> Exponents:
    return _combine(((-1) ** i * math.comb(n, i), seq.exponents(k + i)) for i in range(n + 1))


def exact_log_nabla(seq: LogSequence, n: int, k: int) -> tuple[Fraction, int]:
    """
    The exact rational `Q` and integer `L` with `L * (nabla^n ln a)_k = ln Q`.

    The sign of the log difference is the sign of `Q - 1`.
    """
    upper, lower, scale = _log_sides(nabla_exponents(seq, n, k))
    return Fraction(upper, lower), scale


def exact_log_sign(exponents: Exponents) -> int:
    if not exponents:
        return 0
    upper, lower, _ = _log_sides(exponents)
    return sign(upper - lower)


def _log_witness_interval(exponents: Exponents) -> str:
    with interval_precision(precision_schedule()[0]):
        total = mpmath.iv.mpf(0)
        for base, exponent in exponents.items():
            total += to_interval(exponent) * mpmath.iv.log(to_interval(base))
        return interval_str(total)


# ---------------- #
# verdict plumbing #
# ---------------- #


def _is_violation(value_sign: int, flavor: Flavor) -> bool:
    return value_sign < 0 if flavor.wants_nonnegative else value_sign > 0


def _holds(depth: Depth) -> PropertyVerdict:
    return PropertyVerdict(VerdictStatus.HOLDS_TO_DEPTH, depth)


def _violated(depth: Depth, witness: Witness) -> PropertyVerdict:
    return PropertyVerdict(VerdictStatus.VIOLATED, depth, witness)


def _exact_scan(
    seq: RationalSequence, orders: Iterable[int], k_max: int, flavor: Flavor, depth: Depth
) -> PropertyVerdict:
    orders = list(orders)
    top = max(orders)
    row = [Fraction(seq[k]) for k in range(k_max + top + 1)]
    for n in range(1, top + 1):
        row = [a - b for a, b in pairwise(row)]
        if n not in orders:
            continue
        for k in range(k_max + 1):
            if _is_violation(sign(row[k]), flavor):
                return _violated(depth, Witness(n, k, value=row[k]))
    return _holds(depth)


def is_n_alternating(seq: RationalSequence, n: int, k_max: int) -> PropertyVerdict:
    """Checks `(nabla^n a)_k <= 0` for `0 <= k <= k_max`."""
    if n < 1:
        raise InvalidArgument("the order n must be positive")
    return _exact_scan(seq, [n], k_max, Flavor.ALTERNATING, Depth(n, k_max))


def is_n_monotone(seq: RationalSequence, n: int, k_max: int) -> PropertyVerdict:
    """Checks `(nabla^n a)_k >= 0` for `0 <= k <= k_max`."""
    if n < 1:
        raise InvalidArgument("the order n must be positive")
    return _exact_scan(seq, [n], k_max, Flavor.MONOTONE, Depth(n, k_max))


def n_contractive(moments: RationalSequence, n: int, k_max: int) -> PropertyVerdict:
    """The n-contractivity test on basis vectors: `sum_i (-1)^i C(n, i) gamma_{k+i} >= 0` for `k <= k_max`."""
    if n < 1:
        raise InvalidArgument("the order n must be positive")
    depth = Depth(n, k_max)
    for k in range(k_max + 1):
        if (value := nabla(moments, n, k)) < 0:
            return _violated(depth, Witness(n, k, value=value))
    return _holds(depth)


def _certified_scan(
    term: Callable[[int], Any],
    n_max: int,
    k_max: int,
    flavor: Flavor,
    depth: Depth,
    spacing: Fraction | None = None,
) -> PropertyVerdict:
    """Interval difference tables at escalating precision until every sign is decided."""
    ambiguous: Witness | None = None
    violation: Witness | None = None
    for bits in precision_schedule():
        ambiguous = violation = None
        with interval_precision(bits):
            row = [term(k) for k in range(k_max + n_max + 1)]
            for n in range(1, n_max + 1):
                row = [a - b for a, b in pairwise(row)]
                for k in range(k_max + 1):
                    value_sign = interval_sign(row[k])
                    if value_sign is None:
                        ambiguous = ambiguous or Witness(n, k, interval=interval_str(row[k]), spacing=spacing)
                    elif _is_violation(value_sign, flavor):
                        violation = Witness(n, k, interval=interval_str(row[k]), spacing=spacing)
                        break
                if violation:
                    break
        if violation and ambiguous is None:
            return _violated(depth, violation)
        if ambiguous is None:
            return _holds(depth)
        log_debug(f"sign at (n={ambiguous.n}, k={ambiguous.k}) undecided at {bits} bits")
    # an undecided cell precedes any violation found, so the first witness is unknown
    return PropertyVerdict(VerdictStatus.INDETERMINATE, depth, ambiguous)


def _exact_log_scan(seq: LogSequence, n_max: int, k_max: int, flavor: Flavor, depth: Depth) -> PropertyVerdict:
    row = [seq.exponents(k) for k in range(k_max + n_max + 1)]
    for n in range(1, n_max + 1):
        row = [_combine(((1, a), (-1, b))) for a, b in pairwise(row)]
        for k in range(k_max + 1):
            if _is_violation(exact_log_sign(row[k]), flavor):
                return _violated(depth, Witness(n, k, interval=_log_witness_interval(row[k])))
    return _holds(depth)


def battery(
    seq: RationalSequence | CertifiedSequence | LogSequence,
    flavor: Flavor | str,
    n_max: int | None = None,
    k_max: int | None = None,
) -> PropertyVerdict:
    """
    Joint verdict for orders `1 <= n <= n_max` and indices `0 <= k <= k_max`.

    The witness of a violation is the lexicographically first `(n, k)`.
    """
    flavor = Flavor(flavor)
    depth = battery_depth(n_max, k_max)
    if flavor.is_log:
        if not isinstance(seq, LogSequence):
            raise InvalidArgument(f"the {flavor} battery needs a log sequence, got {seq!r}")
        if seq.is_exact:
            return _exact_log_scan(seq, depth.n_max, depth.k_max, flavor, depth)
        return _certified_scan(seq.enclosure, depth.n_max, depth.k_max, flavor, depth)
    if isinstance(seq, LogSequence):
        raise InvalidArgument(f"the {flavor} battery needs a plain sequence, got {seq!r}")
    if isinstance(seq, CertifiedSequence):
        return _certified_scan(seq.enclosure, depth.n_max, depth.k_max, flavor, depth)
    return _exact_scan(seq, range(1, depth.n_max + 1), depth.k_max, flavor, depth)


def weights_battery(
    weights: WeightSequence,
    flavor: Flavor | str,
    target: BatteryTarget | str = BatteryTarget.WEIGHTS,
    n_max: int | None = None,
    k_max: int | None = None,
) -> PropertyVerdict:
    """
    Runs `battery` on the squared weights or the moments of `weights`.

    Plain flavors fall back to certified enclosures once a term turns out to be irrational.
    """
    flavor, target = Flavor(flavor), BatteryTarget(target)
    on_moments = target is BatteryTarget.MOMENTS
    if flavor.is_log:
        log_seq = LogSequence.of_moments(weights) if on_moments else LogSequence.of_weights(weights)
        return battery(log_seq, flavor, n_max, k_max)
    exact = ExactSequence.of_moments(MomentSequence(weights)) if on_moments else ExactSequence.of_weights(weights)
    try:
        return battery(exact, flavor, n_max, k_max)
    except InexactValue as e:
        log_debug(f"switching to certified enclosures: {e}")
    certified = CertifiedSequence.of_moments(weights) if on_moments else CertifiedSequence.of_weights(weights)
    return battery(certified, flavor, n_max, k_max)


# ----------------------------- #
# resampled interpolating probe #
# ----------------------------- #


def _with_spacing(verdict: PropertyVerdict, spacing: Fraction) -> PropertyVerdict:
    if verdict.witness is None:
        return verdict
    return dataclasses.replace(verdict, witness=dataclasses.replace(verdict.witness, spacing=spacing))


def _probe_at_spacing(params: ShiftParams, spacing: Fraction, flavor: Flavor, depth: Depth) -> PropertyVerdict:
    if (root := exact_root(params.p, spacing.denominator)) is not None:
        # f(h k) with rational p^h is the GRWS with p replaced by p^h
        resampled = GrwsWeights(ShiftParams(root**spacing.numerator, params.N, params.D))
        verdict = weights_battery(resampled, flavor, BatteryTarget.WEIGHTS, depth.n_max, depth.k_max)
        return _with_spacing(verdict, spacing)

    def term(k: int) -> Any:
        power = mpmath.iv.exp(k * to_interval(spacing) * mpmath.iv.log(to_interval(params.p)))
        upper, lower = power + to_interval(params.N), power + to_interval(params.D)
        if flavor.is_log:
            return mpmath.iv.log(upper) - mpmath.iv.log(lower)
        return upper / lower

    return _certified_scan(term, depth.n_max, depth.k_max, flavor, depth, spacing=spacing)


def function_alternation_probe(
    params: ShiftParams,
    flavor: ProbeFlavor | str,
    spacings: Iterable[RationalLike],
    n_max: int | None = None,
    k_max: int | None = None,
) -> PropertyVerdict:
    """
    Samples `f(x) = (p^x + N) / (p^x + D)` at `x = h k` for each spacing `h` and runs the matching battery.

    An interpolating (log) Bernstein function forces the property at every spacing, so one violation
    refutes interpolation. The first violation wins; otherwise any undecided spacing makes the result
    indeterminate.
    """
    flavor = ProbeFlavor(flavor)
    spacings = [to_fraction(h) for h in spacings]
    if not spacings:
        raise InvalidArgument("at least one spacing is required")
    if bad := [h for h in spacings if h <= 0]:
        raise InvalidArgument(f"spacings must be positive, got {', '.join(map(str, bad))}")
    depth = battery_depth(n_max, k_max)
    undecided: PropertyVerdict | None = None
    for h in spacings:
        verdict = _probe_at_spacing(params, h, flavor.battery_flavor, depth)
        if verdict.violated:
            return verdict
        if verdict.status is VerdictStatus.INDETERMINATE and undecided is None:
            undecided = verdict
    return undecided or _holds(depth)
