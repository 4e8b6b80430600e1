from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import sympy

from .errors import InvalidArgument, OutsideSector
from .log import log_debug
from .model import ExplicitWeights, Factor, GrwsWeights, WeightSequence, make_params
from .sequences import RationalSequence, nabla, weights_battery
from .types import BatteryTarget, Flavor, PropertyVerdict, ShiftParams
from .utils import RationalLike, parse_rational, rational_str, to_fraction


@dataclass(frozen=True)
class AffineMap:
    """`g(n) = ell * n + r`."""

    ell: int
    r: int

    def __post_init__(self) -> None:
        if self.ell < 1 or self.r < 0:
            raise InvalidArgument(f"an affine map needs ell >= 1 and r >= 0, got ell={self.ell}, r={self.r}")

    def __call__(self, n: int) -> int:
        return self.ell * n + self.r


# ------------------------- #
# weight sequence transforms #
# ------------------------- #


class SchurPower(WeightSequence):
    def __init__(self, base: WeightSequence, s: Fraction) -> None:
        self.base = base
        self.s = s

    def factors(self, n: int) -> tuple[Factor, ...]:
        return tuple((value, exponent * self.s) for value, exponent in self.base.factors(n))

    def __repr__(self) -> str:
        return f"SchurPower({self.base!r}, {rational_str(self.s)})"


class AluthgeTransform(WeightSequence):
    """Squared weights `alpha_n alpha_{n+1}`, kept as half powers of the original squared weights."""

    def __init__(self, base: WeightSequence) -> None:
        self.base = base

    def factors(self, n: int) -> tuple[Factor, ...]:
        half = Fraction(1, 2)
        return tuple(
            (value, exponent * half) for i in (n, n + 1) for value, exponent in self.base.factors(i)
        )

    def __repr__(self) -> str:
        return f"AluthgeTransform({self.base!r})"


class QuotientShift(WeightSequence):
    """Squared weights `alpha_n^2 / alpha_{n+1}^2`."""

    def __init__(self, base: WeightSequence) -> None:
        self.base = base

    def factors(self, n: int) -> tuple[Factor, ...]:
        return self.base.factors(n) + tuple((value, -exponent) for value, exponent in self.base.factors(n + 1))

    def __repr__(self) -> str:
        return f"QuotientShift({self.base!r})"


class AffineSubshift(WeightSequence):
    """Squared weights `alpha_{ell n + r}^2`."""

    def __init__(self, base: WeightSequence, affine: AffineMap) -> None:
        self.base = base
        self.affine = affine

    @property
    def params(self) -> ShiftParams | None:
        if (params := self.base.params) is None:
            return None
        return affine_subshift_params(params, self.affine)

    def factors(self, n: int) -> tuple[Factor, ...]:
        return self.base.factors(self.affine(n))

    def __repr__(self) -> str:
        return f"AffineSubshift({self.base!r}, ell={self.affine.ell}, r={self.affine.r})"


def schur_power(weights: WeightSequence, s: RationalLike) -> WeightSequence:
    s = to_fraction(s)
    if s <= 0:
        raise InvalidArgument(f"Schur powers need s > 0, got {rational_str(s)}")
    return weights if s == 1 else SchurPower(weights, s)


def aluthge(weights: WeightSequence) -> WeightSequence:
    return AluthgeTransform(weights)


def quotient_shift(weights: WeightSequence) -> WeightSequence:
    return QuotientShift(weights)


def affine_subshift(weights: WeightSequence, affine: AffineMap) -> WeightSequence:
    if weights.params is not None:
        return GrwsWeights(affine_subshift_params(weights.params, affine))
    return AffineSubshift(weights, affine)


# ------------------- #
# parameter transforms #
# ------------------- #


def affine_subshift_params(params: ShiftParams, affine: AffineMap) -> ShiftParams:
    """Subsampling along `ell n + r` gives the GRWS `(p^ell, N / p^r, D / p^r)`."""
    shift = params.p**affine.r
    return make_params(params.p**affine.ell, params.N / shift, params.D / shift)


def reciprocal(params: ShiftParams) -> ShiftParams:
    """The shift whose squared weights are the reciprocals of those of `params`."""
    return ShiftParams(params.p, params.D, params.N)


@dataclass(frozen=True)
class DerivedWeights:
    weights: ExplicitWeights
    """`w_n = (p^n + N) / (p (p^n + D / p))`, the successive ratios of the differenced moments."""
    witness: ShiftParams
    """The Sector I point `(N, D / p)` whose squared weights are `p w_n`."""


def viiia_derived_weights(params: ShiftParams) -> DerivedWeights:
    p, N, D = params.p, params.N, params.D
    if not p * N <= D <= N <= 0:
        raise OutsideSector(f"{params} is outside VIIIA (needs pN <= D <= N <= 0)")

    def term(n: int) -> Fraction:
        power = p**n
        return (power + N) / (p * (power + D / p))

    return DerivedWeights(ExplicitWeights(term, name=f"derived weights of {params}"), make_params(p, N, D / p))


# ---------------------------- #
# subsampled difference identity #
# ---------------------------- #


@dataclass(frozen=True)
class PGCoefficients:
    k: int
    n: int
    c: tuple[int, ...]
    """Coefficients of `(1 + x + ... + x^{k-1})^n`, lowest degree first."""

    def __post_init__(self) -> None:
        if len(self.c) != self.n * (self.k - 1) + 1:
            raise InvalidArgument("coefficient count must be n(k - 1) + 1")


def pg_coefficients(k: int, n: int) -> PGCoefficients:
    if k < 2 or n < 1:
        raise InvalidArgument(f"need k >= 2 and n >= 1, got k={k}, n={n}")
    x = sympy.Symbol("x")
    poly = sympy.Poly(sum(x**i for i in range(k)) ** n, x)
    return PGCoefficients(k, n, tuple(int(value) for value in reversed(poly.all_coeffs())))


def pg_identity_check(seq: RationalSequence, k: int, n: int, m: int, i0: int) -> bool:
    """
    `nabla^n` of the subsequence `b_i = a_{k i + i0}` at `m`, against the weighted sum of `nabla^n a`.

    `sum_i (-1)^i C(n, i) a_{k(m+i)+i0} == sum_j c_j (nabla^n a)_{km+j+i0}`
    """
    coefficients = pg_coefficients(k, n)
    lhs = sum(
        (Fraction((-1) ** i * math.comb(n, i)) * seq[k * (m + i) + i0] for i in range(n + 1)),
        Fraction(0),
    )
    rhs = sum(
        (c_j * nabla(seq, n, k * m + j + i0) for j, c_j in enumerate(coefficients.c)),
        Fraction(0),
    )
    return lhs == rhs


# --------- #
# pipelines #
# --------- #


@dataclass
class PipelineResult:
    weights: WeightSequence
    steps: list[str] = field(default_factory=list)
    verdicts: list[tuple[str, PropertyVerdict]] = field(default_factory=list)


def _parse_ints(step: str, argument: str, count: int) -> list[int]:
    parts = argument.split(",")
    if len(parts) != count or not all(part.strip().isdigit() for part in parts):
        raise InvalidArgument(f"pipeline step {step!r} needs {count} nonnegative integer argument(s)")
    return [int(part) for part in parts]


def _apply_step(result: PipelineResult, step: str, n_max: int | None, k_max: int | None) -> None:
    name, _, argument = step.partition(":")
    weights = result.weights
    if name == "aluthge" and not argument:
        result.weights = aluthge(weights)
    elif name == "quotient" and not argument:
        result.weights = quotient_shift(weights)
    elif name == "schur" and argument:
        result.weights = schur_power(weights, parse_rational(argument))
    elif name == "subshift" and argument:
        ell, r = _parse_ints(step, argument, 2)
        result.weights = affine_subshift(weights, AffineMap(ell, r))
    elif name == "reciprocal" and not argument:
        if weights.params is None:
            raise InvalidArgument("reciprocal applies only while the sequence is still a GRWS")
        result.weights = GrwsWeights(reciprocal(weights.params))
    elif name == "battery" and argument:
        flavor, _, target = argument.partition("@")
        if not Flavor.has_value(flavor) or (target and not BatteryTarget.has_value(target)):
            raise InvalidArgument(f"unknown battery in pipeline step {step!r}")
        verdict = weights_battery(weights, flavor, target or BatteryTarget.WEIGHTS, n_max, k_max)
        result.verdicts.append((step, verdict))
    else:
        raise InvalidArgument(f"unknown pipeline step {step!r}")
    result.steps.append(step)
    log_debug(f"pipeline step {step!r} -> {result.weights!r}")


def run_pipeline(
    weights: WeightSequence,
    pipeline: str,
    n_max: int | None = None,
    k_max: int | None = None,
) -> PipelineResult:
    """
    Applies `|`-separated steps left to right, e.g. `aluthge|schur:1/2|subshift:2,1|battery:log-alternating`.

    Steps: `aluthge`, `quotient`, `schur:s`, `subshift:ell,r`, `reciprocal` and `battery:flavor[@weights|@moments]`.
    """
    steps = [step.strip() for step in pipeline.split("|") if step.strip()]
    if not steps:
        raise InvalidArgument("empty pipeline")
    result = PipelineResult(weights)
    for step in steps:
        _apply_step(result, step, n_max, k_max)
    return result
