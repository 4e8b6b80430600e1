from __future__ import annotations

import math
import threading
from abc import ABC, abstractmethod
from collections.abc import Callable
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Any, Tuple

import mpmath

from .constants import DEFAULT_APPROX_DPS, DEFAULT_RAY_DEPTH
from .errors import InexactValue, InvalidArgument, ParameterOutOfSquare
from .settings import get_setting
from .types import HypoOrder, Sector, SectorLabel, ShiftParams
from .utils import RationalLike, exact_root, interval_power, rational_str, to_fraction

Factor = Tuple[Fraction, Fraction]
"""`(base, exponent)`: the positive rational `base` raised to the rational `exponent`."""


def make_params(p: RationalLike, N: RationalLike, D: RationalLike) -> ShiftParams:
    p, N, D = to_fraction(p), to_fraction(N), to_fraction(D)
    if p <= 1:
        raise ParameterOutOfSquare(f"p = {rational_str(p)} must exceed 1")
    for name, value in (("N", N), ("D", D)):
        if not -1 < value < 1:
            raise ParameterOutOfSquare(f"{name} = {rational_str(value)} must lie in (-1, 1)")
    return ShiftParams(p, N, D)


def from_scaled_form(K: RationalLike, p: RationalLike, N: RationalLike, D_scaled: RationalLike) -> ShiftParams:
    """Parameters of the shift with weights `sqrt((K p^n + N) / (K p^n + D_scaled))`."""
    K = to_fraction(K)
    if K <= 0:
        raise ParameterOutOfSquare(f"scale K = {rational_str(K)} must be positive")
    return make_params(p, to_fraction(N) / K, to_fraction(D_scaled) / K)


# ------------------ #
# weight sequences   #
# ------------------ #


class WeightSequence(ABC):
    """
    Squared weights `alpha_n^2`, each stored as a product of rational powers of positive rationals.

    The multiplicative form keeps Schur powers, Aluthge transforms and quotients exact even when the
    squared weights themselves are irrational.
    """

    @abstractmethod
    def factors(self, n: int) -> tuple[Factor, ...]:
        """Factors whose product is `alpha_n^2`."""

    @property
    def params(self) -> ShiftParams | None:
        """The GRWS parameters when the sequence is still a GRWS."""
        return None

    def weight_sq(self, n: int) -> Fraction:
        value = Fraction(1)
        for base, exponent in self.factors(n):
            if exponent.denominator == 1:
                value *= base**exponent.numerator
                continue
            if (root := exact_root(base, exponent.denominator)) is None:
                raise InexactValue(f"alpha_{n}^2 involves {rational_str(base)}^({rational_str(exponent)})")
            value *= root**exponent.numerator
        return value

    def weight_sq_enclosure(self, n: int) -> Any:
        """A certified `mpmath.iv` enclosure of `alpha_n^2` at the current interval precision."""
        enclosure = mpmath.iv.mpf(1)
        for base, exponent in self.factors(n):
            enclosure *= interval_power(base, exponent)
        return enclosure

    def weight(self, n: int, dps: int | None = None) -> mpmath.mpf:
        """A decimal approximation of `alpha_n` (never used for decisions)."""
        with mpmath.workdps(dps or get_setting("approx_dps", DEFAULT_APPROX_DPS)):
            value = mpmath.mpf(1)
            for base, exponent in self.factors(n):
                half_exponent = mpmath.mpf(exponent.numerator) / (2 * exponent.denominator)
                value *= mpmath.power(mpmath.mpf(base.numerator) / base.denominator, half_exponent)
            return +value

    def prefix(self, count: int) -> list[Fraction]:
        return [self.weight_sq(n) for n in range(count)]


class GrwsWeights(WeightSequence):
    def __init__(self, params: ShiftParams) -> None:
        self._params = params

    @property
    def params(self) -> ShiftParams:
        return self._params

    def factors(self, n: int) -> tuple[Factor, ...]:
        return ((weight_sq(self._params, n), Fraction(1)),)

    def weight_sq(self, n: int) -> Fraction:
        return weight_sq(self._params, n)

    def __repr__(self) -> str:
        return f"GrwsWeights{self._params}"


class ExplicitWeights(WeightSequence):
    """Squared weights given by a callable returning positive rationals."""

    def __init__(self, term: Callable[[int], Fraction], name: str = "explicit") -> None:
        self._term = term
        self.name = name

    def factors(self, n: int) -> tuple[Factor, ...]:
        value = Fraction(self._term(n))
        if value <= 0:
            raise InvalidArgument(f"squared weight {n} of {self.name} is not positive")
        return ((value, Fraction(1)),)

    def __repr__(self) -> str:
        return f"ExplicitWeights({self.name})"


def constant_weights(value: RationalLike = 1) -> ExplicitWeights:
    constant = to_fraction(value)
    return ExplicitWeights(lambda n: constant, name=f"constant {rational_str(constant)}")


def geometric_weights(ratio: RationalLike) -> ExplicitWeights:
    """Squared weights `ratio^n`."""
    r = to_fraction(ratio)
    return ExplicitWeights(lambda n: r**n, name=f"geometric {rational_str(r)}")


# ----------------- #
# moment sequences  #
# ----------------- #


class MomentSequence:
    """
    Moments `gamma_n = alpha_0^2 ... alpha_{n-1}^2` with a memoized prefix.

    The prefix only grows, and growth happens under a lock, so concurrent readers are safe.
    """

    def __init__(self, weights: WeightSequence) -> None:
        self.weights = weights
        self._prefix: list[Fraction] = [Fraction(1)]
        self._lock = threading.Lock()

    def _extend_to(self, n: int) -> None:
        with self._lock:
            while len(self._prefix) <= n:
                last = len(self._prefix) - 1
                self._prefix.append(self._prefix[last] * self.weights.weight_sq(last))

    def __getitem__(self, n: int) -> Fraction:
        if not isinstance(n, int) or n < 0:
            raise IndexError(f"moment index must be a nonnegative integer, got {n!r}")
        if n >= len(self._prefix):
            self._extend_to(n)
        return self._prefix[n]

    def prefix(self, count: int) -> list[Fraction]:
        if count:
            self._extend_to(count - 1)
        return self._prefix[:count]


@lru_cache(maxsize=256)
def moments_of(params: ShiftParams) -> MomentSequence:
    return MomentSequence(GrwsWeights(params))


def weight_sq(params: ShiftParams, n: int) -> Fraction:
    power = params.p**n
    return (power + params.N) / (power + params.D)


def moment(params: ShiftParams, n: int) -> Fraction:
    return moments_of(params)[n]


# -------------- #
# classification #
# -------------- #


def special_ray_k(params: ShiftParams, ray_depth: int | None = None) -> int | None:
    """The `k` with `D = p^k N` on the diagonal (`k = 0`) or in Sector IV, if any up to `ray_depth`."""
    p, N, D = params.p, params.N, params.D
    if D == N:
        return 0
    if not 0 < N < D:
        return None
    ray_depth = get_setting("ray_depth", DEFAULT_RAY_DEPTH) if ray_depth is None else ray_depth
    scaled = N
    for k in range(1, ray_depth + 1):
        scaled *= p
        if scaled >= D:
            return k if scaled == D else None
    return None


def classify(params: ShiftParams, ray_depth: int | None = None) -> SectorLabel:
    p, N, D = params.p, params.N, params.D
    rules = {
        Sector.I: N <= 0 and N <= D <= 0,
        Sector.II: N <= 0 and 0 <= D <= -N,
        Sector.III: N <= 0 and -N <= D,
        Sector.IV: 0 <= N <= D,
        Sector.V: 0 <= D <= N,
        Sector.VI: N >= 0 and -N <= D <= 0,
        Sector.VII: N >= 0 and D <= -N,
        Sector.VIII: D <= N <= 0,
    }
    return SectorLabel(
        sectors=frozenset(sector for sector, inside in rules.items() if inside),
        on_diagonal=D == N,
        viiia=p * N <= D <= N <= 0,
        ia=N <= D <= N / p <= 0,
        special_ray_k=special_ray_k(params, ray_depth),
    )


# ------------------------------- #
# claims per sector               #
# ------------------------------- #


@dataclass(frozen=True)
class Prediction:
    summary: str
    subnormal: bool | None = None
    mid: bool | None = None
    completely_hyperexpansive: bool | None = None
    bernstein: bool | None = None
    log_bernstein: bool | None = None
    weights_log_completely_monotone: bool | None = None
    hypo_order: HypoOrder | None = None
    atoms: int | None = None

    def to_payload(self) -> dict[str, Any]:
        payload: dict[str, Any] = {"summary": self.summary}
        for key in (
            "subnormal",
            "mid",
            "completely_hyperexpansive",
            "bernstein",
            "log_bernstein",
            "weights_log_completely_monotone",
            "atoms",
        ):
            if (value := getattr(self, key)) is not None:
                payload[key] = value
        if self.hypo_order is not None:
            payload["hypo_order"] = "infinite" if self.hypo_order == math.inf else int(self.hypo_order)
        return payload


def predict_properties(params: ShiftParams, label: SectorLabel | None = None) -> Prediction:
    """What the sector of `params` implies; `None` fields carry no claim."""
    from .hankel import sector_iv_predicted_order

    label = label or classify(params)
    if label.on_diagonal:
        return Prediction(
            "unweighted shift: MID and completely hyperexpansive",
            subnormal=True,
            mid=True,
            completely_hyperexpansive=True,
            hypo_order=math.inf,
            atoms=1,
        )
    if Sector.I in label:
        summary = "MID, Bernstein-interpolated"
        if label.ia:
            summary += "; reciprocal of a completely hyperexpansive shift (IA)"
        return Prediction(summary, subnormal=True, mid=True, bernstein=True, log_bernstein=True, hypo_order=math.inf)
    if Sector.II in label:
        return Prediction(
            "MID, log-Bernstein-interpolated", subnormal=True, mid=True, log_bernstein=True, hypo_order=math.inf
        )
    if Sector.III in label:
        return Prediction("subnormal (countably atomic Berger measure)", subnormal=True, hypo_order=math.inf)
    if Sector.IV in label:
        if (k := label.special_ray_k) is not None:
            return Prediction(
                f"subnormal with a {k + 1}-atomic Berger measure, not MID",
                subnormal=True,
                mid=False,
                hypo_order=math.inf,
                atoms=k + 1,
            )
        order = sector_iv_predicted_order(params)
        if order == math.inf:
            return Prediction("subnormal with a finitely atomic Berger measure, not MID", subnormal=True, mid=False)
        return Prediction(
            f"{order}-hyponormal but not {order + 1}-hyponormal", subnormal=False, mid=False, hypo_order=order
        )
    if label.viiia:
        return Prediction("completely hyperexpansive", completely_hyperexpansive=True)
    if Sector.VI in label:
        return Prediction("weights squared log completely monotone", weights_log_completely_monotone=True)
    return Prediction("no claim")


# ----------------------------- #
# geometric subshifts of Agler  #
# ----------------------------- #


@dataclass(frozen=True)
class AglerSubshift:
    params: ShiftParams
    j: int
    case: int
    """Which claim applies: 1 Bernstein MID, 2 log-Bernstein MID, 3 subnormal, 4 finitely atomic, 0 none."""


def agler_subshift(K: int, p: RationalLike, N: int, j: int) -> AglerSubshift:
    """
    The subshift of the `j`-th Agler shift with weights `sqrt((K p^n + N) / (K p^n + N + j - 1))`.

    `K` must exceed both `|N|` and `|N + j - 1|`.
    """
    if j <= 1:
        raise InvalidArgument("the Agler index j must exceed 1")
    if K <= max(abs(N), abs(N + j - 1)):
        raise ParameterOutOfSquare(f"K = {K} must exceed |N| and |N + j - 1|")
    params = from_scaled_form(K, p, N, N + j - 1)
    if N <= 1 - j:
        case = 1
    elif 2 * N <= 1 - j:
        case = 2
    elif N <= 0:
        case = 3
    elif classify(params).special_ray_k not in (None, 0):
        case = 4
    else:
        case = 0
    return AglerSubshift(params, j, case)
