from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Any, Callable, Dict, List, Optional, TypeVar, Union

from typing_extensions import NotRequired, TypedDict

from .utils import rational_str

T_Callable = TypeVar("T_Callable", bound=Callable[..., Any])

HypoOrder = Union[int, float]
"""A hyponormality order; `math.inf` marks an unbounded order."""


class EnhancedStrEnum(str, Enum):
    def __str__(self) -> str:
        return str(self.value)

    @classmethod
    def has_value(cls, value: str) -> bool:
        return any(value == member.value for member in cls)


class Sector(EnhancedStrEnum):
    I = "I"
    II = "II"
    III = "III"
    IV = "IV"
    V = "V"
    VI = "VI"
    VII = "VII"
    VIII = "VIII"

    @property
    def rank(self) -> int:
        return list(Sector).index(self)


class VerdictStatus(EnhancedStrEnum):
    HOLDS_TO_DEPTH = "holds-to-depth"
    VIOLATED = "violated"
    INDETERMINATE = "indeterminate"


class Flavor(EnhancedStrEnum):
    MONOTONE = "monotone"
    ALTERNATING = "alternating"
    LOG_MONOTONE = "log-monotone"
    LOG_ALTERNATING = "log-alternating"

    @property
    def is_log(self) -> bool:
        return self in (Flavor.LOG_MONOTONE, Flavor.LOG_ALTERNATING)

    @property
    def wants_nonnegative(self) -> bool:
        return self in (Flavor.MONOTONE, Flavor.LOG_MONOTONE)


class ProbeFlavor(EnhancedStrEnum):
    PLAIN = "plain"
    LOG = "log"
    MONOTONE = "monotone"
    LOG_MONOTONE = "log-monotone"

    @property
    def battery_flavor(self) -> Flavor:
        return {
            ProbeFlavor.PLAIN: Flavor.ALTERNATING,
            ProbeFlavor.LOG: Flavor.LOG_ALTERNATING,
            ProbeFlavor.MONOTONE: Flavor.MONOTONE,
            ProbeFlavor.LOG_MONOTONE: Flavor.LOG_MONOTONE,
        }[self]


class BatteryTarget(EnhancedStrEnum):
    WEIGHTS = "weights"
    MOMENTS = "moments"


class OutputFormat(EnhancedStrEnum):
    JSON = "json"
    CSV = "csv"
    TEXT = "text"


# --------------- #
# JSON payloads   #
# --------------- #

RationalStr = str


class ShiftParamsPayload(TypedDict):
    p: RationalStr
    N: RationalStr
    D: RationalStr


class DepthPayload(TypedDict):
    n_max: int
    k_max: int


class WitnessPayload(TypedDict):
    n: int
    k: int
    value: NotRequired[RationalStr]
    interval: NotRequired[str]
    spacing: NotRequired[RationalStr]


class VerdictPayload(TypedDict):
    status: str
    witness: Optional[WitnessPayload]
    depth: DepthPayload


class SectorPayload(TypedDict):
    sectors: List[str]
    on_diagonal: bool
    viiia: bool
    ia: bool
    special_ray_k: Optional[int]


class FailurePayload(TypedDict):
    size: int
    j: int
    sign: int


class HypoVerdictPayload(TypedDict):
    order: Union[int, str]
    at_least: bool
    first_failure: Optional[FailurePayload]
    flat_from: Optional[int]
    probe: Dict[str, int]


class AtomPayload(TypedDict):
    atom: RationalStr
    density: RationalStr


class MeasurePayload(TypedDict):
    atoms: List[AtomPayload]
    truncated: bool
    tail_bound: NotRequired[RationalStr]
    boundary: bool


class ErrorPayload(TypedDict):
    type: str
    message: str


# ------------ #
# value types  #
# ------------ #


@dataclass(frozen=True)
class ShiftParams:
    p: Fraction
    """Geometric parameter, `p > 1`."""
    N: Fraction
    """Numerator offset, `-1 < N < 1`."""
    D: Fraction
    """Denominator offset, `-1 < D < 1`."""

    def to_payload(self) -> ShiftParamsPayload:
        return {"p": rational_str(self.p), "N": rational_str(self.N), "D": rational_str(self.D)}

    def __str__(self) -> str:
        return f"({rational_str(self.p)}, {rational_str(self.N)}, {rational_str(self.D)})"


@dataclass(frozen=True)
class SectorLabel:
    sectors: frozenset[Sector]
    on_diagonal: bool = False
    viiia: bool = False
    ia: bool = False
    special_ray_k: int | None = None

    def sorted_sectors(self) -> list[Sector]:
        return sorted(self.sectors, key=lambda sector: sector.rank)

    def __contains__(self, sector: object) -> bool:
        return sector in self.sectors

    def to_payload(self) -> SectorPayload:
        return {
            "sectors": [str(sector) for sector in self.sorted_sectors()],
            "on_diagonal": self.on_diagonal,
            "viiia": self.viiia,
            "ia": self.ia,
            "special_ray_k": self.special_ray_k,
        }


@dataclass(frozen=True)
class Depth:
    n_max: int
    k_max: int

    def to_payload(self) -> DepthPayload:
        return {"n_max": self.n_max, "k_max": self.k_max}


@dataclass(frozen=True)
class Witness:
    n: int
    """Difference order."""
    k: int
    """Sequence index."""
    value: Fraction | None = None
    """Exact value of the offending difference, when it is rational."""
    interval: str | None = None
    """Certified enclosure of the offending value, rendered as `[lo, hi]`."""
    spacing: Fraction | None = None
    """Sampling spacing `h` for function probes."""

    def to_payload(self) -> WitnessPayload:
        payload: WitnessPayload = {"n": self.n, "k": self.k}
        if self.value is not None:
            payload["value"] = rational_str(self.value)
        if self.interval is not None:
            payload["interval"] = self.interval
        if self.spacing is not None:
            payload["spacing"] = rational_str(self.spacing)
        return payload


@dataclass(frozen=True)
class PropertyVerdict:
    status: VerdictStatus
    depth: Depth
    witness: Witness | None = None

    def __post_init__(self) -> None:
        if self.status is VerdictStatus.VIOLATED and self.witness is None:
            raise ValueError("a violated verdict needs a witness")

    @property
    def holds(self) -> bool:
        return self.status is VerdictStatus.HOLDS_TO_DEPTH

    @property
    def violated(self) -> bool:
        return self.status is VerdictStatus.VIOLATED

    def to_payload(self) -> VerdictPayload:
        return {
            "status": str(self.status),
            "witness": self.witness.to_payload() if self.witness else None,
            "depth": self.depth.to_payload(),
        }


@dataclass(frozen=True)
class HankelFailure:
    size: int
    """Size of the Hankel window `M(size, j)` whose determinant has the wrong sign."""
    j: int
    sign: int


@dataclass(frozen=True)
class HypoVerdict:
    order: int
    at_least: bool
    """`True` when no failure was found up to the probe bound `order`."""
    k_probe: int
    j_probe: int
    first_failure: HankelFailure | None = None
    flat_from: int | None = None
    """Smallest window size from which every probed determinant vanishes."""

    def to_payload(self) -> HypoVerdictPayload:
        failure: FailurePayload | None = None
        if self.first_failure:
            failure = {"size": self.first_failure.size, "j": self.first_failure.j, "sign": self.first_failure.sign}
        return {
            "order": f"at-least {self.order}" if self.at_least else self.order,
            "at_least": self.at_least,
            "first_failure": failure,
            "flat_from": self.flat_from,
            "probe": {"k_probe": self.k_probe, "j_probe": self.j_probe},
        }
