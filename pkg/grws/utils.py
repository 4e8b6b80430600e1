from __future__ import annotations

import contextlib
import math
import re
from collections.abc import Generator, Iterable
from fractions import Fraction
from typing import Any, Union

import mpmath
from sympy import integer_nthroot

from .errors import InvalidRational

RationalLike = Union[Fraction, int, str]

_RATIONAL_PATTERN = re.compile(r"^[+-]?\d+(?:/\d+)?$")


# --------------- #
# exact rationals #
# --------------- #


def rational_str(value: Fraction | int) -> str:
    """Formats `value` as `"num/den"`, integers included (`"2/1"`)."""
    value = Fraction(value)
    return f"{value.numerator}/{value.denominator}"


def parse_rational(text: str) -> Fraction:
    """
    Parses an exact rational such as `-1/2` or `3`.

    Decimal notation is rejected rather than rounded.
    """
    text = text.strip()
    if not _RATIONAL_PATTERN.match(text):
        raise InvalidRational(f"not an exact rational: {text!r} (write e.g. '-1/2', decimals are rejected)")
    try:
        return Fraction(text)
    except ZeroDivisionError as e:
        raise InvalidRational(f"zero denominator: {text!r}") from e


def to_fraction(value: RationalLike) -> Fraction:
    if isinstance(value, str):
        return parse_rational(value)
    if isinstance(value, float):
        raise InvalidRational(f"floats are not exact rationals: {value!r}")
    return Fraction(value)


def exact_root(value: Fraction, degree: int) -> Fraction | None:
    """Returns the nonnegative `degree`-th root of `value >= 0` when it is rational, else `None`."""
    if degree == 1:
        return value
    num, num_exact = integer_nthroot(value.numerator, degree)
    if not num_exact:
        return None
    den, den_exact = integer_nthroot(value.denominator, degree)
    return Fraction(int(num), int(den)) if den_exact else None


def lcm_all(values: Iterable[int]) -> int:
    result = 1
    for value in values:
        result = result * value // math.gcd(result, value)
    return result


def rational_grid(step: Fraction) -> list[Fraction]:
    """Multiples `-1 + i * step` strictly inside `(-1, 1)`."""
    if step <= 0:
        raise ValueError("grid step must be positive")
    count = math.ceil(2 / step)
    return [value for i in range(1, count + 1) if -1 < (value := -1 + i * step) < 1]


def sign(value: Fraction | int) -> int:
    return (value > 0) - (value < 0)


# ------------------------ #
# certified interval tools #
# ------------------------ #


@contextlib.contextmanager
def interval_precision(bits: int) -> Generator[None, None, None]:
    """Temporarily sets the working precision (in bits) of `mpmath.iv`."""
    previous = mpmath.iv.prec
    mpmath.iv.prec = bits
    try:
        yield
    finally:
        mpmath.iv.prec = previous


def to_interval(value: Fraction | int) -> Any:
    """An `mpmath.iv` enclosure of an exact rational at the current precision."""
    value = Fraction(value)
    return mpmath.iv.mpf(value.numerator) / value.denominator


def interval_sign(enclosure: Any) -> int | None:
    """Sign of every point of the enclosure, or `None` when it straddles zero."""
    if enclosure.a > 0:
        return 1
    if enclosure.b < 0:
        return -1
    if enclosure.a == 0 and enclosure.b == 0:
        return 0
    return None


def interval_str(enclosure: Any, digits: int = 20) -> str:
    return mpmath.iv.nstr(enclosure, digits)


def interval_power(base: Fraction, exponent: Fraction) -> Any:
    """An enclosure of `base ** exponent` for positive rational `base`."""
    if exponent.denominator == 1:
        power = to_interval(base) ** abs(exponent.numerator)
        return power if exponent >= 0 else 1 / power
    return mpmath.iv.exp(to_interval(exponent) * mpmath.iv.log(to_interval(base)))
