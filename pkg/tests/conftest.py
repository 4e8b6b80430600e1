from __future__ import annotations

from collections.abc import Iterator
from fractions import Fraction

import pytest

from grws.settings import use_settings_file
from grws.types import ShiftParams


@pytest.fixture(autouse=True)
def bundled_settings() -> Iterator[None]:
    use_settings_file(None)
    yield
    use_settings_file(None)


def params(p: str, N: str, D: str) -> ShiftParams:
    return ShiftParams(Fraction(p), Fraction(N), Fraction(D))


SECTOR_I = params("2", "-1/2", "-1/4")
SECTOR_II = params("2", "-1/2", "1/4")
SECTOR_III = params("2", "-1/4", "1/2")
RAY_K1 = params("2", "1/4", "1/2")
OFF_RAY_IV = params("2", "1/10", "3/10")
SECTOR_V = params("2", "1/2", "1/4")
VIIIA = params("3/2", "-1/2", "-2/3")
