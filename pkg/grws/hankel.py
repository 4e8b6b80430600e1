from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from sympy import QQ
from sympy.polys.matrices import DomainMatrix

from .constants import DEFAULT_J_PROBE, DEFAULT_K_PROBE
from .errors import InvalidArgument, OutsideSector
from .model import MomentSequence, moments_of, weight_sq
from .settings import get_setting_dotted
from .types import HankelFailure, HypoOrder, HypoVerdict, ShiftParams
from .utils import rational_str, sign

Matrix = tuple[tuple[Fraction, ...], ...]


@dataclass(frozen=True)
class HankelWindow:
    """The normalized moment matrix `M(k, j)` with entries `gamma_{j+r+s} / gamma_j`."""

    k: int
    j: int
    entries: Matrix

    def minor(self, drop_rows: set[int], drop_cols: set[int]) -> Matrix:
        return tuple(
            tuple(value for s, value in enumerate(row) if s not in drop_cols)
            for r, row in enumerate(self.entries)
            if r not in drop_rows
        )


def hankel(moments: MomentSequence, k: int, j: int) -> HankelWindow:
    if k < 1 or j < 0:
        raise InvalidArgument(f"a Hankel window needs k >= 1 and j >= 0, got k={k}, j={j}")
    base = moments[j]
    values = [moments[j + i] / base for i in range(2 * k - 1)]
    return HankelWindow(k, j, tuple(tuple(values[r + s] for s in range(k)) for r in range(k)))


def det_matrix(entries: Matrix) -> Fraction:
    """Exact determinant of a rational matrix, eliminated over `QQ`."""
    size = len(entries)
    if size == 0:
        return Fraction(1)
    rows = [[QQ(value.numerator, value.denominator) for value in map(Fraction, row)] for row in entries]
    det = DomainMatrix(rows, (size, size), QQ).det()
    return Fraction(int(det.numerator), int(det.denominator))


def det_exact(window: HankelWindow) -> Fraction:
    return det_matrix(window.entries)


def det_closed_form(params: ShiftParams, k: int, j: int) -> Fraction:
    """The product formula for `det M(k, j)`, valid for `k >= 2`."""
    if k < 2 or j < 0:
        raise InvalidArgument(f"the closed form needs k >= 2 and j >= 0, got k={k}, j={j}")
    p, N, D = params.p, params.N, params.D
    numerator = p ** (k * (k - 1) * (k - 2) // 3) * (p**j) ** (k * (k - 1) // 2)
    for i in range(k - 1):
        multiplicity = k - i - 1
        numerator *= ((1 - p ** (i + 1)) * (N * p**i - D) * (N + p ** (i + j))) ** multiplicity
    leading = Fraction(1)
    for ell in range(k - 1):
        leading *= D + p ** (ell + j)
    denominator = leading**k
    for i in range(1, k):
        denominator *= (D + p ** (j + i + k - 2)) ** (k - i)
    return numerator / denominator


def condensation_check(params: ShiftParams, k: int, j: int) -> bool:
    """
    Desnanot-Jacobi condensation on `M(k, j)`, with each minor rewritten as a scaled Hankel window.

    `det M(k,j) (a_j a_{j+1})^{k-2} det M(k-2,j+2)
        == (a_j a_{j+1})^{k-1} det M(k-1,j+2) det M(k-1,j) - a_j^{2(k-1)} det M(k-1,j+1)^2`
    where `a_i` is the squared weight `alpha_i^2`.
    """
    if k < 3:
        raise InvalidArgument("condensation needs k >= 3")
    moments = moments_of(params)

    def det(size: int, start: int) -> Fraction:
        return det_exact(hankel(moments, size, start))

    a_j, a_next = weight_sq(params, j), weight_sq(params, j + 1)
    lhs = det(k, j) * (a_j * a_next) ** (k - 2) * det(k - 2, j + 2)
    rhs = (a_j * a_next) ** (k - 1) * det(k - 1, j + 2) * det(k - 1, j) - a_j ** (2 * (k - 1)) * det(k - 1, j + 1) ** 2
    return lhs == rhs


def condensation_minors_check(params: ShiftParams, k: int, j: int) -> bool:
    """The raw condensation identity on the minors of `M(k, j)` themselves."""
    if k < 3:
        raise InvalidArgument("condensation needs k >= 3")
    window = hankel(moments_of(params), k, j)
    last = k - 1

    def det(rows: set[int], cols: set[int]) -> Fraction:
        return det_matrix(window.minor(rows, cols))

    lhs = det(set(), set()) * det({0, last}, {0, last})
    rhs = det({0}, {0}) * det({last}, {last}) - det({last}, {0}) * det({0}, {last})
    return lhs == rhs


# ------------------ #
# hyponormality      #
# ------------------ #


def hyponormality_order(params: ShiftParams, k_probe: int | None = None, j_probe: int | None = None) -> HypoVerdict:
    """
    The largest order `m <= k_probe` with every window `M(n, j)`, `2 <= n <= m + 1`, `j <= j_probe` positive.

    A vanishing determinant is tolerated only while every later window containing that block also vanishes;
    the family is then flat. Any nonzero determinant of such a window is a failure.
    """
    k_probe = get_setting_dotted("hypo.k_probe", DEFAULT_K_PROBE) if k_probe is None else k_probe
    j_probe = get_setting_dotted("hypo.j_probe", DEFAULT_J_PROBE) if j_probe is None else j_probe
    if k_probe < 1 or j_probe < 0:
        raise InvalidArgument("hyponormality probes need k_probe >= 1 and j_probe >= 0")
    moments = moments_of(params)
    degenerate: list[tuple[int, int]] = []
    nonzero_sizes: set[int] = set()
    for size in range(2, k_probe + 2):
        for j in range(j_probe + 1):
            det_sign = sign(det_exact(hankel(moments, size, j)))
            contains_degenerate = any(n0 < size and j <= j0 <= j + size - n0 for n0, j0 in degenerate)
            if det_sign < 0 or (det_sign > 0 and contains_degenerate):
                return HypoVerdict(
                    order=size - 2,
                    at_least=False,
                    k_probe=k_probe,
                    j_probe=j_probe,
                    first_failure=HankelFailure(size, j, det_sign),
                )
            if det_sign == 0:
                degenerate.append((size, j))
            else:
                nonzero_sizes.add(size)
    flat_from = None
    if degenerate:
        flat_from = max(nonzero_sizes, default=1) + 1
    return HypoVerdict(order=k_probe, at_least=True, k_probe=k_probe, j_probe=j_probe, flat_from=flat_from)


def sector_iv_predicted_order(params: ShiftParams) -> HypoOrder:
    """
    The order forced by the position of `D` between the rays `D = p^{k-1} N` and `D = p^k N`.

    Returns `math.inf` on the rays and on the diagonal.
    """
    p, N, D = params.p, params.N, params.D
    if not 0 < N <= D:
        raise OutsideSector(f"{params} is outside the closure of Sector IV (needs 0 < N <= D)")
    if D == N:
        return math.inf
    k, upper = 1, N * p
    while upper < D:
        k, upper = k + 1, upper * p
    return math.inf if upper == D else k


# ------------------ #
# determinant tables #
# ------------------ #


@dataclass(frozen=True)
class DeterminantRow:
    k: int
    j: int
    exact: Fraction
    closed_form: Fraction

    @property
    def sign(self) -> int:
        return sign(self.exact)

    @property
    def matches(self) -> bool:
        return self.exact == self.closed_form

    def to_payload(self) -> dict[str, object]:
        return {
            "k": self.k,
            "j": self.j,
            "det": rational_str(self.exact),
            "closed_form": rational_str(self.closed_form),
            "sign": self.sign,
            "matches": self.matches,
        }


def determinant_table(params: ShiftParams, k_max: int, j_max: int) -> list[DeterminantRow]:
    """Brute-force and closed-form determinants for `2 <= k <= k_max`, `0 <= j <= j_max`."""
    moments = moments_of(params)
    return [
        DeterminantRow(k, j, det_exact(hankel(moments, k, j)), det_closed_form(params, k, j))
        for k in range(2, k_max + 1)
        for j in range(j_max + 1)
    ]
