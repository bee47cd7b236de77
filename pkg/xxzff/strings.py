"""
xxzff.strings
~~~~~~~~~~~~~

This module contains the classification of bound states (``r``-strings):
whether they exist for a given anisotropy, their parity and the orientation
of their integration contour.

"""

import logging
import math
from typing import List, Optional, Tuple

from .dressed import DressedState
from .errors import DegenerateStringError, DomainError
from .models import ModelParams, StringSpec

logger = logging.getLogger(__name__)

#: Factors smaller than this in magnitude are treated as vanishing.
ZERO_FACTOR = 1e-12

_FLOOR_TOL = 1e-12


def _floor(x: float) -> int:
    return math.floor(x + _FLOOR_TOL)


def _verdict(factors: List[float]) -> str:
    if any(f < -ZERO_FACTOR for f in factors):
        return "forbidden"
    if any(abs(f) <= ZERO_FACTOR for f in factors):
        return "degenerate"
    return "allowed"


def _high_factors(zeta: float, r: int, s: int) -> List[float]:
    sign = -1.0 if s % 2 else 1.0
    return [sign * math.sin(k * zeta) * math.sin((r - k) * zeta) for k in range(1, r)]


def string_exists_high(zeta: float, r: int, s: int) -> bool:
    """Existence of an ``r``-string centred on ``R + i s pi/2`` for
    ``pi/2 < zeta < pi``.

    :raises: :py:exc:`DegenerateStringError` when no condition is violated
      but one of them has a vanishing factor.
    """
    if not math.pi / 2.0 < zeta < math.pi:
        raise DomainError(f"zeta = {zeta} is not in (pi/2, pi)")
    if r < 2 or s not in (0, 1):
        raise DomainError(f"Invalid string r = {r}, s = {s}")
    verdict = _verdict(_high_factors(zeta, r, s))
    if verdict == "degenerate":
        raise DegenerateStringError(
            f"A string condition for r = {r} vanishes at zeta = {zeta}"
        )
    return verdict == "allowed"


def _high_spec(zeta: float, r: int) -> StringSpec:
    verdicts = {s: _verdict(_high_factors(zeta, r, s)) for s in (0, 1)}
    for status in ("allowed", "degenerate"):
        for s in (0, 1):
            if verdicts[s] == status:
                return StringSpec(
                    {
                        "r": r,
                        "exists": status == "allowed",
                        "status": status,
                        "delta_r": s,
                    }
                )
    return StringSpec({"r": r, "exists": False, "status": "forbidden"})


def _blocks(zeta: float, r: int, kappa: int) -> List[Tuple[int, int, int]]:
    """Return ``(p, first, last)`` for every block meeting ``1..r-2``."""

    def w(p: int) -> int:
        shift = (r - 1) * zeta / (2.0 * math.pi)
        return _floor((p - kappa / 2.0 + shift) * math.pi / zeta)

    blocks = []
    p = -1
    while w(p) >= 1:
        p -= 1
    while w(p) + 1 <= r - 2:
        first, last = w(p) + 1, w(p + 1) - 1
        if first <= last and last >= 1:
            blocks.append((p, max(first, 1), min(last, r - 2)))
        p += 1
    return blocks


def string_exists_low(zeta: float, r: int) -> StringSpec:
    """Classify the ``r``-string for ``0 < zeta < pi/2``.

    The string is centred on ``R - i kappa_r pi/2``. Conditions are grouped
    in blocks ``w_p + 1 <= k <= w_{p+1} - 1``; values of ``k`` in
    ``1..r-2`` outside every block are unconstrained and reported in
    :py:attr:`StringSpec.uncovered`.
    """
    if not 0.0 < zeta < math.pi / 2.0:
        raise DomainError(f"zeta = {zeta} is not in (0, pi/2)")
    if r < 2:
        raise DomainError(f"Invalid string length r = {r}")
    kappa = _floor((r - 1) * zeta / math.pi)
    scale = math.pi * zeta / (math.pi - zeta)
    sign = -1.0 if kappa % 2 else 1.0
    factors = []
    covered = set()
    for p, first, last in _blocks(zeta, r, kappa):
        for k in range(first, last + 1):
            covered.add(k)
            factors.append(
                sign
                * math.sin(scale * (k - p))
                * math.sin(scale * (r - k + p - kappa - 1))
            )
    uncovered = tuple(k for k in range(1, r - 1) if k not in covered)
    if uncovered:
        logger.debug("r = %d: no condition constrains k in %s", r, uncovered)
    status = _verdict(factors)
    return StringSpec(
        {
            "r": r,
            "exists": status == "allowed",
            "status": status,
            "delta_r": kappa % 2,
            "kappa_r": kappa,
            "uncovered": uncovered,
        }
    )


def classify_strings(
    params: ModelParams, r_max_scan: int, state: Optional[DressedState] = None
) -> List[StringSpec]:
    """Classify every ``r`` in ``2..r_max_scan``.

    When ``state`` is given, the orientation ``s_r`` of each existing string
    is attached.
    """
    if r_max_scan < 2:
        raise DomainError(f"The scan bound must be at least 2, got {r_max_scan}")
    zeta = params.zeta
    specs = []
    for r in range(2, r_max_scan + 1):
        if params.is_free_fermion:
            spec = StringSpec({"r": r, "exists": False, "status": "forbidden"})
        elif zeta > math.pi / 2.0:
            spec = _high_spec(zeta, r)
        else:
            spec = string_exists_low(zeta, r)
        if spec.exists and state is not None:
            spec = spec._replace(s_r=state.string_orientation(r, spec.delta_r))
        specs.append(spec)
    return specs


def allowed_strings(
    params: ModelParams, r_max_scan: int, state: Optional[DressedState] = None
) -> List[StringSpec]:
    """Return the allowed strings with ``r <= r_max_scan``, sorted by ``r``.

    The set is empty at the free-fermion point ``zeta = pi/2``.
    """
    return [s for s in classify_strings(params, r_max_scan, state) if s.exists]
